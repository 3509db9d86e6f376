#include "rwprop/dirichlet.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <optional>
#include <thread>

#include <spdlog/spdlog.h>

namespace rwprop {

double CsrMatrix::at(std::size_t r, std::size_t c) const noexcept {
  const auto first = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]);
  const auto last = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[r + 1]);
  const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(c));
  if (it == last || *it != c) return 0.0;
  return val[static_cast<std::size_t>(it - col.begin())];
}

DirichletSystem assemble(const LatticeGraph& graph, const std::vector<LabelId>& node_seeds, const LabelSet& labels) {
  const std::size_t n = graph.node_count();
  if (node_seeds.size() != n) {
    throw Error(ErrorCode::DimMismatch, "seed vector length " + std::to_string(node_seeds.size()) + " vs " +
                                            std::to_string(n) + " nodes");
  }

  DirichletSystem sys;
  sys.node_count = n;
  sys.labels = labels.ids();
  sys.unseeded_index.assign(n, -1);
  std::vector<std::int64_t> seeded_index(n, -1);
  for (std::size_t node = 0; node < n; ++node) {
    const LabelId l = node_seeds[node];
    if (l == kBackground) {
      sys.unseeded_index[node] = static_cast<std::int64_t>(sys.unseeded.size());
      sys.unseeded.push_back(static_cast<std::uint32_t>(node));
    } else {
      if (!labels.contains(l)) {
        throw Error(ErrorCode::InvalidArgument, "seed label " + std::to_string(l) + " is not in the label set");
      }
      seeded_index[node] = static_cast<std::int64_t>(sys.seeded.size());
      sys.seeded.push_back(static_cast<std::uint32_t>(node));
      sys.seed_label.push_back(l);
    }
  }
  if (sys.seeded.empty()) throw Error(ErrorCode::NoSeeds, "no seeded nodes");

  const std::size_t u = sys.unseeded.size();
  sys.laplacian.rows = sys.laplacian.cols = u;
  sys.coupling.rows = u;
  sys.coupling.cols = sys.seeded.size();
  sys.laplacian.row_ptr.assign(1, 0);
  sys.coupling.row_ptr.assign(1, 0);
  sys.leak.assign(u, 0.0);

  for (std::size_t row = 0; row < u; ++row) {
    const std::uint32_t node = sys.unseeded[row];
    const double diag = graph.degree(node);
    bool diag_done = false;
    for (const auto& nb : graph.neighbors(node)) {
      const std::int64_t r = sys.unseeded_index[nb.node];
      if (r >= 0) {
        if (!diag_done && static_cast<std::size_t>(r) > row) {
          sys.laplacian.col.push_back(static_cast<std::uint32_t>(row));
          sys.laplacian.val.push_back(diag);
          diag_done = true;
        }
        sys.laplacian.col.push_back(static_cast<std::uint32_t>(r));
        sys.laplacian.val.push_back(-nb.weight);
      } else {
        sys.coupling.col.push_back(static_cast<std::uint32_t>(seeded_index[nb.node]));
        sys.coupling.val.push_back(-nb.weight);
        sys.leak[row] += nb.weight;
      }
    }
    if (!diag_done) {
      sys.laplacian.col.push_back(static_cast<std::uint32_t>(row));
      sys.laplacian.val.push_back(diag);
    }
    sys.laplacian.row_ptr.push_back(sys.laplacian.col.size());
    sys.coupling.row_ptr.push_back(sys.coupling.col.size());
  }

  sys.components = connected_components(graph);
  std::vector<bool> has_seed(sys.components.count, false);
  for (auto node : sys.seeded) has_seed[sys.components.id[node]] = true;
  for (std::size_t c = 0; c < has_seed.size(); ++c) {
    if (!has_seed[c]) sys.seedless_components.push_back(static_cast<std::uint32_t>(c));
  }
  return sys;
}

std::size_t SolverConfig::iteration_limit(std::size_t unknowns) const noexcept {
  if (max_iters > 0) return max_iters;
  return std::clamp<std::size_t>(10 * unknowns, 1, 100000);
}

void SolverConfig::validate() const {
  if (!(rel_tol > 0.0) || !std::isfinite(rel_tol)) {
    throw Error(ErrorCode::InvalidArgument, "solver rel_tol must be positive");
  }
}

std::string_view to_string(Preconditioner p) noexcept {
  switch (p) {
    case Preconditioner::Multigrid: return "multigrid";
    case Preconditioner::Jacobi: return "jacobi";
    case Preconditioner::None: return "none";
  }
  return "unknown";
}

Preconditioner parse_preconditioner(std::string_view text) {
  if (text == "multigrid") return Preconditioner::Multigrid;
  if (text == "jacobi") return Preconditioner::Jacobi;
  if (text == "none") return Preconditioner::None;
  throw Error(ErrorCode::InvalidArgument, "unknown preconditioner '" + std::string(text) + "'");
}

WeightedOperator unseeded_operator(const DirichletSystem& sys) {
  WeightedOperator op;
  const auto& a = sys.laplacian;
  op.n = a.rows;
  op.row_ptr.assign(1, 0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      if (a.col[k] == i) continue;
      op.col.push_back(a.col[k]);
      op.weight.push_back(-a.val[k]);
    }
    op.row_ptr.push_back(op.col.size());
  }
  op.leak = sys.leak;
  op.finalize_diagonal();
  return op;
}

namespace {

void require_seeded_components(const DirichletSystem& sys) {
  if (!sys.seedless_components.empty()) {
    const auto c = sys.seedless_components.front();
    const auto size = sys.components.sizes()[c];
    throw Error(ErrorCode::SeedlessComponent, "component " + std::to_string(c) + " (" + std::to_string(size) +
                                                  " nodes) contains no seed; " +
                                                  std::to_string(sys.seedless_components.size()) +
                                                  " seedless component(s) in total");
  }
}

std::vector<double> label_rhs(const DirichletSystem& sys, LabelId label) {
  std::vector<double> b(sys.unseeded_count(), 0.0);
  const auto& c = sys.coupling;
  for (std::size_t i = 0; i < c.rows; ++i) {
    double acc = 0.0;
    for (std::size_t k = c.row_ptr[i]; k < c.row_ptr[i + 1]; ++k) {
      if (sys.seed_label[c.col[k]] == label) acc -= c.val[k];
    }
    b[i] = acc;
  }
  return b;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Operator and preconditioner shared read-only by every label solve.
class LabelSolver {
 public:
  LabelSolver(const DirichletSystem& sys, const SolverConfig& cfg)
      : sys_(sys), cfg_(cfg), op_(unseeded_operator(sys)) {
    if (cfg.preconditioner == Preconditioner::Multigrid && op_.n > 0) {
      AggregationMultigrid::Options opts;
      opts.coarse_size = std::max<std::size_t>(cfg.coarse_size, 1);
      multigrid_.emplace(op_, opts);
    }
  }

  LabelSolve solve(LabelId label) const {
    const std::size_t n = op_.n;
    LabelSolve out;
    out.label = label;
    out.x.assign(n, 0.0);
    if (n == 0) return out;

    const std::vector<double> b = label_rhs(sys_, label);
    if (std::all_of(b.begin(), b.end(), [](double v) { return v == 0.0; })) return out;

    std::vector<double> r = b;
    std::vector<double> z(n);
    std::vector<double> q(n);
    precondition(r, z);
    const double rhs_norm = std::sqrt(dot(z, z));
    std::vector<double> p = z;
    double rz = dot(r, z);

    const std::size_t limit = cfg_.iteration_limit(n);
    double rel = 1.0;
    for (std::size_t it = 1; it <= limit; ++it) {
      op_.apply(p, q);
      const double alpha = rz / dot(p, q);
      for (std::size_t i = 0; i < n; ++i) {
        out.x[i] += alpha * p[i];
        r[i] -= alpha * q[i];
      }
      precondition(r, z);
      rel = std::sqrt(dot(z, z)) / rhs_norm;
      out.iterations = it;
      if (rel <= cfg_.rel_tol) {
        out.residual = rel;
        return out;
      }
      const double rz_next = dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw Error(ErrorCode::ConvergenceFailure, "label " + std::to_string(label) + ": " + std::to_string(limit) +
                                                   " iterations reached relative residual " + std::to_string(rel) +
                                                   " > " + std::to_string(cfg_.rel_tol));
  }

 private:
  void precondition(const std::vector<double>& r, std::vector<double>& z) const {
    switch (cfg_.preconditioner) {
      case Preconditioner::Multigrid: multigrid_->apply(r, z); break;
      case Preconditioner::Jacobi:
        for (std::size_t i = 0; i < r.size(); ++i) z[i] = r[i] / op_.diag[i];
        break;
      case Preconditioner::None: z = r; break;
    }
  }

  const DirichletSystem& sys_;
  const SolverConfig& cfg_;
  WeightedOperator op_;
  std::optional<AggregationMultigrid> multigrid_;
};

}  // namespace

LabelSolve solve_label(const DirichletSystem& sys, LabelId label, const SolverConfig& cfg) {
  cfg.validate();
  require_seeded_components(sys);
  return LabelSolver(sys, cfg).solve(label);
}

DirichletSolution solve_all(const DirichletSystem& sys, const SolverConfig& cfg) {
  cfg.validate();
  require_seeded_components(sys);

  const std::size_t m = sys.labels.size();
  const std::size_t solved = m - 1;
  std::vector<LabelSolve> solves(solved);

  std::size_t workers = cfg.threads > 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, solved);
  const LabelSolver solver(sys, cfg);
  if (workers <= 1) {
    for (std::size_t k = 0; k < solved; ++k) solves[k] = solver.solve(sys.labels[k]);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (std::size_t k = next++; k < solved; k = next++) {
            try {
              solves[k] = solver.solve(sys.labels[k]);
            } catch (...) {
              std::lock_guard lock(failure_mutex);
              if (!failure) failure = std::current_exception();
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  DirichletSolution out;
  auto& field = out.field;
  field.labels = sys.labels;
  field.node_count = sys.node_count;
  field.values.assign(sys.node_count * m, 0.0);

  for (std::size_t k = 0; k < sys.seeded.size(); ++k) {
    const auto col = static_cast<std::size_t>(
        std::lower_bound(sys.labels.begin(), sys.labels.end(), sys.seed_label[k]) - sys.labels.begin());
    field.at(sys.seeded[k], col) = 1.0;
  }

  for (std::size_t row = 0; row < sys.unseeded_count(); ++row) {
    const std::uint32_t node = sys.unseeded[row];
    double sum = 0.0;
    for (std::size_t k = 0; k < solved; ++k) {
      field.at(node, k) = solves[k].x[row];
      sum += solves[k].x[row];
    }
    field.at(node, m - 1) = 1.0 - sum;

    double violation = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double p = field.at(node, k);
      violation = std::max({violation, -p, p - 1.0});
    }
    if (violation > kSimplexHardLimit) {
      throw Error(ErrorCode::MaximumPrincipleViolation,
                  "node " + std::to_string(node) + " has a probability outside [0,1] by " + std::to_string(violation) +
                      "; the solver tolerance is too loose");
    }
    if (violation > kSimplexTolerance) {
      double total = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        double& p = field.at(node, k);
        p = std::clamp(p, 0.0, 1.0);
        total += p;
      }
      for (std::size_t k = 0; k < m; ++k) field.at(node, k) /= total;
      ++out.renormalized_nodes;
    }
  }
  if (out.renormalized_nodes > 0) {
    spdlog::info("clamped and renormalized {} node(s) drifting beyond {}", out.renormalized_nodes, kSimplexTolerance);
  }

  for (auto& s : solves) {
    s.x.clear();
    s.x.shrink_to_fit();
  }
  out.solves = std::move(solves);
  return out;
}

ProbabilityField dense_reference_solve(const DirichletSystem& sys) {
  const std::size_t n = sys.unseeded_count();
  if (n > kDenseReferenceLimit) {
    throw Error(ErrorCode::TooLarge, std::to_string(n) + " unknowns exceed the dense reference limit of " +
                                         std::to_string(kDenseReferenceLimit));
  }
  const std::size_t m = sys.labels.size();

  // weights[i*n+j]: positive coupling between unknowns i and j.
  std::vector<double> weights(n * n, 0.0);
  std::vector<double> leak(n, 0.0);
  std::vector<double> rhs(n * m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = sys.laplacian.row_ptr[i]; k < sys.laplacian.row_ptr[i + 1]; ++k) {
      const std::uint32_t j = sys.laplacian.col[k];
      if (j != i) weights[i * n + j] = -sys.laplacian.val[k];
    }
    for (std::size_t k = sys.coupling.row_ptr[i]; k < sys.coupling.row_ptr[i + 1]; ++k) {
      const double w = -sys.coupling.val[k];
      const LabelId l = sys.seed_label[sys.coupling.col[k]];
      const auto col = static_cast<std::size_t>(
          std::lower_bound(sys.labels.begin(), sys.labels.end(), l) - sys.labels.begin());
      leak[i] += w;
      rhs[i * m + col] += w;
    }
  }

  // Eliminate unknowns in order. The pivot is the remaining leak plus the
  // weights to not-yet-eliminated unknowns, which equals the Schur-complement
  // diagonal because every row of [L_U | B] sums to zero.
  std::vector<double> pivot(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double d = leak[k];
    for (std::size_t j = k + 1; j < n; ++j) d += weights[k * n + j];
    if (!(d > 0.0)) {
      throw Error(ErrorCode::SeedlessComponent, "unknown " + std::to_string(k) + " is not connected to any seed");
    }
    pivot[k] = d;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double wik = weights[i * n + k];
      if (wik == 0.0) continue;
      const double f = wik / d;
      leak[i] += f * leak[k];
      for (std::size_t j = k + 1; j < n; ++j) {
        if (j != i) weights[i * n + j] += f * weights[k * n + j];
      }
      for (std::size_t l = 0; l < m; ++l) rhs[i * m + l] += f * rhs[k * m + l];
    }
  }

  std::vector<double> x(n * m, 0.0);
  for (std::size_t kk = n; kk-- > 0;) {
    for (std::size_t l = 0; l < m; ++l) {
      double acc = rhs[kk * m + l];
      for (std::size_t j = kk + 1; j < n; ++j) acc += weights[kk * n + j] * x[j * m + l];
      x[kk * m + l] = acc / pivot[kk];
    }
  }

  ProbabilityField field;
  field.labels = sys.labels;
  field.node_count = sys.node_count;
  field.values.assign(sys.node_count * m, 0.0);
  for (std::size_t k = 0; k < sys.seeded.size(); ++k) {
    const auto col = static_cast<std::size_t>(
        std::lower_bound(sys.labels.begin(), sys.labels.end(), sys.seed_label[k]) - sys.labels.begin());
    field.at(sys.seeded[k], col) = 1.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < m; ++l) field.at(sys.unseeded[i], l) = x[i * m + l];
  }
  return field;
}

}  // namespace rwprop
