#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "rwprop/labels.hpp"
#include "rwprop/lattice.hpp"
#include "rwprop/multigrid.hpp"

namespace rwprop {

/// Compressed sparse rows; column indices ascending within each row.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col;
  std::vector<double> val;

  double at(std::size_t r, std::size_t c) const noexcept;
};

/// The random-walker linear system for one lattice and one seed assignment.
///
/// Nodes are split into seeded (fixed to one label) and unseeded. `laplacian`
/// is the unseeded-unseeded block L_U of the graph Laplacian and `coupling`
/// the unseeded-seeded block B, so that for label l the unknown probabilities
/// solve L_U x = -B m_l with m_l the indicator of seeds carrying l. Every row
/// of [L_U | B] sums to zero.
struct DirichletSystem {
  std::size_t node_count = 0;
  std::vector<LabelId> labels;               // ascending label ids
  std::vector<std::uint32_t> unseeded;       // node ids, ascending
  std::vector<std::uint32_t> seeded;         // node ids, ascending
  std::vector<LabelId> seed_label;           // label of seeded[k]
  std::vector<std::int64_t> unseeded_index;  // node -> row in L_U, or -1
  CsrMatrix laplacian;
  CsrMatrix coupling;
  std::vector<double> leak;  // total weight from each unseeded row to seeds

  Components components;
  std::vector<std::uint32_t> seedless_components;  // component ids holding no seed

  std::size_t unseeded_count() const noexcept { return unseeded.size(); }
};

// Seeds are given per node; kBackground marks an unseeded node. Every seed
// label must belong to `labels`. Throws NoSeeds when nothing is seeded.
DirichletSystem assemble(const LatticeGraph& graph, const std::vector<LabelId>& node_seeds, const LabelSet& labels);

enum class Preconditioner { Multigrid, Jacobi, None };

std::string_view to_string(Preconditioner p) noexcept;
Preconditioner parse_preconditioner(std::string_view text);

struct SolverConfig {
  double rel_tol = 1e-8;  // on the preconditioned residual, relative to the preconditioned rhs
  std::size_t max_iters = 0;  // 0: 10 x unknowns, capped at 100000
  Preconditioner preconditioner = Preconditioner::Multigrid;
  std::size_t threads = 0;  // 0: hardware concurrency
  std::size_t coarse_size = 400;  // multigrid: solve directly once a level is this small

  std::size_t iteration_limit(std::size_t unknowns) const noexcept;
  void validate() const;
};

struct LabelSolve {
  LabelId label = kBackground;
  std::vector<double> x;  // one value per unseeded node
  std::size_t iterations = 0;
  double residual = 0.0;  // relative residual, measured in the preconditioned norm
};

/// Per-node probability vectors, node-major.
struct ProbabilityField {
  std::vector<LabelId> labels;
  std::size_t node_count = 0;
  std::vector<double> values;

  double at(std::size_t node, std::size_t k) const noexcept { return values[node * labels.size() + k]; }
  double& at(std::size_t node, std::size_t k) noexcept { return values[node * labels.size() + k]; }
};

struct DirichletSolution {
  ProbabilityField field;
  std::vector<LabelSolve> solves;  // x vectors are released; stats only
  std::size_t renormalized_nodes = 0;
};

inline constexpr double kSimplexTolerance = 1e-6;
inline constexpr double kSimplexHardLimit = 1e-4;

// The unseeded block as a weighted graph (off-diagonal weights plus leak).
WeightedOperator unseeded_operator(const DirichletSystem& sys);

// Preconditioned conjugate gradient for a single label. Throws
// SeedlessComponent when some component has no seed at all and
// ConvergenceFailure when the iteration limit is reached.
LabelSolve solve_label(const DirichletSystem& sys, LabelId label, const SolverConfig& cfg);

// Solves every label except the largest id, which is closed as one minus the
// rest. Label solves run concurrently on up to cfg.threads workers.
DirichletSolution solve_all(const DirichletSystem& sys, const SolverConfig& cfg);

inline constexpr std::size_t kDenseReferenceLimit = 4096;

/// Direct elimination of every label's system, for testing. Pivots and
/// Schur-complement updates are formed from sums of positive weights only,
/// so no cancellation occurs even with weights near the floor.
ProbabilityField dense_reference_solve(const DirichletSystem& sys);

}  // namespace rwprop
