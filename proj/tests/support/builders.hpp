#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rwprop/labels.hpp"
#include "rwprop/lattice.hpp"
#include "rwprop/volume.hpp"

namespace rwprop::testing {

inline Grid grid_of(std::size_t x, std::size_t y, std::size_t z) {
  Grid g;
  g.dims = {x, y, z};
  return g;
}

inline LabelSet two_labels() { return LabelSet({{1, "A"}, {2, "B"}}); }

// 1 x 1 x L chain with uniform guidance.
inline LatticeGraph uniform_chain(std::size_t length) {
  const Grid g = grid_of(1, 1, length);
  return build_lattice(make_image(g, 0.5), make_mask(g, true), kDefaultBeta);
}

// Seeds A at node 0 and B at the last node.
inline std::vector<LabelId> end_seeds(std::size_t n) {
  std::vector<LabelId> s(n, kBackground);
  s.front() = 1;
  s.back() = 2;
  return s;
}

// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("rwprop_" + tag + "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace rwprop::testing
