// Multi-component complex wavefunction sampled on a Grid2D.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gimprint/core.hpp"
#include "gimprint/grid.hpp"

namespace gimprint {

enum class Representation { Position, Momentum };

/// n_comp complex amplitudes per grid point, stored component-major and
/// row-major within a component (the snapshot file layout).
///
/// Momentum-representation fields hold the unitary DFT of each component in
/// FFT bin order; the same Grid2D supplies their reciprocal values.
class SpinorField {
 public:
  SpinorField(Grid2D grid, std::size_t n_comp,
              Representation rep = Representation::Position)
      : grid_(grid), n_comp_(n_comp), rep_(rep), data_(n_comp * grid.size()) {
    require(n_comp >= 1, "spinor field: need at least one component");
  }

  const Grid2D& grid() const { return grid_; }
  std::size_t n_comp() const { return n_comp_; }
  Representation representation() const { return rep_; }
  void set_representation(Representation rep) { rep_ = rep; }

  std::span<cplx> component(std::size_t c) {
    return {data_.data() + c * grid_.size(), grid_.size()};
  }
  std::span<const cplx> component(std::size_t c) const {
    return {data_.data() + c * grid_.size(), grid_.size()};
  }

  cplx& at(std::size_t c, std::size_t flat) { return data_[c * grid_.size() + flat]; }
  const cplx& at(std::size_t c, std::size_t flat) const {
    return data_[c * grid_.size() + flat];
  }

  std::span<cplx> data() { return data_; }
  std::span<const cplx> data() const { return data_; }

  /// Total density sum_c |psi_c|^2 at a flat grid index (no area factor).
  double density_at(std::size_t flat) const {
    double s = 0.0;
    for (std::size_t c = 0; c < n_comp_; ++c) s += std::norm(at(c, flat));
    return s;
  }

  /// Weight of one sample in norm integrals. The unitary DFT preserves sums
  /// of |psi|^2, so dx*dz applies in both representations.
  double measure() const { return grid_.cell_area(); }

  SpinorField& operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

 private:
  Grid2D grid_;
  std::size_t n_comp_;
  Representation rep_;
  std::vector<cplx> data_;
};

inline void require_same_shape(const SpinorField& a, const SpinorField& b,
                               const char* what) {
  require(a.grid() == b.grid() && a.n_comp() == b.n_comp() &&
              a.representation() == b.representation(),
          std::string(what) + ": fields differ in grid, component count or representation");
}

}  // namespace gimprint
