#ifndef FLOCKSEL_DIAGNOSTICS_HPP
#define FLOCKSEL_DIAGNOSTICS_HPP

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "flocksel/ensemble.hpp"

namespace flocksel {

/// max_ij |v_i - v_j|, Euclidean.
double velocity_diameter(const Ensemble& e);
/// max_ij |x_i - x_j|, Euclidean.
double position_diameter(const Ensemble& e);

Vector mean_velocity(const Ensemble& e);

/// (1/n) sum_j |v_j - v_bar|^2, the empirical misalignment integral.
double misalignment(const Ensemble& e, const TargetState& target);

/// Largest ensemble size wasserstein1 accepts.
inline constexpr std::size_t kWassersteinMaxSize = 256;

/// Wasserstein-1 distance between two equal-size empirical measures on the
/// joint (x, v) space, with the Euclidean norm on the concatenated vector.
///
/// Always exact: the optimal assignment is found with the Hungarian method
/// (O(n^3)). Sizes above kWassersteinMaxSize are refused with ContractError
/// instead of being approximated.
double wasserstein1(const Ensemble& a, const Ensemble& b);

struct GridSpec {
  double x_min = -20.0;
  double x_max = 20.0;
  double y_min = -20.0;
  double y_max = 20.0;
  std::size_t nx = 80;
  std::size_t ny = 80;
};

/// Spatial density rho and flux rho*u binned from a 2-d ensemble.
/// Cell (ix, iy) lives at index ix * ny + iy.
struct DensityGrid {
  GridSpec bounds;
  std::vector<double> rho;
  std::vector<double> flux_x;
  std::vector<double> flux_y;
  /// Samples that fell outside the bounds.
  std::size_t dropped = 0;
  std::size_t samples = 0;

  double cell_width() const;
  double cell_height() const;
};

/// Cells are left-closed and right-open, except that samples on the top or
/// right boundary belong to the last cell.
DensityGrid bin_density(const Ensemble& e, const GridSpec& spec);

/// Header `ix,iy,x_center,y_center,rho,flux_x,flux_y`, row-major in ix then iy.
void write_density_csv(std::ostream& out, const DensityGrid& grid);

}  // namespace flocksel

#endif  // FLOCKSEL_DIAGNOSTICS_HPP
