#include "flocksel/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "flocksel/csv.hpp"
#include "flocksel/errors.hpp"

namespace flocksel {

namespace {

// Points are the n consecutive dim-vectors of `flat`.
double brute_force_diameter(const std::vector<double>& flat, std::size_t n,
                            std::size_t dim) {
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const double> a(flat.data() + i * dim, dim);
    for (std::size_t j = i + 1; j < n; ++j) {
      std::span<const double> b(flat.data() + j * dim, dim);
      best = std::max(best, squared_distance(a, b));
    }
  }
  return std::sqrt(best);
}

struct Point2 {
  double x;
  double y;
};

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// In the plane the farthest pair lies on the convex hull (monotone chain),
// which keeps the diameter exact at kinetic sample counts.
double planar_diameter(const std::vector<double>& flat, std::size_t n) {
  std::vector<Point2> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = {flat[2 * i], flat[2 * i + 1]};
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Point2& a, const Point2& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  if (pts.size() < 3) {
    if (pts.size() < 2) return 0.0;
    return std::hypot(pts[0].x - pts[1].x, pts[0].y - pts[1].y);
  }
  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  double best = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    for (std::size_t j = i + 1; j < hull.size(); ++j) {
      const double dx = hull[i].x - hull[j].x;
      const double dy = hull[i].y - hull[j].y;
      best = std::max(best, dx * dx + dy * dy);
    }
  }
  return std::sqrt(best);
}

double diameter(const std::vector<double>& flat, std::size_t n,
                std::size_t dim) {
  if (n < 2) return 0.0;
  if (dim == 2 && n > 64) return planar_diameter(flat, n);
  return brute_force_diameter(flat, n, dim);
}

}  // namespace

double velocity_diameter(const Ensemble& e) {
  return diameter(e.velocities(), e.size(), e.dim());
}

double position_diameter(const Ensemble& e) {
  return diameter(e.positions(), e.size(), e.dim());
}

Vector mean_velocity(const Ensemble& e) {
  if (e.size() == 0) throw ContractError("mean of an empty ensemble");
  Vector m(e.dim(), 0.0);
  for (std::size_t i = 0; i < e.size(); ++i) {
    const auto vi = e.v(i);
    for (std::size_t k = 0; k < e.dim(); ++k) m[k] += vi[k];
  }
  for (double& c : m) c /= static_cast<double>(e.size());
  return m;
}

double misalignment(const Ensemble& e, const TargetState& target) {
  if (target.v_bar.size() != e.dim()) {
    throw ContractError("target dimension does not match the ensemble");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    s += squared_distance(e.v(i), target.v_bar);
  }
  return s / static_cast<double>(e.size());
}

double wasserstein1(const Ensemble& a, const Ensemble& b) {
  if (a.size() != b.size() || a.dim() != b.dim()) {
    throw ContractError("wasserstein1 needs equal-size ensembles");
  }
  const std::size_t n = a.size();
  if (n == 0) throw ContractError("wasserstein1 of empty ensembles");
  if (n > kWassersteinMaxSize) {
    throw ContractError("wasserstein1 is exact only up to " +
                        std::to_string(kWassersteinMaxSize) + " samples");
  }
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cost[i * n + j] = std::sqrt(squared_distance(a.x(i), b.x(j)) +
                                  squared_distance(a.v(i), b.v(j)));
    }
  }

  // Hungarian method with row/column potentials, 1-based; column 0 is the
  // virtual start column.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> row_pot(n + 1, 0.0), col_pot(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t row = 1; row <= n; ++row) {
    match[0] = row;
    std::size_t col0 = 0;
    std::vector<double> min_slack(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const std::size_t r = match[col0];
      double delta = inf;
      std::size_t col1 = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double slack =
            cost[(r - 1) * n + (c - 1)] - row_pot[r] - col_pot[c];
        if (slack < min_slack[c]) {
          min_slack[c] = slack;
          way[c] = col0;
        }
        if (min_slack[c] < delta) {
          delta = min_slack[c];
          col1 = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (used[c]) {
          row_pot[match[c]] += delta;
          col_pot[c] -= delta;
        } else {
          min_slack[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  double total = 0.0;
  for (std::size_t c = 1; c <= n; ++c) {
    total += cost[(match[c] - 1) * n + (c - 1)];
  }
  return total / static_cast<double>(n);
}

double DensityGrid::cell_width() const {
  return (bounds.x_max - bounds.x_min) / static_cast<double>(bounds.nx);
}

double DensityGrid::cell_height() const {
  return (bounds.y_max - bounds.y_min) / static_cast<double>(bounds.ny);
}

DensityGrid bin_density(const Ensemble& e, const GridSpec& spec) {
  if (e.dim() != 2) throw ContractError("density binning needs dim = 2");
  if (!(spec.x_max > spec.x_min) || !(spec.y_max > spec.y_min) ||
      spec.nx == 0 || spec.ny == 0) {
    throw ContractError("density grid bounds are degenerate");
  }
  DensityGrid g;
  g.bounds = spec;
  g.samples = e.size();
  const std::size_t cells = spec.nx * spec.ny;
  g.rho.assign(cells, 0.0);
  g.flux_x.assign(cells, 0.0);
  g.flux_y.assign(cells, 0.0);
  const double w = 1.0 / static_cast<double>(e.size());
  const double hx = g.cell_width();
  const double hy = g.cell_height();

  auto cell_of = [](double c, double lo, double hi, double h, std::size_t m) {
    if (c == hi) return m - 1;
    return std::min(m - 1, static_cast<std::size_t>((c - lo) / h));
  };

  for (std::size_t i = 0; i < e.size(); ++i) {
    const auto x = e.x(i);
    if (!(x[0] >= spec.x_min && x[0] <= spec.x_max && x[1] >= spec.y_min &&
          x[1] <= spec.y_max)) {
      ++g.dropped;
      continue;
    }
    const std::size_t ix = cell_of(x[0], spec.x_min, spec.x_max, hx, spec.nx);
    const std::size_t iy = cell_of(x[1], spec.y_min, spec.y_max, hy, spec.ny);
    const std::size_t c = ix * spec.ny + iy;
    const auto v = e.v(i);
    g.rho[c] += w;
    g.flux_x[c] += w * v[0];
    g.flux_y[c] += w * v[1];
  }
  return g;
}

void write_density_csv(std::ostream& out, const DensityGrid& grid) {
  const auto& b = grid.bounds;
  const double hx = grid.cell_width();
  const double hy = grid.cell_height();
  out << "ix,iy,x_center,y_center,rho,flux_x,flux_y\n";
  for (std::size_t ix = 0; ix < b.nx; ++ix) {
    for (std::size_t iy = 0; iy < b.ny; ++iy) {
      const std::size_t c = ix * b.ny + iy;
      out << ix << ',' << iy << ','
          << format_real(b.x_min + (static_cast<double>(ix) + 0.5) * hx) << ','
          << format_real(b.y_min + (static_cast<double>(iy) + 0.5) * hy) << ','
          << format_real(grid.rho[c]) << ',' << format_real(grid.flux_x[c])
          << ',' << format_real(grid.flux_y[c]) << '\n';
    }
  }
}

}  // namespace flocksel
