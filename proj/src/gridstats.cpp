#include "pcm/gridstats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pcm/parallel.hpp"
#include "pcm/spline.hpp"

namespace pcm {

std::vector<double> GridSpec::distance_grid(int n_points) const {
  if (n_points < 3) throw std::invalid_argument("distance grid too short");
  const double r_max = max_distance();
  std::vector<double> r(n_points);
  for (int j = 0; j < n_points; ++j)
    r[j] = r_max * static_cast<double>(j + 1) / n_points;
  return r;
}

GridSpec make_grid_explicit(const Rect& frame, int rows, int cols) {
  if (!frame.valid()) throw std::runtime_error("degenerate window frame");
  if (rows < 1 || cols < 1)
    throw std::runtime_error("grid must have at least one row and column");
  GridSpec g;
  g.rows = rows;
  g.cols = cols;
  g.cell_width = frame.width() / cols;
  g.cell_height = frame.height() / rows;
  g.origin_x = frame.xmin;
  g.origin_y = frame.ymin;
  return g;
}

Rect common_frame(const std::vector<MarkedPointPattern>& patterns) {
  if (patterns.empty()) throw std::runtime_error("no patterns");
  const Rect* largest = nullptr;
  double best_area = -1.0;
  for (const auto& p : patterns) {
    if (!p.window.valid())
      throw std::runtime_error("degenerate window for subject '" +
                               p.subject_id + "'");
    if (p.window.area() > best_area) {
      best_area = p.window.area();
      largest = &p.window;
    }
  }
  const double tol =
      1e-9 * std::max(largest->width(), largest->height());
  for (const auto& p : patterns)
    if (!largest->covers(p.window, tol))
      throw std::runtime_error("window of subject '" + p.subject_id +
                               "' extends beyond the largest window");
  return *largest;
}

namespace {

double mean_retained_count(const std::vector<MarkedPointPattern>& patterns,
                           const GridSpec& grid) {
  long total = 0;
  long n_regions = 0;
  for (const auto& p : patterns) {
    const RegionAssignment a = assign_regions(p, grid);
    for (int l = 0; l < grid.n_regions(); ++l) {
      if (!a.retained[l]) continue;
      total += static_cast<long>(a.point_index[l].size());
      ++n_regions;
    }
  }
  if (n_regions == 0) return 0.0;
  return static_cast<double>(total) / static_cast<double>(n_regions);
}

}  // namespace

GridSpec make_grid(const std::vector<MarkedPointPattern>& patterns,
                   int target_mean_count) {
  if (target_mean_count < 1)
    throw std::runtime_error("target mean count must be >= 1");
  const Rect frame = common_frame(patterns);
  std::size_t total_points = 0;
  for (const auto& p : patterns) total_points += p.size();
  if (total_points == 0) throw std::runtime_error("no points in any pattern");

  // Count-based prefilter, then exact evaluation of the survivors.
  const double want_regions =
      static_cast<double>(total_points) /
      (static_cast<double>(patterns.size()) * target_mean_count);
  GridSpec best;
  double best_gap = std::numeric_limits<double>::infinity();
  const int cap = 128;
  for (int rows = 1; rows <= cap; ++rows) {
    for (int cols = 1; cols <= cap; ++cols) {
      const double n_regions = static_cast<double>(rows) * cols;
      if (n_regions < 0.3 * want_regions || n_regions > 3.0 * want_regions)
        continue;
      // keep cells near-square
      const GridSpec g = make_grid_explicit(frame, rows, cols);
      const double aspect = g.cell_width / g.cell_height;
      if (aspect < 0.5 || aspect > 2.0) continue;
      const double mean = mean_retained_count(patterns, g);
      if (mean <= 0.0) continue;
      const double gap = std::fabs(mean - target_mean_count);
      const bool better =
          gap < best_gap - 1e-12 ||
          (std::fabs(gap - best_gap) <= 1e-12 && best.n_regions() > 0 &&
           (rows * cols < best.n_regions() ||
            (rows * cols == best.n_regions() && rows < best.rows)));
      if (better) {
        best_gap = gap;
        best = g;
      }
    }
  }
  if (best.n_regions() == 0)
    throw std::runtime_error("no feasible grid for the requested mean count");
  return best;
}

RegionAssignment assign_regions(const MarkedPointPattern& pattern,
                                const GridSpec& grid) {
  const int n_regions = grid.n_regions();
  RegionAssignment out;
  out.point_index.assign(n_regions, {});
  out.retained.assign(n_regions, false);

  const double tol = 1e-9 * std::max(grid.cell_width * grid.cols,
                                     grid.cell_height * grid.rows);

  for (std::size_t i = 0; i < pattern.points.size(); ++i) {
    const MarkedPoint& pt = pattern.points[i];
    int col = static_cast<int>(
        std::floor((pt.x - grid.origin_x) / grid.cell_width));
    int row = static_cast<int>(
        std::floor((pt.y - grid.origin_y) / grid.cell_height));
    col = std::clamp(col, 0, grid.cols - 1);
    row = std::clamp(row, 0, grid.rows - 1);
    // a point on an interior cell edge is equidistant to two centers;
    // the tie goes to the lower region index
    if (col > 0 && pt.x == grid.origin_x + col * grid.cell_width) --col;
    if (row > 0 && pt.y == grid.origin_y + row * grid.cell_height) --row;
    out.point_index[row * grid.cols + col].push_back(static_cast<int>(i));
  }

  for (int l = 0; l < n_regions; ++l) {
    if (out.point_index[l].empty()) continue;
    const Rect region = grid.region_rect(l);
    out.retained[l] = pattern.window.covers(region, tol);
  }
  return out;
}

std::vector<double> local_intensity(const std::vector<MarkedPoint>& points,
                                    const std::vector<int>& index, double area,
                                    int n_types) {
  if (!(area > 0.0)) throw std::runtime_error("zero-area region");
  std::vector<double> rates(n_types, 0.0);
  for (int i : index) rates.at(points[i].mark - 1) += 1.0;
  for (double& r : rates) r /= area;
  return rates;
}

double stoyan_bandwidth(int n_points, double area) {
  return 0.15 / std::sqrt(static_cast<double>(n_points) / area);
}

std::vector<double> local_pcf(const std::vector<MarkedPoint>& points,
                              const std::vector<int>& index,
                              const Rect& region,
                              const std::vector<double>& r_grid) {
  const int m = static_cast<int>(index.size());
  if (m < 2) throw std::runtime_error("local_pcf needs at least two points");
  const double area = region.area();
  const double width = region.width();
  const double height = region.height();
  const double w = stoyan_bandwidth(m, area);
  const double inv_w = 1.0 / w;
  const double r_step = r_grid[1] - r_grid[0];
  const int n_r = static_cast<int>(r_grid.size());

  std::vector<double> acc(n_r, 0.0);
  for (int a = 0; a < m; ++a) {
    const MarkedPoint& p = points[index[a]];
    for (int b = a + 1; b < m; ++b) {
      const MarkedPoint& q = points[index[b]];
      const double dx = std::fabs(q.x - p.x);
      const double dy = std::fabs(q.y - p.y);
      const double ox = width - dx;
      const double oy = height - dy;
      if (ox <= 0.0 || oy <= 0.0) continue;  // no translation overlap
      const double edge = area / (ox * oy);
      const double dist = std::hypot(dx, dy);
      // Epanechnikov support: |r - dist| <= w
      const int j_lo = std::max(
          0, static_cast<int>(std::ceil((dist - w - r_grid[0]) / r_step)));
      const int j_hi = std::min(
          n_r - 1,
          static_cast<int>(std::floor((dist + w - r_grid[0]) / r_step)));
      for (int j = j_lo; j <= j_hi; ++j) {
        const double t = (r_grid[j] - dist) * inv_w;
        const double k = 0.75 * inv_w * (1.0 - t * t);
        if (k > 0.0) acc[j] += 2.0 * k * edge;  // both ordered pairs
      }
    }
  }

  const double norm =
      area / (2.0 * M_PI * static_cast<double>(m) * (m - 1));
  std::vector<double> g(n_r);
  for (int j = 0; j < n_r; ++j) g[j] = acc[j] * norm / r_grid[j];
  return g;
}

std::vector<double> process_curve(const std::vector<double>& raw_pcf,
                                  const std::vector<double>& r_grid) {
  std::vector<double> root(raw_pcf.size());
  for (std::size_t j = 0; j < raw_pcf.size(); ++j)
    root[j] = std::sqrt(std::max(raw_pcf[j], 0.0));
  const SplineFit fit = smoothing_spline_gcv(r_grid, root);
  std::vector<double> out = fit.fitted;
  for (double& v : out) v = std::max(v, 0.0);
  return out;
}

GridSummary summarize_pattern(const MarkedPointPattern& pattern,
                              const GridSpec& grid,
                              const std::vector<double>& r_grid, int n_types) {
  GridSummary s;
  s.subject_id = pattern.subject_id;
  s.regions.resize(grid.n_regions());
  const RegionAssignment a = assign_regions(pattern, grid);
  for (int l = 0; l < grid.n_regions(); ++l) {
    RegionSummary& reg = s.regions[l];
    reg.n_points = static_cast<int>(a.point_index[l].size());
    reg.retained = a.retained[l];
    if (!reg.retained) continue;
    const Rect rect = grid.region_rect(l);
    reg.intensity =
        local_intensity(pattern.points, a.point_index[l], rect.area(), n_types);
    if (reg.n_points >= 2) {
      const std::vector<double> raw =
          local_pcf(pattern.points, a.point_index[l], rect, r_grid);
      reg.curve = process_curve(raw, r_grid);
    }
  }
  return s;
}

std::vector<GridSummary> summarize_patterns(
    const std::vector<MarkedPointPattern>& patterns, const GridSpec& grid,
    const std::vector<double>& r_grid, int n_types, int threads) {
  std::vector<GridSummary> out(patterns.size());
  parallel_for(patterns.size(), threads, [&](std::size_t i) {
    out[i] = summarize_pattern(patterns[i], grid, r_grid, n_types);
  });
  return out;
}

}  // namespace pcm
