#pragma once

#include <string>
#include <vector>

#include "pcm/geometry.hpp"
#include "pcm/ingest.hpp"

namespace pcm {

// Fixed rectangular grid spanning the common frame (the largest window).
// Region index l = row * cols + col, row 0 at ymin, col 0 at xmin.
struct GridSpec {
  int rows = 0;
  int cols = 0;
  double cell_width = 0.0;
  double cell_height = 0.0;
  double origin_x = 0.0;
  double origin_y = 0.0;

  int n_regions() const { return rows * cols; }

  Rect region_rect(int l) const {
    const int row = l / cols;
    const int col = l % cols;
    Rect r;
    r.xmin = origin_x + col * cell_width;
    r.xmax = origin_x + (col + 1) * cell_width;
    r.ymin = origin_y + row * cell_height;
    r.ymax = origin_y + (row + 1) * cell_height;
    return r;
  }

  // half the shortest region dimension; the PCF domain is (0, max_distance]
  double max_distance() const {
    return 0.5 * std::min(cell_width, cell_height);
  }

  // R_d equispaced distances R/R_d, 2R/R_d, ..., R
  std::vector<double> distance_grid(int n_points) const;
};

// Grid with rows x cols equal cells over the frame.
GridSpec make_grid_explicit(const Rect& frame, int rows, int cols);

// Equal-cell grid over the largest window whose mean point count per
// retained region is closest to target_mean_count.
GridSpec make_grid(const std::vector<MarkedPointPattern>& patterns,
                   int target_mean_count);

// Frame = the largest-area window; every other window must lie inside it.
Rect common_frame(const std::vector<MarkedPointPattern>& patterns);

struct RegionAssignment {
  std::vector<std::vector<int>> point_index;  // per region, indices into points
  std::vector<bool> retained;
};

// Nearest-center assignment (ties to the lower region index); regions
// crossing the subject's window boundary or empty are not retained.
RegionAssignment assign_regions(const MarkedPointPattern& pattern,
                                const GridSpec& grid);

// points per unit area for each type 1..n_types
std::vector<double> local_intensity(const std::vector<MarkedPoint>& points,
                                    const std::vector<int>& index,
                                    double area, int n_types);

// Fixed-bandwidth kernel estimator of the pair correlation function with
// translation edge correction, evaluated on r_grid. Requires >= 2 points.
std::vector<double> local_pcf(const std::vector<MarkedPoint>& points,
                              const std::vector<int>& index,
                              const Rect& region,
                              const std::vector<double>& r_grid);

// Stoyan's rule of thumb for the Epanechnikov half-width.
double stoyan_bandwidth(int n_points, double area);

// sqrt, cubic smoothing spline (GCV), clamp at zero.
std::vector<double> process_curve(const std::vector<double>& raw_pcf,
                                  const std::vector<double>& r_grid);

struct RegionSummary {
  bool retained = false;
  int n_points = 0;
  std::vector<double> intensity;  // empty when not retained
  std::vector<double> curve;      // empty when missing
};

struct GridSummary {
  std::string subject_id;
  std::vector<RegionSummary> regions;  // length rows*cols
};

GridSummary summarize_pattern(const MarkedPointPattern& pattern,
                              const GridSpec& grid,
                              const std::vector<double>& r_grid, int n_types);

std::vector<GridSummary> summarize_patterns(
    const std::vector<MarkedPointPattern>& patterns, const GridSpec& grid,
    const std::vector<double>& r_grid, int n_types, int threads);

}  // namespace pcm
