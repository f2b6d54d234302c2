#pragma once

#include <vector>

namespace pcm {

// Natural cubic smoothing spline at the data sites (Reinsch form):
// minimizes sum_i (y_i - g(x_i))^2 + lambda * Int g''(t)^2 dt.
struct SplineFit {
  std::vector<double> fitted;
  double lambda = 0.0;
  double edf = 0.0;        // trace of the smoother matrix
  double rss = 0.0;
  double roughness = 0.0;  // Int g''^2 of the fitted spline
};

// x strictly increasing, same length as y, length >= 3.
SplineFit smoothing_spline(const std::vector<double>& x,
                           const std::vector<double>& y, double lambda);

// Penalty chosen by generalized cross-validation over a log-spaced grid
// with golden-section refinement.
SplineFit smoothing_spline_gcv(const std::vector<double>& x,
                               const std::vector<double>& y);

// Int g''^2 of the natural cubic spline interpolating (x, y).
double interpolant_roughness(const std::vector<double>& x,
                             const std::vector<double>& y);

}  // namespace pcm
