#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "pcm/gridstats.hpp"

namespace pcm {

struct PcaBasis {
  Eigen::VectorXd mean_curve;     // length R_d
  Eigen::MatrixXd eigenvectors;   // R_d x K, orthonormal columns
  Eigen::VectorXd eigenvalues;    // K, nonincreasing
  double total_variance = 0.0;    // trace of the sample covariance
  std::vector<double> r_grid;

  int n_components() const { return static_cast<int>(eigenvalues.size()); }
  int curve_length() const { return static_cast<int>(mean_curve.size()); }
};

// Sample covariance (divisor count-1) of the available curves; K = smallest
// count whose cumulative eigenvalue fraction reaches variance_threshold.
// Eigenvector signs are fixed so each column's largest-magnitude entry is
// positive.
PcaBasis fit_pca(const std::vector<const std::vector<double>*>& curves,
                 double variance_threshold, const std::vector<double>& r_grid);

Eigen::VectorXd project_scores(const std::vector<double>& curve,
                               const PcaBasis& basis);

// Feature array over subjects n, regions l, dimensions q = 1..K (scores)
// then K+1..K+H (intensities). Columns are standardized over available
// entries with the sample SD.
struct FeatureMatrix {
  int n_subjects = 0;
  int n_regions = 0;
  int n_scores = 0;       // K
  int n_types = 0;        // H
  Eigen::MatrixXd values;  // (n_subjects*n_regions) x Q, standardized
  std::vector<std::uint8_t> mask;  // same layout, 1 = available
  Eigen::VectorXd centers;         // Q
  Eigen::VectorXd scales;          // Q

  int n_dims() const { return n_scores + n_types; }
  int flat(int subject, int region) const {
    return subject * n_regions + region;
  }
  bool available(int subject, int region, int q) const {
    return mask[static_cast<std::size_t>(flat(subject, region)) * n_dims() +
                q] != 0;
  }
};

FeatureMatrix assemble_features(const std::vector<GridSummary>& summaries,
                                const PcaBasis& basis);

struct ClusterReconstruction {
  Eigen::VectorXd intensity;   // H, original units, clamped at 0
  Eigen::VectorXd curve_sqrt;  // R_d, reconstructed sqrt-PCF (unclamped)
  Eigen::VectorXd pcf;         // R_d, max(curve_sqrt, 0)^2
};

// Un-standardize a Q-vector of cluster means and map it back to original
// units: per-type intensities plus the PCF curve on r_grid.
ClusterReconstruction invert_features(const Eigen::VectorXd& cluster_means,
                                      const PcaBasis& basis,
                                      const Eigen::VectorXd& centers,
                                      const Eigen::VectorXd& scales);

}  // namespace pcm
