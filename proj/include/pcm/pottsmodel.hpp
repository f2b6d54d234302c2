#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "pcm/rng.hpp"

namespace pcm {

// Lattice adjacency over grid regions. Labels are defined on every region
// (including non-retained ones), so all subjects sharing grid dimensions
// share one graph.
struct PottsGraph {
  int n_nodes = 0;
  std::vector<std::pair<int, int>> edges;   // i < j
  std::vector<std::vector<int>> neighbors;  // per node

  static PottsGraph grid(int rows, int cols);

  int n_edges() const { return static_cast<int>(edges.size()); }
  std::uint64_t signature() const;
};

// theta = (offsets, smoothness). offsets[0] == 0 for identifiability; in
// two-group mode a second offset vector applies to the cancer group.
struct PottsParams {
  int n_clusters = 1;
  Eigen::VectorXd offsets_control;  // alpha, length M, first entry 0
  Eigen::VectorXd offsets_cancer;   // beta; empty in single-group mode
  double smoothness = 0.0;          // psi >= 0

  static PottsParams zeros(int n_clusters, bool two_group);
  const Eigen::VectorXd& offsets(int group) const {
    return (group == 1 && offsets_cancer.size() > 0) ? offsets_cancer
                                                     : offsets_control;
  }
};

struct SufficientQuantities {
  Eigen::VectorXi counts;  // per-cluster node counts
  long matches = 0;        // matching adjacent pairs
};

SufficientQuantities sufficient_quantities(const std::vector<int>& labels,
                                           const PottsGraph& graph,
                                           int n_clusters);

double log_pmf_unnorm(const std::vector<int>& labels,
                      const Eigen::VectorXd& offsets, double smoothness,
                      const PottsGraph& graph);

inline double log_pmf_unnorm(const SufficientQuantities& sq,
                             const Eigen::VectorXd& offsets,
                             double smoothness) {
  double z = 0.0;
  for (int e = 0; e < offsets.size(); ++e) z += offsets(e) * sq.counts(e);
  return z + smoothness * static_cast<double>(sq.matches);
}

// log of the Potts partition function by full enumeration; M^L capped at
// 2^24 states.
double exact_log_d(const Eigen::VectorXd& offsets, double smoothness,
                   const PottsGraph& graph);

// expected sufficient quantities under the exact distribution (same cap)
struct ExpectedSufficientQuantities {
  Eigen::VectorXd counts;
  double matches = 0.0;
};

ExpectedSufficientQuantities exact_expected_quantities(
    const Eigen::VectorXd& offsets, double smoothness, const PottsGraph& graph);

// Systematic-scan Gibbs sweeps from a uniform-random start; labels 0-based.
std::vector<int> gibbs_sample_field(const Eigen::VectorXd& offsets,
                                    double smoothness, const PottsGraph& graph,
                                    int sweeps, Rng& rng);

// One systematic sweep over an existing field.
void gibbs_sweep_field(std::vector<int>& labels, const Eigen::VectorXd& offsets,
                       double smoothness, const PottsGraph& graph, Rng& rng);

}  // namespace pcm
