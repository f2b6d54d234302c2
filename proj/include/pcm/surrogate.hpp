#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "pcm/pottsmodel.hpp"

namespace pcm {

struct SurrogateDesign {
  int offset_points = 7;   // design points per free offset coordinate
  int psi_points = 9;      // design points for the smoothness parameter
  int fields_per_point = 200;
  int sweeps = 50;
  double offset_min = -5.0;
  double offset_max = 5.0;
  double psi_max = 2.5;
  int quadrature_nodes = 33;  // composite Simpson nodes (odd)
};

// Simulation-based stand-in for the Potts log normalizing constant:
// expected sufficient quantities are estimated on a tensor design over
// (offsets, psi) and log d is rebuilt by integrating the expected match
// count in psi from the closed form at psi = 0.
class SurrogateTable {
 public:
  SurrogateTable() = default;
  SurrogateTable(std::uint64_t graph_signature, int n_nodes, int n_edges,
                 int n_clusters, SurrogateDesign design, std::uint64_t seed);

  // interpolated expected sufficient quantities at (offsets, psi)
  double expected_matches(const Eigen::VectorXd& offsets, double psi) const;
  Eigen::VectorXd expected_counts(const Eigen::VectorXd& offsets,
                                  double psi) const;

  // log d via the psi-leg path from the closed form at psi = 0
  double log_d(const Eigen::VectorXd& offsets, double psi) const;

  // alternate path: psi-leg at zero offsets, then a straight offset leg
  // using expected counts; used to check path independence
  double log_d_offset_path(const Eigen::VectorXd& offsets, double psi) const;

  int n_design_points() const { return static_cast<int>(design_psi_.size()); }
  const SurrogateDesign& design() const { return design_; }
  int n_clusters() const { return n_clusters_; }
  int n_nodes() const { return n_nodes_; }
  int n_edges() const { return n_edges_; }
  std::uint64_t graph_signature() const { return graph_signature_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t cache_key() const;

  const std::vector<double>& design_matches() const { return mean_matches_; }
  const std::vector<double>& psi_levels() const { return psi_levels_; }

  void save(const std::string& path) const;
  static SurrogateTable load(const std::string& path);

  friend SurrogateTable build_surrogate(const PottsGraph& graph,
                                        int n_clusters,
                                        const SurrogateDesign& design,
                                        std::uint64_t seed, int threads);

 private:
  void check_query(const Eigen::VectorXd& offsets, double psi) const;
  // local quadratic regression over the free offset coordinates at one
  // psi design level
  double regress_at_level(const std::vector<double>& values,
                          const Eigen::VectorXd& free_offsets, int level) const;

  std::uint64_t graph_signature_ = 0;
  int n_nodes_ = 0;
  int n_edges_ = 0;
  int n_clusters_ = 0;
  SurrogateDesign design_;
  std::uint64_t seed_ = 0;

  std::vector<double> offset_levels_;  // offset_points values
  std::vector<double> psi_levels_;     // psi_points values
  // row-major over (offset grid point a, psi level p):
  // index = a * psi_points + p
  std::vector<double> design_psi_;
  Eigen::MatrixXd design_offsets_;      // n_points x (M-1)
  std::vector<double> mean_matches_;    // monotone in psi per offset column
  Eigen::MatrixXd mean_counts_;         // n_points x M
};

SurrogateTable build_surrogate(const PottsGraph& graph, int n_clusters,
                               const SurrogateDesign& design,
                               std::uint64_t seed, int threads);

// content key for the on-disk cache
std::uint64_t surrogate_cache_key(std::uint64_t graph_signature,
                                  int n_clusters,
                                  const SurrogateDesign& design,
                                  std::uint64_t seed);

}  // namespace pcm
