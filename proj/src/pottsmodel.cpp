#include "pcm/pottsmodel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pcm/hash.hpp"

namespace pcm {

PottsGraph PottsGraph::grid(int rows, int cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("empty grid");
  PottsGraph g;
  g.n_nodes = rows * cols;
  g.neighbors.assign(g.n_nodes, {});
  auto add_edge = [&g](int a, int b) {
    g.edges.emplace_back(a, b);
    g.neighbors[a].push_back(b);
    g.neighbors[b].push_back(a);
  };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int l = r * cols + c;
      if (c + 1 < cols) add_edge(l, l + 1);
      if (r + 1 < rows) add_edge(l, l + cols);
    }
  }
  return g;
}

std::uint64_t PottsGraph::signature() const {
  Fnv1a h;
  h.update_value(n_nodes);
  for (const auto& [a, b] : edges) {
    h.update_value(a);
    h.update_value(b);
  }
  return h.digest();
}

PottsParams PottsParams::zeros(int n_clusters, bool two_group) {
  PottsParams p;
  p.n_clusters = n_clusters;
  p.offsets_control = Eigen::VectorXd::Zero(n_clusters);
  if (two_group) p.offsets_cancer = Eigen::VectorXd::Zero(n_clusters);
  return p;
}

SufficientQuantities sufficient_quantities(const std::vector<int>& labels,
                                           const PottsGraph& graph,
                                           int n_clusters) {
  if (static_cast<int>(labels.size()) != graph.n_nodes)
    throw std::invalid_argument("label vector length mismatch");
  SufficientQuantities sq;
  sq.counts = Eigen::VectorXi::Zero(n_clusters);
  for (int lab : labels) {
    if (lab < 0 || lab >= n_clusters)
      throw std::invalid_argument("label out of range");
    sq.counts(lab) += 1;
  }
  for (const auto& [a, b] : graph.edges)
    if (labels[a] == labels[b]) ++sq.matches;
  return sq;
}

double log_pmf_unnorm(const std::vector<int>& labels,
                      const Eigen::VectorXd& offsets, double smoothness,
                      const PottsGraph& graph) {
  const SufficientQuantities sq =
      sufficient_quantities(labels, graph, static_cast<int>(offsets.size()));
  return log_pmf_unnorm(sq, offsets, smoothness);
}

namespace {

// streaming log-sum-exp
struct LogSumExp {
  double max_val = -std::numeric_limits<double>::infinity();
  double sum = 0.0;

  void add(double z) {
    if (z <= max_val) {
      sum += std::exp(z - max_val);
    } else {
      sum = sum * std::exp(max_val - z) + 1.0;
      max_val = z;
    }
  }

  double value() const { return max_val + std::log(sum); }
};

template <typename Visitor>
void enumerate_fields(int n_nodes, int n_clusters, Visitor&& visit) {
  std::vector<int> labels(n_nodes, 0);
  for (;;) {
    visit(labels);
    int pos = 0;
    while (pos < n_nodes) {
      if (++labels[pos] < n_clusters) break;
      labels[pos] = 0;
      ++pos;
    }
    if (pos == n_nodes) return;
  }
}

void check_enumeration_size(int n_nodes, int n_clusters) {
  const double states =
      std::pow(static_cast<double>(n_clusters), n_nodes);
  if (states > static_cast<double>(1 << 24))
    throw std::runtime_error("graph too large for exact enumeration");
}

}  // namespace

double exact_log_d(const Eigen::VectorXd& offsets, double smoothness,
                   const PottsGraph& graph) {
  const int m = static_cast<int>(offsets.size());
  check_enumeration_size(graph.n_nodes, m);
  LogSumExp lse;
  enumerate_fields(graph.n_nodes, m, [&](const std::vector<int>& labels) {
    lse.add(log_pmf_unnorm(labels, offsets, smoothness, graph));
  });
  return lse.value();
}

ExpectedSufficientQuantities exact_expected_quantities(
    const Eigen::VectorXd& offsets, double smoothness,
    const PottsGraph& graph) {
  const int m = static_cast<int>(offsets.size());
  check_enumeration_size(graph.n_nodes, m);
  const double log_d = exact_log_d(offsets, smoothness, graph);
  ExpectedSufficientQuantities out;
  out.counts = Eigen::VectorXd::Zero(m);
  enumerate_fields(graph.n_nodes, m, [&](const std::vector<int>& labels) {
    const SufficientQuantities sq = sufficient_quantities(labels, graph, m);
    const double w = std::exp(log_pmf_unnorm(sq, offsets, smoothness) - log_d);
    for (int e = 0; e < m; ++e) out.counts(e) += w * sq.counts(e);
    out.matches += w * static_cast<double>(sq.matches);
  });
  return out;
}

void gibbs_sweep_field(std::vector<int>& labels,
                       const Eigen::VectorXd& offsets, double smoothness,
                       const PottsGraph& graph, Rng& rng) {
  const int m = static_cast<int>(offsets.size());
  std::vector<double> logp(m);
  for (int node = 0; node < graph.n_nodes; ++node) {
    double max_lp = -std::numeric_limits<double>::infinity();
    for (int e = 0; e < m; ++e) {
      double lp = offsets(e);
      for (int nb : graph.neighbors[node])
        if (labels[nb] == e) lp += smoothness;
      logp[e] = lp;
      max_lp = std::max(max_lp, lp);
    }
    double total = 0.0;
    for (int e = 0; e < m; ++e) {
      logp[e] = std::exp(logp[e] - max_lp);
      total += logp[e];
    }
    double u = rng.uniform() * total;
    int pick = m - 1;
    for (int e = 0; e < m; ++e) {
      u -= logp[e];
      if (u < 0.0) {
        pick = e;
        break;
      }
    }
    labels[node] = pick;
  }
}

std::vector<int> gibbs_sample_field(const Eigen::VectorXd& offsets,
                                    double smoothness, const PottsGraph& graph,
                                    int sweeps, Rng& rng) {
  if (sweeps < 1) throw std::invalid_argument("sweeps must be >= 1");
  const int m = static_cast<int>(offsets.size());
  std::vector<int> labels(graph.n_nodes);
  for (int& lab : labels) lab = static_cast<int>(rng.uniform_int(m));
  if (m == 1) return labels;
  for (int s = 0; s < sweeps; ++s)
    gibbs_sweep_field(labels, offsets, smoothness, graph, rng);
  return labels;
}

}  // namespace pcm
