#include "pcm/surrogate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "pcm/csv.hpp"
#include "pcm/hash.hpp"
#include "pcm/parallel.hpp"

namespace pcm {

namespace {

// natural cubic spline interpolation on a small set of knots
struct NaturalSpline {
  std::vector<double> x, y, m;  // m = second derivatives at knots

  static NaturalSpline fit(const std::vector<double>& x,
                           const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    NaturalSpline s;
    s.x = x;
    s.y = y;
    s.m.assign(n, 0.0);
    if (n < 3) return s;
    std::vector<double> diag(n - 2), rhs(n - 2), off(n - 2, 0.0);
    for (int i = 1; i + 1 <= n - 1; ++i) {
      const double h0 = x[i] - x[i - 1];
      const double h1 = x[i + 1] - x[i];
      diag[i - 1] = (h0 + h1) / 3.0;
      if (i + 1 <= n - 2) off[i - 1] = h1 / 6.0;
      rhs[i - 1] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
    }
    // tridiagonal solve
    for (int i = 1; i < n - 2; ++i) {
      const double f = off[i - 1] / diag[i - 1];
      diag[i] -= f * off[i - 1];
      rhs[i] -= f * rhs[i - 1];
    }
    for (int i = n - 3; i >= 0; --i) {
      double v = rhs[i];
      if (i + 1 <= n - 3) v -= off[i] * s.m[i + 2];
      s.m[i + 1] = v / diag[i];
    }
    return s;
  }

  double eval(double t) const {
    const int n = static_cast<int>(x.size());
    if (n == 1) return y[0];
    int i = 0;
    while (i + 2 < n && t > x[i + 1]) ++i;
    const double h = x[i + 1] - x[i];
    const double a = (x[i + 1] - t) / h;
    const double b = (t - x[i]) / h;
    return a * y[i] + b * y[i + 1] +
           ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0;
  }
};

// pool adjacent violators, nondecreasing
void isotonic_inplace(std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  std::vector<double> level(n), weight(n);
  std::vector<int> size(n);
  int top = 0;
  for (int i = 0; i < n; ++i) {
    level[top] = v[i];
    weight[top] = 1.0;
    size[top] = 1;
    ++top;
    while (top > 1 && level[top - 2] > level[top - 1]) {
      const double w = weight[top - 2] + weight[top - 1];
      level[top - 2] =
          (level[top - 2] * weight[top - 2] + level[top - 1] * weight[top - 1]) /
          w;
      weight[top - 2] = w;
      size[top - 2] += size[top - 1];
      --top;
    }
  }
  int pos = 0;
  for (int b = 0; b < top; ++b)
    for (int k = 0; k < size[b]; ++k) v[pos++] = level[b];
}

double simpson(const std::function<double(double)>& f, double lo, double hi,
               int nodes) {
  if (hi <= lo) return 0.0;
  if (nodes < 3) nodes = 3;
  if (nodes % 2 == 0) ++nodes;
  const int intervals = nodes - 1;
  const double h = (hi - lo) / intervals;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < intervals; ++i)
    sum += f(lo + i * h) * ((i % 2) ? 4.0 : 2.0);
  return sum * h / 3.0;
}

double log_sum_exp_offsets(const Eigen::VectorXd& offsets) {
  const double mx = offsets.maxCoeff();
  double s = 0.0;
  for (int e = 0; e < offsets.size(); ++e) s += std::exp(offsets(e) - mx);
  return mx + std::log(s);
}

}  // namespace

SurrogateTable::SurrogateTable(std::uint64_t graph_signature, int n_nodes,
                               int n_edges, int n_clusters,
                               SurrogateDesign design, std::uint64_t seed)
    : graph_signature_(graph_signature),
      n_nodes_(n_nodes),
      n_edges_(n_edges),
      n_clusters_(n_clusters),
      design_(design),
      seed_(seed) {}

std::uint64_t surrogate_cache_key(std::uint64_t graph_signature,
                                  int n_clusters, const SurrogateDesign& d,
                                  std::uint64_t seed) {
  Fnv1a h;
  h.update_value(graph_signature);
  h.update_value(n_clusters);
  h.update_value(d.offset_points);
  h.update_value(d.psi_points);
  h.update_value(d.fields_per_point);
  h.update_value(d.sweeps);
  h.update_value(d.offset_min);
  h.update_value(d.offset_max);
  h.update_value(d.psi_max);
  h.update_value(seed);
  return h.digest();
}

std::uint64_t SurrogateTable::cache_key() const {
  return surrogate_cache_key(graph_signature_, n_clusters_, design_, seed_);
}

SurrogateTable build_surrogate(const PottsGraph& graph, int n_clusters,
                               const SurrogateDesign& design,
                               std::uint64_t seed, int threads) {
  if (n_clusters < 1) throw std::invalid_argument("n_clusters must be >= 1");
  if (design.fields_per_point < 1 || design.sweeps < 1)
    throw std::invalid_argument("insufficient simulation budget");
  if (design.psi_points < 3)
    throw std::invalid_argument("need at least 3 psi design levels");
  if (n_clusters > 1 && design.offset_points < 2)
    throw std::invalid_argument("need at least 2 offset design levels");
  SurrogateTable t(graph.signature(), graph.n_nodes, graph.n_edges(),
                   n_clusters, design, seed);

  const int free_dims = n_clusters - 1;
  t.offset_levels_.resize(design.offset_points);
  for (int i = 0; i < design.offset_points; ++i)
    t.offset_levels_[i] =
        design.offset_min + (design.offset_max - design.offset_min) *
                                (design.offset_points == 1
                                     ? 0.5
                                     : static_cast<double>(i) /
                                           (design.offset_points - 1));
  t.psi_levels_.resize(design.psi_points);
  for (int p = 0; p < design.psi_points; ++p)
    t.psi_levels_[p] = design.psi_max * static_cast<double>(p) /
                       (design.psi_points - 1);

  long combos = 1;
  for (int d = 0; d < free_dims; ++d) combos *= design.offset_points;
  const long n_points = combos * design.psi_points;
  t.design_offsets_.resize(n_points, free_dims);
  t.design_psi_.resize(n_points);
  t.mean_matches_.assign(n_points, 0.0);
  t.mean_counts_.resize(n_points, n_clusters);

  // odometer over offset combos, psi fastest
  std::vector<int> combo(free_dims, 0);
  for (long a = 0; a < combos; ++a) {
    for (int p = 0; p < design.psi_points; ++p) {
      const long idx = a * design.psi_points + p;
      t.design_psi_[idx] = t.psi_levels_[p];
      for (int d = 0; d < free_dims; ++d)
        t.design_offsets_(idx, d) = t.offset_levels_[combo[d]];
    }
    for (int d = 0; d < free_dims; ++d) {
      if (++combo[d] < design.offset_points) break;
      combo[d] = 0;
    }
  }

  parallel_for(static_cast<std::size_t>(n_points), threads, [&](std::size_t i) {
    Eigen::VectorXd offsets = Eigen::VectorXd::Zero(n_clusters);
    for (int d = 0; d < free_dims; ++d)
      offsets(d + 1) = t.design_offsets_(static_cast<long>(i), d);
    const double psi = t.design_psi_[i];
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_clusters);
    double matches = 0.0;
    for (int f = 0; f < design.fields_per_point; ++f) {
      Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i), f));
      const std::vector<int> labels =
          gibbs_sample_field(offsets, psi, graph, design.sweeps, rng);
      const SufficientQuantities sq =
          sufficient_quantities(labels, graph, n_clusters);
      for (int e = 0; e < n_clusters; ++e) counts(e) += sq.counts(e);
      matches += static_cast<double>(sq.matches);
    }
    counts /= design.fields_per_point;
    matches /= design.fields_per_point;
    t.mean_counts_.row(static_cast<long>(i)) = counts.transpose();
    t.mean_matches_[i] = matches;
  });

  // the exact expected match count is nondecreasing in psi; enforce it on
  // the Monte Carlo estimates column-wise
  for (long a = 0; a < combos; ++a) {
    std::vector<double> col(design.psi_points);
    for (int p = 0; p < design.psi_points; ++p)
      col[p] = t.mean_matches_[a * design.psi_points + p];
    isotonic_inplace(col);
    for (int p = 0; p < design.psi_points; ++p)
      t.mean_matches_[a * design.psi_points + p] = col[p];
  }
  return t;
}

void SurrogateTable::check_query(const Eigen::VectorXd& offsets,
                                 double psi) const {
  if (static_cast<int>(offsets.size()) != n_clusters_)
    throw std::invalid_argument("offset vector length mismatch");
  if (std::fabs(offsets(0)) > 1e-12)
    throw std::invalid_argument("first offset must be 0");
  for (int e = 1; e < offsets.size(); ++e)
    if (offsets(e) < design_.offset_min - 1e-9 ||
        offsets(e) > design_.offset_max + 1e-9)
      throw std::runtime_error("offset outside surrogate design box");
  if (psi < -1e-12 || psi > design_.psi_max + 1e-9)
    throw std::runtime_error("smoothness outside surrogate design box");
}

double SurrogateTable::regress_at_level(const std::vector<double>& values,
                                        const Eigen::VectorXd& free_offsets,
                                        int level) const {
  const int free_dims = n_clusters_ - 1;
  const long combos =
      static_cast<long>(values.size()) / design_.psi_points;
  if (free_dims == 0) return values[level];

  const double spacing =
      design_.offset_points > 1
          ? (design_.offset_max - design_.offset_min) /
                (design_.offset_points - 1)
          : 1.0;
  const double bw = 1.5 * spacing;

  const int n_feat = 1 + free_dims + free_dims * (free_dims + 1) / 2;
  Eigen::MatrixXd ata = Eigen::MatrixXd::Zero(n_feat, n_feat);
  Eigen::VectorXd atb = Eigen::VectorXd::Zero(n_feat);
  Eigen::VectorXd feat(n_feat);
  for (long a = 0; a < combos; ++a) {
    const long idx = a * design_.psi_points + level;
    double dist2 = 0.0;
    for (int d = 0; d < free_dims; ++d) {
      const double u = (design_offsets_(idx, d) - free_offsets(d)) / bw;
      dist2 += u * u;
    }
    const double w = std::exp(-0.5 * dist2);
    if (w < 1e-12) continue;
    int f = 0;
    feat(f++) = 1.0;
    for (int d = 0; d < free_dims; ++d)
      feat(f++) = (design_offsets_(idx, d) - free_offsets(d)) / bw;
    for (int d = 0; d < free_dims; ++d)
      for (int e = d; e < free_dims; ++e)
        feat(f++) = feat(1 + d) * feat(1 + e);
    ata.noalias() += w * feat * feat.transpose();
    atb.noalias() += w * values[idx] * feat;
  }
  ata.diagonal().array() += 1e-8;
  const Eigen::VectorXd beta = ata.ldlt().solve(atb);
  return beta(0);
}

double SurrogateTable::expected_matches(const Eigen::VectorXd& offsets,
                                        double psi) const {
  check_query(offsets, psi);
  const Eigen::VectorXd free_offsets = offsets.tail(n_clusters_ - 1);
  std::vector<double> by_level(design_.psi_points);
  for (int p = 0; p < design_.psi_points; ++p)
    by_level[p] = regress_at_level(mean_matches_, free_offsets, p);
  const NaturalSpline s = NaturalSpline::fit(psi_levels_, by_level);
  return s.eval(psi);
}

Eigen::VectorXd SurrogateTable::expected_counts(const Eigen::VectorXd& offsets,
                                                double psi) const {
  check_query(offsets, psi);
  const Eigen::VectorXd free_offsets = offsets.tail(n_clusters_ - 1);
  Eigen::VectorXd out(n_clusters_);
  std::vector<double> column(mean_counts_.rows());
  for (int e = 0; e < n_clusters_; ++e) {
    for (long i = 0; i < mean_counts_.rows(); ++i) column[i] = mean_counts_(i, e);
    std::vector<double> by_level(design_.psi_points);
    for (int p = 0; p < design_.psi_points; ++p)
      by_level[p] = regress_at_level(column, free_offsets, p);
    const NaturalSpline s = NaturalSpline::fit(psi_levels_, by_level);
    out(e) = s.eval(psi);
  }
  return out;
}

double SurrogateTable::log_d(const Eigen::VectorXd& offsets, double psi) const {
  check_query(offsets, psi);
  const double at_zero = n_nodes_ * log_sum_exp_offsets(offsets);
  if (psi <= 0.0) return at_zero;

  const Eigen::VectorXd free_offsets = offsets.tail(n_clusters_ - 1);
  std::vector<double> by_level(design_.psi_points);
  for (int p = 0; p < design_.psi_points; ++p)
    by_level[p] = regress_at_level(mean_matches_, free_offsets, p);
  const NaturalSpline s = NaturalSpline::fit(psi_levels_, by_level);
  // d/dpsi log d = E_psi[matches] >= 0; clamp spline undershoot
  const double integral = simpson(
      [&s](double t) { return std::max(s.eval(t), 0.0); }, 0.0, psi,
      design_.quadrature_nodes);
  return at_zero + integral;
}

double SurrogateTable::log_d_offset_path(const Eigen::VectorXd& offsets,
                                         double psi) const {
  check_query(offsets, psi);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n_clusters_);
  const double base = log_d(zero, psi);
  // straight line from zero offsets to the target at fixed psi;
  // d/dt log d = sum_e offsets_e * E[counts_e](t * offsets, psi)
  const double leg = simpson(
      [&](double tpar) {
        const Eigen::VectorXd counts = expected_counts(offsets * tpar, psi);
        double g = 0.0;
        for (int e = 0; e < n_clusters_; ++e) g += offsets(e) * counts(e);
        return g;
      },
      0.0, 1.0, design_.quadrature_nodes);
  return base + leg;
}

void SurrogateTable::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write surrogate cache: " + path);
  out << "pcm-surrogate v1\n";
  out << "graph_signature " << hex64(graph_signature_) << "\n";
  out << "n_nodes " << n_nodes_ << "\n";
  out << "n_edges " << n_edges_ << "\n";
  out << "n_clusters " << n_clusters_ << "\n";
  out << "seed " << seed_ << "\n";
  out << "design " << design_.offset_points << " " << design_.psi_points << " "
      << design_.fields_per_point << " " << design_.sweeps << " "
      << format_double(design_.offset_min) << " "
      << format_double(design_.offset_max) << " "
      << format_double(design_.psi_max) << " " << design_.quadrature_nodes
      << "\n";
  out << "points " << design_psi_.size() << "\n";
  for (std::size_t i = 0; i < design_psi_.size(); ++i) {
    out << format_double(design_psi_[i]);
    for (int d = 0; d + 1 < n_clusters_; ++d)
      out << " " << format_double(design_offsets_(static_cast<long>(i), d));
    out << " " << format_double(mean_matches_[i]);
    for (int e = 0; e < n_clusters_; ++e)
      out << " " << format_double(mean_counts_(static_cast<long>(i), e));
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

SurrogateTable SurrogateTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open surrogate cache: " + path);
  std::string line;
  auto bad = [&path]() -> std::runtime_error {
    return std::runtime_error("malformed surrogate cache: " + path);
  };
  if (!std::getline(in, line) || line != "pcm-surrogate v1") throw bad();

  SurrogateTable t;
  std::string key, hex;
  in >> key >> hex;
  if (key != "graph_signature") throw bad();
  t.graph_signature_ = std::stoull(hex, nullptr, 16);
  in >> key >> t.n_nodes_;
  if (key != "n_nodes") throw bad();
  in >> key >> t.n_edges_;
  if (key != "n_edges") throw bad();
  in >> key >> t.n_clusters_;
  if (key != "n_clusters") throw bad();
  in >> key >> t.seed_;
  if (key != "seed") throw bad();
  in >> key >> t.design_.offset_points >> t.design_.psi_points >>
      t.design_.fields_per_point >> t.design_.sweeps >> t.design_.offset_min >>
      t.design_.offset_max >> t.design_.psi_max >> t.design_.quadrature_nodes;
  if (key != "design") throw bad();
  std::size_t n_points = 0;
  in >> key >> n_points;
  if (key != "points") throw bad();

  const int free_dims = t.n_clusters_ - 1;
  t.design_psi_.resize(n_points);
  t.design_offsets_.resize(static_cast<long>(n_points), free_dims);
  t.mean_matches_.resize(n_points);
  t.mean_counts_.resize(static_cast<long>(n_points), t.n_clusters_);
  for (std::size_t i = 0; i < n_points; ++i) {
    in >> t.design_psi_[i];
    for (int d = 0; d < free_dims; ++d)
      in >> t.design_offsets_(static_cast<long>(i), d);
    in >> t.mean_matches_[i];
    for (int e = 0; e < t.n_clusters_; ++e)
      in >> t.mean_counts_(static_cast<long>(i), e);
  }
  if (!in) throw bad();

  t.offset_levels_.resize(t.design_.offset_points);
  for (int i = 0; i < t.design_.offset_points; ++i)
    t.offset_levels_[i] =
        t.design_.offset_min +
        (t.design_.offset_max - t.design_.offset_min) *
            (t.design_.offset_points == 1
                 ? 0.5
                 : static_cast<double>(i) / (t.design_.offset_points - 1));
  t.psi_levels_.resize(t.design_.psi_points);
  for (int p = 0; p < t.design_.psi_points; ++p)
    t.psi_levels_[p] =
        t.design_.psi_max * static_cast<double>(p) / (t.design_.psi_points - 1);
  return t;
}

}  // namespace pcm
