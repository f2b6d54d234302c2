#include "pcm/features.hpp"

#include <cmath>
#include <stdexcept>

namespace pcm {

PcaBasis fit_pca(const std::vector<const std::vector<double>*>& curves,
                 double variance_threshold,
                 const std::vector<double>& r_grid) {
  if (curves.size() < 2)
    throw std::runtime_error("PCA needs at least two curves");
  if (!(variance_threshold > 0.0 && variance_threshold < 1.0))
    throw std::runtime_error("variance threshold must be in (0,1)");
  const int dim = static_cast<int>(curves.front()->size());
  const int n = static_cast<int>(curves.size());

  Eigen::MatrixXd data(n, dim);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(curves[i]->size()) != dim)
      throw std::runtime_error("curve length mismatch");
    for (int j = 0; j < dim; ++j) data(i, j) = (*curves[i])[j];
  }
  const Eigen::RowVectorXd mean = data.colwise().mean();
  data.rowwise() -= mean;
  const Eigen::MatrixXd cov = data.transpose() * data / (n - 1.0);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  // ascending from Eigen; flip to nonincreasing
  const Eigen::VectorXd evals_asc = solver.eigenvalues();
  const Eigen::MatrixXd evecs_asc = solver.eigenvectors();

  const double total = std::max(evals_asc.sum(), 0.0);
  if (total <= 1e-12)
    throw std::runtime_error("degenerate covariance: all curves identical");

  PcaBasis basis;
  basis.mean_curve = mean.transpose();
  basis.total_variance = total;
  basis.r_grid = r_grid;

  double cum = 0.0;
  int k = 0;
  std::vector<int> order;
  for (int j = dim - 1; j >= 0; --j) order.push_back(j);
  while (k < dim) {
    cum += std::max(evals_asc(order[k]), 0.0);
    ++k;
    if (cum / total >= variance_threshold) break;
  }
  basis.eigenvalues.resize(k);
  basis.eigenvectors.resize(dim, k);
  for (int j = 0; j < k; ++j) {
    basis.eigenvalues(j) = std::max(evals_asc(order[j]), 0.0);
    Eigen::VectorXd v = evecs_asc.col(order[j]);
    int arg_max = 0;
    v.cwiseAbs().maxCoeff(&arg_max);
    if (v(arg_max) < 0.0) v = -v;
    basis.eigenvectors.col(j) = v;
  }
  return basis;
}

Eigen::VectorXd project_scores(const std::vector<double>& curve,
                               const PcaBasis& basis) {
  if (static_cast<int>(curve.size()) != basis.curve_length())
    throw std::runtime_error("curve length mismatch");
  Eigen::VectorXd centered(basis.curve_length());
  for (int j = 0; j < basis.curve_length(); ++j)
    centered(j) = curve[j] - basis.mean_curve(j);
  return basis.eigenvectors.transpose() * centered;
}

FeatureMatrix assemble_features(const std::vector<GridSummary>& summaries,
                                const PcaBasis& basis) {
  if (summaries.empty()) throw std::runtime_error("no grid summaries");
  const int n_subjects = static_cast<int>(summaries.size());
  const int n_regions = static_cast<int>(summaries.front().regions.size());
  int n_types = 0;
  for (const auto& s : summaries)
    for (const auto& reg : s.regions)
      if (reg.retained) n_types = static_cast<int>(reg.intensity.size());
  if (n_types == 0) throw std::runtime_error("no retained regions");

  FeatureMatrix f;
  f.n_subjects = n_subjects;
  f.n_regions = n_regions;
  f.n_scores = basis.n_components();
  f.n_types = n_types;
  const int q_dims = f.n_dims();
  const int n_rows = n_subjects * n_regions;
  f.values = Eigen::MatrixXd::Zero(n_rows, q_dims);
  f.mask.assign(static_cast<std::size_t>(n_rows) * q_dims, 0);

  for (int n = 0; n < n_subjects; ++n) {
    const GridSummary& s = summaries[n];
    if (static_cast<int>(s.regions.size()) != n_regions)
      throw std::runtime_error("inconsistent region counts across subjects");
    for (int l = 0; l < n_regions; ++l) {
      const RegionSummary& reg = s.regions[l];
      const int row = f.flat(n, l);
      if (!reg.curve.empty()) {
        const Eigen::VectorXd scores = project_scores(reg.curve, basis);
        for (int k = 0; k < f.n_scores; ++k) {
          f.values(row, k) = scores(k);
          f.mask[static_cast<std::size_t>(row) * q_dims + k] = 1;
        }
      }
      if (reg.retained) {
        for (int h = 0; h < n_types; ++h) {
          f.values(row, f.n_scores + h) = reg.intensity[h];
          f.mask[static_cast<std::size_t>(row) * q_dims + f.n_scores + h] = 1;
        }
      }
    }
  }

  f.centers.resize(q_dims);
  f.scales.resize(q_dims);
  for (int q = 0; q < q_dims; ++q) {
    double sum = 0.0;
    long count = 0;
    for (int row = 0; row < n_rows; ++row) {
      if (!f.mask[static_cast<std::size_t>(row) * q_dims + q]) continue;
      sum += f.values(row, q);
      ++count;
    }
    if (count < 2)
      throw std::runtime_error("feature column " + std::to_string(q + 1) +
                               " has fewer than two available entries");
    const double center = sum / count;
    double ss = 0.0;
    for (int row = 0; row < n_rows; ++row) {
      if (!f.mask[static_cast<std::size_t>(row) * q_dims + q]) continue;
      const double d = f.values(row, q) - center;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / (count - 1));
    if (!(sd > 0.0))
      throw std::runtime_error("feature column " + std::to_string(q + 1) +
                               " has zero variance over available entries");
    f.centers(q) = center;
    f.scales(q) = sd;
    for (int row = 0; row < n_rows; ++row) {
      if (f.mask[static_cast<std::size_t>(row) * q_dims + q])
        f.values(row, q) = (f.values(row, q) - center) / sd;
      else
        f.values(row, q) = 0.0;
    }
  }
  return f;
}

ClusterReconstruction invert_features(const Eigen::VectorXd& cluster_means,
                                      const PcaBasis& basis,
                                      const Eigen::VectorXd& centers,
                                      const Eigen::VectorXd& scales) {
  const int k = basis.n_components();
  const int q_dims = static_cast<int>(cluster_means.size());
  if (centers.size() != q_dims || scales.size() != q_dims)
    throw std::runtime_error("centers/scales length mismatch");
  const int n_types = q_dims - k;
  if (n_types < 0) throw std::runtime_error("cluster mean vector too short");

  Eigen::VectorXd raw(q_dims);
  for (int q = 0; q < q_dims; ++q)
    raw(q) = centers(q) + scales(q) * cluster_means(q);

  ClusterReconstruction rec;
  rec.curve_sqrt = basis.mean_curve;
  for (int j = 0; j < k; ++j) rec.curve_sqrt += basis.eigenvectors.col(j) * raw(j);
  rec.pcf.resize(basis.curve_length());
  for (int i = 0; i < basis.curve_length(); ++i) {
    const double clamped = std::max(rec.curve_sqrt(i), 0.0);
    rec.pcf(i) = clamped * clamped;
  }
  rec.intensity.resize(n_types);
  for (int h = 0; h < n_types; ++h)
    rec.intensity(h) = std::max(raw(k + h), 0.0);
  return rec;
}

}  // namespace pcm
