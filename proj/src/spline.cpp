#include "pcm/spline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

// Reinsch formulation (Green & Silverman 1994, ch. 2): with Q the second
// difference matrix and R the tridiagonal Gram matrix of the natural spline
// basis, the fit solves (R + lambda Q'Q) gamma = Q'y, g = y - lambda Q gamma,
// and Int g''^2 = gamma' R gamma. All matrices are banded; the GCV trace
// uses the in-band inverse of the pentadiagonal system (Hutchinson & de Hoog
// 1985).

namespace pcm {

namespace {

struct Bands {
  // symmetric pentadiagonal, m rows: d0 main, d1 first, d2 second diagonal
  std::vector<double> d0, d1, d2;
};

struct Workspace {
  std::size_t n = 0;
  std::vector<double> h, inv_h;
  Bands r;   // R (tridiagonal; r.d2 unused)
  Bands c;   // Q'Q
  std::vector<double> qty;  // Q'y
};

Workspace prepare(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw std::invalid_argument("spline: size mismatch");
  if (n < 3) throw std::invalid_argument("spline: need at least 3 points");
  Workspace w;
  w.n = n;
  w.h.resize(n - 1);
  w.inv_h.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    w.h[i] = x[i + 1] - x[i];
    if (!(w.h[i] > 0.0))
      throw std::invalid_argument("spline: x must be strictly increasing");
    w.inv_h[i] = 1.0 / w.h[i];
  }
  const std::size_t m = n - 2;
  w.r.d0.assign(m, 0.0);
  w.r.d1.assign(m, 0.0);
  w.c.d0.assign(m, 0.0);
  w.c.d1.assign(m, 0.0);
  w.c.d2.assign(m, 0.0);
  w.qty.assign(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const double a = w.inv_h[j];
    const double b = -w.inv_h[j] - w.inv_h[j + 1];
    const double c = w.inv_h[j + 1];
    w.r.d0[j] = (w.h[j] + w.h[j + 1]) / 3.0;
    if (j + 1 < m) w.r.d1[j] = w.h[j + 1] / 6.0;
    w.c.d0[j] = a * a + b * b + c * c;
    if (j + 1 < m) {
      const double b_next = -w.inv_h[j + 1] - w.inv_h[j + 2];
      w.c.d1[j] = b * c + c * b_next;
    }
    if (j + 2 < m) w.c.d2[j] = c * w.inv_h[j + 2];
    w.qty[j] = y[j] * a + y[j + 1] * b + y[j + 2] * c;
  }
  return w;
}

// LDL' factorization of a symmetric pentadiagonal SPD matrix.
struct BandLdl {
  std::vector<double> d;   // D
  std::vector<double> l1;  // L sub-diagonal 1 (l1[i] = L[i+1][i])
  std::vector<double> l2;  // L sub-diagonal 2 (l2[i] = L[i+2][i])
};

BandLdl factor(const Bands& b) {
  const std::size_t m = b.d0.size();
  BandLdl f;
  f.d.assign(m, 0.0);
  f.l1.assign(m, 0.0);
  f.l2.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double di = b.d0[i];
    if (i >= 1) di -= f.l1[i - 1] * f.l1[i - 1] * f.d[i - 1];
    if (i >= 2) di -= f.l2[i - 2] * f.l2[i - 2] * f.d[i - 2];
    if (!(di > 0.0))
      throw std::runtime_error("spline: banded factorization failed");
    f.d[i] = di;
    if (i + 1 < m) {
      double s = b.d1[i];
      if (i >= 1) s -= f.l1[i - 1] * f.d[i - 1] * f.l2[i - 1];
      f.l1[i] = s / di;
    }
    if (i + 2 < m) f.l2[i] = b.d2[i] / di;
  }
  return f;
}

void solve_inplace(const BandLdl& f, std::vector<double>& v) {
  const std::size_t m = f.d.size();
  for (std::size_t i = 0; i < m; ++i) {
    if (i >= 1) v[i] -= f.l1[i - 1] * v[i - 1];
    if (i >= 2) v[i] -= f.l2[i - 2] * v[i - 2];
  }
  for (std::size_t i = 0; i < m; ++i) v[i] /= f.d[i];
  for (std::size_t k = m; k-- > 0;) {
    if (k + 1 < m) v[k] -= f.l1[k] * v[k + 1];
    if (k + 2 < m) v[k] -= f.l2[k] * v[k + 2];
  }
}

// In-band entries of the inverse (Z = B^{-1}) from the LDL' factors.
void band_inverse(const BandLdl& f, std::vector<double>& z0,
                  std::vector<double>& z1, std::vector<double>& z2) {
  const std::size_t m = f.d.size();
  z0.assign(m, 0.0);
  z1.assign(m, 0.0);
  z2.assign(m, 0.0);
  for (std::size_t k = m; k-- > 0;) {
    // Z[k][k+2]
    if (k + 2 < m) {
      double s = -f.l1[k] * z1[k + 1] - f.l2[k] * z0[k + 2];
      z2[k] = s;
    }
    // Z[k][k+1]
    if (k + 1 < m) {
      double s = -f.l1[k] * z0[k + 1];
      if (k + 2 < m) s -= f.l2[k] * z1[k + 1];
      z1[k] = s;
    }
    // Z[k][k]
    double s = 1.0 / f.d[k];
    if (k + 1 < m) s -= f.l1[k] * z1[k];
    if (k + 2 < m) s -= f.l2[k] * z2[k];
    z0[k] = s;
  }
}

struct EvalResult {
  double gcv = 0.0;
  SplineFit fit;
};

EvalResult evaluate(const Workspace& w, const std::vector<double>& y,
                    double lambda, bool want_fit) {
  const std::size_t n = w.n;
  const std::size_t m = n - 2;
  Bands b;
  b.d0.resize(m);
  b.d1.resize(m);
  b.d2.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    b.d0[i] = w.r.d0[i] + lambda * w.c.d0[i];
    b.d1[i] = (i + 1 < m) ? w.r.d1[i] + lambda * w.c.d1[i] : 0.0;
    b.d2[i] = (i + 2 < m) ? lambda * w.c.d2[i] : 0.0;
  }
  const BandLdl f = factor(b);
  std::vector<double> gamma = w.qty;
  solve_inplace(f, gamma);

  EvalResult out;
  SplineFit& fit = out.fit;
  fit.lambda = lambda;
  fit.fitted.resize(n);
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double qg = 0.0;
    if (i < m) qg += gamma[i] * w.inv_h[i];
    if (i >= 1 && i <= m) qg -= gamma[i - 1] * (w.inv_h[i - 1] + w.inv_h[i]);
    if (i >= 2) qg += gamma[i - 2] * w.inv_h[i - 1];
    const double res = lambda * qg;
    fit.fitted[i] = y[i] - res;
    rss += res * res;
  }
  fit.rss = rss;
  double rough = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    rough += w.r.d0[i] * gamma[i] * gamma[i];
    if (i + 1 < m) rough += 2.0 * w.r.d1[i] * gamma[i] * gamma[i + 1];
  }
  fit.roughness = rough;

  std::vector<double> z0, z1, z2;
  band_inverse(f, z0, z1, z2);
  double tr = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    tr += z0[i] * w.c.d0[i];
    if (i + 1 < m) tr += 2.0 * z1[i] * w.c.d1[i];
    if (i + 2 < m) tr += 2.0 * z2[i] * w.c.d2[i];
  }
  fit.edf = static_cast<double>(n) - lambda * tr;
  const double dof_gap = std::max(static_cast<double>(n) - fit.edf, 1e-10);
  out.gcv = static_cast<double>(n) * rss / (dof_gap * dof_gap);
  if (!want_fit) fit.fitted.clear();
  return out;
}

}  // namespace

SplineFit smoothing_spline(const std::vector<double>& x,
                           const std::vector<double>& y, double lambda) {
  const Workspace w = prepare(x, y);
  return evaluate(w, y, lambda, true).fit;
}

SplineFit smoothing_spline_gcv(const std::vector<double>& x,
                               const std::vector<double>& y) {
  const Workspace w = prepare(x, y);
  const std::size_t n = w.n;
  double mean_h = 0.0;
  for (double h : w.h) mean_h += h;
  mean_h /= static_cast<double>(w.h.size());
  const double range = x.back() - x.front();

  // The smoother transitions from interpolation to the linear fit roughly
  // over lambda in [range^3/n^3, range^3*n]; pad by two decades each side.
  const double lo = std::log10(range * range * range /
                               (static_cast<double>(n) * n * n)) - 2.0;
  const double hi =
      std::log10(range * range * range * static_cast<double>(n)) + 2.0;
  const int steps = static_cast<int>((hi - lo) * 2.0) + 1;

  double best_log = lo;
  double best_gcv = std::numeric_limits<double>::infinity();
  for (int k = 0; k < steps; ++k) {
    const double lg = lo + (hi - lo) * k / (steps - 1);
    const double g = evaluate(w, y, std::pow(10.0, lg), false).gcv;
    if (g < best_gcv) {
      best_gcv = g;
      best_log = lg;
    }
  }

  // golden-section refinement on log10(lambda)
  const double step = (hi - lo) / (steps - 1);
  double a = best_log - step, b = best_log + step;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  double f1 = evaluate(w, y, std::pow(10.0, c1), false).gcv;
  double f2 = evaluate(w, y, std::pow(10.0, c2), false).gcv;
  for (int it = 0; it < 40 && (b - a) > 1e-4; ++it) {
    if (f1 < f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - gr * (b - a);
      f1 = evaluate(w, y, std::pow(10.0, c1), false).gcv;
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + gr * (b - a);
      f2 = evaluate(w, y, std::pow(10.0, c2), false).gcv;
    }
  }
  const double log_opt = f1 < f2 ? c1 : c2;
  return evaluate(w, y, std::pow(10.0, log_opt), true).fit;
}

double interpolant_roughness(const std::vector<double>& x,
                             const std::vector<double>& y) {
  const Workspace w = prepare(x, y);
  const std::size_t m = w.n - 2;
  // R gamma = Q'y (tridiagonal LDL')
  std::vector<double> d(m), l1(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double di = w.r.d0[i];
    if (i >= 1) di -= l1[i - 1] * l1[i - 1] * d[i - 1];
    d[i] = di;
    if (i + 1 < m) l1[i] = w.r.d1[i] / di;
  }
  std::vector<double> g = w.qty;
  for (std::size_t i = 1; i < m; ++i) g[i] -= l1[i - 1] * g[i - 1];
  for (std::size_t i = 0; i < m; ++i) g[i] /= d[i];
  for (std::size_t k = m - 1; k-- > 0;) g[k] -= l1[k] * g[k + 1];
  double rough = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    rough += w.r.d0[i] * g[i] * g[i];
    if (i + 1 < m) rough += 2.0 * w.r.d1[i] * g[i] * g[i + 1];
  }
  return rough;
}

}  // namespace pcm
