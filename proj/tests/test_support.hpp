#pragma once

// Shared test helpers: deterministic sampling and brute-force oracles that do
// not go through the library's dual-number kernels.

#include <cmath>
#include <random>
#include <vector>

#include "cgbundle/base_geometry.hpp"

namespace cgbtest {

inline std::vector<double> random_point(std::mt19937_64& rng, int n, double box) {
  std::uniform_real_distribution<double> u(-box, box);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

inline std::vector<double> random_matrix(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> t(n * n);
  for (auto& v : t) v = nd(rng);
  return t;
}

/// Plain Gaussian elimination inverse, no pivoting shortcuts.
inline std::vector<double> gauss_inverse(std::vector<double> a, int n) {
  std::vector<double> inv(n * n, 0.0);
  for (int i = 0; i < n; ++i) inv[i * n + i] = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(a[r * n + c]) > std::fabs(a[piv * n + c])) piv = r;
    for (int k = 0; k < n; ++k) {
      std::swap(a[c * n + k], a[piv * n + k]);
      std::swap(inv[c * n + k], inv[piv * n + k]);
    }
    double p = a[c * n + c];
    for (int k = 0; k < n; ++k) { a[c * n + k] /= p; inv[c * n + k] /= p; }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      double f = a[r * n + c];
      for (int k = 0; k < n; ++k) { a[r * n + k] -= f * a[c * n + k]; inv[r * n + k] -= f * inv[c * n + k]; }
    }
  }
  return inv;
}

/// Conformal constant-curvature metric in double, for finite differences.
inline std::vector<double> conformal_metric(double k, const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  double c = 1.0 + 0.25 * k * r2;
  std::vector<double> g(n * n, 0.0);
  for (int i = 0; i < n; ++i) g[i * n + i] = 1.0 / (c * c);
  return g;
}

/// Christoffel symbols by finite differences of the metric (Koszul on coordinate fields).
inline std::vector<double> fd_christoffel(double k, const std::vector<double>& x, double h = 1e-5) {
  const int n = static_cast<int>(x.size());
  std::vector<double> dg(n * n * n);
  for (int m = 0; m < n; ++m) {
    auto xp = x, xm = x;
    xp[m] += h;
    xm[m] -= h;
    auto gp = conformal_metric(k, xp), gm = conformal_metric(k, xm);
    for (int ij = 0; ij < n * n; ++ij) dg[m * n * n + ij] = (gp[ij] - gm[ij]) / (2 * h);
  }
  auto ginv = gauss_inverse(conformal_metric(k, x), n);
  std::vector<double> gam(n * n * n, 0.0);
  for (int kk = 0; kk < n; ++kk)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int m = 0; m < n; ++m)
          acc += ginv[kk * n + m] * (dg[(i * n + m) * n + j] + dg[(j * n + m) * n + i] - dg[(m * n + i) * n + j]);
        gam[(kk * n + i) * n + j] = 0.5 * acc;
      }
  return gam;
}

/// Closed-form Christoffel symbols of g = delta / (1 + k|x|^2/4)^2:
/// Gamma^c_{ij} = delta^c_i s_j + delta^c_j s_i - delta_ij s_c with s = grad log conformal factor.
inline std::vector<double> conformal_christoffel(double k, const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = -0.5 * k * x[i] / (1.0 + 0.25 * k * r2);
  std::vector<double> gam(n * n * n, 0.0);
  for (int c = 0; c < n; ++c)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        gam[(c * n + i) * n + j] = (c == i) * s[j] + (c == j) * s[i] - (i == j) * s[c];
  return gam;
}

/// Space-form curvature R_{ljr}^s = k (g_{jr} delta^s_l - g_{lr} delta^s_j).
inline std::vector<double> space_form_riemann(double k, const std::vector<double>& g, int n) {
  std::vector<double> R(n * n * n * n, 0.0);
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s)
          R[((l * n + j) * n + r) * n + s] = k * (g[j * n + r] * (s == l) - g[l * n + r] * (s == j));
  return R;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace cgbtest
