#pragma once

// Base-manifold charts: metric jets to third order, Christoffel symbols,
// Riemann curvature and its covariant derivative.
//
// Index conventions (row-major flattening, n = chart dimension):
//   g[i][j]                  -> g[i*n + j]
//   d^m g[i][j]              -> dg[(m*n + i)*n + j]
//   Gamma^k_{ij}             -> gamma[(k*n + i)*n + j]
//   R_{ljr}^s                -> riemann[((l*n + j)*n + r)*n + s]
// with R(e_l, e_j) e_r = R_{ljr}^s e_s and
// R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z.

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cgbundle/dual.hpp"

namespace cgb {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ChartError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Metric coefficients and their partial derivatives up to order three.
struct MetricJet {
  int n = 0;
  std::vector<double> g;    // n^2
  std::vector<double> dg;   // n^3   [m][i][j]
  std::vector<double> d2g;  // n^4   [m][p][i][j]
  std::vector<double> d3g;  // n^5   [m][p][q][i][j]
};

/// Cubic Taylor model of the metric around a point. Evaluating it at an
/// offset carrying dual parts reproduces every derivative of g up to third
/// order exactly at the expansion point.
class MetricModel {
 public:
  MetricModel() = default;
  explicit MetricModel(MetricJet jet) : jet_(std::move(jet)) {}

  int dim() const { return jet_.n; }
  const MetricJet& jet() const { return jet_; }

  template <typename S>
  std::vector<S> metric(std::span<const S> dx) const {
    const int n = jet_.n;
    std::vector<S> out(n * n);
    for (int ij = 0; ij < n * n; ++ij) {
      S acc = S(jet_.g[ij]);
      for (int m = 0; m < n; ++m) {
        S inner = S(jet_.dg[m * n * n + ij]);
        for (int p = 0; p < n; ++p) {
          S inner2 = S(0.5 * jet_.d2g[(m * n + p) * n * n + ij]);
          for (int q = 0; q < n; ++q)
            inner2 += (1.0 / 6.0) * jet_.d3g[((m * n + p) * n + q) * n * n + ij] * dx[q];
          inner += inner2 * dx[p];
        }
        acc += inner * dx[m];
      }
      out[ij] = acc;
    }
    return out;
  }

  /// d_m g_ij at the offset, [m][i][j].
  template <typename S>
  std::vector<S> metric_grad(std::span<const S> dx) const {
    const int n = jet_.n;
    std::vector<S> out(n * n * n);
    for (int m = 0; m < n; ++m) {
      for (int ij = 0; ij < n * n; ++ij) {
        S acc = S(jet_.dg[m * n * n + ij]);
        for (int p = 0; p < n; ++p) {
          S inner = S(jet_.d2g[(m * n + p) * n * n + ij]);
          for (int q = 0; q < n; ++q)
            inner += 0.5 * jet_.d3g[((m * n + p) * n + q) * n * n + ij] * dx[q];
          acc += inner * dx[p];
        }
        out[m * n * n + ij] = acc;
      }
    }
    return out;
  }

 private:
  MetricJet jet_;
};

/// Dense inverse by Gauss-Jordan with partial pivoting on the real part.
template <typename S>
std::vector<S> invert(std::vector<S> a, int n) {
  std::vector<S> inv(n * n, S(0.0));
  for (int i = 0; i < n; ++i) inv[i * n + i] = S(1.0);
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(value_of(a[r * n + c])) > std::abs(value_of(a[piv * n + c]))) piv = r;
    if (value_of(a[piv * n + c]) == 0.0) throw ChartError("singular matrix in invert");
    if (piv != c) {
      for (int k = 0; k < n; ++k) {
        std::swap(a[c * n + k], a[piv * n + k]);
        std::swap(inv[c * n + k], inv[piv * n + k]);
      }
    }
    S p = S(1.0) / a[c * n + c];
    for (int k = 0; k < n; ++k) {
      a[c * n + k] = a[c * n + k] * p;
      inv[c * n + k] = inv[c * n + k] * p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      S f = a[r * n + c];
      if (value_of(f) == 0.0 && !is_dual<S>::value) continue;
      for (int k = 0; k < n; ++k) {
        a[r * n + k] -= f * a[c * n + k];
        inv[r * n + k] -= f * inv[c * n + k];
      }
    }
  }
  return inv;
}

/// Pointwise base geometry in an arbitrary scalar type.
template <typename S>
struct BaseAt {
  int n = 0;
  std::vector<S> g, ginv, gamma, riemann;
};

template <typename S>
std::vector<S> christoffel_from(const std::vector<S>& ginv, const std::vector<S>& dg, int n) {
  std::vector<S> gamma(n * n * n, S(0.0));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        S acc = S(0.0);
        for (int m = 0; m < n; ++m)
          acc += ginv[k * n + m] *
                 (dg[(i * n + m) * n + j] + dg[(j * n + m) * n + i] - dg[(m * n + i) * n + j]);
        gamma[(k * n + i) * n + j] = 0.5 * acc;
      }
  return gamma;
}

template <typename S>
std::vector<S> christoffel_model(const MetricModel& model, std::span<const S> dx) {
  const int n = model.dim();
  auto g = model.metric<S>(dx);
  auto ginv = invert(g, n);
  auto dg = model.metric_grad<S>(dx);
  return christoffel_from(ginv, dg, n);
}

/// Evaluate g, g^{-1}, Gamma and optionally R at base offset dx.
template <typename S>
BaseAt<S> base_at(const MetricModel& model, std::span<const S> dx, bool with_curvature) {
  const int n = model.dim();
  BaseAt<S> out;
  out.n = n;
  out.g = model.metric<S>(dx);
  out.ginv = invert(out.g, n);
  out.gamma = christoffel_from(out.ginv, model.metric_grad<S>(dx), n);
  if (!with_curvature) return out;

  using D = Dual<S>;
  std::vector<S> dgamma(n * n * n * n);  // [m][k][i][j]
  for (int m = 0; m < n; ++m) {
    std::vector<D> x(n);
    for (int c = 0; c < n; ++c) x[c] = D(dx[c], S(c == m ? 1.0 : 0.0));
    auto gd = christoffel_model<D>(model, std::span<const D>(x));
    for (int q = 0; q < n * n * n; ++q) dgamma[m * n * n * n + q] = gd[q].d;
  }
  const auto& G = out.gamma;
  auto gam = [&](int k, int i, int j) -> const S& { return G[(k * n + i) * n + j]; };
  auto dgam = [&](int m, int k, int i, int j) -> const S& {
    return dgamma[((m * n + k) * n + i) * n + j];
  };
  out.riemann.assign(n * n * n * n, S(0.0));
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          S acc = dgam(l, s, j, r) - dgam(j, s, l, r);
          for (int m = 0; m < n; ++m) acc += gam(m, j, r) * gam(s, l, m) - gam(m, l, r) * gam(s, j, m);
          out.riemann[((l * n + j) * n + r) * n + s] = acc;
        }
  return out;
}

struct MetricAt {
  Eigen::MatrixXd g;
  Eigen::MatrixXd g_inv;
  MetricJet jets;
};

struct ChristoffelField {
  int n = 0;
  std::vector<double> values;  // [k][i][j]
  std::vector<double> d1;      // [m][k][i][j]
  std::vector<double> d2;      // [p][m][k][i][j]

  double operator()(int k, int i, int j) const { return values[(k * n + i) * n + j]; }
};

struct CurvatureField {
  int n = 0;
  std::vector<double> values;  // [l][j][r][s]
  std::vector<double> nabla;   // [m][l][j][r][s]

  double operator()(int l, int j, int r, int s) const {
    return values[((l * n + j) * n + r) * n + s];
  }
  double cov(int m, int l, int j, int r, int s) const {
    return nabla[(((m * n + l) * n + j) * n + r) * n + s];
  }
};

/// A coordinate patch carrying a metric evaluable with derivatives to order 3.
class Chart {
 public:
  using JetFn = std::function<MetricJet(std::span<const double>)>;
  using DomainFn = std::function<bool(std::span<const double>)>;

  Chart(std::string name, int dim, JetFn jets, DomainFn domain, bool exact_jets)
      : name_(std::move(name)), dim_(dim), jets_(std::move(jets)), domain_(std::move(domain)),
        exact_(exact_jets) {}

  /// Closed-form metric given as a generic callable `f(std::span<const S> x, std::span<S> g)`
  /// instantiable for nested dual scalars; jets are exact.
  template <typename F>
  static Chart from_closed_form(std::string name, int dim, F f, DomainFn domain);

  /// Metric known only through double evaluations; jets by central differences.
  static Chart from_samples(std::string name, int dim,
                            std::function<void(std::span<const double>, std::span<double>)> f,
                            DomainFn domain, double step = 1e-3);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  bool exact_jets() const { return exact_; }
  bool contains(std::span<const double> x) const { return domain_(x); }

  MetricJet jets(std::span<const double> x) const;
  MetricModel model(std::span<const double> x) const { return MetricModel(jets(x)); }

 private:
  std::string name_;
  int dim_;
  JetFn jets_;
  DomainFn domain_;
  bool exact_;
};

template <typename F>
Chart Chart::from_closed_form(std::string name, int dim, F f, DomainFn domain) {
  auto jets = [f, dim](std::span<const double> x) {
    using J1 = Dual<double>;
    using J2 = Dual<J1>;
    using J3 = Dual<J2>;
    const int n = dim;
    MetricJet jet;
    jet.n = n;
    jet.g.assign(n * n, 0.0);
    jet.dg.assign(n * n * n, 0.0);
    jet.d2g.assign(n * n * n * n, 0.0);
    jet.d3g.assign(n * n * n * n * n, 0.0);
    std::vector<J3> xs(n), gs(n * n);
    for (int m = 0; m < n; ++m)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          for (int c = 0; c < n; ++c) {
            J1 a(x[c], q == c ? 1.0 : 0.0);
            J2 b(a, J1(p == c ? 1.0 : 0.0));
            xs[c] = J3(b, J2(m == c ? 1.0 : 0.0));
          }
          f(std::span<const J3>(xs), std::span<J3>(gs));
          for (int ij = 0; ij < n * n; ++ij) {
            const J3& v = gs[ij];
            if (m == 0 && p == 0 && q == 0) jet.g[ij] = v.v.v.v;
            if (p == 0 && q == 0) jet.dg[m * n * n + ij] = v.d.v.v;
            if (q == 0) jet.d2g[(m * n + p) * n * n + ij] = v.d.d.v;
            jet.d3g[((m * n + p) * n + q) * n * n + ij] = v.d.d.d;
          }
        }
    return jet;
  };
  return Chart(std::move(name), dim, jets, std::move(domain), true);
}

/// Flat chart, g = identity.
Chart euclidean_chart(int n);

/// Conformally flat chart g = delta / (1 + k|x|^2/4)^2 of constant sectional
/// curvature k, normalized so g(0) = identity. k = 0 gives the flat chart.
Chart constant_curvature_chart(double k, int n);

MetricAt metric_at(const Chart& chart, std::span<const double> x);
ChristoffelField christoffel_at(const Chart& chart, std::span<const double> x);
CurvatureField curvature_at(const Chart& chart, std::span<const double> x);

/// Curvature from a model (no domain checks); shared by the bundle modules.
CurvatureField curvature_from_model(const MetricModel& model);

/// Max |d_k g_ij - Gamma^m_{ki} g_mj - Gamma^m_{kj} g_im|.
double metric_compatibility_residual(const MetricAt& m, const ChristoffelField& gamma);

/// Max |cyclic sum over (l, j, r) of R_{ljr}^s|.
double bianchi_residual(const CurvatureField& R);

/// Max |R_{ljr}^s + R_{jlr}^s|.
double antisymmetry_residual(const CurvatureField& R);

}  // namespace cgb
