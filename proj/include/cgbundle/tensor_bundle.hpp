#pragma once

// The (1,1)-tensor bundle T11M over a chart: lifts, the adapted frame, the
// Cheeger-Gromoll-type metric and its Levi-Civita connection.

#include <Eigen/Dense>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cgbundle/base_geometry.hpp"
#include "cgbundle/detail/bundle_kernels.hpp"

namespace cgb {

class ParamError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// p(x)/q(x) with ascending coefficient lists.
struct Rational {
  std::vector<double> num{0.0};
  std::vector<double> den{1.0};

  static Rational constant(double c) { return {{c}, {1.0}}; }

  template <typename S>
  static S poly(const std::vector<double>& c, const S& x) {
    S acc = S(0.0);
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
  }
  template <typename S>
  static S poly_deriv(const std::vector<double>& c, const S& x) {
    S acc = S(0.0);
    for (size_t k = c.size(); k-- > 1;) acc = acc * x + double(k) * c[k];
    return acc;
  }
  template <typename S>
  S operator()(const S& x) const {
    return poly(num, x) / poly(den, x);
  }
  template <typename S>
  S derivative(const S& x) const {
    S q = poly(den, x);
    return (poly_deriv(num, x) * q - poly(num, x) * poly_deriv(den, x)) / (q * q);
  }
};

template <typename S>
struct ParamValues {
  S a, da, b, db;
  S L, M, N;
};

/// Which value of M to use. The printed coefficient (2b - a')/(a + b tau) is kept
/// only for errata diagnostics; the Levi-Civita connection needs (b - a')/(a + b tau).
enum class MCoefficient { levi_civita, printed };

struct CGParams {
  std::string name = "custom";
  Rational a = Rational::constant(1.0);
  Rational b = Rational::constant(0.0);

  static CGParams sasaki() { return {"sasaki", Rational::constant(1.0), Rational::constant(0.0)}; }
  static CGParams classic() { return {"classic", {{1.0}, {1.0, 1.0}}, {{1.0}, {1.0, 1.0}}}; }
  static CGParams a1b1() { return {"a1b1", Rational::constant(1.0), Rational::constant(1.0)}; }
  /// Constant a, b.
  static CGParams constants(double a, double b) {
    return {"constant", Rational::constant(a), Rational::constant(b)};
  }
  /// Looks up "sasaki", "classic" or "a1b1"; throws ParamError otherwise.
  static CGParams preset(const std::string& name);

  /// Throws ParamError unless a > 0 and a + b tau > 0.
  void check(double tau) const;

  template <typename S>
  ParamValues<S> at(const S& tau, MCoefficient m = MCoefficient::levi_civita) const {
    ParamValues<S> p;
    p.a = a(tau);
    p.da = a.derivative(tau);
    p.b = b(tau);
    p.db = b.derivative(tau);
    S w = p.a + p.b * tau;
    p.L = p.da / p.a;
    p.M = m == MCoefficient::levi_civita ? (p.b - p.da) / w : (2.0 * p.b - p.da) / w;
    p.N = (p.db * p.a - 2.0 * p.da * p.b) / (p.a * w);
    return p;
  }
};

struct BundlePoint {
  std::vector<double> x;  // base coordinates
  std::vector<double> t;  // t^i_j at i*n + j

  int dim() const { return static_cast<int>(x.size()); }
  /// Throws ChartError if t is not n x n.
  void validate() const;
};

struct AdaptedVector {
  std::vector<double> h;  // coefficients of e_j
  std::vector<double> v;  // coefficient of e_(i,j) at i*n + j

  static AdaptedVector zero(int n) { return {std::vector<double>(n, 0.0), std::vector<double>(n * n, 0.0)}; }
  static AdaptedVector from_flat(std::span<const double> w, int n);
  std::vector<double> flat() const;
};

/// Value and first partials of a base vector field; jacobian[m*n + i] = d_m X^i.
struct BaseVectorField {
  std::vector<double> value;
  std::vector<double> jacobian;
};

/// Value and first partials of a (1,1) field; value[i*n + j] = A^i_j,
/// jacobian[m*n*n + i*n + j] = d_m A^i_j.
struct BaseTensorField {
  std::vector<double> value;
  std::vector<double> jacobian;
};

struct LiftedField {
  enum class Kind { vertical, horizontal };
  Kind kind;
  std::vector<double> value;
  std::vector<double> jacobian;

  static LiftedField vertical(const BaseTensorField& A) { return {Kind::vertical, A.value, A.jacobian}; }
  static LiftedField horizontal(const BaseVectorField& X) { return {Kind::horizontal, X.value, X.jacobian}; }
};

/// Christoffel data in the adapted frame: entry (alpha, beta, delta) is the
/// delta-component of nabla_{E_alpha} E_beta, with E_0..E_{n-1} = e_j and
/// E_{n + i*n + j} = e_(i,j).
struct ConnectionCoefficients {
  enum class Block { HH_H, HH_V, HV_H, HV_V, VH_H, VH_V, VV_H, VV_V };

  int n = 0;
  std::vector<double> data;

  int frame_dim() const { return n + n * n; }
  double operator()(int alpha, int beta, int delta) const {
    const int D = frame_dim();
    return data[(alpha * D + beta) * D + delta];
  }
  AdaptedVector apply(int alpha, int beta) const;
  /// Largest |difference| over one block.
  double block_max_diff(const ConnectionCoefficients& other, Block block) const;
  double max_diff(const ConnectionCoefficients& other) const;
};

const char* block_name(ConnectionCoefficients::Block b);

struct ConnectionResiduals {
  double torsion = 0.0;
  double compatibility = 0.0;
};

double tau(const Chart& chart, const BundlePoint& p);
Eigen::MatrixXd tbar(const Chart& chart, const BundlePoint& p);
double iota(const Chart& chart, std::span<const double> alpha, const BundlePoint& p);

AdaptedVector vertical_lift(const Chart& chart, std::span<const double> A, const BundlePoint& p);
AdaptedVector horizontal_lift(const Chart& chart, std::span<const double> X, const BundlePoint& p);
/// Coordinate components (x^i, t^A) of the complete lift.
std::vector<double> complete_lift(const Chart& chart, const BaseVectorField& V, const BundlePoint& p);

std::vector<double> to_coordinates(const Chart& chart, const AdaptedVector& v, const BundlePoint& p);
AdaptedVector from_coordinates(const Chart& chart, std::span<const double> coords, const BundlePoint& p);

struct MetricBlocks {
  Eigen::MatrixXd G;
  Eigen::MatrixXd G_inv;
};
/// The metric in the adapted frame together with its closed-form inverse.
MetricBlocks cg_metric_matrices(const Chart& chart, const CGParams& params, const BundlePoint& p);
double cg_inner(const Chart& chart, const CGParams& params, const BundlePoint& p, const AdaptedVector& u,
                const AdaptedVector& w);

AdaptedVector bracket(const Chart& chart, const LiftedField& lhs, const LiftedField& rhs, const BundlePoint& p);

ConnectionCoefficients cg_connection_closed(const Chart& chart, const CGParams& params, const BundlePoint& p,
                                            MCoefficient m = MCoefficient::levi_civita);
ConnectionCoefficients cg_connection_koszul(const Chart& chart, const CGParams& params, const BundlePoint& p);
/// Torsion and metric-compatibility defects of arbitrary coefficients, measured
/// with exact frame brackets and frame derivatives of the metric.
ConnectionResiduals connection_residuals(const Chart& chart, const CGParams& params, const BundlePoint& p,
                                         const ConnectionCoefficients& c);

namespace detail {

/// Adapted-frame data of T11M for the Koszul oracle.
struct BundleFrameModel {
  CGParams params;

  template <typename S>
  std::vector<S> coords(const FiberAt<S>& f) const {
    const int n = f.n;
    const int D = n + n * n;
    std::vector<S> X(D * D, S(0.0));
    for (int s = 0; s < n; ++s) {
      X[s * D + s] = S(1.0);
      auto shift = horizontal_shift(f, s);
      for (int A = 0; A < n * n; ++A) X[s * D + n + A] = shift[A];
    }
    for (int A = 0; A < n * n; ++A) X[(n + A) * D + n + A] = S(1.0);
    return X;
  }
  template <typename S>
  std::vector<S> ambient(const FiberAt<S>& f) const {
    const int D = f.n + f.n * f.n;
    std::vector<S> X(D * D, S(0.0));
    for (int a = 0; a < D; ++a) X[a * D + a] = S(1.0);
    return X;
  }
  template <typename S>
  std::vector<S> metric(const FiberAt<S>& f) const {
    auto pv = params.at(f.tau);
    return cg_metric_flat(f, pv.a, pv.b);
  }
};

template <typename S>
std::vector<S> cg_metric_flat(const FiberAt<S>& f, const S& a, const S& b) {
  const int n = f.n;
  const int nn = n * n;
  const int D = n + nn;
  std::vector<S> G(D * D, S(0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G[i * D + j] = f.base.g[i * n + j];
  for (int A = 0; A < nn; ++A)
    for (int B = 0; B < nn; ++B)
      G[(n + A) * D + n + B] = a * f.fiber_metric(A, B) + b * f.normal(A) * f.normal(B);
  return G;
}

/// Closed-form Levi-Civita connection of the CG metric; f must carry curvature.
template <typename S>
std::vector<S> bundle_connection_closed(const FiberAt<S>& f, const ParamValues<S>& pv) {
  const int n = f.n;
  const int nn = n * n;
  const int D = n + nn;
  const auto& Gam = f.base.gamma;
  std::vector<S> out(D * D * D, S(0.0));
  auto at = [&](int a, int b, int d) -> S& { return out[(a * D + b) * D + d]; };
  auto rho = curvature_action(f);
  auto hv = curvature_horizontal(f, rho, -pv.a);  // pairs against phi t - t phi

  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j) {
      for (int r = 0; r < n; ++r) at(l, j, r) = Gam[(r * n + l) * n + j];
      for (int A = 0; A < nn; ++A) at(l, j, n + A) = 0.5 * rho[(l * n + j) * nn + A];
    }
  for (int A = 0; A < nn; ++A)
    for (int j = 0; j < n; ++j)
      for (int r = 0; r < n; ++r) at(n + A, j, r) = hv[(j * nn + A) * n + r];
  for (int l = 0; l < n; ++l)
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        const int B = p * n + q;
        for (int r = 0; r < n; ++r) at(l, n + B, r) = hv[(l * nn + B) * n + r];
        for (int i = 0; i < n; ++i) at(l, n + B, n + i * n + q) += Gam[(i * n + l) * n + p];
        for (int j = 0; j < n; ++j) at(l, n + B, n + p * n + j) -= Gam[(q * n + l) * n + j];
      }
  for (int A = 0; A < nn; ++A)
    for (int B = 0; B < nn; ++B) {
      at(n + A, n + B, n + B) += pv.L * f.normal(A);
      at(n + A, n + B, n + A) += pv.L * f.normal(B);
      S coef = pv.M * f.fiber_metric(A, B) + pv.N * f.normal(A) * f.normal(B);
      for (int C = 0; C < nn; ++C) at(n + A, n + B, n + C) += coef * f.t[C];
    }
  return out;
}

}  // namespace detail
}  // namespace cgb
