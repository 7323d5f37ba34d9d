#include "cgbundle/tensor_bundle.hpp"

#include <algorithm>
#include <cmath>

namespace cgb {

namespace {

struct Local {
  MetricModel model;
  detail::FiberAt<double> f;
};

Local local_at(const Chart& chart, const BundlePoint& p, bool with_curvature) {
  p.validate();
  if (p.dim() != chart.dim()) throw ChartError("bundle point dimension does not match chart");
  MetricModel model = chart.model(p.x);
  std::vector<double> zero(p.dim(), 0.0);
  auto f = detail::fiber_at<double>(model, std::span<const double>(zero), std::span<const double>(p.t),
                                    with_curvature);
  return {std::move(model), std::move(f)};
}

ConnectionCoefficients wrap(int n, std::vector<double> data) {
  ConnectionCoefficients c;
  c.n = n;
  c.data = std::move(data);
  return c;
}

}  // namespace

CGParams CGParams::preset(const std::string& name) {
  if (name == "sasaki") return sasaki();
  if (name == "classic") return classic();
  if (name == "a1b1") return a1b1();
  throw ParamError("unknown parameter preset '" + name + "'");
}

void CGParams::check(double tau) const {
  const double av = a(tau);
  const double bv = b(tau);
  if (!std::isfinite(av) || !std::isfinite(bv)) throw ParamError("a or b is not finite at tau");
  if (!(av > 0.0)) throw ParamError("metric parameter a must be positive");
  if (!(av + bv * tau > 0.0)) throw ParamError("metric parameters violate a + b*tau > 0");
}

void BundlePoint::validate() const {
  const auto n = x.size();
  if (n == 0) throw ChartError("bundle point has empty base coordinates");
  if (t.size() != n * n) throw ChartError("fiber matrix must be n x n");
}

AdaptedVector AdaptedVector::from_flat(std::span<const double> w, int n) {
  AdaptedVector out;
  out.h.assign(w.begin(), w.begin() + n);
  out.v.assign(w.begin() + n, w.begin() + n + n * n);
  return out;
}

std::vector<double> AdaptedVector::flat() const {
  std::vector<double> w = h;
  w.insert(w.end(), v.begin(), v.end());
  return w;
}

AdaptedVector ConnectionCoefficients::apply(int alpha, int beta) const {
  const int D = frame_dim();
  return AdaptedVector::from_flat(std::span<const double>(data).subspan((alpha * D + beta) * D, D), n);
}

namespace {
bool in_block(int n, int alpha, int beta, int delta, ConnectionCoefficients::Block b) {
  using B = ConnectionCoefficients::Block;
  const bool ah = alpha < n, bh = beta < n, dh = delta < n;
  switch (b) {
    case B::HH_H: return ah && bh && dh;
    case B::HH_V: return ah && bh && !dh;
    case B::HV_H: return ah && !bh && dh;
    case B::HV_V: return ah && !bh && !dh;
    case B::VH_H: return !ah && bh && dh;
    case B::VH_V: return !ah && bh && !dh;
    case B::VV_H: return !ah && !bh && dh;
    case B::VV_V: return !ah && !bh && !dh;
  }
  return false;
}
}  // namespace

double ConnectionCoefficients::block_max_diff(const ConnectionCoefficients& other, Block block) const {
  const int D = frame_dim();
  double worst = 0.0;
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b)
      for (int d = 0; d < D; ++d)
        if (in_block(n, a, b, d, block))
          worst = std::max(worst, std::abs((*this)(a, b, d) - other(a, b, d)));
  return worst;
}

double ConnectionCoefficients::max_diff(const ConnectionCoefficients& other) const {
  double worst = 0.0;
  for (size_t q = 0; q < data.size(); ++q) worst = std::max(worst, std::abs(data[q] - other.data[q]));
  return worst;
}

const char* block_name(ConnectionCoefficients::Block b) {
  using B = ConnectionCoefficients::Block;
  switch (b) {
    case B::HH_H: return "HH->H";
    case B::HH_V: return "HH->V";
    case B::HV_H: return "HV->H";
    case B::HV_V: return "HV->V";
    case B::VH_H: return "VH->H";
    case B::VH_V: return "VH->V";
    case B::VV_H: return "VV->H";
    case B::VV_V: return "VV->V";
  }
  return "?";
}

double tau(const Chart& chart, const BundlePoint& p) { return local_at(chart, p, false).f.tau; }

Eigen::MatrixXd tbar(const Chart& chart, const BundlePoint& p) {
  auto loc = local_at(chart, p, false);
  const int n = p.dim();
  Eigen::MatrixXd out(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out(j, i) = loc.f.tbar[j * n + i];
  return out;
}

double iota(const Chart& chart, std::span<const double> alpha, const BundlePoint& p) {
  p.validate();
  if (p.dim() != chart.dim()) throw ChartError("bundle point dimension does not match chart");
  const int n = p.dim();
  // same layout as t: alpha^i_j at i*n + j
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) acc += alpha[j * n + i] * p.t[i * n + j];
  return acc;
}

AdaptedVector vertical_lift(const Chart& chart, std::span<const double> A, const BundlePoint& p) {
  const int n = p.dim();
  if (!chart.contains(p.x)) throw DomainError("point outside chart domain");
  AdaptedVector out = AdaptedVector::zero(n);
  std::copy(A.begin(), A.begin() + n * n, out.v.begin());
  return out;
}

AdaptedVector horizontal_lift(const Chart& chart, std::span<const double> X, const BundlePoint& p) {
  const int n = p.dim();
  if (!chart.contains(p.x)) throw DomainError("point outside chart domain");
  AdaptedVector out = AdaptedVector::zero(n);
  std::copy(X.begin(), X.begin() + n, out.h.begin());
  return out;
}

std::vector<double> complete_lift(const Chart& chart, const BaseVectorField& V, const BundlePoint& p) {
  const int n = p.dim();
  if (!chart.contains(p.x)) throw DomainError("point outside chart domain");
  std::vector<double> out(n + n * n, 0.0);
  for (int i = 0; i < n; ++i) out[i] = V.value[i];
  auto dV = [&](int m, int i) { return V.jacobian[m * n + i]; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int m = 0; m < n; ++m) acc += p.t[m * n + j] * dV(m, i) - p.t[i * n + m] * dV(j, m);
      out[n + i * n + j] = acc;
    }
  return out;
}

std::vector<double> to_coordinates(const Chart& chart, const AdaptedVector& v, const BundlePoint& p) {
  auto loc = local_at(chart, p, false);
  return detail::adapted_to_coordinate(loc.f, v.flat());
}

AdaptedVector from_coordinates(const Chart& chart, std::span<const double> coords, const BundlePoint& p) {
  auto loc = local_at(chart, p, false);
  std::vector<double> c(coords.begin(), coords.end());
  return AdaptedVector::from_flat(detail::coordinate_to_adapted(loc.f, c), p.dim());
}

MetricBlocks cg_metric_matrices(const Chart& chart, const CGParams& params, const BundlePoint& p) {
  auto loc = local_at(chart, p, false);
  const auto& f = loc.f;
  params.check(f.tau);
  const int n = f.n;
  const int nn = n * n;
  const int D = n + nn;
  const double a = params.a(f.tau);
  const double b = params.b(f.tau);
  auto flat = detail::cg_metric_flat(f, a, b);
  MetricBlocks out;
  out.G = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(flat.data(), D, D);
  out.G_inv = Eigen::MatrixXd::Zero(D, D);
  const auto& g = f.base.g;
  const auto& gi = f.base.ginv;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.G_inv(i, j) = gi[i * n + j];
  const double w = b / (a * (a + b * f.tau));
  for (int A = 0; A < nn; ++A)
    for (int B = 0; B < nn; ++B) {
      const int i = A / n, j = A % n, k = B / n, l = B % n;
      out.G_inv(n + A, n + B) = gi[i * n + k] * g[j * n + l] / a - w * f.t[A] * f.t[B];
    }
  return out;
}

double cg_inner(const Chart& chart, const CGParams& params, const BundlePoint& p, const AdaptedVector& u,
                const AdaptedVector& w) {
  auto m = cg_metric_matrices(chart, params, p);
  auto uf = u.flat();
  auto wf = w.flat();
  Eigen::Map<const Eigen::VectorXd> U(uf.data(), uf.size()), W(wf.data(), wf.size());
  return U.dot(m.G * W);
}

AdaptedVector bracket(const Chart& chart, const LiftedField& lhs, const LiftedField& rhs, const BundlePoint& p) {
  using K = LiftedField::Kind;
  const int n = p.dim();
  if (lhs.kind == K::vertical && rhs.kind == K::vertical) {
    if (!chart.contains(p.x)) throw DomainError("point outside chart domain");
    return AdaptedVector::zero(n);
  }
  if (lhs.kind == K::vertical) {
    auto r = bracket(chart, rhs, lhs, p);
    for (auto& c : r.h) c = -c;
    for (auto& c : r.v) c = -c;
    return r;
  }
  auto loc = local_at(chart, p, rhs.kind == K::horizontal);
  const auto& G = loc.f.base.gamma;
  auto gam = [&](int k, int i, int j) { return G[(k * n + i) * n + j]; };
  AdaptedVector out = AdaptedVector::zero(n);
  const auto& X = lhs.value;
  if (rhs.kind == K::vertical) {
    const auto& A = rhs.value;
    const auto& dA = rhs.jacobian;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int m = 0; m < n; ++m) {
          double cov = dA.empty() ? 0.0 : dA[m * n * n + i * n + j];
          for (int k = 0; k < n; ++k) cov += gam(i, m, k) * A[k * n + j] - gam(k, m, j) * A[i * n + k];
          acc += X[m] * cov;
        }
        out.v[i * n + j] = acc;
      }
    return out;
  }
  const auto& Y = rhs.value;
  const auto& dX = lhs.jacobian;
  const auto& dY = rhs.jacobian;
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int m = 0; m < n; ++m) {
      if (!dY.empty()) acc += X[m] * dY[m * n + i];
      if (!dX.empty()) acc -= Y[m] * dX[m * n + i];
    }
    out.h[i] = acc;
  }
  // phi = R(X, Y) as a (1,1) tensor, then (tilde gamma - gamma) phi = t phi - phi t.
  const auto& R = loc.f.base.riemann;
  std::vector<double> phi(n * n, 0.0);
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) phi[s * n + r] += X[l] * Y[j] * R[((l * n + j) * n + r) * n + s];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int m = 0; m < n; ++m) acc += p.t[i * n + m] * phi[m * n + j] - p.t[m * n + j] * phi[i * n + m];
      out.v[i * n + j] = acc;
    }
  return out;
}

ConnectionCoefficients cg_connection_closed(const Chart& chart, const CGParams& params, const BundlePoint& p,
                                            MCoefficient m) {
  auto loc = local_at(chart, p, true);
  params.check(loc.f.tau);
  auto pv = params.at(loc.f.tau, m);
  return wrap(p.dim(), detail::bundle_connection_closed(loc.f, pv));
}

ConnectionCoefficients cg_connection_koszul(const Chart& chart, const CGParams& params, const BundlePoint& p) {
  auto loc = local_at(chart, p, false);
  params.check(loc.f.tau);
  std::vector<double> zero(p.dim(), 0.0);
  auto res = detail::koszul(detail::BundleFrameModel{params}, loc.model, std::span<const double>(zero),
                            std::span<const double>(p.t));
  return wrap(p.dim(), std::move(res.conn));
}

ConnectionResiduals connection_residuals(const Chart& chart, const CGParams& params, const BundlePoint& p,
                                         const ConnectionCoefficients& c) {
  auto loc = local_at(chart, p, false);
  params.check(loc.f.tau);
  std::vector<double> zero(p.dim(), 0.0);
  auto res = detail::koszul(detail::BundleFrameModel{params}, loc.model, std::span<const double>(zero),
                            std::span<const double>(p.t));
  const int D = res.dim;
  const auto& G = res.frame_metric;
  ConnectionResiduals out;
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b) {
      for (int d = 0; d < D; ++d)
        out.torsion = std::max(out.torsion, std::abs(c(a, b, d) - c(b, a, d) - res.brackets[(a * D + b) * D + d]));
      for (int e = 0; e < D; ++e) {
        double v = res.frame_metric_deriv[(a * D + b) * D + e];
        for (int d = 0; d < D; ++d) v -= c(a, b, d) * G[d * D + e] + c(a, e, d) * G[b * D + d];
        out.compatibility = std::max(out.compatibility, std::abs(v));
      }
    }
  return out;
}

}  // namespace cgb
