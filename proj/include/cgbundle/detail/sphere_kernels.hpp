#pragma once

// Scalar-generic pieces of the tensor sphere bundle of radius r.
//
// Frame: X_j = e_j (j < n) and X_{n+A} = e_A^T = e_A - c n_A t with c = 1/r^2.
// The frame is overcomplete (sum_A t^A e_A^T = 0); vectors are stored through
// their ambient adapted components, and a tangent vector's vertical
// components double as its coefficients in the frame.

#include <span>
#include <vector>

#include "cgbundle/detail/bundle_kernels.hpp"

namespace cgb::detail {

/// v - c G(t, v) t on the vertical slots of an ambient vector (length D, offset n).
template <typename S>
void project_radial(const FiberAt<S>& f, double c, S* v) {
  const int n = f.n;
  S radial = S(0.0);
  for (int A = 0; A < n * n; ++A) radial += f.normal(A) * v[n + A];
  for (int A = 0; A < n * n; ++A) v[n + A] -= c * radial * f.t[A];
}

struct SphereFrameModel {
  double a = 1.0;
  double c = 1.0;

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
    for (int A = 0; A < n * n; ++A) {
      S* row = &X[(n + A) * D];
      row[n + A] = S(1.0);
      project_radial(f, c, row);
    }
    return X;
  }
  template <typename S>
  std::vector<S> ambient(const FiberAt<S>& f) const {
    const int n = f.n;
    const int D = n + n * n;
    std::vector<S> X(D * D, S(0.0));
    for (int s = 0; s < n; ++s) X[s * D + s] = S(1.0);
    for (int A = 0; A < n * n; ++A) {
      S* row = &X[(n + A) * D];
      row[n + A] = S(1.0);
      project_radial(f, c, row);
    }
    return X;
  }
  template <typename S>
  std::vector<S> metric(const FiberAt<S>& f) const {
    return cg_metric_flat(f, S(a), S(0.0));
  }
};

/// Closed-form connection of the induced metric in the tangential frame; f must carry curvature.
template <typename S>
std::vector<S> sphere_connection_closed(const FiberAt<S>& f, double a, double c) {
  const int n = f.n;
  const int nn = n * n;
  const int D = n + nn;
  const auto& Gam = f.base.gamma;
  std::vector<S> out(D * D * D, S(0.0));
  auto row = [&](int al, int be) { return &out[(al * D + be) * D]; };
  auto rho = curvature_action(f);
  auto hv = curvature_horizontal(f, rho, S(-a));

  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j) {
      S* w = row(l, j);
      for (int r = 0; r < n; ++r) w[r] = Gam[(r * n + l) * n + j];
      for (int A = 0; A < nn; ++A) w[n + A] = 0.5 * rho[(l * n + j) * nn + A];
    }
  for (int A = 0; A < nn; ++A)
    for (int j = 0; j < n; ++j) {
      S* w = row(n + A, j);
      for (int r = 0; r < n; ++r) w[r] = hv[(j * nn + A) * n + r];
    }
  for (int l = 0; l < n; ++l)
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        const int B = p * n + q;
        S* w = row(l, n + B);
        for (int r = 0; r < n; ++r) w[r] = hv[(l * nn + B) * n + r];
        for (int i = 0; i < n; ++i) w[n + i * n + q] += Gam[(i * n + l) * n + p];
        for (int j = 0; j < n; ++j) w[n + p * n + j] -= Gam[(q * n + l) * n + j];
        project_radial(f, c, w);
      }
  for (int A = 0; A < nn; ++A)
    for (int B = 0; B < nn; ++B) {
      S* w = row(n + A, n + B);
      w[n + A] = -c * f.normal(B);
      project_radial(f, c, w);
    }
  return out;
}

/// Closed-form brackets of the tangential frame (ambient components).
template <typename S>
std::vector<S> sphere_brackets_closed(const FiberAt<S>& f, double c) {
  const int n = f.n;
  const int nn = n * n;
  const int D = n + nn;
  const auto& Gam = f.base.gamma;
  std::vector<S> out(D * D * D, S(0.0));
  auto row = [&](int al, int be) { return &out[(al * D + be) * D]; };
  auto rho = curvature_action(f);
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int A = 0; A < nn; ++A) row(l, j)[n + A] = rho[(l * n + j) * nn + A];
  for (int l = 0; l < n; ++l)
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        const int B = p * n + q;
        S* w = row(l, n + B);
        for (int i = 0; i < n; ++i) w[n + i * n + q] += Gam[(i * n + l) * n + p];
        for (int j = 0; j < n; ++j) w[n + p * n + j] -= Gam[(q * n + l) * n + j];
        project_radial(f, c, w);
        S* m = row(n + B, l);
        for (int d = 0; d < D; ++d) m[d] = -w[d];
      }
  for (int A = 0; A < nn; ++A)
    for (int B = 0; B < nn; ++B) {
      S* w = row(n + A, n + B);
      w[n + B] += c * f.normal(A);
      w[n + A] -= c * f.normal(B);
      project_radial(f, c, w);
    }
  return out;
}

/// Connection functors: evaluate coefficients at (dx, t) for any scalar.
struct SphereClosedConnection {
  double a = 1.0;
  double c = 1.0;
  template <typename S>
  std::vector<S> operator()(const MetricModel& model, std::span<const S> dx, std::span<const S> t) const {
    auto f = fiber_at<S>(model, dx, t, true);
    return sphere_connection_closed(f, a, c);
  }
};

struct SphereKoszulConnection {
  double a = 1.0;
  double c = 1.0;
  template <typename S>
  std::vector<S> operator()(const MetricModel& model, std::span<const S> dx, std::span<const S> t) const {
    return koszul(SphereFrameModel{a, c}, model, dx, t).conn;
  }
};

/// R(X_al, X_be) X_ga in ambient components, [((al*D + be)*D + ga)*D + de], from a
/// connection functor and the frame brackets, by differentiating the coefficients
/// along the frame with dual numbers.
template <typename Conn>
std::vector<double> curvature_from_connection(const Conn& conn, const MetricModel& model, std::span<const double> t,
                                              const std::vector<double>& brackets, double c) {
  using D1 = Dual<double>;
  const int n = model.dim();
  const int D = n + n * n;
  std::vector<double> zero(n, 0.0);
  auto f = fiber_at<double>(model, std::span<const double>(zero), t, false);
  auto X = SphereFrameModel{1.0, c}.coords<double>(f);
  auto Gam = conn.template operator()<double>(model, std::span<const double>(zero), t);
  const int D3 = D * D * D;
  std::vector<double> dGam(D * D3);
  for (int al = 0; al < D; ++al) {
    std::vector<D1> dx(n), td(n * n);
    for (int q = 0; q < n; ++q) dx[q] = D1(0.0, X[al * D + q]);
    for (int A = 0; A < n * n; ++A) td[A] = D1(t[A], X[al * D + n + A]);
    auto g1 = conn.template operator()<D1>(model, std::span<const D1>(dx), std::span<const D1>(td));
    for (int q = 0; q < D3; ++q) dGam[al * D3 + q] = g1[q].d;
  }
  // nabla_al (nabla_be X_ga) into out
  auto second = [&](int al, int be, int ga, double* out) {
    const double* y = &Gam[(be * D + ga) * D];
    const double* dy = &dGam[al * D3 + (be * D + ga) * D];
    for (int d = 0; d < D; ++d) out[d] = dy[d];
    project_radial(f, c, out);
    for (int de = 0; de < D; ++de) {
      if (y[de] == 0.0) continue;
      const double* w = &Gam[(al * D + de) * D];
      for (int d = 0; d < D; ++d) out[d] += y[de] * w[d];
    }
  };
  std::vector<double> R(D * D3, 0.0);
  std::vector<double> u(D), v(D);
  for (int al = 0; al < D; ++al)
    for (int be = 0; be < D; ++be) {
      const double* C = &brackets[(al * D + be) * D];
      for (int ga = 0; ga < D; ++ga) {
        second(al, be, ga, u.data());
        second(be, al, ga, v.data());
        double* out = &R[((al * D + be) * D + ga) * D];
        for (int d = 0; d < D; ++d) out[d] = u[d] - v[d];
        for (int de = 0; de < D; ++de) {
          if (C[de] == 0.0) continue;
          const double* w = &Gam[(de * D + ga) * D];
          for (int d = 0; d < D; ++d) out[d] -= C[de] * w[d];
        }
      }
    }
  return R;
}

}  // namespace cgb::detail
