#pragma once

// Scalar-generic kernels shared by the tensor bundle and the sphere bundle.
// Every function here is a pure function of (metric model, base offset, fiber
// matrix) so it can be re-evaluated on dual numbers for exact frame-direction
// derivatives.
//
// Layout: vertical index A <-> (i, j) <-> t^i_j, flattened A = i*n + j.
// Adapted components of a tangent vector of the bundle: [h_0..h_{n-1}, v_0..v_{n^2-1}].

#include <span>
#include <vector>

#include "cgbundle/base_geometry.hpp"
#include "cgbundle/dual.hpp"

namespace cgb::detail {

template <typename S>
struct FiberAt {
  int n = 0;
  BaseAt<S> base;
  std::vector<S> t;     // t^i_j at [i*n + j]
  std::vector<S> tbar;  // tbar^j_i at [j*n + i]
  S tau{};

  /// Gradient of tau / 2 with respect to t^A, i.e. tbar^j_i for A = (i, j).
  S normal(int A) const { return tbar[(A % n) * n + A / n]; }
  /// Fiber metric G(e_A, e_B) = g_{ik} g^{jl} for A = (i, j), B = (k, l).
  S fiber_metric(int A, int B) const {
    return base.g[(A / n) * n + B / n] * base.ginv[(A % n) * n + B % n];
  }
};

template <typename S>
FiberAt<S> fiber_at(const MetricModel& model, std::span<const S> dx, std::span<const S> t,
                    bool with_curvature) {
  FiberAt<S> f;
  const int n = model.dim();
  f.n = n;
  f.base = base_at<S>(model, dx, with_curvature);
  f.t.assign(t.begin(), t.end());
  f.tbar.assign(n * n, S(0.0));
  const auto& g = f.base.g;
  const auto& gi = f.base.ginv;
  // tbar = g^{-1} t^T g
  std::vector<S> tmp(n * n, S(0.0));  // (t^T g)[h][i] = sum_k t^k_h g_ki
  for (int h = 0; h < n; ++h)
    for (int i = 0; i < n; ++i) {
      S acc = S(0.0);
      for (int k = 0; k < n; ++k) acc += t[k * n + h] * g[k * n + i];
      tmp[h * n + i] = acc;
    }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      S acc = S(0.0);
      for (int h = 0; h < n; ++h) acc += gi[j * n + h] * tmp[h * n + i];
      f.tbar[j * n + i] = acc;
    }
  S tau = S(0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) tau += f.tbar[j * n + i] * t[i * n + j];
  f.tau = tau;
  return f;
}

/// Coordinate vertical components of the horizontal frame field e_s:
/// Gamma^m_{sj} t^i_m - Gamma^i_{sm} t^m_j at slot (i, j).
template <typename S>
std::vector<S> horizontal_shift(const FiberAt<S>& f, int s) {
  const int n = f.n;
  const auto& G = f.base.gamma;
  std::vector<S> out(n * n, S(0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      S acc = S(0.0);
      for (int m = 0; m < n; ++m)
        acc += G[(m * n + s) * n + j] * f.t[i * n + m] - G[(i * n + s) * n + m] * f.t[m * n + j];
      out[i * n + j] = acc;
    }
  return out;
}

/// Curvature action on the fiber: rho(l, z) = t phi - phi t with phi^s_r = R_{lzr}^s,
/// flattened [(l*n + z)*n^2 + A].
template <typename S>
std::vector<S> curvature_action(const FiberAt<S>& f) {
  const int n = f.n;
  const int nn = n * n;
  const auto& R = f.base.riemann;
  std::vector<S> out(nn * nn, S(0.0));
  for (int l = 0; l < n; ++l)
    for (int z = 0; z < n; ++z)
      for (int v = 0; v < n; ++v)
        for (int r = 0; r < n; ++r) {
          S acc = S(0.0);
          for (int s = 0; s < n; ++s)
            acc += f.t[v * n + s] * R[((l * n + z) * n + r) * n + s] -
                   R[((l * n + z) * n + s) * n + v] * f.t[s * n + r];
          out[(l * n + z) * nn + v * n + r] = acc;
        }
  return out;
}

/// Horizontal vector (scale/2) g^{rz} G(rho(l, z), e_A), flattened [(l*n^2 + A)*n + r].
template <typename S>
std::vector<S> curvature_horizontal(const FiberAt<S>& f, const std::vector<S>& rho, const S& scale) {
  const int n = f.n;
  const int nn = n * n;
  const auto& g = f.base.g;
  const auto& gi = f.base.ginv;
  // lowered[(l*n + z)*nn + (p,q)] = sum_{i,j} g_{ip} g^{jq} rho^i_j
  std::vector<S> lowered(nn * nn, S(0.0));
  for (int lz = 0; lz < nn; ++lz)
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        S acc = S(0.0);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) acc += g[i * n + p] * gi[j * n + q] * rho[lz * nn + i * n + j];
        lowered[lz * nn + p * n + q] = acc;
      }
  std::vector<S> out(n * nn * n, S(0.0));
  for (int l = 0; l < n; ++l)
    for (int A = 0; A < nn; ++A)
      for (int r = 0; r < n; ++r) {
        S acc = S(0.0);
        for (int z = 0; z < n; ++z) acc += gi[r * n + z] * lowered[(l * n + z) * nn + A];
        out[(l * nn + A) * n + r] = 0.5 * scale * acc;
      }
  return out;
}

/// Adapted-frame components of a coordinate vector: vertical part minus h^s times the shift of e_s.
template <typename S>
std::vector<S> coordinate_to_adapted(const FiberAt<S>& f, const std::vector<S>& coord) {
  const int n = f.n;
  std::vector<S> out = coord;
  for (int s = 0; s < n; ++s) {
    auto shift = horizontal_shift(f, s);
    for (int A = 0; A < n * n; ++A) out[n + A] -= coord[s] * shift[A];
  }
  return out;
}

template <typename S>
std::vector<S> adapted_to_coordinate(const FiberAt<S>& f, const std::vector<S>& adapted) {
  const int n = f.n;
  std::vector<S> out = adapted;
  for (int s = 0; s < n; ++s) {
    auto shift = horizontal_shift(f, s);
    for (int A = 0; A < n * n; ++A) out[n + A] += adapted[s] * shift[A];
  }
  return out;
}

/// Output of a Koszul evaluation in a (possibly overcomplete) frame.
template <typename S>
struct KoszulResult {
  int dim = 0;
  std::vector<S> conn;        // [(alpha*D + beta)*D + delta], ambient adapted components
  std::vector<S> brackets;    // [(alpha*D + beta)*D + delta]
  std::vector<S> frame_metric;        // [beta*D + gamma]
  std::vector<S> frame_metric_deriv;  // [(alpha*D + beta)*D + gamma] = X_alpha(g_{beta gamma})
};

/// Levi-Civita connection of a frame by the six-term Koszul formula.
///
/// FrameModel must provide, templated on the scalar:
///   coords(f)   : D x D, row alpha = coordinate components of X_alpha
///   ambient(f)  : D x D, row alpha = adapted components of X_alpha
///   metric(f)   : D x D ambient metric in the adapted frame
/// For an overcomplete frame the solve uses the ambient metric; this is exact
/// whenever the result is tangent (the Koszul right-hand side then annihilates
/// the relations among the frame fields).
template <typename FrameModel, typename S>
KoszulResult<S> koszul(const FrameModel& fm, const MetricModel& model, std::span<const S> dx,
                       std::span<const S> t) {
  using DS = Dual<S>;
  const int n = model.dim();
  const int D = n + n * n;
  auto f = fiber_at<S>(model, dx, t, false);
  auto X = fm.template coords<S>(f);
  auto Xa = fm.template ambient<S>(f);
  auto Gamb = fm.template metric<S>(f);

  auto frame_metric = [&]<typename T>(const std::vector<T>& xa, const std::vector<T>& G) {
    std::vector<T> out(D * D, T(0.0));
    std::vector<T> tmp(D * D, T(0.0));  // tmp = Xa G
    for (int a = 0; a < D; ++a)
      for (int c = 0; c < D; ++c) {
        T acc = T(0.0);
        for (int b = 0; b < D; ++b) acc += xa[a * D + b] * G[b * D + c];
        tmp[a * D + c] = acc;
      }
    for (int a = 0; a < D; ++a)
      for (int c = 0; c < D; ++c) {
        T acc = T(0.0);
        for (int b = 0; b < D; ++b) acc += tmp[a * D + b] * xa[c * D + b];
        out[a * D + c] = acc;
      }
    return out;
  };

  KoszulResult<S> res;
  res.dim = D;
  res.frame_metric = frame_metric(Xa, Gamb);
  res.frame_metric_deriv.assign(D * D * D, S(0.0));
  std::vector<S> dcoords(D * D * D, S(0.0));  // [alpha][beta][A] = X_alpha(X_beta^A)

  for (int a = 0; a < D; ++a) {
    std::vector<DS> dxd(n), td(n * n);
    for (int c = 0; c < n; ++c) dxd[c] = DS(dx[c], X[a * D + c]);
    for (int A = 0; A < n * n; ++A) td[A] = DS(t[A], X[a * D + n + A]);
    auto fd = fiber_at<DS>(model, std::span<const DS>(dxd), std::span<const DS>(td), false);
    auto Xd = fm.template coords<DS>(fd);
    auto Xad = fm.template ambient<DS>(fd);
    auto Gd = fm.template metric<DS>(fd);
    auto gm = frame_metric(Xad, Gd);
    for (int q = 0; q < D * D; ++q) {
      res.frame_metric_deriv[a * D * D + q] = gm[q].d;
      dcoords[a * D * D + q] = Xd[q].d;
    }
  }

  res.brackets.assign(D * D * D, S(0.0));
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b) {
      std::vector<S> coord(D);
      for (int A = 0; A < D; ++A) coord[A] = dcoords[(a * D + b) * D + A] - dcoords[(b * D + a) * D + A];
      auto ad = coordinate_to_adapted(f, coord);
      for (int c = 0; c < D; ++c) res.brackets[(a * D + b) * D + c] = ad[c];
    }

  // Pairings g(C_ab, X_c) with C expressed through ambient components.
  std::vector<S> GX(D * D, S(0.0));  // [c][q] = (G_amb X_c)_q
  for (int c = 0; c < D; ++c)
    for (int q = 0; q < D; ++q) {
      S acc = S(0.0);
      for (int p = 0; p < D; ++p) acc += Gamb[q * D + p] * Xa[c * D + p];
      GX[c * D + q] = acc;
    }
  auto pair = [&](int a, int b, int c) {
    S acc = S(0.0);
    for (int q = 0; q < D; ++q) acc += res.brackets[(a * D + b) * D + q] * GX[c * D + q];
    return acc;
  };
  auto Ginv = invert(Gamb, D);
  const auto& dG = res.frame_metric_deriv;
  res.conn.assign(D * D * D, S(0.0));
  std::vector<S> K(D);
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b) {
      for (int c = 0; c < D; ++c)
        K[c] = 0.5 * (dG[(a * D + b) * D + c] + dG[(b * D + a) * D + c] - dG[(c * D + a) * D + b] +
                      pair(a, b, c) - pair(a, c, b) - pair(b, c, a));
      for (int d = 0; d < D; ++d) {
        S acc = S(0.0);
        for (int c = 0; c < D; ++c) acc += Ginv[d * D + c] * K[c];
        res.conn[(a * D + b) * D + d] = acc;
      }
    }
  return res;
}

}  // namespace cgb::detail
