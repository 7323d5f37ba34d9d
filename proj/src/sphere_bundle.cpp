#include "cgbundle/sphere_bundle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "cgbundle/detail/sphere_kernels.hpp"

namespace cgb {

namespace {

struct Local {
  MetricModel model;
  detail::FiberAt<double> f;
};

Local local_at(const Chart& chart, const BundlePoint& p, bool with_curvature) {
  p.validate();
  if (p.dim() != chart.dim()) throw ChartError("sphere point dimension does not match chart");
  MetricModel model = chart.model(p.x);
  std::vector<double> zero(p.dim(), 0.0);
  auto f = detail::fiber_at<double>(model, std::span<const double>(zero), std::span<const double>(p.t),
                                    with_curvature);
  return {std::move(model), std::move(f)};
}

void require_positive(double a) {
  if (!(a > 0.0)) throw ParamError("sphere metric needs a > 0");
}

double radial(const detail::FiberAt<double>& f, std::span<const double> v) {
  double acc = 0.0;
  for (int A = 0; A < f.n * f.n; ++A) acc += f.normal(A) * v[A];
  return acc;
}

ConnectionCoefficients wrap(int n, std::vector<double> data) {
  ConnectionCoefficients c;
  c.n = n;
  c.data = std::move(data);
  return c;
}

CurvatureBlocks wrap_curvature(int n, std::vector<double> data) {
  CurvatureBlocks c;
  c.n = n;
  c.data = std::move(data);
  return c;
}

// Ambient metric restricted to tangent vectors: diag(g, a G).
double pair_ambient(const detail::FiberAt<double>& f, double a, const double* u, const double* w) {
  const int n = f.n;
  const int nn = n * n;
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) acc += f.base.g[i * n + j] * u[i] * w[j];
  double vert = 0.0;
  for (int A = 0; A < nn; ++A)
    for (int B = 0; B < nn; ++B) vert += f.fiber_metric(A, B) * u[n + A] * w[n + B];
  return acc + a * vert;
}

}  // namespace

SpherePoint SpherePoint::make(const Chart& chart, std::vector<double> x, std::vector<double> t, double r) {
  if (!(r > 0.0)) throw DomainError("sphere radius must be positive");
  BundlePoint p{std::move(x), std::move(t)};
  const double tau_now = tau(chart, p);
  if (!(tau_now > 0.0)) throw DomainError("cannot place t = 0 on a sphere");
  const double s = r / std::sqrt(tau_now);
  for (double& v : p.t) v *= s;
  return {std::move(p), r};
}

double sphere_defect(const Chart& chart, const SpherePoint& sp) {
  return std::abs(tau(chart, sp.p) - sp.r * sp.r) / (sp.r * sp.r);
}

AdaptedVector tangential_lift(const Chart& chart, std::span<const double> A, const SpherePoint& sp) {
  auto loc = local_at(chart, sp.p, false);
  const int n = sp.dim();
  if (static_cast<int>(A.size()) != n * n) throw ChartError("tangential_lift expects an n x n tensor");
  AdaptedVector out = AdaptedVector::zero(n);
  const double s = sp.c() * radial(loc.f, A);
  for (int B = 0; B < n * n; ++B) out.v[B] = A[B] - s * sp.p.t[B];
  return out;
}

double radial_component(const Chart& chart, const SpherePoint& sp, const AdaptedVector& v) {
  auto loc = local_at(chart, sp.p, false);
  return std::abs(radial(loc.f, v.v)) / sp.r;
}

AdaptedVector project_tangent(const Chart& chart, const SpherePoint& sp, const AdaptedVector& v) {
  auto out = v;
  auto loc = local_at(chart, sp.p, false);
  const double s = sp.c() * radial(loc.f, v.v);
  for (int B = 0; B < sp.dim() * sp.dim(); ++B) out.v[B] -= s * sp.p.t[B];
  return out;
}

double induced_metric(const Chart& chart, const SpherePoint& sp, double a, const AdaptedVector& u,
                      const AdaptedVector& w) {
  require_positive(a);
  auto loc = local_at(chart, sp.p, false);
  const auto uf = u.flat();
  const auto wf = w.flat();
  const int n = sp.dim();
  return pair_ambient(loc.f, a, uf.data(), wf.data()) -
         a * sp.c() * radial(loc.f, std::span<const double>(uf).subspan(n)) *
             radial(loc.f, std::span<const double>(wf).subspan(n));
}

AdaptedVector sphere_bracket(const Chart& chart, const SpherePoint& sp, int alpha, int beta) {
  const int n = sp.dim();
  const int D = n + n * n;
  if (alpha < 0 || beta < 0 || alpha >= D || beta >= D) throw DomainError("frame index out of range");
  auto loc = local_at(chart, sp.p, true);
  auto br = detail::sphere_brackets_closed(loc.f, sp.c());
  return AdaptedVector::from_flat(std::span<const double>(br).subspan((alpha * D + beta) * D, D), n);
}

ConnectionCoefficients sphere_connection_closed(const Chart& chart, const SpherePoint& sp, double a) {
  require_positive(a);
  auto loc = local_at(chart, sp.p, true);
  return wrap(sp.dim(), detail::sphere_connection_closed(loc.f, a, sp.c()));
}

ConnectionCoefficients sphere_connection_koszul(const Chart& chart, const SpherePoint& sp, double a) {
  require_positive(a);
  auto loc = local_at(chart, sp.p, false);
  std::vector<double> zero(sp.dim(), 0.0);
  auto res = detail::koszul(detail::SphereFrameModel{a, sp.c()}, loc.model, std::span<const double>(zero),
                            std::span<const double>(sp.p.t));
  return wrap(sp.dim(), std::move(res.conn));
}

SphereConnectionResiduals sphere_connection_residuals(const Chart& chart, const SpherePoint& sp, double a,
                                                      const ConnectionCoefficients& c) {
  require_positive(a);
  auto loc = local_at(chart, sp.p, false);
  const int n = sp.dim();
  const int D = n + n * n;
  std::vector<double> zero(n, 0.0);
  detail::SphereFrameModel fm{a, sp.c()};
  auto ref = detail::koszul(fm, loc.model, std::span<const double>(zero), std::span<const double>(sp.p.t));
  auto Xa = fm.ambient<double>(loc.f);
  SphereConnectionResiduals out;
  for (int al = 0; al < D; ++al)
    for (int be = 0; be < D; ++be) {
      const double* w = &c.data[(al * D + be) * D];
      const double* wt = &c.data[(be * D + al) * D];
      const double* C = &ref.brackets[(al * D + be) * D];
      for (int d = 0; d < D; ++d) out.torsion = std::max(out.torsion, std::abs(w[d] - wt[d] - C[d]));
      out.tangency = std::max(out.tangency, std::abs(radial(loc.f, std::span<const double>(w + n, n * n))));
      for (int ga = 0; ga < D; ++ga) {
        const double* wg = &c.data[(al * D + ga) * D];
        const double lhs = ref.frame_metric_deriv[(al * D + be) * D + ga];
        const double rhs = pair_ambient(loc.f, a, w, &Xa[ga * D]) + pair_ambient(loc.f, a, &Xa[be * D], wg);
        out.compatibility = std::max(out.compatibility, std::abs(lhs - rhs));
      }
    }
  return out;
}

// ---------------------------------------------------------------------------
// Curvature

namespace {

bool in_curvature_block(int n, int al, int be, int ga, int de, CurvatureBlocks::Block b) {
  using B = CurvatureBlocks::Block;
  const bool ah = al < n, bh = be < n, gh = ga < n, dh = de < n;
  const int horiz_pair = int(ah) + int(bh);
  const bool HH = horiz_pair == 2, HT = horiz_pair == 1, TT = horiz_pair == 0;
  switch (b) {
    case B::HHHH: return HH && gh && dh;
    case B::HHHT: return HH && gh && !dh;
    case B::HHTH: return HH && !gh && dh;
    case B::HHTT: return HH && !gh && !dh;
    case B::HTHH: return HT && gh && dh;
    case B::HTHT: return HT && gh && !dh;
    case B::HTTH: return HT && !gh && dh;
    case B::HTTT: return HT && !gh && !dh;
    case B::TTHH: return TT && gh && dh;
    case B::TTHT: return TT && gh && !dh;
    case B::TTTH: return TT && !gh && dh;
    case B::TTTT: return TT && !gh && !dh;
  }
  return false;
}

}  // namespace

AdaptedVector CurvatureBlocks::apply(int alpha, int beta, int gamma) const {
  const int D = frame_dim();
  return AdaptedVector::from_flat(std::span<const double>(data).subspan(((alpha * D + beta) * D + gamma) * D, D), n);
}

AdaptedVector CurvatureBlocks::apply(const AdaptedVector& u, const AdaptedVector& v, const AdaptedVector& w) const {
  const int D = frame_dim();
  const auto uf = u.flat(), vf = v.flat(), wf = w.flat();
  std::vector<double> out(D, 0.0);
  for (int al = 0; al < D; ++al) {
    if (uf[al] == 0.0) continue;
    for (int be = 0; be < D; ++be) {
      const double uv = uf[al] * vf[be];
      if (uv == 0.0) continue;
      for (int ga = 0; ga < D; ++ga) {
        const double s = uv * wf[ga];
        if (s == 0.0) continue;
        const double* r = &data[((al * D + be) * D + ga) * D];
        for (int d = 0; d < D; ++d) out[d] += s * r[d];
      }
    }
  }
  return AdaptedVector::from_flat(out, n);
}

double CurvatureBlocks::block_max_abs(Block b) const {
  const int D = frame_dim();
  double worst = 0.0;
  for (int al = 0; al < D; ++al)
    for (int be = 0; be < D; ++be)
      for (int ga = 0; ga < D; ++ga)
        for (int de = 0; de < D; ++de)
          if (in_curvature_block(n, al, be, ga, de, b)) worst = std::max(worst, std::abs((*this)(al, be, ga, de)));
  return worst;
}

double CurvatureBlocks::block_max_diff(const CurvatureBlocks& other, Block b) const {
  const int D = frame_dim();
  double worst = 0.0;
  for (int al = 0; al < D; ++al)
    for (int be = 0; be < D; ++be)
      for (int ga = 0; ga < D; ++ga)
        for (int de = 0; de < D; ++de)
          if (in_curvature_block(n, al, be, ga, de, b))
            worst = std::max(worst, std::abs((*this)(al, be, ga, de) - other(al, be, ga, de)));
  return worst;
}

double CurvatureBlocks::max_diff(const CurvatureBlocks& other) const {
  double worst = 0.0;
  for (size_t q = 0; q < data.size(); ++q) worst = std::max(worst, std::abs(data[q] - other.data[q]));
  return worst;
}

const char* block_name(CurvatureBlocks::Block b) {
  using B = CurvatureBlocks::Block;
  switch (b) {
    case B::HHHH: return "HHHH";
    case B::HHHT: return "HHHT";
    case B::HHTH: return "HHTH";
    case B::HHTT: return "HHTT";
    case B::HTHH: return "HTHH";
    case B::HTHT: return "HTHT";
    case B::HTTH: return "HTTH";
    case B::HTTT: return "HTTT";
    case B::TTHH: return "TTHH";
    case B::TTHT: return "TTHT";
    case B::TTTH: return "TTTH";
    case B::TTTT: return "TTTT";
  }
  return "?";
}

CurvatureBlocks curvature_blocks(const Chart& chart, const SpherePoint& sp, double a) {
  require_positive(a);
  auto loc = local_at(chart, sp.p, true);
  auto br = detail::sphere_brackets_closed(loc.f, sp.c());
  auto R = detail::curvature_from_connection(detail::SphereClosedConnection{a, sp.c()}, loc.model,
                                             std::span<const double>(sp.p.t), br, sp.c());
  return wrap_curvature(sp.dim(), std::move(R));
}

CurvatureBlocks curvature_blocks_oracle(const Chart& chart, const SpherePoint& sp, double a) {
  require_positive(a);
  auto loc = local_at(chart, sp.p, false);
  std::vector<double> zero(sp.dim(), 0.0);
  auto ref = detail::koszul(detail::SphereFrameModel{a, sp.c()}, loc.model, std::span<const double>(zero),
                            std::span<const double>(sp.p.t));
  auto R = detail::curvature_from_connection(detail::SphereKoszulConnection{a, sp.c()}, loc.model,
                                             std::span<const double>(sp.p.t), ref.brackets, sp.c());
  return wrap_curvature(sp.dim(), std::move(R));
}

CurvatureBlocks tttt_formula(const Chart& chart, const SpherePoint& sp, TTTTReading reading) {
  auto loc = local_at(chart, sp.p, false);
  const auto& f = loc.f;
  const int n = sp.dim();
  const int nn = n * n;
  const int D = n + nn;
  const double c = sp.c();
  const auto& g = f.base.g;
  const auto& gi = f.base.ginv;
  const auto& tb = f.tbar;  // tbar^j_i at [j*n + i]
  CurvatureBlocks out = wrap_curvature(n, std::vector<double>(D * D * D * D, 0.0));
  // Arguments e^T_(nu,m), e^T_(t,l), e^T_(i,j); output coefficient of e^T_(v,r).
  for (int nu = 0; nu < n; ++nu)
    for (int m = 0; m < n; ++m)
      for (int tt = 0; tt < n; ++tt)
        for (int l = 0; l < n; ++l)
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
              const int A = nu * n + m, B = tt * n + l, C = i * n + j;
              double* w = &out.data[(((n + A) * D + n + B) * D + n + C) * D];
              for (int v = 0; v < n; ++v)
                for (int r = 0; r < n; ++r) {
                  const double dA = (r == m && v == nu) ? 1.0 : 0.0;  // delta^m_r delta^v_nu
                  const double dB = (r == l && v == tt) ? 1.0 : 0.0;  // delta^l_r delta^v_t
                  const double last = reading == TTTTReading::corrected ? dB : dA;
                  w[n + v * n + r] = c * c * (tb[m * n + nu] * tb[j * n + i] * dB - tb[l * n + tt] * tb[j * n + i] * dA) +
                                     c * (gi[l * n + j] * g[tt * n + i] * dA - gi[m * n + j] * g[nu * n + i] * last);
                }
              detail::project_radial(f, c, w);
            }
  return out;
}

CurvatureBlocks nabla_r_formulas(const Chart& chart, const SpherePoint& sp, double a) {
  require_positive(a);
  auto loc = local_at(chart, sp.p, true);
  const auto& f = loc.f;
  const int n = sp.dim();
  const int nn = n * n;
  const int D = n + nn;
  const double c = sp.c();
  auto field = curvature_from_model(loc.model);
  const int n4 = nn * nn;
  // rho and hv with R replaced by nabla_m R, for every m.
  std::vector<std::vector<double>> rho(n), hv(n);
  for (int m = 0; m < n; ++m) {
    auto fm = f;
    fm.base.riemann.assign(field.nabla.begin() + m * n4, field.nabla.begin() + (m + 1) * n4);
    rho[m] = detail::curvature_action(fm);
    hv[m] = detail::curvature_horizontal(fm, rho[m], -a);
  }
  CurvatureBlocks out = wrap_curvature(n, std::vector<double>(D * D * D * D, 0.0));
  auto slot = [&](int al, int be, int ga) { return &out.data[((al * D + be) * D + ga) * D]; };
  for (int m = 0; m < n; ++m)
    for (int l = 0; l < n; ++l) {
      for (int j = 0; j < n; ++j) {
        double* w = slot(m, l, j);
        for (int A = 0; A < nn; ++A)
          w[n + A] = 0.5 * (rho[m][(l * n + j) * nn + A] - rho[l][(m * n + j) * nn + A]);
        detail::project_radial(f, c, w);
      }
      for (int B = 0; B < nn; ++B) {
        double* w = slot(m, l, n + B);
        for (int r = 0; r < n; ++r) w[r] = hv[m][(l * nn + B) * n + r] - hv[l][(m * nn + B) * n + r];
      }
    }
  for (int m = 0; m < n; ++m)
    for (int A = 0; A < nn; ++A)
      for (int j = 0; j < n; ++j) {
        double* w = slot(m, n + A, j);
        double* w_swapped = slot(n + A, m, j);
        for (int r = 0; r < n; ++r) {
          w[r] = hv[m][(j * nn + A) * n + r];
          w_swapped[r] = -w[r];
        }
      }
  return out;
}

double sectional_curvature(const CurvatureBlocks& R, const Chart& chart, const SpherePoint& sp, double a,
                           const AdaptedVector& u, const AdaptedVector& v, double degeneracy_tol) {
  const double uu = induced_metric(chart, sp, a, u, u);
  const double vv = induced_metric(chart, sp, a, v, v);
  const double uv = induced_metric(chart, sp, a, u, v);
  const double gram = uu * vv - uv * uv;
  if (!(gram > degeneracy_tol * uu * vv)) throw DomainError("degenerate plane for sectional curvature");
  auto Ruvv = R.apply(u, v, v);
  return induced_metric(chart, sp, a, Ruvv, u) / gram;
}

double sectional_curvature(const Chart& chart, const SpherePoint& sp, double a, const AdaptedVector& u,
                           const AdaptedVector& v, double degeneracy_tol) {
  return sectional_curvature(curvature_blocks(chart, sp, a), chart, sp, a, u, v, degeneracy_tol);
}

// ---------------------------------------------------------------------------
// Space-form defect

const char* defect_class_name(DefectClass c) {
  static const char* names[kDefectClasses] = {"HHH", "HHT", "HTH", "HTT", "THH", "THT", "TTH", "TTT"};
  return names[static_cast<int>(c)];
}

DefectOperator::DefectOperator(const Chart& chart, const SpherePoint& sp, double a)
    : DefectOperator(curvature_blocks(chart, sp, a), chart, sp, a) {}

DefectOperator::DefectOperator(const CurvatureBlocks& R, const Chart& chart, const SpherePoint& sp, double a) {
  require_positive(a);
  auto loc = local_at(chart, sp.p, false);
  const int n = sp.dim();
  const int D = n + n * n;
  detail::SphereFrameModel fm{a, sp.c()};
  auto Xa = fm.ambient<double>(loc.f);
  std::vector<double> gm(D * D);
  for (int p = 0; p < D; ++p)
    for (int q = 0; q < D; ++q) gm[p * D + q] = pair_ambient(loc.f, a, &Xa[p * D], &Xa[q * D]);
  for (int al = 0; al < D; ++al)
    for (int be = 0; be < D; ++be)
      for (int ga = 0; ga < D; ++ga) {
        const int cls = (al < n ? 0 : 4) + (be < n ? 0 : 2) + (ga < n ? 0 : 1);
        const double* r = &R.data[((al * D + be) * D + ga) * D];
        for (int d = 0; d < D; ++d) {
          const double s = gm[be * D + ga] * Xa[al * D + d] - gm[al * D + ga] * Xa[be * D + d];
          if (s == 0.0)
            fixed_[cls] = std::max(fixed_[cls], std::abs(r[d]));
          else
            entries_[cls].push_back({r[d], s});
        }
      }
}

DefectReport DefectOperator::at(double k) const {
  DefectReport rep;
  rep.k = k;
  for (int cls = 0; cls < kDefectClasses; ++cls) {
    double worst = fixed_[cls];
    for (const auto& e : entries_[cls]) worst = std::max(worst, std::abs(e.r - k * e.s));
    rep.per_class[cls] = worst;
    rep.max = std::max(rep.max, worst);
  }
  return rep;
}

double DefectOperator::min_over(std::span<const double> ks) const {
  double best = INFINITY;
  for (double k : ks) best = std::min(best, at(k).max);
  return best;
}

DefectReport space_form_defect(const Chart& chart, const SpherePoint& sp, double a, double k) {
  return DefectOperator(chart, sp, a).at(k);
}

double terminal_identity_residual(const Chart& chart, const SpherePoint& sp) {
  auto loc = local_at(chart, sp.p, false);
  const int n = sp.dim();
  const auto& g = loc.f.base.g;
  const auto& gi = loc.f.base.ginv;
  const double r2 = sp.r * sp.r;
  auto d = [](int p, int q) { return p == q ? 1.0 : 0.0; };
  double worst = 0.0;
  for (int m = 0; m < n; ++m)
    for (int t = 0; t < n; ++t)
      for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int r = 0; r < n; ++r) {
              const double bracket =
                  gi[j * n + l] * (g[t * n + m] * d(i, r) - g[i * n + m] * d(t, r) + 2.0 * g[i * n + t] * d(m, r)) +
                  g[i * n + t] * (gi[j * n + r] * d(l, m) - gi[l * n + r] * d(j, m));
              const double val = -bracket / (2.0 * r2) + d(r, m) * d(l, t) * d(j, i) / (r2 * r2);
              worst = std::max(worst, std::abs(val));
            }
  return worst;
}

Lemma1Report lemma1_independence(const Chart& chart, const BundlePoint& p) {
  auto loc = local_at(chart, p, false);
  const int n = p.dim();
  const auto& g = loc.f.base.g;
  const auto& gi = loc.f.base.ginv;
  const auto& tb = loc.f.tbar;
  int N = 1;
  for (int q = 0; q < 8; ++q) N *= n;
  Eigen::MatrixXd M(4, N);
  auto d = [](int x, int y) { return x == y ? 1.0 : 0.0; };
  int col = 0;
  for (int m = 0; m < n; ++m)
    for (int nu = 0; nu < n; ++nu)
      for (int t = 0; t < n; ++t)
        for (int l = 0; l < n; ++l)
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
              for (int r = 0; r < n; ++r)
                for (int v = 0; v < n; ++v, ++col) {
                  M(0, col) = g[t * n + i] * gi[l * n + j] * d(m, r) * d(v, nu);
                  M(1, col) = g[nu * n + i] * gi[m * n + j] * d(l, r) * d(v, t);
                  M(2, col) = tb[m * n + nu] * tb[j * n + i] * d(l, r) * d(v, t);
                  M(3, col) = tb[l * n + t] * tb[j * n + i] * d(m, r) * d(v, nu);
                }
  auto rank_of = [](const Eigen::MatrixXd& m, double& smin) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    smin = s[s.size() - 1];
    int rank = 0;
    for (int q = 0; q < s.size(); ++q)
      if (s[q] > 1e-10 * s[0]) ++rank;
    return rank;
  };
  Lemma1Report rep;
  rep.rank4 = rank_of(M, rep.sigma_min4);
  Eigen::MatrixXd last = M.bottomRows(2);
  rep.rank2 = rank_of(last, rep.sigma_min2);
  return rep;
}

namespace {

std::vector<DefectScanRow> scan(const Chart& chart, const SpherePoint& sp, std::span<const double> as,
                                std::span<const double> ks, bool parallel) {
  const int na = static_cast<int>(as.size());
  const int nk = static_cast<int>(ks.size());
  std::vector<DefectScanRow> rows(static_cast<size_t>(na) * nk);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int ia = 0; ia < na; ++ia) {
    DefectOperator op(chart, sp, as[ia]);
    for (int ik = 0; ik < nk; ++ik) rows[static_cast<size_t>(ia) * nk + ik] = {as[ia], ks[ik], op.at(ks[ik])};
  }
  return rows;
}

}  // namespace

std::vector<DefectScanRow> defect_scan(const Chart& chart, const SpherePoint& sp, std::span<const double> a_values,
                                       std::span<const double> k_values) {
  return scan(chart, sp, a_values, k_values, true);
}

std::vector<DefectScanRow> defect_scan_serial(const Chart& chart, const SpherePoint& sp,
                                              std::span<const double> a_values, std::span<const double> k_values) {
  return scan(chart, sp, a_values, k_values, false);
}

// ---------------------------------------------------------------------------
// Paracontact candidate

ParacontactReport paracontact_verify(const Chart& chart, const CGParams& params, const StructureCoefficients& coeffs,
                                     const SpherePoint& sp) {
  auto loc = local_at(chart, sp.p, false);
  const int n = sp.dim();
  const int D = n + n * n;
  ParacontactReport rep;
  rep.stratum = stratum_defect(sp.p, coeffs.E);
  const Eigen::MatrixXd G = cg_metric_matrices(chart, params, sp.p).G;
  const Eigen::MatrixXd p = build_p(chart, coeffs, sp.p);
  const Eigen::MatrixXd P = build_P(chart, coeffs, sp.p);
  const auto fr = build_frame_fields(chart, coeffs, sp.p);
  auto Xa = detail::SphereFrameModel{1.0, sp.c()}.ambient<double>(loc.f);
  auto radial_of = [&](const Eigen::VectorXd& v) {
    return std::abs(radial(loc.f, std::span<const double>(v.data() + n, n * n))) / sp.r;
  };
  auto norm = [&](const Eigen::VectorXd& v) { return std::sqrt(std::max(0.0, v.dot(G * v))); };

  std::vector<Eigen::VectorXd> X(D);
  for (int al = 0; al < D; ++al) X[al] = Eigen::Map<const Eigen::VectorXd>(&Xa[al * D], D);
  const auto& xi = fr.xi;
  const auto& eta = fr.eta;
  rep.xi2_radial = radial_of(xi[1]);
  rep.eta_xi = std::abs(eta[0].dot(xi[0]) - 1.0);
  rep.p_xi = (p * xi[0]).cwiseAbs().maxCoeff();
  for (int al = 0; al < D; ++al) {
    const double nx = norm(X[al]);
    if (nx == 0.0) continue;
    rep.xi2_normality = std::max(rep.xi2_normality, std::abs(xi[1].dot(G * X[al])) / nx);
    rep.xi3_normality = std::max(rep.xi3_normality, std::abs(xi[2].dot(G * X[al])) / nx);
    const Eigen::VectorXd pX = p * X[al];
    rep.eta_p = std::max(rep.eta_p, std::abs(eta[0].dot(pX)));
    rep.p_tangent = std::max(rep.p_tangent, radial_of(pX));
    const Eigen::VectorXd sq = p * pX - X[al] + eta[0].dot(X[al]) * xi[0];
    rep.p_squared = std::max(rep.p_squared, sq.cwiseAbs().maxCoeff());
    rep.eta2_on_tangent = std::max(rep.eta2_on_tangent, std::abs(eta[1].dot(X[al])));
    rep.eta3_on_tangent = std::max(rep.eta3_on_tangent, std::abs(eta[2].dot(X[al])));
    const Eigen::VectorXd stated = P * X[al] - eta[0].dot(X[al]) * xi[0];
    rep.restricted_form = std::max(rep.restricted_form, (stated - pX).cwiseAbs().maxCoeff());
    for (int be = 0; be < D; ++be) {
      const Eigen::VectorXd pY = p * X[be];
      const double m = pX.dot(G * pY) - X[al].dot(G * X[be]) + eta[0].dot(X[al]) * eta[0].dot(X[be]);
      rep.metricity = std::max(rep.metricity, std::abs(m));
    }
  }
  return rep;
}

}  // namespace cgb
