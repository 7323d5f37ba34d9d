#include "cgbundle/framed_structures.hpp"

#include <cmath>

namespace cgb {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Ctx {
  int n = 0, nn = 0, D = 0;
  Mat g, ginv;
  Vec E, El;     // E^i and E_i = g_ij E^j
  double E2 = 0;  // |E|^2
  Vec normal;    // tbar^r_v at A = (v, r)
  Vec t;
  double tau = 0;
};

Ctx context(const Chart& chart, const BundlePoint& p, std::span<const double> E) {
  Ctx c;
  c.n = p.dim();
  c.nn = c.n * c.n;
  c.D = c.n + c.nn;
  if (static_cast<int>(E.size()) != c.n) throw StructureError("E has the wrong dimension");
  auto m = metric_at(chart, p.x);
  c.g = m.g;
  c.ginv = m.g_inv;
  c.E = Eigen::Map<const Vec>(E.data(), c.n);
  c.El = c.g * c.E;
  c.E2 = c.E.dot(c.El);
  if (!(c.E2 > 0.0)) throw StructureError("E vanishes at the evaluated point");
  auto tb = tbar(chart, p);
  c.normal.resize(c.nn);
  for (int v = 0; v < c.n; ++v)
    for (int r = 0; r < c.n; ++r) c.normal[v * c.n + r] = tb(r, v);
  c.t = Eigen::Map<const Vec>(p.t.data(), c.nn);
  c.tau = c.normal.dot(c.t);
  return c;
}

/// Row-major n x n view of the vertical part.
Mat vertical_matrix(const Ctx& c, const Vec& X) {
  Mat V(c.n, c.n);
  for (int i = 0; i < c.n; ++i)
    for (int j = 0; j < c.n; ++j) V(i, j) = X[c.n + i * c.n + j];
  return V;
}

void set_vertical(const Ctx& c, Vec& X, const Mat& V) {
  for (int i = 0; i < c.n; ++i)
    for (int j = 0; j < c.n; ++j) X[c.n + i * c.n + j] = V(i, j);
}

Vec apply_P(const Ctx& c, const StructureCoefficients& k, const Vec& X) {
  Vec out = Vec::Zero(c.D);
  Vec h = X.head(c.n);
  Mat V = vertical_matrix(c, X);
  Vec y = V * c.E / c.E2;
  Mat rest = V - y * c.El.transpose();
  out.head(c.n) = k.c2 * y + k.d2 * y.dot(c.El) * c.E;
  Vec w = k.c1 * h + k.d1 * h.dot(c.El) * c.E;
  set_vertical(c, out, w * c.El.transpose() + rest);
  return out;
}

FrameFields fields(const Ctx& c, const StructureCoefficients& k) {
  FrameFields f;
  for (auto& x : f.xi) x = Vec::Zero(c.D);
  for (auto& e : f.eta) e = Vec::Zero(c.D);
  f.xi[0].head(c.n) = k.alpha * c.E;
  set_vertical(c, f.xi[1], k.beta * c.E * c.El.transpose());
  f.xi[2].tail(c.nn) = k.kappa * c.t;
  f.eta[0].head(c.n) = k.gamma * c.El;
  set_vertical(c, f.eta[1], k.lambda * c.El * c.E.transpose());
  f.eta[2].tail(c.nn) = k.rho * c.normal;
  return f;
}

Mat operator_p(const Ctx& c, const StructureCoefficients& k) {
  Mat P(c.D, c.D);
  for (int j = 0; j < c.D; ++j) P.col(j) = apply_P(c, k, Vec::Unit(c.D, j));
  auto f = fields(c, k);
  return P - f.xi[1] * f.eta[0].transpose() - f.xi[0] * f.eta[1].transpose() - f.xi[2] * f.eta[2].transpose();
}

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

void verify_canonical(const StructureCoefficients& c, double a, double normE, double tau, double b_tau) {
  const double E2 = normE * normE;
  const double w = a + b_tau;
  const double scale = 1.0 + std::abs(c.c1) + std::abs(c.c2) + std::abs(c.d1) + std::abs(c.d2) +
                       std::abs(c.alpha) + std::abs(c.beta) + std::abs(c.kappa) + std::abs(c.rho);
  const double res[] = {
      c.c1 * std::sqrt(a) * normE - 1.0,
      c.c2 - normE * std::sqrt(a),
      c.d1 * std::sqrt(a) * normE * E2 + 2.0,
      c.d2 * normE + 2.0 * std::sqrt(a),
      c.alpha * c.gamma * E2 - 1.0,
      c.beta * c.lambda * E2 * E2 - 1.0,
      c.kappa * c.rho * tau - 1.0,
      c.lambda - c.gamma / E2 * (c.c2 + c.d2 * E2),
      c.gamma - c.alpha,
      c.lambda - a * c.beta,
      c.rho - c.kappa * w,
  };
  for (double r : res)
    if (!(std::abs(r) <= 1e-12 * scale)) throw StructureError("canonical coefficients failed substitution check");
}

}  // namespace

StructureCoefficients canonical_coeffs(double a, double normE, double tau, double b_tau, SignBranch branch) {
  if (!(a > 0.0)) throw StructureError("canonical coefficients need a > 0");
  if (!(normE > 0.0)) throw StructureError("canonical coefficients need |E| > 0");
  if (!(tau > 0.0)) throw StructureError("infeasible: kappa * rho * tau = 1 has no solution at tau = 0");
  if (!(a + b_tau > 0.0)) throw StructureError("canonical coefficients need a + b*tau > 0");
  const double sa = std::sqrt(a);
  StructureCoefficients c;
  c.c1 = 1.0 / (sa * normE);
  c.c2 = sa * normE;
  c.d1 = -2.0 / (sa * normE * normE * normE);
  c.d2 = -2.0 * sa / normE;
  const double sign = branch == SignBranch::positive_beta ? 1.0 : -1.0;
  c.alpha = -sign / normE;
  c.gamma = c.alpha;
  c.beta = sign / (sa * normE * normE);
  c.lambda = a * c.beta;
  c.kappa = 1.0 / std::sqrt((a + b_tau) * tau);
  c.rho = c.kappa * (a + b_tau);
  verify_canonical(c, a, normE, tau, b_tau);
  return c;
}

StructureCoefficients canonical_coeffs_at(const Chart& chart, const CGParams& params, const BundlePoint& p,
                                          std::span<const double> E, SignBranch branch) {
  auto ctx = context(chart, p, E);
  params.check(ctx.tau);
  auto c = canonical_coeffs(params.a(ctx.tau), std::sqrt(ctx.E2), ctx.tau, params.b(ctx.tau) * ctx.tau, branch);
  c.E.assign(E.begin(), E.end());
  return c;
}

void complete_product_coeffs(StructureCoefficients& c, double normE) {
  const double E2 = normE * normE;
  if (c.c1 == 0.0 || c.c1 + c.d1 * E2 == 0.0) throw StructureError("product conditions are not solvable");
  c.c2 = 1.0 / c.c1;
  c.d2 = (1.0 / (c.c1 + c.d1 * E2) - c.c2) / E2;
}

double product_condition_residual(const StructureCoefficients& c, double normE) {
  const double E2 = normE * normE;
  return std::max(std::abs(c.c1 * c.c2 - 1.0), std::abs((c.c1 + c.d1 * E2) * (c.c2 + c.d2 * E2) - 1.0));
}

BundlePoint project_to_stratum(const Chart& chart, const BundlePoint& p, std::span<const double> E) {
  auto ctx = context(chart, p, E);
  Mat T = vertical_matrix(ctx, [&] {
    Vec X = Vec::Zero(ctx.D);
    X.tail(ctx.nn) = ctx.t;
    return X;
  }());
  Mat proj = T - (T * ctx.E) * ctx.El.transpose() / ctx.E2;
  BundlePoint out = p;
  for (int i = 0; i < ctx.n; ++i)
    for (int j = 0; j < ctx.n; ++j) out.t[i * ctx.n + j] = proj(i, j);
  return out;
}

double stratum_defect(const BundlePoint& p, std::span<const double> E) {
  const int n = p.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += p.t[i * n + j] * E[j];
    worst = std::max(worst, std::abs(acc));
  }
  return worst;
}

Eigen::MatrixXd build_P(const Chart& chart, const StructureCoefficients& c, const BundlePoint& p) {
  auto ctx = context(chart, p, c.E);
  Mat P(ctx.D, ctx.D);
  for (int j = 0; j < ctx.D; ++j) P.col(j) = apply_P(ctx, c, Vec::Unit(ctx.D, j));
  return P;
}

FrameFields build_frame_fields(const Chart& chart, const StructureCoefficients& c, const BundlePoint& p) {
  return fields(context(chart, p, c.E), c);
}

Eigen::MatrixXd build_p(const Chart& chart, const StructureCoefficients& c, const BundlePoint& p) {
  return operator_p(context(chart, p, c.E), c);
}

Eigen::MatrixXd build_p_local(const Chart& chart, const StructureCoefficients& c, const BundlePoint& p) {
  auto ctx = context(chart, p, c.E);
  const int n = ctx.n;
  Mat out = Mat::Zero(ctx.D, ctx.D);
  // p(e_i): vertical (c1 delta_i^v + (d1 - beta gamma) E_i E^v) E_r at (v, r).
  for (int i = 0; i < n; ++i)
    for (int v = 0; v < n; ++v)
      for (int r = 0; r < n; ++r)
        out(n + v * n + r, i) = (c.c1 * (i == v) + (c.d1 - c.beta * c.gamma) * ctx.El[i] * ctx.E[v]) * ctx.El[r];
  // p(V(e_k (x) E~)): horizontal (c2 delta_k^r + (d2 - alpha lambda |E|^2) E_k E^r).
  Mat pF = Mat::Zero(ctx.D, n);
  for (int k = 0; k < n; ++k)
    for (int r = 0; r < n; ++r)
      pF(r, k) = c.c2 * (k == r) + (c.d2 - c.alpha * c.lambda * ctx.E2) * ctx.El[k] * ctx.E[r];
  // e_(i,j) = y (x) E~ + rest with y = e_i E^j / |E|^2; rest maps to rest - kappa rho G(t, rest) t.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int A = i * n + j;
      Vec y = Vec::Zero(n);
      y[i] = ctx.E[j] / ctx.E2;
      Mat U = Mat::Zero(n, n);
      U(i, j) = 1.0;
      Mat rest = U - y * ctx.El.transpose();
      Vec col = pF * y;
      Vec restv = Vec::Zero(ctx.D);
      set_vertical(ctx, restv, rest);
      const double radial = ctx.normal.dot(restv.tail(ctx.nn));
      col += restv;
      col.tail(ctx.nn) -= c.kappa * c.rho * radial * ctx.t;
      out.col(n + A) = col;
    }
  return out;
}

RankInfo numerical_rank(const Eigen::MatrixXd& m, double rel_tol) {
  Eigen::JacobiSVD<Mat> svd(m);
  RankInfo info;
  info.singular_values = svd.singularValues();
  const double smax = info.singular_values.size() ? info.singular_values[0] : 0.0;
  double smallest_kept = smax;
  for (int i = 0; i < info.singular_values.size(); ++i) {
    if (info.singular_values[i] < rel_tol * smax)
      ++info.corank;
    else
      smallest_kept = info.singular_values[i];
  }
  info.gap = smax > 0 ? smallest_kept / smax : 0.0;
  return info;
}

F31Report f31_verify(const Chart& chart, const CGParams& params, const StructureCoefficients& c,
                     const BundlePoint& p) {
  auto ctx = context(chart, p, c.E);
  const int D = ctx.D;
  const Mat I = Mat::Identity(D, D);
  const double E2 = ctx.E2;
  const double tau = ctx.tau;
  const double a = params.a(tau);
  const double b = params.b(tau);
  Mat G = cg_metric_matrices(chart, params, p).G;
  Mat P = build_P(chart, c, p);
  auto f = fields(ctx, c);
  const auto& xi = f.xi;
  const auto& eta = f.eta;
  Mat pm = operator_p(ctx, c);

  F31Report r;
  r.stratum = stratum_defect(p, c.E);
  r.P2_minus_I = max_abs(P * P - I);
  r.theorem2_isometry = max_abs(P.transpose() * G * P - G);
  Vec m = Vec::Zero(D);
  m.tail(ctx.nn) = ctx.normal;
  Vec Pm = P.transpose() * m;
  r.theorem2_b_coupling = max_abs(P.transpose() * G * P - G - b * (Pm * Pm.transpose() - m * m.transpose()));

  const double ct1 = c.c1 + c.d1 * E2;
  const double ct2 = c.c2 + c.d2 * E2;
  r.relations_P_xi = std::max({max_abs(P * xi[0] - c.alpha / c.beta * ct1 * xi[1]),
                               max_abs(P * xi[1] - c.beta / c.alpha * ct2 * xi[0]), max_abs(P * xi[2] - xi[2])});
  r.relations_eta_P = std::max({max_abs(P.transpose() * eta[0] - c.gamma / (c.lambda * E2) * ct2 * eta[1]),
                                max_abs(P.transpose() * eta[1] - c.lambda * E2 / c.gamma * ct1 * eta[0]),
                                max_abs(P.transpose() * eta[2] - eta[2])});
  const double diag[3] = {c.alpha * c.gamma * E2, c.beta * c.lambda * E2 * E2, c.kappa * c.rho * tau};
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) {
      const double v = eta[k].dot(xi[l]);
      r.eta_xi_pairings = std::max(r.eta_xi_pairings, std::abs(v - (k == l ? diag[k] : 0.0)));
      r.eta_duality = std::max(r.eta_duality, std::abs(v - (k == l ? 1.0 : 0.0)));
    }

  const double s1 = c.c1 + (c.d1 - c.beta * c.gamma) * E2;
  const double s2 = c.c2 + (c.d2 - c.alpha * c.lambda * E2) * E2;
  const double s3 = 1.0 - c.kappa * c.rho * tau;
  r.lemma2_p_xi = std::max({max_abs(pm * xi[0] - c.alpha / c.beta * s1 * xi[1]),
                            max_abs(pm * xi[1] - c.beta / c.alpha * s2 * xi[0]), max_abs(pm * xi[2] - s3 * xi[2])});
  r.lemma2_eta_p = std::max({max_abs(pm.transpose() * eta[0] - c.gamma / (c.lambda * E2) * s2 * eta[1]),
                             max_abs(pm.transpose() * eta[1] - c.lambda * E2 / c.gamma * s1 * eta[0]),
                             max_abs(pm.transpose() * eta[2] - s3 * eta[2])});
  const double k1 = c.beta / c.alpha * ct2 + c.lambda * E2 / c.gamma * ct1 - c.beta * c.lambda * E2 * E2;
  const double k2 = c.alpha / c.beta * ct1 + c.gamma / (c.lambda * E2) * ct2 - c.alpha * c.gamma * E2;
  Mat expand = I - k1 * xi[0] * eta[0].transpose() - k2 * xi[1] * eta[1].transpose() +
               (c.kappa * c.rho * tau - 2.0) * xi[2] * eta[2].transpose();
  r.lemma2_p_squared = max_abs(pm * pm - expand);

  r.p3_minus_p = max_abs(pm * pm * pm - pm);
  Mat frame = I;
  for (int k = 0; k < 3; ++k) frame -= xi[k] * eta[k].transpose();
  r.p2_frame_identity = max_abs(pm * pm - frame);
  for (int k = 0; k < 3; ++k) {
    r.p_of_xi = std::max(r.p_of_xi, max_abs(pm * xi[k]));
    r.eta_after_p = std::max(r.eta_after_p, max_abs(pm.transpose() * eta[k]));
  }
  r.rank = numerical_rank(pm);

  Mat metric = pm.transpose() * G * pm - G;
  Mat lemma4 = metric;
  for (int k = 0; k < 3; ++k) metric += eta[k] * eta[k].transpose();
  r.metricity = max_abs(metric);
  r.lemma4_coeffs = {a * c.beta * (2.0 * ct1 / c.gamma - c.beta * E2) * E2,
                     c.alpha * (2.0 * ct2 / (c.lambda * E2) - c.alpha * E2),
                     c.kappa * (a + b * tau) * (2.0 / c.rho - c.kappa * tau)};
  for (int k = 0; k < 3; ++k) lemma4 += r.lemma4_coeffs[k] * eta[k] * eta[k].transpose();
  r.lemma4_identity = max_abs(lemma4);
  r.local_vs_operator = max_abs(build_p_local(chart, c, p) - pm);
  return r;
}

}  // namespace cgb
