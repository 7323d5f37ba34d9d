#include "doctest.h"

#include <cmath>

#include "cgbundle/detail/sphere_kernels.hpp"
#include "cgbundle/sphere_bundle.hpp"
#include "test_support.hpp"

using namespace cgb;
using cgbtest::max_abs;
using Block = CurvatureBlocks::Block;

namespace {

SpherePoint random_sphere_point(const Chart& chart, std::mt19937_64& rng, double r, double box = 0.6) {
  const int n = chart.dim();
  return SpherePoint::make(chart, cgbtest::random_point(rng, n, box), cgbtest::random_matrix(rng, n), r);
}

/// Metric with no symmetry, so the covariant derivative of its curvature does not vanish.
Chart lumpy_chart() {
  return Chart::from_closed_form(
      "lumpy", 2,
      [](auto x, auto g) {
        using S = std::decay_t<decltype(x[0])>;
        g[0] = S(1.0) + 0.3 * x[0] * x[0] + 0.1 * x[1];
        g[1] = 0.2 * x[0] * x[1];
        g[2] = 0.2 * x[0] * x[1];
        g[3] = S(1.0) + 0.4 * x[1] * x[1] * x[0] + 0.2 * x[0];
      },
      [](std::span<const double> x) { return std::abs(x[0]) < 0.8 && std::abs(x[1]) < 0.8; });
}

/// Brute-force G(A, B) = g_{ik} g^{jl} A^i_j B^k_l in double.
double fiber_pair(const std::vector<double>& g, const std::vector<double>& A, const std::vector<double>& B, int n) {
  auto gi = cgbtest::gauss_inverse(g, n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) acc += g[i * n + k] * gi[j * n + l] * A[i * n + j] * B[k * n + l];
  return acc;
}

std::vector<double> metric_at_x(const Chart& chart, const std::vector<double>& x) {
  auto m = metric_at(chart, x);
  const int n = chart.dim();
  std::vector<double> g(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g[i * n + j] = m.g(i, j);
  return g;
}

AdaptedVector random_tangent(const Chart& chart, const SpherePoint& sp, std::mt19937_64& rng) {
  const int n = sp.dim();
  auto h = cgbtest::random_point(rng, n, 1.0);
  auto v = tangential_lift(chart, cgbtest::random_matrix(rng, n), sp);
  v.h = h;
  return v;
}

}  // namespace

TEST_CASE("sphere points are renormalized onto tau = r^2") {
  std::mt19937_64 rng(11);
  auto chart = constant_curvature_chart(1.0, 2);
  for (double r : {0.5, 1.0, 2.0}) {
    auto sp = random_sphere_point(chart, rng, r);
    CHECK(sphere_defect(chart, sp) < 1e-12);
  }
  CHECK_THROWS_AS(SpherePoint::make(chart, {0.1, 0.1}, {0, 0, 0, 0}, 1.0), DomainError);
  CHECK_THROWS_AS(SpherePoint::make(chart, {0.1, 0.1}, {1, 0, 0, 1}, -1.0), DomainError);
}

TEST_CASE("tangential lift") {
  std::mt19937_64 rng(12);
  auto chart = constant_curvature_chart(-1.0, 3);
  auto sp = random_sphere_point(chart, rng, 1.3);
  SUBCASE("t lifts to zero") { CHECK(max_abs(tangential_lift(chart, sp.p.t, sp).v) < 1e-12); }
  SUBCASE("tensors orthogonal to t are unchanged") {
    auto A = cgbtest::random_matrix(rng, 3);
    auto g = metric_at_x(chart, sp.p.x);
    const double s = fiber_pair(g, A, sp.p.t, 3) / fiber_pair(g, sp.p.t, sp.p.t, 3);
    for (int q = 0; q < 9; ++q) A[q] -= s * sp.p.t[q];
    auto lift = tangential_lift(chart, A, sp);
    for (int q = 0; q < 9; ++q) CHECK(lift.v[q] == doctest::Approx(A[q]).epsilon(1e-12));
  }
  SUBCASE("random lifts are radially annihilated") {
    for (int it = 0; it < 50; ++it) {
      auto lift = tangential_lift(chart, cgbtest::random_matrix(rng, 3), sp);
      CHECK(radial_component(chart, sp, lift) < 1e-10);
    }
  }
}

TEST_CASE("induced metric does not depend on b") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ua(0.2, 2.0), ub(-0.15, 1.0);
  for (int n : {2, 3}) {
    auto chart = constant_curvature_chart(1.0, n);
    for (int it = 0; it < 25; ++it) {
      const double r = ua(rng);
      auto sp = random_sphere_point(chart, rng, r);
      const double a = ua(rng);
      const double b = ub(rng) * a / (r * r);  // keeps a + b r^2 > 0
      auto params = CGParams::constants(a, b);
      auto A = cgbtest::random_matrix(rng, n), B = cgbtest::random_matrix(rng, n);
      auto TA = tangential_lift(chart, A, sp), TB = tangential_lift(chart, B, sp);
      auto g = metric_at_x(chart, sp.p.x);
      const double c = 1.0 / (r * r);
      const double expected =
          a * (fiber_pair(g, A, B, n) - c * fiber_pair(g, sp.p.t, A, n) * fiber_pair(g, sp.p.t, B, n));
      CHECK(cg_inner(chart, params, sp.p, TA, TB) == doctest::Approx(expected).epsilon(1e-10));
      CHECK(induced_metric(chart, sp, a, TA, TB) == doctest::Approx(expected).epsilon(1e-10));
      auto HY = horizontal_lift(chart, cgbtest::random_point(rng, n, 1.0), sp.p);
      CHECK(std::abs(induced_metric(chart, sp, a, TA, HY)) < 1e-12);
    }
  }
}

TEST_CASE("closed-form brackets match coordinate brackets") {
  std::mt19937_64 rng(14);
  for (double k : {0.0, 1.0, -1.0}) {
    for (int n : {2, 3}) {
      auto chart = constant_curvature_chart(k, n);
      auto sp = random_sphere_point(chart, rng, 1.0 + 0.5 * n);
      const int D = n + n * n;
      auto model = chart.model(sp.p.x);
      std::vector<double> zero(n, 0.0);
      auto ref = detail::koszul(detail::SphereFrameModel{1.0, sp.c()}, model, std::span<const double>(zero),
                                std::span<const double>(sp.p.t));
      for (int al = 0; al < D; ++al)
        for (int be = 0; be < D; ++be) {
          auto br = sphere_bracket(chart, sp, al, be).flat();
          CHECK(radial_component(chart, sp, AdaptedVector::from_flat(br, n)) < 1e-10);
          for (int d = 0; d < D; ++d) CHECK(std::abs(br[d] - ref.brackets[(al * D + be) * D + d]) < 1e-10);
        }
    }
  }
  SUBCASE("flat base: horizontal brackets vanish") {
    auto chart = euclidean_chart(2);
    auto sp = random_sphere_point(chart, rng, 1.0);
    for (int l = 0; l < 2; ++l)
      for (int be = 0; be < 6; ++be) CHECK(max_abs(sphere_bracket(chart, sp, l, be).flat()) < 1e-14);
  }
  CHECK_THROWS_AS(sphere_bracket(euclidean_chart(2), random_sphere_point(euclidean_chart(2), rng, 1.0), 0, 6),
                  DomainError);
}

TEST_CASE("sphere connection: closed form against the Koszul oracle") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> ua(0.3, 2.0);
  SUBCASE("constant curvature and generic bases") {
    std::vector<Chart> charts = {euclidean_chart(2), constant_curvature_chart(1.0, 2),
                                 constant_curvature_chart(-1.0, 3), lumpy_chart()};
    for (const auto& chart : charts)
      for (int it = 0; it < 4; ++it) {
        auto sp = random_sphere_point(chart, rng, ua(rng));
        const double a = ua(rng);
        auto closed = sphere_connection_closed(chart, sp, a);
        auto oracle = sphere_connection_koszul(chart, sp, a);
        CHECK(closed.max_diff(oracle) < 1e-8);
        auto res = sphere_connection_residuals(chart, sp, a, closed);
        CHECK(res.torsion < 1e-8);
        CHECK(res.compatibility < 1e-8);
        CHECK(res.tangency < 1e-10);
      }
  }
  SUBCASE("oracle residuals at 100 points") {
    auto chart = constant_curvature_chart(1.0, 2);
    for (int it = 0; it < 100; ++it) {
      auto sp = random_sphere_point(chart, rng, ua(rng));
      const double a = ua(rng);
      auto res = sphere_connection_residuals(chart, sp, a, sphere_connection_koszul(chart, sp, a));
      CHECK(res.torsion < 1e-8);
      CHECK(res.compatibility < 1e-8);
    }
  }
  SUBCASE("flat base: only the tangential-tangential family survives") {
    auto chart = euclidean_chart(2);
    auto sp = random_sphere_point(chart, rng, 1.7);
    auto conn = sphere_connection_closed(chart, sp, 0.8);
    const int n = 2, D = 6;
    const double c = sp.c();
    auto tb = tbar(chart, sp.p);
    for (int al = 0; al < D; ++al)
      for (int be = 0; be < D; ++be)
        for (int d = 0; d < D; ++d) {
          double expected = 0.0;
          if (al >= n && be >= n && d >= n) {
            // -c tbar^j_i e^T_A for B = (i, j), expanded in ambient components
            const int A = al - n, B = be - n, C = d - n;
            const double nB = tb(B % n, B / n);
            const double nC = tb(C % n, C / n);
            expected = -c * nB * ((A == C ? 1.0 : 0.0) - c * nC * sp.p.t[A]);
          }
          CHECK(std::abs(conn(al, be, d) - expected) < 1e-12);
        }
  }
  CHECK_THROWS_AS(sphere_connection_closed(euclidean_chart(2), random_sphere_point(euclidean_chart(2), rng, 1.0), 0.0),
                  ParamError);
}

TEST_CASE("curvature: closed form against the oracle") {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> ua(0.4, 1.8);
  std::vector<Chart> charts = {euclidean_chart(2), constant_curvature_chart(1.0, 2), lumpy_chart(),
                               constant_curvature_chart(-1.0, 3)};
  for (const auto& chart : charts) {
    auto sp = random_sphere_point(chart, rng, chart.dim() == 3 ? std::sqrt(3.0) : 1.0);
    const double a = ua(rng);
    auto R = curvature_blocks(chart, sp, a);
    auto O = curvature_blocks_oracle(chart, sp, a);
    for (auto b : kAllCurvatureBlocks) {
      INFO(chart.name(), " ", block_name(b));
      CHECK(R.block_max_diff(O, b) < 1e-6);
    }
    const int D = O.frame_dim();
    // antisymmetry and pair symmetry on the oracle
    double anti = 0.0, pair = 0.0;
    for (int al = 0; al < D; ++al)
      for (int be = 0; be < D; ++be)
        for (int ga = 0; ga < D; ++ga)
          for (int d = 0; d < D; ++d) anti = std::max(anti, std::abs(O(al, be, ga, d) + O(be, al, ga, d)));
    std::vector<AdaptedVector> X;
    for (int al = 0; al < D; ++al) {
      auto e = AdaptedVector::zero(chart.dim());
      std::vector<double> flat(D, 0.0);
      flat[al] = 1.0;
      X.push_back(project_tangent(chart, sp, AdaptedVector::from_flat(flat, chart.dim())));
    }
    for (int it = 0; it < 40; ++it) {
      auto U = random_tangent(chart, sp, rng), V = random_tangent(chart, sp, rng);
      auto W = random_tangent(chart, sp, rng), Z = random_tangent(chart, sp, rng);
      const double lhs = induced_metric(chart, sp, a, O.apply(U, V, W), Z);
      const double rhs = induced_metric(chart, sp, a, O.apply(W, Z, U), V);
      pair = std::max(pair, std::abs(lhs - rhs));
    }
    CHECK(anti < 1e-9);
    CHECK(pair < 1e-6);
  }
}

TEST_CASE("flat base curvature: only the tangential block survives") {
  std::mt19937_64 rng(17);
  auto chart = euclidean_chart(2);
  auto sp = random_sphere_point(chart, rng, 1.4);
  auto R = curvature_blocks(chart, sp, 0.7);
  for (auto b : kAllCurvatureBlocks)
    if (b != Block::TTTT) CHECK(R.block_max_abs(b) < 1e-12);
  CHECK(R.block_max_abs(Block::TTTT) > 1e-2);
  CHECK(R.block_max_diff(tttt_formula(chart, sp, TTTTReading::corrected), Block::TTTT) < 1e-12);
  CHECK(R.block_max_diff(tttt_formula(chart, sp, TTTTReading::printed), Block::TTTT) > 1e-2);
}

TEST_CASE("tangential block formula holds on curved bases") {
  std::mt19937_64 rng(18);
  for (const auto& chart : {constant_curvature_chart(1.0, 2), lumpy_chart(), constant_curvature_chart(-1.0, 3)}) {
    auto sp = random_sphere_point(chart, rng, 1.1);
    auto O = curvature_blocks_oracle(chart, sp, 0.9);
    CHECK(O.block_max_diff(tttt_formula(chart, sp, TTTTReading::corrected), Block::TTTT) < 1e-8);
  }
}

TEST_CASE("blocks linear in the derivative of the base curvature") {
  std::mt19937_64 rng(19);
  auto chart = lumpy_chart();
  auto sp = random_sphere_point(chart, rng, 1.2);
  const double a = 0.85;
  auto O = curvature_blocks_oracle(chart, sp, a);
  auto F = nabla_r_formulas(chart, sp, a);
  CHECK(F.block_max_abs(Block::HHHT) > 1e-3);
  CHECK(O.block_max_diff(F, Block::HHHT) < 1e-8);
  CHECK(O.block_max_diff(F, Block::HHTH) < 1e-8);
  CHECK(O.block_max_diff(F, Block::HTHH) < 1e-8);
  auto flat_like = constant_curvature_chart(1.0, 2);
  auto sp2 = random_sphere_point(flat_like, rng, 1.2);
  auto F2 = nabla_r_formulas(flat_like, sp2, a);
  CHECK(F2.block_max_abs(Block::HHHT) < 1e-10);
  CHECK(F2.block_max_abs(Block::HTHH) < 1e-10);
}

TEST_CASE("sectional curvature") {
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> ua(0.3, 2.0);
  auto chart = euclidean_chart(2);
  for (int it = 0; it < 5; ++it) {
    const double r = ua(rng), a = ua(rng);
    auto sp = random_sphere_point(chart, rng, r);
    auto R = curvature_blocks(chart, sp, a);
    auto U = tangential_lift(chart, cgbtest::random_matrix(rng, 2), sp);
    auto V = tangential_lift(chart, cgbtest::random_matrix(rng, 2), sp);
    CHECK(sectional_curvature(R, chart, sp, a, U, V) == doctest::Approx(1.0 / (a * r * r)).epsilon(1e-8));
    auto H1 = horizontal_lift(chart, std::vector<double>{1.0, 0.3}, sp.p);
    auto H2 = horizontal_lift(chart, std::vector<double>{-0.2, 1.0}, sp.p);
    CHECK(std::abs(sectional_curvature(R, chart, sp, a, H1, H2)) < 1e-12);
    CHECK(std::abs(sectional_curvature(R, chart, sp, a, H1, U)) < 1e-12);
  }
  SUBCASE("re-basing invariance") {
    auto curved = constant_curvature_chart(1.0, 3);
    auto sp = random_sphere_point(curved, rng, 1.5);
    const double a = 0.7;
    auto R = curvature_blocks(curved, sp, a);
    auto U = random_tangent(curved, sp, rng), V = random_tangent(curved, sp, rng);
    const double K = sectional_curvature(R, curved, sp, a, U, V);
    std::normal_distribution<double> nd;
    for (int it = 0; it < 20; ++it) {
      double m00 = nd(rng), m01 = nd(rng), m10 = nd(rng), m11 = nd(rng);
      if (std::abs(m00 * m11 - m01 * m10) < 0.1) continue;
      auto comb = [&](double p, double q) {
        auto out = AdaptedVector::from_flat(U.flat(), 3);
        auto uf = U.flat(), vf = V.flat();
        std::vector<double> w(uf.size());
        for (size_t s = 0; s < w.size(); ++s) w[s] = p * uf[s] + q * vf[s];
        return AdaptedVector::from_flat(w, 3);
      };
      const double K2 = sectional_curvature(R, curved, sp, a, comb(m00, m01), comb(m10, m11));
      CHECK(std::abs(K2 - K) <= 1e-8 * std::max(1.0, std::abs(K)));
    }
  }
  SUBCASE("degenerate plane") {
    auto sp = random_sphere_point(chart, rng, 1.0);
    auto U = tangential_lift(chart, cgbtest::random_matrix(rng, 2), sp);
    CHECK_THROWS_AS(sectional_curvature(chart, sp, 1.0, U, U), DomainError);
  }
}

TEST_CASE("space-form defect") {
  std::mt19937_64 rng(21);
  const auto ttt = static_cast<int>(DefectClass::TTT);
  SUBCASE("flat base at k = 1/(a r^2)") {
    auto chart = euclidean_chart(2);
    const double r = 1.3, a = 0.8;
    auto sp = random_sphere_point(chart, rng, r);
    auto rep = space_form_defect(chart, sp, a, 1.0 / (a * r * r));
    CHECK(rep.per_class[ttt] < 1e-9);
    CHECK(rep.max > 1e-3);
    auto zero = space_form_defect(chart, sp, a, 0.0);
    CHECK(zero.per_class[ttt] > 1e-3);
  }
  SUBCASE("curved base: the tangential identity is base independent") {
    auto chart = constant_curvature_chart(-1.0, 3);
    const double r = std::sqrt(3.0), a = 1.0;
    auto sp = random_sphere_point(chart, rng, r);
    auto rep = space_form_defect(chart, sp, a, 1.0 / (a * r * r));
    CHECK(rep.per_class[ttt] < 1e-9);
    CHECK(rep.max > 1e-3);
  }
  SUBCASE("terminal identity at t proportional to the identity") {
    auto chart = constant_curvature_chart(1.0, 2);
    const double r = 1.0;
    const double s = r / std::sqrt(2.0);
    auto sp = SpherePoint::make(chart, {0.2, -0.1}, {s, 0, 0, s}, r);
    CHECK(terminal_identity_residual(chart, sp) > 0.1);
    auto rep = space_form_defect(chart, sp, 1.0 / (r * r), 1.0);
    CHECK(rep.per_class[static_cast<int>(DefectClass::THT)] > 1e-3);
  }
  SUBCASE("parallel scan equals the serial reference") {
    auto chart = constant_curvature_chart(1.0, 2);
    auto sp = random_sphere_point(chart, rng, 1.0);
    std::vector<double> as = {1.0, 0.5, 2.0, 0.25}, ks = {-1.0, 0.0, 0.5, 1.0, 4.0};
    auto par = defect_scan(chart, sp, as, ks);
    auto ser = defect_scan_serial(chart, sp, as, ks);
    REQUIRE(par.size() == ser.size());
    for (size_t q = 0; q < par.size(); ++q) {
      CHECK(par[q].a == ser[q].a);
      CHECK(par[q].k == ser[q].k);
      CHECK(par[q].report.max == ser[q].report.max);
    }
    DefectOperator op(chart, sp, 2.0);
    for (double k : ks) CHECK(op.at(k).max == space_form_defect(chart, sp, 2.0, k).max);
  }
}

TEST_CASE("independence of the four index tensors") {
  std::mt19937_64 rng(22);
  auto chart = euclidean_chart(2);
  for (int it = 0; it < 10; ++it) {
    BundlePoint p{cgbtest::random_point(rng, 2, 0.5), cgbtest::random_matrix(rng, 2)};
    auto rep = lemma1_independence(chart, p);
    CHECK(rep.rank4 == 4);
    CHECK(rep.rank2 == 2);
  }
  auto curved = constant_curvature_chart(1.0, 3);
  BundlePoint q{{0.1, 0.2, -0.3}, cgbtest::random_matrix(rng, 3)};
  CHECK(lemma1_independence(curved, q).rank4 == 4);
  // Regression baseline at t = I on the Euclidean plane (frozen, not derived).
  BundlePoint id{{0.0, 0.0}, {1, 0, 0, 1}};
  auto rep = lemma1_independence(chart, id);
  CHECK(rep.rank4 == 4);
  CHECK(rep.rank2 == 2);
}

TEST_CASE("induced paracontact candidate") {
  std::mt19937_64 rng(23);
  const double r = 1.0;
  auto params = CGParams::classic();
  for (const auto& chart : {euclidean_chart(2), constant_curvature_chart(1.0, 2)}) {
    std::vector<double> E = {1.0, 0.4};
    auto raw = project_to_stratum(chart, BundlePoint{{0.1, -0.2}, cgbtest::random_matrix(rng, 2)}, E);
    auto sp = SpherePoint::make(chart, raw.x, raw.t, r);
    auto coeffs = canonical_coeffs_at(chart, params, sp.p, E);
    auto rep = paracontact_verify(chart, params, coeffs, sp);
    CHECK(rep.stratum < 1e-12);
    CHECK(rep.xi3_normality < 1e-10);
    CHECK(rep.eta_xi < 1e-12);
    CHECK(rep.p_xi < 1e-12);
    CHECK(rep.eta_p < 1e-12);
    CHECK(rep.p_tangent < 1e-12);
    CHECK(rep.eta3_on_tangent < 1e-12);
    // xi_2 lies in the sphere on this stratum, so eta^2 survives on tangent
    // vectors and the square and metric identities pick up eta^2 (x) xi_2.
    CHECK(rep.xi2_radial < 1e-12);
    CHECK(rep.xi2_normality > 1e-2);
    CHECK(rep.eta2_on_tangent > 1e-2);
    CHECK(rep.p_squared > 1e-2);
    CHECK(rep.metricity > 1e-2);
    CHECK(rep.restricted_form > 1e-2);

    auto fr = build_frame_fields(chart, coeffs, sp.p);
    const auto G = cg_metric_matrices(chart, params, sp.p).G;
    for (int it = 0; it < 100; ++it) {
      auto T = random_tangent(chart, sp, rng).flat();
      Eigen::Map<const Eigen::VectorXd> Tv(T.data(), static_cast<long>(T.size()));
      CHECK(std::abs(fr.xi[2].dot(G * Tv)) < 1e-10);
    }
  }
}
