#include "doctest.h"

#include "cgbundle/base_geometry.hpp"
#include "test_support.hpp"

using namespace cgb;
using cgbtest::max_abs;

namespace {

double cc_residual(const CurvatureField& R, const MetricAt& m, double k) {
  const int n = R.n;
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int l = 0; l < n; ++l)
      for (int j = 0; j < n; ++j)
        for (int r = 0; r < n; ++r) {
          double expect = k * (m.g(l, j) * (a == r) - m.g(a, j) * (l == r));
          worst = std::max(worst, std::abs(R(a, l, j, r) - expect));
        }
  return worst;
}

}  // namespace

TEST_CASE("euclidean chart is flat") {
  auto chart = euclidean_chart(2);
  std::vector<double> x{0.3, -1.7};
  auto m = metric_at(chart, x);
  CHECK(m.g.isApprox(Eigen::MatrixXd::Identity(2, 2)));
  CHECK(max_abs(m.jets.dg) == 0.0);
  CHECK(max_abs(m.jets.d2g) == 0.0);
  CHECK(max_abs(m.jets.d3g) == 0.0);
  auto gam = christoffel_at(chart, x);
  CHECK(max_abs(gam.values) == 0.0);
  auto R = curvature_at(chart, x);
  CHECK(max_abs(R.values) == 0.0);
  CHECK(max_abs(R.nabla) == 0.0);
}

TEST_CASE("constant curvature chart is normalized at its center") {
  auto chart = constant_curvature_chart(1.0, 2);
  std::vector<double> o{0.0, 0.0};
  auto m = metric_at(chart, o);
  CHECK((m.g - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  auto flat = constant_curvature_chart(0.0, 3);
  std::vector<double> x{0.4, 0.1, -2.0};
  CHECK(max_abs(metric_at(flat, x).jets.dg) == 0.0);
  CHECK(flat.name() == "euclidean");
}

TEST_CASE("inverse metric matches Gaussian elimination") {
  std::mt19937_64 rng(7);
  auto chart = constant_curvature_chart(1.0, 3);
  for (int s = 0; s < 20; ++s) {
    auto x = cgbtest::random_point(rng, 3, 1.0);
    auto m = metric_at(chart, x);
    auto oracle = cgbtest::gauss_inverse(m.jets.g, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(m.g_inv(i, j) == doctest::Approx(oracle[i * 3 + j]).epsilon(1e-12));
    CHECK((m.g * m.g_inv - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("jets agree with central differences") {
  std::mt19937_64 rng(11);
  const double h = 1e-4;
  for (double k : {1.0, -1.0}) {
    auto chart = constant_curvature_chart(k, 2);
    for (int s = 0; s < 10; ++s) {
      auto x = cgbtest::random_point(rng, 2, 0.8);
      auto jet = chart.jets(x);
      for (int m = 0; m < 2; ++m) {
        auto xp = x, xm = x;
        xp[m] += h;
        xm[m] -= h;
        auto jp = chart.jets(xp), jm = chart.jets(xm);
        for (int q = 0; q < 4; ++q) {
          double fd = (jp.g[q] - jm.g[q]) / (2 * h);
          CHECK(std::abs(fd - jet.dg[m * 4 + q]) <= 1e-5 * std::max(1.0, std::abs(fd)));
        }
        for (int q = 0; q < 8; ++q) {
          double fd = (jp.dg[q] - jm.dg[q]) / (2 * h);
          CHECK(std::abs(fd - jet.d2g[m * 8 + q]) <= 1e-5 * std::max(1.0, std::abs(fd)));
        }
        for (int q = 0; q < 16; ++q) {
          double fd = (jp.d2g[q] - jm.d2g[q]) / (2 * h);
          CHECK(std::abs(fd - jet.d3g[m * 16 + q]) <= 1e-5 * std::max(1.0, std::abs(fd)));
        }
      }
    }
  }
}

TEST_CASE("christoffel symbols: symmetry and finite-difference Koszul oracle") {
  std::mt19937_64 rng(3);
  auto chart = constant_curvature_chart(1.0, 3);
  for (int s = 0; s < 10; ++s) {
    auto x = cgbtest::random_point(rng, 3, 1.0);
    auto gam = christoffel_at(chart, x);
    auto fd = cgbtest::fd_christoffel(1.0, x);
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          CHECK(gam(k, i, j) == gam(k, j, i));
          CHECK(gam(k, i, j) == doctest::Approx(fd[(k * 3 + i) * 3 + j]).epsilon(1e-6));
        }
  }
}

TEST_CASE("christoffel derivatives agree with differences of christoffel") {
  std::mt19937_64 rng(5);
  auto chart = constant_curvature_chart(-1.0, 2);
  auto x = cgbtest::random_point(rng, 2, 0.5);
  auto gam = christoffel_at(chart, x);
  const double h = 1e-5;
  for (int m = 0; m < 2; ++m) {
    auto xp = x, xm = x;
    xp[m] += h;
    xm[m] -= h;
    auto gp = christoffel_at(chart, xp), gm = christoffel_at(chart, xm);
    for (int q = 0; q < 8; ++q) CHECK(gam.d1[m * 8 + q] == doctest::Approx((gp.values[q] - gm.values[q]) / (2 * h)).epsilon(1e-6));
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 8; ++q)
        CHECK(gam.d2[(m * 2 + p) * 8 + q] ==
              doctest::Approx((gp.d1[p * 8 + q] - gm.d1[p * 8 + q]) / (2 * h)).epsilon(1e-5));
  }
}

TEST_CASE("constant curvature charts satisfy the space-form curvature identity") {
  std::mt19937_64 rng(13);
  for (int n : {2, 3})
    for (double k : {1.0, -1.0, 0.5}) {
      auto chart = constant_curvature_chart(k, n);
      double worst = 0.0, nabla = 0.0, bianchi = 0.0, compat = 0.0, anti = 0.0;
      for (int s = 0; s < 100; ++s) {
        auto x = cgbtest::random_point(rng, n, 0.6);
        auto m = metric_at(chart, x);
        auto R = curvature_at(chart, x);
        worst = std::max(worst, cc_residual(R, m, k));
        nabla = std::max(nabla, max_abs(R.nabla));
        bianchi = std::max(bianchi, bianchi_residual(R));
        anti = std::max(anti, antisymmetry_residual(R));
        compat = std::max(compat, metric_compatibility_residual(m, christoffel_at(chart, x)));
      }
      CHECK(worst < 1e-9);
      CHECK(nabla < 1e-9);
      CHECK(bianchi < 1e-9);
      CHECK(anti < 1e-14);
      CHECK(compat < 1e-9);
    }
}

TEST_CASE("hyperbolic coordinate plane has sectional curvature -1") {
  auto chart = constant_curvature_chart(-1.0, 2);
  std::vector<double> x{0.2, 0.5};
  auto m = metric_at(chart, x);
  auto R = curvature_at(chart, x);
  double num = 0.0;  // g(R(e1,e2)e2, e1)
  for (int s = 0; s < 2; ++s) num += R(0, 1, 1, s) * m.g(s, 0);
  double den = m.g(0, 0) * m.g(1, 1) - m.g(0, 1) * m.g(0, 1);
  CHECK(num / den == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("error paths") {
  CHECK_THROWS_AS(constant_curvature_chart(1.0, 1), ChartError);
  auto hyp = constant_curvature_chart(-1.0, 2);
  std::vector<double> far{3.0, 0.0};
  CHECK_THROWS_AS(metric_at(hyp, far), DomainError);
  auto bad = Chart::from_samples(
      "indefinite", 2,
      [](std::span<const double>, std::span<double> g) {
        g[0] = 1.0; g[1] = 0.0; g[2] = 0.0; g[3] = -1.0;
      },
      [](std::span<const double>) { return true; });
  std::vector<double> o{0.0, 0.0};
  CHECK_THROWS_AS(metric_at(bad, o), ChartError);
}

TEST_CASE("finite-difference fallback chart") {
  auto chart = Chart::from_samples(
      "sampled_sphere", 2,
      [](std::span<const double> x, std::span<double> g) {
        auto v = cgbtest::conformal_metric(1.0, {x[0], x[1]});
        std::copy(v.begin(), v.end(), g.begin());
      },
      [](std::span<const double>) { return true; });
  CHECK_FALSE(chart.exact_jets());
  std::vector<double> x{0.3, -0.2};
  auto m = metric_at(chart, x);
  CHECK(metric_compatibility_residual(m, christoffel_at(chart, x)) < 1e-5);
  auto exact = constant_curvature_chart(1.0, 2);
  auto ge = christoffel_at(exact, x), gs = christoffel_at(chart, x);
  for (int q = 0; q < 8; ++q) CHECK(std::abs(ge.values[q] - gs.values[q]) < 1e-5);
}
