#include "cgbundle/base_geometry.hpp"

#include <cmath>

namespace cgb {

Chart euclidean_chart(int n) {
  if (n < 1) throw ChartError("chart dimension must be positive");
  auto f = [n](auto x, auto g) {
    using S = typename decltype(g)::value_type;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g[i * n + j] = S(i == j ? 1.0 : 0.0);
    (void)x;
  };
  return Chart::from_closed_form("euclidean", n, f, [](std::span<const double>) { return true; });
}

Chart constant_curvature_chart(double k, int n) {
  if (n < 2) throw ChartError("constant_curvature_chart requires n >= 2");
  auto f = [k, n](auto x, auto g) {
    using S = typename decltype(g)::value_type;
    S r2 = S(0.0);
    for (int i = 0; i < n; ++i) r2 += x[i] * x[i];
    S conf = 1.0 + 0.25 * k * r2;
    S w = 1.0 / (conf * conf);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g[i * n + j] = i == j ? w : S(0.0);
  };
  auto domain = [k, n](std::span<const double> x) {
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) r2 += x[i] * x[i];
    return 1.0 + 0.25 * k * r2 > 1e-6;
  };
  std::string name = k == 0.0 ? "euclidean" : "constant_curvature";
  return Chart::from_closed_form(name, n, f, domain);
}

Chart Chart::from_samples(std::string name, int dim,
                          std::function<void(std::span<const double>, std::span<double>)> f,
                          DomainFn domain, double step) {
  auto jets = [f, dim, step](std::span<const double> x0) {
    const int n = dim;
    const int nn = n * n;
    auto eval = [&](const std::vector<double>& x) {
      std::vector<double> g(nn);
      f(std::span<const double>(x), std::span<double>(g));
      return g;
    };
    std::vector<double> base(x0.begin(), x0.end());
    MetricJet jet;
    jet.n = n;
    jet.g = eval(base);
    jet.dg.assign(n * nn, 0.0);
    jet.d2g.assign(n * n * nn, 0.0);
    jet.d3g.assign(n * n * n * nn, 0.0);
    // Central differences of a (shifted) function: D_m F = (F(x+h e_m) - F(x-h e_m)) / 2h.
    auto shifted = [&](std::vector<int> dirs, std::vector<double> signs) {
      std::vector<double> x = base;
      for (size_t a = 0; a < dirs.size(); ++a) x[dirs[a]] += signs[a] * step;
      return eval(x);
    };
    for (int m = 0; m < n; ++m) {
      auto p = shifted({m}, {1}), q = shifted({m}, {-1});
      for (int ij = 0; ij < nn; ++ij) jet.dg[m * nn + ij] = (p[ij] - q[ij]) / (2 * step);
    }
    for (int m = 0; m < n; ++m)
      for (int p = 0; p < n; ++p) {
        auto pp = shifted({m, p}, {1, 1}), pm = shifted({m, p}, {1, -1});
        auto mp = shifted({m, p}, {-1, 1}), mm = shifted({m, p}, {-1, -1});
        for (int ij = 0; ij < nn; ++ij)
          jet.d2g[(m * n + p) * nn + ij] = (pp[ij] - pm[ij] - mp[ij] + mm[ij]) / (4 * step * step);
      }
    for (int m = 0; m < n; ++m)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          std::vector<double> acc(nn, 0.0);
          for (int s1 : {1, -1})
            for (int s2 : {1, -1})
              for (int s3 : {1, -1}) {
                auto v = shifted({m, p, q}, {double(s1), double(s2), double(s3)});
                for (int ij = 0; ij < nn; ++ij) acc[ij] += s1 * s2 * s3 * v[ij];
              }
          for (int ij = 0; ij < nn; ++ij)
            jet.d3g[((m * n + p) * n + q) * nn + ij] = acc[ij] / (8 * step * step * step);
        }
    return jet;
  };
  return Chart(std::move(name), dim, jets, std::move(domain), false);
}

MetricJet Chart::jets(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw DomainError("point dimension does not match chart");
  if (!domain_(x)) throw DomainError("point outside chart domain");
  return jets_(x);
}

MetricAt metric_at(const Chart& chart, std::span<const double> x) {
  MetricAt out;
  out.jets = chart.jets(x);
  const int n = chart.dim();
  out.g = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      out.jets.g.data(), n, n);
  Eigen::LLT<Eigen::MatrixXd> llt(out.g);
  if (llt.info() != Eigen::Success || !out.g.isApprox(out.g.transpose()))
    throw ChartError("metric is not symmetric positive definite");
  out.g_inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  return out;
}

ChristoffelField christoffel_at(const Chart& chart, std::span<const double> x) {
  MetricModel model = chart.model(x);
  const int n = chart.dim();
  const int n3 = n * n * n;
  ChristoffelField out;
  out.n = n;
  std::vector<double> zero(n, 0.0);
  out.values = christoffel_model<double>(model, std::span<const double>(zero));
  out.d1.assign(n * n3, 0.0);
  out.d2.assign(n * n * n3, 0.0);
  using D1 = Dual<double>;
  using D2 = Dual<D1>;
  for (int m = 0; m < n; ++m) {
    std::vector<D1> x1(n);
    for (int c = 0; c < n; ++c) x1[c] = D1(0.0, c == m ? 1.0 : 0.0);
    auto g1 = christoffel_model<D1>(model, std::span<const D1>(x1));
    for (int q = 0; q < n3; ++q) out.d1[m * n3 + q] = g1[q].d;
    for (int p = 0; p < n; ++p) {
      std::vector<D2> x2(n);
      for (int c = 0; c < n; ++c) x2[c] = D2(D1(0.0, c == m ? 1.0 : 0.0), D1(c == p ? 1.0 : 0.0));
      auto g2 = christoffel_model<D2>(model, std::span<const D2>(x2));
      for (int q = 0; q < n3; ++q) out.d2[(p * n + m) * n3 + q] = g2[q].d.d;
    }
  }
  return out;
}

CurvatureField curvature_from_model(const MetricModel& model) {
  const int n = model.dim();
  const int n4 = n * n * n * n;
  std::vector<double> zero(n, 0.0);
  auto base = base_at<double>(model, std::span<const double>(zero), true);
  CurvatureField out;
  out.n = n;
  out.values = base.riemann;
  out.nabla.assign(n * n4, 0.0);
  using D1 = Dual<double>;
  auto idx = [n](int l, int j, int r, int s) { return ((l * n + j) * n + r) * n + s; };
  for (int m = 0; m < n; ++m) {
    std::vector<D1> x1(n);
    for (int c = 0; c < n; ++c) x1[c] = D1(0.0, c == m ? 1.0 : 0.0);
    auto bd = base_at<D1>(model, std::span<const D1>(x1), true);
    const auto& G = base.gamma;
    const auto& R = base.riemann;
    auto gam = [&](int k, int i, int j) { return G[(k * n + i) * n + j]; };
    for (int l = 0; l < n; ++l)
      for (int j = 0; j < n; ++j)
        for (int r = 0; r < n; ++r)
          for (int s = 0; s < n; ++s) {
            double acc = bd.riemann[idx(l, j, r, s)].d;
            for (int p = 0; p < n; ++p) {
              acc -= gam(p, m, l) * R[idx(p, j, r, s)];
              acc -= gam(p, m, j) * R[idx(l, p, r, s)];
              acc -= gam(p, m, r) * R[idx(l, j, p, s)];
              acc += gam(s, m, p) * R[idx(l, j, r, p)];
            }
            out.nabla[m * n4 + idx(l, j, r, s)] = acc;
          }
  }
  return out;
}

CurvatureField curvature_at(const Chart& chart, std::span<const double> x) {
  return curvature_from_model(chart.model(x));
}

double metric_compatibility_residual(const MetricAt& m, const ChristoffelField& gamma) {
  const int n = gamma.n;
  double worst = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = m.jets.dg[(k * n + i) * n + j];
        for (int q = 0; q < n; ++q) v -= gamma(q, k, i) * m.g(q, j) + gamma(q, k, j) * m.g(i, q);
        worst = std::max(worst, std::abs(v));
      }
  return worst;
}

double bianchi_residual(const CurvatureField& R) {
  const int n = R.n;
  double worst = 0.0;
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s)
          worst = std::max(worst, std::abs(R(l, j, r, s) + R(j, r, l, s) + R(r, l, j, s)));
  return worst;
}

double antisymmetry_residual(const CurvatureField& R) {
  const int n = R.n;
  double worst = 0.0;
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) worst = std::max(worst, std::abs(R(l, j, r, s) + R(j, l, r, s)));
  return worst;
}

}  // namespace cgb
