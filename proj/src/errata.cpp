#include "cgbundle/errata.hpp"

namespace cgb::errata {

namespace {

struct Data {
  int n;
  double a;
  std::vector<double> g, gi, R, t;
  double Rc(int l, int j, int r, int s) const { return R[((l * n + j) * n + r) * n + s]; }
};

Data gather(const Chart& chart, const CGParams& params, const BundlePoint& p) {
  p.validate();
  const int n = p.dim();
  const double tau_now = tau(chart, p);
  params.check(tau_now);
  auto m = metric_at(chart, p.x);
  Data d{n, params.a(tau_now), {}, {}, curvature_at(chart, p.x).values, p.t};
  d.g.resize(n * n);
  d.gi.resize(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      d.g[i * n + j] = m.g(i, j);
      d.gi[i * n + j] = m.g_inv(i, j);
    }
  return d;
}

ConnectionCoefficients empty(int n) {
  const int D = n + n * n;
  return {n, std::vector<double>(D * D * D, 0.0)};
}

}  // namespace

ConnectionCoefficients vertical_horizontal(const Chart& chart, const CGParams& params, const BundlePoint& p,
                                           RaisedCurvature reading) {
  const auto d = gather(chart, params, p);
  const int n = d.n;
  const int D = n + n * n;
  auto out = empty(n);
  // raised(j, s, l, r) with both middle indices lifted
  auto raised = [&](int j, int s, int l, int r) {
    double acc = 0.0;
    for (int s2 = 0; s2 < n; ++s2)
      for (int l2 = 0; l2 < n; ++l2) {
        const double R = reading == RaisedCurvature::j_first ? d.Rc(j, s2, l2, r) : d.Rc(s2, l2, j, r);
        acc += d.gi[s * n + s2] * d.gi[l * n + l2] * R;
      }
    return acc;
  };
  for (int tt = 0; tt < n; ++tt)
    for (int l = 0; l < n; ++l)
      for (int j = 0; j < n; ++j)
        for (int r = 0; r < n; ++r) {
          double first = 0.0, second = 0.0;
          for (int a = 0; a < n; ++a)
            for (int s = 0; s < n; ++s) first += d.g[tt * n + a] * raised(j, s, l, r) * d.t[a * n + s];
          for (int b = 0; b < n; ++b)
            for (int s = 0; s < n; ++s) second += d.gi[l * n + b] * d.Rc(tt, s, j, r) * d.t[s * n + b];
          out.data[((n + tt * n + l) * D + j) * D + r] = 0.5 * d.a * (first - second);
        }
  return out;
}

ConnectionCoefficients horizontal_vertical(const Chart& chart, const CGParams& params, const BundlePoint& p,
                                           DirectionReading reading) {
  const auto d = gather(chart, params, p);
  const int n = d.n;
  const int D = n + n * n;
  auto out = empty(n);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int r = 0; r < n; ++r) {
          double first = 0.0, second = 0.0;
          for (int a = 0; a < n; ++a)
            for (int s = 0; s < n; ++s) {
              double up = 0.0;
              for (int s2 = 0; s2 < n; ++s2)
                for (int j2 = 0; j2 < n; ++j2) up += d.gi[s * n + s2] * d.gi[j * n + j2] * d.Rc(s2, j2, l, r);
              first += d.g[i * n + a] * up * d.t[a * n + s];
            }
          for (int b = 0; b < n; ++b)
            for (int s = 0; s < n; ++s) second += d.gi[j * n + b] * d.Rc(i, s, l, r) * d.t[s * n + b];
          const double value = 0.5 * d.a * (first - second);
          const int dir = reading == DirectionReading::direction_l ? l : i;
          const int first_vertical = reading == DirectionReading::direction_l ? i : l;
          out.data[(dir * D + n + first_vertical * n + j) * D + r] = value;
        }
  return out;
}

}  // namespace cgb::errata
