#include "cgbundle/report.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "cgbundle/detail/sphere_kernels.hpp"
#include "cgbundle/errata.hpp"
#include "cgbundle/framed_structures.hpp"
#include "cgbundle/sphere_bundle.hpp"
#include "check_anchors_data.hpp"

namespace cgb {

// ---------------------------------------------------------------------------
// Catalog and anchors

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::map<std::string, std::string>& anchor_table() {
  static const std::map<std::string, std::string> table = [] {
    std::map<std::string, std::string> out;
    std::istringstream in{std::string(kCheckAnchorsTsv)};
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) continue;
      out[line.substr(0, tab)] = line.substr(tab + 1);
    }
    return out;
  }();
  return table;
}

struct ErratumInfo {
  std::string name;
  std::string suite;
  std::string reading;
};

const std::vector<ErratumInfo>& errata_catalog() {
  static const std::vector<ErratumInfo> list = {
      {"errata.connection_M", "bundle", "M = (2b - a')/(a + b tau) as printed, vertical-vertical block"},
      {"errata.connection_VH_raised_j_first", "bundle", "R_j^{sl r} = g^{ss'} g^{ll'} R_{j s' l'}^r"},
      {"errata.connection_VH_raised_j_last", "bundle", "R^{sl}_j^r = g^{ss'} g^{ll'} R_{s' l' j}^r"},
      {"errata.connection_HV_direction_l", "bundle", "R^{sj}_l^r with l the direction of differentiation"},
      {"errata.connection_HV_direction_i", "bundle", "R^{sj}_l^r with l and i exchanged"},
      {"errata.tttt_printed", "sphere", "last term with delta^m_r delta^v_n as printed"},
      {"errata.xi2_normality", "sphere", "xi_2 orthogonal to every tangent vector"},
      {"errata.paracontact_square", "sphere", "p^2 X = X - eta(X) xi on tangent vectors"},
      {"errata.paracontact_metricity", "sphere", "g(pX, pY) = g(X, Y) - eta(X) eta(Y)"},
      {"errata.eta2_on_tangent", "sphere", "eta^2 = 0 on tangent vectors"},
      {"errata.restricted_form", "sphere", "p X = P X - eta^1(X) xi_1 on tangent vectors"},
  };
  return list;
}

constexpr double kAgreeTol = 1e-8;

}  // namespace

const std::vector<CheckInfo>& check_catalog() {
  using C = Comparison;
  static const std::vector<CheckInfo> list = {
      {"base.metric_compatibility", "base", C::below, 1e-10},
      {"base.curvature_antisymmetry", "base", C::below, 1e-12},
      {"base.bianchi", "base", C::below, 1e-10},
      {"base.space_form_curvature", "base", C::below, 1e-9},
      {"base.parallel_curvature", "base", C::below, 1e-9},
      {"bundle.metric_inverse", "bundle", C::below, 1e-10},
      {"bundle.frame_round_trip", "bundle", C::below, 1e-12},
      {"bundle.oracle_torsion", "bundle", C::below, 1e-8},
      {"bundle.oracle_compatibility", "bundle", C::below, 1e-8},
      {"bundle.closed_vs_oracle", "bundle", C::below, 1e-8},
      {"structures.product", "structures", C::below, 1e-10},
      {"structures.isometry", "structures", C::below, 1e-9},
      {"structures.p_cubed", "structures", C::below, 1e-9},
      {"structures.corank", "structures", C::below, 0.5},
      {"structures.frame_identity", "structures", C::below, 1e-9},
      {"structures.eta_duality", "structures", C::below, 1e-9},
      {"structures.p_xi", "structures", C::below, 1e-9},
      {"structures.eta_p", "structures", C::below, 1e-9},
      {"structures.lemma4", "structures", C::below, 1e-9},
      {"structures.metricity", "structures", C::below, 1e-9},
      {"structures.metricity_breaking", "structures", C::above, 1e-3},
      {"structures.local_vs_operator", "structures", C::below, 1e-9},
      {"sphere.membership", "sphere", C::below, 1e-10},
      {"sphere.radial_annihilation", "sphere", C::below, 1e-10},
      {"sphere.induced_metric", "sphere", C::below, 1e-10},
      {"sphere.brackets", "sphere", C::below, 1e-10},
      {"sphere.oracle_torsion", "sphere", C::below, 1e-8},
      {"sphere.oracle_compatibility", "sphere", C::below, 1e-8},
      {"sphere.closed_vs_oracle", "sphere", C::below, 1e-8},
      {"sphere.curvature_closed_vs_oracle", "sphere", C::below, 1e-6},
      {"sphere.curvature_antisymmetry", "sphere", C::below, 1e-9},
      {"sphere.curvature_pair_symmetry", "sphere", C::below, 1e-6},
      {"sphere.tttt_formula", "sphere", C::below, 1e-9},
      {"sphere.nabla_r_blocks", "sphere", C::below, 1e-8},
      {"sphere.sectional_rebasing", "sphere", C::below, 1e-8},
      {"sphere.paracontact_eta_xi", "sphere", C::below, 1e-9},
      {"sphere.paracontact_p_xi", "sphere", C::below, 1e-9},
      {"sphere.paracontact_eta_p", "sphere", C::below, 1e-9},
      {"sphere.paracontact_tangency", "sphere", C::below, 1e-9},
      {"sphere.xi3_normality", "sphere", C::below, 1e-10},
      {"theorem7.min_defect", "theorem7", C::above, 1e-3},
      {"theorem7.sasaki_min_defect", "theorem7", C::above, 1e-3},
      {"theorem7.tangential_identity", "theorem7", C::below, 1e-9},
      {"theorem7.vertical_sectional", "theorem7", C::below, 1e-8},
      {"theorem7.terminal_identity", "theorem7", C::above, 1e-3},
      {"theorem7.lemma1_rank", "theorem7", C::below, 0.5},
  };
  return list;
}

const std::string& reference_for(const std::string& name) {
  static const std::string missing;
  auto it = anchor_table().find(name);
  return it == anchor_table().end() ? missing : it->second;
}

std::vector<std::string> reference_anchors() {
  std::set<std::string> s;
  for (const auto& [name, anchor] : anchor_table()) s.insert(anchor);
  return {s.begin(), s.end()};
}

const std::vector<std::string>& all_suites() {
  static const std::vector<std::string> s = {"base", "bundle", "structures", "sphere", "theorem7"};
  return s;
}

std::vector<double> k_grid() {
  std::vector<double> ks(201);
  for (int i = 0; i < 201; ++i) ks[i] = -10.0 + 0.1 * i;
  return ks;
}

// ---------------------------------------------------------------------------
// Configuration

bool RunConfig::operator==(const RunConfig& o) const {
  auto same_params = [](const CGParams& x, const CGParams& y) {
    return x.name == y.name && x.a.num == y.a.num && x.a.den == y.a.den && x.b.num == y.b.num &&
           x.b.den == y.b.den;
  };
  return base == o.base && k == o.k && n == o.n && same_params(params, o.params) && radius == o.radius &&
         samples == o.samples && seed == o.seed && tolerances == o.tolerances && suites == o.suites;
}

namespace {

std::string where(const YAML::Mark& m) { return fmt::format("line {}, column {}", m.line + 1, m.column + 1); }

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(fmt::format("{}: invalid value for '{}'", where(node.Mark()), key));
  }
}

std::vector<double> coefficients(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence() || node.size() == 0)
    throw ConfigError(fmt::format("{}: '{}' must be a nonempty list of coefficients", where(node.Mark()), key));
  std::vector<double> out;
  for (const auto& c : node) out.push_back(scalar<double>(c, key));
  return out;
}

Rational rational(const YAML::Node& node, const std::string& key) {
  if (node.IsScalar()) return Rational::constant(scalar<double>(node, key));
  if (!node.IsMap()) throw ConfigError(fmt::format("{}: '{}' must be a number or {{num, den}}", where(node.Mark()), key));
  Rational r;
  for (const auto& kv : node) {
    const auto name = kv.first.as<std::string>();
    if (name == "num")
      r.num = coefficients(kv.second, key + ".num");
    else if (name == "den")
      r.den = coefficients(kv.second, key + ".den");
    else
      throw ConfigError(fmt::format("{}: unknown key '{}' in '{}'", where(kv.first.Mark()), name, key));
  }
  return r;
}

CGParams params_from(const YAML::Node& node) {
  if (node.IsScalar()) {
    try {
      return CGParams::preset(node.as<std::string>());
    } catch (const ParamError& e) {
      throw ConfigError(fmt::format("{}: {}", where(node.Mark()), e.what()));
    }
  }
  if (!node.IsMap()) throw ConfigError(fmt::format("{}: 'params' must be a preset name or a map", where(node.Mark())));
  CGParams p;
  p.name = "inline";
  p.b = Rational::constant(0.0);
  bool has_a = false;
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (key == "name") {
      p.name = scalar<std::string>(kv.second, "params.name");
    } else if (key == "a") {
      p.a = rational(kv.second, "params.a");
      has_a = true;
    } else if (key == "b") {
      p.b = rational(kv.second, "params.b");
    } else {
      throw ConfigError(fmt::format("{}: unknown key '{}' in 'params'", where(kv.first.Mark()), key));
    }
  }
  if (!has_a) throw ConfigError(fmt::format("{}: inline params need 'a'", where(node.Mark())));
  return p;
}

bool is_preset(const CGParams& p) {
  for (const char* name : {"sasaki", "classic", "a1b1"}) {
    if (p.name != name) continue;
    const auto q = CGParams::preset(name);
    return p.a.num == q.a.num && p.a.den == q.a.den && p.b.num == q.b.num && p.b.den == q.b.den;
  }
  return false;
}

std::string real(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

RunConfig parse_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(fmt::format("syntax error at {}: {}", where(e.mark), e.msg));
  }
  if (!root.IsMap()) throw ConfigError("configuration must be a key/value map");
  RunConfig cfg;
  bool k_given = false;
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    const auto& v = kv.second;
    if (key == "base") {
      const auto b = scalar<std::string>(v, key);
      if (b == "euclidean")
        cfg.base = BaseKind::euclidean;
      else if (b == "constant_curvature")
        cfg.base = BaseKind::constant_curvature;
      else
        throw ConfigError(fmt::format("{}: base must be 'euclidean' or 'constant_curvature'", where(v.Mark())));
    } else if (key == "k") {
      cfg.k = scalar<double>(v, key);
      k_given = true;
    } else if (key == "n") {
      cfg.n = scalar<int>(v, key);
    } else if (key == "radius") {
      cfg.radius = scalar<double>(v, key);
    } else if (key == "samples") {
      cfg.samples = scalar<int>(v, key);
    } else if (key == "seed") {
      cfg.seed = scalar<std::uint64_t>(v, key);
    } else if (key == "params") {
      cfg.params = params_from(v);
    } else if (key == "tolerances") {
      if (!v.IsMap()) throw ConfigError(fmt::format("{}: 'tolerances' must be a map", where(v.Mark())));
      for (const auto& t : v) cfg.tolerances[t.first.as<std::string>()] = scalar<double>(t.second, "tolerances");
    } else if (key == "suites") {
      if (v.IsScalar() && v.as<std::string>() == "all") {
        cfg.suites = all_suites();
      } else if (v.IsSequence()) {
        for (const auto& s : v) cfg.suites.push_back(scalar<std::string>(s, key));
        if (cfg.suites.empty()) throw ConfigError(fmt::format("{}: selected suites must be nonempty", where(v.Mark())));
      } else {
        throw ConfigError(fmt::format("{}: 'suites' must be a list or 'all'", where(v.Mark())));
      }
    } else {
      throw ConfigError(fmt::format("{}: unknown key '{}'", where(kv.first.Mark()), key));
    }
  }
  if (cfg.base == BaseKind::euclidean && k_given && cfg.k != 0.0)
    throw ConfigError("k applies only to base 'constant_curvature'");
  if (cfg.suites.empty()) cfg.suites = all_suites();
  validate_config(cfg);
  return cfg;
}

void validate_config(RunConfig& cfg) {
  if (cfg.n < 2) throw ConfigError("constraint violated: n >= 2");
  if (!(cfg.radius > 0.0) || !std::isfinite(cfg.radius)) throw ConfigError("constraint violated: radius > 0");
  if (cfg.samples < 1) throw ConfigError("constraint violated: samples >= 1");
  if (!std::isfinite(cfg.k)) throw ConfigError("constraint violated: k must be finite");
  if (cfg.base == BaseKind::euclidean) cfg.k = 0.0;
  if (cfg.suites.empty()) throw ConfigError("constraint violated: selected suites nonempty");
  std::set<std::string> chosen;
  for (const auto& s : cfg.suites) {
    if (std::find(all_suites().begin(), all_suites().end(), s) == all_suites().end())
      throw ConfigError(fmt::format("unknown suite '{}'", s));
    chosen.insert(s);
  }
  cfg.suites.clear();
  for (const auto& s : all_suites())
    if (chosen.count(s)) cfg.suites.push_back(s);
  for (const auto& [name, tol] : cfg.tolerances) {
    const auto& cat = check_catalog();
    if (std::none_of(cat.begin(), cat.end(), [&](const CheckInfo& c) { return c.name == name; }))
      throw ConfigError(fmt::format("tolerance override for unknown check '{}'", name));
    if (!(tol > 0.0) || !std::isfinite(tol))
      throw ConfigError(fmt::format("tolerance for '{}' must be positive", name));
  }
  for (double tau_check : {0.0, cfg.radius * cfg.radius}) {
    try {
      cfg.params.check(tau_check);
    } catch (const ParamError&) {
      throw ConfigError(fmt::format("params '{}' violate the constraint 'a > 0 and a + b tau > 0' at tau = {}",
                                    cfg.params.name, real(tau_check)));
    }
  }
}

std::string emit_config(const RunConfig& cfg) {
  YAML::Emitter out;
  auto reals = [&](const std::vector<double>& v) {
    out << YAML::Flow << YAML::BeginSeq;
    for (double c : v) out << real(c);
    out << YAML::EndSeq;
  };
  out << YAML::BeginMap;
  out << YAML::Key << "base" << YAML::Value
      << (cfg.base == BaseKind::euclidean ? "euclidean" : "constant_curvature");
  out << YAML::Key << "k" << YAML::Value << real(cfg.k);
  out << YAML::Key << "n" << YAML::Value << cfg.n;
  out << YAML::Key << "params" << YAML::Value;
  if (is_preset(cfg.params)) {
    out << cfg.params.name;
  } else {
    out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << cfg.params.name;
    for (auto [key, r] : {std::pair{"a", &cfg.params.a}, std::pair{"b", &cfg.params.b}}) {
      out << YAML::Key << key << YAML::Value << YAML::BeginMap;
      out << YAML::Key << "num" << YAML::Value;
      reals(r->num);
      out << YAML::Key << "den" << YAML::Value;
      reals(r->den);
      out << YAML::EndMap;
    }
    out << YAML::EndMap;
  }
  out << YAML::Key << "radius" << YAML::Value << real(cfg.radius);
  out << YAML::Key << "samples" << YAML::Value << cfg.samples;
  out << YAML::Key << "seed" << YAML::Value << cfg.seed;
  out << YAML::Key << "tolerances" << YAML::Value << YAML::BeginMap;
  for (const auto& [name, tol] : cfg.tolerances) out << YAML::Key << name << YAML::Value << real(tol);
  out << YAML::EndMap;
  out << YAML::Key << "suites" << YAML::Value << YAML::Flow << cfg.suites;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

Chart make_chart(const RunConfig& cfg) {
  return cfg.base == BaseKind::euclidean ? euclidean_chart(cfg.n) : constant_curvature_chart(cfg.k, cfg.n);
}

// ---------------------------------------------------------------------------
// Suites

namespace {

using Values = std::map<std::string, double>;

struct Context {
  const RunConfig& cfg;
  Chart chart;
  double box;  // half-width of the coordinate box sampled for base points
};

Context context_for(const RunConfig& cfg) {
  return {cfg, make_chart(cfg), 0.5 / std::sqrt(std::max(1.0, std::abs(cfg.k)))};
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::vector<double> uniform_point(std::mt19937_64& rng, int n, double box) {
  std::uniform_real_distribution<double> u(-box, box);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

std::vector<double> gaussian(std::mt19937_64& rng, int count) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> v(count);
  for (auto& c : v) c = nd(rng);
  return v;
}

void put_max(Values& v, const std::string& key, double x) {
  auto it = v.find(key);
  if (it == v.end() || std::isnan(x))
    v[key] = x;
  else if (!std::isnan(it->second))
    it->second = std::max(it->second, x);
}

double norm_sq(const Chart& chart, const std::vector<double>& x, const std::vector<double>& E) {
  auto m = metric_at(chart, x);
  Eigen::Map<const Eigen::VectorXd> e(E.data(), static_cast<long>(E.size()));
  return e.dot(m.g * e);
}

std::vector<double> random_field(const Context& ctx, std::mt19937_64& rng, const std::vector<double>& x) {
  for (;;) {
    auto E = gaussian(rng, ctx.cfg.n);
    if (norm_sq(ctx.chart, x, E) > 0.04) return E;
  }
}

void base_sample(const Context& ctx, std::mt19937_64& rng, Values& v) {
  const int n = ctx.cfg.n;
  auto x = uniform_point(rng, n, ctx.box);
  auto m = metric_at(ctx.chart, x);
  auto gam = christoffel_at(ctx.chart, x);
  auto R = curvature_at(ctx.chart, x);
  v["base.metric_compatibility"] = metric_compatibility_residual(m, gam);
  v["base.curvature_antisymmetry"] = antisymmetry_residual(R);
  v["base.bianchi"] = bianchi_residual(R);
  double sf = 0.0;
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          const double expected = ctx.cfg.k * (m.g(j, r) * (s == l) - m.g(l, r) * (s == j));
          sf = std::max(sf, std::abs(R(l, j, r, s) - expected));
        }
  v["base.space_form_curvature"] = sf;
  double nab = 0.0;
  for (double c : R.nabla) nab = std::max(nab, std::abs(c));
  v["base.parallel_curvature"] = nab;
}

void bundle_sample(const Context& ctx, std::mt19937_64& rng, Values& v) {
  using B = ConnectionCoefficients::Block;
  const int n = ctx.cfg.n;
  const int D = n + n * n;
  const auto& params = ctx.cfg.params;
  BundlePoint p{uniform_point(rng, n, ctx.box), gaussian(rng, n * n)};
  auto mb = cg_metric_matrices(ctx.chart, params, p);
  v["bundle.metric_inverse"] = (mb.G * mb.G_inv - Eigen::MatrixXd::Identity(D, D)).cwiseAbs().maxCoeff();
  auto w = AdaptedVector::from_flat(gaussian(rng, D), n);
  auto back = from_coordinates(ctx.chart, to_coordinates(ctx.chart, w, p), p).flat();
  auto wf = w.flat();
  double rt = 0.0;
  for (int q = 0; q < D; ++q) rt = std::max(rt, std::abs(back[q] - wf[q]));
  v["bundle.frame_round_trip"] = rt;
  auto oracle = cg_connection_koszul(ctx.chart, params, p);
  auto res = connection_residuals(ctx.chart, params, p, oracle);
  v["bundle.oracle_torsion"] = res.torsion;
  v["bundle.oracle_compatibility"] = res.compatibility;
  v["bundle.closed_vs_oracle"] = cg_connection_closed(ctx.chart, params, p).max_diff(oracle);

  v["errata.connection_M"] =
      cg_connection_closed(ctx.chart, params, p, MCoefficient::printed).block_max_diff(oracle, B::VV_V);
  using errata::DirectionReading;
  using errata::RaisedCurvature;
  v["errata.connection_VH_raised_j_first"] =
      errata::vertical_horizontal(ctx.chart, params, p, RaisedCurvature::j_first).block_max_diff(oracle, B::VH_H);
  v["errata.connection_VH_raised_j_last"] =
      errata::vertical_horizontal(ctx.chart, params, p, RaisedCurvature::j_last).block_max_diff(oracle, B::VH_H);
  v["errata.connection_HV_direction_l"] = errata::horizontal_vertical(ctx.chart, params, p,
                                                                       DirectionReading::direction_l)
                                               .block_max_diff(oracle, B::HV_H);
  v["errata.connection_HV_direction_i"] = errata::horizontal_vertical(ctx.chart, params, p,
                                                                       DirectionReading::direction_i)
                                               .block_max_diff(oracle, B::HV_H);
}

void structures_sample(const Context& ctx, std::mt19937_64& rng, Values& v) {
  const int n = ctx.cfg.n;
  const auto& params = ctx.cfg.params;
  auto x = uniform_point(rng, n, ctx.box);
  auto t = gaussian(rng, n * n);
  auto E = random_field(ctx, rng, x);
  auto p = project_to_stratum(ctx.chart, BundlePoint{x, t}, E);
  auto c = canonical_coeffs_at(ctx.chart, params, p, E);
  auto r = f31_verify(ctx.chart, params, c, p);
  v["structures.product"] = r.P2_minus_I;
  v["structures.isometry"] = r.theorem2_isometry;
  v["structures.p_cubed"] = r.p3_minus_p;
  v["structures.corank"] = std::abs(r.rank.corank - 3);
  v["structures.frame_identity"] = r.p2_frame_identity;
  v["structures.eta_duality"] = r.eta_duality;
  v["structures.p_xi"] = r.p_of_xi;
  v["structures.eta_p"] = r.eta_after_p;
  v["structures.lemma4"] = r.lemma4_identity;
  v["structures.metricity"] = r.metricity;
  v["structures.local_vs_operator"] = r.local_vs_operator;
  // Keep the framed conditions and break only the metric ones.
  const double E2 = norm_sq(ctx.chart, x, E);
  auto bad = c;
  bad.gamma *= 1.3;
  bad.alpha = 1.0 / (bad.gamma * E2);
  bad.lambda = bad.gamma / E2 * (bad.c2 + bad.d2 * E2);
  bad.beta = 1.0 / (bad.lambda * E2 * E2);
  v["structures.metricity_breaking"] = f31_verify(ctx.chart, params, bad, p).metricity;
}

AdaptedVector random_tangent(const Context& ctx, std::mt19937_64& rng, const SpherePoint& sp) {
  auto u = tangential_lift(ctx.chart, gaussian(rng, ctx.cfg.n * ctx.cfg.n), sp);
  u.h = gaussian(rng, ctx.cfg.n);
  return u;
}

void sphere_sample(const Context& ctx, std::mt19937_64& rng, Values& v) {
  using Blk = CurvatureBlocks::Block;
  const int n = ctx.cfg.n;
  const int D = n + n * n;
  const auto& params = ctx.cfg.params;
  const double r = ctx.cfg.radius;
  const double a = params.a(r * r);
  auto x = uniform_point(rng, n, ctx.box);
  auto sp = SpherePoint::make(ctx.chart, x, gaussian(rng, n * n), r);
  const auto& chart = ctx.chart;

  v["sphere.membership"] = sphere_defect(chart, sp);
  auto TA = tangential_lift(chart, gaussian(rng, n * n), sp);
  auto TB = tangential_lift(chart, gaussian(rng, n * n), sp);
  v["sphere.radial_annihilation"] =
      std::max(radial_component(chart, sp, TA), radial_component(chart, sp, TB));
  auto HY = horizontal_lift(chart, gaussian(rng, n), sp.p);
  v["sphere.induced_metric"] =
      std::max(std::abs(cg_inner(chart, params, sp.p, TA, TB) - induced_metric(chart, sp, a, TA, TB)),
               std::abs(induced_metric(chart, sp, a, TA, HY)));

  auto model = chart.model(sp.p.x);
  std::vector<double> zero(n, 0.0);
  auto ref = detail::koszul(detail::SphereFrameModel{a, sp.c()}, model, std::span<const double>(zero),
                            std::span<const double>(sp.p.t));
  double br = 0.0;
  for (int al = 0; al < D; ++al)
    for (int be = 0; be < D; ++be) {
      auto c = sphere_bracket(chart, sp, al, be).flat();
      for (int d = 0; d < D; ++d) br = std::max(br, std::abs(c[d] - ref.brackets[(al * D + be) * D + d]));
    }
  v["sphere.brackets"] = br;
  auto oracle = sphere_connection_koszul(chart, sp, a);
  auto res = sphere_connection_residuals(chart, sp, a, oracle);
  v["sphere.oracle_torsion"] = res.torsion;
  v["sphere.oracle_compatibility"] = res.compatibility;
  v["sphere.closed_vs_oracle"] = sphere_connection_closed(chart, sp, a).max_diff(oracle);

  auto R = curvature_blocks(chart, sp, a);
  auto O = curvature_blocks_oracle(chart, sp, a);
  v["sphere.curvature_closed_vs_oracle"] = R.max_diff(O);
  double anti = 0.0;
  for (int al = 0; al < D; ++al)
    for (int be = 0; be < D; ++be)
      for (int ga = 0; ga < D; ++ga)
        for (int d = 0; d < D; ++d) anti = std::max(anti, std::abs(O(al, be, ga, d) + O(be, al, ga, d)));
  v["sphere.curvature_antisymmetry"] = anti;
  double pair = 0.0;
  for (int it = 0; it < 5; ++it) {
    auto U = random_tangent(ctx, rng, sp), V = random_tangent(ctx, rng, sp);
    auto W = random_tangent(ctx, rng, sp), Z = random_tangent(ctx, rng, sp);
    pair = std::max(pair, std::abs(induced_metric(chart, sp, a, O.apply(U, V, W), Z) -
                                   induced_metric(chart, sp, a, O.apply(W, Z, U), V)));
  }
  v["sphere.curvature_pair_symmetry"] = pair;
  v["sphere.tttt_formula"] = O.block_max_diff(tttt_formula(chart, sp, TTTTReading::corrected), Blk::TTTT);
  v["errata.tttt_printed"] = O.block_max_diff(tttt_formula(chart, sp, TTTTReading::printed), Blk::TTTT);
  auto F = nabla_r_formulas(chart, sp, a);
  v["sphere.nabla_r_blocks"] = std::max(
      {O.block_max_diff(F, Blk::HHHT), O.block_max_diff(F, Blk::HHTH), O.block_max_diff(F, Blk::HTHH)});

  auto U = random_tangent(ctx, rng, sp), V = random_tangent(ctx, rng, sp);
  const double K = sectional_curvature(R, chart, sp, a, U, V);
  double rebase = 0.0;
  std::normal_distribution<double> nd;
  for (int it = 0; it < 5;) {
    const double m00 = nd(rng), m01 = nd(rng), m10 = nd(rng), m11 = nd(rng);
    if (std::abs(m00 * m11 - m01 * m10) < 0.1) continue;
    ++it;
    auto comb = [&](double p, double q) {
      auto uf = U.flat(), vf = V.flat();
      for (size_t s = 0; s < uf.size(); ++s) uf[s] = p * uf[s] + q * vf[s];
      return AdaptedVector::from_flat(uf, n);
    };
    const double K2 = sectional_curvature(R, chart, sp, a, comb(m00, m01), comb(m10, m11));
    rebase = std::max(rebase, std::abs(K2 - K) / std::max(1.0, std::abs(K)));
  }
  v["sphere.sectional_rebasing"] = rebase;

  auto E = random_field(ctx, rng, x);
  auto strat = project_to_stratum(chart, BundlePoint{x, gaussian(rng, n * n)}, E);
  auto spE = SpherePoint::make(chart, strat.x, strat.t, r);
  auto coeffs = canonical_coeffs_at(chart, params, spE.p, E);
  auto pc = paracontact_verify(chart, params, coeffs, spE);
  v["sphere.paracontact_eta_xi"] = pc.eta_xi;
  v["sphere.paracontact_p_xi"] = pc.p_xi;
  v["sphere.paracontact_eta_p"] = pc.eta_p;
  v["sphere.paracontact_tangency"] = pc.p_tangent;
  v["sphere.xi3_normality"] = pc.xi3_normality;
  v["errata.xi2_normality"] = pc.xi2_normality;
  v["errata.paracontact_square"] = pc.p_squared;
  v["errata.paracontact_metricity"] = pc.metricity;
  v["errata.eta2_on_tangent"] = pc.eta2_on_tangent;
  v["errata.restricted_form"] = pc.restricted_form;
}

void theorem7_sample(const Context& ctx, std::mt19937_64& rng, Values& v) {
  const int n = ctx.cfg.n;
  const double r = ctx.cfg.radius;
  const double r2 = r * r;
  const auto& chart = ctx.chart;
  auto x = uniform_point(rng, n, ctx.box);
  auto t = gaussian(rng, n * n);
  auto sp = SpherePoint::make(chart, x, t, r);
  const auto ks = k_grid();
  std::vector<double> as = {ctx.cfg.params.a(r2), 1.0};
  for (double kh : ks)
    if (kh > 0.0) as.push_back(1.0 / (kh * r2));
  double min_defect = INFINITY, sasaki = INFINITY, tangential = 0.0;
  for (size_t ia = 0; ia < as.size(); ++ia) {
    const double a = as[ia];
    DefectOperator op(curvature_blocks(chart, sp, a), chart, sp, a);
    auto grid = ks;
    grid.push_back(1.0 / (a * r2));
    const double m = op.min_over(grid);
    min_defect = std::min(min_defect, m);
    if (ia == 1) sasaki = m;
    tangential = std::max(tangential, op.at(1.0 / (a * r2)).per_class[static_cast<int>(DefectClass::TTT)]);
  }
  v["theorem7.min_defect"] = min_defect;
  v["theorem7.sasaki_min_defect"] = sasaki;
  v["theorem7.tangential_identity"] = tangential;

  const double a = as[0];
  auto U = tangential_lift(chart, gaussian(rng, n * n), sp);
  auto V = tangential_lift(chart, gaussian(rng, n * n), sp);
  v["theorem7.vertical_sectional"] = std::abs(sectional_curvature(chart, sp, a, U, V) - 1.0 / (a * r2));

  std::vector<double> id(n * n, 0.0);
  for (int i = 0; i < n; ++i) id[i * n + i] = 1.0;
  v["theorem7.terminal_identity"] = terminal_identity_residual(chart, SpherePoint::make(chart, x, id, r));
  v["theorem7.lemma1_rank"] = std::abs(lemma1_independence(chart, BundlePoint{x, t}).rank4 - 4);
}

std::mt19937_64 sample_rng(const RunConfig& cfg, std::uint64_t stream, int index) {
  return std::mt19937_64(
      splitmix64(cfg.seed ^ splitmix64((stream + 1) * 0x100000001B3ULL + static_cast<std::uint64_t>(index))));
}

using SampleFn = void (*)(const Context&, std::mt19937_64&, Values&);

SampleFn sampler(const std::string& suite) {
  if (suite == "base") return base_sample;
  if (suite == "bundle") return bundle_sample;
  if (suite == "structures") return structures_sample;
  if (suite == "sphere") return sphere_sample;
  return theorem7_sample;
}

}  // namespace

Report run_suite(const RunConfig& config) {
  RunConfig cfg = config;
  validate_config(cfg);
  const auto ctx = context_for(cfg);
  Report rep;
  rep.config = cfg;

  for (size_t si = 0; si < all_suites().size(); ++si) {
    const auto& suite = all_suites()[si];
    if (std::find(cfg.suites.begin(), cfg.suites.end(), suite) == cfg.suites.end()) continue;
    const int N = cfg.samples;
    std::vector<Values> slots(N);
    const SampleFn fn = sampler(suite);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < N; ++i) {
      auto rng = sample_rng(cfg, si, i);
      try {
        fn(ctx, rng, slots[i]);
      } catch (const std::exception&) {
        slots[i].clear();  // every check of this sample reads as missing and fails
      }
    }
    // Ordered single-threaded merge.
    for (const auto& info : check_catalog()) {
      if (info.suite != suite) continue;
      CheckRecord rec;
      rec.name = info.name;
      rec.ref = reference_for(info.name);
      rec.samples = N;
      rec.comparison = info.comparison;
      auto ov = cfg.tolerances.find(info.name);
      rec.tolerance = ov == cfg.tolerances.end() ? info.tolerance : ov->second;
      double worst = info.comparison == Comparison::below ? 0.0 : INFINITY;
      for (const auto& s : slots) {
        auto it = s.find(info.name);
        const double x = it == s.end() ? kNaN : it->second;
        if (std::isnan(x) || std::isnan(worst)) {
          worst = kNaN;
          continue;
        }
        worst = info.comparison == Comparison::below ? std::max(worst, x) : std::min(worst, x);
      }
      rec.residual = worst;
      rec.pass = info.comparison == Comparison::below ? worst < rec.tolerance : worst > rec.tolerance;
      rep.checks.push_back(rec);
    }
    for (const auto& info : errata_catalog()) {
      if (info.suite != suite) continue;
      Values merged;
      for (const auto& s : slots) {
        auto it = s.find(info.name);
        put_max(merged, info.name, it == s.end() ? kNaN : it->second);
      }
      ErratumRecord e{info.name, reference_for(info.name), info.reading, N, merged[info.name], false};
      e.agrees = e.residual < kAgreeTol;
      rep.errata.push_back(e);
    }
  }
  rep.pass = !rep.checks.empty() &&
             std::all_of(rep.checks.begin(), rep.checks.end(), [](const CheckRecord& c) { return c.pass; });
  return rep;
}

// ---------------------------------------------------------------------------
// Tables

namespace {
constexpr std::uint64_t kCurvatureStream = 100;
constexpr std::uint64_t kDefectStream = 101;

}  // namespace

std::vector<CurvatureRow> curvature_table(const RunConfig& config) {
  RunConfig cfg = config;
  validate_config(cfg);
  const auto ctx = context_for(cfg);
  const int n = cfg.n;
  const double r = cfg.radius;
  const double a = cfg.params.a(r * r);
  std::vector<std::array<CurvatureRow, 3>> slots(cfg.samples);
  std::vector<std::string> errors(cfg.samples);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < cfg.samples; ++i) {
    try {
      auto rng = sample_rng(cfg, kCurvatureStream, i);
      auto x = uniform_point(rng, n, ctx.box);
      auto sp = SpherePoint::make(ctx.chart, x, gaussian(rng, n * n), r);
      auto R = curvature_blocks(ctx.chart, sp, a);
      auto H1 = horizontal_lift(ctx.chart, gaussian(rng, n), sp.p);
      auto H2 = horizontal_lift(ctx.chart, gaussian(rng, n), sp.p);
      auto T1 = tangential_lift(ctx.chart, gaussian(rng, n * n), sp);
      auto T2 = tangential_lift(ctx.chart, gaussian(rng, n * n), sp);
      const double ref = 1.0 / (a * r * r);
      slots[i] = {CurvatureRow{i, "horizontal", sectional_curvature(R, ctx.chart, sp, a, H1, H2), ref},
                  CurvatureRow{i, "mixed", sectional_curvature(R, ctx.chart, sp, a, H1, T1), ref},
                  CurvatureRow{i, "vertical", sectional_curvature(R, ctx.chart, sp, a, T1, T2), ref}};
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  std::vector<CurvatureRow> rows;
  for (int i = 0; i < cfg.samples; ++i) {
    if (!errors[i].empty()) throw DomainError(fmt::format("sample {}: {}", i, errors[i]));
    rows.insert(rows.end(), slots[i].begin(), slots[i].end());
  }
  return rows;
}

std::string curvature_csv(const std::vector<CurvatureRow>& rows) {
  std::string out = "sample,plane,curvature,vertical_reference\n";
  for (const auto& r : rows)
    out += fmt::format("{},{},{:.17g},{:.17g}\n", r.sample, r.plane, r.curvature, r.vertical_reference);
  return out;
}

std::vector<DefectRow> defect_table(const RunConfig& config) {
  RunConfig cfg = config;
  validate_config(cfg);
  const auto ctx = context_for(cfg);
  const int n = cfg.n;
  const double r = cfg.radius;
  const double a = cfg.params.a(r * r);
  const auto ks = k_grid();
  std::vector<std::vector<DefectReport>> slots(cfg.samples);
  std::vector<std::string> errors(cfg.samples);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < cfg.samples; ++i) {
    try {
      auto rng = sample_rng(cfg, kDefectStream, i);
      auto x = uniform_point(rng, n, ctx.box);
      auto sp = SpherePoint::make(ctx.chart, x, gaussian(rng, n * n), r);
      DefectOperator op(ctx.chart, sp, a);
      for (double k : ks) slots[i].push_back(op.at(k));
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (int i = 0; i < cfg.samples; ++i)
    if (!errors[i].empty()) throw DomainError(fmt::format("sample {}: {}", i, errors[i]));
  std::vector<DefectRow> rows;
  for (size_t q = 0; q < ks.size(); ++q) {
    for (int c = 0; c <= kDefectClasses; ++c) {
      double worst = 0.0;
      for (const auto& s : slots) worst = std::max(worst, c == kDefectClasses ? s[q].max : s[q].per_class[c]);
      rows.push_back({ks[q], c == kDefectClasses ? "all" : defect_class_name(static_cast<DefectClass>(c)), worst});
    }
  }
  return rows;
}

std::string defect_csv(const std::vector<DefectRow>& rows) {
  std::string out = "k,block,max_defect\n";
  for (const auto& r : rows) out += fmt::format("{:.17g},{},{:.17g}\n", r.k, r.block, r.max_defect);
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20)
          out += fmt::format("\\u{:04x}", static_cast<int>(ch));
        else
          out += ch;
    }
  }
  return out + "\"";
}

std::string json_real(double v) { return std::isfinite(v) ? real(v) : "null"; }

std::string json_reals(const std::vector<double>& v) {
  std::string out = "[";
  for (size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + json_real(v[i]);
  return out + "]";
}

}  // namespace

std::string report_json(const Report& rep) {
  const auto& c = rep.config;
  std::string o;
  o += "{\n";
  o += fmt::format("  \"tool\": \"cgbundle\",\n  \"version\": \"{}\",\n", CGBUNDLE_VERSION);
  o += "  \"config\": {\n";
  o += fmt::format("    \"base\": {},\n", quote(c.base == BaseKind::euclidean ? "euclidean" : "constant_curvature"));
  o += fmt::format("    \"k\": {},\n    \"n\": {},\n", json_real(c.k), c.n);
  o += fmt::format("    \"params\": {{\"name\": {}, \"a\": {{\"num\": {}, \"den\": {}}}, \"b\": {{\"num\": {}, \"den\": {}}}}},\n",
                   quote(c.params.name), json_reals(c.params.a.num), json_reals(c.params.a.den),
                   json_reals(c.params.b.num), json_reals(c.params.b.den));
  o += fmt::format("    \"radius\": {},\n    \"samples\": {},\n    \"seed\": {},\n", json_real(c.radius), c.samples,
                   c.seed);
  o += "    \"tolerances\": {";
  bool first = true;
  for (const auto& [name, tol] : c.tolerances) {
    o += fmt::format("{}{}: {}", first ? "" : ", ", quote(name), json_real(tol));
    first = false;
  }
  o += "},\n    \"suites\": [";
  for (size_t i = 0; i < c.suites.size(); ++i) o += (i ? ", " : "") + quote(c.suites[i]);
  o += "]\n  },\n";

  o += "  \"checks\": [\n";
  for (size_t i = 0; i < rep.checks.size(); ++i) {
    const auto& r = rep.checks[i];
    o += fmt::format(
        "    {{\"name\": {}, \"ref\": {}, \"samples\": {}, \"comparison\": \"{}\", \"residual\": {}, "
        "\"tolerance\": {}, \"pass\": {}}}{}\n",
        quote(r.name), quote(r.ref), r.samples, r.comparison == Comparison::below ? "<" : ">",
        json_real(r.residual), json_real(r.tolerance), r.pass ? "true" : "false",
        i + 1 < rep.checks.size() ? "," : "");
  }
  o += "  ],\n  \"errata\": [\n";
  for (size_t i = 0; i < rep.errata.size(); ++i) {
    const auto& e = rep.errata[i];
    o += fmt::format(
        "    {{\"name\": {}, \"ref\": {}, \"reading\": {}, \"samples\": {}, \"residual\": {}, \"agrees\": {}}}{}\n",
        quote(e.name), quote(e.ref), quote(e.reading), e.samples, json_real(e.residual),
        e.agrees ? "true" : "false", i + 1 < rep.errata.size() ? "," : "");
  }
  const auto failed = std::count_if(rep.checks.begin(), rep.checks.end(), [](const CheckRecord& r) { return !r.pass; });
  o += "  ],\n";
  o += fmt::format("  \"summary\": {{\"checks\": {}, \"failed\": {}, \"pass\": {}}}\n", rep.checks.size(), failed,
                   rep.pass ? "true" : "false");
  o += "}\n";
  return o;
}

}  // namespace cgb
