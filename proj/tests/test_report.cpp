#include "doctest.h"

#include <omp.h>

#include <set>

#include "cgbundle/report.hpp"

using namespace cgb;

TEST_CASE("minimal config takes documented defaults") {
  auto cfg = parse_config("{}");
  CHECK(cfg.base == BaseKind::euclidean);
  CHECK(cfg.n == 2);
  CHECK(cfg.radius == 1.0);
  CHECK(cfg.samples == 10);
  CHECK(cfg.params.name == "sasaki");
  CHECK(cfg.suites == all_suites());
}

TEST_CASE("config parsing") {
  auto cfg = parse_config(R"(
base: constant_curvature
k: -1
n: 3
radius: 1.5
samples: 4
seed: 18446744073709551615
params: classic
tolerances: {sphere.brackets: 1e-9}
suites: [theorem7, base, base]
)");
  CHECK(cfg.k == -1.0);
  CHECK(cfg.n == 3);
  CHECK(cfg.seed == 18446744073709551615ULL);
  CHECK(cfg.params.name == "classic");
  CHECK(cfg.tolerances.at("sphere.brackets") == 1e-9);
  CHECK(cfg.suites == std::vector<std::string>{"base", "theorem7"});

  SUBCASE("inline params") {
    auto c = parse_config("params: {a: {num: [1, 0.5], den: [1, 1]}, b: 0.25}");
    CHECK(c.params.name == "inline");
    CHECK(c.params.a(2.0) == doctest::Approx(2.0 / 3.0));
    CHECK(c.params.b(7.0) == 0.25);
  }
}

TEST_CASE("config errors") {
  auto message = [](const char* text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("n: [2\n").find("line 2") != std::string::npos);
  CHECK(message("n: 2\nfoo: 1\n").find("line 2, column 1: unknown key 'foo'") != std::string::npos);
  CHECK(message("n: two\n").find("line 1, column 4") != std::string::npos);
  CHECK(message("n: 1").find("n >= 2") != std::string::npos);
  CHECK(message("radius: 0").find("radius > 0") != std::string::npos);
  CHECK(message("samples: 0").find("samples >= 1") != std::string::npos);
  CHECK(message("suites: []").find("nonempty") != std::string::npos);
  CHECK(message("suites: [nope]").find("unknown suite") != std::string::npos);
  CHECK(message("params: nope").find("nope") != std::string::npos);
  CHECK(message("tolerances: {no.such: 1}").find("unknown check") != std::string::npos);
  CHECK(message("k: 1").find("constant_curvature") != std::string::npos);
  CHECK(message("params: {a: -1}").find("a > 0") != std::string::npos);
  // a + b tau must stay positive on the whole sphere tau = r^2
  CHECK(message("params: {a: 1, b: -0.5}\nradius: 2").find("tau = 4") != std::string::npos);
  CHECK(message("params: {b: 1}").find("need 'a'") != std::string::npos);
}

TEST_CASE("emitted config round-trips") {
  for (const char* text :
       {"{}", "{base: constant_curvature, k: 0.1, n: 4, radius: 0.3, samples: 2, seed: 99, params: a1b1}",
        "{params: {name: mine, a: {num: [0.1, 0.2], den: [1, 0.3]}, b: 0.7}, radius: 0.1, "
        "tolerances: {base.bianchi: 3e-11}, suites: [sphere]}"}) {
    auto cfg = parse_config(text);
    auto again = parse_config(emit_config(cfg));
    CHECK(again == cfg);
    CHECK(emit_config(again) == emit_config(cfg));
  }
}

TEST_CASE("catalog and anchor table agree") {
  std::set<std::string> suites;
  std::set<std::string> names;
  for (const auto& c : check_catalog()) {
    CHECK_MESSAGE(!reference_for(c.name).empty(), c.name);
    CHECK(names.insert(c.name).second);
    suites.insert(c.suite);
    CHECK(c.tolerance > 0.0);
  }
  CHECK(suites == std::set<std::string>(all_suites().begin(), all_suites().end()));
  CHECK(reference_for("no.such.check").empty());
  CHECK(!reference_anchors().empty());
}

TEST_CASE("k grid") {
  auto ks = k_grid();
  REQUIRE(ks.size() == 201);
  CHECK(ks.front() == -10.0);
  CHECK(ks.back() == doctest::Approx(10.0));
  CHECK(ks[100] == doctest::Approx(0.0));
}

TEST_CASE("report covers every selected check and passes on a small run") {
  auto cfg = parse_config("{n: 2, samples: 2, seed: 5, base: constant_curvature, k: 1, params: classic}");
  auto rep = run_suite(cfg);
  CHECK(rep.checks.size() == check_catalog().size());
  for (const auto& c : rep.checks) CHECK_MESSAGE(c.pass, c.name);
  CHECK(rep.pass);
  for (const auto& e : rep.errata) CHECK(e.samples == 2);
}

TEST_CASE("tolerance overrides reach the verdict") {
  auto rep = run_suite(parse_config("{samples: 1, suites: [theorem7], tolerances: {theorem7.min_defect: 1e6}}"));
  CHECK_FALSE(rep.pass);
  for (const auto& c : rep.checks) {
    if (c.name == "theorem7.min_defect") {
      CHECK(c.tolerance == 1e6);
      CHECK_FALSE(c.pass);
    } else {
      CHECK(c.pass);
    }
  }
}

TEST_CASE("report JSON is deterministic across thread counts") {
  auto cfg = parse_config("{n: 2, samples: 5, seed: 11, base: constant_curvature, k: -1, params: a1b1}");
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto one = report_json(run_suite(cfg));
  omp_set_num_threads(4);
  const auto four = report_json(run_suite(cfg));
  omp_set_num_threads(saved);
  CHECK(one == four);
  CHECK(one.find("\"summary\"") != std::string::npos);
  CHECK(one.find("nan") == std::string::npos);
}

TEST_CASE("different seeds give different residuals") {
  auto a = report_json(run_suite(parse_config("{samples: 2, seed: 1, suites: [structures]}")));
  auto b = report_json(run_suite(parse_config("{samples: 2, seed: 2, suites: [structures]}")));
  CHECK(a != b);
}

TEST_CASE("defect and curvature tables") {
  auto cfg = parse_config("{samples: 2, radius: 1}");
  auto rows = defect_table(cfg);
  CHECK(rows.size() == 201 * 9);
  CHECK(defect_csv(rows).rfind("k,block,max_defect\n", 0) == 0);
  for (const auto& r : rows)
    if (r.block == "all") CHECK(r.max_defect > 1e-3);

  auto curv = curvature_table(cfg);
  REQUIRE(curv.size() == 6);
  for (const auto& r : curv)
    if (r.plane == "vertical") CHECK(r.curvature == doctest::Approx(r.vertical_reference).epsilon(1e-10));
}
