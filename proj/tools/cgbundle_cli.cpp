// cgbundle: randomized verification of the Cheeger-Gromoll type metric on the
// (1,1)-tensor bundle and its sphere bundle.
//
// Exit codes: 0 pass, 1 check failure, 2 configuration error, 3 I/O error.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "cgbundle/report.hpp"

namespace {

enum Exit { kPass = 0, kCheckFailed = 1, kConfigError = 2, kIoError = 3 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config_path;
  std::optional<std::string> base;
  std::optional<int> dim;
  std::optional<double> radius;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> preset;
  std::vector<std::string> suites;
  std::string out;
};

void add_common(CLI::App* cmd, Options& o, bool with_suite) {
  cmd->add_option("--config", o.config_path, "YAML run configuration");
  cmd->add_option("--base", o.base, "euclidean | constant_curvature:<k>");
  cmd->add_option("--dim", o.dim, "base dimension n");
  cmd->add_option("--radius", o.radius, "sphere radius r");
  cmd->add_option("--samples", o.samples, "random points per suite");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--preset", o.preset, "sasaki | classic | a1b1");
  if (with_suite) cmd->add_option("--suite", o.suites, "suite to run (repeatable)");
  cmd->add_option("--out", o.out, "output file (default stdout)");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot read '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out || !(out << text)) throw IoError(fmt::format("cannot write '{}'", path));
}

cgb::RunConfig build_config(const Options& o) {
  cgb::RunConfig cfg = o.config_path.empty() ? cgb::parse_config("{}") : cgb::parse_config(read_file(o.config_path));
  if (o.base) {
    const auto& b = *o.base;
    if (b == "euclidean") {
      cfg.base = cgb::BaseKind::euclidean;
      cfg.k = 0.0;
    } else if (b.rfind("constant_curvature", 0) == 0) {
      cfg.base = cgb::BaseKind::constant_curvature;
      const auto colon = b.find(':');
      if (colon != std::string::npos) {
        try {
          size_t used = 0;
          cfg.k = std::stod(b.substr(colon + 1), &used);
          if (used != b.size() - colon - 1) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
          throw cgb::ConfigError(fmt::format("--base: cannot read curvature from '{}'", b));
        }
      } else if (b != "constant_curvature") {
        throw cgb::ConfigError(fmt::format("--base: unknown base '{}'", b));
      }
    } else {
      throw cgb::ConfigError(fmt::format("--base: unknown base '{}'", b));
    }
  }
  if (o.dim) cfg.n = *o.dim;
  if (o.radius) cfg.radius = *o.radius;
  if (o.samples) cfg.samples = *o.samples;
  if (o.seed) cfg.seed = *o.seed;
  if (o.preset) {
    try {
      cfg.params = cgb::CGParams::preset(*o.preset);
    } catch (const std::exception& e) {
      throw cgb::ConfigError(fmt::format("--preset: {}", e.what()));
    }
  }
  if (!o.suites.empty()) cfg.suites = o.suites;
  cgb::validate_config(cfg);
  return cfg;
}

int run_verify(const Options& o) {
  const auto cfg = build_config(o);
  const auto rep = cgb::run_suite(cfg);
  write_output(o.out, cgb::report_json(rep));
  for (const auto& c : rep.checks)
    if (!c.pass)
      std::cerr << fmt::format("FAIL {} residual={:.17g} tolerance={:.17g}\n", c.name, c.residual, c.tolerance);
  return rep.pass ? kPass : kCheckFailed;
}

int run_curvature(const Options& o) {
  write_output(o.out, cgb::curvature_csv(cgb::curvature_table(build_config(o))));
  return kPass;
}

int run_defect(const Options& o) {
  write_output(o.out, cgb::defect_csv(cgb::defect_table(build_config(o))));
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification of the Cheeger-Gromoll type metric on the (1,1)-tensor bundle"};
  app.require_subcommand(1);
  Options opts;
  auto* verify = app.add_subcommand("verify", "run the check suites and emit a JSON report");
  auto* curvature = app.add_subcommand("curvature", "sectional curvatures of random planes as CSV");
  auto* defect = app.add_subcommand("defect", "space-form defect over the k grid as CSV");
  add_common(verify, opts, true);
  add_common(curvature, opts, false);
  add_common(defect, opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (verify->parsed()) return run_verify(opts);
    if (curvature->parsed()) return run_curvature(opts);
    return run_defect(opts);
  } catch (const cgb::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
}
