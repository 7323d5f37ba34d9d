#pragma once

// Run configuration, randomized verification suites and the JSON report.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cgbundle/tensor_bundle.hpp"

namespace cgb {

/// Malformed or semantically invalid configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BaseKind { euclidean, constant_curvature };

struct RunConfig {
  BaseKind base = BaseKind::euclidean;
  double k = 0.0;
  int n = 2;
  CGParams params = CGParams::sasaki();
  double radius = 1.0;
  int samples = 10;
  std::uint64_t seed = 0;
  std::map<std::string, double> tolerances;  // overrides keyed by check name
  std::vector<std::string> suites;           // canonical order, no duplicates

  bool operator==(const RunConfig& other) const;
};

/// All suite names in canonical order.
const std::vector<std::string>& all_suites();

/// Parses a YAML document. Syntax errors carry line and column; semantic
/// errors name the violated constraint.
RunConfig parse_config(std::string_view text);
/// Checks invariants and normalizes the suite list; throws ConfigError.
void validate_config(RunConfig& config);
/// YAML rendering that parse_config reads back to an equal RunConfig.
std::string emit_config(const RunConfig& config);

Chart make_chart(const RunConfig& config);

enum class Comparison { below, above };

struct CheckRecord {
  std::string name;
  std::string ref;
  int samples = 0;
  Comparison comparison = Comparison::below;
  double residual = 0.0;  // worst case: max for `below`, min for `above`
  double tolerance = 0.0;
  bool pass = false;
};

/// A printed reading scored against the oracle; informative, never part of the verdict.
struct ErratumRecord {
  std::string name;
  std::string ref;
  std::string reading;
  int samples = 0;
  double residual = 0.0;
  bool agrees = false;
};

struct Report {
  RunConfig config;
  std::vector<CheckRecord> checks;
  std::vector<ErratumRecord> errata;
  bool pass = false;
};

struct CheckInfo {
  std::string name;
  std::string suite;
  Comparison comparison;
  double tolerance;
};
/// Every check the suites can emit, in report order.
const std::vector<CheckInfo>& check_catalog();
/// Reference anchor of a check or erratum name, from the shipped lookup table.
const std::string& reference_for(const std::string& name);
/// All anchors in the lookup table.
std::vector<std::string> reference_anchors();

Report run_suite(const RunConfig& config);

/// JSON with stable field order; reals rendered with 17 significant digits.
std::string report_json(const Report& report);

/// Grid used by the space-form scan: 201 points over [-10, 10].
std::vector<double> k_grid();

/// Sectional curvatures of random horizontal, mixed and vertical planes,
/// one row per sample and plane type.
struct CurvatureRow {
  int sample = 0;
  std::string plane;
  double curvature = 0.0;
  double vertical_reference = 0.0;  // 1/(a r^2)
};
std::vector<CurvatureRow> curvature_table(const RunConfig& config);
std::string curvature_csv(const std::vector<CurvatureRow>& rows);

/// Space-form defect per argument class over k_grid(), worst case over samples.
struct DefectRow {
  double k = 0.0;
  std::string block;
  double max_defect = 0.0;
};
std::vector<DefectRow> defect_table(const RunConfig& config);
std::string defect_csv(const std::vector<DefectRow>& rows);

}  // namespace cgb
