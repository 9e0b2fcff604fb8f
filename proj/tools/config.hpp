#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "torusflow/field.hpp"

namespace torusflow::cli {

inline constexpr std::string_view kToolName = "torusflow";
inline constexpr std::string_view kVersion = "0.1.0";

/// Invalid, malformed or unreadable configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModeSpec {
  int n1 = 0;
  int n2 = 0;
  std::array<double, 2> amplitude{0.0, 0.0};
  std::string kind = "sin";  // sin | cos
};

struct InitialCondition {
  std::string type = "random";  // random | modes | constant
  std::uint64_t seed = 1;
  int kmax = 2;
  double amplitude = 0.02;
  std::vector<ModeSpec> modes;
  std::array<double, 2> value{0.0, 0.0};
};

struct Tolerances {
  double hamiltonian_drift = 1e-6;
  double euler_lagrange = 1e-6;
  double body_momentum_drift = 1e-6;
  double curvature_agreement = 1e-7;
  double closed_form = 1e-7;
  double uniqueness = 1e-11;
  double commuting_identity = 1e-10;
  double metric_compatibility = 1e-10;
  double negative_control = 1e-3;
  double reduction_1d = 1e-9;
  double mch2 = 1e-10;
};

struct CurvatureSection {
  std::vector<int> k_range{1, 2, 3};
  std::vector<int> basis{1};
  std::string pairing = "metric";  // metric | l2
};

struct VerifySection {
  std::vector<double> b_list{2.0, 3.0, 4.0};
  std::vector<std::array<int, 2>> modes{{1, 0}, {0, 1}, {1, 1}, {2, 1}};
  int trials = 5;
  int kmax = 3;
  double amplitude = 1.0;
  int uniqueness_grid = 32;
  double mode_amplitude = 0.1;
};

struct GeodesicSection {
  bool compare_euler = true;
  double det_floor = 1e-3;
  bool snapshots = false;
};

struct Reduce1dSection {
  std::vector<double> b_list{2.0, 3.0};
  int mch2_steps = 20;
};

struct RunConfig {
  int nx = 32;
  int ny = 32;
  double b = 2.0;
  InitialCondition initial_condition;
  double dt = 1e-3;
  double t_end = 0.1;
  int record_stride = 1;
  int pad_factor = 2;
  double blowup_factor = 1e3;
  bool snapshots = false;
  Tolerances tolerances;
  CurvatureSection curvature;
  VerifySection verify;
  GeodesicSection geodesic;
  Reduce1dSection reduce1d;
  /// Not part of the digest.
  std::string output_dir = "out";
};

/// Parses and validates a JSON document; missing keys take defaults and
/// unknown keys are errors.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);
/// Grid-dependent checks of the section used by `command`; throws ConfigError.
void validate_for_command(const RunConfig& config, std::string_view command);

/// Canonical JSON (sorted keys, no whitespace) of every setting except output_dir.
std::string canonical_config(const RunConfig& config);
/// FNV-1a 64 of canonical_config, as 16 hex digits.
std::string config_digest(const RunConfig& config);

/// The initial velocity described by config.initial_condition on the config grid.
VectorField make_initial(const RunConfig& config);

}  // namespace torusflow::cli
