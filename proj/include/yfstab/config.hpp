#pragma once

// Batch run configuration: a JSON document with a schema_version field.
// parse_config fills every default, so RunConfig::to_json() is the fully
// resolved document echoed into every output file.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "yfstab/counterexample.hpp"
#include "yfstab/stability.hpp"

namespace yfstab {

inline constexpr int kSchemaVersion = 1;

enum class RunMode { Stability, Counterexample, Both };
std::string to_string(RunMode m);

struct PacketSpec {
  std::string kind = "constant";  // "regulator" | "constant"
  int n = 1;                      // regulator index (ignored for constant)
  SpatialEnvelope spatial;
  double reference_mass = 1.0;
  bool reflected = false;

  WavePacket build() const;
  nlohmann::json to_json() const;
};

struct CurrentSpec {
  std::string preset = "onshell-nonzero";  // or "inline"
  CurrentProfile profile;                  // used when preset == "inline"

  ModelCurrent build(Mass mass) const;
  nlohmann::json to_json() const;
};

struct RunConfig {
  RunMode mode = RunMode::Stability;
  double mu = 0.5;
  double m = 2.0;
  CurrentSpec current_model;
  SpatialEnvelope envelope{{0.0, 0.0, 0.0}, 1.0, 1.0};
  SpectralMeasure rho;  // default: uniform on [0.64 m^2, 1.44 m^2]
  std::vector<int> n_ladder{4, 16, 64, 256};
  std::vector<PacketSpec> packets;          // decay packets h1, h2, h3
  std::vector<PacketSpec> control_packets;  // optional disjoint-support control triple
  std::string gram_family = "witness-v1";
  std::size_t mc_samples = 1000000;
  std::uint64_t mc_seed = 1;
  std::array<double, 3> sigma_ladder{0.08, 0.04, 0.02};
  double quadrature_rel = 1e-6;
  double onshell_zero = 1e-10;
  double gram_neg = 1e-3;
  double significance = 5.0;  // |estimate| > significance * stderr
  bool pv_mode = false;
  double delta_gap = 0.05;
  int hermite_nodes = 10;
  int polar_nodes = 24;
  int azimuth_nodes = 32;
  std::string output_directory = "out";
  std::vector<std::string> formats{"csv", "json"};
  int workers = 1;

  /// With include_execution = false, output.directory and workers are left
  /// out: they cannot change any result, and reports must not depend on them.
  nlohmann::json to_json(bool include_execution = true) const;

  ModelParams params() const { return ModelParams(Mass(mu), Mass(m)); }
  StabilityConfig stability() const;
  ThreePointOptions three_point() const;
  DecayOptions decay() const;
  bool wants(const std::string& format) const;
};

/// Parses and validates; throws CONFIG_INVALID naming the offending field.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(const std::string& text);

/// Names accepted by preset(): onshell-nonzero, onshell-vanishing, counterexample-default.
std::vector<std::string> preset_names();
nlohmann::json preset(const std::string& name);

}  // namespace yfstab
