#pragma once

// Experiment configuration: a JSON document in laboratory units (MHz, µs),
// converted to K = 1 units here and nowhere else.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kcq/channel.hpp"
#include "kcq/drb.hpp"
#include "kcq/dynamics.hpp"
#include "kcq/gst.hpp"
#include "kcq/model.hpp"
#include "kcq/readout.hpp"

namespace kcq::cli {

/// Schema or syntax problem; the message lists one diagnostic per line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// K / 2 pi in MHz fixes every conversion.
struct Units {
  double kerr_mhz = 1.2;
  double freq(double mhz) const { return mhz / kerr_mhz; }
  double rate(double per_us) const;
  double time(double us) const;
  double to_us(double t) const;
  double to_mhz(double f) const { return f * kerr_mhz; }
};

struct SpectrumConfig {
  std::vector<double> delta{0.0, 1.0, 2.0, 3.0, 4.0};
  SpectrumOptions opt;
};

struct LifetimesConfig {
  double mean_photon = 5.2;
  std::vector<double> delta{0.0, 2.0};
  double t_max = 0.0;  // 0: automatic window
  LifetimeOptions opt;
  bool bit_flip = true, phase_flip = true;
};

struct InitConfig {
  double ramp_time = 0.0, relax_time = 0.0;
  InitOptions opt;
};

struct ChevronConfig {
  bool run_x = true, run_z = true, optimize = true, excited = false;
  std::vector<double> delta0, t_gate;          // X map
  double omega_abs = 0.0;                      // Z map drive strength
  std::vector<double> phase, duration;         // Z map
  std::vector<double> opt_delta0, opt_t_gate;  // optimizer coarse grid
};

struct ReadoutConfig {
  CqrParams cqr;
  long shots = 10000;
  int true_state = 1;
};

struct DrbConfig {
  DrbNoise noise;
  DrbOptions opt;
  DrbFitOptions fit;
  std::vector<double> cal_grid;
  CalibrationOptions cal;
};

struct GstConfig {
  ErrorGenerator gx, gz;
  long shots = 1024;
  GstOptions opt;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  Units units;
  KerrCatParams system;
  NoiseParams noise;
  SpectrumConfig spectrum;
  LifetimesConfig lifetimes;
  InitConfig init;
  ChevronConfig chevron;
  ReadoutConfig readout;
  ErrorGenerator twirl;
  DrbConfig drb;
  GstConfig gst;
  nlohmann::json source;  // input document with the resolved seed
};

/// Parses and validates a configuration document. An empty text means all
/// defaults. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text, std::optional<std::uint64_t> seed_override = {});
ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override = {});

/// FNV-1a 64 of the canonical dump of `source`, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace kcq::cli
