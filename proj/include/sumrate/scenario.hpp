#pragma once

// Scenario files: a versioned JSON schema describing one channel instance
// plus solver settings, its canonical (linear-unit) form, a content hash,
// and a seeded random instance generator.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sumrate/channel.hpp"

namespace sumrate {

inline constexpr const char* kScenarioVersion = "sumrate-scenario/1";

struct SolverSettings {
  std::string algorithm = "gradient";  // gradient | linearized | lp
  std::optional<double> log_floor;     // polytope K
  std::vector<Index> grid;             // polytope points per axis
  double kkt_tol = 1e-7;
  std::uint64_t seed = 1;
  int multistart = 16;
  long max_iters = 20000;
  Index oracle_resolution = 201;
};

struct Scenario {
  Index users = 0;
  Index tones = 1;
  std::vector<MatrixXd> gains;  // one per tone, linear
  std::vector<VectorXd> noise;  // one per tone, linear power
  VectorXd caps;
  VectorXd weights;
  double snr_gap = 1.0;
  std::optional<MatrixXd> interference;  // stacked, multi-tone only
  SolverSettings solver;

  // True when the scenario is a plain single-tone channel.
  bool single_tone() const { return tones == 1 && !interference; }
  ChannelInstance channel() const;
  MultiToneInstance multitone() const;
  // Problem::from(channel()) for single-tone scenarios, the stacked problem
  // otherwise.
  Problem problem() const;
};

// Throws DomainError naming the offending field.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

// Canonical form: linear units, single-tone layout when tones = 1.
nlohmann::json scenario_to_json(const Scenario& s);
std::string dump_json(const nlohmann::json& j);
void save_scenario(const Scenario& s, const std::string& path);

// FNV-1a 64 of the canonical channel content (solver settings excluded),
// as 16 hex digits.
std::string scenario_hash(const Scenario& s);

struct GenerateOptions {
  double cross_max = 0.3;  // cross gains drawn from [0.01, cross_max]
  double noise_min = 0.01;
  double noise_max = 0.2;
  double cap_min = 0.5;
  double cap_max = 2.0;
};

// Deterministic per seed: direct gains in [0.5, 1.5], cross gains scaled by
// cross_max, random weights normalized to one.
Scenario generate_instance(Index users, Index tones, std::uint64_t seed,
                           const GenerateOptions& options = {});

// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
template <class Rng>
double unit_uniform(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace sumrate
