/*
 * Copyright (c) 2026 groundsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace groundsim {

// Configuration or usage mistakes; the CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class Weather { sunny, rainy, snowy };
enum class RoadType { normal, light_industry, heavy_industry };

const char* to_token(Weather w);
const char* to_token(RoadType r);
Weather parse_weather(const std::string& token);
RoadType parse_road_type(const std::string& token);

// Prompt-facing rendering: underscores become spaces ("light industry").
std::string display_name(RoadType r);

struct DomainContext {
  Weather weather = Weather::sunny;
  RoadType road = RoadType::normal;
  bool operator==(const DomainContext&) const = default;
};

// Vehicle kinematics that parameterize one world. The gap between the
// training world and the deployment world is created entirely by running
// the same engine under two different profiles.
struct DynamicsProfile {
  double accel = 2.60;          // m/s^2
  double decel = 4.50;          // m/s^2, comfortable braking
  double e_decel = 9.00;        // m/s^2, hard bound on per-tick braking
  double startup_delay = 0.00;  // s, reaction lag of a stopped vehicle

  void validate() const;
  bool operator==(const DynamicsProfile&) const = default;
};

enum class Setting { V0, V1, V2, V3, V4 };

const char* to_token(Setting s);
Setting parse_setting(const std::string& token);

// The five deployment configurations, bit-exact.
DynamicsProfile builtin_profile(Setting name);

// V0 (sunny, normal); V1 (sunny, light industry); V2 (sunny, heavy
// industry); V3 (rainy, normal); V4 (snowy, normal).
DomainContext default_context_for(Setting name);

struct RoadNetwork {
  // 4 approaches (N,E,S,W) x 3 lanes (left,through,right), fixed.
  double lane_length = 300.0;    // m
  double speed_limit = 13.89;    // m/s
  double vehicle_length = 5.0;   // m
  double min_gap = 2.5;          // m

  static constexpr int kApproaches = 4;
  static constexpr int kLanesPerApproach = 3;
  static constexpr int kLanes = kApproaches * kLanesPerApproach;

  void validate() const;
  bool operator==(const RoadNetwork&) const = default;
};

struct Arrival {
  double time = 0.0;  // s, within [0, horizon)
  int approach = 0;   // 0=N 1=E 2=S 3=W
  int lane = 0;       // 0=left 1=through 2=right
  bool operator==(const Arrival&) const = default;
};

struct FlowSpec {
  // Poisson rate per approach (veh/s), used when no schedule is given.
  std::array<double, 4> rates{0.15, 0.15, 0.15, 0.15};
  std::optional<std::vector<Arrival>> schedule;

  void validate(int horizon) const;
  bool operator==(const FlowSpec&) const = default;
};

struct TrainerParams {
  int steps = 3600;            // T, seconds per episode
  int episodes = 300;          // I, outer iterations / training episodes
  int action_interval = 10;    // s between decisions
  int yellow_length = 5;       // s
  int learning_start = 5000;   // decision steps before updates begin
  int buffer_size = 5000;
  int update_model_rate = 1;   // train_batch every N decision steps
  int update_target_rate = 5;  // target sync every N updates

  void validate() const;
  bool operator==(const TrainerParams&) const = default;
};

struct DqnParams {
  double lr = 0.001;
  int batch_size = 64;
  double gamma = 0.98;
  double epsilon = 0.1;
  double epsilon_decay = 0.99;  // multiplicative, per episode
  double epsilon_min = 0.01;
  double grad_clip = 0.5;

  void validate() const;
  bool operator==(const DqnParams&) const = default;
};

struct GatParams {
  int pretrain_episodes = 100;       // M, episodes before any grounding
  int forward_epochs = 20;           // n, per outer iteration
  int inverse_epochs = 20;
  double forward_lr = 1e-4;
  double inverse_lr = 1e-5;
  int policy_episodes_per_iter = 1;  // grounded policy episodes per iteration

  void validate() const;
  bool operator==(const GatParams&) const = default;
};

enum class OracleKind { rule_table, replay_file, remote };

const char* to_token(OracleKind k);
OracleKind parse_oracle_kind(const std::string& token);

struct OracleParams {
  OracleKind backend = OracleKind::rule_table;
  std::string table_path;     // rule_table: optional override of the bundled table
  std::string replay_path;    // replay_file
  std::string endpoint;       // remote: full URL
  std::string model = "gpt-4";
  int timeout_s = 30;
  std::string cache_path;     // optional persistence
  static constexpr int kBucketWidth = 5;  // vehicle-count bucket for cache keys

  void validate() const;
  bool operator==(const OracleParams&) const = default;
};

// Single source of truth for all tunable constants of a run.
struct ExperimentConfig {
  DynamicsProfile sim_profile = builtin_profile(Setting::V0);
  DynamicsProfile real_profile = builtin_profile(Setting::V1);
  DomainContext real_context = default_context_for(Setting::V1);
  RoadNetwork network;
  FlowSpec flow;
  TrainerParams trainer;
  DqnParams dqn;
  GatParams gat;
  OracleParams oracle;
  uint64_t seed = 0;

  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

// Flat key/value text with [section] headers; see docs/FORMATS.md.
// Absent keys keep their defaults; unknown keys are errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

// Flow schedule file: one arrival per line, `time_s,approach,lane_index`,
// approach given as N/E/S/W. No header.
std::vector<Arrival> load_flow_schedule(const std::string& path);

}  // namespace groundsim
