/*
 * Copyright (c) 2026 groundsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <atomic>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>

#include "groundsim/scenario.hpp"

namespace groundsim {

// Per-lane dynamics estimate: average acceleration, deceleration,
// emergency deceleration (m/s^2) and startup delay (s).
struct DynamicsEstimate {
  double ac = 0.0;
  double ad = 0.0;
  double aed = 0.0;
  double adl = 0.0;

  void validate() const;
  bool operator==(const DynamicsEstimate&) const = default;
};

struct PromptContext {
  DomainContext ctx;
  int vehicle_count = 0;
  int lane = 0;
};

// "In {weather} day, on a {road type} road with {N} vehicles."
std::string context_sentence(const PromptContext& ctx);

// Task text + context sentence + output restriction; byte-stable.
std::string build_prompt(const PromptContext& ctx);

// Extracts the four bracketed fields from a response, tolerating prose,
// flexible whitespace, and units after the number. Throws naming the
// first missing field.
DynamicsEstimate parse_response(const std::string& text);

class OracleBackend {
 public:
  virtual ~OracleBackend() = default;
  virtual DynamicsEstimate estimate(const PromptContext& ctx) = 0;
  virtual long calls() const = 0;
};

using RuleTable = std::map<std::pair<Weather, RoadType>, DynamicsEstimate>;

// Table 1 rows at the five known (weather, road) pairs; the remaining
// combinations compose the road row with the weather row so that worse
// weather never increases ac or decreases adl.
RuleTable default_rule_table();
RuleTable load_rule_table(const std::string& path);
void save_rule_table(const std::string& path, const RuleTable& table);

// Deterministic stand-in for the language model: base row from the table,
// then a congestion adjustment (ac *= max(0.5, 1 - 0.02 N); adl += 0.01 N).
class RuleBackend : public OracleBackend {
 public:
  RuleBackend() : table_(default_rule_table()) {}
  explicit RuleBackend(RuleTable table) : table_(std::move(table)) {}

  DynamicsEstimate estimate(const PromptContext& ctx) override;
  long calls() const override { return calls_.load(); }

 private:
  RuleTable table_;
  std::atomic<long> calls_{0};
};

// Replays recorded response texts keyed like the cache, so parsing is
// exercised on real transcripts. See docs/FORMATS.md for the file format.
class ReplayBackend : public OracleBackend {
 public:
  explicit ReplayBackend(const std::string& path);

  DynamicsEstimate estimate(const PromptContext& ctx) override;
  long calls() const override { return calls_.load(); }

 private:
  std::map<std::string, std::string> responses_;
  std::atomic<long> calls_{0};
};

// Chat-completion request per prompt, temperature 0; retries transient
// failures up to 3 attempts with exponential backoff. The credential comes
// from the GROUNDSIM_LLM_KEY environment variable and is required at
// construction, before any network traffic.
class RemoteBackend : public OracleBackend {
 public:
  RemoteBackend(std::string endpoint, std::string model, int timeout_s,
                int backoff_ms = 250);

  DynamicsEstimate estimate(const PromptContext& ctx) override;
  long calls() const override { return calls_.load(); }

  std::string post_prompt(const std::string& prompt);

 private:
  std::string endpoint_;
  std::string model_;
  int timeout_s_;
  int backoff_ms_;
  std::string api_key_;
  std::atomic<long> calls_{0};
};

struct OracleKey {
  Weather weather;
  RoadType road;
  int bucket;
  auto operator<=>(const OracleKey&) const = default;
};

// Query-side cache over (weather, road, bucketed count). Safe under
// concurrent callers; at most one in-flight backend call per key.
class DynamicsOracle {
 public:
  explicit DynamicsOracle(std::unique_ptr<OracleBackend> backend,
                          std::string cache_path = "");

  DynamicsEstimate query(const PromptContext& ctx);

  static int bucket(int vehicle_count) {
    return vehicle_count / OracleParams::kBucketWidth;
  }

  size_t cache_size() const;
  long backend_calls() const { return backend_->calls(); }
  OracleBackend& backend() { return *backend_; }

 private:
  void persist_locked();

  std::unique_ptr<OracleBackend> backend_;
  std::string cache_path_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::map<OracleKey, DynamicsEstimate> cache_;
  std::set<OracleKey> inflight_;
};

std::unique_ptr<OracleBackend> make_backend(const OracleParams& params);

}  // namespace groundsim
