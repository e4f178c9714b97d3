/*
 * Copyright (c) 2026 groundsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <memory>
#include <string>

#include "groundsim/sim.hpp"

namespace groundsim {

struct StepResult {
  Observation next_obs;
  double reward = 0.0;  // -sum of lane queues at the decision boundary
  bool done = false;
  std::array<int, kNumLanes> lane_queues{};
};

struct EpisodeStats {
  double att = 0.0;          // s, mean travel time of completed trips (0 if none)
  int tp = 0;                // completed trips
  double reward_mean = 0.0;  // per decision step
  double queue_mean = 0.0;   // mean total queue per decision step
  double delay = 0.0;        // 1 - mean speed / speed limit, over ticks with vehicles
};

// Decision-interval MDP over one engine instance. Also the plug point for
// the grounding stack: the training loop only sees this interface, so a
// test can swap in a wrapped world (e.g. a relabeled-action twin).
class Env {
 public:
  virtual ~Env() = default;
  // Fresh episode; arrival randomness derives from (seed, tag, episode).
  virtual Observation reset(uint64_t episode) = 0;
  virtual StepResult step(int action) = 0;
  virtual bool done() const = 0;
  virtual EpisodeStats stats() const = 0;  // only valid once done
  virtual int steps_per_episode() const = 0;
};

class TscEnv : public Env {
 public:
  TscEnv(const RoadNetwork& net, const DynamicsProfile& profile,
         const FlowSpec& flow, const TrainerParams& trainer, uint64_t seed,
         std::string stream_tag);

  Observation reset(uint64_t episode) override;
  StepResult step(int action) override;
  bool done() const override;
  EpisodeStats stats() const override;
  int steps_per_episode() const override {
    return trainer_.steps / trainer_.action_interval;
  }

  Engine& engine() { return *engine_; }
  const Engine& engine() const { return *engine_; }

 private:
  RoadNetwork net_;
  DynamicsProfile profile_;
  FlowSpec flow_;
  TrainerParams trainer_;
  uint64_t seed_;
  std::string tag_;
  std::unique_ptr<Engine> engine_;
  double delay_sum_ = 0.0;
  int delay_samples_ = 0;
  double reward_sum_ = 0.0;
  long long queue_sum_ = 0;
  int decision_steps_ = 0;
};

// Executes perm[action] on the wrapped world; used to realize a twin whose
// dynamics differ from the base world by a known action relabeling.
class PermutedActionEnv : public Env {
 public:
  PermutedActionEnv(std::unique_ptr<Env> inner, std::array<int, kNumPhases> perm)
      : inner_(std::move(inner)), perm_(perm) {}

  Observation reset(uint64_t episode) override { return inner_->reset(episode); }
  StepResult step(int action) override {
    if (action < 0 || action >= kNumPhases)
      throw std::invalid_argument("step: action out of range");
    return inner_->step(perm_[action]);
  }
  bool done() const override { return inner_->done(); }
  EpisodeStats stats() const override { return inner_->stats(); }
  int steps_per_episode() const override { return inner_->steps_per_episode(); }

 private:
  std::unique_ptr<Env> inner_;
  std::array<int, kNumPhases> perm_;
};

// Fixed-time baseline: round-robin phases, `cycle` seconds each.
EpisodeStats run_fixed_time(const RoadNetwork& net, const DynamicsProfile& profile,
                            const FlowSpec& flow, const TrainerParams& trainer,
                            uint64_t seed, int cycle,
                            std::string_view stream_tag = "arrivals/fixed",
                            uint64_t episode = 0);

}  // namespace groundsim
