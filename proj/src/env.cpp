/*
 * Copyright (c) 2026 groundsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "groundsim/env.hpp"

#include <stdexcept>

namespace groundsim {

TscEnv::TscEnv(const RoadNetwork& net, const DynamicsProfile& profile,
               const FlowSpec& flow, const TrainerParams& trainer,
               uint64_t seed, std::string stream_tag)
    : net_(net), profile_(profile), flow_(flow), trainer_(trainer),
      seed_(seed), tag_(std::move(stream_tag)) {
  trainer_.validate();
}

Observation TscEnv::reset(uint64_t episode) {
  engine_ = std::make_unique<Engine>(net_, profile_, flow_,
                                     RngStream(seed_, tag_, episode),
                                     trainer_.yellow_length);
  delay_sum_ = 0.0;
  delay_samples_ = 0;
  reward_sum_ = 0.0;
  queue_sum_ = 0;
  decision_steps_ = 0;
  return engine_->observe();
}

StepResult TscEnv::step(int action) {
  if (!engine_) throw std::logic_error("step: reset first");
  if (action < 0 || action >= kNumPhases)
    throw std::invalid_argument("step: action out of range");
  if (done()) throw std::logic_error("step: episode already done");

  engine_->set_phase(action);
  for (int t = 0; t < trainer_.action_interval; ++t) {
    engine_->step();
    int n = 0;
    const double v = engine_->mean_speed(&n);
    if (n > 0) {
      delay_sum_ += 1.0 - v / net_.speed_limit;
      delay_samples_ += 1;
    }
  }

  StepResult res;
  res.next_obs = engine_->observe();
  int total = 0;
  for (int l = 0; l < kNumLanes; ++l) {
    res.lane_queues[l] = engine_->queue_length(l);
    total += res.lane_queues[l];
  }
  res.reward = -static_cast<double>(total);
  reward_sum_ += res.reward;
  queue_sum_ += total;
  decision_steps_ += 1;
  res.done = done();
  return res;
}

bool TscEnv::done() const {
  return engine_ && engine_->clock() >= trainer_.steps;
}

EpisodeStats TscEnv::stats() const {
  if (!done()) throw std::logic_error("episode_stats: episode not done");
  EpisodeStats s;
  const auto& exits = engine_->exited();
  s.tp = static_cast<int>(exits.size());
  if (!exits.empty()) {
    double sum = 0.0;
    for (const ExitRecord& e : exits) sum += e.exited_at - e.entered_at;
    s.att = sum / static_cast<double>(exits.size());
  }
  if (decision_steps_ > 0) {
    s.reward_mean = reward_sum_ / decision_steps_;
    s.queue_mean = static_cast<double>(queue_sum_) / decision_steps_;
  }
  if (delay_samples_ > 0) s.delay = delay_sum_ / delay_samples_;
  return s;
}

EpisodeStats run_fixed_time(const RoadNetwork& net, const DynamicsProfile& profile,
                            const FlowSpec& flow, const TrainerParams& trainer,
                            uint64_t seed, int cycle, std::string_view stream_tag,
                            uint64_t episode) {
  if (cycle < trainer.action_interval)
    throw ConfigError("cycle: must be >= action_interval");
  Engine engine(net, profile, flow, RngStream(seed, stream_tag, episode),
                trainer.yellow_length);

  double delay_sum = 0.0;
  int delay_samples = 0;
  double reward_sum = 0.0;
  long long queue_sum = 0;
  int decision_steps = 0;

  for (int t = 0; t < trainer.steps; ++t) {
    if (t % cycle == 0) engine.set_phase((t / cycle) % kNumPhases);
    engine.step();
    int n = 0;
    const double v = engine.mean_speed(&n);
    if (n > 0) {
      delay_sum += 1.0 - v / net.speed_limit;
      delay_samples += 1;
    }
    if ((t + 1) % trainer.action_interval == 0) {
      const int q = engine.total_queue();
      reward_sum += -q;
      queue_sum += q;
      decision_steps += 1;
    }
  }

  EpisodeStats s;
  const auto& exits = engine.exited();
  s.tp = static_cast<int>(exits.size());
  if (!exits.empty()) {
    double sum = 0.0;
    for (const ExitRecord& e : exits) sum += e.exited_at - e.entered_at;
    s.att = sum / static_cast<double>(exits.size());
  }
  if (decision_steps > 0) {
    s.reward_mean = reward_sum / decision_steps;
    s.queue_mean = static_cast<double>(queue_sum) / decision_steps;
  }
  if (delay_samples > 0) s.delay = delay_sum / delay_samples;
  return s;
}

}  // namespace groundsim
