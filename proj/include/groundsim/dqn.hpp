/*
 * Copyright (c) 2026 groundsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <vector>

#include "groundsim/neural.hpp"
#include "groundsim/scenario.hpp"

namespace groundsim {

struct Transition {
  Vec s;
  int a = 0;
  Vec s2;
  double r = 0.0;
  bool done = false;
};

// FIFO ring; uniform sampling with replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity);

  void push(Transition t);
  size_t size() const { return ring_.size(); }
  int capacity() const { return capacity_; }
  const Transition& at(size_t i) const { return ring_[i]; }
  const Transition& sample(RngStream& rng) const;
  // Oldest-first iteration order, for tests that check eviction.
  std::vector<const Transition*> in_fifo_order() const;

 private:
  int capacity_;
  std::vector<Transition> ring_;
  size_t head_ = 0;  // next overwrite position once full
};

struct EpsilonSchedule {
  double value = 0.1;
  double decay = 0.99;  // multiplicative, applied per episode
  double floor = 0.01;

  void on_episode_end() { value = std::max(floor, value * decay); }
};

class DqnAgent {
 public:
  // `input_scale` is applied elementwise before the network (empty = none).
  DqnAgent(const MlpSpec& spec, const DqnParams& params, int target_sync_rate,
           RngStream init_rng, Vec input_scale = {});

  int act(const Vec& obs, double epsilon, RngStream& rng) const;
  int greedy(const Vec& obs) const { return argmax_q(obs); }
  Vec q_values(const Vec& obs) const;

  // One minibatch update: y = r + gamma * max_a Q_target(s',a) (y = r when
  // done), MSE on the taken action, Adam step. Syncs the target network
  // every `target_sync_rate` updates. Returns the batch loss.
  double train_batch(const ReplayBuffer& buffer, RngStream& rng);

  void force_sync() { target_ = q_; }
  long updates() const { return updates_; }

  EpsilonSchedule& epsilon() { return eps_; }
  const EpsilonSchedule& epsilon() const { return eps_; }

  Mlp& q() { return q_; }
  const Mlp& q() const { return q_; }
  const Mlp& target() const { return target_; }
  void load_policy(Mlp q);

 private:
  int argmax_q(const Vec& obs) const;
  Vec scaled(const Vec& obs) const;

  DqnParams params_;
  int target_sync_rate_;
  Mlp q_;
  Mlp target_;
  AdamState opt_;
  EpsilonSchedule eps_;
  Vec input_scale_;
  long updates_ = 0;
};

}  // namespace groundsim
