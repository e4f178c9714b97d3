/*
 * Copyright (c) 2026 groundsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "groundsim/dqn.hpp"

#include <algorithm>
#include <stdexcept>

namespace groundsim {

ReplayBuffer::ReplayBuffer(int capacity) : capacity_(capacity) {
  if (capacity <= 0) throw std::invalid_argument("replay: capacity must be > 0");
  ring_.reserve(static_cast<size_t>(capacity));
}

void ReplayBuffer::push(Transition t) {
  if (static_cast<int>(ring_.size()) < capacity_) {
    ring_.push_back(std::move(t));
  } else {
    ring_[head_] = std::move(t);
    head_ = (head_ + 1) % ring_.size();
  }
}

const Transition& ReplayBuffer::sample(RngStream& rng) const {
  if (ring_.empty()) throw std::runtime_error("replay: insufficient buffer");
  return ring_[rng.uniform_int(static_cast<uint32_t>(ring_.size()))];
}

std::vector<const Transition*> ReplayBuffer::in_fifo_order() const {
  std::vector<const Transition*> out;
  out.reserve(ring_.size());
  for (size_t k = 0; k < ring_.size(); ++k)
    out.push_back(&ring_[(head_ + k) % ring_.size()]);
  return out;
}

DqnAgent::DqnAgent(const MlpSpec& spec, const DqnParams& params,
                   int target_sync_rate, RngStream init_rng, Vec input_scale)
    : params_(params), target_sync_rate_(target_sync_rate),
      q_(Mlp::init(spec, init_rng)), target_(q_),
      opt_(params.lr, params.grad_clip),
      input_scale_(std::move(input_scale)) {
  params_.validate();
  if (target_sync_rate_ <= 0)
    throw std::invalid_argument("dqn: target sync rate must be > 0");
  if (!input_scale_.empty() &&
      input_scale_.size() != static_cast<size_t>(spec.input_width()))
    throw std::invalid_argument("dqn: input scale width mismatch");
  eps_.value = params.epsilon;
  eps_.decay = params.epsilon_decay;
  eps_.floor = params.epsilon_min;
}

Vec DqnAgent::scaled(const Vec& obs) const {
  if (input_scale_.empty()) return obs;
  Vec v = obs;
  for (size_t i = 0; i < v.size(); ++i) v[i] *= input_scale_[i];
  return v;
}

int DqnAgent::argmax_q(const Vec& obs) const {
  const Vec q = q_.forward(scaled(obs));
  int best = 0;
  for (int i = 1; i < static_cast<int>(q.size()); ++i)
    if (q[i] > q[best]) best = i;  // ties keep the lowest index
  return best;
}

Vec DqnAgent::q_values(const Vec& obs) const { return q_.forward(scaled(obs)); }

int DqnAgent::act(const Vec& obs, double epsilon, RngStream& rng) const {
  if (epsilon > 0.0 && rng.uniform() < epsilon)
    return static_cast<int>(rng.uniform_int(
        static_cast<uint32_t>(q_.spec.output_width())));
  return argmax_q(obs);
}

double DqnAgent::train_batch(const ReplayBuffer& buffer, RngStream& rng) {
  if (buffer.size() == 0) throw std::runtime_error("replay: insufficient buffer");
  const int batch = params_.batch_size;
  MlpGrads grads = q_.zero_grads();
  double loss = 0.0;

  for (int i = 0; i < batch; ++i) {
    const Transition& t = buffer.sample(rng);
    double y = t.r;
    if (!t.done) {
      const Vec qn = target_.forward(scaled(t.s2));
      y += params_.gamma * *std::max_element(qn.begin(), qn.end());
    }
    MlpCache cache;
    const Vec q = q_.forward(scaled(t.s), cache);
    const double d = q[t.a] - y;
    loss += d * d;
    Vec out_grad(q.size(), 0.0);
    out_grad[t.a] = 2.0 * d / batch;
    mlp_backward(q_, cache, out_grad, grads);
  }
  loss /= batch;

  opt_.apply(q_.param_refs(), grads.refs());
  updates_ += 1;
  if (updates_ % target_sync_rate_ == 0) target_ = q_;
  return loss;
}

void DqnAgent::load_policy(Mlp q) {
  if (q.spec != q_.spec) throw std::invalid_argument("dqn: checkpoint spec mismatch");
  q_ = std::move(q);
  target_ = q_;
}

}  // namespace groundsim
