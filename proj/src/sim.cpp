/*
 * Copyright (c) 2026 groundsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "groundsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace groundsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinBrake = 1e-12;
}  // namespace

bool phase_permits(int phase, int lane) {
  const int approach = lane / 3;
  const int movement = lane % 3;  // 0=left 1=through 2=right
  const bool ns = (approach == 0 || approach == 2);
  switch (phase) {
    case 0: return ns && movement != 0;
    case 1: return ns && movement == 0;
    case 2: return !ns && movement != 0;
    case 3: return !ns && movement == 0;
    default: return false;
  }
}

std::vector<double> Observation::to_vector() const {
  std::vector<double> v(kNumLanes + kNumPhases, 0.0);
  for (int i = 0; i < kNumLanes; ++i) v[i] = static_cast<double>(lane_counts[i]);
  v[kNumLanes + phase] = 1.0;
  return v;
}

double braking_travel_total(double u, double b) {
  if (u <= 0) return 0.0;
  if (b < kMinBrake) return kInf;
  double total = 0.0;
  for (double s = u; s > 0; s -= b) total += s;
  return total;
}

double braking_travel_future(double v, double b) {
  if (v <= 0) return 0.0;
  if (b < kMinBrake) return kInf;
  double total = 0.0;
  for (double s = v - b; s > 0; s -= b) total += s;
  return total;
}

double solve_safe_speed(double budget, double b) {
  if (budget == kInf) return kInf;
  if (budget <= 0 || b < kMinBrake) return 0.0;
  // total(u) = (m+1)u - b*m(m+1)/2 on u in [mb, (m+1)b); invert piecewise
  double m = std::floor((std::sqrt(1.0 + 8.0 * budget / b) - 1.0) / 2.0);
  if (m < 0) m = 0;
  while (m > 0 && b * m * (m + 1) / 2 > budget) m -= 1;
  while (b * (m + 1) * (m + 2) / 2 <= budget) m += 1;
  return (budget + b * m * (m + 1) / 2) / (m + 1);
}

Engine::Engine(const RoadNetwork& net, const DynamicsProfile& profile,
               const FlowSpec& flow, RngStream arrivals, int yellow_length)
    : net_(net), profile_(profile), flow_(flow), yellow_length_(yellow_length),
      arrivals_(arrivals) {
  net_.validate();
  profile_.validate();
  if (yellow_length_ < 0) throw ConfigError("yellow_length: must be >= 0");
  if (flow_.schedule) {
    schedule_ = *flow_.schedule;
    std::stable_sort(schedule_.begin(), schedule_.end(),
                     [](const Arrival& a, const Arrival& b) {
                       return std::floor(a.time) < std::floor(b.time);
                     });
  }
}

bool Engine::movement_permitted(int lane) const {
  if (controller_.yellow_remaining > 0) return false;
  return phase_permits(controller_.current_phase, lane);
}

void Engine::set_phase(int phase) {
  if (phase < 0 || phase >= kNumPhases)
    throw std::invalid_argument("set_phase: phase out of range");
  if (controller_.yellow_remaining > 0)
    throw std::runtime_error("set_phase: phase change during yellow");
  if (phase == controller_.current_phase) return;
  if (yellow_length_ == 0) {
    activate_phase(phase);
    return;
  }
  // yellow_length ticks of all-red clearance, then the switch
  controller_.yellow_remaining = yellow_length_;
  controller_.pending_phase = phase;
}

void Engine::activate_phase(int phase) {
  controller_.current_phase = phase;
  controller_.pending_phase.reset();
  // Stopped vehicles whose movement just became permitted react after
  // the profile's startup delay.
  for (int l = 0; l < kNumLanes; ++l) {
    if (!phase_permits(phase, l)) continue;
    for (Vehicle& v : lanes_[l].vehicles) {
      if (v.speed == 0.0) {
        v.startup_timer = profile_.startup_delay;
        v.startup_scale = 1.0;
      }
    }
  }
}

void Engine::update_vehicles() {
  const double vmax = net_.speed_limit;
  const double len = net_.vehicle_length;

  for (int l = 0; l < kNumLanes; ++l) {
    auto& q = lanes_[l].vehicles;
    const bool green = movement_permitted(l);

    for (size_t i = 0; i < q.size(); ++i) {
      Vehicle& v = q[i];

      if (v.speed == 0.0 && v.startup_timer > 0.0) {
        // Holds for ceil(x) ticks; a fractional final hold scales the
        // first post-hold acceleration by (1 - frac(x)).
        if (v.startup_timer < 1.0) v.startup_scale = 1.0 - v.startup_timer;
        v.startup_timer = std::max(0.0, v.startup_timer - 1.0);
        v.waiting_seconds += 1;
        continue;
      }

      double budget;
      if (i == 0) {
        // Head: unconstrained on green, otherwise the stop line acts as a
        // stationary leader whose rear sits min_gap beyond the lane end.
        budget = green ? kInf : net_.lane_length - v.position;
      } else {
        const Vehicle& leader = q[i - 1];  // already moved this tick
        budget = (leader.position - len - v.position) - net_.min_gap +
                 braking_travel_future(leader.speed, profile_.e_decel);
      }

      const double v_safe = solve_safe_speed(budget, profile_.decel);
      double next = std::min({v.speed + profile_.accel * v.startup_scale,
                              vmax, v_safe});
      // per-tick deceleration capped at e_decel
      next = std::max(next, v.speed - profile_.e_decel);
      next = std::max(next, 0.0);
      v.startup_scale = 1.0;

      v.speed = next;
      v.position += next;
      if (next < kWaitingSpeed) v.waiting_seconds += 1;
    }

    while (!q.empty() && q.front().position > net_.lane_length) {
      const Vehicle& v = q.front();
      exited_.push_back({v.id, v.entered_at, clock_ + 1, v.waiting_seconds});
      q.pop_front();
    }
  }
}

void Engine::try_spawn(int lane) {
  auto& st = lanes_[lane];
  while (st.pending_arrivals > 0) {
    double speed = net_.speed_limit;
    if (!st.vehicles.empty()) {
      const Vehicle& last = st.vehicles.back();
      const double gap = last.position - net_.vehicle_length;
      if (gap < net_.min_gap) break;  // no room at the entrance
      const double budget = gap - net_.min_gap +
          braking_travel_future(last.speed, profile_.e_decel);
      speed = std::min(speed, solve_safe_speed(budget, profile_.decel));
    }
    Vehicle v;
    v.id = next_id_++;
    v.position = 0.0;
    v.speed = speed;
    v.entered_at = clock_ + 1;
    st.vehicles.push_back(v);
    st.pending_arrivals -= 1;
    spawned_ += 1;
  }
}

void Engine::process_arrivals() {
  if (flow_.schedule) {
    while (schedule_pos_ < schedule_.size() &&
           static_cast<int>(std::floor(schedule_[schedule_pos_].time)) == clock_) {
      const Arrival& a = schedule_[schedule_pos_++];
      lanes_[a.approach * 3 + a.lane].pending_arrivals += 1;
    }
  } else {
    for (int ap = 0; ap < 4; ++ap) {
      const int n = arrivals_.poisson(flow_.rates[ap]);
      for (int k = 0; k < n; ++k) {
        const int lane = static_cast<int>(arrivals_.uniform_int(3));
        lanes_[ap * 3 + lane].pending_arrivals += 1;
      }
    }
  }
  for (int l = 0; l < kNumLanes; ++l) try_spawn(l);
}

void Engine::signal_countdown() {
  if (controller_.yellow_remaining == 0) return;
  controller_.yellow_remaining -= 1;
  if (controller_.yellow_remaining > 0) return;
  activate_phase(*controller_.pending_phase);
}

void Engine::step() {
  update_vehicles();
  process_arrivals();
  signal_countdown();
  clock_ += 1;
  if (trace_) {
    std::ostringstream os;
    os << clock_ << ',' << observe().phase << ',' << total_queue() << ','
       << in_network() << ',' << exited_.size();
    trace_(os.str());
  }
}

int Engine::queue_length(int lane) const {
  if (lane < 0 || lane >= kNumLanes)
    throw std::invalid_argument("queue_length: lane out of range");
  int n = 0;
  for (const Vehicle& v : lanes_[lane].vehicles)
    if (v.speed < kWaitingSpeed) ++n;
  return n;
}

int Engine::total_queue() const {
  int n = 0;
  for (int l = 0; l < kNumLanes; ++l) n += queue_length(l);
  return n;
}

Observation Engine::observe() const {
  Observation obs;
  for (int l = 0; l < kNumLanes; ++l)
    obs.lane_counts[l] = static_cast<int>(lanes_[l].vehicles.size());
  obs.phase = controller_.pending_phase ? *controller_.pending_phase
                                        : controller_.current_phase;
  return obs;
}

int Engine::in_network() const {
  int n = 0;
  for (int l = 0; l < kNumLanes; ++l)
    n += static_cast<int>(lanes_[l].vehicles.size());
  return n;
}

double Engine::mean_speed(int* count) const {
  double sum = 0.0;
  int n = 0;
  for (int l = 0; l < kNumLanes; ++l)
    for (const Vehicle& v : lanes_[l].vehicles) {
      sum += v.speed;
      ++n;
    }
  if (count) *count = n;
  return n > 0 ? sum / n : 0.0;
}

void Engine::attach_trace(std::function<void(const std::string&)> sink) {
  trace_ = std::move(sink);
}

void Engine::inject_vehicle(int lane, double position, double speed,
                            double startup_timer) {
  if (lane < 0 || lane >= kNumLanes)
    throw std::invalid_argument("inject_vehicle: lane out of range");
  Vehicle v;
  v.id = next_id_++;
  v.position = position;
  v.speed = speed;
  v.entered_at = clock_;
  v.startup_timer = startup_timer;
  auto& q = lanes_[lane].vehicles;
  auto it = std::find_if(q.begin(), q.end(), [&](const Vehicle& w) {
    return w.position < position;
  });
  q.insert(it, v);
  spawned_ += 1;
}

}  // namespace groundsim
