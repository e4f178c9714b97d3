/*
 * Copyright (c) 2026 groundsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <array>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "groundsim/rng.hpp"
#include "groundsim/scenario.hpp"

namespace groundsim {

// Lane indexing is fixed everywhere: approach (0=N 1=E 2=S 3=W) * 3 +
// movement (0=left 1=through 2=right).
constexpr int kNumLanes = 12;
constexpr int kNumPhases = 4;
// Vehicles slower than this count as waiting (queue metric).
constexpr double kWaitingSpeed = 0.1;

// Phase 0: N/S through+right, 1: N/S left, 2: E/W through+right, 3: E/W left.
bool phase_permits(int phase, int lane);

struct Observation {
  std::array<int, kNumLanes> lane_counts{};
  int phase = 0;  // pending phase during yellow

  std::vector<double> to_vector() const;  // 12 counts + 4-dim one-hot
  bool operator==(const Observation&) const = default;
};

struct Vehicle {
  int id = 0;
  double position = 0.0;  // m from lane start; stop line at lane_length
  double speed = 0.0;
  int entered_at = 0;
  double startup_timer = 0.0;  // s left before a stopped vehicle may move
  double startup_scale = 1.0;  // accel scale for the first post-hold tick
  int waiting_seconds = 0;
};

struct ExitRecord {
  int id = 0;
  int entered_at = 0;
  int exited_at = 0;
  int waiting_seconds = 0;
};

struct LaneState {
  std::deque<Vehicle> vehicles;  // front-to-back, positions strictly decreasing
  int pending_arrivals = 0;      // spawns deferred until the entrance has room
};

struct SignalController {
  int current_phase = 0;
  int yellow_remaining = 0;            // s; all movements red while > 0
  std::optional<int> pending_phase;    // set iff yellow_remaining > 0
};

// Stopping distance if the vehicle moves at `u` this tick and then brakes
// by `b` each subsequent tick (includes the current tick's travel).
double braking_travel_total(double u, double b);
// Minimum distance a vehicle at speed `v` can still travel over all future
// ticks when per-tick deceleration is capped at `b`.
double braking_travel_future(double v, double b);
// Largest u >= 0 with braking_travel_total(u, b) <= budget.
double solve_safe_speed(double budget, double b);

// Deterministic discrete-time microsimulator of one signalized
// intersection; dt is fixed at 1 s. Instantiated twice (different
// DynamicsProfile) to realize the training and deployment worlds.
class Engine {
 public:
  Engine(const RoadNetwork& net, const DynamicsProfile& profile,
         const FlowSpec& flow, RngStream arrivals, int yellow_length = 5);

  void step();
  void set_phase(int phase);

  int queue_length(int lane) const;
  int total_queue() const;
  Observation observe() const;

  int clock() const { return clock_; }
  int spawned() const { return spawned_; }
  int in_network() const;
  const std::vector<ExitRecord>& exited() const { return exited_; }
  const LaneState& lane(int i) const { return lanes_[i]; }
  const SignalController& controller() const { return controller_; }
  const RoadNetwork& network() const { return net_; }
  const DynamicsProfile& profile() const { return profile_; }

  // mean speed over vehicles in network; count receives the vehicle count
  double mean_speed(int* count) const;

  // `clock,phase,total_queue,in_network,exited` per tick when attached
  void attach_trace(std::function<void(const std::string&)> sink);

  // Test hook: place a vehicle directly; counts as spawned.
  void inject_vehicle(int lane, double position, double speed,
                      double startup_timer = 0.0);

 private:
  void update_vehicles();
  void process_arrivals();
  void signal_countdown();
  void activate_phase(int phase);
  bool movement_permitted(int lane) const;
  void try_spawn(int lane);

  RoadNetwork net_;
  DynamicsProfile profile_;
  FlowSpec flow_;
  int yellow_length_ = 5;
  RngStream arrivals_;
  std::vector<Arrival> schedule_;  // sorted by spawn tick, stable
  size_t schedule_pos_ = 0;

  std::array<LaneState, kNumLanes> lanes_;
  SignalController controller_;
  std::vector<ExitRecord> exited_;
  int clock_ = 0;
  int spawned_ = 0;
  int next_id_ = 0;
  std::function<void(const std::string&)> trace_;
};

}  // namespace groundsim
