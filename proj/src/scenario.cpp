/*
 * Copyright (c) 2026 groundsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "groundsim/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace groundsim {

const char* to_token(Weather w) {
  switch (w) {
    case Weather::sunny: return "sunny";
    case Weather::rainy: return "rainy";
    case Weather::snowy: return "snowy";
  }
  throw std::logic_error("bad weather enum");
}

const char* to_token(RoadType r) {
  switch (r) {
    case RoadType::normal: return "normal";
    case RoadType::light_industry: return "light_industry";
    case RoadType::heavy_industry: return "heavy_industry";
  }
  throw std::logic_error("bad road enum");
}

Weather parse_weather(const std::string& token) {
  if (token == "sunny") return Weather::sunny;
  if (token == "rainy") return Weather::rainy;
  if (token == "snowy") return Weather::snowy;
  throw ConfigError("unknown weather: " + token);
}

RoadType parse_road_type(const std::string& token) {
  if (token == "normal") return RoadType::normal;
  if (token == "light_industry") return RoadType::light_industry;
  if (token == "heavy_industry") return RoadType::heavy_industry;
  throw ConfigError("unknown road type: " + token);
}

std::string display_name(RoadType r) {
  std::string s = to_token(r);
  std::replace(s.begin(), s.end(), '_', ' ');
  return s;
}

const char* to_token(Setting s) {
  switch (s) {
    case Setting::V0: return "V0";
    case Setting::V1: return "V1";
    case Setting::V2: return "V2";
    case Setting::V3: return "V3";
    case Setting::V4: return "V4";
  }
  throw std::logic_error("bad setting enum");
}

Setting parse_setting(const std::string& token) {
  if (token == "V0") return Setting::V0;
  if (token == "V1") return Setting::V1;
  if (token == "V2") return Setting::V2;
  if (token == "V3") return Setting::V3;
  if (token == "V4") return Setting::V4;
  throw ConfigError("unknown setting: " + token + " (expected V0..V4)");
}

DynamicsProfile builtin_profile(Setting name) {
  switch (name) {
    case Setting::V0: return {2.60, 4.50, 9.00, 0.00};
    case Setting::V1: return {1.00, 2.50, 6.00, 0.50};
    case Setting::V2: return {1.00, 2.50, 6.00, 0.75};
    case Setting::V3: return {0.75, 3.50, 6.00, 0.25};
    case Setting::V4: return {0.50, 1.50, 2.00, 0.50};
  }
  throw ConfigError("unknown profile name");
}

DomainContext default_context_for(Setting name) {
  switch (name) {
    case Setting::V0: return {Weather::sunny, RoadType::normal};
    case Setting::V1: return {Weather::sunny, RoadType::light_industry};
    case Setting::V2: return {Weather::sunny, RoadType::heavy_industry};
    case Setting::V3: return {Weather::rainy, RoadType::normal};
    case Setting::V4: return {Weather::snowy, RoadType::normal};
  }
  throw ConfigError("unknown setting");
}

void DynamicsProfile::validate() const {
  if (!(accel > 0)) throw ConfigError("accel: must be > 0");
  if (decel < 0) throw ConfigError("decel: must be >= 0");
  if (startup_delay < 0) throw ConfigError("startup_delay: must be >= 0");
  if (e_decel < decel) throw ConfigError("e_decel: must be >= decel");
}

void RoadNetwork::validate() const {
  if (!(speed_limit > 0)) throw ConfigError("speed_limit: must be > 0");
  if (vehicle_length <= 0) throw ConfigError("vehicle_length: must be > 0");
  if (min_gap < 0) throw ConfigError("min_gap: must be >= 0");
  if (!(lane_length > 10.0 * (vehicle_length + min_gap)))
    throw ConfigError("lane_length: must exceed 10*(vehicle_length+min_gap)");
}

void FlowSpec::validate(int horizon) const {
  for (double r : rates)
    if (r < 0) throw ConfigError("flow rate: must be >= 0");
  if (schedule) {
    for (const Arrival& a : *schedule) {
      if (a.time < 0 || a.time >= horizon)
        throw ConfigError("arrival time: must lie in [0, horizon)");
      if (a.approach < 0 || a.approach >= 4)
        throw ConfigError("arrival approach: out of range");
      if (a.lane < 0 || a.lane >= RoadNetwork::kLanesPerApproach)
        throw ConfigError("arrival lane: out of range");
    }
  }
}

void TrainerParams::validate() const {
  if (steps <= 0) throw ConfigError("steps: must be > 0");
  if (episodes <= 0) throw ConfigError("episodes: must be > 0");
  if (action_interval <= 0) throw ConfigError("action_interval: must be > 0");
  if (steps % action_interval != 0)
    throw ConfigError("steps: T not divisible by action_interval");
  if (yellow_length < 0 || yellow_length >= action_interval)
    throw ConfigError("yellow_length: must be < action_interval");
  if (learning_start < 0) throw ConfigError("learning_start: must be >= 0");
  if (buffer_size <= 0) throw ConfigError("buffer_size: must be > 0");
  if (update_model_rate <= 0) throw ConfigError("update_model_rate: must be > 0");
  if (update_target_rate <= 0) throw ConfigError("update_target_rate: must be > 0");
}

void DqnParams::validate() const {
  if (!(lr > 0)) throw ConfigError("lr: must be > 0");
  if (batch_size <= 0) throw ConfigError("batch_size: must be > 0");
  if (gamma < 0 || gamma > 1) throw ConfigError("gamma: must lie in [0,1]");
  if (epsilon < 0 || epsilon > 1) throw ConfigError("epsilon: must lie in [0,1]");
  if (epsilon_decay <= 0 || epsilon_decay > 1)
    throw ConfigError("epsilon_decay: must lie in (0,1]");
  if (epsilon_min < 0 || epsilon_min > 1)
    throw ConfigError("epsilon_min: must lie in [0,1]");
  if (!(grad_clip > 0)) throw ConfigError("grad_clip: must be > 0");
}

void GatParams::validate() const {
  if (pretrain_episodes < 0) throw ConfigError("pretrain_episodes: must be >= 0");
  if (forward_epochs <= 0) throw ConfigError("forward_epochs: must be > 0");
  if (inverse_epochs <= 0) throw ConfigError("inverse_epochs: must be > 0");
  if (!(forward_lr > 0)) throw ConfigError("forward_lr: must be > 0");
  if (!(inverse_lr > 0)) throw ConfigError("inverse_lr: must be > 0");
  if (policy_episodes_per_iter <= 0)
    throw ConfigError("policy_episodes_per_iter: must be > 0");
}

const char* to_token(OracleKind k) {
  switch (k) {
    case OracleKind::rule_table: return "rule";
    case OracleKind::replay_file: return "replay";
    case OracleKind::remote: return "remote";
  }
  throw std::logic_error("bad oracle kind");
}

OracleKind parse_oracle_kind(const std::string& token) {
  if (token == "rule") return OracleKind::rule_table;
  if (token == "replay") return OracleKind::replay_file;
  if (token == "remote") return OracleKind::remote;
  throw ConfigError("unknown oracle backend: " + token);
}

void OracleParams::validate() const {
  if (timeout_s <= 0) throw ConfigError("timeout_s: must be > 0");
  if (backend == OracleKind::replay_file && replay_path.empty())
    throw ConfigError("replay: replay path required for replay backend");
  if (backend == OracleKind::remote && endpoint.empty())
    throw ConfigError("endpoint: required for remote backend");
}

void ExperimentConfig::validate() const {
  sim_profile.validate();
  real_profile.validate();
  network.validate();
  flow.validate(trainer.steps);
  trainer.validate();
  dqn.validate();
  gat.validate();
  oracle.validate();
}

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& section, const std::string& key,
                 const std::string& value) {
  try {
    size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("[" + section + "] " + key + ": not a number: " + value);
  }
}

int to_int(const std::string& section, const std::string& key,
           const std::string& value) {
  try {
    size_t pos = 0;
    long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw ConfigError("[" + section + "] " + key + ": not an integer: " + value);
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

constexpr const char* kApproachTokens[4] = {"N", "E", "S", "W"};

int parse_approach(const std::string& token) {
  for (int i = 0; i < 4; ++i)
    if (token == kApproachTokens[i]) return i;
  throw ConfigError("unknown approach: " + token + " (expected N/E/S/W)");
}

Arrival parse_arrival_fields(const std::string& line) {
  std::stringstream ss(line);
  std::string t, ap, ln;
  if (!std::getline(ss, t, ',') || !std::getline(ss, ap, ',') ||
      !std::getline(ss, ln))
    throw ConfigError("arrival: expected time_s,approach,lane_index: " + line);
  Arrival a;
  a.time = to_double("flow", "arrival", trim(t));
  a.approach = parse_approach(trim(ap));
  a.lane = to_int("flow", "arrival", trim(ln));
  return a;
}

}  // namespace

std::vector<Arrival> load_flow_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open flow schedule: " + path);
  std::vector<Arrival> out;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    out.push_back(parse_arrival_fields(line));
  }
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line, section = "scenario";
  int lineno = 0;
  std::vector<Arrival> inline_arrivals;
  bool have_inline_arrivals = false;

  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));

    auto d = [&] { return to_double(section, key, value); };
    auto i = [&] { return to_int(section, key, value); };

    if (section == "scenario") {
      if (key == "seed") cfg.seed = static_cast<uint64_t>(to_int(section, key, value));
      else if (key == "profile") {
        Setting s = parse_setting(value);
        cfg.real_profile = builtin_profile(s);
        cfg.real_context = default_context_for(s);
      } else if (key == "sim_profile") cfg.sim_profile = builtin_profile(parse_setting(value));
      else if (key == "sim_accel") cfg.sim_profile.accel = d();
      else if (key == "sim_decel") cfg.sim_profile.decel = d();
      else if (key == "sim_e_decel") cfg.sim_profile.e_decel = d();
      else if (key == "sim_startup_delay") cfg.sim_profile.startup_delay = d();
      else if (key == "real_accel") cfg.real_profile.accel = d();
      else if (key == "real_decel") cfg.real_profile.decel = d();
      else if (key == "real_e_decel") cfg.real_profile.e_decel = d();
      else if (key == "real_startup_delay") cfg.real_profile.startup_delay = d();
      else if (key == "real_weather") cfg.real_context.weather = parse_weather(value);
      else if (key == "real_road") cfg.real_context.road = parse_road_type(value);
      else throw ConfigError("[scenario] unknown key: " + key);
    } else if (section == "network") {
      if (key == "lane_length") cfg.network.lane_length = d();
      else if (key == "speed_limit") cfg.network.speed_limit = d();
      else if (key == "vehicle_length") cfg.network.vehicle_length = d();
      else if (key == "min_gap") cfg.network.min_gap = d();
      else throw ConfigError("[network] unknown key: " + key);
    } else if (section == "flow") {
      if (key == "rate") cfg.flow.rates.fill(d());
      else if (key == "rate_n") cfg.flow.rates[0] = d();
      else if (key == "rate_e") cfg.flow.rates[1] = d();
      else if (key == "rate_s") cfg.flow.rates[2] = d();
      else if (key == "rate_w") cfg.flow.rates[3] = d();
      else if (key == "schedule") cfg.flow.schedule = load_flow_schedule(value);
      else if (key == "arrival") {
        inline_arrivals.push_back(parse_arrival_fields(value));
        have_inline_arrivals = true;
      } else throw ConfigError("[flow] unknown key: " + key);
    } else if (section == "trainer") {
      if (key == "steps") cfg.trainer.steps = i();
      else if (key == "episodes") cfg.trainer.episodes = i();
      else if (key == "action_interval") cfg.trainer.action_interval = i();
      else if (key == "yellow_length") cfg.trainer.yellow_length = i();
      else if (key == "learning_start") cfg.trainer.learning_start = i();
      else if (key == "buffer_size") cfg.trainer.buffer_size = i();
      else if (key == "update_model_rate") cfg.trainer.update_model_rate = i();
      else if (key == "update_target_rate") cfg.trainer.update_target_rate = i();
      else throw ConfigError("[trainer] unknown key: " + key);
    } else if (section == "dqn") {
      if (key == "lr") cfg.dqn.lr = d();
      else if (key == "batch_size") cfg.dqn.batch_size = i();
      else if (key == "gamma") cfg.dqn.gamma = d();
      else if (key == "epsilon") cfg.dqn.epsilon = d();
      else if (key == "epsilon_decay") cfg.dqn.epsilon_decay = d();
      else if (key == "epsilon_min") cfg.dqn.epsilon_min = d();
      else if (key == "grad_clip") cfg.dqn.grad_clip = d();
      else throw ConfigError("[dqn] unknown key: " + key);
    } else if (section == "gat") {
      if (key == "pretrain_episodes") cfg.gat.pretrain_episodes = i();
      else if (key == "forward_epochs") cfg.gat.forward_epochs = i();
      else if (key == "inverse_epochs") cfg.gat.inverse_epochs = i();
      else if (key == "forward_lr") cfg.gat.forward_lr = d();
      else if (key == "inverse_lr") cfg.gat.inverse_lr = d();
      else if (key == "policy_episodes_per_iter") cfg.gat.policy_episodes_per_iter = i();
      else throw ConfigError("[gat] unknown key: " + key);
    } else if (section == "oracle") {
      if (key == "backend") cfg.oracle.backend = parse_oracle_kind(value);
      else if (key == "table") cfg.oracle.table_path = value;
      else if (key == "replay") cfg.oracle.replay_path = value;
      else if (key == "endpoint") cfg.oracle.endpoint = value;
      else if (key == "model") cfg.oracle.model = value;
      else if (key == "timeout_s") cfg.oracle.timeout_s = i();
      else if (key == "cache") cfg.oracle.cache_path = value;
      else throw ConfigError("[oracle] unknown key: " + key);
    } else {
      throw ConfigError("unknown section: [" + section + "]");
    }
  }

  if (have_inline_arrivals) cfg.flow.schedule = std::move(inline_arrivals);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[scenario]\n";
  out << "seed = " << cfg.seed << "\n";
  out << "sim_accel = " << fmt(cfg.sim_profile.accel) << "\n";
  out << "sim_decel = " << fmt(cfg.sim_profile.decel) << "\n";
  out << "sim_e_decel = " << fmt(cfg.sim_profile.e_decel) << "\n";
  out << "sim_startup_delay = " << fmt(cfg.sim_profile.startup_delay) << "\n";
  out << "real_accel = " << fmt(cfg.real_profile.accel) << "\n";
  out << "real_decel = " << fmt(cfg.real_profile.decel) << "\n";
  out << "real_e_decel = " << fmt(cfg.real_profile.e_decel) << "\n";
  out << "real_startup_delay = " << fmt(cfg.real_profile.startup_delay) << "\n";
  out << "real_weather = " << to_token(cfg.real_context.weather) << "\n";
  out << "real_road = " << to_token(cfg.real_context.road) << "\n";
  out << "\n[network]\n";
  out << "lane_length = " << fmt(cfg.network.lane_length) << "\n";
  out << "speed_limit = " << fmt(cfg.network.speed_limit) << "\n";
  out << "vehicle_length = " << fmt(cfg.network.vehicle_length) << "\n";
  out << "min_gap = " << fmt(cfg.network.min_gap) << "\n";
  out << "\n[flow]\n";
  out << "rate_n = " << fmt(cfg.flow.rates[0]) << "\n";
  out << "rate_e = " << fmt(cfg.flow.rates[1]) << "\n";
  out << "rate_s = " << fmt(cfg.flow.rates[2]) << "\n";
  out << "rate_w = " << fmt(cfg.flow.rates[3]) << "\n";
  if (cfg.flow.schedule) {
    for (const Arrival& a : *cfg.flow.schedule)
      out << "arrival = " << fmt(a.time) << "," << kApproachTokens[a.approach]
          << "," << a.lane << "\n";
  }
  out << "\n[trainer]\n";
  out << "steps = " << cfg.trainer.steps << "\n";
  out << "episodes = " << cfg.trainer.episodes << "\n";
  out << "action_interval = " << cfg.trainer.action_interval << "\n";
  out << "yellow_length = " << cfg.trainer.yellow_length << "\n";
  out << "learning_start = " << cfg.trainer.learning_start << "\n";
  out << "buffer_size = " << cfg.trainer.buffer_size << "\n";
  out << "update_model_rate = " << cfg.trainer.update_model_rate << "\n";
  out << "update_target_rate = " << cfg.trainer.update_target_rate << "\n";
  out << "\n[dqn]\n";
  out << "lr = " << fmt(cfg.dqn.lr) << "\n";
  out << "batch_size = " << cfg.dqn.batch_size << "\n";
  out << "gamma = " << fmt(cfg.dqn.gamma) << "\n";
  out << "epsilon = " << fmt(cfg.dqn.epsilon) << "\n";
  out << "epsilon_decay = " << fmt(cfg.dqn.epsilon_decay) << "\n";
  out << "epsilon_min = " << fmt(cfg.dqn.epsilon_min) << "\n";
  out << "grad_clip = " << fmt(cfg.dqn.grad_clip) << "\n";
  out << "\n[gat]\n";
  out << "pretrain_episodes = " << cfg.gat.pretrain_episodes << "\n";
  out << "forward_epochs = " << cfg.gat.forward_epochs << "\n";
  out << "inverse_epochs = " << cfg.gat.inverse_epochs << "\n";
  out << "forward_lr = " << fmt(cfg.gat.forward_lr) << "\n";
  out << "inverse_lr = " << fmt(cfg.gat.inverse_lr) << "\n";
  out << "policy_episodes_per_iter = " << cfg.gat.policy_episodes_per_iter << "\n";
  out << "\n[oracle]\n";
  out << "backend = " << to_token(cfg.oracle.backend) << "\n";
  if (!cfg.oracle.table_path.empty()) out << "table = " << cfg.oracle.table_path << "\n";
  if (!cfg.oracle.replay_path.empty()) out << "replay = " << cfg.oracle.replay_path << "\n";
  if (!cfg.oracle.endpoint.empty()) out << "endpoint = " << cfg.oracle.endpoint << "\n";
  out << "model = " << cfg.oracle.model << "\n";
  out << "timeout_s = " << cfg.oracle.timeout_s << "\n";
  if (!cfg.oracle.cache_path.empty()) out << "cache = " << cfg.oracle.cache_path << "\n";
  return out.str();
}

}  // namespace groundsim
