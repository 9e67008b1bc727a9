// Copyright 2026 The airdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "airdp/config.h"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/string_view.h"
#include "absl/strings/strip.h"
#include "airdp/fedsgd_sim.h"
#include "json.hpp"

namespace airdp {
namespace internal {
const std::map<std::string, std::string>& PresetSources();
}  // namespace internal

namespace {

using json = nlohmann::json;

constexpr absl::string_view kConfigLinePrefix = "# config: ";

absl::Status Error(absl::string_view path, absl::string_view what) {
  return absl::InvalidArgumentError(absl::StrCat(path, ": ", what));
}

// Allowed top-level keys and their defaults.
json Defaults(Experiment experiment) {
  switch (experiment) {
    case Experiment::kPrivacySweep:
      return {{"master_seed", 0},
              {"users_grid", {100, 1000, 10000, 100000, 1000000, 10000000}},
              {"lipschitz", 1.0},
              {"noise_var", 9.0},
              {"delta_local", 1e-4},
              {"delta_prime", 1e-4},
              {"fit_range", {1e5, 1e7}}};
    case Experiment::kCompositionSweep:
      return {{"master_seed", 0},
              {"users_grid", {1000, 10000, 100000, 1000000}},
              {"rounds_grid", {10, 50, 100}},
              {"lipschitz", 1.0},
              {"noise_var", 9.0},
              {"delta_local", 1e-4},
              {"delta_prime", 1e-4},
              {"delta_tilde", 1e-5}};
    case Experiment::kBoundCurves:
      return {{"master_seed", 0},
              {"users", 20},
              {"rounds_grid", {100, 200, 500, 1000, 2000, 4000}},
              {"lipschitz", 2.0},
              {"noise_var", 0.1},
              {"receiver_noise_var", 1.0},
              {"delta_prime", 1e-5},
              {"sampling", {{"type", "uniform"}, {"p", 0.5}}},
              {"task", {{"type", "quadratic"}}}};
    case Experiment::kTrain:
      return {{"master_seed", 0},
              {"trials", 1},
              {"users", 20},
              {"rounds", 1000},
              {"lipschitz", 2.0},
              {"noise_var", 0.1},
              {"receiver_noise_var", 1.0},
              {"delta_local", 1e-5},
              {"delta_prime", 1e-5},
              {"delta_prime_rule", "adaptive"},
              {"delta_tilde", 1e-5},
              {"include_n0", true},
              {"sampling", {{"type", "uniform"}, {"p", 0.5}}},
              {"channel", json::object()},
              {"task", {{"type", "quadratic"}}},
              {"alpha_mode", "ideal"},
              {"estimators", {"unknown", "known"}},
              {"learning_rate", {{"schedule", "inverse"}}},
              {"batch_size", 1},
              {"checkpoints", json::array()},
              {"write_traces", true}};
    case Experiment::kLocalDpTable:
      return {{"master_seed", 0},
              {"users", 200},
              {"lipschitz_values", {1.0, 0.1}},
              {"noise_var", 0.1},
              {"receiver_noise_var", 1.0},
              {"delta_local", 1e-5},
              {"delta_prime", 1e-5},
              {"delta_prime_rule", "adaptive"},
              {"include_n0", true},
              {"probabilities", {0.3, 0.9}},
              {"h_threshold", 2.0},
              {"channel", json::object()},
              {"monte_carlo_rounds", 400}};
  }
  return json::object();
}

// Objects carrying a "type" field are replaced when the type changes and
// merged otherwise.
void Overlay(json& base, const json& patch) {
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    json& slot = base[it.key()];
    const json& value = it.value();
    if (slot.is_object() && value.is_object()) {
      const bool retyped = value.contains("type") && slot.contains("type") &&
                           value["type"] != slot["type"];
      if (retyped) {
        slot = value;
      } else {
        Overlay(slot, value);
      }
    } else {
      slot = value;
    }
  }
}

absl::Status CheckKeys(const json& obj, absl::string_view path,
                       const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.contains(it.key())) {
      return Error(path,
                   absl::StrCat("unknown key \"", it.key(),
                                "\"; allowed: ", absl::StrJoin(allowed, ", ")));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<double> GetNumber(const json& obj, const std::string& key,
                                 absl::string_view path) {
  const json& v = obj.at(key);
  if (!v.is_number())
    return Error(path, absl::StrCat(key, " must be a number"));
  const double x = v.get<double>();
  if (!std::isfinite(x))
    return Error(path, absl::StrCat(key, " must be finite"));
  return x;
}

enum class Range {
  kAny,
  kNonNegative,
  kPositive,
  kOpenUnit,
  kHalfOpenUnit,
  kClosedUnit
};

bool InRange(double x, Range r) {
  switch (r) {
    case Range::kAny:
      return true;
    case Range::kNonNegative:
      return x >= 0.0;
    case Range::kPositive:
      return x > 0.0;
    case Range::kOpenUnit:
      return x > 0.0 && x < 1.0;
    case Range::kHalfOpenUnit:
      return x > 0.0 && x <= 1.0;
    case Range::kClosedUnit:
      return x >= 0.0 && x <= 1.0;
  }
  return false;
}

absl::string_view RangeText(Range r) {
  switch (r) {
    case Range::kAny:
      return "finite";
    case Range::kNonNegative:
      return ">= 0";
    case Range::kPositive:
      return "> 0";
    case Range::kOpenUnit:
      return "in (0, 1)";
    case Range::kHalfOpenUnit:
      return "in (0, 1]";
    case Range::kClosedUnit:
      return "in [0, 1]";
  }
  return "";
}

absl::StatusOr<double> GetReal(const json& obj, const std::string& key,
                               absl::string_view path, Range range) {
  absl::StatusOr<double> x = GetNumber(obj, key, path);
  if (!x.ok()) return x.status();
  if (!InRange(*x, range)) {
    return Error(
        path, absl::StrCat(key, " must be ", RangeText(range), ", got ", *x));
  }
  return *x;
}

absl::StatusOr<int64_t> ToInteger(const json& v, absl::string_view what,
                                  absl::string_view path, int64_t min_value) {
  int64_t n = 0;
  if (v.is_number_integer()) {
    if (v.is_number_unsigned() &&
        v.get<uint64_t>() >
            static_cast<uint64_t>(std::numeric_limits<int64_t>::max())) {
      return Error(path, absl::StrCat(what, " is too large"));
    }
    n = v.get<int64_t>();
  } else if (v.is_number_float()) {
    const double x = v.get<double>();
    if (!(std::isfinite(x) && x == std::floor(x) && std::fabs(x) < 9e15)) {
      return Error(path, absl::StrCat(what, " must be an integer"));
    }
    n = static_cast<int64_t>(x);
  } else {
    return Error(path, absl::StrCat(what, " must be an integer"));
  }
  if (n < min_value) {
    return Error(path,
                 absl::StrCat(what, " must be >= ", min_value, ", got ", n));
  }
  return n;
}

absl::StatusOr<int64_t> GetInteger(json& obj, const std::string& key,
                                   absl::string_view path, int64_t min_value) {
  absl::StatusOr<int64_t> n = ToInteger(obj.at(key), key, path, min_value);
  if (n.ok()) obj[key] = *n;
  return n;
}

absl::StatusOr<bool> GetBool(const json& obj, const std::string& key,
                             absl::string_view path) {
  const json& v = obj.at(key);
  if (!v.is_boolean()) return Error(path, absl::StrCat(key, " must be a bool"));
  return v.get<bool>();
}

absl::StatusOr<std::string> GetChoice(const json& obj, const std::string& key,
                                      absl::string_view path,
                                      const std::set<std::string>& choices) {
  const json& v = obj.at(key);
  if (!v.is_string() || !choices.contains(v.get<std::string>())) {
    return Error(
        path,
        absl::StrCat(key, " must be one of: ", absl::StrJoin(choices, ", ")));
  }
  return v.get<std::string>();
}

absl::StatusOr<std::vector<double>> GetRealList(const json& obj,
                                                const std::string& key,
                                                absl::string_view path,
                                                Range range,
                                                bool allow_empty = false) {
  const json& v = obj.at(key);
  if (!v.is_array() || (!allow_empty && v.empty())) {
    return Error(path, absl::StrCat(key, " must be a nonempty array"));
  }
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number() || !std::isfinite(e.get<double>()) ||
        !InRange(e.get<double>(), range)) {
      return Error(path, absl::StrCat("every entry of ", key, " must be ",
                                      RangeText(range)));
    }
    out.push_back(e.get<double>());
  }
  return out;
}

absl::StatusOr<std::vector<int64_t>> GetIntegerList(json& obj,
                                                    const std::string& key,
                                                    absl::string_view path,
                                                    int64_t min_value,
                                                    bool allow_empty = false) {
  json& v = obj.at(key);
  if (!v.is_array() || (!allow_empty && v.empty())) {
    return Error(path, absl::StrCat(key, " must be a nonempty array"));
  }
  std::vector<int64_t> out;
  for (json& e : v) {
    absl::StatusOr<int64_t> n =
        ToInteger(e, absl::StrCat("entry of ", key), path, min_value);
    if (!n.ok()) return n.status();
    e = *n;
    out.push_back(*n);
  }
  return out;
}

absl::StatusOr<SamplingSpec> ParseSampling(json& obj, Experiment experiment) {
  constexpr absl::string_view kPath = "sampling";
  if (!obj.is_object() || !obj.contains("type")) {
    return Error(kPath, "must be an object with a \"type\" field");
  }
  std::set<std::string> types = {"uniform", "optimal"};
  if (experiment == Experiment::kTrain) {
    types.insert({"schedule", "channel_aware", "explicit"});
  }
  absl::StatusOr<std::string> type = GetChoice(obj, "type", kPath, types);
  if (!type.ok()) return type.status();
  SamplingSpec spec;
  absl::Status keys;
  if (*type == "uniform") {
    spec.type = SamplingSpec::Type::kUniform;
    if (!obj.contains("p")) return Error(kPath, "uniform sampling needs p");
    keys = CheckKeys(obj, kPath, {"type", "p"});
    if (!keys.ok()) return keys;
    absl::StatusOr<double> p = GetReal(obj, "p", kPath, Range::kHalfOpenUnit);
    if (!p.ok()) return p.status();
    spec.p = *p;
  } else if (*type == "optimal") {
    spec.type = SamplingSpec::Type::kOptimal;
    keys = CheckKeys(obj, kPath, {"type"});
    if (!keys.ok()) return keys;
  } else if (*type == "schedule") {
    spec.type = SamplingSpec::Type::kSchedule;
    if (!obj.contains("p")) return Error(kPath, "schedule sampling needs p");
    keys = CheckKeys(obj, kPath, {"type", "p"});
    if (!keys.ok()) return keys;
    absl::StatusOr<std::vector<double>> p =
        GetRealList(obj, "p", kPath, Range::kClosedUnit);
    if (!p.ok()) return p.status();
    spec.schedule = *std::move(p);
  } else if (*type == "channel_aware") {
    spec.type = SamplingSpec::Type::kChannelAware;
    if (!obj.contains("h_threshold")) {
      return Error(kPath, "channel_aware sampling needs h_threshold");
    }
    keys = CheckKeys(obj, kPath, {"type", "h_threshold"});
    if (!keys.ok()) return keys;
    absl::StatusOr<double> h =
        GetReal(obj, "h_threshold", kPath, Range::kPositive);
    if (!h.ok()) return h.status();
    spec.h_threshold = *h;
  } else {
    spec.type = SamplingSpec::Type::kExplicit;
    if (!obj.contains("p") || !obj["p"].is_array() || obj["p"].empty()) {
      return Error(kPath, "explicit sampling needs a nonempty matrix p");
    }
    keys = CheckKeys(obj, kPath, {"type", "p"});
    if (!keys.ok()) return keys;
    for (json& row : obj["p"]) {
      json wrapper = {{"row", row}};
      absl::StatusOr<std::vector<double>> r =
          GetRealList(wrapper, "row", kPath, Range::kClosedUnit);
      if (!r.ok()) return r.status();
      spec.matrix.push_back(*std::move(r));
    }
  }
  return spec;
}

absl::StatusOr<ChannelSpec> ParseChannel(json& obj, int64_t users) {
  constexpr absl::string_view kPath = "channel";
  if (!obj.is_object()) return Error(kPath, "must be an object");
  absl::Status keys =
      CheckKeys(obj, kPath,
                {"fading", "rician_gamma", "temporal_rho", "snr_db", "groups"});
  if (!keys.ok()) return keys;
  if (!obj.contains("fading")) obj["fading"] = true;
  if (!obj.contains("rician_gamma")) obj["rician_gamma"] = 5.0;
  if (!obj.contains("temporal_rho")) obj["temporal_rho"] = 0.1;
  if (!obj.contains("snr_db") && !obj.contains("groups")) obj["snr_db"] = 10.0;
  if (obj.contains("snr_db") && obj.contains("groups")) {
    return Error(kPath, "give either snr_db or groups, not both");
  }
  ChannelSpec spec;
  absl::StatusOr<bool> fading = GetBool(obj, "fading", kPath);
  if (!fading.ok()) return fading.status();
  spec.fading = *fading;
  absl::StatusOr<double> gamma =
      GetReal(obj, "rician_gamma", kPath, Range::kPositive);
  if (!gamma.ok()) return gamma.status();
  spec.rician_gamma = *gamma;
  absl::StatusOr<double> rho =
      GetReal(obj, "temporal_rho", kPath, Range::kNonNegative);
  if (!rho.ok()) return rho.status();
  if (*rho >= 1.0) return Error(kPath, "temporal_rho must be < 1");
  spec.temporal_rho = *rho;
  if (obj.contains("snr_db")) {
    absl::StatusOr<double> snr = GetReal(obj, "snr_db", kPath, Range::kAny);
    if (!snr.ok()) return snr.status();
    spec.snr_db.assign(users, *snr);
    return spec;
  }
  if (!obj["groups"].is_array() || obj["groups"].empty()) {
    return Error(kPath, "groups must be a nonempty array");
  }
  for (json& group : obj["groups"]) {
    const std::string gpath = "channel.groups";
    if (!group.is_object() || !group.contains("count") ||
        !group.contains("snr_db")) {
      return Error(gpath, "every group needs count and snr_db");
    }
    if (absl::Status s = CheckKeys(group, gpath, {"count", "snr_db"});
        !s.ok()) {
      return s;
    }
    absl::StatusOr<int64_t> count = GetInteger(group, "count", gpath, 1);
    if (!count.ok()) return count.status();
    absl::StatusOr<double> snr = GetReal(group, "snr_db", gpath, Range::kAny);
    if (!snr.ok()) return snr.status();
    spec.snr_db.insert(spec.snr_db.end(), *count, *snr);
  }
  if (static_cast<int64_t>(spec.snr_db.size()) != users) {
    return Error(kPath, absl::StrCat("groups cover ", spec.snr_db.size(),
                                     " users but users = ", users));
  }
  return spec;
}

absl::StatusOr<TaskSpec> ParseTask(json& obj, int64_t users,
                                   Experiment experiment) {
  constexpr absl::string_view kPath = "task";
  if (!obj.is_object() || !obj.contains("type")) {
    return Error(kPath, "must be an object with a \"type\" field");
  }
  std::set<std::string> types = {"quadratic"};
  if (experiment == Experiment::kTrain) types.insert("logistic");
  absl::StatusOr<std::string> type = GetChoice(obj, "type", kPath, types);
  if (!type.ok()) return type.status();
  TaskSpec spec;
  if (*type == "quadratic") {
    spec.type = TaskSpec::Type::kQuadratic;
    QuadraticTaskParams& q = spec.quadratic;
    std::set<std::string> allowed = {"type", "dimension", "strong_convexity",
                                     "smoothness"};
    if (experiment == Experiment::kTrain) {
      allowed.insert({"shard_size", "data_spread", "b_norm", "seed"});
    }
    if (absl::Status s = CheckKeys(obj, kPath, allowed); !s.ok()) return s;
    json defaults = {{"dimension", q.dimension},
                     {"strong_convexity", q.strong_convexity},
                     {"smoothness", q.smoothness}};
    if (experiment == Experiment::kTrain) {
      defaults.update({{"shard_size", q.shard_size},
                       {"data_spread", q.data_spread},
                       {"b_norm", q.b_norm},
                       {"seed", 1}});
    }
    for (auto it = defaults.begin(); it != defaults.end(); ++it) {
      if (!obj.contains(it.key())) obj[it.key()] = it.value();
    }
    absl::StatusOr<int64_t> d = GetInteger(obj, "dimension", kPath, 1);
    if (!d.ok()) return d.status();
    q.dimension = static_cast<int>(*d);
    absl::StatusOr<double> lambda =
        GetReal(obj, "strong_convexity", kPath, Range::kPositive);
    if (!lambda.ok()) return lambda.status();
    q.strong_convexity = *lambda;
    absl::StatusOr<double> smooth =
        GetReal(obj, "smoothness", kPath, Range::kPositive);
    if (!smooth.ok()) return smooth.status();
    if (*smooth < *lambda) {
      return Error(kPath, "smoothness must be >= strong_convexity");
    }
    q.smoothness = *smooth;
    q.num_users = static_cast<int>(users);
    if (experiment == Experiment::kTrain) {
      absl::StatusOr<int64_t> shard = GetInteger(obj, "shard_size", kPath, 1);
      if (!shard.ok()) return shard.status();
      q.shard_size = static_cast<int>(*shard);
      absl::StatusOr<double> spread =
          GetReal(obj, "data_spread", kPath, Range::kNonNegative);
      if (!spread.ok()) return spread.status();
      q.data_spread = *spread;
      absl::StatusOr<double> b_norm =
          GetReal(obj, "b_norm", kPath, Range::kNonNegative);
      if (!b_norm.ok()) return b_norm.status();
      q.b_norm = *b_norm;
      absl::StatusOr<int64_t> seed = GetInteger(obj, "seed", kPath, 0);
      if (!seed.ok()) return seed.status();
      q.seed = static_cast<uint64_t>(*seed);
    }
    return spec;
  }
  spec.type = TaskSpec::Type::kLogistic;
  LogisticTaskParams& l = spec.logistic;
  if (absl::Status s = CheckKeys(
          obj, kPath,
          {"type", "dimension", "shard_size", "l2_reg", "separation", "seed"});
      !s.ok()) {
    return s;
  }
  const json defaults = {{"dimension", l.dimension},
                         {"shard_size", l.shard_size},
                         {"l2_reg", l.l2_reg},
                         {"separation", l.separation},
                         {"seed", 1}};
  for (auto it = defaults.begin(); it != defaults.end(); ++it) {
    if (!obj.contains(it.key())) obj[it.key()] = it.value();
  }
  absl::StatusOr<int64_t> d = GetInteger(obj, "dimension", kPath, 1);
  if (!d.ok()) return d.status();
  l.dimension = static_cast<int>(*d);
  absl::StatusOr<int64_t> shard = GetInteger(obj, "shard_size", kPath, 1);
  if (!shard.ok()) return shard.status();
  l.shard_size = static_cast<int>(*shard);
  absl::StatusOr<double> reg = GetReal(obj, "l2_reg", kPath, Range::kPositive);
  if (!reg.ok()) return reg.status();
  l.l2_reg = *reg;
  absl::StatusOr<double> sep =
      GetReal(obj, "separation", kPath, Range::kNonNegative);
  if (!sep.ok()) return sep.status();
  l.separation = *sep;
  absl::StatusOr<int64_t> seed = GetInteger(obj, "seed", kPath, 0);
  if (!seed.ok()) return seed.status();
  l.seed = static_cast<uint64_t>(*seed);
  l.num_users = static_cast<int>(users);
  return spec;
}

absl::StatusOr<LearningRate> ParseLearningRate(json& obj,
                                               const TaskSpec& task) {
  constexpr absl::string_view kPath = "learning_rate";
  if (!obj.is_object() || !obj.contains("schedule")) {
    return Error(kPath, "must be an object with a \"schedule\" field");
  }
  absl::StatusOr<std::string> schedule =
      GetChoice(obj, "schedule", kPath, {"inverse", "constant"});
  if (!schedule.ok()) return schedule.status();
  if (absl::Status s = CheckKeys(obj, kPath, {"schedule", "value"}); !s.ok()) {
    return s;
  }
  LearningRate rate;
  if (*schedule == "inverse") {
    rate.schedule = LearningRate::Schedule::kInverse;
    if (!obj.contains("value")) {
      if (task.type != TaskSpec::Type::kQuadratic) {
        return Error(kPath,
                     "inverse schedule on this task needs an explicit value");
      }
      obj["value"] = task.quadratic.strong_convexity;
    }
  } else {
    rate.schedule = LearningRate::Schedule::kConstant;
    if (!obj.contains("value")) {
      return Error(kPath, "constant schedule needs a value");
    }
  }
  absl::StatusOr<double> value = GetReal(obj, "value", kPath, Range::kPositive);
  if (!value.ok()) return value.status();
  rate.value = *value;
  return rate;
}

// Reads every key in `root` into `config`, normalizing integers in place.
absl::Status Populate(json& root, ExperimentConfig& config) {
  constexpr absl::string_view kRoot = "config";
  const Experiment e = config.experiment;
  absl::Status status;
  auto has = [&](const char* key) { return root.contains(key); };

  {
    json& seed = root["master_seed"];
    if (seed.is_number_unsigned()) {
      config.master_seed = seed.get<uint64_t>();
    } else {
      absl::StatusOr<int64_t> s = ToInteger(seed, "master_seed", kRoot, 0);
      if (!s.ok()) return s.status();
      seed = *s;
      config.master_seed = static_cast<uint64_t>(*s);
    }
  }
  if (has("trials")) {
    absl::StatusOr<int64_t> n = GetInteger(root, "trials", kRoot, 1);
    if (!n.ok()) return n.status();
    config.trials = static_cast<int>(*n);
  }
  if (has("users")) {
    absl::StatusOr<int64_t> n = GetInteger(root, "users", kRoot, 1);
    if (!n.ok()) return n.status();
    if (*n > 1000000) return Error(kRoot, "users must be <= 1000000");
    config.users = *n;
  }
  if (has("users_grid")) {
    absl::StatusOr<std::vector<int64_t>> g =
        GetIntegerList(root, "users_grid", kRoot, 1);
    if (!g.ok()) return g.status();
    config.users_grid = *std::move(g);
  }
  if (has("rounds")) {
    absl::StatusOr<int64_t> n = GetInteger(root, "rounds", kRoot, 1);
    if (!n.ok()) return n.status();
    config.rounds = *n;
  }
  if (has("rounds_grid")) {
    absl::StatusOr<std::vector<int64_t>> g =
        GetIntegerList(root, "rounds_grid", kRoot, 1);
    if (!g.ok()) return g.status();
    config.rounds_grid = *std::move(g);
  }
  if (has("lipschitz")) {
    absl::StatusOr<double> x =
        GetReal(root, "lipschitz", kRoot, Range::kPositive);
    if (!x.ok()) return x.status();
    config.lipschitz = *x;
  }
  if (has("lipschitz_values")) {
    absl::StatusOr<std::vector<double>> x =
        GetRealList(root, "lipschitz_values", kRoot, Range::kNonNegative);
    if (!x.ok()) return x.status();
    config.lipschitz_values = *std::move(x);
  }
  if (has("noise_var")) {
    const Range r =
        e == Experiment::kTrain ? Range::kNonNegative : Range::kPositive;
    absl::StatusOr<double> x = GetReal(root, "noise_var", kRoot, r);
    if (!x.ok()) return x.status();
    config.noise_var = *x;
  }
  if (has("receiver_noise_var")) {
    absl::StatusOr<double> x =
        GetReal(root, "receiver_noise_var", kRoot, Range::kNonNegative);
    if (!x.ok()) return x.status();
    config.receiver_noise_var = *x;
  }
  if (has("delta_local")) {
    absl::StatusOr<double> x =
        GetReal(root, "delta_local", kRoot, Range::kHalfOpenUnit);
    if (!x.ok()) return x.status();
    config.delta_local = *x;
  }
  if (has("delta_prime")) {
    absl::StatusOr<double> x =
        GetReal(root, "delta_prime", kRoot, Range::kOpenUnit);
    if (!x.ok()) return x.status();
    config.delta_prime = *x;
  }
  if (has("delta_prime_rule")) {
    absl::StatusOr<std::string> rule =
        GetChoice(root, "delta_prime_rule", kRoot, {"fixed", "adaptive"});
    if (!rule.ok()) return rule.status();
    config.delta_prime_rule =
        *rule == "fixed" ? DeltaPrimeRule::kFixed : DeltaPrimeRule::kAdaptive;
  }
  if (has("delta_tilde")) {
    absl::StatusOr<double> x =
        GetReal(root, "delta_tilde", kRoot, Range::kOpenUnit);
    if (!x.ok()) return x.status();
    config.delta_tilde = *x;
  }
  if (has("include_n0")) {
    absl::StatusOr<bool> b = GetBool(root, "include_n0", kRoot);
    if (!b.ok()) return b.status();
    config.include_n0 = *b;
  }
  if (has("task")) {
    absl::StatusOr<TaskSpec> task = ParseTask(root["task"], config.users, e);
    if (!task.ok()) return task.status();
    config.task = *std::move(task);
  }
  if (has("sampling")) {
    absl::StatusOr<SamplingSpec> s = ParseSampling(root["sampling"], e);
    if (!s.ok()) return s.status();
    config.sampling = *std::move(s);
  }
  if (has("channel")) {
    absl::StatusOr<ChannelSpec> c = ParseChannel(root["channel"], config.users);
    if (!c.ok()) return c.status();
    config.channel = *std::move(c);
  }
  if (has("alpha_mode")) {
    absl::StatusOr<std::string> m =
        GetChoice(root, "alpha_mode", kRoot, {"ideal", "empirical"});
    if (!m.ok()) return m.status();
    config.alpha_mode =
        *m == "ideal" ? AlphaMode::kIdeal : AlphaMode::kEmpirical;
  }
  if (has("estimators")) {
    const json& v = root["estimators"];
    if (!v.is_array() || v.empty()) {
      return Error(kRoot, "estimators must be a nonempty array");
    }
    std::set<std::string> seen;
    for (const json& m : v) {
      if (!m.is_string() || (m != "known" && m != "unknown") ||
          !seen.insert(m.get<std::string>()).second) {
        return Error(
            kRoot, "estimators entries must be distinct \"known\"/\"unknown\"");
      }
      config.estimators.push_back(m == "known" ? EstimatorMode::kKnown
                                               : EstimatorMode::kUnknown);
    }
  }
  if (has("learning_rate")) {
    absl::StatusOr<LearningRate> rate =
        ParseLearningRate(root["learning_rate"], config.task);
    if (!rate.ok()) return rate.status();
    config.learning_rate = *rate;
  }
  if (has("batch_size")) {
    absl::StatusOr<int64_t> n = GetInteger(root, "batch_size", kRoot, 1);
    if (!n.ok()) return n.status();
    config.batch_size = static_cast<int>(*n);
  }
  if (has("checkpoints")) {
    absl::StatusOr<std::vector<int64_t>> c =
        GetIntegerList(root, "checkpoints", kRoot, 1, /*allow_empty=*/true);
    if (!c.ok()) return c.status();
    if (c->empty()) {
      c->push_back(config.rounds);
      root["checkpoints"] = *c;
    }
    for (int64_t t : *c) {
      if (t > config.rounds) {
        return Error(kRoot, absl::StrCat("checkpoint ", t, " exceeds rounds"));
      }
    }
    config.checkpoints = *std::move(c);
  }
  if (has("write_traces")) {
    absl::StatusOr<bool> b = GetBool(root, "write_traces", kRoot);
    if (!b.ok()) return b.status();
    config.write_traces = *b;
  }
  if (has("fit_range")) {
    absl::StatusOr<std::vector<double>> r =
        GetRealList(root, "fit_range", kRoot, Range::kPositive);
    if (!r.ok()) return r.status();
    if (r->size() != 2 || !((*r)[0] < (*r)[1])) {
      return Error(kRoot, "fit_range must be [lo, hi] with lo < hi");
    }
    config.fit_min_users = (*r)[0];
    config.fit_max_users = (*r)[1];
  }
  if (has("probabilities")) {
    absl::StatusOr<std::vector<double>> p =
        GetRealList(root, "probabilities", kRoot, Range::kHalfOpenUnit);
    if (!p.ok()) return p.status();
    config.probabilities = *std::move(p);
  }
  if (has("h_threshold")) {
    absl::StatusOr<double> h =
        GetReal(root, "h_threshold", kRoot, Range::kPositive);
    if (!h.ok()) return h.status();
    config.h_threshold = *h;
  }
  if (has("monte_carlo_rounds")) {
    absl::StatusOr<int64_t> n =
        GetInteger(root, "monte_carlo_rounds", kRoot, 1);
    if (!n.ok()) return n.status();
    config.monte_carlo_rounds = *n;
  }

  // Cross-field checks.
  if (e == Experiment::kTrain) {
    if (config.users > 100000)
      return Error(kRoot, "train supports <= 1e5 users");
    SamplingPolicy policy;
    switch (config.sampling.type) {
      case SamplingSpec::Type::kSchedule:
        policy = UniformSchedule{config.sampling.schedule};
        break;
      case SamplingSpec::Type::kExplicit:
        policy = ExplicitProbabilities{config.sampling.matrix};
        break;
      default:
        break;
    }
    if (absl::Status s = ValidatePolicy(policy, static_cast<int>(config.users),
                                        static_cast<int>(config.rounds));
        !s.ok()) {
      return Error("sampling", s.message());
    }
    if (config.sampling.type == SamplingSpec::Type::kChannelAware &&
        !config.channel.fading) {
      return Error("sampling", "channel_aware sampling needs channel.fading");
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::string_view ExperimentName(Experiment experiment) {
  switch (experiment) {
    case Experiment::kPrivacySweep:
      return "privacy_sweep";
    case Experiment::kCompositionSweep:
      return "composition_sweep";
    case Experiment::kBoundCurves:
      return "bound_curves";
    case Experiment::kTrain:
      return "train";
    case Experiment::kLocalDpTable:
      return "local_dp_table";
  }
  return "";
}

absl::StatusOr<Experiment> ParseExperiment(absl::string_view name) {
  for (Experiment e : {Experiment::kPrivacySweep, Experiment::kCompositionSweep,
                       Experiment::kBoundCurves, Experiment::kTrain,
                       Experiment::kLocalDpTable}) {
    if (ExperimentName(e) == name) return e;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown experiment \"", name, "\""));
}

std::vector<std::string> PresetNames() {
  std::vector<std::string> names;
  for (const auto& [name, text] : internal::PresetSources()) {
    names.push_back(name);
  }
  return names;
}

absl::StatusOr<std::string> PresetJson(absl::string_view name) {
  const auto& presets = internal::PresetSources();
  auto it = presets.find(std::string(name));
  if (it == presets.end()) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown preset \"", name,
                     "\"; available: ", absl::StrJoin(PresetNames(), ", ")));
  }
  return it->second;
}

absl::StatusOr<std::string> ReadConfigText(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot open config file ", path));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  if (absl::StartsWith(text, "#")) {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      absl::string_view view(line);
      if (absl::ConsumePrefix(&view, kConfigLinePrefix)) {
        return std::string(view);
      }
    }
    return absl::InvalidArgumentError(
        absl::StrCat(path, " has no embedded config line"));
  }
  return text;
}

absl::StatusOr<ExperimentConfig> ResolveConfig(Experiment experiment,
                                               const ConfigSources& sources) {
  const std::string name(ExperimentName(experiment));
  json root = Defaults(experiment);
  std::set<std::string> allowed;
  for (auto it = root.begin(); it != root.end(); ++it) {
    allowed.insert(it.key());
  }
  allowed.insert("experiment");

  if (sources.preset.has_value()) {
    absl::StatusOr<std::string> text = PresetJson(*sources.preset);
    if (!text.ok()) return text.status();
    json preset = json::parse(*text, nullptr, /*allow_exceptions=*/false);
    if (preset.is_discarded() || !preset.is_object()) {
      return absl::InvalidArgumentError(
          absl::StrCat("preset ", *sources.preset, " is not a JSON object"));
    }
    if (!preset.contains(name)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "preset ", *sources.preset, " has no section for ", name));
    }
    json section = preset[name];
    if (absl::Status s = CheckKeys(
            section, absl::StrCat("preset ", *sources.preset), allowed);
        !s.ok()) {
      return s;
    }
    Overlay(root, section);
  }
  if (sources.config_text.has_value()) {
    json doc = json::parse(*sources.config_text, nullptr,
                           /*allow_exceptions=*/false);
    if (doc.is_discarded()) {
      return absl::InvalidArgumentError("config is not valid JSON");
    }
    if (!doc.is_object()) {
      return absl::InvalidArgumentError("config must be a JSON object");
    }
    if (absl::Status s = CheckKeys(doc, "config", allowed); !s.ok()) return s;
    if (doc.contains("experiment") && doc["experiment"] != name) {
      return absl::InvalidArgumentError(
          absl::StrCat("config is for experiment ", doc["experiment"].dump(),
                       " but the command runs ", name));
    }
    Overlay(root, doc);
  }
  if (sources.seed.has_value()) root["master_seed"] = *sources.seed;
  root["experiment"] = name;

  ExperimentConfig config;
  config.experiment = experiment;
  if (absl::Status s = Populate(root, config); !s.ok()) return s;
  config.resolved_json = root.dump();
  return config;
}

}  // namespace airdp
