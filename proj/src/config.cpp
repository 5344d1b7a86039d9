#include "etse/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "etse/errors.hpp"

namespace etse {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) {
  throw Error(ErrorCode::kInvalidConfig, what);
}

Matrix parse_matrix(const json& j, const std::string& name) {
  if (j.is_number()) return Matrix::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty()) fail(name + " must be a nested array");
  const bool flat = !j.front().is_array();
  if (flat) fail(name + " must be a nested (row-major) array");
  const std::size_t rows = j.size();
  const std::size_t cols = j.front().size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      fail(name + " has ragged rows");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) fail(name + " has a non-numeric entry");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

SchedulerKind parse_scheduler(const std::string& text) {
  if (text == "open-loop" || text == "open") return SchedulerKind::kOpenLoop;
  if (text == "closed-loop" || text == "closed") return SchedulerKind::kClosedLoop;
  fail("trigger.kind must be \"open-loop\" or \"closed-loop\"");
}

EstimatorKind parse_estimator(const json& j, SchedulerKind scheduler) {
  std::string kind;
  if (j.is_string()) {
    kind = j.get<std::string>();
  } else if (j.is_object() && j.contains("kind") && j["kind"].is_string()) {
    kind = j["kind"].get<std::string>();
  } else {
    fail("each estimator needs a string \"kind\"");
  }
  if ((kind == "exact-open" && scheduler != SchedulerKind::kOpenLoop) ||
      (kind == "exact-closed" && scheduler != SchedulerKind::kClosedLoop)) {
    fail("estimator '" + kind + "' does not match the trigger kind");
  }
  try {
    if (j.is_object() && (kind == "gpb" || kind == "mixture-reduce" ||
                          kind == "reduce")) {
      const char* key = kind == "gpb" ? "N" : "M";
      if (!j.contains(key) || !j[key].is_number_integer()) {
        fail("estimator '" + kind + "' needs an integer \"" + key + "\"");
      }
      const int order = j[key].get<int>();
      EstimatorKind parsed = kind == "gpb" ? EstimatorKind::gpb(order)
                                           : EstimatorKind::mixture_reduce(order);
      parsed.validate();
      return parsed;
    }
    return EstimatorKind::parse(kind);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidConfig) throw;
    fail(e.what());
  }
}

ExperimentConfig from_json(const json& root) {
  if (!root.is_object()) fail("config root must be an object");
  ExperimentConfig config = default_experiment();

  if (root.contains("model")) {
    const json& m = root["model"];
    if (!m.is_object()) fail("model must be an object");
    for (const char* key : {"A", "C", "Q", "R", "Sigma0"}) {
      if (!m.contains(key)) fail(std::string("model.") + key + " is missing");
    }
    config.model.A = parse_matrix(m["A"], "model.A");
    config.model.C = parse_matrix(m["C"], "model.C");
    config.model.Q = parse_matrix(m["Q"], "model.Q");
    config.model.R = parse_matrix(m["R"], "model.R");
    config.model.Sigma0 = parse_matrix(m["Sigma0"], "model.Sigma0");
  }

  if (root.contains("trigger")) {
    const json& t = root["trigger"];
    if (!t.is_object()) fail("trigger must be an object");
    SchedulerKind kind = SchedulerKind::kOpenLoop;
    if (t.contains("kind")) {
      if (!t["kind"].is_string()) fail("trigger.kind must be a string");
      kind = parse_scheduler(t["kind"].get<std::string>());
    }
    if (!t.contains("weight_matrix")) fail("trigger.weight_matrix is missing");
    try {
      config.trigger =
          TriggerParams(kind, parse_matrix(t["weight_matrix"],
                                           "trigger.weight_matrix"));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kInvalidConfig) throw;
      fail(std::string("trigger: ") + e.what());
    }
  }

  if (root.contains("drop_rates")) {
    const json& d = root["drop_rates"];
    if (!d.is_array()) fail("drop_rates must be an array");
    config.drop_rates.clear();
    for (const auto& v : d) {
      if (!v.is_number()) fail("drop_rates must be numbers");
      config.drop_rates.push_back(v.get<double>());
    }
  }

  auto read_int = [&](const char* key, auto& target) {
    if (!root.contains(key)) return;
    if (!root[key].is_number_integer()) {
      fail(std::string(key) + " must be an integer");
    }
    target = root[key].get<std::decay_t<decltype(target)>>();
  };
  read_int("horizon", config.horizon);
  read_int("runs", config.runs);
  read_int("master_seed", config.master_seed);
  read_int("threads", config.threads);
  read_int("horizon_cap", config.mixture.horizon_cap);

  if (root.contains("weighting")) {
    const json& w = root["weighting"];
    if (w == "predictive-density") {
      config.mixture.weight_rule = WeightRule::kPredictiveDensity;
    } else if (w == "transmit-probability") {
      config.mixture.weight_rule = WeightRule::kTransmitProbability;
    } else {
      fail("weighting must be \"predictive-density\" or "
           "\"transmit-probability\"");
    }
  }

  if (root.contains("estimators")) {
    const json& e = root["estimators"];
    if (!e.is_array()) fail("estimators must be an array");
    config.estimators.clear();
    for (const auto& item : e) {
      config.estimators.push_back(parse_estimator(item, config.trigger.kind()));
    }
  }

  if (root.contains("output")) {
    if (!root["output"].is_string()) fail("output must be a string");
    config.output_path = root["output"].get<std::string>();
  }

  validate_config(config);
  return config;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
  } catch (const json::exception& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  try {
    return from_json(root);
  } catch (const json::exception& e) {
    fail(std::string("bad config value: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> values;
  while (!text.empty()) {
    const std::size_t comma = text.find(',');
    std::string item(text.substr(0, comma));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw Error(ErrorCode::kInvalidArgument, "bad number '" + item + "'");
    }
    values.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "empty list");
  return values;
}

std::vector<EstimatorKind> parse_estimator_list(std::string_view text) {
  std::vector<EstimatorKind> kinds;
  while (!text.empty()) {
    const std::size_t comma = text.find(',');
    kinds.push_back(EstimatorKind::parse(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (kinds.empty()) throw Error(ErrorCode::kInvalidArgument, "empty list");
  return kinds;
}

}  // namespace etse
