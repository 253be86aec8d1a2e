// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#include "fracsample/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "fracsample/error.hpp"

namespace fracsample {

RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  RunConfig c;
  try {
    if (!j.contains("backend") || !j.at("backend").is_object()) {
      throw ConfigError("config: missing \"backend\" object");
    }
    const auto& b = j.at("backend");
    const bool has_synth = b.contains("synthetic");
    const bool has_http = b.contains("http");
    if (has_synth == has_http) {
      throw ConfigError("config: backend must name exactly one of \"synthetic\" or \"http\"");
    }
    if (has_synth) {
      c.backend = b.at("synthetic").get<SyntheticConfig>();
    } else {
      c.backend = b.at("http").get<HttpBackendConfig>();
    }
    if (!j.contains("plan")) throw ConfigError("config: missing \"plan\"");
    j.at("plan").get_to(c.plan);
    c.plan.validate();
    if (j.contains("corpus")) {
      std::filesystem::path p = j.at("corpus").get<std::string>();
      c.corpus = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
    }
    c.run_id = j.value("run_id", std::string{});
    c.out_dir = j.value("out", std::string("runs"));
    c.max_inflight = j.value("max_inflight", c.max_inflight);
    if (c.max_inflight < 1) throw ConfigError("config: max_inflight must be positive");
    c.answer_cue = j.value("answer_cue", c.answer_cue);
    if (j.contains("early_stop")) {
      c.early_stop = j.at("early_stop").get<EarlyStopPolicy>();
      c.early_stop->validate();
    }
    if (j.contains("estimate")) {
      const auto& e = j.at("estimate");
      c.estimate = CostEstimate{e.at("thinking_tokens").get<double>(),
                                e.at("solution_tokens").get<double>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  return run_config_from_json(j, path.parent_path());
}

std::vector<Question> load_corpus(const std::filesystem::path& path) {
  if (path.empty()) throw ConfigError("no corpus path configured");
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open corpus file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  std::vector<Question> questions;
  const auto first = text.find_first_not_of(" \t\r\n");
  try {
    if (first != std::string::npos && text[first] == '[') {
      questions = nlohmann::json::parse(text).get<std::vector<Question>>();
    } else {
      std::istringstream lines(text);
      std::string line;
      int lineno = 0;
      while (std::getline(lines, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
          questions.push_back(nlohmann::json::parse(line).get<Question>());
        } catch (const nlohmann::json::exception& e) {
          throw ConfigError("corpus " + path.string() + " line " + std::to_string(lineno) + ": " +
                            e.what());
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("corpus " + path.string() + ": " + e.what());
  }
  if (questions.empty()) throw ConfigError("corpus " + path.string() + " is empty");
  std::set<std::string> ids;
  for (const auto& q : questions) {
    if (q.id.empty()) throw ConfigError("corpus " + path.string() + ": question without id");
    if (!ids.insert(q.id).second) {
      throw ConfigError("corpus " + path.string() + ": duplicate question id " + q.id);
    }
  }
  return questions;
}

std::unique_ptr<CompletionBackend> make_backend(const RunConfig& config) {
  if (const auto* s = std::get_if<SyntheticConfig>(&config.backend)) {
    return std::make_unique<SyntheticBackend>(*s);
  }
  return std::make_unique<HttpBackend>(std::get<HttpBackendConfig>(config.backend));
}

CostEstimate projected_costs(const RunConfig& config, const std::vector<Question>& questions) {
  if (config.estimate) return *config.estimate;
  if (const auto* s = std::get_if<SyntheticConfig>(&config.backend)) {
    const SyntheticBackend backend(*s);
    double thinking = 0.0;
    for (const auto& q : questions) thinking += backend.natural_thinking_tokens(q.id);
    return {questions.empty() ? 0.0 : thinking / static_cast<double>(questions.size()),
            static_cast<double>(s->model.tokens_per_solution)};
  }
  throw ConfigError("dry run against an http backend needs an \"estimate\" block");
}

}  // namespace fracsample
