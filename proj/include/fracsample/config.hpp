// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "fracsample/core.hpp"
#include "fracsample/http_backend.hpp"
#include "fracsample/orchestrator.hpp"
#include "fracsample/synthetic.hpp"

namespace fracsample {

// Per-request token estimates used by --dry-run when the backend cannot
// predict them.
struct CostEstimate {
  double thinking_tokens = 0.0;
  double solution_tokens = 0.0;
};

struct RunConfig {
  std::variant<SyntheticConfig, HttpBackendConfig> backend;
  SamplingPlan plan;
  std::filesystem::path corpus;  // resolved against the config file directory
  std::string run_id;
  std::filesystem::path out_dir = "runs";
  int max_inflight = 8;
  std::string answer_cue = std::string(kDefaultAnswerCue);
  std::optional<EarlyStopPolicy> early_stop;
  std::optional<CostEstimate> estimate;

  bool synthetic() const { return std::holds_alternative<SyntheticConfig>(backend); }
};

// Document layout:
//   {"backend": {"synthetic": {...}} | {"http": {...}},
//    "plan": {...}, "corpus": "questions.jsonl", "run_id": "...",
//    "out": "runs", "max_inflight": 8, "answer_cue": "Answer:",
//    "early_stop": {...}, "estimate": {"thinking_tokens": .., "solution_tokens": ..}}
RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

// JSON array of questions or one question object per line.
std::vector<Question> load_corpus(const std::filesystem::path& path);

std::unique_ptr<CompletionBackend> make_backend(const RunConfig& config);

// Projected per-question cost for --dry-run.
CostEstimate projected_costs(const RunConfig& config, const std::vector<Question>& questions);

}  // namespace fracsample
