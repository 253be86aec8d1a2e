// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace fracsample {

struct Question {
  std::string id;
  std::string prompt;
  std::string gold_answer;
  std::string benchmark;
};

struct DecodingParams {
  double temperature = 0.6;
  double top_p = 0.95;
  int max_tokens = 32768;
  std::vector<std::string> stop_sequences;

  void validate() const;
  bool operator==(const DecodingParams&) const = default;
};

// Identifies one generation event. Thinking events use depth = 0 and
// solution = 0; solution events carry 1-based depth and probe indices.
struct SampleKey {
  std::string question_id;
  int trajectory = 1;
  int depth = 0;
  int solution = 0;

  static SampleKey thinking(std::string question_id, int trajectory) {
    return {std::move(question_id), trajectory, 0, 0};
  }
  bool is_thinking() const { return depth == 0 && solution == 0; }
  std::string str() const;

  auto operator<=>(const SampleKey&) const = default;
  bool operator==(const SampleKey&) const = default;
};

enum class SeedKind : std::uint8_t { thinking = 1, solution = 2 };

struct SamplingPlan {
  int n = 16;
  int m = 4;
  int H = 16;
  std::vector<int> depth_set;  // sorted, unique, within [1, H]
  DecodingParams params;
  std::uint64_t root_seed = 0;

  void validate() const;
  int depth_count() const { return static_cast<int>(depth_set.size()); }
  // Number of generation requests per question: n traces plus n*|D|*m solutions.
  long long requests_per_question() const;

  static SamplingPlan full(int n, int m, int H, std::uint64_t root_seed = 0,
                           DecodingParams params = {});
  // depth_set = {H}: m = 1 is vanilla trajectory sampling, m > 1 adds probes.
  static SamplingPlan vanilla(int n, int m, int H, std::uint64_t root_seed = 0,
                              DecodingParams params = {});
};

struct BudgetReport {
  double c_thinking = 0.0;  // mean tokens per thinking trace
  double c_solution = 0.0;  // mean tokens per solution
  long long thinking_tokens = 0;
  long long solution_tokens = 0;
  long long total_tokens = 0;  // observed B, summed over all persisted events
  long long trajectories = 0;
  long long solutions = 0;
  int questions = 0;
  // questions * compute_budget(n, m, |D|, c_thinking, c_solution); matches
  // total_tokens when no event failed.
  double formula_total = 0.0;

  bool operator==(const BudgetReport&) const = default;
};

std::uint64_t derive_seed(std::uint64_t root_seed, const SampleKey& key, SeedKind kind);

// B(n, m, H) = n * (c_thinking + m * depth_count * c_solution).
double compute_budget(int n, int m, int depth_count, double c_thinking, double c_solution);

void to_json(nlohmann::json& j, const Question& q);
void from_json(const nlohmann::json& j, Question& q);
void to_json(nlohmann::json& j, const DecodingParams& p);
void from_json(const nlohmann::json& j, DecodingParams& p);
void to_json(nlohmann::json& j, const SampleKey& k);
void from_json(const nlohmann::json& j, SampleKey& k);
void to_json(nlohmann::json& j, const SamplingPlan& p);
void from_json(const nlohmann::json& j, SamplingPlan& p);
void to_json(nlohmann::json& j, const BudgetReport& b);
void from_json(const nlohmann::json& j, BudgetReport& b);

}  // namespace fracsample
