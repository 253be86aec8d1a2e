// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fracsample/answer.hpp"
#include "fracsample/backend.hpp"
#include "fracsample/core.hpp"
#include "fracsample/store.hpp"

namespace fracsample {

struct RunOptions {
  int max_inflight = 8;
  std::string answer_cue = std::string(kDefaultAnswerCue);
};

struct QuestionCounts {
  long long thinking = 0;
  long long solutions = 0;
  long long failures = 0;
};

struct RunSummary {
  std::string run_id;
  SamplingPlan plan;
  std::map<std::string, QuestionCounts> per_question;
  BudgetReport budget;
  double wall_seconds = 0.0;
  long long records = 0;
  long long failures = 0;
  bool partial = false;
};

nlohmann::json summary_to_json(const RunSummary& s);

// Budget accounting over persisted records: thinking and thinking_chunk
// events count as thinking, solution events as solutions; failures are free.
BudgetReport budget_from_records(const std::vector<TraceRecord>& records, const SamplingPlan& plan);

// Runs fractured sampling: per (question, i) one thinking trace split into H
// segments, then for each t in the depth set and j in [1, m] one solution from
// prefix(t). Independent keys run concurrently up to options.max_inflight.
// A backend error on one key is persisted as a failure record; a store error
// marks the run partial and rethrows.
RunSummary run_plan(const SamplingPlan& plan, const std::vector<Question>& questions,
                    CompletionBackend& backend, TraceStore& store, const RunOptions& options = {});

struct EarlyStopPolicy {
  int start_tokens = 6144;
  int interval_tokens = 2048;
  int repeat_threshold = 2;
  int max_tokens = 32768;

  void validate() const;
};

void to_json(nlohmann::json& j, const EarlyStopPolicy& p);
void from_json(const nlohmann::json& j, EarlyStopPolicy& p);

struct Checkpoint {
  int thinking_tokens = 0;
  std::optional<CanonicalAnswer> prediction;
  int solution_tokens = 0;
};

struct EarlyStopResult {
  std::optional<CanonicalAnswer> answer;
  int tokens_used = 0;      // thinking tokens, bounded by policy.max_tokens
  int solution_tokens = 0;  // all probe solutions, reported separately
  std::vector<Checkpoint> checkpoints;
  bool stopped_early = false;
};

// Index of the first checkpoint at which some prediction has occurred
// repeat_threshold times (answers compared with answers_equal).
std::optional<std::size_t> first_repeat_index(
    const std::vector<std::optional<CanonicalAnswer>>& predictions, int repeat_threshold);

struct EarlyStopContext {
  std::uint64_t root_seed = 0;
  int trajectory = 1;
  DecodingParams params;
  std::string answer_cue = std::string(kDefaultAnswerCue);
  TraceStore* store = nullptr;  // optional checkpoint log
};

// Chunked thinking with a solution probe at start_tokens and every
// interval_tokens after; stops on a repeated prediction, else returns the
// final parseable prediction once thinking ends or max_tokens is reached.
EarlyStopResult early_stop_answer(const Question& question, const EarlyStopPolicy& policy,
                                  CompletionBackend& backend, const EarlyStopContext& ctx);

// Re-applies the stop rule to a persisted checkpoint log.
EarlyStopResult replay_early_stop(const std::vector<Checkpoint>& checkpoints,
                                  const EarlyStopPolicy& policy);

}  // namespace fracsample
