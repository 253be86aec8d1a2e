// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracsample/answer.hpp"
#include "fracsample/store.hpp"

namespace fracsample {

struct PoolSample {
  SampleKey key;
  std::optional<CanonicalAnswer> answer;
  bool correct = false;
  int token_cost = 0;     // solution tokens
  int prefix_tokens = 0;  // thinking tokens the solution was conditioned on
};

struct SamplePool {
  std::string question_id;
  std::vector<PoolSample> samples;           // in key order
  std::map<int, int> trajectory_tokens;      // i -> full thinking tokens
};

// One pool per question from solution and thinking records, in question order.
std::vector<SamplePool> build_pools(const std::vector<TraceRecord>& records);

// Unbiased pass@k: 1 - C(N-c, k) / C(N, k), as a running product.
double pass_at_k(long long N, long long c, long long k);

using SampleFilter = std::function<bool(const SampleKey&)>;

// How samples are grouped before pass@k is estimated. pooled treats every
// filtered sample of a question as exchangeable; per_trajectory and
// per_prefix estimate within each i or each (i, t) and average the groups.
enum class Grouping { pooled, per_trajectory, per_prefix };

struct PassPoint {
  long long k = 0;
  double value = 0.0;
  // Mean per-question tokens: expected distinct trajectories * c_thinking +
  // k * c_solution, summed per question and averaged over questions.
  double budget = 0.0;
};

PassPoint pool_pass_at_k(const std::vector<SamplePool>& pools, long long k,
                         const SampleFilter& filter = {}, Grouping grouping = Grouping::pooled);

// Single-axis sweeps over a full (n, m, H) run:
//   n: t = H, j = 1, pooled over trajectories       -> B(k, 1, 1)
//   m: t = H, grouped per (i, t), k probes           -> B(1, k, 1)
//   H: j = 1, grouped per trajectory, k depths       -> B(1, 1, k)
enum class Axis { n, m, H };
std::string_view to_string(Axis a);
Axis axis_from_string(std::string_view s);

struct AxisSelection {
  SampleFilter filter;
  Grouping grouping;
};
AxisSelection axis_selection(Axis axis, int H);
std::vector<PassPoint> axis_curve(const std::vector<SamplePool>& pools, Axis axis, int H,
                                  std::span<const long long> ks);

// Multi-axis scheme (last `window` depths, first `m` probes) with n
// trajectories: a trajectory succeeds if any of its selected samples is
// correct; pass@n over trajectories, budget B(n, m, window).
PassPoint scheme_pass_at_n(const std::vector<SamplePool>& pools, int H, int window, int m,
                           long long n);

std::optional<CanonicalAnswer> majority_vote(
    const std::vector<std::optional<CanonicalAnswer>>& answers);

struct ScoredCandidate {
  SampleKey key;
  std::string text;
  double score = 0.0;
};

// Highest score; ties go to the lowest key (i, then t, then j).
const ScoredCandidate& best_of_n(std::span<const ScoredCandidate> candidates);

// Keeps samples with t > H - w.
SamplePool depth_window_filter(const SamplePool& pool, int w, int H);

std::vector<double> accuracy_by_depth(const std::vector<SamplePool>& pools, int H);

struct BudgetPoint {
  long long cap = 0;
  double truncated_accuracy = 0.0;  // deepest checkpoint that fits under the cap
  double full_cot_accuracy = 0.0;   // full trace answered only if it fits
};

// Per (question, i): the deepest depth whose prefix tokens plus solution
// tokens fit in the cap is scored (probe correctness averaged); trajectories
// with no feasible depth count as incorrect.
std::vector<BudgetPoint> accuracy_vs_budget_curve(const std::vector<TraceRecord>& records,
                                                  std::span<const long long> caps);

struct BestOfNSelection {
  std::string question_id;
  SampleKey selected;
  double score = 0.0;
  bool correct = false;
  std::size_t candidates = 0;
};

struct BestOfNReport {
  double accuracy = 0.0;
  std::vector<BestOfNSelection> selections;
};

// Per question: window filter, then probes j <= m_filter, then argmax of the
// scores from `scorer` (all scorers if empty). Questions without scored
// candidates count as incorrect.
BestOfNReport best_of_n_accuracy(const std::vector<SamplePool>& pools,
                                 const std::vector<ScoreRecord>& scores, int H, int window,
                                 int m_filter, const std::string& scorer = {});

}  // namespace fracsample
