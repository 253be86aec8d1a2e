// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#include "fracsample/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "fracsample/core.hpp"
#include "fracsample/error.hpp"

namespace fracsample {

std::vector<SamplePool> build_pools(const std::vector<TraceRecord>& records) {
  std::map<std::string, SamplePool> by_question;
  for (const auto& r : records) {
    auto& pool = by_question[r.key.question_id];
    pool.question_id = r.key.question_id;
    switch (r.kind) {
      case RecordKind::thinking:
        pool.trajectory_tokens[r.key.trajectory] = r.token_count;
        break;
      case RecordKind::thinking_chunk:
        pool.trajectory_tokens[r.key.trajectory] += r.token_count;
        break;
      case RecordKind::solution: {
        PoolSample s;
        s.key = r.key;
        if (r.answer) s.answer = CanonicalAnswer{*r.answer, *r.answer};
        s.correct = r.correct.value_or(false);
        s.token_cost = r.token_count;
        s.prefix_tokens = r.cumulative_thinking_tokens;
        pool.samples.push_back(std::move(s));
        break;
      }
      case RecordKind::failure:
        break;
    }
  }
  std::vector<SamplePool> out;
  for (auto& [qid, pool] : by_question) {
    std::sort(pool.samples.begin(), pool.samples.end(),
              [](const PoolSample& a, const PoolSample& b) { return a.key < b.key; });
    out.push_back(std::move(pool));
  }
  return out;
}

double pass_at_k(long long N, long long c, long long k) {
  if (N < 1 || c < 0 || c > N) throw DomainError("pass_at_k: need 0 <= c <= N and N >= 1");
  if (k < 1 || k > N) throw DomainError("pass_at_k: need 1 <= k <= N");
  if (N - c < k) return 1.0;
  // C(N-c, k) / C(N, k) = prod_{i=N-c+1}^{N} (1 - k / i)
  double all_fail = 1.0;
  for (long long i = N - c + 1; i <= N; ++i) {
    all_fail *= 1.0 - static_cast<double>(k) / static_cast<double>(i);
  }
  return 1.0 - all_fail;
}

namespace {

double mean_trajectory_tokens(const SamplePool& pool, const std::set<int>& trajectories) {
  double sum = 0.0;
  int count = 0;
  for (int i : trajectories) {
    if (auto it = pool.trajectory_tokens.find(i); it != pool.trajectory_tokens.end()) {
      sum += it->second;
      ++count;
    }
  }
  return count ? sum / count : 0.0;
}

}  // namespace

PassPoint pool_pass_at_k(const std::vector<SamplePool>& pools, long long k,
                         const SampleFilter& filter, Grouping grouping) {
  if (pools.empty()) throw DomainError("pool_pass_at_k: no pools");
  PassPoint point;
  point.k = k;
  for (const auto& pool : pools) {
    std::map<std::pair<int, int>, std::vector<const PoolSample*>> groups;
    std::set<int> trajectories;
    double solution_tokens = 0.0;
    std::size_t kept = 0;
    for (const auto& s : pool.samples) {
      if (filter && !filter(s.key)) continue;
      std::pair<int, int> g{0, 0};
      if (grouping == Grouping::per_trajectory) g = {s.key.trajectory, 0};
      if (grouping == Grouping::per_prefix) g = {s.key.trajectory, s.key.depth};
      groups[g].push_back(&s);
      trajectories.insert(s.key.trajectory);
      solution_tokens += s.token_cost;
      ++kept;
    }
    if (groups.empty()) {
      throw DomainError("pool_pass_at_k: question " + pool.question_id + " has no samples");
    }
    const double c_thinking = mean_trajectory_tokens(pool, trajectories);
    const double c_solution = solution_tokens / static_cast<double>(kept);

    double value = 0.0, budget = 0.0;
    for (const auto& [g, members] : groups) {
      const auto N = static_cast<long long>(members.size());
      if (N < k) {
        throw DomainError("pool_pass_at_k: question " + pool.question_id + " has " +
                          std::to_string(N) + " samples in a group, fewer than k = " +
                          std::to_string(k));
      }
      long long c = 0;
      std::map<int, long long> per_traj;
      for (const auto* s : members) {
        c += s->correct ? 1 : 0;
        ++per_traj[s->key.trajectory];
      }
      value += pass_at_k(N, c, k);
      // expected distinct trajectories among k draws without replacement
      double distinct = 0.0;
      for (const auto& [i, size] : per_traj) distinct += pass_at_k(N, size, k);
      budget += distinct * c_thinking + static_cast<double>(k) * c_solution;
    }
    point.value += value / static_cast<double>(groups.size());
    point.budget += budget / static_cast<double>(groups.size());
  }
  point.value /= static_cast<double>(pools.size());
  point.budget /= static_cast<double>(pools.size());
  return point;
}

std::string_view to_string(Axis a) {
  switch (a) {
    case Axis::n:
      return "n";
    case Axis::m:
      return "m";
    case Axis::H:
      return "H";
  }
  return "?";
}

Axis axis_from_string(std::string_view s) {
  if (s == "n") return Axis::n;
  if (s == "m") return Axis::m;
  if (s == "H") return Axis::H;
  throw DomainError("unknown axis '" + std::string(s) + "'");
}

AxisSelection axis_selection(Axis axis, int H) {
  switch (axis) {
    case Axis::n:
      return {[H](const SampleKey& k) { return k.depth == H && k.solution == 1; },
              Grouping::pooled};
    case Axis::m:
      return {[H](const SampleKey& k) { return k.depth == H; }, Grouping::per_prefix};
    case Axis::H:
      return {[](const SampleKey& k) { return k.solution == 1; }, Grouping::per_trajectory};
  }
  throw DomainError("unknown axis");
}

std::vector<PassPoint> axis_curve(const std::vector<SamplePool>& pools, Axis axis, int H,
                                  std::span<const long long> ks) {
  const auto sel = axis_selection(axis, H);
  std::vector<PassPoint> curve;
  for (long long k : ks) curve.push_back(pool_pass_at_k(pools, k, sel.filter, sel.grouping));
  return curve;
}

PassPoint scheme_pass_at_n(const std::vector<SamplePool>& pools, int H, int window, int m,
                           long long n) {
  if (pools.empty()) throw DomainError("scheme_pass_at_n: no pools");
  if (window < 1 || window > H || m < 1) throw DomainError("scheme_pass_at_n: bad window or m");
  PassPoint point;
  point.k = n;
  for (const auto& pool : pools) {
    std::map<int, bool> success;
    double solution_tokens = 0.0;
    std::size_t kept = 0;
    for (const auto& s : pool.samples) {
      if (s.key.depth <= H - window || s.key.solution > m) continue;
      success[s.key.trajectory] = success[s.key.trajectory] || s.correct;
      solution_tokens += s.token_cost;
      ++kept;
    }
    const auto N = static_cast<long long>(success.size());
    if (N < n) {
      throw DomainError("scheme_pass_at_n: question " + pool.question_id + " has " +
                        std::to_string(N) + " trajectories, fewer than n = " + std::to_string(n));
    }
    long long c = 0;
    std::set<int> trajectories;
    for (const auto& [i, ok] : success) {
      c += ok ? 1 : 0;
      trajectories.insert(i);
    }
    point.value += pass_at_k(N, c, n);
    const double c_thinking = mean_trajectory_tokens(pool, trajectories);
    const double c_solution = solution_tokens / static_cast<double>(kept);
    point.budget += static_cast<double>(n) * (c_thinking + m * window * c_solution);
  }
  point.value /= static_cast<double>(pools.size());
  point.budget /= static_cast<double>(pools.size());
  return point;
}

std::optional<CanonicalAnswer> majority_vote(
    const std::vector<std::optional<CanonicalAnswer>>& answers) {
  std::vector<std::pair<CanonicalAnswer, int>> groups;  // in first-occurrence order
  for (const auto& a : answers) {
    if (!a) continue;
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return answers_equal(g.first, *a); });
    if (it == groups.end()) {
      groups.emplace_back(*a, 1);
    } else {
      ++it->second;
    }
  }
  if (groups.empty()) return std::nullopt;
  const auto* best = &groups.front();
  for (const auto& g : groups) {
    if (g.second > best->second) best = &g;
  }
  return best->first;
}

const ScoredCandidate& best_of_n(std::span<const ScoredCandidate> candidates) {
  if (candidates.empty()) throw DomainError("best_of_n: no candidates");
  const ScoredCandidate* best = &candidates.front();
  for (const auto& c : candidates) {
    if (!std::isfinite(c.score)) throw DomainError("best_of_n: non-finite score");
    if (c.score > best->score || (c.score == best->score && c.key < best->key)) best = &c;
  }
  return *best;
}

SamplePool depth_window_filter(const SamplePool& pool, int w, int H) {
  if (w < 1 || w > H) {
    throw DomainError("depth window " + std::to_string(w) + " outside [1, " + std::to_string(H) + "]");
  }
  SamplePool out;
  out.question_id = pool.question_id;
  out.trajectory_tokens = pool.trajectory_tokens;
  for (const auto& s : pool.samples) {
    if (s.key.depth > H - w) out.samples.push_back(s);
  }
  return out;
}

std::vector<double> accuracy_by_depth(const std::vector<SamplePool>& pools, int H) {
  if (H < 1) throw DomainError("accuracy_by_depth: H must be positive");
  std::vector<double> correct(static_cast<std::size_t>(H), 0.0);
  std::vector<long long> total(static_cast<std::size_t>(H), 0);
  for (const auto& pool : pools) {
    for (const auto& s : pool.samples) {
      if (s.key.depth < 1 || s.key.depth > H) continue;
      const auto t = static_cast<std::size_t>(s.key.depth - 1);
      ++total[t];
      correct[t] += s.correct ? 1.0 : 0.0;
    }
  }
  for (std::size_t t = 0; t < correct.size(); ++t) {
    if (total[t] == 0) {
      throw DomainError("accuracy_by_depth: no samples at depth " + std::to_string(t + 1));
    }
    correct[t] /= static_cast<double>(total[t]);
  }
  return correct;
}

std::vector<BudgetPoint> accuracy_vs_budget_curve(const std::vector<TraceRecord>& records,
                                                  std::span<const long long> caps) {
  if (caps.empty()) throw DomainError("accuracy_vs_budget_curve: no caps");
  struct Probe {
    int prefix_tokens;
    int tokens;
    bool correct;
  };
  // (question, i) -> depth -> probes
  std::map<std::pair<std::string, int>, std::map<int, std::vector<Probe>>> trajectories;
  std::map<std::pair<std::string, int>, int> full_tokens;
  for (const auto& r : records) {
    const auto id = std::make_pair(r.key.question_id, r.key.trajectory);
    if (r.kind == RecordKind::thinking) full_tokens[id] = r.token_count;
    if (r.kind != RecordKind::solution) continue;
    trajectories[id][r.key.depth].push_back(
        {r.cumulative_thinking_tokens, r.token_count, r.correct.value_or(false)});
  }

  std::vector<BudgetPoint> curve;
  for (long long cap : caps) {
    BudgetPoint p;
    p.cap = cap;
    for (const auto& [id, depths] : trajectories) {
      auto score = [&](const std::vector<Probe>& probes) -> std::optional<double> {
        double sum = 0.0;
        int n = 0;
        for (const auto& pr : probes) {
          if (pr.prefix_tokens + static_cast<long long>(pr.tokens) <= cap) {
            sum += pr.correct ? 1.0 : 0.0;
            ++n;
          }
        }
        if (n == 0) return std::nullopt;
        return sum / n;
      };
      for (auto it = depths.rbegin(); it != depths.rend(); ++it) {
        if (auto s = score(it->second)) {
          p.truncated_accuracy += *s;
          break;
        }
      }
      // full CoT: only the deepest checkpoint, and only if it covers the whole trace
      const auto& deepest = depths.rbegin()->second;
      const auto ft = full_tokens.find(id);
      const bool is_full = ft == full_tokens.end() ||
                           (!deepest.empty() && deepest.front().prefix_tokens == ft->second);
      if (is_full) {
        if (auto s = score(deepest)) p.full_cot_accuracy += *s;
      }
    }
    if (!trajectories.empty()) {
      p.truncated_accuracy /= static_cast<double>(trajectories.size());
      p.full_cot_accuracy /= static_cast<double>(trajectories.size());
    }
    curve.push_back(p);
  }
  return curve;
}

BestOfNReport best_of_n_accuracy(const std::vector<SamplePool>& pools,
                                 const std::vector<ScoreRecord>& scores, int H, int window,
                                 int m_filter, const std::string& scorer) {
  if (m_filter < 1) throw DomainError("best-of-n: m filter must be positive");
  std::set<std::string> scorers;
  for (const auto& s : scores) scorers.insert(s.scorer);
  if (scorer.empty() && scorers.size() > 1) {
    throw DomainError("best-of-n: scores come from several scorers; choose one");
  }
  std::map<SampleKey, double> score_of;
  for (const auto& s : scores) {
    if (scorer.empty() || s.scorer == scorer) score_of[s.key] = s.score;
  }

  BestOfNReport report;
  for (const auto& pool : pools) {
    const auto windowed = depth_window_filter(pool, window, H);
    std::vector<ScoredCandidate> candidates;
    std::map<SampleKey, bool> correct;
    for (const auto& s : windowed.samples) {
      if (s.key.solution > m_filter) continue;
      auto it = score_of.find(s.key);
      if (it == score_of.end()) continue;
      candidates.push_back({s.key, s.answer ? s.answer->canonical : std::string{}, it->second});
      correct[s.key] = s.correct;
    }
    BestOfNSelection sel;
    sel.question_id = pool.question_id;
    sel.candidates = candidates.size();
    if (!candidates.empty()) {
      const auto& best = best_of_n(candidates);
      sel.selected = best.key;
      sel.score = best.score;
      sel.correct = correct[best.key];
    }
    report.accuracy += sel.correct ? 1.0 : 0.0;
    report.selections.push_back(std::move(sel));
  }
  if (!pools.empty()) report.accuracy /= static_cast<double>(pools.size());
  return report;
}

}  // namespace fracsample
