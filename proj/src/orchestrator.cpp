// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#include "fracsample/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <future>
#include <mutex>
#include <set>
#include <thread>

#include "fracsample/error.hpp"
#include "fracsample/segmenter.hpp"

namespace fracsample {
namespace {

// Runs fn(0..count-1) on up to `workers` threads. The first exception stops
// further dispatch and is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  auto body = [&] {
    for (;;) {
      if (failed.load()) return;
      const std::size_t k = next.fetch_add(1);
      if (k >= count) return;
      try {
        fn(k);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), count);
  if (n <= 1) {
    body();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (std::size_t w = 0; w < n; ++w) pool.emplace_back(body);
  }
  if (error) std::rethrow_exception(error);
}

TraceRecord failure_record(const SampleKey& key, std::uint64_t seed, const DecodingParams& params,
                           const std::exception& e) {
  TraceRecord r;
  r.key = key;
  r.kind = RecordKind::failure;
  r.text = e.what();
  r.seed = seed;
  r.params = params;
  if (const auto* be = dynamic_cast<const BackendError*>(&e)) r.status = be->status();
  r.created_at = utc_timestamp();
  return r;
}

}  // namespace

nlohmann::json summary_to_json(const RunSummary& s) {
  nlohmann::json per_q = nlohmann::json::object();
  for (const auto& [qid, c] : s.per_question) {
    per_q[qid] = {{"thinking", c.thinking}, {"solutions", c.solutions}, {"failures", c.failures}};
  }
  return {{"run_id", s.run_id},
          {"plan", s.plan},
          {"per_question", per_q},
          {"budget", s.budget},
          {"wall_seconds", s.wall_seconds},
          {"records", s.records},
          {"failures", s.failures},
          {"partial", s.partial}};
}

BudgetReport budget_from_records(const std::vector<TraceRecord>& records, const SamplingPlan& plan) {
  BudgetReport b;
  std::set<std::string> questions;
  std::set<std::pair<std::string, int>> trajectories;
  for (const auto& r : records) {
    questions.insert(r.key.question_id);
    switch (r.kind) {
      case RecordKind::thinking:
      case RecordKind::thinking_chunk:
        b.thinking_tokens += r.token_count;
        trajectories.emplace(r.key.question_id, r.key.trajectory);
        break;
      case RecordKind::solution:
        b.solution_tokens += r.token_count;
        ++b.solutions;
        break;
      case RecordKind::failure:
        break;
    }
  }
  b.trajectories = static_cast<long long>(trajectories.size());
  b.questions = static_cast<int>(questions.size());
  b.total_tokens = b.thinking_tokens + b.solution_tokens;
  if (b.trajectories > 0) b.c_thinking = static_cast<double>(b.thinking_tokens) / b.trajectories;
  if (b.solutions > 0) b.c_solution = static_cast<double>(b.solution_tokens) / b.solutions;
  if (b.c_thinking > 0 && b.c_solution > 0) {
    b.formula_total = b.questions * compute_budget(plan.n, plan.m, plan.depth_count(),
                                                   b.c_thinking, b.c_solution);
  }
  return b;
}

RunSummary run_plan(const SamplingPlan& plan, const std::vector<Question>& questions,
                    CompletionBackend& backend, TraceStore& store, const RunOptions& options) {
  plan.validate();
  {
    std::set<std::string> ids;
    for (const auto& q : questions) {
      if (!ids.insert(q.id).second) throw DomainError("duplicate question id " + q.id);
    }
  }
  const auto started = std::chrono::steady_clock::now();
  const std::size_t n = static_cast<std::size_t>(plan.n);

  std::vector<TraceRecord> collected;
  std::mutex collected_mu;
  SerializedAppender appender(store);
  auto persist = [&](TraceRecord r) {
    r.run_id = store.run_id();
    {
      std::lock_guard lock(collected_mu);
      collected.push_back(r);
    }
    appender.submit(std::move(r)).get();
  };

  std::vector<std::optional<ThinkingTrace>> traces(questions.size() * n);
  try {
    parallel_for(traces.size(), options.max_inflight, [&](std::size_t idx) {
      const Question& q = questions[idx / n];
      const auto key = SampleKey::thinking(q.id, static_cast<int>(idx % n) + 1);
      const auto seed = derive_seed(plan.root_seed, key, SeedKind::thinking);
      TraceRecord rec;
      try {
        auto res = backend.generate_thinking(q, key, seed, plan.params, std::nullopt, std::nullopt);
        auto trace = segment_trace(res.text, res.token_offsets, plan.H, q.id, key.trajectory);
        rec.key = key;
        rec.kind = RecordKind::thinking;
        rec.text = std::move(res.text);
        rec.token_count = res.completion_tokens;
        rec.cumulative_thinking_tokens = res.completion_tokens;
        rec.seed = seed;
        rec.params = plan.params;
        rec.finish_reason = std::string(to_string(res.finish_reason));
        rec.segment_boundaries = trace.boundaries();
        rec.created_at = utc_timestamp();
        traces[idx] = std::move(trace);
      } catch (const StoreError&) {
        throw;
      } catch (const std::exception& e) {
        rec = failure_record(key, seed, plan.params, e);
      }
      persist(std::move(rec));
    });

    const std::size_t per_traj = static_cast<std::size_t>(plan.depth_count() * plan.m);
    parallel_for(traces.size() * per_traj, options.max_inflight, [&](std::size_t idx) {
      const std::size_t traj_idx = idx / per_traj;
      const auto& trace = traces[traj_idx];
      if (!trace) return;
      const Question& q = questions[traj_idx / n];
      const std::size_t within = idx % per_traj;
      const int t = plan.depth_set[within / static_cast<std::size_t>(plan.m)];
      const int j = static_cast<int>(within % static_cast<std::size_t>(plan.m)) + 1;
      const SampleKey key{q.id, trace->trajectory(), t, j};
      const auto seed = derive_seed(plan.root_seed, key, SeedKind::solution);
      TraceRecord rec;
      try {
        const auto pre = prefix(*trace, t);
        auto res = backend.generate_solution(q, key, pre, seed, plan.params);
        const auto answer = extract_answer(res.text, options.answer_cue);
        rec.key = key;
        rec.kind = RecordKind::solution;
        rec.text = std::move(res.text);
        rec.token_count = res.completion_tokens;
        rec.cumulative_thinking_tokens = pre.token_count;
        rec.seed = seed;
        rec.params = plan.params;
        rec.finish_reason = std::string(to_string(res.finish_reason));
        if (answer) rec.answer = answer->canonical;
        rec.correct = answer && answers_equal(*answer, CanonicalAnswer::from_raw(q.gold_answer));
        rec.created_at = utc_timestamp();
      } catch (const StoreError&) {
        throw;
      } catch (const std::exception& e) {
        rec = failure_record(key, seed, plan.params, e);
      }
      persist(std::move(rec));
    });
  } catch (const StoreError& e) {
    appender.close();
    store.mark_partial(e.what());
    throw;
  }
  appender.close();

  std::sort(collected.begin(), collected.end(), record_key_less);
  RunSummary s;
  s.run_id = store.run_id();
  s.plan = plan;
  for (const auto& q : questions) s.per_question[q.id];
  for (const auto& r : collected) {
    auto& c = s.per_question[r.key.question_id];
    if (r.kind == RecordKind::thinking) ++c.thinking;
    if (r.kind == RecordKind::solution) ++c.solutions;
    if (r.kind == RecordKind::failure) {
      ++c.failures;
      ++s.failures;
    }
  }
  s.records = static_cast<long long>(collected.size());
  s.budget = budget_from_records(collected, plan);
  s.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return s;
}

// Early stopping --------------------------------------------------------------

void EarlyStopPolicy::validate() const {
  if (interval_tokens <= 0) throw DomainError("early stop: interval_tokens must be positive");
  if (start_tokens < interval_tokens) {
    throw DomainError("early stop: start_tokens must be >= interval_tokens");
  }
  if (repeat_threshold < 2) throw DomainError("early stop: repeat_threshold must be >= 2");
  if (max_tokens < start_tokens) throw DomainError("early stop: max_tokens must be >= start_tokens");
}

void to_json(nlohmann::json& j, const EarlyStopPolicy& p) {
  j = {{"start_tokens", p.start_tokens},
       {"interval_tokens", p.interval_tokens},
       {"repeat_threshold", p.repeat_threshold},
       {"max_tokens", p.max_tokens}};
}

void from_json(const nlohmann::json& j, EarlyStopPolicy& p) {
  EarlyStopPolicy d;
  p.start_tokens = j.value("start_tokens", d.start_tokens);
  p.interval_tokens = j.value("interval_tokens", d.interval_tokens);
  p.repeat_threshold = j.value("repeat_threshold", d.repeat_threshold);
  p.max_tokens = j.value("max_tokens", d.max_tokens);
  p.validate();
}

std::optional<std::size_t> first_repeat_index(
    const std::vector<std::optional<CanonicalAnswer>>& predictions, int repeat_threshold) {
  std::vector<std::pair<CanonicalAnswer, int>> counts;
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    if (!predictions[k]) continue;
    auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& c) {
      return answers_equal(c.first, *predictions[k]);
    });
    if (it == counts.end()) {
      counts.emplace_back(*predictions[k], 1);
      it = counts.end() - 1;
    } else {
      ++it->second;
    }
    if (it->second >= repeat_threshold) return k;
  }
  return std::nullopt;
}

namespace {

std::optional<CanonicalAnswer> last_parseable(const std::vector<Checkpoint>& cps) {
  for (auto it = cps.rbegin(); it != cps.rend(); ++it) {
    if (it->prediction) return it->prediction;
  }
  return std::nullopt;
}

}  // namespace

EarlyStopResult early_stop_answer(const Question& question, const EarlyStopPolicy& policy,
                                  CompletionBackend& backend, const EarlyStopContext& ctx) {
  policy.validate();
  DecodingParams params = ctx.params;
  params.max_tokens = policy.max_tokens;
  const auto gold = CanonicalAnswer::from_raw(question.gold_answer);
  const auto think_key = SampleKey::thinking(question.id, ctx.trajectory);
  const auto think_seed = derive_seed(ctx.root_seed, think_key, SeedKind::thinking);

  EarlyStopResult result;
  std::string thinking;
  bool finished = false;
  int chunk_ordinal = 0;

  auto think = [&](int limit) {
    std::optional<std::string_view> prior;
    if (!thinking.empty()) prior = thinking;
    auto r = backend.generate_thinking(question, think_key, think_seed, params, prior, limit);
    thinking += r.text;
    result.tokens_used += r.completion_tokens;
    finished = r.finish_reason == FinishReason::stop || r.completion_tokens == 0;
    if (ctx.store) {
      TraceRecord rec;
      rec.key = think_key;
      rec.kind = RecordKind::thinking_chunk;
      rec.ordinal = ++chunk_ordinal;
      rec.text = std::move(r.text);
      rec.token_count = r.completion_tokens;
      rec.cumulative_thinking_tokens = result.tokens_used;
      rec.seed = think_seed;
      rec.params = params;
      rec.finish_reason = std::string(to_string(r.finish_reason));
      rec.created_at = utc_timestamp();
      ctx.store->append(rec);
    }
  };

  std::vector<std::optional<CanonicalAnswer>> predictions;
  think(std::min(policy.start_tokens, policy.max_tokens));
  for (int c = 1;; ++c) {
    const SampleKey probe_key{question.id, ctx.trajectory, c, 1};
    const auto probe_seed = derive_seed(ctx.root_seed, probe_key, SeedKind::solution);
    const auto pre = whole_text_prefix(question, ctx.trajectory, c, thinking, result.tokens_used);
    auto sol = backend.generate_solution(question, probe_key, pre, probe_seed, params);
    auto pred = extract_answer(sol.text, ctx.answer_cue);
    result.solution_tokens += sol.completion_tokens;
    result.checkpoints.push_back({result.tokens_used, pred, sol.completion_tokens});
    predictions.push_back(pred);
    if (ctx.store) {
      TraceRecord rec;
      rec.key = probe_key;
      rec.kind = RecordKind::solution;
      rec.text = std::move(sol.text);
      rec.token_count = sol.completion_tokens;
      rec.cumulative_thinking_tokens = result.tokens_used;
      rec.seed = probe_seed;
      rec.params = params;
      rec.finish_reason = std::string(to_string(sol.finish_reason));
      if (pred) rec.answer = pred->canonical;
      rec.correct = pred && answers_equal(*pred, gold);
      rec.created_at = utc_timestamp();
      ctx.store->append(rec);
    }

    if (first_repeat_index(predictions, policy.repeat_threshold) == predictions.size() - 1) {
      result.answer = pred;
      result.stopped_early = true;
      return result;
    }
    if (finished || result.tokens_used >= policy.max_tokens) {
      result.answer = last_parseable(result.checkpoints);
      return result;
    }
    think(std::min(policy.interval_tokens, policy.max_tokens - result.tokens_used));
  }
}

EarlyStopResult replay_early_stop(const std::vector<Checkpoint>& checkpoints,
                                  const EarlyStopPolicy& policy) {
  policy.validate();
  EarlyStopResult result;
  std::vector<std::optional<CanonicalAnswer>> predictions;
  for (const auto& cp : checkpoints) {
    if (cp.thinking_tokens > policy.max_tokens) break;
    result.checkpoints.push_back(cp);
    result.tokens_used = cp.thinking_tokens;
    result.solution_tokens += cp.solution_tokens;
    predictions.push_back(cp.prediction);
    if (first_repeat_index(predictions, policy.repeat_threshold) == predictions.size() - 1) {
      result.answer = cp.prediction;
      result.stopped_early = true;
      return result;
    }
  }
  result.answer = last_parseable(result.checkpoints);
  return result;
}

}  // namespace fracsample
