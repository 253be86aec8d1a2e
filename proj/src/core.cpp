// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#include "fracsample/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracsample/error.hpp"

namespace fracsample {

InsufficientTokens::InsufficientTokens(int tokens, int segments)
    : DomainError("trace has " + std::to_string(tokens) + " tokens, fewer than " +
                  std::to_string(segments) + " segments"),
      tokens_(tokens),
      segments_(segments) {}

CorruptRecord::CorruptRecord(const std::string& path, std::uint64_t byte_offset,
                             const std::string& detail)
    : StoreError(path + ": corrupt record at byte offset " + std::to_string(byte_offset) + ": " +
                 detail),
      byte_offset_(byte_offset) {}

DuplicateRecord::DuplicateRecord(const std::string& identity, std::uint64_t existing_id)
    : StoreError("duplicate record " + identity + " (existing record id " +
                 std::to_string(existing_id) + ")"),
      existing_id_(existing_id) {}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string("compute_budget: ") + name + " must be positive");
  }
}

}  // namespace

void DecodingParams::validate() const {
  if (!(temperature >= 0.0)) throw DomainError("temperature must be >= 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw DomainError("top_p must lie in (0, 1]");
  if (max_tokens <= 0) throw DomainError("max_tokens must be positive");
}

std::string SampleKey::str() const {
  std::ostringstream os;
  os << question_id << "/i" << trajectory << "/t" << depth << "/j" << solution;
  return os.str();
}

void SamplingPlan::validate() const {
  if (n < 1 || m < 1 || H < 1) throw DomainError("plan: n, m and H must be positive");
  if (depth_set.empty()) throw DomainError("plan: depth_set must be nonempty");
  for (std::size_t k = 0; k < depth_set.size(); ++k) {
    if (depth_set[k] < 1 || depth_set[k] > H) {
      throw DomainError("plan: depth " + std::to_string(depth_set[k]) + " outside [1, H]");
    }
    if (k > 0 && depth_set[k] <= depth_set[k - 1]) {
      throw DomainError("plan: depth_set must be strictly increasing");
    }
  }
  params.validate();
}

long long SamplingPlan::requests_per_question() const {
  return static_cast<long long>(n) * (1 + static_cast<long long>(depth_count()) * m);
}

SamplingPlan SamplingPlan::full(int n, int m, int H, std::uint64_t root_seed,
                                DecodingParams params) {
  SamplingPlan p;
  p.n = n;
  p.m = m;
  p.H = H;
  for (int t = 1; t <= H; ++t) p.depth_set.push_back(t);
  p.params = std::move(params);
  p.root_seed = root_seed;
  p.validate();
  return p;
}

SamplingPlan SamplingPlan::vanilla(int n, int m, int H, std::uint64_t root_seed,
                                   DecodingParams params) {
  SamplingPlan p;
  p.n = n;
  p.m = m;
  p.H = H;
  p.depth_set = {H};
  p.params = std::move(params);
  p.root_seed = root_seed;
  p.validate();
  return p;
}

std::uint64_t derive_seed(std::uint64_t root_seed, const SampleKey& key, SeedKind kind) {
  std::uint64_t h = splitmix64(root_seed ^ 0x66726163736d706cULL);
  h = splitmix64(h ^ fnv1a64(key.question_id));
  h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(key.trajectory)));
  h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(key.depth)));
  h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(key.solution)));
  return splitmix64(h ^ static_cast<std::uint64_t>(kind));
}

double compute_budget(int n, int m, int depth_count, double c_thinking, double c_solution) {
  require_positive(n, "n");
  require_positive(m, "m");
  require_positive(depth_count, "depth_count");
  require_positive(c_thinking, "c_thinking");
  require_positive(c_solution, "c_solution");
  return n * (c_thinking + static_cast<double>(m) * depth_count * c_solution);
}

// JSON ----------------------------------------------------------------------

void to_json(nlohmann::json& j, const Question& q) {
  j = {{"id", q.id}, {"prompt", q.prompt}, {"gold_answer", q.gold_answer},
       {"benchmark", q.benchmark}};
}

void from_json(const nlohmann::json& j, Question& q) {
  j.at("id").get_to(q.id);
  q.prompt = j.value("prompt", std::string{});
  j.at("gold_answer").get_to(q.gold_answer);
  q.benchmark = j.value("benchmark", std::string{});
  if (q.id.empty()) throw ConfigError("question with empty id");
  if (q.gold_answer.empty()) throw ConfigError("question " + q.id + " has empty gold_answer");
}

void to_json(nlohmann::json& j, const DecodingParams& p) {
  j = {{"temperature", p.temperature}, {"top_p", p.top_p}, {"max_tokens", p.max_tokens},
       {"stop_sequences", p.stop_sequences}};
}

void from_json(const nlohmann::json& j, DecodingParams& p) {
  DecodingParams d;
  p.temperature = j.value("temperature", d.temperature);
  p.top_p = j.value("top_p", d.top_p);
  p.max_tokens = j.value("max_tokens", d.max_tokens);
  p.stop_sequences = j.value("stop_sequences", std::vector<std::string>{});
}

void to_json(nlohmann::json& j, const SampleKey& k) {
  j = {{"question_id", k.question_id}, {"i", k.trajectory}, {"t", k.depth}, {"j", k.solution}};
}

void from_json(const nlohmann::json& j, SampleKey& k) {
  j.at("question_id").get_to(k.question_id);
  j.at("i").get_to(k.trajectory);
  j.at("t").get_to(k.depth);
  j.at("j").get_to(k.solution);
}

void to_json(nlohmann::json& j, const SamplingPlan& p) {
  j = {{"n", p.n},           {"m", p.m},
       {"H", p.H},           {"depth_set", p.depth_set},
       {"params", p.params}, {"root_seed", p.root_seed}};
}

void from_json(const nlohmann::json& j, SamplingPlan& p) {
  j.at("n").get_to(p.n);
  j.at("m").get_to(p.m);
  j.at("H").get_to(p.H);
  p.depth_set.clear();
  if (j.contains("depth_set")) {
    const auto& ds = j.at("depth_set");
    if (ds.is_string()) {
      // "all", or "last:w" for the trailing depth window
      const auto s = ds.get<std::string>();
      int first = 1;
      if (s.rfind("last:", 0) == 0) {
        first = p.H - std::stoi(s.substr(5)) + 1;
      } else if (s != "all") {
        throw ConfigError("depth_set: unknown selector '" + s + "'");
      }
      for (int t = std::max(first, 1); t <= p.H; ++t) p.depth_set.push_back(t);
    } else {
      ds.get_to(p.depth_set);
    }
  } else {
    for (int t = 1; t <= p.H; ++t) p.depth_set.push_back(t);
  }
  std::sort(p.depth_set.begin(), p.depth_set.end());
  if (j.contains("params")) j.at("params").get_to(p.params);
  p.root_seed = j.value("root_seed", std::uint64_t{0});
  p.validate();
}

void to_json(nlohmann::json& j, const BudgetReport& b) {
  j = {{"c_thinking", b.c_thinking},
       {"c_solution", b.c_solution},
       {"thinking_tokens", b.thinking_tokens},
       {"solution_tokens", b.solution_tokens},
       {"total_tokens", b.total_tokens},
       {"trajectories", b.trajectories},
       {"solutions", b.solutions},
       {"questions", b.questions},
       {"formula_total", b.formula_total}};
}

void from_json(const nlohmann::json& j, BudgetReport& b) {
  j.at("c_thinking").get_to(b.c_thinking);
  j.at("c_solution").get_to(b.c_solution);
  j.at("thinking_tokens").get_to(b.thinking_tokens);
  j.at("solution_tokens").get_to(b.solution_tokens);
  j.at("total_tokens").get_to(b.total_tokens);
  j.at("trajectories").get_to(b.trajectories);
  j.at("solutions").get_to(b.solutions);
  j.at("questions").get_to(b.questions);
  j.at("formula_total").get_to(b.formula_total);
}

}  // namespace fracsample
