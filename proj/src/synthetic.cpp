// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#include "fracsample/synthetic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <bit>
#include <boost/math/constants/constants.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>
#include <random>

#include "fracsample/answer.hpp"
#include "fracsample/error.hpp"

namespace fracsample {
namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_uniform(std::uint64_t x) { return static_cast<double>(mix64(x) >> 11) * 0x1.0p-53; }

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

constexpr std::array<std::string_view, 12> kThinkingWords = {
    "so", "then", "wait", "check", "thus", "hmm", "compute", "recall", "therefore", "consider",
    "verify", "next"};

constexpr std::string_view kHeaderPrefix = "trace:";

std::string header_token(std::uint64_t seed) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "trace:%016llx", static_cast<unsigned long long>(seed));
  return buf;
}

std::optional<std::uint64_t> parse_header(std::string_view text) {
  if (text.substr(0, kHeaderPrefix.size()) != kHeaderPrefix) return std::nullopt;
  const auto hex = text.substr(kHeaderPrefix.size(), 16);
  if (hex.size() != 16) return std::nullopt;
  std::uint64_t v = 0;
  for (char c : hex) {
    v <<= 4;
    if (c >= '0' && c <= '9') {
      v |= static_cast<std::uint64_t>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      v |= static_cast<std::uint64_t>(c - 'a' + 10);
    } else {
      return std::nullopt;
    }
  }
  return v;
}

int count_space_tokens(std::string_view text) {
  if (text.empty()) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.end(), ' '));
}

}  // namespace

// LatentFailureModel ---------------------------------------------------------

std::vector<double> LatentFailureModel::uniform_correlation(int H, double rho_depth) {
  std::vector<double> r(static_cast<std::size_t>(H * H), rho_depth);
  for (int t = 0; t < H; ++t) r[static_cast<std::size_t>(t * H + t)] = 1.0;
  return r;
}

std::vector<double> LatentFailureModel::linear_success(int H, double first, double last) {
  std::vector<double> p(static_cast<std::size_t>(H));
  for (int t = 0; t < H; ++t) {
    p[static_cast<std::size_t>(t)] = H == 1 ? last : first + (last - first) * t / (H - 1);
  }
  return p;
}

void LatentFailureModel::validate() const {
  if (H < 1) throw ConfigError("latent model: H must be positive");
  if (success.size() != static_cast<std::size_t>(H)) {
    throw ConfigError("latent model: need one success probability per depth");
  }
  for (double p : success) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("latent model: success probabilities must lie in (0, 1)");
  }
  if (correlation.size() != static_cast<std::size_t>(H * H)) {
    throw ConfigError("latent model: correlation must be H x H");
  }
  if (!(probe_correlation >= 0.0 && probe_correlation <= 1.0)) {
    throw ConfigError("latent model: probe_correlation must lie in [0, 1]");
  }
  if (wrong_answer_pool.empty()) throw ConfigError("latent model: wrong_answer_pool is empty");
  if (tokens_per_segment < 1 || tokens_per_solution < 1) {
    throw ConfigError("latent model: token sizes must be positive");
  }
}

void to_json(nlohmann::json& j, const LatentFailureModel& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int a = 0; a < m.H; ++a) {
    rows.push_back(std::vector<double>(m.correlation.begin() + a * m.H,
                                       m.correlation.begin() + (a + 1) * m.H));
  }
  j = {{"H", m.H},
       {"success", m.success},
       {"correlation", rows},
       {"probe_correlation", m.probe_correlation},
       {"wrong_answer_pool", m.wrong_answer_pool},
       {"tokens_per_segment", m.tokens_per_segment},
       {"tokens_per_solution", m.tokens_per_solution}};
}

void from_json(const nlohmann::json& j, LatentFailureModel& m) {
  LatentFailureModel d;
  m.H = j.value("H", d.H);
  const auto& s = j.at("success");
  if (s.is_number()) {
    m.success.assign(static_cast<std::size_t>(m.H), s.get<double>());
  } else if (s.is_object()) {
    const auto lin = s.at("linear").get<std::vector<double>>();
    if (lin.size() != 2) throw ConfigError("success.linear needs [first, last]");
    m.success = LatentFailureModel::linear_success(m.H, lin[0], lin[1]);
  } else {
    s.get_to(m.success);
  }
  if (!j.contains("correlation")) {
    m.correlation = LatentFailureModel::uniform_correlation(m.H, 0.0);
  } else if (const auto& c = j.at("correlation"); c.is_number()) {
    m.correlation = LatentFailureModel::uniform_correlation(m.H, c.get<double>());
  } else {
    m.correlation.clear();
    for (const auto& row : c) {
      for (const auto& v : row) m.correlation.push_back(v.get<double>());
    }
  }
  m.probe_correlation = j.value("probe_correlation", d.probe_correlation);
  m.wrong_answer_pool = j.value("wrong_answer_pool", d.wrong_answer_pool);
  m.tokens_per_segment = j.value("tokens_per_segment", d.tokens_per_segment);
  m.tokens_per_solution = j.value("tokens_per_solution", d.tokens_per_solution);
  m.validate();
}

// LatentFailureSampler -------------------------------------------------------

LatentFailureSampler::LatentFailureSampler(LatentFailureModel model) : model_(std::move(model)) {
  model_.validate();
  const int H = model_.H;
  Eigen::MatrixXd R(H, H);
  for (int a = 0; a < H; ++a) {
    for (int b = 0; b < H; ++b) R(a, b) = model_.correlation[static_cast<std::size_t>(a * H + b)];
  }
  for (int a = 0; a < H; ++a) {
    if (std::abs(R(a, a) - 1.0) > 1e-12) throw ConfigError("latent correlation needs unit diagonal");
    for (int b = 0; b < a; ++b) {
      if (std::abs(R(a, b) - R(b, a)) > 1e-12) throw ConfigError("latent correlation is not symmetric");
      if (std::abs(R(a, b)) > 1.0) throw ConfigError("latent correlation entry outside [-1, 1]");
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(R);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() < -1e-9) {
    throw ConfigError("latent correlation is not positive semidefinite");
  }
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd F = eig.eigenvectors() * root.asDiagonal();
  factor_.resize(static_cast<std::size_t>(H * H));
  for (int a = 0; a < H; ++a) {
    for (int b = 0; b < H; ++b) factor_[static_cast<std::size_t>(a * H + b)] = F(a, b);
  }
  const boost::math::normal_distribution<double> normal;
  for (double p : model_.success) thresholds_.push_back(boost::math::quantile(normal, p));
}

std::vector<double> LatentFailureSampler::latent(std::uint64_t seed, int probe) const {
  const int H = model_.H;
  const auto correlated = [&](std::uint64_t stream) {
    std::mt19937_64 gen(mix64(seed ^ mix64(stream)));
    std::normal_distribution<double> nd;
    std::vector<double> g(static_cast<std::size_t>(H));
    for (auto& v : g) v = nd(gen);
    std::vector<double> out(static_cast<std::size_t>(H), 0.0);
    for (int a = 0; a < H; ++a) {
      for (int b = 0; b < H; ++b) {
        out[static_cast<std::size_t>(a)] +=
            factor_[static_cast<std::size_t>(a * H + b)] * g[static_cast<std::size_t>(b)];
      }
    }
    return out;
  };
  const double rho = model_.probe_correlation;
  auto z = correlated(0);
  if (rho < 1.0) {
    const auto e = correlated(static_cast<std::uint64_t>(std::max(probe, 1)));
    const double ws = std::sqrt(rho), we = std::sqrt(1.0 - rho);
    for (std::size_t t = 0; t < z.size(); ++t) z[t] = ws * z[t] + we * e[t];
  }
  return z;
}

std::vector<bool> LatentFailureSampler::failures(std::uint64_t seed, int probe) const {
  const auto z = latent(seed, probe);
  std::vector<bool> out(z.size());
  for (std::size_t t = 0; t < z.size(); ++t) out[t] = z[t] > thresholds_[t];
  return out;
}

std::vector<bool> sample_failures(const LatentFailureSampler& sampler, std::uint64_t seed) {
  return sampler.failures(seed, 1);
}

double bivariate_normal_cdf(double x, double y, double rho) {
  if (rho >= 1.0) return std_normal_cdf(std::min(x, y));
  if (rho <= -1.0) return std::max(0.0, std_normal_cdf(x) + std_normal_cdf(y) - 1.0);
  const double two_pi = boost::math::constants::two_pi<double>();
  auto integrand = [&](double r) {
    const double one_minus = 1.0 - r * r;
    return std::exp(-(x * x - 2.0 * r * x * y + y * y) / (2.0 * one_minus)) / std::sqrt(one_minus);
  };
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, rho, 15, 1e-13);
  return std_normal_cdf(x) * std_normal_cdf(y) + integral / two_pi;
}

double implied_failure_correlation(const LatentFailureModel& model, int a, int b) {
  model.validate();
  if (a < 1 || a > model.H || b < 1 || b > model.H) throw DomainError("depth out of range");
  const boost::math::normal_distribution<double> normal;
  const double ha = boost::math::quantile(normal, model.success[static_cast<std::size_t>(a - 1)]);
  const double hb = boost::math::quantile(normal, model.success[static_cast<std::size_t>(b - 1)]);
  const double rho = model.correlation[static_cast<std::size_t>((a - 1) * model.H + (b - 1))];
  const double qa = model.failure_probability(a), qb = model.failure_probability(b);
  // P(Z_a > ha, Z_b > hb) = P(-Z_a < -ha, -Z_b < -hb)
  const double both = bivariate_normal_cdf(-ha, -hb, rho);
  return (both - qa * qb) / std::sqrt(qa * (1.0 - qa) * qb * (1.0 - qb));
}

// JointTable -----------------------------------------------------------------

JointTable::JointTable(std::vector<double> probabilities) : probs_(std::move(probabilities)) {
  const std::size_t n = probs_.size();
  if (n < 2 || (n & (n - 1)) != 0) throw DomainError("joint table size must be 2^K with K >= 1");
  K_ = std::countr_zero(n);
  if (K_ > 12) throw DomainError("joint table supports K <= 12");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("joint table probabilities must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DomainError("joint table probabilities must sum to 1");
}

JointTable JointTable::independent(std::span<const double> q) {
  const std::size_t K = q.size();
  std::vector<double> p(std::size_t{1} << K, 1.0);
  for (std::size_t o = 0; o < p.size(); ++o) {
    for (std::size_t k = 0; k < K; ++k) p[o] *= (o >> k & 1U) ? q[k] : 1.0 - q[k];
  }
  return JointTable(std::move(p));
}

JointTable JointTable::comonotone(double q, int K) {
  std::vector<double> p(std::size_t{1} << K, 0.0);
  p.front() = 1.0 - q;
  p.back() = q;
  return JointTable(std::move(p));
}

JointTable JointTable::from_json(const nlohmann::json& j) {
  if (j.is_object()) return JointTable(j.at("probabilities").get<std::vector<double>>());
  return JointTable(j.get<std::vector<double>>());
}

double JointTable::moment(std::uint32_t subset) const {
  double s = 0.0;
  for (std::uint32_t o = 0; o < probs_.size(); ++o) {
    if ((o & subset) == subset) s += probs_[o];
  }
  return s;
}

double JointTable::marginal(int k) const {
  if (k < 0 || k >= K_) throw DomainError("joint table index out of range");
  return moment(1U << k);
}

double JointTable::covariance(int a, int b) const {
  return moment((1U << a) | (1U << b)) - marginal(a) * marginal(b);
}

double all_fail_probability(const JointTable& table) { return table.probabilities().back(); }

ExpansionTerms expansion_terms(const JointTable& table, int order) {
  if (order < 1) throw DomainError("expansion order must be >= 1");
  ExpansionTerms e;
  e.all_fail = all_fail_probability(table);
  e.product_of_marginals = 1.0;
  for (int k = 0; k < table.K(); ++k) e.product_of_marginals *= table.marginal(k);
  if (order >= 2) {
    for (int a = 0; a < table.K(); ++a) {
      for (int b = a + 1; b < table.K(); ++b) e.pairwise_covariance_sum += table.covariance(a, b);
    }
  }
  e.higher_order_remainder = e.all_fail - e.product_of_marginals - e.pairwise_covariance_sum;
  return e;
}

// Scorer ---------------------------------------------------------------------

double SyntheticScorer::score(bool correct, std::uint64_t seed) const {
  const double u = unit_uniform(seed ^ 0x73636f7265ULL);
  return (correct ? correct_mean : wrong_mean) + noise * (2.0 * u - 1.0);
}

std::vector<ScoreRecord> synthetic_scores(const std::vector<TraceRecord>& records,
                                          const SyntheticScorer& scorer) {
  std::vector<ScoreRecord> out;
  for (const auto& r : records) {
    if (r.kind != RecordKind::solution || !r.correct) continue;
    out.push_back({r.run_id, r.key, scorer.score(*r.correct, r.seed), scorer.id});
  }
  return out;
}

void from_json(const nlohmann::json& j, SyntheticConfig& c) {
  from_json(j.contains("model") ? j.at("model") : j, c.model);
  c.scripts.clear();
  if (j.contains("scripts")) {
    for (const auto& [qid, s] : j.at("scripts").items()) {
      SyntheticScript script;
      s.at("thinking_tokens").get_to(script.thinking_tokens);
      for (const auto& cp : s.value("checkpoints", nlohmann::json::array())) {
        script.checkpoints.emplace_back(cp.at(0).get<int>(), cp.at(1).get<std::string>());
      }
      std::sort(script.checkpoints.begin(), script.checkpoints.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (script.thinking_tokens < 1) throw ConfigError("script thinking_tokens must be positive");
      c.scripts.emplace(qid, std::move(script));
    }
  }
  c.scorer.reset();
  if (j.contains("scorer")) {
    const auto& s = j.at("scorer");
    SyntheticScorer sc;
    sc.correct_mean = s.value("correct_mean", sc.correct_mean);
    sc.wrong_mean = s.value("wrong_mean", sc.wrong_mean);
    sc.noise = s.value("noise", sc.noise);
    sc.id = s.value("id", sc.id);
    c.scorer = sc;
  }
}

// SyntheticBackend -----------------------------------------------------------

SyntheticBackend::SyntheticBackend(SyntheticConfig config)
    : config_(std::move(config)), sampler_(config_.model) {}

int SyntheticBackend::natural_thinking_tokens(const std::string& question_id) const {
  if (auto it = config_.scripts.find(question_id); it != config_.scripts.end()) {
    return it->second.thinking_tokens;
  }
  return config_.model.H * config_.model.tokens_per_segment;
}

int SyntheticBackend::model_depth(const std::string& question_id, int prefix_tokens) const {
  const long long T = natural_thinking_tokens(question_id);
  const long long H = config_.model.H;
  const long long t = (static_cast<long long>(prefix_tokens) * H + T - 1) / T;
  return static_cast<int>(std::clamp<long long>(t, 1, H));
}

CompletionResult SyntheticBackend::generate_thinking(const Question& question, const SampleKey&,
                                                     std::uint64_t seed,
                                                     const DecodingParams& params,
                                                     std::optional<std::string_view> prior,
                                                     std::optional<int> chunk_limit) {
  if (chunk_limit && (*chunk_limit <= 0 || *chunk_limit > params.max_tokens)) {
    throw DomainError("chunk_limit must lie in [1, max_tokens]");
  }
  std::uint64_t stream_seed = seed;
  int start = 0;
  if (prior && !prior->empty()) {
    if (auto s = parse_header(*prior)) stream_seed = *s;
    start = count_space_tokens(*prior);
  }
  const int T = natural_thinking_tokens(question.id);
  const int limit = chunk_limit.value_or(params.max_tokens);
  const int end = std::min<long long>(T, static_cast<long long>(start) + limit);

  CompletionResult r;
  for (int k = start; k < end; ++k) {
    r.token_offsets.push_back(r.text.size());
    if (k == 0) {
      r.text += header_token(stream_seed);
    } else {
      r.text += ' ';
      r.text += kThinkingWords[mix64(stream_seed ^ mix64(static_cast<std::uint64_t>(k))) %
                               kThinkingWords.size()];
    }
  }
  r.completion_tokens = std::max(0, end - start);
  r.finish_reason = end >= T ? FinishReason::stop : FinishReason::length;
  return r;
}

CompletionResult SyntheticBackend::generate_solution(const Question& question, const SampleKey& key,
                                                     const PrefixHandle& prefix,
                                                     std::uint64_t seed, const DecodingParams&) {
  if (prefix.question_id != question.id) {
    throw DomainError("prefix belongs to question " + prefix.question_id + ", not " + question.id);
  }
  std::optional<std::string> answer;
  const auto traj = parse_header(prefix.text);
  if (auto it = config_.scripts.find(question.id); it != config_.scripts.end()) {
    for (const auto& [threshold, a] : it->second.checkpoints) {
      if (prefix.token_count >= threshold) answer = a;
    }
  } else if (traj) {
    const int t = model_depth(question.id, prefix.token_count);
    const bool failed =
        sampler_.failures(*traj, std::max(key.solution, 1))[static_cast<std::size_t>(t - 1)];
    if (!failed) {
      answer = question.gold_answer;
    } else {
      const auto gold = CanonicalAnswer::from_raw(question.gold_answer);
      const auto& pool = config_.model.wrong_answer_pool;
      const std::size_t first = mix64(seed) % pool.size();
      for (std::size_t k = 0; k < pool.size() && !answer; ++k) {
        const auto& cand = pool[(first + k) % pool.size()];
        if (!answers_equal(CanonicalAnswer::from_raw(cand), gold)) answer = cand;
      }
      if (!answer) answer = "none";
    }
  }

  CompletionResult r;
  const int n = config_.model.tokens_per_solution;
  for (int k = 0; k + 1 < n; ++k) {
    if (k > 0) r.text += ' ';
    r.token_offsets.push_back(r.text.size());
    r.text += kThinkingWords[mix64(seed + static_cast<std::uint64_t>(k)) % kThinkingWords.size()];
  }
  if (n > 1) r.text += ' ';
  r.token_offsets.push_back(r.text.size());
  r.text += answer ? "\\boxed{" + *answer + "}" : std::string("undetermined");
  r.completion_tokens = n;
  r.finish_reason = FinishReason::stop;
  return r;
}

}  // namespace fracsample
