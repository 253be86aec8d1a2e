// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fracsample/backend.hpp"
#include "fracsample/store.hpp"

namespace fracsample {

// Correlated-failure model behind the synthetic backend. For trajectory seed
// s and probe j the latent vector over depths is
//   Z_j = sqrt(rho) * A + sqrt(1 - rho) * E_j,   A, E_j ~ N(0, R) iid,
// so depths of one probe have latent correlation R, probes at the same
// depth have latent correlation rho, and failure at depth t is Z_t > z_{p_t}.
struct LatentFailureModel {
  int H = 16;
  std::vector<double> success;      // p_t, each in (0, 1)
  std::vector<double> correlation;  // R, row-major H x H
  double probe_correlation = 0.9;   // rho in [0, 1]
  std::vector<std::string> wrong_answer_pool = {"0", "1", "2", "3"};
  int tokens_per_segment = 64;
  int tokens_per_solution = 32;

  void validate() const;
  double failure_probability(int t) const { return 1.0 - success.at(static_cast<std::size_t>(t - 1)); }

  // R with every off-diagonal entry equal to rho_depth.
  static std::vector<double> uniform_correlation(int H, double rho_depth);
  // p_t linear from first to last over t = 1..H.
  static std::vector<double> linear_success(int H, double first, double last);
};

void to_json(nlohmann::json& j, const LatentFailureModel& m);
void from_json(const nlohmann::json& j, LatentFailureModel& m);

// Precomputes the factor of R and the thresholds. Throws ConfigError if R is
// not symmetric positive semidefinite with unit diagonal.
class LatentFailureSampler {
 public:
  explicit LatentFailureSampler(LatentFailureModel model);

  const LatentFailureModel& model() const { return model_; }
  std::vector<double> latent(std::uint64_t seed, int probe = 1) const;
  // H failure indicators for one probe of one trajectory.
  std::vector<bool> failures(std::uint64_t seed, int probe = 1) const;

 private:
  LatentFailureModel model_;
  std::vector<double> factor_;      // H x H, R = F F^T
  std::vector<double> thresholds_;  // quantile p_t of N(0,1)
};

std::vector<bool> sample_failures(const LatentFailureSampler& sampler, std::uint64_t seed);

// P(Z1 <= x, Z2 <= y) for standard bivariate normal with correlation rho.
double bivariate_normal_cdf(double x, double y, double rho);
// Pearson correlation of failure indicators at depths a and b of one probe.
double implied_failure_correlation(const LatentFailureModel& model, int a, int b);

// Explicit distribution over {0,1}^K; bit k of an outcome index is F_{k+1}.
class JointTable {
 public:
  explicit JointTable(std::vector<double> probabilities);

  static JointTable independent(std::span<const double> failure_probs);
  static JointTable comonotone(double failure_prob, int K);
  static JointTable from_json(const nlohmann::json& j);

  int K() const { return K_; }
  const std::vector<double>& probabilities() const { return probs_; }
  double marginal(int k) const;                 // q_k, 0-based k
  double moment(std::uint32_t subset) const;    // E[prod_{k in subset} F_k]
  double covariance(int a, int b) const;

 private:
  int K_ = 0;
  std::vector<double> probs_;
};

double all_fail_probability(const JointTable& table);

struct ExpansionTerms {
  double product_of_marginals = 0.0;
  double pairwise_covariance_sum = 0.0;
  double higher_order_remainder = 0.0;
  double all_fail = 0.0;
};

// order 1 folds the pairwise term into the remainder; order >= 2 reports it.
ExpansionTerms expansion_terms(const JointTable& table, int order = 2);

// Scripted thinking for a question: natural length and the answer a solution
// probe gives once the prefix reaches each token threshold.
struct SyntheticScript {
  int thinking_tokens = 0;
  std::vector<std::pair<int, std::string>> checkpoints;  // (min prefix tokens, answer)
};

// Out-of-band scorer for synthetic runs: mean by correctness plus uniform
// noise in [-noise, noise] drawn from the record seed.
struct SyntheticScorer {
  double correct_mean = 0.6;
  double wrong_mean = 0.4;
  double noise = 0.3;
  std::string id = "synthetic";

  double score(bool correct, std::uint64_t seed) const;
};

struct SyntheticConfig {
  LatentFailureModel model;
  std::map<std::string, SyntheticScript> scripts;
  std::optional<SyntheticScorer> scorer;
};

void from_json(const nlohmann::json& j, SyntheticConfig& c);

// Deterministic stand-in completion service. Thinking text is a token stream
// fixed by the trajectory seed; its first token records that seed so a
// solution request can recover the trajectory from the prefix alone.
class SyntheticBackend final : public CompletionBackend {
 public:
  explicit SyntheticBackend(SyntheticConfig config);

  CompletionResult generate_thinking(const Question& question, const SampleKey& key,
                                     std::uint64_t seed, const DecodingParams& params,
                                     std::optional<std::string_view> prior_thinking,
                                     std::optional<int> chunk_limit) override;
  CompletionResult generate_solution(const Question& question, const SampleKey& key,
                                     const PrefixHandle& prefix, std::uint64_t seed,
                                     const DecodingParams& params) override;

  const SyntheticConfig& config() const { return config_; }
  const LatentFailureSampler& sampler() const { return sampler_; }
  int natural_thinking_tokens(const std::string& question_id) const;
  // Model depth (1..H) a prefix of prefix_tokens maps to.
  int model_depth(const std::string& question_id, int prefix_tokens) const;

 private:
  SyntheticConfig config_;
  LatentFailureSampler sampler_;
};

// Scores every solution record of a run with the synthetic scorer.
std::vector<ScoreRecord> synthetic_scores(const std::vector<TraceRecord>& records,
                                          const SyntheticScorer& scorer);

}  // namespace fracsample
