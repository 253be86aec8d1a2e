// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "fracsample/backend.hpp"

namespace fracsample {

struct HttpBackendConfig {
  // Full endpoint URL, e.g. http://localhost:8000/v1/completions
  std::string url;
  std::string model;
  // Name of the environment variable holding a bearer token; unset means no auth.
  std::string auth_env = "FRACSAMPLE_API_KEY";
  PromptTemplate prompt;
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{250};
  std::chrono::seconds timeout{600};
  int max_inflight = 8;
  // Adds "logprobs": 0 so servers return per-token text offsets.
  bool request_token_offsets = false;
};

void from_json(const nlohmann::json& j, HttpBackendConfig& c);

// The exact request body sent for one completion. Keys serialize sorted, so
// equal inputs yield byte-identical bodies.
nlohmann::json build_request_body(const HttpBackendConfig& config, const std::string& prompt,
                                  std::uint64_t seed, const DecodingParams& params,
                                  int max_tokens, const std::vector<std::string>& stop);

// Accepts both the flat shape {text, usage, finish_reason} and the
// choices[0] shape of completions-compatible servers.
CompletionResult parse_completion_response(const nlohmann::json& body);

class HttpBackend final : public CompletionBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  ~HttpBackend() override;

  CompletionResult generate_thinking(const Question& question, const SampleKey& key,
                                     std::uint64_t seed, const DecodingParams& params,
                                     std::optional<std::string_view> prior_thinking,
                                     std::optional<int> chunk_limit) override;
  CompletionResult generate_solution(const Question& question, const SampleKey& key,
                                     const PrefixHandle& prefix, std::uint64_t seed,
                                     const DecodingParams& params) override;

  const HttpBackendConfig& config() const { return config_; }

 private:
  CompletionResult post(const SampleKey& key, const nlohmann::json& body);

  struct Impl;
  HttpBackendConfig config_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fracsample
