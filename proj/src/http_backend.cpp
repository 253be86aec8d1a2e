// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "fracsample/http_backend.hpp"

#include <cstdlib>
#include <semaphore>
#include <thread>

#include "fracsample/error.hpp"
#include "httplib.h"

namespace fracsample {
namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("backend url lacks a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string trim_copy(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

void from_json(const nlohmann::json& j, HttpBackendConfig& c) {
  j.at("url").get_to(c.url);
  c.model = j.value("model", std::string{});
  c.auth_env = j.value("auth_env", c.auth_env);
  if (j.contains("template")) j.at("template").get_to(c.prompt);
  c.max_retries = j.value("max_retries", c.max_retries);
  c.initial_backoff = std::chrono::milliseconds(j.value("initial_backoff_ms", 250));
  c.timeout = std::chrono::seconds(j.value("timeout_s", 600));
  c.max_inflight = j.value("max_inflight", c.max_inflight);
  c.request_token_offsets = j.value("request_token_offsets", false);
  if (c.max_inflight < 1) throw ConfigError("http backend: max_inflight must be positive");
  if (c.max_retries < 0) throw ConfigError("http backend: max_retries must be >= 0");
}

nlohmann::json build_request_body(const HttpBackendConfig& config, const std::string& prompt,
                                  std::uint64_t seed, const DecodingParams& params,
                                  int max_tokens, const std::vector<std::string>& stop) {
  nlohmann::json body = {
      {"model", config.model},
      {"prompt", prompt},
      {"temperature", params.temperature},
      {"top_p", params.top_p},
      {"max_tokens", max_tokens},
      // servers commonly parse seeds as signed 64-bit
      {"seed", seed & 0x7fffffffffffffffULL},
      {"stop", stop},
  };
  if (config.request_token_offsets) body["logprobs"] = 0;
  return body;
}

CompletionResult parse_completion_response(const nlohmann::json& body) {
  const nlohmann::json* choice = &body;
  if (body.contains("choices")) {
    const auto& choices = body.at("choices");
    if (!choices.is_array() || choices.empty()) {
      throw BackendError("completion response has no choices", 200, false);
    }
    choice = &choices.at(0);
  }
  if (!choice->contains("text") || !(*choice)["text"].is_string()) {
    throw BackendError("completion response lacks a text field", 200, false);
  }
  CompletionResult r;
  r.text = (*choice)["text"].get<std::string>();
  const auto& usage = body.contains("usage") ? body.at("usage") : choice->value("usage", nlohmann::json{});
  if (!usage.is_object() || !usage.contains("completion_tokens")) {
    throw BackendError("completion response lacks usage.completion_tokens", 200, false);
  }
  r.completion_tokens = usage.at("completion_tokens").get<int>();
  if (r.completion_tokens < 0) throw BackendError("negative completion_tokens", 200, false);
  const auto reason = choice->value("finish_reason", std::string("stop"));
  r.finish_reason = reason == "length" ? FinishReason::length : FinishReason::stop;

  std::vector<std::size_t> offsets;
  if (choice->contains("token_offsets")) {
    offsets = (*choice)["token_offsets"].get<std::vector<std::size_t>>();
  } else if (choice->contains("logprobs") && (*choice)["logprobs"].is_object() &&
             (*choice)["logprobs"].contains("text_offset")) {
    offsets = (*choice)["logprobs"]["text_offset"].get<std::vector<std::size_t>>();
  }
  bool usable = offsets.size() == static_cast<std::size_t>(r.completion_tokens);
  if (usable && !offsets.empty()) {
    const std::size_t base = offsets.front();
    for (auto& o : offsets) {
      if (o < base || o - base > r.text.size()) {
        usable = false;
        break;
      }
      o -= base;
    }
  }
  r.token_offsets = usable ? std::move(offsets)
                           : proportional_token_offsets(r.text, r.completion_tokens);
  return r;
}

struct HttpBackend::Impl {
  explicit Impl(int inflight) : slots(inflight) {}
  std::counting_semaphore<4096> slots;
  ParsedUrl url;
  std::string bearer;
};

HttpBackend::HttpBackend(HttpBackendConfig config)
    : config_(std::move(config)), impl_(std::make_unique<Impl>(config_.max_inflight)) {
  config_.prompt.validate();
  impl_->url = split_url(config_.url);
  if (!config_.auth_env.empty()) {
    if (const char* token = std::getenv(config_.auth_env.c_str())) impl_->bearer = token;
  }
}

HttpBackend::~HttpBackend() = default;

CompletionResult HttpBackend::post(const SampleKey& key, const nlohmann::json& body) {
  const std::string payload = body.dump();
  httplib::Headers headers = {{"X-Request-Id", key.str()}};
  if (!impl_->bearer.empty()) headers.emplace("Authorization", "Bearer " + impl_->bearer);

  impl_->slots.acquire();
  struct Release {
    std::counting_semaphore<4096>& s;
    ~Release() { s.release(); }
  } release{impl_->slots};

  auto backoff = config_.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    httplib::Client client(impl_->url.origin);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    auto res = client.Post(impl_->url.path, headers, payload, "application/json");
    if (!res) {
      if (attempt >= config_.max_retries) {
        throw BackendError("transport failure for " + key.str() + ": " +
                               httplib::to_string(res.error()),
                           0, true);
      }
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
      continue;
    }
    if (res->status >= 400) {
      throw BackendError("backend returned HTTP " + std::to_string(res->status) + " for " +
                             key.str() + ": " + res->body.substr(0, 512),
                         res->status, false);
    }
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(std::string("malformed completion response: ") + e.what(), res->status,
                         false);
    }
    return parse_completion_response(parsed);
  }
}

CompletionResult HttpBackend::generate_thinking(const Question& question, const SampleKey& key,
                                                std::uint64_t seed, const DecodingParams& params,
                                                std::optional<std::string_view> prior_thinking,
                                                std::optional<int> chunk_limit) {
  if (chunk_limit && (*chunk_limit <= 0 || *chunk_limit > params.max_tokens)) {
    throw DomainError("chunk_limit must lie in [1, max_tokens]");
  }
  const auto prompt = config_.prompt.render_thinking(question, prior_thinking.value_or(""));
  auto stop = params.stop_sequences;
  if (auto close = trim_copy(config_.prompt.think_close); !close.empty()) stop.push_back(close);
  return post(key, build_request_body(config_, prompt, seed, params,
                                      chunk_limit.value_or(params.max_tokens), stop));
}

CompletionResult HttpBackend::generate_solution(const Question& question, const SampleKey& key,
                                                const PrefixHandle& prefix, std::uint64_t seed,
                                                const DecodingParams& params) {
  if (prefix.question_id != question.id) {
    throw DomainError("prefix belongs to question " + prefix.question_id + ", not " + question.id);
  }
  const auto prompt = config_.prompt.render_solution(question, prefix.text);
  return post(key, build_request_body(config_, prompt, seed, params, params.max_tokens,
                                      params.stop_sequences));
}

}  // namespace fracsample
