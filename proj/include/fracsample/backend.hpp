// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fracsample/core.hpp"
#include "fracsample/segmenter.hpp"

namespace fracsample {

// Prompt layout for two-phase generation. The preamble may contain a
// "{question}" placeholder that is replaced with the question prompt.
//   thinking: preamble + think_open + prior_thinking
//   solution: preamble + think_open + prefix + think_close + solution_cue
struct PromptTemplate {
  std::string preamble =
      "<\xEF\xBD\x9C" "User\xEF\xBD\x9C>{question}\n"
      "Please reason step by step, and put your final answer within \\boxed{}."
      "<\xEF\xBD\x9C" "Assistant\xEF\xBD\x9C>";
  std::string think_open = "<think>\n";
  std::string think_close = "\n</think>\n\n";
  std::string solution_cue;

  void validate() const;
  std::string render_preamble(const Question& q) const;
  std::string render_thinking(const Question& q, std::string_view prior_thinking) const;
  std::string render_solution(const Question& q, std::string_view prefix_text) const;
};

void to_json(nlohmann::json& j, const PromptTemplate& t);
void from_json(const nlohmann::json& j, PromptTemplate& t);

enum class FinishReason { stop, length };

std::string_view to_string(FinishReason r);

struct CompletionResult {
  std::string text;
  int completion_tokens = 0;
  // Start offset of each generated token within text; size == completion_tokens.
  std::vector<std::size_t> token_offsets;
  FinishReason finish_reason = FinishReason::stop;
};

// Two-phase completion contract. The key travels with each request as its
// correlation id; implementations must be safe to call concurrently.
class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;

  // Returns only the newly generated thinking tokens. When prior_thinking is
  // set the request continues that text; chunk_limit caps this request.
  virtual CompletionResult generate_thinking(const Question& question, const SampleKey& key,
                                             std::uint64_t seed, const DecodingParams& params,
                                             std::optional<std::string_view> prior_thinking,
                                             std::optional<int> chunk_limit) = 0;

  // Force-closes the thinking block after prefix.text and elicits the answer.
  virtual CompletionResult generate_solution(const Question& question, const SampleKey& key,
                                             const PrefixHandle& prefix, std::uint64_t seed,
                                             const DecodingParams& params) = 0;
};

// Fallback token boundaries when the server reports only a count: the text is
// cut into `count` pieces of near-equal byte length, snapped to UTF-8 starts.
std::vector<std::size_t> proportional_token_offsets(std::string_view text, int count);

// Wraps a full accumulated thinking text as a prefix handle.
PrefixHandle whole_text_prefix(const Question& q, int trajectory, int depth, std::string text,
                               int token_count);

}  // namespace fracsample
