// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#include "fracsample/backend.hpp"

#include "fracsample/error.hpp"

namespace fracsample {

void PromptTemplate::validate() const {
  if (think_open.empty() || think_close.empty()) {
    throw ConfigError("prompt template: think markers must be non-empty");
  }
}

std::string PromptTemplate::render_preamble(const Question& q) const {
  static constexpr std::string_view kSlot = "{question}";
  std::string out;
  std::size_t pos = 0;
  for (std::size_t hit = preamble.find(kSlot); hit != std::string::npos;
       hit = preamble.find(kSlot, pos)) {
    out.append(preamble, pos, hit - pos);
    out += q.prompt;
    pos = hit + kSlot.size();
  }
  out.append(preamble, pos, std::string::npos);
  return out;
}

std::string PromptTemplate::render_thinking(const Question& q,
                                            std::string_view prior_thinking) const {
  std::string out = render_preamble(q);
  out += think_open;
  out += prior_thinking;
  return out;
}

std::string PromptTemplate::render_solution(const Question& q,
                                            std::string_view prefix_text) const {
  std::string out = render_preamble(q);
  out += think_open;
  out += prefix_text;
  out += think_close;
  out += solution_cue;
  return out;
}

void to_json(nlohmann::json& j, const PromptTemplate& t) {
  j = {{"preamble", t.preamble},
       {"think_open", t.think_open},
       {"think_close", t.think_close},
       {"solution_cue", t.solution_cue}};
}

void from_json(const nlohmann::json& j, PromptTemplate& t) {
  PromptTemplate d;
  t.preamble = j.value("preamble", d.preamble);
  t.think_open = j.value("think_open", d.think_open);
  t.think_close = j.value("think_close", d.think_close);
  t.solution_cue = j.value("solution_cue", d.solution_cue);
  t.validate();
}

std::string_view to_string(FinishReason r) {
  return r == FinishReason::length ? "length" : "stop";
}

std::vector<std::size_t> proportional_token_offsets(std::string_view text, int count) {
  std::vector<std::size_t> offsets;
  if (count <= 0) return offsets;
  offsets.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    std::size_t off = text.size() * static_cast<std::size_t>(k) / static_cast<std::size_t>(count);
    // UTF-8 continuation bytes are 10xxxxxx
    while (off > 0 && off < text.size() &&
           (static_cast<unsigned char>(text[off]) & 0xC0) == 0x80) {
      --off;
    }
    if (!offsets.empty() && off < offsets.back()) off = offsets.back();
    offsets.push_back(off);
  }
  return offsets;
}

PrefixHandle whole_text_prefix(const Question& q, int trajectory, int depth, std::string text,
                               int token_count) {
  PrefixHandle h;
  h.question_id = q.id;
  h.trajectory = trajectory;
  h.depth = depth;
  h.text = std::move(text);
  h.token_count = token_count;
  return h;
}

}  // namespace fracsample
