// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#include "fracsample/segmenter.hpp"

#include "fracsample/error.hpp"

namespace fracsample {

std::vector<int> equal_token_split(int T, int H) {
  if (H < 1) throw DomainError("segment count must be positive");
  if (T < H) throw InsufficientTokens(T, H);
  std::vector<int> sizes(static_cast<std::size_t>(H), T / H);
  for (int k = 0; k < T % H; ++k) ++sizes[static_cast<std::size_t>(k)];
  return sizes;
}

ThinkingTrace segment_trace(std::string text, std::span<const std::size_t> token_offsets, int H,
                            std::string question_id, int trajectory) {
  const int T = static_cast<int>(token_offsets.size());
  const auto sizes = equal_token_split(T, H);
  if (token_offsets.front() != 0) throw DomainError("first token offset must be 0");
  for (std::size_t k = 0; k < token_offsets.size(); ++k) {
    if (token_offsets[k] > text.size() || (k > 0 && token_offsets[k] < token_offsets[k - 1])) {
      throw DomainError("token offsets must be nondecreasing and within the text");
    }
  }

  ThinkingTrace trace;
  trace.question_id_ = std::move(question_id);
  trace.trajectory_ = trajectory;
  trace.token_count_ = T;
  int cumulative = 0;
  for (int size : sizes) {
    cumulative += size;
    trace.boundaries_.push_back(cumulative);
    trace.char_boundaries_.push_back(cumulative < T
                                         ? token_offsets[static_cast<std::size_t>(cumulative)]
                                         : text.size());
  }
  trace.text_ = std::move(text);
  return trace;
}

std::vector<int> ThinkingTrace::segment_sizes() const {
  std::vector<int> sizes;
  int prev = 0;
  for (int b : boundaries_) {
    sizes.push_back(b - prev);
    prev = b;
  }
  return sizes;
}

std::string_view ThinkingTrace::segment_text(int t) const {
  if (t < 1 || t > segments()) throw DomainError("segment index out of range");
  const std::size_t begin = t == 1 ? 0 : char_boundaries_[static_cast<std::size_t>(t - 2)];
  const std::size_t end = char_boundaries_[static_cast<std::size_t>(t - 1)];
  return std::string_view(text_).substr(begin, end - begin);
}

PrefixHandle prefix(const ThinkingTrace& trace, int t) {
  if (t < 1 || t > trace.segments()) {
    throw DomainError("prefix depth " + std::to_string(t) + " outside [1, " +
                      std::to_string(trace.segments()) + "]");
  }
  const auto idx = static_cast<std::size_t>(t - 1);
  PrefixHandle h;
  h.question_id = trace.question_id();
  h.trajectory = trace.trajectory();
  h.depth = t;
  h.text = trace.text().substr(0, t == trace.segments() ? trace.text().size()
                                                        : trace.char_boundaries()[idx]);
  h.token_count = trace.boundaries()[idx];
  return h;
}

}  // namespace fracsample
