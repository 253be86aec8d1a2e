// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fracsample {

// A completed thinking trace split into H segments of (nearly) equal token count.
class ThinkingTrace {
 public:
  const std::string& question_id() const { return question_id_; }
  int trajectory() const { return trajectory_; }
  const std::string& text() const { return text_; }
  int token_count() const { return token_count_; }
  int segments() const { return static_cast<int>(boundaries_.size()); }
  // Cumulative token offsets; boundaries()[t-1] is the token count of prefix t.
  const std::vector<int>& boundaries() const { return boundaries_; }
  std::vector<int> segment_sizes() const;
  std::string_view segment_text(int t) const;
  // Character offset just past each segment.
  const std::vector<std::size_t>& char_boundaries() const { return char_boundaries_; }

 private:
  friend ThinkingTrace segment_trace(std::string, std::span<const std::size_t>, int, std::string,
                                     int);
  std::string question_id_;
  int trajectory_ = 0;
  std::string text_;
  int token_count_ = 0;
  std::vector<int> boundaries_;
  std::vector<std::size_t> char_boundaries_;  // character offset after each segment
};

struct PrefixHandle {
  std::string question_id;
  int trajectory = 0;
  int depth = 0;
  std::string text;
  int token_count = 0;
};

// token_offsets holds the character offset at which each token starts, so its
// size is the token count T. Remainder tokens go to the earliest segments.
ThinkingTrace segment_trace(std::string text, std::span<const std::size_t> token_offsets, int H,
                            std::string question_id = {}, int trajectory = 0);

PrefixHandle prefix(const ThinkingTrace& trace, int t);

// Segment sizes for T tokens split H ways: first T mod H get ceil(T/H).
std::vector<int> equal_token_split(int T, int H);

}  // namespace fracsample
