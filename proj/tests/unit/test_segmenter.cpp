// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#include <numeric>
#include <random>

#include "doctest.h"
#include "fracsample/error.hpp"
#include "fracsample/segmenter.hpp"

using namespace fracsample;

namespace {

// "w0 w1 w2 ..." with one token per word (leading space on all but the first).
std::pair<std::string, std::vector<std::size_t>> words(int count) {
  std::string text;
  std::vector<std::size_t> offsets;
  for (int i = 0; i < count; ++i) {
    offsets.push_back(text.size());
    if (i > 0) text += ' ';
    text += "w" + std::to_string(i);
  }
  return {text, offsets};
}

}  // namespace

TEST_CASE("remainder tokens go to the first segments") {
  CHECK(equal_token_split(10, 4) == std::vector<int>{3, 3, 2, 2});
  CHECK(equal_token_split(16, 4) == std::vector<int>{4, 4, 4, 4});
  CHECK(equal_token_split(5, 5) == std::vector<int>{1, 1, 1, 1, 1});
}

TEST_CASE("segment_trace boundaries and prefixes") {
  auto [text, offsets] = words(10);
  const auto trace = segment_trace(text, offsets, 4, "q", 1);
  CHECK(trace.segments() == 4);
  CHECK(trace.boundaries() == std::vector<int>{3, 6, 8, 10});
  CHECK(trace.segment_sizes() == std::vector<int>{3, 3, 2, 2});
  CHECK(trace.segment_text(1) == "w0 w1 w2");
  CHECK(trace.segment_text(2) == " w3 w4 w5");

  const auto p1 = prefix(trace, 1);
  CHECK(p1.text == "w0 w1 w2");
  CHECK(p1.token_count == 3);
  CHECK(p1.depth == 1);
  CHECK(p1.question_id == "q");
  const auto p4 = prefix(trace, 4);
  CHECK(p4.text == text);
  CHECK(p4.token_count == 10);
}

TEST_CASE("segment_trace rejects short traces and bad depths") {
  auto [text, offsets] = words(3);
  CHECK_THROWS_AS(segment_trace(text, offsets, 4), InsufficientTokens);
  try {
    segment_trace(text, offsets, 4);
  } catch (const InsufficientTokens& e) {
    CHECK(e.tokens() == 3);
    CHECK(e.segments() == 4);
  }
  const auto trace = segment_trace(text, offsets, 3);
  CHECK_THROWS_AS(prefix(trace, 0), DomainError);
  CHECK_THROWS_AS(prefix(trace, 4), DomainError);
  CHECK_THROWS_AS(segment_trace(text, offsets, 0), DomainError);
}

TEST_CASE("segment_trace validates offsets") {
  std::vector<std::size_t> bad{1, 2, 3};
  CHECK_THROWS_AS(segment_trace("abcd", bad, 1), DomainError);
  std::vector<std::size_t> decreasing{0, 2, 1};
  CHECK_THROWS_AS(segment_trace("abcd", decreasing, 1), DomainError);
}

TEST_CASE("split property: sizes differ by at most one and sum to T") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const int H = std::uniform_int_distribution<int>(1, 32)(rng);
    const int T = std::uniform_int_distribution<int>(H, 2000)(rng);
    const auto sizes = equal_token_split(T, H);
    CHECK(static_cast<int>(sizes.size()) == H);
    CHECK(std::accumulate(sizes.begin(), sizes.end(), 0) == T);
    CHECK(*std::max_element(sizes.begin(), sizes.end()) -
              *std::min_element(sizes.begin(), sizes.end()) <= 1);
    CHECK(std::is_sorted(sizes.rbegin(), sizes.rend()));
  }
}

TEST_CASE("prefixes nest") {
  auto [text, offsets] = words(37);
  const auto trace = segment_trace(text, offsets, 5);
  for (int t = 1; t < 5; ++t) {
    const auto a = prefix(trace, t), b = prefix(trace, t + 1);
    CHECK(b.text.compare(0, a.text.size(), a.text) == 0);
    CHECK(a.token_count < b.token_count);
  }
}
