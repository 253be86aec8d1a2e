// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace fracsample {

inline constexpr std::string_view kDefaultAnswerCue = "Answer:";

struct CanonicalAnswer {
  std::string raw;
  std::string canonical;

  static CanonicalAnswer from_raw(std::string raw);
  bool operator==(const CanonicalAnswer&) const = default;
};

// Content of the last balanced \boxed{...}; failing that, the rest of the
// line after the last answer cue; otherwise nullopt.
std::optional<CanonicalAnswer> extract_answer(std::string_view solution_text,
                                              std::string_view answer_cue = kDefaultAnswerCue);

std::string canonicalize(std::string_view raw);

// Exact canonical match, or both finite decimals equal within 1e-9 relative.
bool answers_equal(const CanonicalAnswer& a, const CanonicalAnswer& b);

}  // namespace fracsample
