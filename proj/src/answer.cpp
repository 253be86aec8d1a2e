// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#include "fracsample/answer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <regex>

namespace fracsample {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Balanced-brace body starting right after an opening '{' at position open.
std::optional<std::string_view> balanced_body(std::string_view text, std::size_t open) {
  int depth = 1;
  for (std::size_t k = open + 1; k < text.size(); ++k) {
    if (text[k] == '{') {
      ++depth;
    } else if (text[k] == '}') {
      if (--depth == 0) return text.substr(open + 1, k - open - 1);
    }
  }
  return std::nullopt;
}

// True when s[0] == '(' and its matching ')' is the last character.
bool wrapped_in_parens(std::string_view s) {
  if (s.size() < 2 || s.front() != '(' || s.back() != ')') return false;
  int depth = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] == '(') ++depth;
    if (s[k] == ')' && --depth == 0) return k + 1 == s.size();
  }
  return false;
}

std::string canonical_pass(std::string_view in) {
  std::string_view s = trim(in);
  for (bool changed = true; changed;) {
    changed = false;
    if (wrapped_in_parens(s)) {
      s = trim(s.substr(1, s.size() - 2));
      changed = true;
    }
    while (!s.empty() && s.back() == '.') {
      s.remove_suffix(1);
      s = trim(s);
      changed = true;
    }
  }

  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }

  static const std::regex thousands(R"([+-]?\d{1,3}(,\d{3})+(\.\d+)?)");
  if (std::regex_match(out, thousands)) {
    out.erase(std::remove(out.begin(), out.end(), ','), out.end());
  }

  if (!out.empty() && std::all_of(out.begin(), out.end(), [](char c) {
        return std::isalpha(static_cast<unsigned char>(c)) != 0;
      })) {
    std::transform(out.begin(), out.end(), out.begin(),
                   [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); });
  }
  return out;
}

std::optional<double> parse_decimal(const std::string& s) {
  static const std::regex decimal(R"([+-]?(\d+(\.\d*)?|\.\d+))");
  if (!std::regex_match(s, decimal)) return std::nullopt;
  const double v = std::strtod(s.c_str(), nullptr);
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

CanonicalAnswer CanonicalAnswer::from_raw(std::string raw) {
  CanonicalAnswer a;
  a.canonical = canonicalize(raw);
  a.raw = std::move(raw);
  return a;
}

std::string canonicalize(std::string_view raw) {
  std::string current = canonical_pass(raw);
  for (;;) {
    std::string next = canonical_pass(current);
    if (next == current) return current;
    current = std::move(next);
  }
}

std::optional<CanonicalAnswer> extract_answer(std::string_view text, std::string_view answer_cue) {
  static constexpr std::string_view kBoxed = "\\boxed{";
  std::optional<std::string_view> last_boxed;
  for (std::size_t pos = text.find(kBoxed); pos != std::string_view::npos;
       pos = text.find(kBoxed, pos + 1)) {
    if (auto body = balanced_body(text, pos + kBoxed.size() - 1)) last_boxed = body;
  }
  if (last_boxed) {
    auto body = trim(*last_boxed);
    if (!body.empty()) return CanonicalAnswer::from_raw(std::string(body));
  }

  if (answer_cue.empty()) return std::nullopt;
  const std::size_t cue = text.rfind(answer_cue);
  if (cue == std::string_view::npos) return std::nullopt;
  std::string_view rest = text.substr(cue + answer_cue.size());
  rest = rest.substr(0, rest.find('\n'));
  rest = trim(rest);
  if (rest.empty()) return std::nullopt;
  return CanonicalAnswer::from_raw(std::string(rest));
}

bool answers_equal(const CanonicalAnswer& a, const CanonicalAnswer& b) {
  if (a.canonical == b.canonical) return true;
  const auto x = parse_decimal(a.canonical);
  const auto y = parse_decimal(b.canonical);
  if (!x || !y) return false;
  return std::abs(*x - *y) <= 1e-9 * std::max(std::abs(*x), std::abs(*y));
}

}  // namespace fracsample
