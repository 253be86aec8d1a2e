// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

// Reference computations used only by tests. Each one is written from first
// principles and shares no code with the library.

#pragma once

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/owens_t.hpp>
#include <boost/math/constants/constants.hpp>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

// pass@k by walking every k-subset of N samples whose first c are correct.
inline double brute_pass_at_k(int N, int c, int k) {
  long long hit = 0, total = 0;
  for (std::uint32_t mask = 0; mask < (1u << N); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    ++total;
    if (mask & ((1u << c) - 1u)) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(total);
}

struct Line {
  long double slope;
  long double intercept;
};

// OLS by solving the 2x2 normal equations with Cramer's rule.
inline Line normal_equations(const std::vector<double>& budgets, const std::vector<double>& values) {
  long double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    const long double x = std::log(static_cast<long double>(budgets[i]));
    n += 1;
    sx += x;
    sy += values[i];
    sxx += x * x;
    sxy += x * values[i];
  }
  const long double det = n * sxx - sx * sx;
  return {(n * sxy - sx * sy) / det, (sxx * sy - sx * sxy) / det};
}

// Bivariate standard normal CDF through Owen's T function.
inline double owen_bvn_cdf(double h, double k, double rho) {
  const double pi = boost::math::constants::pi<double>();
  boost::math::normal_distribution<double> n01;
  if (h == 0.0 && k == 0.0) return 0.25 + std::asin(rho) / (2.0 * pi);
  const double s = std::sqrt(1.0 - rho * rho);
  auto term = [&](double x, double y) {
    if (x == 0.0) return (y - rho * x > 0 ? 0.25 : -0.25);
    return boost::math::owens_t(x, (y - rho * x) / (x * s));
  };
  double beta = 0.0;
  if (h * k < 0.0 || (h * k == 0.0 && h + k < 0.0)) beta = 0.5;
  return 0.5 * boost::math::cdf(n01, h) + 0.5 * boost::math::cdf(n01, k) - term(h, k) -
         term(k, h) - beta;
}

// Pearson correlation of two threshold failures Z_a > z(p_a), Z_b > z(p_b)
// where p are success probabilities and corr(Z_a, Z_b) = rho.
inline double threshold_failure_correlation(double p_a, double p_b, double rho) {
  boost::math::normal_distribution<double> n01;
  const double za = boost::math::quantile(n01, p_a);
  const double zb = boost::math::quantile(n01, p_b);
  const double both = owen_bvn_cdf(-za, -zb, rho);
  const double qa = 1.0 - p_a, qb = 1.0 - p_b;
  return (both - qa * qb) / std::sqrt(qa * (1 - qa) * qb * (1 - qb));
}

// A random probability table over 2^K outcomes.
inline std::vector<double> random_table(int K, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(std::size_t{1} << K);
  double total = 0.0;
  for (auto& x : p) total += (x = u(rng));
  for (auto& x : p) x /= total;
  return p;
}

// P(all fail) by summing outcomes whose bits are all set.
inline double table_all_fail(const std::vector<double>& p) { return p.back(); }

// q_k = P(F_k = 1), bit k of the outcome index.
inline double table_marginal(const std::vector<double>& p, int k) {
  double s = 0.0;
  for (std::size_t o = 0; o < p.size(); ++o) {
    if (o >> k & 1u) s += p[o];
  }
  return s;
}

inline double table_joint(const std::vector<double>& p, int a, int b) {
  double s = 0.0;
  for (std::size_t o = 0; o < p.size(); ++o) {
    if ((o >> a & 1u) && (o >> b & 1u)) s += p[o];
  }
  return s;
}

}  // namespace oracle
