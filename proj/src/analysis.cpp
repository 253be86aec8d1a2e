// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#include "fracsample/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "fracsample/error.hpp"

namespace fracsample {

FailureTensor::FailureTensor(int H) : H_(H) {
  if (H < 1) throw DomainError("FailureTensor: H must be positive");
}

void FailureTensor::add_row(ObservationId id, std::span<const std::int8_t> failures) {
  if (failures.size() != static_cast<std::size_t>(H_)) {
    throw DomainError("FailureTensor: row has " + std::to_string(failures.size()) +
                      " entries, expected " + std::to_string(H_));
  }
  for (auto v : failures) {
    if (v != 0 && v != 1 && v != kMissing) throw DomainError("FailureTensor: entries must be 0 or 1");
  }
  ids_.push_back(std::move(id));
  entries_.insert(entries_.end(), failures.begin(), failures.end());
}

std::int8_t FailureTensor::at(std::size_t row, int t) const {
  if (row >= ids_.size() || t < 1 || t > H_) throw DomainError("FailureTensor: index out of range");
  return entries_[row * static_cast<std::size_t>(H_) + static_cast<std::size_t>(t - 1)];
}

FailureTensor FailureTensor::from_pools(const std::vector<SamplePool>& pools, int H) {
  FailureTensor tensor(H);
  for (const auto& pool : pools) {
    std::map<std::pair<int, int>, std::vector<std::int8_t>> rows;
    for (const auto& s : pool.samples) {
      if (s.key.depth < 1 || s.key.depth > H) continue;
      auto& row = rows[{s.key.trajectory, s.key.solution}];
      if (row.empty()) row.assign(static_cast<std::size_t>(H), kMissing);
      row[static_cast<std::size_t>(s.key.depth - 1)] = s.correct ? 0 : 1;
    }
    for (auto& [ij, row] : rows) {
      tensor.add_row({pool.question_id, ij.first, ij.second}, row);
    }
  }
  return tensor;
}

std::string_view to_string(ObservationUnit u) {
  return u == ObservationUnit::per_sample ? "per_sample" : "probe_mean";
}

ObservationUnit observation_unit_from_string(std::string_view s) {
  if (s == "per_sample") return ObservationUnit::per_sample;
  if (s == "probe_mean") return ObservationUnit::probe_mean;
  throw DomainError("unknown observation unit '" + std::string(s) + "'");
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Rows of real values with NaN for missing.
std::vector<std::vector<double>> observation_matrix(const FailureTensor& tensor,
                                                    ObservationUnit unit) {
  const int H = tensor.depths();
  std::vector<std::vector<double>> rows;
  if (unit == ObservationUnit::per_sample) {
    for (std::size_t r = 0; r < tensor.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(H), kNaN);
      for (int t = 1; t <= H; ++t) {
        if (tensor.observed(r, t)) row[static_cast<std::size_t>(t - 1)] = tensor.at(r, t);
      }
      rows.push_back(std::move(row));
    }
    return rows;
  }
  std::map<std::pair<std::string, int>, std::pair<std::vector<double>, std::vector<int>>> acc;
  for (std::size_t r = 0; r < tensor.rows(); ++r) {
    const auto& id = tensor.id(r);
    auto& [sum, count] = acc[{id.question_id, id.trajectory}];
    if (sum.empty()) {
      sum.assign(static_cast<std::size_t>(H), 0.0);
      count.assign(static_cast<std::size_t>(H), 0);
    }
    for (int t = 1; t <= H; ++t) {
      if (!tensor.observed(r, t)) continue;
      sum[static_cast<std::size_t>(t - 1)] += tensor.at(r, t);
      ++count[static_cast<std::size_t>(t - 1)];
    }
  }
  for (auto& [key, sc] : acc) {
    std::vector<double> row(static_cast<std::size_t>(H), kNaN);
    for (std::size_t t = 0; t < row.size(); ++t) {
      if (sc.second[t] > 0) row[t] = sc.first[t] / sc.second[t];
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

CorrelationMatrix failure_correlation(const FailureTensor& tensor, ObservationUnit unit) {
  const int H = tensor.depths();
  const auto rows = observation_matrix(tensor, unit);
  const auto HH = static_cast<std::size_t>(H) * static_cast<std::size_t>(H);
  CorrelationMatrix m;
  m.H = H;
  m.values.assign(HH, kNaN);
  m.defined.assign(HH, 0);
  m.pair_counts.assign(HH, 0);

  for (int t = 0; t < H; ++t) {
    long long n = 0;
    for (const auto& row : rows) n += std::isnan(row[static_cast<std::size_t>(t)]) ? 0 : 1;
    if (n < 2) {
      throw DomainError("failure_correlation: depth " + std::to_string(t + 1) + " has " +
                        std::to_string(n) + " observations, need at least 2");
    }
  }

  for (int a = 0; a < H; ++a) {
    for (int b = a; b < H; ++b) {
      const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
      long long n = 0;
      double sa = 0.0, sb = 0.0;
      for (const auto& row : rows) {
        if (std::isnan(row[ua]) || std::isnan(row[ub])) continue;
        ++n;
        sa += row[ua];
        sb += row[ub];
      }
      double value = kNaN;
      if (n >= 2) {
        const double ma = sa / static_cast<double>(n), mb = sb / static_cast<double>(n);
        double saa = 0.0, sbb = 0.0, sab = 0.0;
        for (const auto& row : rows) {
          if (std::isnan(row[ua]) || std::isnan(row[ub])) continue;
          const double da = row[ua] - ma, db = row[ub] - mb;
          saa += da * da;
          sbb += db * db;
          sab += da * db;
        }
        if (saa > 0.0 && sbb > 0.0) {
          value = a == b ? 1.0 : std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
        }
      }
      for (auto [x, y] : {std::pair{ua, ub}, std::pair{ub, ua}}) {
        const auto idx = x * static_cast<std::size_t>(H) + y;
        m.values[idx] = value;
        m.defined[idx] = std::isnan(value) ? 0 : 1;
        m.pair_counts[idx] = n;
      }
    }
  }
  return m;
}

nlohmann::json correlation_to_json(const CorrelationMatrix& m, ObservationUnit unit) {
  nlohmann::json values = nlohmann::json::array();
  nlohmann::json counts = nlohmann::json::array();
  for (int a = 1; a <= m.H; ++a) {
    nlohmann::json row = nlohmann::json::array();
    nlohmann::json crow = nlohmann::json::array();
    for (int b = 1; b <= m.H; ++b) {
      row.push_back(m.is_defined(a, b) ? nlohmann::json(m.at(a, b)) : nlohmann::json(nullptr));
      crow.push_back(m.count(a, b));
    }
    values.push_back(std::move(row));
    counts.push_back(std::move(crow));
  }
  return {{"H", m.H},
          {"observation_unit", std::string(to_string(unit))},
          {"values", std::move(values)},
          {"pair_counts", std::move(counts)},
          {"undefined", "null marks zero-variance or unobserved pairs"}};
}

void write_correlation_csv(std::ostream& out, const CorrelationMatrix& m) {
  out << "a,b,value,n\n";
  for (int a = 1; a <= m.H; ++a) {
    for (int b = 1; b <= m.H; ++b) {
      out << a << ',' << b << ',';
      if (m.is_defined(a, b)) out << m.at(a, b);
      out << ',' << m.count(a, b) << '\n';
    }
  }
}

ScalingFit fit_scaling(std::span<const FitPoint> points, std::string label) {
  if (points.size() < 2) throw DomainError("fit_scaling: need at least 2 points");
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    if (!(p.budget > 0.0) || !std::isfinite(p.budget)) {
      throw DomainError("fit_scaling: budgets must be positive");
    }
    if (!(p.value >= 0.0 && p.value <= 1.0)) {
      throw DomainError("fit_scaling: values must lie in [0, 1]");
    }
    mx += std::log(p.budget);
    my += p.value;
  }
  const auto n = static_cast<double>(points.size());
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    const double dx = std::log(p.budget) - mx;
    sxx += dx * dx;
    sxy += dx * (p.value - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit_scaling: all budgets are equal");

  ScalingFit fit;
  fit.label = std::move(label);
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = points.size();
  for (const auto& p : points) {
    const double r = p.value - (fit.slope * std::log(p.budget) + fit.intercept);
    fit.residuals.push_back(r);
    fit.residual_ss += r * r;
  }
  return fit;
}

std::vector<FitPoint> to_fit_points(std::span<const PassPoint> curve) {
  std::vector<FitPoint> out;
  for (const auto& p : curve) out.push_back({p.budget, p.value});
  return out;
}

SlopeReport compare_axis_slopes(const std::map<std::string, ScalingFit>& fits) {
  auto slope = [&](const std::string& axis) {
    auto it = fits.find(axis);
    if (it == fits.end()) throw DomainError("compare_axis_slopes: missing fit for axis " + axis);
    return it->second.slope;
  };
  SlopeReport r;
  r.c_n = slope("n");
  r.c_m = slope("m");
  r.c_H = slope("H");
  r.depth_steepest = r.c_H >= std::max(r.c_n, r.c_m);
  return r;
}

std::vector<SchemeCell> default_scheme_cells(int H) {
  const std::string h = std::to_string(H);
  return {{"H1m1", 1, 1}, {"H1m4", 1, 4}, {"H" + h + "m1", H, 1}, {"H" + h + "m4", H, 4}};
}

std::vector<long long> default_n_sweep() { return {1, 2, 4, 8, 16}; }

std::map<std::string, std::vector<FitPoint>> conditioned_points(
    const std::vector<SamplePool>& pools, int H, std::span<const SchemeCell> cells,
    std::span<const long long> ns) {
  std::map<std::string, std::vector<FitPoint>> out;
  for (const auto& cell : cells) {
    auto& points = out[cell.label];
    for (long long n : ns) {
      const auto p = scheme_pass_at_n(pools, H, cell.window, cell.m, n);
      points.push_back({p.budget, p.value});
    }
  }
  return out;
}

std::vector<ScalingFit> conditioned_fit(
    const std::map<std::string, std::vector<FitPoint>>& cells) {
  std::vector<ScalingFit> fits;
  for (const auto& [label, points] : cells) fits.push_back(fit_scaling(points, label));
  return fits;
}

nlohmann::json fit_to_json(const ScalingFit& f) {
  return {{"label", f.label},
          {"slope", f.slope},
          {"intercept", f.intercept},
          {"residual_ss", f.residual_ss},
          {"points", f.points},
          {"residuals", f.residuals},
          {"log_base", "e"}};
}

nlohmann::json slope_report_to_json(const SlopeReport& r) {
  return {{"C_n", r.c_n}, {"C_m", r.c_m}, {"C_H", r.c_H}, {"depth_steepest", r.depth_steepest}};
}

void write_curve_csv_header(std::ostream& out) { out << "axis,k,budget,value\n"; }

void write_curve_csv(std::ostream& out, std::string_view axis, std::span<const PassPoint> curve) {
  for (const auto& p : curve) out << axis << ',' << p.k << ',' << p.budget << ',' << p.value << '\n';
}

}  // namespace fracsample
