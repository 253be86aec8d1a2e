// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "fracsample/metrics.hpp"

namespace fracsample {

struct ObservationId {
  std::string question_id;
  int trajectory = 0;
  int solution = 0;
};

// Failure indicators indexed by observation row (question, i, j) and depth.
// Missing samples are masked.
class FailureTensor {
 public:
  static constexpr std::int8_t kMissing = -1;

  explicit FailureTensor(int H);

  // One row per (question, i, j) seen in the pools; failure = !correct.
  static FailureTensor from_pools(const std::vector<SamplePool>& pools, int H);

  // Appends a row; values must be 0, 1 or kMissing.
  void add_row(ObservationId id, std::span<const std::int8_t> failures);

  int depths() const { return H_; }
  std::size_t rows() const { return ids_.size(); }
  const ObservationId& id(std::size_t row) const { return ids_[row]; }
  std::int8_t at(std::size_t row, int t) const;  // t is 1-based
  bool observed(std::size_t row, int t) const { return at(row, t) != kMissing; }

 private:
  int H_;
  std::vector<ObservationId> ids_;
  std::vector<std::int8_t> entries_;
};

// per_sample: each (question, i, j) row is an observation.
// probe_mean: probes are averaged per (question, i, t) first.
enum class ObservationUnit { per_sample, probe_mean };
std::string_view to_string(ObservationUnit u);
ObservationUnit observation_unit_from_string(std::string_view s);

struct CorrelationMatrix {
  int H = 0;
  std::vector<double> values;        // row-major, NaN where undefined
  std::vector<std::uint8_t> defined;
  std::vector<long long> pair_counts;

  double at(int a, int b) const { return values[index(a, b)]; }  // 1-based
  bool is_defined(int a, int b) const { return defined[index(a, b)] != 0; }
  long long count(int a, int b) const { return pair_counts[index(a, b)]; }

 private:
  std::size_t index(int a, int b) const {
    return static_cast<std::size_t>(a - 1) * static_cast<std::size_t>(H) +
           static_cast<std::size_t>(b - 1);
  }
};

// Pearson correlation between depth columns over pairwise-complete rows.
// Zero-variance pairs are flagged undefined.
CorrelationMatrix failure_correlation(const FailureTensor& tensor,
                                      ObservationUnit unit = ObservationUnit::per_sample);

nlohmann::json correlation_to_json(const CorrelationMatrix& m, ObservationUnit unit);
// Long format: a,b,value,n. Undefined values are left empty.
void write_correlation_csv(std::ostream& out, const CorrelationMatrix& m);

struct FitPoint {
  double budget = 0.0;
  double value = 0.0;
};

struct ScalingFit {
  std::string label;
  double slope = 0.0;      // C
  double intercept = 0.0;  // c
  double residual_ss = 0.0;
  std::size_t points = 0;
  std::vector<double> residuals;
};

// Ordinary least squares of value on ln(budget).
ScalingFit fit_scaling(std::span<const FitPoint> points, std::string label = {});
std::vector<FitPoint> to_fit_points(std::span<const PassPoint> curve);

struct SlopeReport {
  double c_n = 0.0;
  double c_m = 0.0;
  double c_H = 0.0;
  bool depth_steepest = false;  // C_H >= max(C_n, C_m)
};

// Needs fits labelled "n", "m" and "H".
SlopeReport compare_axis_slopes(const std::map<std::string, ScalingFit>& fits);

struct SchemeCell {
  std::string label;  // e.g. "H16m4"
  int window = 1;     // last `window` depths
  int m = 1;
};

// H1m1, H1m4, H{H}m1, H{H}m4.
std::vector<SchemeCell> default_scheme_cells(int H);
std::vector<long long> default_n_sweep();

// n-sweep points per cell from a full run.
std::map<std::string, std::vector<FitPoint>> conditioned_points(
    const std::vector<SamplePool>& pools, int H, std::span<const SchemeCell> cells,
    std::span<const long long> ns);

// One fit per cell, in label order.
std::vector<ScalingFit> conditioned_fit(
    const std::map<std::string, std::vector<FitPoint>>& cells);

nlohmann::json fit_to_json(const ScalingFit& f);
nlohmann::json slope_report_to_json(const SlopeReport& r);

// Columns: axis,k,budget,value.
void write_curve_csv_header(std::ostream& out);
void write_curve_csv(std::ostream& out, std::string_view axis, std::span<const PassPoint> curve);

}  // namespace fracsample
