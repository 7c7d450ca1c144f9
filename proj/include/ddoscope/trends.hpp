#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ddoscope/model.hpp"

namespace ddoscope {

/// Counts each event once, in the ISO week (Monday, UTC) of its start. The
/// series starts on the Monday on or before `first_day` and covers every week
/// up to `last_day`. Events starting outside [first_day, last_day] throw
/// DataError.
WeeklySeries weekly_counts(std::span<const AttackEvent> events, Date first_day, Date last_day,
                           std::string label = {});

/// Divides every value by the median of the first `baseline_weeks` non-null
/// values. Throws DataError when fewer non-null values exist or the median
/// is zero.
WeeklySeries normalize(const WeeklySeries& series, std::size_t baseline_weeks = 15);

/// Recursive EWMA with alpha = 2 / (span + 1), seeded with the first non-null
/// value. Missing weeks stay missing and leave the running average untouched.
WeeklySeries ewma(const WeeklySeries& series, double span = 12);

enum class TrendClass { Increasing, Steady, Decreasing };

std::string_view to_string(TrendClass c);
/// Table-style marker: ▲ increasing, ◆ steady, ▼ decreasing.
std::string_view trend_symbol(TrendClass c);

/// Net change over four years (208 weeks) of a baseline-normalized series:
/// above +5% increasing, below -5% decreasing.
TrendClass classify_trend(double net_change_4y);

struct TrendSummary {
  double slope = 0;      // per week
  double intercept = 0;  // at week index 0
  double net_change_4y = 0;
  TrendClass trend = TrendClass::Steady;
  std::size_t n = 0;
};

/// Half-open range of week indices; `end` defaults to the series end.
struct WeekWindow {
  std::size_t begin = 0;
  std::optional<std::size_t> end;
};

/// Ordinary least squares of value on week index over the non-null points of
/// the window. Fewer than two points throw DataError.
TrendSummary linreg_trend(const WeeklySeries& series, const WeekWindow& window = {});

/// ra / (ra + dp) per week; missing when either input is missing or both are
/// zero. Series must share start week and length (DataError otherwise).
WeeklySeries relative_share(const WeeklySeries& ra, const WeeklySeries& dp);

struct CorrelationResult {
  double rho = 0;
  double p_value = 1;
  std::size_t n = 0;
  bool significant = false;  // p_value <= 0.05
};

inline constexpr double kSignificanceLevel = 0.05;

/// Spearman rank correlation over paired non-null samples, with average
/// ranks for ties. Two-sided p-value from t = rho * sqrt((n-2)/(1-rho^2)) on
/// n-2 degrees of freedom; |rho| = 1 gives p = 0. Fewer than three pairs or
/// a constant input throw DataError.
CorrelationResult spearman(const WeeklySeries& a, const WeeklySeries& b);
CorrelationResult spearman(std::span<const std::optional<double>> a, std::span<const std::optional<double>> b);

/// Pearson product-moment correlation with the same pairing and p-value rules.
CorrelationResult pearson(const WeeklySeries& a, const WeeklySeries& b);
CorrelationResult pearson(std::span<const std::optional<double>> a, std::span<const std::optional<double>> b);

struct QuarterCorrelation {
  std::string quarter;  // e.g. "2021Q3"
  Date quarter_start;
  std::optional<CorrelationResult> result;
};

/// Spearman per calendar quarter. A quarter's slice is the 13 weeks starting
/// with the first Monday on or after the quarter's first day; quarters whose
/// slice intersects the series are reported. Slices with fewer than three
/// pairs, or with a constant side, yield no result. Inputs must be aligned.
std::vector<QuarterCorrelation> quarterly_correlations(const WeeklySeries& a, const WeeklySeries& b);

}  // namespace ddoscope
