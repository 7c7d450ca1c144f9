#include "ddoscope/trends.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ddoscope/error.hpp"
#include "ddoscope/stats.hpp"

namespace ddoscope {

using std::chrono::days;

WeeklySeries weekly_counts(std::span<const AttackEvent> events, Date first_day, Date last_day, std::string label) {
  if (last_day < first_day) throw DataError("weekly_counts: empty date range");
  WeeklySeries s;
  s.label = std::move(label);
  s.start_week = week_start(first_day);
  const auto span_days = (last_day - s.start_week).count() + 1;
  s.values.assign(static_cast<std::size_t>((span_days + 6) / 7), 0.0);
  for (const auto& ev : events) {
    const Date day = date_of(ev.start_ts);
    if (day < first_day || day > last_day) {
      throw DataError("event starting " + format_date(day) + " outside range " + format_date(first_day) + ".." +
                      format_date(last_day));
    }
    const auto week = static_cast<std::size_t>((day - s.start_week).count() / 7);
    *s.values[week] += 1.0;
  }
  return s;
}

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

WeeklySeries normalize(const WeeklySeries& series, std::size_t baseline_weeks) {
  if (baseline_weeks == 0) throw ConfigError("baseline must cover at least one week");
  std::vector<double> baseline;
  for (const auto& v : series.values) {
    if (baseline.size() == baseline_weeks) break;
    if (v) baseline.push_back(*v);
  }
  if (baseline.size() < baseline_weeks) {
    throw DataError("series '" + series.label + "' has fewer than " + std::to_string(baseline_weeks) +
                    " non-null weeks for the baseline");
  }
  const double median = median_of(std::move(baseline));
  if (median == 0.0) throw DataError("series '" + series.label + "' has a zero baseline median");
  WeeklySeries out = series;
  for (auto& v : out.values) {
    if (v) *v /= median;
  }
  return out;
}

WeeklySeries ewma(const WeeklySeries& series, double span) {
  if (!(span >= 1)) throw ConfigError("EWMA span must be >= 1");
  const double alpha = 2.0 / (span + 1.0);
  WeeklySeries out = series;
  std::optional<double> y;
  for (auto& v : out.values) {
    if (!v) continue;
    y = y ? alpha * *v + (1.0 - alpha) * *y : *v;
    v = *y;
  }
  return out;
}

std::string_view to_string(TrendClass c) {
  switch (c) {
    case TrendClass::Increasing: return "Increasing";
    case TrendClass::Steady: return "Steady";
    case TrendClass::Decreasing: return "Decreasing";
  }
  return "?";
}

std::string_view trend_symbol(TrendClass c) {
  switch (c) {
    case TrendClass::Increasing: return "▲";
    case TrendClass::Steady: return "◆";
    case TrendClass::Decreasing: return "▼";
  }
  return "?";
}

TrendClass classify_trend(double net_change_4y) {
  if (net_change_4y > 0.05) return TrendClass::Increasing;
  if (net_change_4y < -0.05) return TrendClass::Decreasing;
  return TrendClass::Steady;
}

TrendSummary linreg_trend(const WeeklySeries& series, const WeekWindow& window) {
  const std::size_t end = std::min(window.end.value_or(series.size()), series.size());
  std::vector<double> xs, ys;
  for (std::size_t i = window.begin; i < end; ++i) {
    if (series.values[i]) {
      xs.push_back(static_cast<double>(i));
      ys.push_back(*series.values[i]);
    }
  }
  if (xs.size() < 2) throw DataError("linear regression needs at least two non-null weeks");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  TrendSummary t;
  t.n = xs.size();
  t.slope = sxy / sxx;
  t.intercept = my - t.slope * mx;
  t.net_change_4y = t.slope * 208.0;
  t.trend = classify_trend(t.net_change_4y);
  return t;
}

namespace {

void require_aligned(const WeeklySeries& a, const WeeklySeries& b) {
  if (a.start_week != b.start_week || a.size() != b.size()) {
    throw DataError("series '" + a.label + "' and '" + b.label + "' cover different weeks");
  }
}

std::pair<std::vector<double>, std::vector<double>> paired(std::span<const std::optional<double>> a,
                                                           std::span<const std::optional<double>> b) {
  if (a.size() != b.size()) throw DataError("correlation inputs differ in length");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && b[i]) {
      xs.push_back(*a[i]);
      ys.push_back(*b[i]);
    }
  }
  if (xs.size() < 3) throw DataError("correlation needs at least three paired non-null values");
  return {std::move(xs), std::move(ys)};
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return v[i] < v[j]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

CorrelationResult product_moment(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DataError("correlation undefined for a constant series");

  CorrelationResult r;
  r.n = xs.size();
  r.rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  if (std::fabs(r.rho) == 1.0) {
    r.p_value = 0.0;
  } else {
    const double dof = n - 2.0;
    const double t = r.rho * std::sqrt(dof / (1.0 - r.rho * r.rho));
    r.p_value = std::clamp(stats::student_t_two_sided(t, dof), 0.0, 1.0);
  }
  r.significant = r.p_value <= kSignificanceLevel;
  return r;
}

}  // namespace

WeeklySeries relative_share(const WeeklySeries& ra, const WeeklySeries& dp) {
  require_aligned(ra, dp);
  WeeklySeries out;
  out.start_week = ra.start_week;
  out.label = ra.label + " share";
  out.values.resize(ra.size());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    const auto& a = ra.values[i];
    const auto& d = dp.values[i];
    if (a && d && (*a + *d) > 0) out.values[i] = *a / (*a + *d);
  }
  return out;
}

CorrelationResult spearman(std::span<const std::optional<double>> a, std::span<const std::optional<double>> b) {
  auto [xs, ys] = paired(a, b);
  return product_moment(average_ranks(xs), average_ranks(ys));
}

CorrelationResult spearman(const WeeklySeries& a, const WeeklySeries& b) {
  require_aligned(a, b);
  return spearman(std::span(a.values), std::span(b.values));
}

CorrelationResult pearson(std::span<const std::optional<double>> a, std::span<const std::optional<double>> b) {
  auto [xs, ys] = paired(a, b);
  return product_moment(xs, ys);
}

CorrelationResult pearson(const WeeklySeries& a, const WeeklySeries& b) {
  require_aligned(a, b);
  return pearson(std::span(a.values), std::span(b.values));
}

std::vector<QuarterCorrelation> quarterly_correlations(const WeeklySeries& a, const WeeklySeries& b) {
  require_aligned(a, b);
  std::vector<QuarterCorrelation> out;
  if (a.size() == 0) return out;
  const Date series_end = a.week(a.size());  // exclusive

  // The quarter containing the first week might still own it through its slice.
  Date quarter = quarter_start(a.start_week);
  while (true) {
    const Date slice_begin = week_start(quarter + days{6});  // first Monday >= quarter start
    const Date slice_end = slice_begin + days{7 * 13};
    if (slice_begin >= series_end) break;
    if (slice_end > a.start_week) {
      const auto lo = std::max<long>(0, (slice_begin - a.start_week).count() / 7);
      const auto hi = std::min<long>(static_cast<long>(a.size()), (slice_end - a.start_week).count() / 7);
      QuarterCorrelation q{quarter_label(quarter), quarter, std::nullopt};
      const auto av = std::span(a.values).subspan(lo, hi - lo);
      const auto bv = std::span(b.values).subspan(lo, hi - lo);
      try {
        q.result = spearman(av, bv);
      } catch (const DataError&) {
        q.result.reset();
      }
      out.push_back(std::move(q));
    }
    quarter = next_quarter_start(quarter);
  }
  return out;
}

}  // namespace ddoscope
