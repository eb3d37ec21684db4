#pragma once

// The four nested regressions fitted for each station and variable:
//
//   Trend             Y  on c, TIME
//   FixedSeasonal     Y~ on D1..D12                       (Y~ = Trend residuals)
//   EvolvingSeasonal  Y~ on D1..D12, D1*TIME..D12*TIME
//   Joint             Y  on c, TIME, Y(-1), D_m, D_m*TIME for m != July
//
// TIME is the 1-based day index, so slope coefficients are per day.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tempdyn/linreg.hpp"
#include "tempdyn/series.hpp"

namespace tempdyn::models {

using linreg::DesignMatrix;
using linreg::HacBandwidth;
using linreg::ModelFit;
using linreg::WaldResult;

inline constexpr int kOmittedMonth = 7;
inline constexpr double kSignificanceLevel = 0.01;
inline constexpr double kDaysPerDecade = 3652.5;

inline std::string dummy_name(int month) { return "D" + std::to_string(month); }
inline std::string interaction_name(int month) { return "D" + std::to_string(month) + "*TIME"; }

enum class ModelKind { Trend, FixedSeasonal, EvolvingSeasonal, Joint };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Trend: return "trend";
    case ModelKind::FixedSeasonal: return "fixed";
    case ModelKind::EvolvingSeasonal: return "evolving";
    case ModelKind::Joint: return "joint";
  }
  return "?";
}

inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "trend") return ModelKind::Trend;
  if (s == "fixed") return ModelKind::FixedSeasonal;
  if (s == "evolving") return ModelKind::EvolvingSeasonal;
  if (s == "joint") return ModelKind::Joint;
  throw Error("unknown model '" + std::string(s) + "', expected trend|fixed|evolving|joint");
}

struct ModelSpec {
  ModelKind kind;
  Variable regressand;

  std::vector<std::string> regressors() const {
    std::vector<std::string> names;
    switch (kind) {
      case ModelKind::Trend:
        names = {"c", "TIME"};
        break;
      case ModelKind::FixedSeasonal:
        for (int m = 1; m <= 12; ++m) names.push_back(dummy_name(m));
        break;
      case ModelKind::EvolvingSeasonal:
        for (int m = 1; m <= 12; ++m) names.push_back(dummy_name(m));
        for (int m = 1; m <= 12; ++m) names.push_back(interaction_name(m));
        break;
      case ModelKind::Joint:
        names = {"c", "TIME", "Y(-1)"};
        for (int m = 1; m <= 12; ++m)
          if (m != kOmittedMonth) names.push_back(dummy_name(m));
        for (int m = 1; m <= 12; ++m)
          if (m != kOmittedMonth) names.push_back(interaction_name(m));
        break;
    }
    return names;
  }
};

// Twelve monthly effects in degrees Fahrenheit, January first.
struct SeasonalPattern {
  std::array<double, 12> month_effects{};
  std::optional<double> evaluated_at;  // time index, for evolving patterns
};

// Two-sided HAC p-value for a single coefficient being zero.
inline double coefficient_p_value(const ModelFit& fit, const std::string& name) {
  return linreg::wald_test(fit, {name}).p_value;
}

struct TrendResult {
  ModelFit fit;
  Variable variable;
  double delta_trend = 0.0;  // slope * (T - 1)
  double slope_p_value = 1.0;
  bool significant = false;
};

inline TrendResult fit_trend(const TemperatureSeries& series, Variable variable,
                             const HacBandwidth& bw = HacBandwidth::automatic()) {
  const std::size_t n = series.size();
  DesignMatrix x;
  x.add("c", std::vector<double>(n, 1.0));
  x.add("TIME", series.time_index());
  TrendResult r{linreg::ols_fit_hac(x, series.values(variable), bw), variable};
  r.delta_trend = r.fit.coef("TIME") * static_cast<double>(n - 1);
  r.slope_p_value = coefficient_p_value(r.fit, "TIME");
  r.significant = r.slope_p_value < kSignificanceLevel;
  return r;
}

// Residuals of the trend regression.
inline std::vector<double> detrend(const TemperatureSeries& series, Variable variable,
                                   const TrendResult& trend) {
  if (trend.variable != variable) {
    throw ContractViolation(std::string("detrend: trend fit is for ") +
                            to_string(trend.variable) + ", not " + to_string(variable));
  }
  if (trend.fit.nobs != series.size()) {
    throw ContractViolation("detrend: trend fit does not match the series length");
  }
  return {trend.fit.residuals.data(), trend.fit.residuals.data() + trend.fit.residuals.size()};
}

namespace detail {

inline void add_dummies(DesignMatrix& x, const SeasonalDummies& d, bool skip_omitted) {
  for (int m = 1; m <= 12; ++m) {
    if (skip_omitted && m == kOmittedMonth) continue;
    x.add(dummy_name(m), d.column(m));
  }
}

inline void add_interactions(DesignMatrix& x, const SeasonalDummies& d,
                             std::span<const double> time, bool skip_omitted) {
  for (int m = 1; m <= 12; ++m) {
    if (skip_omitted && m == kOmittedMonth) continue;
    std::vector<double> col = d.column(m);
    for (std::size_t t = 0; t < col.size(); ++t) col[t] *= time[t];
    x.add(interaction_name(m), col);
  }
}

inline void check_lengths(std::size_t a, std::size_t b, std::size_t c) {
  if (a != b || a != c) throw ContractViolation("regression inputs differ in length");
}

}  // namespace detail

struct FixedSeasonalResult {
  ModelFit fit;
  SeasonalPattern pattern;
};

inline FixedSeasonalResult fit_fixed_seasonal(
    std::span<const double> detrended, const SeasonalDummies& dummies,
    const HacBandwidth& bw = HacBandwidth::automatic()) {
  detail::check_lengths(detrended.size(), dummies.size(), dummies.size());
  DesignMatrix x;
  detail::add_dummies(x, dummies, false);
  FixedSeasonalResult r{linreg::ols_fit_hac(x, detrended, bw), {}};
  for (int m = 1; m <= 12; ++m) r.pattern.month_effects[m - 1] = r.fit.coef(dummy_name(m));
  return r;
}

struct EvolvingSeasonalResult {
  ModelFit fit;

  // month_effects[m] = coef(D_m) + coef(D_m*TIME) * t
  SeasonalPattern pattern_at(double t) const {
    SeasonalPattern p;
    p.evaluated_at = t;
    for (int m = 1; m <= 12; ++m) {
      p.month_effects[m - 1] = fit.coef(dummy_name(m)) + fit.coef(interaction_name(m)) * t;
    }
    return p;
  }

  // Pattern anchored at a given calendar day (July 1 by default) of `year`.
  SeasonalPattern pattern_for_year(const TemperatureSeries& series, int year,
                                   unsigned anchor_month = 7, unsigned anchor_day = 1) const {
    return pattern_at(static_cast<double>(
        series.time_of(make_date(year, anchor_month, anchor_day))));
  }
};

inline EvolvingSeasonalResult fit_evolving_seasonal(
    std::span<const double> detrended, const SeasonalDummies& dummies,
    std::span<const double> time_index,
    const HacBandwidth& bw = HacBandwidth::automatic()) {
  detail::check_lengths(detrended.size(), dummies.size(), time_index.size());
  DesignMatrix x;
  detail::add_dummies(x, dummies, false);
  detail::add_interactions(x, dummies, time_index, false);
  return {linreg::ols_fit_hac(x, detrended, bw)};
}

// Design of the joint regression over the estimation sample t = 2..T.
inline DesignMatrix joint_design(const TemperatureSeries& series, Variable variable) {
  const std::size_t n = series.size();
  if (n < 2) throw InsufficientDataError("joint model needs at least two days");
  const auto y = series.values(variable);
  const std::size_t m = n - 1;
  std::vector<double> time(m), lag(m);
  std::vector<int> months(m);
  for (std::size_t i = 1; i < n; ++i) {
    time[i - 1] = series.time(i);
    lag[i - 1] = y[i - 1];
    months[i - 1] = series.month[i];
  }
  const SeasonalDummies d(std::move(months));
  DesignMatrix x;
  x.add("c", std::vector<double>(m, 1.0));
  x.add("TIME", time);
  x.add("Y(-1)", lag);
  detail::add_dummies(x, d, true);
  detail::add_interactions(x, d, time, true);
  return x;
}

struct JointResult {
  ModelFit fit;
  Variable variable;
  double rho = 0.0;
  double rho_p_value = 1.0;
  bool rho_significant = false;
};

inline JointResult fit_joint(const TemperatureSeries& series, Variable variable,
                             const HacBandwidth& bw = HacBandwidth::automatic()) {
  const auto x = joint_design(series, variable);
  const auto y = series.values(variable).subspan(1);
  JointResult r{linreg::ols_fit_hac(x, y, bw), variable};
  r.rho = r.fit.coef("Y(-1)");
  r.rho_p_value = coefficient_p_value(r.fit, "Y(-1)");
  r.rho_significant = r.rho_p_value < kSignificanceLevel;
  return r;
}

struct HypothesisSuite {
  WaldResult no_trend;                 // TIME and all interactions
  WaldResult no_seasonality;           // all dummies and interactions
  WaldResult no_trending_seasonality;  // all interactions
};

inline HypothesisSuite hypothesis_suite(const ModelFit& joint) {
  std::vector<std::string> dummies, interactions;
  for (int m = 1; m <= 12; ++m) {
    if (m == kOmittedMonth) continue;
    dummies.push_back(dummy_name(m));
    interactions.push_back(interaction_name(m));
  }
  std::vector<std::string> nt{"TIME"};
  nt.insert(nt.end(), interactions.begin(), interactions.end());
  std::vector<std::string> ns = dummies;
  ns.insert(ns.end(), interactions.begin(), interactions.end());
  return {linreg::wald_test(joint, nt), linreg::wald_test(joint, ns),
          linreg::wald_test(joint, interactions)};
}

// One row of the station tables.
struct CityReport {
  std::string station;
  double delta_trend = 0.0;
  bool delta_trend_star = false;
  double p_nt = 1.0;
  double p_ns = 1.0;
  double p_nts = 1.0;
  double rho = 0.0;
  bool rho_star = false;
  double r_squared = 0.0;
  std::size_t hac_bandwidth = 0;
  std::size_t nobs = 0;
};

inline CityReport analyze_station(const std::string& code, const TemperatureSeries& series,
                                  Variable variable,
                                  const HacBandwidth& bw = HacBandwidth::automatic()) {
  const auto trend = fit_trend(series, variable, bw);
  const auto joint = fit_joint(series, variable, bw);
  const auto tests = hypothesis_suite(joint.fit);
  CityReport r;
  r.station = code;
  r.delta_trend = trend.delta_trend;
  r.delta_trend_star = trend.significant;
  r.p_nt = tests.no_trend.p_value;
  r.p_ns = tests.no_seasonality.p_value;
  r.p_nts = tests.no_trending_seasonality.p_value;
  r.rho = joint.rho;
  r.rho_star = joint.rho_significant;
  r.r_squared = joint.fit.r_squared;
  r.hac_bandwidth = *joint.fit.bandwidth;
  r.nobs = joint.fit.nobs;
  return r;
}

}  // namespace tempdyn::models
