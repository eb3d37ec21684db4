// Builds a made-up city's daily MAX/MIN record for 1960-2017, then runs the
// same analysis as the station tables: trend, joint model tests, density
// modes and the fixed seasonal pattern.
//
//   ./synthetic_city [seed]

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <random>
#include <vector>

#include "tempdyn/tempdyn.hpp"

using namespace tempdyn;

int main(int argc, char** argv) {
  const unsigned long seed = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 1;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> weather(0.0, 4.0), spread(0.0, 6.0);

  const DateRange window = default_window();
  std::vector<ghcn::DailyObservation> obs;
  double ar = 0.0;
  for (long i = 0; i < window.size(); ++i) {
    const Date d = add_days(window.first, i);
    const double years = static_cast<double>(i) / 365.25;
    const double doy = static_cast<double>(days_between(make_date(year_of(d), 1, 1), d));
    const double phase = 2.0 * std::numbers::pi * (doy - 105.0) / 365.25;
    ar = 0.7 * ar + weather(rng);
    // warming of 0.08 F/yr, range shrinking by 0.03 F/yr
    const double avg = 55.0 + 21.0 * std::sin(phase) + 0.08 * years + ar;
    const double dtr = std::max(1.0, 19.0 - 0.03 * years + spread(rng));
    const int hi = static_cast<int>(std::lround(avg + dtr / 2));
    const int lo = static_cast<int>(std::lround(avg - dtr / 2));
    obs.push_back({d, hi, lo});
  }
  const auto series = build_series(obs, window);

  std::printf("%zu days, %s .. %s\n\n", series.size(), format_date(series.dates.front()).c_str(),
              format_date(series.dates.back()).c_str());
  std::printf("%-4s %8s %7s %7s %7s %6s %6s\n", "var", "dtrend", "p(nt)", "p(ns)", "p(nts)", "rho",
              "R2");
  for (Variable v : {Variable::Avg, Variable::Dtr}) {
    const auto r = models::analyze_station("SYN", series, v);
    std::printf("%-4s %7.2f%s %7.2f %7.2f %7.2f %5.2f%s %6.2f\n", to_string(v), r.delta_trend,
                r.delta_trend_star ? "*" : " ", r.p_nt, r.p_ns, r.p_nts, r.rho,
                r.rho_star ? "*" : " ", r.r_squared);
  }

  for (Variable v : {Variable::Avg, Variable::Dtr}) {
    const auto est = density::kde(series.values(v));
    std::printf("\n%s density modes (bandwidth %.2f):", to_string(v), est.bandwidth);
    for (const auto& m : density::find_modes(est)) std::printf(" %.1f", m.location);
  }

  const auto trend = models::fit_trend(series, Variable::Avg);
  const auto fixed = models::fit_fixed_seasonal(models::detrend(series, Variable::Avg, trend),
                                                month_dummies(series));
  std::printf("\n\nAVG fixed seasonal pattern (F relative to trend):\n");
  for (int m = 0; m < 12; ++m) std::printf(" %5.1f", fixed.pattern.month_effects[m]);
  std::printf("\n");
  return 0;
}
