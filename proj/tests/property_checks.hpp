#pragma once

// Every module invariant as a self-contained check. Shared by the unit test
// binary (one test per check) and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "synthetic.hpp"
#include "tempdyn/pipeline.hpp"

namespace props {

namespace fs = std::filesystem;
using namespace tempdyn;

struct PropertyCheck {
  std::string module;
  std::string name;
  std::function<void()> run;
};

inline void ensure(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error(what);
}

inline bool close(double a, double b, double rel, double abs = 0.0) {
  return std::fabs(a - b) <= abs + rel * std::max(std::fabs(a), std::fabs(b));
}

inline std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline fs::path scratch_dir(const std::string& tag) {
  static std::mt19937_64 rng(std::random_device{}());
  const auto dir = fs::temp_directory_path() /
                   ("tempdyn_" + tag + "_" + std::to_string(rng() % 1000000000ULL));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Random well-conditioned design with an intercept.
inline linreg::DesignMatrix random_design(std::mt19937_64& rng, std::size_t n, std::size_t k) {
  std::normal_distribution<double> z(0.0, 1.0);
  linreg::DesignMatrix x;
  x.add("c", std::vector<double>(n, 1.0));
  for (std::size_t j = 1; j < k; ++j) {
    std::vector<double> col(n);
    for (auto& v : col) v = z(rng) * static_cast<double>(j) + 0.3 * static_cast<double>(j);
    x.add("x" + std::to_string(j), col);
  }
  return x;
}

inline std::vector<double> random_response(std::mt19937_64& rng, const linreg::DesignMatrix& x) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> y(x.rows());
  double prev = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) s += x.matrix()(i, j) * (0.5 + j);
    prev = 0.5 * prev + z(rng);
    y[i] = s + prev;
  }
  return y;
}

// A few years of a seasonal, trending synthetic daily series.
inline TemperatureSeries seasonal_series(std::uint64_t seed, int years = 4) {
  std::mt19937_64 rng(seed);
  const Date start = make_date(2001, 1, 1);
  const auto n = static_cast<std::size_t>(days_between(start, make_date(2001 + years, 1, 1)));
  synth::JointProcess p;
  p.gamma[0] = 5e-4;
  p.gamma[9] = -4e-4;
  return synth::series_with_values(start, synth::simulate_joint(p, synth::months_from(start, n), rng));
}

// Restricted least squares: beta - B R' (R B R')^-1 R beta, with R selecting
// the named coefficients and B = (X'X)^-1.
inline Eigen::VectorXd restricted_beta(const linreg::ModelFit& fit,
                                       const std::vector<std::string>& zero) {
  const auto k = fit.beta.size();
  const auto q = static_cast<Eigen::Index>(zero.size());
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(q, k);
  for (Eigen::Index i = 0; i < q; ++i) r(i, static_cast<Eigen::Index>(fit.index_of(zero[i]))) = 1.0;
  const Eigen::MatrixXd& b = fit.xtx_inv;
  const Eigen::MatrixXd middle = (r * b * r.transpose()).ldlt().solve(r * fit.beta);
  return fit.beta - b * r.transpose() * middle;
}

// --------------------------------------------------------------------------
// Synthetic end-to-end run: cached .dly files and a config, no network.

struct SyntheticRun {
  fs::path root;
  fs::path config_path;
  RunConfig config;
};

inline const std::vector<std::pair<std::string, std::string>>& synthetic_stations() {
  static const std::vector<std::pair<std::string, std::string>> s{
      {"AAA", "USW00000001"}, {"BBB", "USW00000002"}, {"CCC", "USW00000003"}};
  return s;
}

inline SyntheticRun make_synthetic_run(const std::string& tag, bool write_cache = true) {
  SyntheticRun run;
  run.root = scratch_dir(tag);
  const DateRange window{make_date(2000, 1, 1), make_date(2004, 12, 31)};
  std::ostringstream cfg;
  cfg << "window_start = 2000-01-01\nwindow_end = 2004-12-31\nhac_bandwidth = auto\n"
      << "output_dir = " << (run.root / "out").string() << "\n"
      << "cache_dir = " << (run.root / "cache").string() << "\n"
      << "endpoint = http://127.0.0.1:9/unused\nworkers = 2\n\n[stations]\n";
  std::uint64_t seed = 11;
  for (const auto& [code, id] : synthetic_stations()) {
    cfg << code << ' ' << id << " include Synthetic " << code << "\n";
    if (write_cache) {
      synth::StationClimate climate;
      climate.mean_f += static_cast<double>(seed % 7);
      pipeline::write_text_file(run.root / "cache" / (id + ".dly"),
                                synth::station_dly(id, window, climate, seed));
    }
    seed += 17;
  }
  run.config_path = run.root / "stations.conf";
  pipeline::write_text_file(run.config_path, cfg.str());
  run.config = load_config(run.config_path);
  return run;
}

inline std::vector<std::pair<std::string, std::string>> output_files(const fs::path& out) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& e : fs::recursive_directory_iterator(out)) {
    if (!e.is_regular_file() || e.path().filename() == "manifest.json") continue;
    files.emplace_back(fs::relative(e.path(), out).string(), read_all(e.path()));
  }
  std::sort(files.begin(), files.end());
  return files;
}

#ifndef TEMPDYN_CLI_PATH
#define TEMPDYN_CLI_PATH "tempdyn"
#endif

inline int run_cli(const std::string& args) {
  const std::string cmd = std::string(TEMPDYN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// --------------------------------------------------------------------------

inline std::vector<PropertyCheck> all_checks() {
  std::vector<PropertyCheck> checks;
  auto add = [&](std::string module, std::string name, std::function<void()> f) {
    checks.push_back({std::move(module), std::move(name), std::move(f)});
  };

  // ------------------------------------------------------------ ghcn_ingest
  add("ghcn_ingest", "dly line round trip is byte exact", [] {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 1000; ++i) {
      const auto rec = synth::random_record(rng);
      const std::string line = ghcn::format_dly_line(rec);
      ensure(line.size() == ghcn::kDlyLineLength, "line length");
      const auto parsed = ghcn::parse_dly_line(line, 1);
      ensure(parsed == rec, "parsed record differs");
      ensure(ghcn::format_dly_line(parsed) == line, "re-serialized line differs");
    }
  });
  add("ghcn_ingest", "interpolate_missing is idempotent", [] {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> v(-20, 100);
    std::bernoulli_distribution gap(0.2);
    for (int rep = 0; rep < 200; ++rep) {
      std::vector<std::optional<int>> s(50);
      for (std::size_t i = 0; i < s.size(); ++i) {
        const bool interior = i > 0 && i + 1 < s.size() && s[i - 1].has_value();
        if (!(interior && gap(rng))) s[i] = v(rng);
      }
      const auto once = ghcn::interpolate_missing(s);
      const std::vector<std::optional<int>> again(once.begin(), once.end());
      ensure(ghcn::interpolate_missing(again) == once, "second pass changed values");
    }
  });
  add("ghcn_ingest", "to_fahrenheit_int is monotone", [] {
    for (int v = -1500; v < 1500; ++v) {
      ensure(ghcn::to_fahrenheit_int(v) <= ghcn::to_fahrenheit_int(v + 1),
             "decrease at " + std::to_string(v));
    }
  });
  add("ghcn_ingest", "every window day has one TMAX and one TMIN", [] {
    const DateRange window{make_date(2003, 1, 1), make_date(2006, 12, 31)};
    synth::StationClimate c;
    c.missing_rate = 0.01;
    const auto rep = ghcn::ingest_dly(synth::station_dly("USW00099999", window, c, 3), {window});
    ensure(static_cast<long>(rep.observations.size()) == window.size(), "row count");
    ensure(!rep.interpolated_tmax.empty() && !rep.interpolated_tmin.empty(), "no gaps exercised");
    for (long i = 0; i < window.size(); ++i) {
      const auto& o = rep.observations[static_cast<std::size_t>(i)];
      ensure(o.date == add_days(window.first, i), "date sequence");
      ensure(o.tmax_f.has_value() && o.tmin_f.has_value(), "value missing after ingest");
    }
  });

  // --------------------------------------------------------- series_builder
  add("series_builder", "AVG/DTR do not depend on element order", [] {
    const DateRange window{make_date(2010, 1, 1), make_date(2011, 12, 31)};
    auto records = ghcn::parse_dly(synth::station_dly("USW00099998", window, {}, 4));
    const auto a = build_series(
        ghcn::repair_observations(ghcn::observations_in_window(records, window)).observations, window);
    std::stable_partition(records.begin(), records.end(),
                          [](const auto& r) { return r.element == "TMIN"; });
    std::reverse(records.begin(), records.end());
    const auto b = build_series(
        ghcn::repair_observations(ghcn::observations_in_window(records, window)).observations, window);
    ensure(a.avg == b.avg && a.dtr == b.dtr, "series changed with record order");
  });
  add("series_builder", "MAX and MIN reconstruct from AVG and DTR", [] {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> lo(-30, 90), spread(0, 45);
    std::vector<ghcn::DailyObservation> obs;
    const Date start = make_date(1999, 12, 1);
    for (int i = 0; i < 400; ++i) {
      const int mn = lo(rng);
      obs.push_back({add_days(start, i), mn + spread(rng), mn});
    }
    const auto s = build_series(obs, {start, add_days(start, 399)});
    for (std::size_t i = 0; i < s.size(); ++i) {
      ensure(s.avg[i] + s.dtr[i] / 2 == s.max_f[i], "max reconstruction");
      ensure(s.avg[i] - s.dtr[i] / 2 == s.min_f[i], "min reconstruction");
      ensure(s.dtr[i] >= 0, "negative dtr");
    }
  });
  add("series_builder", "monthly dummies partition the days", [] {
    const auto s = synth::series_with_values(make_date(1960, 1, 1), std::vector<double>(21185, 0.0));
    const auto d = month_dummies(s);
    for (std::size_t t = 0; t < d.size(); ++t) {
      int sum = 0;
      for (int m = 1; m <= 12; ++m) sum += d(m, t);
      ensure(sum == 1, "row sum != 1");
    }
  });

  // ------------------------------------------------------------ linreg_core
  add("linreg_core", "fit invariants: orthogonality, symmetric PSD diagonal, R2", [] {
    std::mt19937_64 rng(9);
    const auto x = random_design(rng, 80, 5);
    const auto y = random_response(rng, x);
    const auto fit = linreg::ols_fit_hac(x, y, linreg::HacBandwidth::fixed(3));
    const Eigen::VectorXd g = x.matrix().transpose() * fit.residuals;
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      ensure(std::fabs(g(j)) <= 1e-8 * x.matrix().col(j).norm() * fit.residuals.norm(),
             "residuals not orthogonal");
    }
    ensure(*fit.hac_cov == fit.hac_cov->transpose(), "hac_cov not exactly symmetric");
    ensure((fit.hac_cov->diagonal().array() >= 0).all(), "negative variance");
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
    const double sst = (yv.array() - yv.mean()).matrix().squaredNorm();
    ensure(fit.centered && close(fit.r_squared, 1 - fit.ssr / sst, 1e-12), "R2 definition");
    ensure(fit.r_squared >= 0 && fit.r_squared <= 1, "R2 range");
    const auto w = linreg::wald_test(fit, {"x1", "x3"});
    ensure(w.df == 2 && w.p_value == linreg::chi2_sf(w.statistic, 2), "wald p/df");
  });
  add("linreg_core", "scale equivariance", [] {
    std::mt19937_64 rng(10);
    const auto x = random_design(rng, 120, 4);
    const auto y = random_response(rng, x);
    const auto bw = linreg::HacBandwidth::fixed(4);
    const auto f0 = linreg::ols_fit_hac(x, y, bw);
    const auto w0 = linreg::wald_test(f0, {"x1", "x2"});
    for (double s : {3.7, -0.25}) {
      std::vector<double> ys(y);
      for (auto& v : ys) v *= s;
      const auto f = linreg::ols_fit_hac(x, ys, bw);
      for (Eigen::Index j = 0; j < f.beta.size(); ++j) {
        ensure(close(f.beta(j), s * f0.beta(j), 1e-10, 1e-12), "beta scaling");
        for (Eigen::Index i = 0; i < f.beta.size(); ++i) {
          ensure(close((*f.hac_cov)(i, j), s * s * (*f0.hac_cov)(i, j), 1e-9, 1e-14), "cov scaling");
        }
      }
      for (Eigen::Index t = 0; t < f.residuals.size(); ++t) {
        ensure(close(f.residuals(t), s * f0.residuals(t), 1e-9, 1e-12), "residual scaling");
      }
      ensure(close(f.r_squared, f0.r_squared, 1e-10), "R2 changed");
      const auto w = linreg::wald_test(f, {"x1", "x2"});
      ensure(close(w.statistic, w0.statistic, 1e-9) && close(w.p_value, w0.p_value, 1e-8, 1e-14),
             "wald changed");
    }
  });
  add("linreg_core", "column permutation equivariance", [] {
    std::mt19937_64 rng(12);
    const auto x = random_design(rng, 90, 5);
    const auto y = random_response(rng, x);
    const auto bw = linreg::HacBandwidth::automatic();
    const auto f0 = linreg::ols_fit_hac(x, y, bw);
    const std::vector<std::size_t> perm{3, 0, 4, 2, 1};
    linreg::DesignMatrix xp;
    for (auto j : perm) {
      const Eigen::VectorXd c = x.matrix().col(static_cast<Eigen::Index>(j));
      xp.add(x.names()[j], std::vector<double>(c.data(), c.data() + c.size()));
    }
    const auto f = linreg::ols_fit_hac(xp, y, bw);
    for (const auto& a : x.names()) {
      ensure(close(f.coef(a), f0.coef(a), 1e-9, 1e-12), "beta permutation");
      for (const auto& b : x.names()) {
        ensure(close((*f.hac_cov)(f.index_of(a), f.index_of(b)),
                     (*f0.hac_cov)(f0.index_of(a), f0.index_of(b)), 1e-8, 1e-14),
               "cov permutation");
      }
    }
    ensure(close(f.r_squared, f0.r_squared, 1e-12), "R2 changed");
    ensure(close(linreg::wald_test(f, {"x4", "x1"}).statistic,
                 linreg::wald_test(f0, {"x1", "x4"}).statistic, 1e-9),
           "wald changed");
  });
  add("linreg_core", "hac_cov is exactly symmetric", [] {
    std::mt19937_64 rng(13);
    for (std::size_t lags : {0, 1, 5, 20}) {
      const auto x = random_design(rng, 60, 6);
      const auto y = random_response(rng, x);
      const auto fit = linreg::ols_fit(x, y);
      const auto v = linreg::hac_cov(x, fit.residuals, linreg::HacBandwidth::fixed(lags));
      ensure(v == v.transpose(), "asymmetric at lags " + std::to_string(lags));
    }
  });
  add("linreg_core", "a column orthogonal to the design and y leaves coefficients unchanged", [] {
    std::mt19937_64 rng(14);
    const auto x = random_design(rng, 70, 4);
    const auto y = random_response(rng, x);
    const auto f0 = linreg::ols_fit(x, y);
    // project a random vector off span(X, y)
    std::normal_distribution<double> z(0.0, 1.0);
    Eigen::MatrixXd basis(x.rows(), x.cols() + 1);
    basis << x.matrix(), Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
    Eigen::VectorXd w(x.rows());
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = z(rng);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(basis.rows(), basis.cols());
    w -= q * (q.transpose() * w);
    linreg::DesignMatrix x2 = x;
    x2.add("orth", std::vector<double>(w.data(), w.data() + w.size()));
    const auto f = linreg::ols_fit(x2, y);
    for (const auto& name : x.names()) {
      ensure(close(f.coef(name), f0.coef(name), 1e-9, 1e-12), "coefficient moved: " + name);
    }
    ensure(std::fabs(f.coef("orth")) < 1e-9, "orthogonal column has nonzero coefficient");
  });

  // --------------------------------------------------------- climate_models
  add("climate_models", "evolving model with zero interactions nests the fixed model", [] {
    const auto s = seasonal_series(21);
    const auto trend = models::fit_trend(s, Variable::Avg);
    const auto yt = models::detrend(s, Variable::Avg, trend);
    const auto d = month_dummies(s);
    const auto time = s.time_index();
    const auto fixed = models::fit_fixed_seasonal(yt, d);
    const auto evolving = models::fit_evolving_seasonal(yt, d, time);
    std::vector<std::string> inter;
    for (int m = 1; m <= 12; ++m) inter.push_back(models::interaction_name(m));
    const auto restricted = restricted_beta(evolving.fit, inter);
    for (int m = 1; m <= 12; ++m) {
      const auto name = models::dummy_name(m);
      ensure(close(restricted(static_cast<Eigen::Index>(evolving.fit.index_of(name))),
                   fixed.fit.coef(name), 1e-7, 1e-9),
             "restricted " + name);
    }
  });
  add("climate_models", "joint model with zero seasonal terms nests trend+AR", [] {
    const auto s = seasonal_series(22);
    const auto joint = models::fit_joint(s, Variable::Avg);
    std::vector<std::string> zero;
    for (int m = 1; m <= 12; ++m) {
      if (m == models::kOmittedMonth) continue;
      zero.push_back(models::dummy_name(m));
      zero.push_back(models::interaction_name(m));
    }
    const auto restricted = restricted_beta(joint.fit, zero);
    const auto full = models::joint_design(s, Variable::Avg);
    linreg::DesignMatrix small;
    for (const char* name : {"c", "TIME", "Y(-1)"}) {
      const Eigen::VectorXd c = full.matrix().col(static_cast<Eigen::Index>(full.index_of(name)));
      small.add(name, std::vector<double>(c.data(), c.data() + c.size()));
    }
    const auto direct = linreg::ols_fit(small, s.values(Variable::Avg).subspan(1));
    for (const char* name : {"c", "TIME", "Y(-1)"}) {
      ensure(close(restricted(static_cast<Eigen::Index>(joint.fit.index_of(name))),
                   direct.coef(name), 1e-6, 1e-9),
             std::string("restricted ") + name);
    }
  });
  add("climate_models", "fixed seasonal coefficients are within-month means", [] {
    const auto s = seasonal_series(23);
    const auto yt = models::detrend(s, Variable::Dtr, models::fit_trend(s, Variable::Dtr));
    const auto fixed = models::fit_fixed_seasonal(yt, month_dummies(s));
    for (int m = 1; m <= 12; ++m) {
      double sum = 0;
      int n = 0;
      for (std::size_t t = 0; t < s.size(); ++t) {
        if (s.month[t] == m) {
          sum += yt[t];
          ++n;
        }
      }
      ensure(close(fixed.pattern.month_effects[m - 1], sum / n, 1e-9, 1e-10), "month mean");
    }
  });
  add("climate_models", "frequency-weighted evolving pattern averages to zero", [] {
    const auto s = seasonal_series(24);
    const auto yt = models::detrend(s, Variable::Avg, models::fit_trend(s, Variable::Avg));
    const auto time = s.time_index();
    const auto ev = models::fit_evolving_seasonal(yt, month_dummies(s), time);
    double sum = 0.0;
    for (std::size_t t = 0; t < s.size(); ++t) {
      sum += ev.pattern_at(s.time(t)).month_effects[static_cast<std::size_t>(s.month[t] - 1)];
    }
    ensure(std::fabs(sum / static_cast<double>(s.size())) < 1e-8, "weighted mean not zero");
  });
  add("climate_models", "delta_trend is antisymmetric under time reversal", [] {
    const auto s = seasonal_series(25);
    std::vector<double> rev(s.avg.rbegin(), s.avg.rend());
    const auto r = synth::series_with_values(s.dates.front(), rev);
    const double a = models::fit_trend(s, Variable::Avg).delta_trend;
    const double b = models::fit_trend(r, Variable::Avg).delta_trend;
    ensure(close(a, -b, 1e-9, 1e-12), "delta_trend not antisymmetric");
  });
  add("climate_models", "report rows do not depend on station order", [] {
    std::vector<report::StationInput> in;
    for (std::uint64_t seed : {31, 32, 33, 34}) {
      in.push_back({"S" + std::to_string(seed), [seed] { return seasonal_series(seed, 3); }});
    }
    const auto a = report::batch_report(in, Variable::Dtr, linreg::HacBandwidth::automatic(), 1);
    std::reverse(in.begin(), in.end());
    const auto b = report::batch_report(in, Variable::Dtr, linreg::HacBandwidth::automatic(), 3);
    ensure(a.rows.size() == 4 && b.rows.size() == 4, "row count");
    for (const auto& ra : a.rows) {
      const auto it = std::find_if(b.rows.begin(), b.rows.end(),
                                   [&](const auto& r) { return r.station == ra.station; });
      ensure(it != b.rows.end(), "station missing");
      ensure(it->delta_trend == ra.delta_trend && it->p_nt == ra.p_nt && it->p_ns == ra.p_ns &&
                 it->p_nts == ra.p_nts && it->rho == ra.rho && it->r_squared == ra.r_squared,
             "row differs for " + ra.station);
    }
    ensure(a.median->delta_trend == b.median->delta_trend && a.median->p_nts == b.median->p_nts,
           "median differs");
  });

  // ---------------------------------------------------------------- density
  add("density", "estimate is nonnegative and integrates to one", [] {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> z(19.0, 5.0);
    std::vector<double> data(3000);
    for (auto& v : data) v = std::round(z(rng));
    const auto est = density::kde(data);
    ensure(std::all_of(est.values.begin(), est.values.end(), [](double v) { return v >= 0; }),
           "negative ordinate");
    ensure(std::adjacent_find(est.grid.begin(), est.grid.end(), std::greater_equal<>()) ==
               est.grid.end(),
           "grid not increasing");
    const double i = est.integral();
    ensure(i >= 0.99 && i <= 1.01, "integral " + std::to_string(i));
  });
  add("density", "location equivariance", [] {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> z(50.0, 15.0);
    std::vector<double> data(1000);
    for (auto& v : data) v = z(rng);
    const auto a = density::kde(data);
    std::vector<double> shifted(data);
    for (auto& v : shifted) v += 12.5;
    const auto b = density::kde(shifted, {a.bandwidth});
    for (std::size_t i = 0; i < a.grid.size(); ++i) {
      ensure(close(b.grid[i], a.grid[i] + 12.5, 1e-12, 1e-10), "grid shift");
      ensure(close(b.values[i], a.values[i], 1e-8, 1e-14), "value shift");
    }
  });
  add("density", "integral approaches one as the grid widens", [] {
    std::mt19937_64 rng(43);
    std::gamma_distribution<double> g(3.0, 4.0);
    std::vector<double> data(2000);
    for (auto& v : data) v = g(rng);
    const double h = density::silverman_bandwidth(data);
    const double i3 = density::kde(data, {h, 512, 3.0}).integral();
    const double i6 = density::kde(data, {h, 512, 6.0}).integral();
    ensure(std::fabs(i6 - 1.0) <= std::fabs(i3 - 1.0) + 1e-9, "wider grid is further from 1");
    ensure(std::fabs(i6 - 1.0) < 1e-3, "wide-grid integral");
  });
  add("density", "doubling grid points moves the integral by < 1e-3", [] {
    std::mt19937_64 rng(44);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> data(1500);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = z(rng) * 10 + (i % 2 ? 40 : 75);
    const double a = density::kde(data, {std::nullopt, 512}).integral();
    const double b = density::kde(data, {std::nullopt, 1024}).integral();
    ensure(std::fabs(a - b) < 1e-3, "grid refinement changed the integral");
  });

  // ------------------------------------------------------------- report_cli
  add("report_cli", "re-running commands gives byte-identical outputs", [] {
    auto run = make_synthetic_run("rerun");
    std::vector<std::vector<std::pair<std::string, std::string>>> outputs;
    for (int rep = 0; rep < 2; ++rep) {
      fs::remove_all(run.config.output_dir);
      ensure(pipeline::cmd_ingest(run.config, {{}, true}).ok(), "ingest failed");
      ensure(pipeline::cmd_tables(run.config).ok(), "tables failed");
      pipeline::cmd_figures(run.config, "BBB");
      outputs.push_back(output_files(run.config.output_dir));
    }
    ensure(outputs[0].size() > 10, "too few outputs");
    ensure(outputs[0] == outputs[1], "outputs differ between runs");
    fs::remove_all(run.root);
  });
  add("report_cli", "CSV and text tables carry the same numbers", [] {
    auto run = make_synthetic_run("csvtext");
    ensure(pipeline::cmd_ingest(run.config, {{}, true}).ok(), "ingest failed");
    ensure(pipeline::cmd_tables(run.config).ok(), "tables failed");
    for (const char* stem : {"table_avg", "table_dtr"}) {
      std::istringstream csv_in(read_all(run.config.output_dir / "tables" / (std::string(stem) + ".csv")));
      std::istringstream txt(read_all(run.config.output_dir / "tables" / (std::string(stem) + ".txt")));
      std::string line;
      std::vector<std::vector<std::string>> from_csv, from_txt;
      std::getline(csv_in, line);
      while (std::getline(csv_in, line)) {
        const auto f = csv::split(line);
        from_csv.push_back({f[0], f[1], f[3], f[4], f[5], f[6], f[8]});
      }
      while (std::getline(txt, line)) {
        std::istringstream row(line);
        std::vector<std::string> tok;
        for (std::string t; row >> t;) {
          if (!t.empty() && t.back() == '*') t.pop_back();
          tok.push_back(t);
        }
        if (tok.size() == 7 && tok[0] != "station") from_txt.push_back(tok);
      }
      ensure(from_csv == from_txt, std::string("table mismatch in ") + stem);
      ensure(from_csv.back()[0] == "Median", "median row");
    }
    fs::remove_all(run.root);
  });
  add("report_cli", "exit status is nonzero iff some unit of work failed", [] {
    auto ok = make_synthetic_run("exit_ok");
    const std::string cfg = "--config " + ok.config_path.string();
    ensure(run_cli("ingest --offline " + cfg) == 0, "ingest should succeed");
    ensure(run_cli("tables " + cfg) == 0, "tables should succeed");
    ensure(run_cli("figures --station AAA " + cfg) == 0, "figures should succeed");
    ensure(run_cli("fit --station AAA --variable DTR --model evolving " + cfg) == 0, "fit should succeed");
    fs::remove(ok.root / "cache" / "USW00000002.dly");
    ensure(run_cli("ingest --offline " + cfg) != 0, "ingest with a missing station should fail");
    ensure(run_cli("ingest --offline --station AAA " + cfg) == 0, "single good station");
    fs::remove(ok.config.output_dir / "series" / "BBB.csv");
    ensure(run_cli("tables " + cfg) != 0, "tables with a missing series should fail");
    ensure(run_cli("figures --station BBB " + cfg) != 0, "figures on a missing series should fail");
    fs::remove_all(ok.root);
  });

  return checks;
}

}  // namespace props
