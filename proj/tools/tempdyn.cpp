// tempdyn: ingest GHCN-daily stations and produce the AVG/DTR trend,
// seasonality and dynamics tables plus figure data.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tempdyn/pipeline.hpp"

namespace {

struct CommonFlags {
  std::string config = "config/stations.conf";
  std::vector<std::string> stations;
  std::string hac_bandwidth;
  std::string out;
  bool strict_qc = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "Run configuration file")->capture_default_str();
  cmd->add_option("--station", f.stations, "Airport code(s); default: all included stations");
  cmd->add_option("--hac-bandwidth", f.hac_bandwidth, "HAC lag truncation: auto or an integer");
  cmd->add_option("--out", f.out, "Output directory (overrides output_dir)");
  cmd->add_flag("--strict-qc", f.strict_qc, "Treat quality-flagged values as missing");
}

tempdyn::RunConfig resolve(const CommonFlags& f) {
  auto cfg = tempdyn::load_config(f.config);
  if (!f.hac_bandwidth.empty()) cfg.hac_bandwidth = tempdyn::linreg::HacBandwidth::parse(f.hac_bandwidth);
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (f.strict_qc) cfg.strict_qc = true;
  return cfg;
}

std::vector<tempdyn::Variable> parse_variables(const std::string& s) {
  if (s == "both" || s == "BOTH") return {tempdyn::Variable::Avg, tempdyn::Variable::Dtr};
  return {tempdyn::parse_variable(s)};
}

}  // namespace

int main(int argc, char** argv) {
  using namespace tempdyn;
  CLI::App app{"AVG/DTR temperature dynamics from GHCN-daily station records"};
  app.require_subcommand(1);

  CommonFlags flags;
  bool offline = false, refresh = false;
  std::string variable = "both", model = "joint";

  auto* ingest = app.add_subcommand("ingest", "Fetch, parse, repair and write per-station series");
  add_common(ingest, flags);
  ingest->add_flag("--offline", offline, "Use the cache only");
  ingest->add_flag("--refresh", refresh, "Re-download even when cached");

  auto* tables = app.add_subcommand("tables", "Station tables with a median row");
  add_common(tables, flags);
  tables->add_option("--variable", variable, "AVG, DTR or both")->capture_default_str();

  auto* figures = app.add_subcommand("figures", "Figure data for one station");
  add_common(figures, flags);

  auto* fit = app.add_subcommand("fit", "Coefficient table for a single model");
  add_common(fit, flags);
  fit->add_option("--variable", variable, "AVG or DTR")->required();
  fit->add_option("--model", model, "trend, fixed, evolving or joint")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig cfg = resolve(flags);
    if (*ingest) {
      const auto summary = pipeline::cmd_ingest(cfg, {flags.stations, offline, refresh});
      for (const auto& s : summary.stations) {
        for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
        if (s.ok) {
          std::cout << s.station.code << ": " << s.rows << " days, "
                    << s.interpolated_tmax.size() + s.interpolated_tmin.size()
                    << " interpolated values\n";
        } else {
          std::cerr << s.station.code << ": FAILED: " << s.error << '\n';
        }
      }
      return summary.ok() ? 0 : 1;
    }
    if (*tables) {
      const auto summary = pipeline::cmd_tables(cfg, {parse_variables(variable), flags.stations});
      for (const auto& rep : summary.reports) {
        report::write_text(std::cout, rep);
        std::cout << '\n';
      }
      return summary.ok() ? 0 : 1;
    }
    if (*figures) {
      if (flags.stations.size() != 1) {
        std::cerr << "figures needs exactly one --station\n";
        return 2;
      }
      const auto b = pipeline::cmd_figures(cfg, flags.stations.front());
      std::cout << "wrote " << (cfg.output_dir / "figures" / b.station).string() << '\n';
      return 0;
    }
    if (*fit) {
      if (flags.stations.size() != 1) {
        std::cerr << "fit needs exactly one --station\n";
        return 2;
      }
      pipeline::cmd_fit(cfg, flags.stations.front(), parse_variable(variable),
                        models::parse_model_kind(model), std::cout);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
