// Command-line front end: calibration management, empirical analysis,
// tail-index tests, Monte Carlo experiments, and power curves.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "auctionevt/calibrate.hpp"
#include "auctionevt/data.hpp"
#include "auctionevt/density_fp.hpp"
#include "auctionevt/inference.hpp"
#include "auctionevt/mc.hpp"

using namespace aevt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitCalibrationMissing = 3;
constexpr int kExitNumeric = 4;

struct OutputSink {
  std::string format = "markdown";  // json|csv|markdown
  std::string path;                 // empty = stdout
  void emit(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      if (!text.empty() && text.back() != '\n') std::cout << '\n';
      return;
    }
    std::ofstream os(path);
    os << text;
    if (!text.empty() && text.back() != '\n') os << '\n';
  }
};

std::string format_ci(const CIResult& ci, int precision = 3) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "[%.*f, %.*f]", precision, ci.lo, precision, ci.hi);
  return buf;
}

WeightTable load_table_or_exit(const std::string& path, CiTarget target, int n, double alpha) {
  if (!std::filesystem::exists(path)) {
    std::fprintf(stderr,
                 "weight table '%s' not found; run `auctionevt calibrate --target %s --n %d "
                 "--alpha %g --out %s` first\n",
                 path.c_str(), to_string(target), n, alpha, path.c_str());
    std::exit(kExitCalibrationMissing);
  }
  WeightTable t = load_table(path);
  require_table_matches(t, target, n, alpha);
  return t;
}

nlohmann::json ci_json(const CIResult& ci) {
  return {{"lo", ci.lo},       {"hi", ci.hi},       {"z_lo", ci.z_lo},
          {"z_hi", ci.z_hi},   {"alpha", ci.alpha}, {"n", ci.n},
          {"target", to_string(ci.target)},         {"weight_table", ci.weight_table_id}};
}

nlohmann::json test_json(const TestResult& t) {
  return {{"statistic", t.statistic},
          {"log_statistic", t.log_statistic},
          {"critical_value", t.critical_value},
          {"reject", t.reject},
          {"p_value", t.p_value},
          {"xi0", t.xi0},
          {"alpha", t.alpha},
          {"alternative", t.alternative},
          {"n_sim", t.n_sim},
          {"seed", t.seed}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inference for sealed-bid auctions with many bidders from transaction prices"};
  app.require_subcommand(1);

  // ---- calibrate ----------------------------------------------------------
  auto* cal = app.add_subcommand("calibrate", "compute Lagrange weight tables");
  std::string cal_target = "winner_sp";
  int cal_n = 4;
  double cal_alpha = 0.05;
  std::string cal_out = "weights.json";
  CalibrationConfig cal_cfg;
  cal_cfg.seed = 20240214;
  bool cal_audit = false;
  cal->add_option("--target", cal_target, "winner_sp|seller_sp|winner_fp|seller_fp");
  cal->add_option("--n", cal_n, "number of auctions the table is for")->required();
  cal->add_option("--alpha", cal_alpha, "significance level");
  cal->add_option("--out", cal_out, "output table path");
  cal->add_option("--grid-size", cal_cfg.grid_size, "xi grid points (M)");
  cal->add_option("--draws", cal_cfg.draws, "simulated samples per grid point (B)");
  cal->add_option("--iterations", cal_cfg.iterations, "weight updates (S)");
  cal->add_option("--step", cal_cfg.step, "update step (epsilon)");
  cal->add_option("--seed", cal_cfg.seed, "rng seed");
  cal->add_flag("--audit", cal_audit, "re-simulate coverage at every grid point afterwards");

  // ---- analyze ------------------------------------------------------------
  auto* an = app.add_subcommand("analyze", "winner/seller CIs + regularity test from a CSV");
  std::string an_input, an_format = "sp", an_weights_dir = "data/weights";
  std::string an_rates;
  double an_alpha = 0.05;
  int an_base_year = 0;
  std::uint64_t an_seed = 20240214;
  OutputSink an_out;
  an->add_option("--input", an_input, "CSV with label,date,price[,unit]")->required();
  an->add_option("--format", an_format, "auction format: sp|fp");
  an->add_option("--alpha", an_alpha, "significance level");
  an->add_option("--weights", an_weights_dir, "directory with <target>_n<N>.json tables");
  an->add_option("--base-year", an_base_year, "inflation-adjust prices to this year");
  an->add_option("--rates", an_rates, "CSV with year,rate (required with --base-year)");
  an->add_option("--seed", an_seed, "rng seed for the test simulation");
  an->add_option("--out", an_out.format, "output format: json|csv|markdown");
  an->add_option("--out-file", an_out.path, "write output here instead of stdout");

  // ---- test ---------------------------------------------------------------
  auto* ts = app.add_subcommand("test", "tail-index hypothesis test");
  std::string ts_input, ts_format = "sp";
  double ts_xi0 = -1.0, ts_alpha = 0.05;
  std::optional<double> ts_xi1;
  std::uint64_t ts_seed = 20240214;
  int ts_nsim = kDefaultTestSims;
  OutputSink ts_out;
  ts->add_option("--input", ts_input, "CSV with label,date,price[,unit]")->required();
  ts->add_option("--format", ts_format, "sp|fp");
  ts->add_option("--xi0", ts_xi0, "null tail index");
  ts->add_option("--xi1", ts_xi1, "simple alternative (composite uniform if omitted)");
  ts->add_option("--alpha", ts_alpha, "level");
  ts->add_option("--seed", ts_seed, "rng seed");
  ts->add_option("--sims", ts_nsim, "null-distribution draws");
  ts->add_option("--out", ts_out.format, "json|csv|markdown");
  ts->add_option("--out-file", ts_out.path, "write output here");

  // ---- simulate -----------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "Monte Carlo coverage/rejection experiments");
  std::string sim_dgp = "uniform_0_3", sim_format = "sp", sim_methods = "ours";
  std::string sim_metric = "coverage", sim_target = "winner";
  std::string sim_weights;
  int sim_n = 10, sim_K = 100, sim_K_hi = 0, sim_reps = kDeskScaleReps;
  bool sim_full = false;
  double sim_alpha = 0.05;
  std::uint64_t sim_seed = 20240214;
  OutputSink sim_out;
  sim->add_option("--dgp", sim_dgp, "uniform_0_3|abs_normal|abs_t20|pareto_025");
  sim->add_option("--n", sim_n, "auctions per dataset");
  sim->add_option("--K", sim_K, "bidders per auction (lo bound if --K-hi set)");
  sim->add_option("--K-hi", sim_K_hi, "upper bound for random K ~ U{K..K-hi}");
  sim->add_option("--reps", sim_reps, "replications");
  sim->add_flag("--full-scale", sim_full, "use 500 replications");
  sim->add_option("--metric", sim_metric, "coverage|rejection");
  sim->add_option("--target", sim_target, "winner|seller (coverage only)");
  sim->add_option("--methods", sim_methods, "comma list of ours,tstat,bootstrap");
  sim->add_option("--format", sim_format, "sp|fp");
  sim->add_option("--weights", sim_weights, "weight table for method 'ours'");
  sim->add_option("--alpha", sim_alpha, "level");
  sim->add_option("--seed", sim_seed, "rng seed");
  sim->add_option("--out", sim_out.format, "json|csv|markdown");
  sim->add_option("--out-file", sim_out.path, "write output here");

  // ---- power --------------------------------------------------------------
  auto* pw = app.add_subcommand("power", "rejection curve of the regularity test");
  std::string pw_grid = "-1:0.5:10", pw_nlist = "5,10,20", pw_format = "sp";
  int pw_reps = 500, pw_nsim = kDefaultTestSims;
  double pw_alpha = 0.05;
  std::uint64_t pw_seed = 20240214;
  OutputSink pw_out;
  pw->add_option("--xi-grid", pw_grid, "lo:hi:points");
  pw->add_option("--n-list", pw_nlist, "comma list of sample sizes");
  pw->add_option("--reps", pw_reps, "replications per point");
  pw->add_option("--sims", pw_nsim, "null draws for the critical value");
  pw->add_option("--alpha", pw_alpha, "level");
  pw->add_option("--format", pw_format, "sp|fp");
  pw->add_option("--seed", pw_seed, "rng seed");
  pw->add_option("--out", pw_out.format, "json|csv|markdown");
  pw->add_option("--out-file", pw_out.path, "write output here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cal) {
      const CiTarget target = ci_target_from_string(cal_target);
      const WeightTable table = calibrate_weights(target, cal_n, cal_alpha, cal_cfg, true);
      save_table(table, cal_out);
      std::fprintf(stderr, "saved %s (id %s)\n", cal_out.c_str(), table.id().c_str());
      if (cal_audit) {
        const auto cov = coverage_audit(table, cal_cfg.draws, RngStream(cal_cfg.seed ^ 0xA5A5));
        for (std::size_t m = 0; m < cov.size(); ++m)
          std::printf("xi=% .3f coverage %.4f\n", table.grid[m], cov[m]);
      }
      return kExitOk;
    }

    if (*an) {
      const AuctionFormat fmt = auction_format_from_string(an_format);
      PriceData data;
      std::vector<double> prices;
      try {
        data = parse_prices_csv(an_input);
        prices = data.prices();
        if (an_base_year > 0) {
          if (an_rates.empty())
            throw std::invalid_argument("--base-year needs --rates <csv>");
          prices = adjust_inflation(data, an_base_year, parse_rates_csv(an_rates));
        }
      } catch (const std::exception& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return kExitInput;
      }
      const int n = static_cast<int>(prices.size());
      const bool fp = fmt == AuctionFormat::first_price;
      const std::string wtag = fp ? "fp" : "sp";
      const std::string wdir = an_weights_dir;
      const WeightTable wt = load_table_or_exit(
          wdir + "/winner_" + wtag + "_n" + std::to_string(n) + ".json",
          fp ? CiTarget::winner_fp : CiTarget::winner_sp, n, an_alpha);
      const WeightTable st = load_table_or_exit(
          wdir + "/seller_" + wtag + "_n" + std::to_string(n) + ".json",
          fp ? CiTarget::seller_fp : CiTarget::seller_sp, n, an_alpha);
      const CIResult wci = ci_for_target(prices, wt, an_alpha);
      const CIResult sci = ci_for_target(prices, st, an_alpha);
      const TestResult reg = test_regularity(prices, an_alpha, RngStream(an_seed), fmt);

      nlohmann::json j;
      j["input"] = an_input;
      j["format"] = an_format;
      j["n"] = n;
      j["alpha"] = an_alpha;
      j["base_year"] = an_base_year;
      j["prices"] = prices;
      j["seed"] = an_seed;
      j["winner_ci"] = ci_json(wci);
      j["seller_ci"] = ci_json(sci);
      j["regularity_test"] = test_json(reg);
      if (an_out.format == "json") {
        an_out.emit(j.dump(2));
      } else if (an_out.format == "csv") {
        std::string s = "quantity,lo,hi,p_value,weight_table\n";
        s += "winner," + std::to_string(wci.lo) + "," + std::to_string(wci.hi) + ",," +
             wci.weight_table_id + "\n";
        s += "seller," + std::to_string(sci.lo) + "," + std::to_string(sci.hi) + ",," +
             sci.weight_table_id + "\n";
        s += "regularity_p,,," + std::to_string(reg.p_value) + ",\n";
        an_out.emit(s);
      } else {
        char buf[512];
        std::string s = "| quantity | value |\n|---|---|\n";
        std::snprintf(buf, sizeof buf, "| %d%% CI for winner's utility | %s |\n",
                      static_cast<int>(100 * (1 - an_alpha)), format_ci(wci).c_str());
        s += buf;
        std::snprintf(buf, sizeof buf, "| %d%% CI for seller's revenue | %s |\n",
                      static_cast<int>(100 * (1 - an_alpha)), format_ci(sci).c_str());
        s += buf;
        std::snprintf(buf, sizeof buf, "| p-value for H0: xi = -1 | %.3f |\n", reg.p_value);
        s += buf;
        s += "| seed | " + std::to_string(an_seed) + " |\n";
        s += "| weight tables | " + wci.weight_table_id + ", " + sci.weight_table_id + " |\n";
        an_out.emit(s);
      }
      return kExitOk;
    }

    if (*ts) {
      const AuctionFormat fmt = auction_format_from_string(ts_format);
      std::vector<double> prices;
      try {
        prices = parse_prices_csv(ts_input).prices();
      } catch (const std::exception& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return kExitInput;
      }
      const TestResult t =
          ts_xi1 ? test_simple(prices, ts_xi0, *ts_xi1, ts_alpha, RngStream(ts_seed), fmt,
                               ts_nsim)
                 : test_composite(prices, ts_xi0, uniform_weight(ts_xi0 == -1.0 ? -1.0 : kXiMin,
                                                                 kXiMax),
                                  ts_alpha, RngStream(ts_seed), fmt, ts_nsim);
      if (ts_out.format == "json") {
        ts_out.emit(test_json(t).dump(2));
      } else {
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "statistic %.6g  critical %.6g  p-value %.4f  reject %s (seed %llu)",
                      t.statistic, t.critical_value, t.p_value, t.reject ? "yes" : "no",
                      static_cast<unsigned long long>(t.seed));
        ts_out.emit(buf);
      }
      return kExitOk;
    }

    if (*sim) {
      ExperimentDesign d;
      d.dgp = dgp_from_string(sim_dgp);
      d.n = sim_n;
      d.k = KSpec{sim_K, sim_K_hi > sim_K ? sim_K_hi : sim_K};
      d.format = auction_format_from_string(sim_format);
      d.alpha = sim_alpha;
      const bool fp = d.format == AuctionFormat::first_price;
      if (sim_target == "winner")
        d.target = fp ? CiTarget::winner_fp : CiTarget::winner_sp;
      else
        d.target = fp ? CiTarget::seller_fp : CiTarget::seller_sp;
      const int reps = sim_full ? kFullScaleReps : sim_reps;
      ExperimentReport report;
      if (sim_metric == "rejection") {
        report = run_test_experiment(d, reps, RngStream(sim_seed));
      } else {
        std::vector<CiMethod> methods;
        std::stringstream ss(sim_methods);
        std::string item;
        while (std::getline(ss, item, ',')) {
          if (item == "ours") methods.push_back(CiMethod::ours);
          else if (item == "tstat") methods.push_back(CiMethod::tstat);
          else if (item == "bootstrap") methods.push_back(CiMethod::bootstrap);
          else throw std::invalid_argument("unknown method: " + item);
        }
        std::optional<WeightTable> table;
        if (std::count(methods.begin(), methods.end(), CiMethod::ours)) {
          if (sim_weights.empty()) {
            std::fprintf(stderr,
                         "method 'ours' needs --weights <table.json>; run `auctionevt "
                         "calibrate` first\n");
            return kExitCalibrationMissing;
          }
          table = load_table_or_exit(sim_weights, d.target, d.n, d.alpha);
        }
        report = run_coverage_experiment(d, methods, reps, table ? &*table : nullptr,
                                         RngStream(sim_seed));
      }
      if (sim_out.format == "json") sim_out.emit(report.to_json());
      else if (sim_out.format == "csv") sim_out.emit(report.to_csv());
      else sim_out.emit(report.to_markdown());
      return kExitOk;
    }

    if (*pw) {
      double lo = -1.0, hi = 0.5;
      int points = 10;
      if (std::sscanf(pw_grid.c_str(), "%lf:%lf:%d", &lo, &hi, &points) != 3)
        throw std::invalid_argument("--xi-grid wants lo:hi:points");
      std::vector<double> grid(points);
      for (int i = 0; i < points; ++i)
        grid[i] = lo + (hi - lo) * i / std::max(1, points - 1);
      std::vector<int> ns;
      {
        std::stringstream ss(pw_nlist);
        std::string item;
        while (std::getline(ss, item, ',')) ns.push_back(std::stoi(item));
      }
      const auto curve =
          power_curve(grid, ns, pw_alpha, pw_reps, RngStream(pw_seed),
                      auction_format_from_string(pw_format), pw_nsim);
      if (pw_out.format == "json") {
        nlohmann::json j;
        j["seed"] = pw_seed;
        j["alpha"] = pw_alpha;
        j["points"] = nlohmann::json::array();
        for (const auto& p : curve)
          j["points"].push_back(
              {{"xi", p.xi}, {"n", p.n}, {"rejection", p.rejection_rate}, {"reps", p.reps}});
        pw_out.emit(j.dump(2));
      } else {
        std::string s = pw_out.format == "csv" ? "xi,n,rejection,reps\n"
                                               : "| xi | n | rejection | reps |\n|---|---|---|---|\n";
        char buf[128];
        for (const auto& p : curve) {
          if (pw_out.format == "csv")
            std::snprintf(buf, sizeof buf, "%g,%d,%g,%d\n", p.xi, p.n, p.rejection_rate, p.reps);
          else
            std::snprintf(buf, sizeof buf, "| %.3f | %d | %.3f | %d |\n", p.xi, p.n,
                          p.rejection_rate, p.reps);
          s += buf;
        }
        pw_out.emit(s);
      }
      return kExitOk;
    }
  } catch (const CalibrationFailure& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kExitNumeric;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kExitNumeric;
  }
  return kExitOk;
}
