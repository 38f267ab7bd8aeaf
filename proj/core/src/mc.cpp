#include "auctionevt/mc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "auctionevt/parallel.hpp"
#include "auctionevt/quadrature.hpp"
#include "auctionevt/special.hpp"

namespace aevt {

DGPSpec make_dgp(DgpFamily family) {
  switch (family) {
    case DgpFamily::uniform_0_3: return {family, -1.0, 0.0, "uniform_0_3"};
    case DgpFamily::abs_normal: return {family, 0.0, 0.0, "abs_normal"};
    case DgpFamily::abs_t20: return {family, 0.05, 0.0, "abs_t20"};
    case DgpFamily::pareto_025: return {family, 0.25, 1.0, "pareto_025"};
  }
  throw std::invalid_argument("unknown DGP family");
}

DGPSpec dgp_from_string(const std::string& name) {
  for (const auto f : {DgpFamily::uniform_0_3, DgpFamily::abs_normal, DgpFamily::abs_t20,
                       DgpFamily::pareto_025}) {
    const DGPSpec s = make_dgp(f);
    if (s.name == name) return s;
  }
  if (name == "u03") return make_dgp(DgpFamily::uniform_0_3);
  if (name == "absnormal") return make_dgp(DgpFamily::abs_normal);
  if (name == "abst20") return make_dgp(DgpFamily::abs_t20);
  if (name == "pareto") return make_dgp(DgpFamily::pareto_025);
  throw std::invalid_argument("unknown DGP '" + name + "'");
}

double dgp_cdf(const DGPSpec& spec, double v) {
  switch (spec.family) {
    case DgpFamily::uniform_0_3:
      return v <= 0.0 ? 0.0 : (v >= 3.0 ? 1.0 : v / 3.0);
    case DgpFamily::abs_normal:
      return v <= 0.0 ? 0.0 : std::erf(v / std::sqrt(2.0));
    case DgpFamily::abs_t20: {
      if (v <= 0.0) return 0.0;
      const double df = 20.0;
      return 1.0 - regularized_incomplete_beta(df / 2.0, 0.5, df / (df + v * v));
    }
    case DgpFamily::pareto_025:
      return v <= 1.0 ? 0.0 : 1.0 - std::pow(v, -4.0);
  }
  return 0.0;
}

namespace {

// Marsaglia-Tsang Gamma(shape a >= 1, scale 1)
double gamma_draw(double a, RngStream& rng) {
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_pos();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

double dgp_draw_one(const DGPSpec& spec, RngStream& rng) {
  switch (spec.family) {
    case DgpFamily::uniform_0_3: return 3.0 * rng.uniform();
    case DgpFamily::abs_normal: return std::fabs(rng.normal());
    case DgpFamily::abs_t20: {
      const double z = rng.normal();
      const double chi2 = 2.0 * gamma_draw(10.0, rng);  // chi-square(20)
      return std::fabs(z / std::sqrt(chi2 / 20.0));
    }
    case DgpFamily::pareto_025: return std::pow(rng.uniform_pos(), -0.25);
  }
  return 0.0;
}

}  // namespace

std::vector<double> dgp_sample(const DGPSpec& spec, int K, RngStream& rng) {
  if (K < 2) throw std::invalid_argument("dgp_sample: needs K >= 2");
  std::vector<double> v(static_cast<std::size_t>(K));
  for (auto& x : v) x = dgp_draw_one(spec, rng);
  return v;
}

double simulate_auction_sp(std::span<const double> valuations) {
  if (valuations.size() < 2) throw std::invalid_argument("auction needs K >= 2 bidders");
  double m1 = -std::numeric_limits<double>::infinity(), m2 = m1;
  for (const double v : valuations) {
    if (v > m1) {
      m2 = m1;
      m1 = v;
    } else if (v > m2) {
      m2 = v;
    }
  }
  return m2;
}

double fp_equilibrium_bid(const DGPSpec& spec, double v, int K) {
  if (K < 2) throw std::invalid_argument("fp bid needs K >= 2");
  if (!(v > spec.v_lower)) return v;
  if (spec.family == DgpFamily::uniform_0_3 && v <= 3.0) return v - v / K;  // closed form
  // shading = int_{vL}^{v} (F(u)/F(v))^{K-1} du, log-domain quadrature
  static const QuadratureRule gl = gauss_legendre(kDefaultFiniteNodes);
  const double lfv = std::log(dgp_cdf(spec, v));
  const double mid = 0.5 * (spec.v_lower + v);
  const double half = 0.5 * (v - spec.v_lower);
  double shading = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double u = mid + half * gl.nodes[i];
    const double lf = std::log(dgp_cdf(spec, u));
    shading += 0.5 * gl.weights[i] * std::exp((K - 1.0) * (lf - lfv));
  }
  return v - (v - spec.v_lower) * shading;
}

double simulate_auction_fp(std::span<const double> valuations, const DGPSpec& spec) {
  if (valuations.size() < 2) throw std::invalid_argument("auction needs K >= 2 bidders");
  const double v1 = *std::max_element(valuations.begin(), valuations.end());
  return fp_equilibrium_bid(spec, v1, static_cast<int>(valuations.size()));
}

std::string KSpec::label() const {
  if (!random()) return "K=" + std::to_string(lo);
  return "K~U{" + std::to_string(lo) + ".." + std::to_string(hi) + "}";
}

namespace {

// int_{vL}^inf g(F(v)) dv with the rational map v = vL + t/(1-t)
double integral_tail(const DGPSpec& spec, const std::function<double(double)>& g_of_F) {
  static const QuadratureRule gl = gauss_legendre(400);
  const double upper = spec.family == DgpFamily::uniform_0_3 ? 3.0
                                                             : std::numeric_limits<double>::infinity();
  double sum = 0.0;
  if (std::isfinite(upper)) {
    const double mid = 0.5 * (spec.v_lower + upper), half = 0.5 * (upper - spec.v_lower);
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double v = mid + half * gl.nodes[i];
      sum += half * gl.weights[i] * g_of_F(dgp_cdf(spec, v));
    }
    return sum;
  }
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double t = 0.5 * (gl.nodes[i] + 1.0);
    const double omt = 1.0 - t;
    const double v = spec.v_lower + t / omt;
    sum += 0.5 * gl.weights[i] * g_of_F(dgp_cdf(spec, v)) / (omt * omt);
  }
  return sum;
}

void require_moments(const DGPSpec& spec) {
  if (!(spec.implied_xi < 1.0))
    throw std::domain_error("DGP has divergent mean (xi >= 1): " + spec.name);
}

}  // namespace

double true_mu(const DGPSpec& spec, int K) {
  require_moments(spec);
  // mu_K = K int F^{K-1} (1 - F) dv
  return K * integral_tail(spec, [&](double F) {
           return F <= 0.0 ? 0.0 : std::exp((K - 1.0) * std::log(F)) * (1.0 - F);
         });
}

double true_pi(const DGPSpec& spec, int K) {
  require_moments(spec);
  // pi_K = E[V_(2)] = vL + int_{vL}^inf (1 - K F^{K-1} + (K-1) F^K) dv
  return spec.v_lower + integral_tail(spec, [&](double F) {
           if (F <= 0.0) return 1.0;
           const double fk1 = std::exp((K - 1.0) * std::log(F));
           return 1.0 - K * fk1 + (K - 1.0) * fk1 * F;
         });
}

double true_mu(const DGPSpec& spec, const KSpec& ks) {
  double sum = 0.0;
  for (int k = ks.lo; k <= ks.hi; ++k) sum += true_mu(spec, k);
  return sum / (ks.hi - ks.lo + 1);
}

double true_pi(const DGPSpec& spec, const KSpec& ks) {
  double sum = 0.0;
  for (int k = ks.lo; k <= ks.hi; ++k) sum += true_pi(spec, k);
  return sum / (ks.hi - ks.lo + 1);
}

SimpleCI ci_tstat_comparator(std::span<const double> gaps, double alpha) {
  const std::size_t n = gaps.size();
  if (n < 2) throw std::invalid_argument("t-statistic CI needs n >= 2");
  double mean = 0.0;
  for (const double d : gaps) mean += d;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (const double d : gaps) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / (static_cast<double>(n) - 1.0));
  const double zq = inverse_normal_cdf(1.0 - alpha / 2.0);
  const double half = zq * sd / std::sqrt(static_cast<double>(n));
  return {mean - half, mean + half};
}

double invert_price_cdf_sp(double p, int K) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  // g(F) = K F^{K-1} - (K-1) F^K is increasing on [0,1]; bisection is exact
  // enough at any magnitude (the log-scale flat region defeats Newton)
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double f = 0.5 * (lo + hi);
    const double fk1 = std::pow(f, K - 1);
    if (K * fk1 - (K - 1.0) * fk1 * f > p)
      hi = f;
    else
      lo = f;
  }
  return 0.5 * (lo + hi);
}

double bootstrap_sp_estimate(std::span<const double> prices, int K) {
  std::vector<double> sorted(prices.begin(), prices.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  // mu-hat = K sum_i (P_(i+1) - P_(i)) Fv_i^{K-1} (1 - Fv_i), Fv_i = g^{-1}(i/n)
  double mu = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double fv = invert_price_cdf_sp(static_cast<double>(i) / n, K);
    mu += (sorted[i] - sorted[i - 1]) * std::pow(fv, K - 1) * (1.0 - fv);
  }
  return K * mu;
}

namespace {

SimpleCI percentile_interval(std::vector<double>& stats, double alpha) {
  std::sort(stats.begin(), stats.end());
  const auto at = [&](double q) {
    const double pos = q * (stats.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    const double frac = pos - i;
    return i + 1 < stats.size() ? (1.0 - frac) * stats[i] + frac * stats[i + 1] : stats[i];
  };
  return {at(alpha / 2.0), at(1.0 - alpha / 2.0)};
}

}  // namespace

SimpleCI ci_bootstrap_sp(std::span<const double> prices, int K, double alpha, int B_boot,
                         RngStream& rng) {
  const std::size_t n = prices.size();
  if (n < 2) throw std::invalid_argument("bootstrap CI needs n >= 2");
  std::vector<double> stats(static_cast<std::size_t>(B_boot));
  std::vector<double> resample(n);
  for (int b = 0; b < B_boot; ++b) {
    for (auto& x : resample) x = prices[static_cast<std::size_t>(rng.uniform_int(0, n - 1))];
    stats[static_cast<std::size_t>(b)] = bootstrap_sp_estimate(resample, K);
  }
  return percentile_interval(stats, alpha);
}

double bootstrap_fp_estimate(std::span<const double> highest_valuations, int K) {
  std::vector<double> sorted(highest_valuations.begin(), highest_valuations.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  // F_V = (i/n)^{1/K}; mu-hat = K sum_i (V_(i+1) - V_(i)) (1 - Fv_i) Fv_i^{K-1}
  double mu = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double fv = std::pow(static_cast<double>(i) / n, 1.0 / K);
    mu += (sorted[i] - sorted[i - 1]) * (1.0 - fv) * std::pow(fv, K - 1);
  }
  return K * mu;
}

SimpleCI ci_bootstrap_fp(std::span<const double> highest_valuations, int K, double alpha,
                         int B_boot, RngStream& rng) {
  const std::size_t n = highest_valuations.size();
  if (n < 2) throw std::invalid_argument("bootstrap CI needs n >= 2");
  std::vector<double> stats(static_cast<std::size_t>(B_boot));
  std::vector<double> resample(n);
  for (int b = 0; b < B_boot; ++b) {
    for (auto& x : resample)
      x = highest_valuations[static_cast<std::size_t>(rng.uniform_int(0, n - 1))];
    stats[static_cast<std::size_t>(b)] = bootstrap_fp_estimate(resample, K);
  }
  return percentile_interval(stats, alpha);
}

const char* to_string(CiMethod m) {
  switch (m) {
    case CiMethod::ours: return "ours";
    case CiMethod::tstat: return "tstat";
    case CiMethod::bootstrap: return "bootstrap";
  }
  return "?";
}

namespace {

struct RepDraw {
  std::vector<double> prices;
  std::vector<double> gaps;     // method (ii) data
  std::vector<double> highest;  // method (iii) fp data
};

RepDraw simulate_dataset(const ExperimentDesign& d, RngStream& rng) {
  RepDraw out;
  out.prices.reserve(static_cast<std::size_t>(d.n));
  out.gaps.reserve(static_cast<std::size_t>(d.n));
  out.highest.reserve(static_cast<std::size_t>(d.n));
  for (int j = 0; j < d.n; ++j) {
    const int K = d.k.random() ? static_cast<int>(rng.uniform_int(d.k.lo, d.k.hi)) : d.k.lo;
    const std::vector<double> v = dgp_sample(d.dgp, K, rng);
    double m1 = -std::numeric_limits<double>::infinity(), m2 = m1;
    for (const double x : v) {
      if (x > m1) {
        m2 = m1;
        m1 = x;
      } else if (x > m2) {
        m2 = x;
      }
    }
    double price;
    if (d.format == AuctionFormat::second_price) {
      price = m2;
      out.gaps.push_back(m1 - m2);
    } else {
      price = fp_equilibrium_bid(d.dgp, m1, K);
      out.gaps.push_back(m1 - price);
    }
    out.prices.push_back(price);
    out.highest.push_back(m1);
  }
  return out;
}

}  // namespace

ExperimentReport run_coverage_experiment(const ExperimentDesign& design,
                                         const std::vector<CiMethod>& methods, int reps,
                                         const WeightTable* table, const RngStream& rng) {
  if (reps < 0) throw std::invalid_argument("reps must be nonnegative");
  ExperimentReport report;
  report.seed = rng.seed();
  if (reps == 0) return report;
  const bool winner = is_winner(design.target);
  const double truth =
      winner ? true_mu(design.dgp, design.k) : true_pi(design.dgp, design.k);
  for (const CiMethod method : methods) {
    if (method == CiMethod::ours) {
      if (table == nullptr)
        throw std::invalid_argument("method 'ours' needs a calibrated weight table");
      require_table_matches(*table, design.target, design.n, design.alpha);
    }
    if (method != CiMethod::ours && !winner)
      throw std::invalid_argument("comparator CIs are defined for the winner target only");
    std::vector<char> covered(static_cast<std::size_t>(reps));
    std::vector<double> lengths(static_cast<std::size_t>(reps));
    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t rep) {
      RngStream r = rng.substream(rep);
      const RepDraw data = simulate_dataset(design, r);
      SimpleCI ci;
      switch (method) {
        case CiMethod::ours: {
          const CIResult c = ci_for_target(data.prices, *table, design.alpha);
          ci = {c.lo, c.hi};
          break;
        }
        case CiMethod::tstat:
          ci = ci_tstat_comparator(data.gaps, design.alpha);
          break;
        case CiMethod::bootstrap: {
          if (design.format == AuctionFormat::second_price)
            ci = ci_bootstrap_sp(data.prices, design.k.nominal(), design.alpha,
                                 kDefaultBootstrapSamples, r);
          else
            ci = ci_bootstrap_fp(data.highest, design.k.nominal(), design.alpha,
                                 kDefaultBootstrapSamples, r);
          break;
        }
      }
      covered[rep] = (truth >= ci.lo && truth <= ci.hi);
      lengths[rep] = ci.hi - ci.lo;
    });
    ExperimentRow row;
    row.dgp = design.dgp.name;
    row.n = design.n;
    row.k_label = design.k.label();
    row.method = to_string(method);
    row.metric = "coverage";
    long cnt = 0;
    double len = 0.0;
    for (int i = 0; i < reps; ++i) {
      cnt += covered[static_cast<std::size_t>(i)];
      len += lengths[static_cast<std::size_t>(i)];
    }
    row.estimate = static_cast<double>(cnt) / reps;
    row.mean_length = len / reps;
    row.reps = reps;
    row.seed = rng.seed();
    report.rows.push_back(std::move(row));
  }
  return report;
}

ExperimentReport run_test_experiment(const ExperimentDesign& design, int reps,
                                     const RngStream& rng, int n_sim) {
  ExperimentReport report;
  report.seed = rng.seed();
  if (reps == 0) return report;
  const CompositeTest test(design.n, -1.0, uniform_weight(-1.0, 0.5), design.alpha,
                           rng.substream(0xA11CE), design.format, n_sim);
  std::vector<char> rejected(static_cast<std::size_t>(reps));
  parallel_for(static_cast<std::size_t>(reps), [&](std::size_t rep) {
    RngStream r = rng.substream(rep);
    const RepDraw data = simulate_dataset(design, r);
    rejected[rep] = test.reject(test.log_statistic(data.prices));
  });
  ExperimentRow row;
  row.dgp = design.dgp.name;
  row.n = design.n;
  row.k_label = design.k.label();
  row.method = "regularity_test";
  row.metric = "rejection";
  long cnt = 0;
  for (char c : rejected) cnt += c;
  row.estimate = static_cast<double>(cnt) / reps;
  row.mean_length = 0.0;
  row.reps = reps;
  row.seed = rng.seed();
  report.rows.push_back(std::move(row));
  return report;
}

std::string ExperimentReport::to_csv() const {
  std::ostringstream os;
  os << "dgp,n,K,method,metric,estimate,mean_length,reps,seed\n";
  for (const auto& r : rows) {
    os << r.dgp << ',' << r.n << ',' << r.k_label << ',' << r.method << ',' << r.metric << ','
       << r.estimate << ',' << r.mean_length << ',' << r.reps << ',' << r.seed << '\n';
  }
  return os.str();
}

std::string ExperimentReport::to_markdown() const {
  std::ostringstream os;
  os << "| dgp | n | K | method | metric | estimate | mean length | reps |\n";
  os << "|---|---|---|---|---|---|---|---|\n";
  os.setf(std::ios::fixed);
  os.precision(3);
  for (const auto& r : rows) {
    os << "| " << r.dgp << " | " << r.n << " | " << r.k_label << " | " << r.method << " | "
       << r.metric << " | " << r.estimate << " | " << r.mean_length << " | " << r.reps
       << " |\n";
  }
  return os.str();
}

std::string ExperimentReport::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({{"dgp", r.dgp},
                         {"n", r.n},
                         {"K", r.k_label},
                         {"method", r.method},
                         {"metric", r.metric},
                         {"estimate", r.estimate},
                         {"mean_length", r.mean_length},
                         {"reps", r.reps},
                         {"seed", r.seed}});
  }
  return j.dump(2);
}

}  // namespace aevt
