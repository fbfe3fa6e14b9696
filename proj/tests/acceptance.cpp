// Acceptance checks. Each criterion prints one PASS/FAIL line; the process
// exits non-zero if any selected criterion fails.
//
//   acceptance                 run all criteria
//   acceptance --criterion 5   run one

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "surecov/criterion.hpp"
#include "surecov/model.hpp"
#include "surecov/numeric.hpp"
#include "surecov/report.hpp"
#include "surecov/sim.hpp"
#include "surecov/theory.hpp"

using namespace surecov;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

bool within(double value, double center, double half) { return std::abs(value - center) <= half; }

bool within_rel(double value, double target, double rel) {
  return std::abs(value - target) <= rel * std::abs(target);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Table1Run {
  std::string variant;
  double mean = 0.0;
  double se = 0.0;
  double risk = 0.0;
  Index tau0 = 1;
  double secs = 0.0;
};

Table1Run run_table1(const std::string& variant) {
  ExperimentConfig cfg = table1_preset(variant);
  cfg.threads = resolve_threads(0);
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentReport r = run_experiment(cfg);
  return {variant, r.methods.front().mean_loss, r.methods.front().se_loss, r.oracle_risk,
          r.oracle_tau, seconds_since(t0)};
}

// Mean loss within 3 published SEs and min risk within 5% of the target.
Outcome judge_table1(const Table1Run& run, double loss, double se, double risk) {
  const bool ok_loss = within(run.mean, loss, 3 * se);
  const bool ok_risk = within_rel(run.risk, risk, 0.05);
  std::ostringstream d;
  d << run.variant << ": mean loss " << fmt("%.2f", run.mean) << " (SE " << fmt("%.2f", run.se)
    << ", target " << loss << " +/- " << fmt("%.2f", 3 * se) << "), min risk " << fmt("%.2f", run.risk)
    << " at tau " << run.tau0 << " (target " << risk << " +/- 5%), " << fmt("%.1f", run.secs) << " s";
  return {ok_loss && ok_risk && run.secs < 300.0, d.str()};
}

void info(const std::string& text) { std::cout << "INFO " << text << '\n'; }

// The same run judged against the row with the alpha labels exchanged;
// reported, not gated.
void swapped_info(const Table1Run& run, double loss, double se, double risk) {
  const Outcome o = judge_table1(run, loss, se, risk);
  info(std::string("swapped-label row ") + (o.pass ? "matches" : "does not match") + ": " + o.detail);
}

Outcome criterion1() {
  const Table1Run run = run_table1("model1-a05");
  swapped_info(run, 30.20, 0.67, 30.16);
  return judge_table1(run, 57.57, 0.89, 58.83);
}

Outcome criterion2() {
  const Table1Run run = run_table1("model1-a01");
  swapped_info(run, 57.57, 0.89, 58.83);
  return judge_table1(run, 30.20, 0.67, 30.16);
}

Outcome criterion3() {
  const Outcome a = judge_table1(run_table1("model2-r095"), 273.48, 6.51, 275.06);
  const Outcome b = judge_table1(run_table1("model2-r05"), 22.675, 0.71, 22.37);
  return {a.pass && b.pass, a.detail + "; " + b.detail};
}

Outcome criterion4() {
  bool pass = true;
  std::ostringstream d;
  for (Index p : {500, 1000}) {
    ExperimentConfig cfg = table2_preset(p);
    cfg.threads = resolve_threads(0);
    const ExperimentReport r = run_experiment(cfg);
    const auto& h = r.methods.front().histogram;
    const Index hits = h.count(5) ? h.at(5) : 0;
    pass = pass && hits >= 98;
    d << "p=" << p << ": tau_hat=5 in " << hits << "/" << cfg.replications << "; ";
  }
  d << "need >= 98";
  return {pass, d.str()};
}

Outcome criterion5() {
  std::mt19937_64 rng(5);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Index p = 1 + static_cast<Index>(rng() % 30);
    const Index n = 4 + static_cast<Index>(rng() % 60);
    const SymMatrix sigma = build_sigma(CovModel::ar_decay(p, 0.9 * std::uniform_real_distribution<double>(-1, 1)(rng)));
    const SymMatrix s = mle_cov(sample_dataset(sigma, n, rng()));
    const WeightScheme scheme = rng() % 2 ? WeightScheme::czz_taper() : WeightScheme::banding();
    const int pick = static_cast<int>(rng() % 3);
    const double c = pick == 0 ? 2.0 : pick == 1 ? std::max(2.0, std::log(static_cast<double>(n))) : 5.0;
    const Index tau = 1 + static_cast<Index>(rng() % p);
    const SureConstants k = sure_constants(n, c);
    const double fast = sure_profile(s, k, scheme, {tau}).values.front();
    const double ref = sure_eq2_reference(s, k, scheme, tau);
    worst = std::max(worst, std::abs(fast - ref) / std::max(std::abs(ref), 1e-300));
  }
  return {worst <= 1e-10, "1000 random cases, worst relative gap " + fmt("%.3g", worst) + " (limit 1e-10)"};
}

Outcome criterion6() {
  ExperimentConfig cfg;
  cfg.name = "unbiasedness";
  cfg.kind = ExperimentKind::unbiasedness;
  cfg.model = CovModel::ar_decay(10, 0.5);
  cfg.n = 20;
  cfg.penalties = {Penalty::fixed(2.0), Penalty::logn()};
  cfg.fixed_taus = {1, 3, 5, 10};
  cfg.replications = 200000;
  cfg.threads = resolve_threads(0);
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentReport r = run(cfg);
  const double secs = seconds_since(t0);
  bool pass = secs < 120.0;
  double worst = 0.0;
  for (const auto& cell : r.unbiasedness) {
    worst = std::max(worst, std::abs(cell.z));
    pass = pass && std::abs(cell.z) <= 4.0;
  }
  return {pass, std::to_string(r.unbiasedness.size()) + " cells, worst |mean - R_c| / SE = " +
                    fmt("%.2f", worst) + " (limit 4), " + fmt("%.1f", secs) + " s"};
}

Outcome criterion7() {
  const SymMatrix eye = SymMatrix::identity(3);
  std::vector<double> gaps;
  std::ostringstream d;
  for (Index n : {25, 50, 100}) {
    const double exact = exact_sure_variance(eye, n, WeightScheme::banding(), 1, 2.0);
    const double approx = var_n(eye, n, WeightScheme::banding(), 1, 2.0, VarMethod::exact).value;
    const double ratio = approx / exact;
    gaps.push_back(std::abs(ratio - 1.0));
    d << "n=" << n << " ratio " << fmt("%.4f", ratio) << "; ";
  }
  const bool monotone = gaps[0] > gaps[1] && gaps[1] > gaps[2];
  d << "need |ratio-1| <= 0.15 at n=100 and shrinking";
  return {gaps[2] <= 0.15 && monotone, d.str()};
}

Outcome criterion8() {
  ExperimentConfig cfg;
  cfg.name = "clt";
  cfg.kind = ExperimentKind::clt;
  cfg.model = CovModel::banded_uniform(200, 5, 0.25);
  cfg.n = 100;
  cfg.fixed_taus = {6};
  cfg.penalties = {Penalty::fixed(2.0)};
  cfg.replications = 2000;
  cfg.threads = resolve_threads(0);
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentReport r = run(cfg);
  const double secs = seconds_since(t0);
  const CltSummary& c = *r.clt;
  const bool pass = std::abs(c.mean) < 0.1 && c.variance >= 0.8 && c.variance <= 1.25 && c.ks < 0.06 &&
                    secs < 600.0;
  return {pass, "mean " + fmt("%.4f", c.mean) + " (|.| < 0.1), variance " + fmt("%.4f", c.variance) +
                    " (in [0.8, 1.25]), KS " + fmt("%.4f", c.ks) + " (< 0.06), Var_n " +
                    to_string(c.var.method) + ", " + fmt("%.1f", secs) + " s"};
}

Outcome criterion9() {
  bool pass = true;
  std::ostringstream d;
  for (Index k0 : {3, 4, 5}) {
    const SymMatrix sigma = build_sigma(CovModel::banded_uniform(500, k0, 0.25));
    const auto grid = default_tau_grid(500, 250);
    const Index band = risk_profile(sigma, 250, WeightScheme::banding(), 2.0, grid).oracle_tau;
    const Index taper = risk_profile(sigma, 250, WeightScheme::czz_taper(), 2.0, grid).oracle_tau;
    pass = pass && band == k0 && taper == 2 * k0 - 3;
    d << "k0=" << k0 << ": banding " << band << " (want " << k0 << "), czz " << taper << " (want "
      << 2 * k0 - 3 << "); ";
  }
  return {pass, d.str()};
}

Outcome criterion10() {
  ExperimentConfig cfg;
  cfg.name = "window";
  cfg.model = CovModel::banded_uniform(500, 5, 0.25);
  cfg.n = 250;
  cfg.penalties = {Penalty::fixed(2.0)};
  cfg.replications = 100;
  cfg.threads = resolve_threads(0);
  const ExperimentReport r = run_experiment(cfg);
  const Index hi = 5 + static_cast<Index>(std::ceil(std::log(250.0)));
  Index inside = 0;
  for (const auto& [tau, count] : r.methods.front().histogram) {
    if (tau >= 5 && tau <= hi) inside += count;
  }
  return {inside >= 95, "tau_hat in [5, " + std::to_string(hi) + "] in " + std::to_string(inside) +
                            "/100 (need >= 95)"};
}

Outcome criterion11() {
  ExperimentConfig cfg;
  cfg.name = "rate";
  cfg.kind = ExperimentKind::rate;
  cfg.model = CovModel::poly_decay(500, 0.6, 0.5);
  cfg.n_list = {100, 200, 400};
  cfg.replications = 50;
  cfg.threads = resolve_threads(0);
  const ExperimentReport r = run(cfg);
  const RateSummary& s = *r.rate;
  std::ostringstream d;
  d << "mean loss";
  for (std::size_t k = 0; k < s.n_list.size(); ++k) {
    d << " n=" << s.n_list[k] << ":" << fmt("%.2f", s.mean_loss[k]);
  }
  d << "; slope " << fmt("%.4f", s.slope) << " (target " << fmt("%.4f", s.target_slope) << " +/- 0.15)";
  return {within(s.slope, -2.0 / 3.0, 0.15), d.str()};
}

Outcome criterion12() {
  ExperimentConfig cfg;
  cfg.name = "oracle-ratio";
  cfg.kind = ExperimentKind::oracle_ratio;
  cfg.model = CovModel::poly_decay(2000, 0.6, 0.5);
  cfg.n = 100;
  cfg.replications = 100;
  cfg.threads = resolve_threads(0);
  const ExperimentReport r = run(cfg);
  const OracleRatioSummary& o = *r.oracle_ratio;
  return {o.ratio >= 0.9 && o.ratio <= 1.1,
          "mean loss " + fmt("%.3f", o.mean_loss) + " / R(tau_0=" + std::to_string(o.oracle_tau) +
              ") " + fmt("%.3f", o.oracle_risk) + " = " + fmt("%.4f", o.ratio) + " +/- " +
              fmt("%.4f", o.half_width) + " (need [0.9, 1.1])"};
}

Outcome criterion13() {
  std::vector<ExperimentConfig> configs;
  {
    ExperimentConfig cfg = table1_preset("model1-a05", true);
    cfg.penalties = {Penalty::fixed(2.0), Penalty::logn()};
    cfg.track_loss_profile = true;
    configs.push_back(cfg);
  }
  {
    ExperimentConfig cfg;
    cfg.name = "clt-small";
    cfg.kind = ExperimentKind::clt;
    cfg.model = CovModel::banded_uniform(80, 3, 0.25);
    cfg.n = 40;
    cfg.fixed_taus = {4};
    cfg.replications = 60;
    configs.push_back(cfg);
  }
  {
    ExperimentConfig cfg;
    cfg.name = "consistency-small";
    cfg.kind = ExperimentKind::consistency;
    cfg.model = CovModel::banded_uniform(100, 5, 0.25);
    cfg.n_list = {60, 120};
    cfg.replications = 20;
    configs.push_back(cfg);
  }
  bool pass = true;
  std::ostringstream d;
  for (ExperimentConfig cfg : configs) {
    std::string first;
    for (Index threads : {1, 2, 4, 7}) {
      cfg.threads = threads;
      const ExperimentReport r = run(cfg);
      const std::string text =
          serialize_report(r, ReportFormat::json) + serialize_report(r, ReportFormat::csv);
      if (threads == 1) {
        first = text;
      } else if (text != first) {
        pass = false;
        d << cfg.name << " differs at " << threads << " threads; ";
      }
    }
    d << cfg.name << " compared at 1/2/4/7 threads; ";
  }
  d << (pass ? "all byte-identical" : "MISMATCH");
  return {pass, d.str()};
}

const std::vector<std::function<Outcome()>>& criteria() {
  static const std::vector<std::function<Outcome()>> all = {
      criterion1, criterion2, criterion3,  criterion4,  criterion5,  criterion6,  criterion7,
      criterion8, criterion9, criterion10, criterion11, criterion12, criterion13};
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int a = 1; a < argc; ++a) {
    const std::string arg = argv[a];
    if (arg == "--criterion" && a + 1 < argc) {
      selected.push_back(std::atoi(argv[++a]));
    } else {
      std::cerr << "usage: acceptance [--criterion N]...\n";
      return 2;
    }
  }
  if (selected.empty()) {
    for (int k = 1; k <= static_cast<int>(criteria().size()); ++k) selected.push_back(k);
  }
  int failures = 0;
  for (int k : selected) {
    if (k < 1 || k > static_cast<int>(criteria().size())) {
      std::cerr << "no criterion " << k << '\n';
      return 2;
    }
    Outcome o;
    try {
      o = criteria()[static_cast<std::size_t>(k - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << k << ": " << o.detail << std::endl;
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
