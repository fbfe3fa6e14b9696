#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "surecov/numeric.hpp"
#include "surecov/report.hpp"
#include "surecov/sim.hpp"

using namespace surecov;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.model = CovModel::ar_decay(20, 0.5);
  cfg.n = 30;
  cfg.replications = 12;
  cfg.penalties = {Penalty::fixed(2.0), Penalty::logn()};
  return cfg;
}

}  // namespace

TEST(Penalty, Parse) {
  EXPECT_EQ(Penalty::parse("2").value, 2.0);
  EXPECT_FALSE(Penalty::parse("3.5").log_n);
  EXPECT_TRUE(Penalty::parse("logn").log_n);
  EXPECT_DOUBLE_EQ(Penalty::parse("logn").resolve(250), std::log(250.0));
  EXPECT_THROW(Penalty::parse("1.5"), ConfigError);
  EXPECT_THROW(Penalty::parse("abc"), ConfigError);
  EXPECT_THROW(Penalty::parse("2x"), ConfigError);
  EXPECT_EQ(Penalty::logn().label(), "logn");
}

TEST(ExperimentKindNames, RoundTrip) {
  for (auto k : {ExperimentKind::table, ExperimentKind::clt, ExperimentKind::rate,
                 ExperimentKind::oracle_ratio, ExperimentKind::consistency,
                 ExperimentKind::unbiasedness}) {
    EXPECT_EQ(parse_experiment_kind(to_string(k)), k);
  }
  EXPECT_EQ(to_string(ExperimentKind::oracle_ratio), "oracle-ratio");
}

TEST(Validate, Rejections) {
  ExperimentConfig cfg = small_config();
  cfg.replications = 0;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = small_config();
  cfg.n = 3;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = small_config();
  cfg.model = CovModel::ar_decay(5, 1.5);
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = small_config();
  cfg.kind = ExperimentKind::oracle_ratio;
  cfg.replications = 0;
  EXPECT_THROW(run(cfg), ConfigError);
}

TEST(RunReplication, Deterministic) {
  const ExperimentConfig cfg = small_config();
  const ReplicationRecord a = run_replication(cfg, 4);
  const ReplicationRecord b = run_replication(cfg, 4);
  EXPECT_EQ(a.seed, b.seed);
  EXPECT_EQ(a.selected_tau, b.selected_tau);
  EXPECT_EQ(a.loss, b.loss);
  EXPECT_EQ(a.seed, derive_seed(cfg.base_seed, 4));
  EXPECT_NE(run_replication(cfg, 5).seed, a.seed);
}

TEST(RunReplication, IdentityConcentratesOnDiagonal) {
  ExperimentConfig cfg;
  cfg.model = CovModel::ar_decay(50, 0.0);
  cfg.n = 250;
  cfg.replications = 40;
  const ExperimentReport r = run_experiment(cfg);
  EXPECT_EQ(r.oracle_tau, 1);
  EXPECT_GE(r.methods[0].histogram.at(1), 30);
}

TEST(RunExperiment, SummaryInvariants) {
  ExperimentConfig cfg = small_config();
  cfg.track_loss_profile = true;
  const ExperimentReport r = run_experiment(cfg);
  ASSERT_EQ(r.methods.size(), 2u);
  for (std::size_t m = 0; m < 2; ++m) {
    Index total = 0;
    for (const auto& [tau, count] : r.methods[m].histogram) total += count;
    EXPECT_EQ(total, cfg.replications);
    std::vector<double> losses;
    for (Index k = 0; k < cfg.replications; ++k) losses.push_back(run_replication(cfg, k).loss[m]);
    const MomentSummary s = summarize(losses);
    EXPECT_NEAR(r.methods[m].mean_loss, s.mean, 1e-12 * s.mean);
    EXPECT_NEAR(r.methods[m].se_loss, std::sqrt(s.variance / cfg.replications), 1e-12 * s.mean);
  }
  // selection cannot systematically beat the best fixed tau
  const double best = *std::min_element(r.mean_loss_by_tau.begin(), r.mean_loss_by_tau.end());
  EXPECT_GE(r.methods[0].mean_loss, best - 4 * r.methods[0].se_loss);
  EXPECT_LE(r.methods[1].mean_tau, r.methods[0].mean_tau);
}

TEST(RunExperiment, SingleReplicationHasNoStandardError) {
  ExperimentConfig cfg = small_config();
  cfg.replications = 1;
  const ExperimentReport r = run_experiment(cfg);
  EXPECT_FALSE(r.se_defined);
  EXPECT_TRUE(report_to_json(r)["methods"][0]["se_loss"].is_null());
}

TEST(RunExperiment, ThreadCountDoesNotChangeReport) {
  ExperimentConfig cfg = small_config();
  cfg.threads = 1;
  const std::string one = serialize_report(run_experiment(cfg), ReportFormat::json);
  cfg.threads = 4;
  const std::string four = serialize_report(run_experiment(cfg), ReportFormat::json);
  EXPECT_EQ(one, four);
}

TEST(LogLogSlope, Cases) {
  EXPECT_NEAR(fit_loglog_slope({100, 200, 400}, {5.0, 5.0, 5.0}), 0.0, 1e-14);
  EXPECT_NEAR(fit_loglog_slope({100, 200, 400}, {1.0, 0.5, 0.25}), -1.0, 1e-14);
  EXPECT_THROW(fit_loglog_slope({100}, {1.0}), ConfigError);
}

TEST(RateExperiment, TargetSlope) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::rate;
  cfg.model = CovModel::poly_decay(30, 0.6, 0.1);
  cfg.n_list = {20, 40, 80};
  cfg.replications = 3;
  const ExperimentReport r = run(cfg);
  ASSERT_TRUE(r.rate);
  EXPECT_NEAR(r.rate->target_slope, -1.2 / 2.2, 1e-15);
  cfg.model = CovModel::ar_decay(30, 0.5);
  EXPECT_THROW(run(cfg), ConfigError);
  cfg.model = CovModel::poly_decay(30, 0.6, 0.1);
  cfg.n_list = {20, 40};
  EXPECT_THROW(run(cfg), ConfigError);
}

TEST(OracleRatio, IdentityNearOne) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::oracle_ratio;
  cfg.model = CovModel::ar_decay(60, 0.0);
  cfg.n = 100;
  cfg.replications = 40;
  const ExperimentReport r = run(cfg);
  ASSERT_TRUE(r.oracle_ratio);
  EXPECT_EQ(r.oracle_ratio->oracle_tau, 1);
  EXPECT_NEAR(r.oracle_ratio->ratio, 1.0, 0.1);
  EXPECT_GT(r.oracle_ratio->half_width, 0.0);
}

TEST(Consistency, SingletonList) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::consistency;
  cfg.model = CovModel::banded_uniform(60, 3, 0.25);
  cfg.n_list = {150};
  cfg.replications = 10;
  const ExperimentReport r = run(cfg);
  ASSERT_EQ(r.consistency.size(), 1u);
  EXPECT_EQ(r.consistency[0].k0, 3);
  EXPECT_EQ(r.consistency[0].window_hi, 3 + static_cast<Index>(std::ceil(std::log(150.0))));
  EXPECT_GE(r.consistency[0].fraction_logn, 0.8);
  cfg.model = CovModel::ar_decay(60, 0.5);
  EXPECT_THROW(run(cfg), ConfigError);
}

TEST(Clt, NeedsTwoReplications) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::clt;
  cfg.model = CovModel::banded_uniform(20, 3, 0.25);
  cfg.n = 20;
  cfg.fixed_taus = {3};
  cfg.replications = 1;
  EXPECT_THROW(run(cfg), ConfigError);
  cfg.replications = 200;
  const ExperimentReport r = run(cfg);
  ASSERT_TRUE(r.clt);
  EXPECT_EQ(r.clt->standardized.size(), 200u);
  EXPECT_EQ(r.clt->var.method, VarMethod::exact);
  // mean of the standardized statistic within 4 SE of 0
  EXPECT_LT(std::abs(r.clt->mean), 4.0 * std::sqrt(r.clt->variance / 200.0));
}

TEST(Clt, LargeDecayModelNeedsBand) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::clt;
  cfg.model = CovModel::ar_decay(80, 0.5);
  cfg.n = 20;
  cfg.replications = 5;
  cfg.fixed_taus = {2};
  EXPECT_THROW(run(cfg), ConfigError);
  cfg.truncation_band = 20;
  EXPECT_NO_THROW(run(cfg));
}

TEST(Unbiasedness, CellsPerPenaltyAndTau) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::unbiasedness;
  cfg.model = CovModel::ar_decay(6, 0.5);
  cfg.n = 12;
  cfg.replications = 3000;
  cfg.fixed_taus = {1, 3};
  cfg.penalties = {Penalty::fixed(2.0), Penalty::logn()};
  const ExperimentReport r = run(cfg);
  ASSERT_EQ(r.unbiasedness.size(), 4u);
  for (const auto& c : r.unbiasedness) EXPECT_LT(std::abs(c.z), 4.0) << c.label << " " << c.tau;
}

TEST(ParallelFor, LowestFailureWinsAndKeepsType) {
  try {
    parallel_for(50, 4, [](Index k) {
      if (k == 7 || k == 30) throw SampleSizeError("boom " + std::to_string(k));
    });
    FAIL() << "no exception";
  } catch (const SampleSizeError& e) {
    EXPECT_EQ(std::string(e.what()), "replication 7: boom 7");
  }
  std::vector<int> hits(100, 0);
  parallel_for(100, 3, [&](Index k) { hits[k] += 1; });
  EXPECT_EQ(std::accumulate(hits.begin(), hits.end(), 0), 100);
}

TEST(Presets, Parameters) {
  const ExperimentConfig t1 = table1_preset("model1-a05");
  EXPECT_EQ(t1.model.p, 500);
  EXPECT_EQ(t1.n, 250);
  EXPECT_EQ(t1.replications, 100);
  const auto* poly = std::get_if<PolyDecay>(&t1.model.variant);
  ASSERT_NE(poly, nullptr);
  EXPECT_EQ(poly->rho, 0.6);
  EXPECT_EQ(poly->alpha, 0.5);
  const ExperimentConfig fast = table1_preset("model2-r095", true);
  EXPECT_EQ(fast.model.p, 100);
  EXPECT_EQ(fast.replications, 30);
  const ExperimentConfig t2 = table2_preset(1000);
  EXPECT_EQ(t2.model.p, 1000);
  EXPECT_TRUE(t2.penalties[0].log_n);
  EXPECT_THROW(table1_preset("model9"), ConfigError);
}
