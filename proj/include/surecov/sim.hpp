#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "surecov/criterion.hpp"
#include "surecov/estimate.hpp"
#include "surecov/model.hpp"
#include "surecov/theory.hpp"

namespace surecov {

/// Penalty multiplier c: a fixed real, or log(n) resolved per sample size.
struct Penalty {
  bool log_n = false;
  double value = 2.0;

  static Penalty fixed(double c) { return {false, c}; }
  static Penalty logn() { return {true, 0.0}; }

  /// Accepts a real number or the literal "logn".
  static Penalty parse(const std::string& text);

  double resolve(Index n) const;
  std::string label() const;
};

enum class ExperimentKind { table, clt, rate, oracle_ratio, consistency, unbiasedness };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& text);

struct ExperimentConfig {
  std::string name = "custom";
  ExperimentKind kind = ExperimentKind::table;
  CovModel model = CovModel::ar_decay(10, 0.5);
  Index n = 250;
  WeightScheme scheme = WeightScheme::banding();
  std::vector<Penalty> penalties{Penalty::fixed(2.0)};
  Index replications = 100;
  std::uint64_t base_seed = 20240101;
  std::optional<Index> tau_max;  // grid is 1..min(p, n) unless capped here
  Index threads = 1;             // execution only; never affects results

  bool keep_profiles = false;       // retain every SURE profile per replication
  bool track_loss_profile = false;  // per-tau Frobenius loss per replication

  // clt / unbiasedness
  std::vector<Index> fixed_taus{1};
  std::optional<Index> truncation_band;

  // rate / consistency
  std::vector<Index> n_list;
};

/// Throws ConfigError when the configuration cannot run.
void validate(const ExperimentConfig& config);

std::vector<Index> tau_grid_for(const ExperimentConfig& config, Index n);

/// Sigma, its Cholesky factor and the tau grid, shared by all replications.
struct ExperimentContext {
  ExperimentConfig config;
  SymMatrix sigma;
  GaussianSampler sampler;
  std::vector<Index> tau_grid;
  std::vector<double> c_values;  // resolved penalties, one per config.penalties

  explicit ExperimentContext(const ExperimentConfig& cfg);
};

struct ReplicationRecord {
  Index rep_index = 0;
  std::uint64_t seed = 0;
  std::vector<Index> selected_tau;  // per penalty
  std::vector<double> loss;         // ||Sigma_hat^(tau_hat) - Sigma||_F^2 per penalty
  std::vector<CriterionProfile> profiles;  // when keep_profiles
  std::vector<double> loss_profile;        // per grid tau, when track_loss_profile
};

ReplicationRecord run_replication(const ExperimentContext& ctx, Index rep_index);
ReplicationRecord run_replication(const ExperimentConfig& config, Index rep_index);

struct MethodSummary {
  std::string label;  // penalty label, "2" or "logn"
  double c = 2.0;
  double mean_loss = 0.0;
  double se_loss = 0.0;
  double mean_tau = 0.0;
  std::map<Index, Index> histogram;  // selected tau -> count
};

struct CltSummary {
  Index tau = 1;
  double c = 2.0;
  double risk = 0.0;  // R_c(tau)
  VarApprox var;
  double mean = 0.0;
  double variance = 0.0;
  double ks = 0.0;
  std::vector<double> standardized;
};

struct RateSummary {
  double alpha = 0.0;
  double target_slope = 0.0;
  std::vector<Index> n_list;
  std::vector<double> mean_loss;
  std::vector<double> se_loss;
  std::vector<double> min_risk;
  double slope = 0.0;
};

struct OracleRatioSummary {
  Index oracle_tau = 1;
  double oracle_risk = 0.0;
  double mean_loss = 0.0;
  double ratio = 0.0;
  double half_width = 0.0;  // 1.96 SE / R(tau_0)
};

struct ConsistencyPoint {
  Index n = 0;
  Index k0 = 0;
  Index window_hi = 0;            // k0 + ceil(log n)
  double fraction_logn = 0.0;     // tau_hat(c = log n) == k0
  double fraction_window = 0.0;   // k0 <= tau_hat(c = 2) <= window_hi
  std::map<Index, Index> histogram_logn;
  std::map<Index, Index> histogram_two;
};

struct UnbiasednessCell {
  double c = 2.0;
  std::string label;
  Index tau = 1;
  double mean = 0.0;
  double se = 0.0;
  double risk = 0.0;  // R_c(tau)
  double z = 0.0;     // (mean - risk) / se
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<MethodSummary> methods;
  bool se_defined = true;  // false when replications == 1
  Index oracle_tau = 1;
  double oracle_risk = 0.0;           // min_tau E||Sigma_hat^(tau) - Sigma||_F^2
  std::vector<Index> tau_grid;
  std::vector<double> mean_loss_by_tau;  // when track_loss_profile
  std::vector<double> se_loss_by_tau;
  double wall_seconds = 0.0;  // never serialized unless timing is requested

  std::optional<CltSummary> clt;
  std::optional<RateSummary> rate;
  std::optional<OracleRatioSummary> oracle_ratio;
  std::vector<ConsistencyPoint> consistency;
  std::vector<UnbiasednessCell> unbiasedness;
};

/// Runs all replications (possibly in parallel) and aggregates them in
/// replication order.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Standardized (SURE_c(tau) - R_c(tau)) / sqrt(Var_n(tau)) per replication,
/// with its mean, variance and KS distance to N(0, 1). Uses the first
/// fixed tau and first penalty.
ExperimentReport clt_experiment(const ExperimentConfig& config);

/// Mean SURE_2-tuned loss per n and its least-squares log-log slope. The
/// config's model must be poly_decay; n comes from n_list.
ExperimentReport rate_experiment(const ExperimentConfig& config);

/// Mean SURE-tuned loss relative to the oracle risk min_tau R(tau).
ExperimentReport oracle_ratio_experiment(const ExperimentConfig& config);

/// Bandwidth recovery of SURE_logn and the SURE_2 window per n in n_list.
ExperimentReport consistency_experiment(const ExperimentConfig& config);

/// Monte Carlo mean of SURE_c(tau) against R_c(tau) for every penalty and
/// every fixed tau.
ExperimentReport unbiasedness_experiment(const ExperimentConfig& config);

/// Dispatches on config.kind.
ExperimentReport run(const ExperimentConfig& config);

/// Least-squares slope of log(loss) on log(n).
double fit_loglog_slope(const std::vector<Index>& n_list, const std::vector<double>& losses);

/// Calls fn(k) for k in [0, count) on up to `threads` workers. If any call
/// throws, the exception of the lowest failing k is rethrown.
void parallel_for(Index count, Index threads, const std::function<void(Index)>& fn);

/// 0 -> SURECOV_THREADS from the environment, else hardware concurrency.
Index resolve_threads(Index requested);

/// Preset variants: model1-a05, model1-a01, model2-r095, model2-r05.
std::vector<std::string> table1_variants();
ExperimentConfig table1_preset(const std::string& variant, bool fast = false);
ExperimentConfig table2_preset(Index p, bool fast = false);

}  // namespace surecov
