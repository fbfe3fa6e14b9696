#include "surecov/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>
#include <variant>

#include "surecov/error.hpp"
#include "surecov/numeric.hpp"

namespace surecov {

namespace {

std::vector<double> resolve_penalties(const std::vector<Penalty>& penalties, Index n) {
  std::vector<double> out;
  out.reserve(penalties.size());
  for (const Penalty& pen : penalties) out.push_back(pen.resolve(n));
  return out;
}

// Per-tau ||Sigma_hat^(tau) - Sigma||_F^2 via per-distance sums.
std::vector<double> loss_profile(const SymMatrix& sigma_tilde, const SymMatrix& sigma,
                                 const WeightScheme& scheme, const std::vector<Index>& grid) {
  const Index p = sigma.dim();
  std::vector<double> est_sq(static_cast<std::size_t>(p), 0.0);
  std::vector<double> mixed(static_cast<std::size_t>(p), 0.0);
  std::vector<double> true_sq(static_cast<std::size_t>(p), 0.0);
  for (Index d = 0; d < p; ++d) {
    const double mult = d == 0 ? 1.0 : 2.0;
    double a = 0.0, b = 0.0, c = 0.0;
    for (Index i = 0; i + d < p; ++i) {
      const double e = sigma_tilde(i + d, i);
      const double t = sigma(i + d, i);
      a += e * e;
      b += e * t;
      c += t * t;
    }
    est_sq[static_cast<std::size_t>(d)] = mult * a;
    mixed[static_cast<std::size_t>(d)] = mult * b;
    true_sq[static_cast<std::size_t>(d)] = mult * c;
  }
  std::vector<double> out;
  out.reserve(grid.size());
  for (Index tau : grid) {
    double total = 0.0;
    for (Index d = 0; d < p; ++d) {
      const auto k = static_cast<std::size_t>(d);
      const double w = scheme.weight(tau, d);
      total += w * w * est_sq[k] - 2.0 * w * mixed[k] + true_sq[k];
    }
    out.push_back(total);
  }
  return out;
}

template <class Fn>
std::vector<std::invoke_result_t<Fn, Index>> collect(Index count, Index threads, Fn fn) {
  std::vector<std::invoke_result_t<Fn, Index>> out(static_cast<std::size_t>(count));
  parallel_for(count, threads, [&](Index k) { out[static_cast<std::size_t>(k)] = fn(k); });
  return out;
}

ExperimentReport aggregate(const ExperimentContext& ctx, const std::vector<ReplicationRecord>& recs) {
  const ExperimentConfig& cfg = ctx.config;
  ExperimentReport report;
  report.config = cfg;
  report.tau_grid = ctx.tau_grid;
  report.se_defined = cfg.replications > 1;

  for (std::size_t m = 0; m < cfg.penalties.size(); ++m) {
    MethodSummary s;
    s.label = cfg.penalties[m].label();
    s.c = ctx.c_values[m];
    std::vector<double> losses;
    std::vector<double> taus;
    for (const ReplicationRecord& r : recs) {
      losses.push_back(r.loss[m]);
      taus.push_back(static_cast<double>(r.selected_tau[m]));
      ++s.histogram[r.selected_tau[m]];
    }
    const MomentSummary ms = summarize(losses);
    s.mean_loss = ms.mean;
    s.se_loss = ms.std_error;
    s.mean_tau = summarize(taus).mean;
    report.methods.push_back(std::move(s));
  }

  const RiskProfile risk = risk_profile(ctx.sigma, cfg.n, cfg.scheme, 2.0, ctx.tau_grid);
  report.oracle_tau = risk.oracle_tau;
  report.oracle_risk = *std::min_element(risk.values.begin(), risk.values.end());

  if (cfg.track_loss_profile) {
    const std::size_t g = ctx.tau_grid.size();
    std::vector<double> column(recs.size());
    for (std::size_t t = 0; t < g; ++t) {
      for (std::size_t r = 0; r < recs.size(); ++r) column[r] = recs[r].loss_profile[t];
      const MomentSummary ms = summarize(column);
      report.mean_loss_by_tau.push_back(ms.mean);
      report.se_loss_by_tau.push_back(ms.std_error);
    }
  }
  return report;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

ExperimentConfig with_n(ExperimentConfig cfg, Index n) {
  cfg.n = n;
  return cfg;
}

template <class E>
[[noreturn]] void rethrow_as(const E& e, Index rep) {
  throw E("replication " + std::to_string(rep) + ": " + e.what());
}

[[noreturn]] void rethrow_with_context(std::exception_ptr failure, Index rep) {
  try {
    std::rethrow_exception(failure);
  } catch (const NotPositiveDefiniteError& e) {
    rethrow_as(e, rep);
  } catch (const SampleSizeError& e) {
    rethrow_as(e, rep);
  } catch (const ParameterError& e) {
    rethrow_as(e, rep);
  } catch (const ConfigError& e) {
    rethrow_as(e, rep);
  } catch (const CapacityError& e) {
    rethrow_as(e, rep);
  } catch (const DimensionError& e) {
    rethrow_as(e, rep);
  } catch (const Error& e) {
    rethrow_as(e, rep);
  }
  throw;
}

}  // namespace

Penalty Penalty::parse(const std::string& text) {
  if (text == "logn" || text == "log(n)" || text == "log_n") return logn();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("penalty c must be a number or 'logn', got '" + text + "'");
  }
  if (used != text.size()) throw ConfigError("penalty c must be a number or 'logn', got '" + text + "'");
  if (!(v >= 2.0)) throw ConfigError("penalty c must be >= 2, got " + text);
  return fixed(v);
}

double Penalty::resolve(Index n) const {
  return log_n ? std::log(static_cast<double>(n)) : value;
}

std::string Penalty::label() const {
  if (log_n) return "logn";
  std::ostringstream os;
  os.precision(17);
  os << value;
  return os.str();
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::table:
      return "table";
    case ExperimentKind::clt:
      return "clt";
    case ExperimentKind::rate:
      return "rate";
    case ExperimentKind::oracle_ratio:
      return "oracle-ratio";
    case ExperimentKind::consistency:
      return "consistency";
    case ExperimentKind::unbiasedness:
      return "unbiasedness";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& text) {
  for (ExperimentKind k : {ExperimentKind::table, ExperimentKind::clt, ExperimentKind::rate,
                           ExperimentKind::oracle_ratio, ExperimentKind::consistency,
                           ExperimentKind::unbiasedness}) {
    if (to_string(k) == text) return k;
  }
  throw ConfigError("unknown experiment kind '" + text + "'");
}

void validate(const ExperimentConfig& config) {
  if (config.replications < 1) throw ConfigError("replications must be >= 1");
  if (config.n < 4) throw ConfigError("n must be >= 4");
  if (config.penalties.empty()) throw ConfigError("at least one penalty c is required");
  if (config.tau_max && *config.tau_max < 1) throw ConfigError("tau-max must be >= 1");
  for (Index n : config.n_list) {
    if (n < 4) throw ConfigError("every n in n_list must be >= 4");
  }
  try {
    surecov::validate(config.model);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
}

std::vector<Index> tau_grid_for(const ExperimentConfig& config, Index n) {
  return default_tau_grid(config.model.p, n, config.tau_max);
}

ExperimentContext::ExperimentContext(const ExperimentConfig& cfg)
    : config(cfg),
      sigma((surecov::validate(cfg), build_sigma(cfg.model))),
      sampler(sigma),
      tau_grid(tau_grid_for(cfg, cfg.n)),
      c_values(resolve_penalties(cfg.penalties, cfg.n)) {}

ReplicationRecord run_replication(const ExperimentContext& ctx, Index rep_index) {
  const ExperimentConfig& cfg = ctx.config;
  ReplicationRecord rec;
  rec.rep_index = rep_index;
  rec.seed = derive_seed(cfg.base_seed, static_cast<std::uint64_t>(rep_index));
  const Dataset data = ctx.sampler.sample(cfg.n, rec.seed);
  const SymMatrix sigma_tilde = mle_cov(data);

  for (double c : ctx.c_values) {
    CriterionProfile prof = sure_profile(sigma_tilde, sure_constants(cfg.n, c), cfg.scheme, ctx.tau_grid);
    const Index tau_hat = prof.selected_tau;
    rec.selected_tau.push_back(tau_hat);
    rec.loss.push_back(frob_sq_dist(taper(sigma_tilde, cfg.scheme, tau_hat).matrix, ctx.sigma));
    if (cfg.keep_profiles) rec.profiles.push_back(std::move(prof));
  }
  if (cfg.track_loss_profile) {
    rec.loss_profile = loss_profile(sigma_tilde, ctx.sigma, cfg.scheme, ctx.tau_grid);
  }
  return rec;
}

ReplicationRecord run_replication(const ExperimentConfig& config, Index rep_index) {
  return run_replication(ExperimentContext(config), rep_index);
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  const Stopwatch clock;
  const ExperimentContext ctx(config);
  const auto recs = collect(config.replications, config.threads,
                            [&](Index r) { return run_replication(ctx, r); });
  ExperimentReport report = aggregate(ctx, recs);
  report.wall_seconds = clock.seconds();
  return report;
}

ExperimentReport clt_experiment(const ExperimentConfig& config) {
  const Stopwatch clock;
  if (config.replications < 2) {
    throw ConfigError("the CLT experiment needs at least 2 replications (KS distance is undefined)");
  }
  if (config.fixed_taus.empty()) throw ConfigError("the CLT experiment needs a fixed tau");
  const ExperimentContext ctx(config);
  const Index tau = config.fixed_taus.front();
  const double c = ctx.c_values.front();
  const Index p = config.model.p;

  VarApprox var;
  if (p <= kVarExactCap) {
    var = var_n(ctx.sigma, config.n, config.scheme, tau, c, VarMethod::exact);
  } else {
    const std::optional<Index> band =
        config.truncation_band ? config.truncation_band : model_bandwidth(config.model);
    if (!band) {
      throw ConfigError("Var_n at p = " + std::to_string(p) +
                        " needs a truncation band; the model has no exact bandwidth");
    }
    var = var_n(ctx.sigma, config.n, config.scheme, tau, c, VarMethod::banded_truncated, band);
  }
  const double risk = risk_profile(ctx.sigma, config.n, config.scheme, c, {tau}).values.front();
  const SureConstants consts = sure_constants(config.n, c);
  const double scale = std::sqrt(var.value);

  CltSummary clt;
  clt.tau = tau;
  clt.c = c;
  clt.risk = risk;
  clt.var = var;
  clt.standardized = collect(config.replications, config.threads, [&](Index r) {
    const std::uint64_t seed = derive_seed(config.base_seed, static_cast<std::uint64_t>(r));
    const SymMatrix st = mle_cov(ctx.sampler.sample(config.n, seed));
    return (sure_value(st, consts, config.scheme, tau) - risk) / scale;
  });
  const MomentSummary ms = summarize(clt.standardized);
  clt.mean = ms.mean;
  clt.variance = ms.variance;
  clt.ks = ks_distance_normal(clt.standardized);

  ExperimentReport report;
  report.config = config;
  report.clt = std::move(clt);
  report.wall_seconds = clock.seconds();
  return report;
}

double fit_loglog_slope(const std::vector<Index>& n_list, const std::vector<double>& losses) {
  if (n_list.size() != losses.size() || n_list.size() < 2) {
    throw ConfigError("log-log fit needs matching n and loss lists of length >= 2");
  }
  std::vector<double> x, y;
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    if (!(losses[k] > 0.0)) throw ConfigError("log-log fit needs positive losses");
    x.push_back(std::log(static_cast<double>(n_list[k])));
    y.push_back(std::log(losses[k]));
  }
  return ols_slope(x, y);
}

ExperimentReport rate_experiment(const ExperimentConfig& config) {
  const Stopwatch clock;
  const auto* poly = std::get_if<PolyDecay>(&config.model.variant);
  if (poly == nullptr) throw ConfigError("the rate experiment needs a poly_decay model");
  if (config.n_list.size() < 3) throw ConfigError("the rate experiment needs at least 3 sample sizes");

  RateSummary rate;
  rate.alpha = poly->alpha;
  rate.target_slope = -(2.0 * poly->alpha + 1.0) / (2.0 * (poly->alpha + 1.0));
  rate.n_list = config.n_list;
  ExperimentReport report;
  for (Index n : config.n_list) {
    ExperimentConfig sub = with_n(config, n);
    sub.penalties = {Penalty::fixed(2.0)};
    const ExperimentReport r = run_experiment(sub);
    rate.mean_loss.push_back(r.methods.front().mean_loss);
    rate.se_loss.push_back(r.methods.front().se_loss);
    rate.min_risk.push_back(r.oracle_risk);
  }
  rate.slope = fit_loglog_slope(rate.n_list, rate.mean_loss);
  report.config = config;
  report.rate = std::move(rate);
  report.wall_seconds = clock.seconds();
  return report;
}

ExperimentReport oracle_ratio_experiment(const ExperimentConfig& config) {
  if (config.replications < 1) throw ConfigError("replications must be >= 1");
  ExperimentConfig cfg = config;
  cfg.penalties = {Penalty::fixed(2.0)};
  ExperimentReport report = run_experiment(cfg);
  report.config = config;
  OracleRatioSummary o;
  o.oracle_tau = report.oracle_tau;
  o.oracle_risk = report.oracle_risk;
  o.mean_loss = report.methods.front().mean_loss;
  o.ratio = o.mean_loss / o.oracle_risk;
  o.half_width = 1.96 * report.methods.front().se_loss / o.oracle_risk;
  report.oracle_ratio = o;
  return report;
}

ExperimentReport consistency_experiment(const ExperimentConfig& config) {
  const Stopwatch clock;
  const std::optional<Index> k0 = model_bandwidth(config.model);
  if (!k0) throw ConfigError("the consistency experiment needs a model with an exact bandwidth");
  const std::vector<Index> ns = config.n_list.empty() ? std::vector<Index>{config.n} : config.n_list;

  ExperimentReport report;
  report.config = config;
  for (Index n : ns) {
    ExperimentConfig sub = with_n(config, n);
    sub.penalties = {Penalty::logn(), Penalty::fixed(2.0)};
    const ExperimentReport r = run_experiment(sub);
    ConsistencyPoint pt;
    pt.n = n;
    pt.k0 = *k0;
    pt.window_hi = *k0 + static_cast<Index>(std::ceil(std::log(static_cast<double>(n))));
    pt.histogram_logn = r.methods[0].histogram;
    pt.histogram_two = r.methods[1].histogram;
    Index exact = 0, inside = 0;
    for (const auto& [tau, count] : pt.histogram_logn) {
      if (tau == *k0) exact += count;
    }
    for (const auto& [tau, count] : pt.histogram_two) {
      if (tau >= *k0 && tau <= pt.window_hi) inside += count;
    }
    const double reps = static_cast<double>(config.replications);
    pt.fraction_logn = static_cast<double>(exact) / reps;
    pt.fraction_window = static_cast<double>(inside) / reps;
    report.consistency.push_back(std::move(pt));
  }
  report.wall_seconds = clock.seconds();
  return report;
}

ExperimentReport unbiasedness_experiment(const ExperimentConfig& config) {
  const Stopwatch clock;
  const ExperimentContext ctx(config);
  const Index n = config.n;
  const std::vector<Index>& taus = config.fixed_taus;
  if (taus.empty()) throw ConfigError("the unbiasedness experiment needs fixed taus");

  std::vector<SureConstants> consts;
  for (double c : ctx.c_values) consts.push_back(sure_constants(n, c));
  // One flat row of SURE values per replication: penalty-major, then tau.
  const auto rows = collect(config.replications, config.threads, [&](Index r) {
    const std::uint64_t seed = derive_seed(config.base_seed, static_cast<std::uint64_t>(r));
    const SymMatrix st = mle_cov(ctx.sampler.sample(n, seed));
    std::vector<double> row;
    for (const SureConstants& k : consts) {
      const CriterionProfile prof = sure_profile(st, k, config.scheme, taus);
      row.insert(row.end(), prof.values.begin(), prof.values.end());
    }
    return row;
  });

  ExperimentReport report;
  report.config = config;
  std::vector<double> column(rows.size());
  for (std::size_t m = 0; m < consts.size(); ++m) {
    const RiskProfile risk = risk_profile(ctx.sigma, n, config.scheme, consts[m].c, taus);
    for (std::size_t t = 0; t < taus.size(); ++t) {
      for (std::size_t r = 0; r < rows.size(); ++r) column[r] = rows[r][m * taus.size() + t];
      const MomentSummary ms = summarize(column);
      UnbiasednessCell cell;
      cell.c = consts[m].c;
      cell.label = config.penalties[m].label();
      cell.tau = taus[t];
      cell.mean = ms.mean;
      cell.se = ms.std_error;
      cell.risk = risk.values[t];
      cell.z = ms.std_error > 0.0 ? (ms.mean - cell.risk) / ms.std_error : 0.0;
      report.unbiasedness.push_back(cell);
    }
  }
  report.wall_seconds = clock.seconds();
  return report;
}

ExperimentReport run(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::table:
      return run_experiment(config);
    case ExperimentKind::clt:
      return clt_experiment(config);
    case ExperimentKind::rate:
      return rate_experiment(config);
    case ExperimentKind::oracle_ratio:
      return oracle_ratio_experiment(config);
    case ExperimentKind::consistency:
      return consistency_experiment(config);
    case ExperimentKind::unbiasedness:
      return unbiasedness_experiment(config);
  }
  throw ConfigError("unknown experiment kind");
}

void parallel_for(Index count, Index threads, const std::function<void(Index)>& fn) {
  if (count <= 0) return;
  const Index workers = std::max<Index>(1, std::min(threads, count));
  std::atomic<Index> next{0};
  std::mutex guard;
  Index failed_at = count;
  std::exception_ptr failure;

  const auto work = [&] {
    for (Index k = next++; k < count; k = next++) {
      try {
        fn(k);
      } catch (...) {
        std::lock_guard lock(guard);
        if (k < failed_at) {
          failed_at = k;
          failure = std::current_exception();
        }
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (Index w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) rethrow_with_context(failure, failed_at);
}

Index resolve_threads(Index requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SURECOV_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<Index>(v);
  }
  return std::max<Index>(1, static_cast<Index>(std::thread::hardware_concurrency()));
}

std::vector<std::string> table1_variants() {
  return {"model1-a05", "model1-a01", "model2-r095", "model2-r05"};
}

ExperimentConfig table1_preset(const std::string& variant, bool fast) {
  const Index p = fast ? 100 : 500;
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::table;
  cfg.n = 250;
  cfg.replications = fast ? 30 : 100;
  cfg.penalties = {Penalty::fixed(2.0)};
  cfg.scheme = WeightScheme::banding();
  if (variant == "model1-a05") {
    cfg.model = CovModel::poly_decay(p, 0.6, 0.5);
  } else if (variant == "model1-a01") {
    cfg.model = CovModel::poly_decay(p, 0.6, 0.1);
  } else if (variant == "model2-r095") {
    cfg.model = CovModel::ar_decay(p, 0.95);
  } else if (variant == "model2-r05") {
    cfg.model = CovModel::ar_decay(p, 0.5);
  } else {
    throw ConfigError("unknown table1 variant '" + variant +
                      "' (expected model1-a05, model1-a01, model2-r095, model2-r05)");
  }
  cfg.name = "table1/" + variant + (fast ? "/fast" : "");
  return cfg;
}

ExperimentConfig table2_preset(Index p, bool fast) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::table;
  cfg.n = 250;
  cfg.replications = fast ? 30 : 100;
  cfg.model = CovModel::banded_uniform(fast ? 100 : p, 5, 0.25);
  cfg.penalties = {Penalty::logn(), Penalty::fixed(2.0)};
  cfg.scheme = WeightScheme::banding();
  cfg.name = "table2/p" + std::to_string(cfg.model.p) + (fast ? "/fast" : "");
  return cfg;
}

}  // namespace surecov
