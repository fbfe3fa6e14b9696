#include "surecov/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "surecov/criterion.hpp"
#include "surecov/error.hpp"
#include "surecov/estimate.hpp"
#include "surecov/io.hpp"
#include "surecov/model.hpp"
#include "surecov/numeric.hpp"
#include "surecov/report.hpp"
#include "surecov/sim.hpp"
#include "surecov/theory.hpp"

namespace surecov::cli {

namespace {

using nlohmann::json;

struct ModelFlags {
  std::string kind = "banded";
  Index p = 100;
  double rho = 0.5;
  double alpha = 0.5;
  Index k0 = 5;
  double offdiag = 0.25;
  bool unit_diagonal = false;
  std::string sigma_file;
};

struct RunFlags {
  Index n = 250;
  std::string scheme = "banding";
  std::vector<std::string> c{"2"};
  Index tau_max = 0;  // 0: default grid
  std::uint64_t seed = 20240101;
  Index replications = 100;
  Index threads = 0;
  std::string format = "json";
  std::string output;
  bool timing = false;
};

// Options given on the command line win; the rest may come from a flat
// `key = value` file whose keys are long flag names without dashes.
void apply_config_file(CLI::App& app, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto strip = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r\"");
      const auto b = s.find_last_not_of(" \t\r\"");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (key == "config") throw ConfigError(path + ": nested config files are not supported");
    CLI::Option* opt = app.get_option_no_throw("--" + key);
    if (opt == nullptr) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown config key '" + key + "'");
    }
    if (opt->count() > 0) continue;
    std::stringstream parts(value);
    std::string piece;
    bool any = false;
    while (std::getline(parts, piece, ',')) {
      piece = strip(piece);
      if (piece.empty()) continue;
      opt->add_result(piece);
      any = true;
    }
    if (!any) throw ConfigError(path + ": empty value for '" + key + "'");
    opt->run_callback();
  }
}

void add_model_flags(CLI::App* app, ModelFlags& m) {
  app->add_option("--model", m.kind, "poly | ar | banded | explicit (aliases model1/model2/model3)");
  app->add_option("--p", m.p, "dimension");
  app->add_option("--rho", m.rho, "decay parameter rho (poly, ar)");
  app->add_option("--alpha", m.alpha, "decay exponent alpha (poly)");
  app->add_option("--k0", m.k0, "bandwidth k0 (banded)");
  app->add_option("--offdiag", m.offdiag, "within-band value (banded)");
  app->add_flag("--model3-unit-diagonal", m.unit_diagonal, "pin the banded model's diagonal to 1");
  app->add_option("--sigma-file", m.sigma_file, "CSV covariance matrix (explicit)");
}

void add_run_flags(CLI::App* app, RunFlags& r, bool sampling) {
  app->add_option("--n", r.n, "sample size");
  app->add_option("--scheme", r.scheme, "banding | czz");
  app->add_option("--c", r.c, "penalty multiplier(s): a number >= 2 or 'logn'")->delimiter(',');
  app->add_option("--tau-max", r.tau_max, "largest tau on the grid (default min(p, n))");
  app->add_option("--format", r.format, "json | csv");
  app->add_option("--output", r.output, "write the report here instead of stdout");
  if (sampling) {
    app->add_option("--seed", r.seed, "base seed");
    app->add_option("--replications", r.replications, "Monte Carlo replications");
    app->add_option("--threads", r.threads, "worker threads (0 = SURECOV_THREADS or all cores)");
    app->add_flag("--timing", r.timing, "include wall time in the report");
  }
}

CovModel build_model(const ModelFlags& m) {
  const std::string& k = m.kind;
  if (k == "poly" || k == "poly_decay" || k == "model1") return CovModel::poly_decay(m.p, m.rho, m.alpha);
  if (k == "ar" || k == "ar_decay" || k == "model2") return CovModel::ar_decay(m.p, m.rho);
  if (k == "banded" || k == "banded_uniform" || k == "model3") {
    return CovModel::banded_uniform(m.p, m.k0, m.offdiag, m.unit_diagonal);
  }
  if (k == "explicit") {
    if (m.sigma_file.empty()) throw ConfigError("--model explicit needs --sigma-file");
    return CovModel::explicit_matrix(SymMatrix(read_csv_matrix_file(m.sigma_file)));
  }
  throw ConfigError("unknown model '" + k + "' (expected poly, ar, banded or explicit)");
}

CovModel checked_model(const ModelFlags& m) {
  CovModel model = build_model(m);
  try {
    validate(model);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  return model;
}

std::vector<Penalty> parse_penalties(const std::vector<std::string>& texts) {
  std::vector<Penalty> out;
  for (const std::string& t : texts) out.push_back(Penalty::parse(t));
  if (out.empty()) throw ConfigError("at least one --c value is required");
  return out;
}

void fill_run_config(ExperimentConfig& cfg, const RunFlags& r) {
  cfg.n = r.n;
  cfg.scheme = parse_scheme(r.scheme);
  cfg.penalties = parse_penalties(r.c);
  cfg.tau_max = r.tau_max > 0 ? std::optional<Index>(r.tau_max) : std::nullopt;
  cfg.base_seed = r.seed;
  cfg.replications = r.replications;
  cfg.threads = resolve_threads(r.threads);
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << text;
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  body(f);
}

// --- select ---------------------------------------------------------------

struct SelectFlags {
  std::string input;
  std::string scheme = "banding";
  std::string c = "2";
  Index tau_max = 0;
  std::string profile_out;
  std::string estimate_out;
  std::string estimate_format = "band";
  std::string format = "json";
  std::string output;
};

int cmd_select(const SelectFlags& f, std::ostream& out) {
  if (f.input.empty()) throw ConfigError("select needs --input");
  if (f.estimate_format != "dense" && f.estimate_format != "band") {
    throw ConfigError("--estimate-format must be dense or band");
  }
  const ReportFormat format = parse_report_format(f.format);
  const WeightScheme scheme = parse_scheme(f.scheme);
  const Penalty pen = Penalty::parse(f.c);

  Eigen::MatrixXd rows = read_csv_matrix_file(f.input);
  if (rows.rows() < 4) {
    throw SampleSizeError("select needs n >= 4 observations, got " + std::to_string(rows.rows()));
  }
  if (rows.cols() < 1) throw ParseError("input has no columns", 0);
  const Dataset data(std::move(rows));
  const Index n = data.n();
  const Index p = data.p();
  const double c = pen.resolve(n);
  const SymMatrix sigma_tilde = mle_cov(data);
  const auto grid =
      default_tau_grid(p, n, f.tau_max > 0 ? std::optional<Index>(f.tau_max) : std::nullopt);
  const CriterionProfile profile = sure_profile(sigma_tilde, sure_constants(n, c), scheme, grid);
  const TaperedEstimate est = taper(sigma_tilde, scheme, profile.selected_tau);

  if (!f.profile_out.empty()) {
    write_file(f.profile_out, [&](std::ostream& os) { write_profile_csv(os, profile); });
  }
  if (!f.estimate_out.empty()) {
    write_file(f.estimate_out, [&](std::ostream& os) {
      if (f.estimate_format == "dense") {
        write_matrix_csv(os, est.matrix.dense());
      } else {
        write_band_csv(os, est.matrix, profile.selected_tau);
      }
    });
  }

  if (format == ReportFormat::csv) {
    std::ostringstream os;
    os << "# selected_tau=" << profile.selected_tau << "\n# c=" << format_double(c) << " ("
       << pen.label() << ")\n# scheme=" << scheme.name() << "\n# n=" << n << "\n# p=" << p << '\n';
    write_profile_csv(os, profile);
    emit(os.str(), f.output, out);
    return kExitOk;
  }
  json j;
  j["command"] = "select";
  j["config"] = {{"input", f.input},
                 {"scheme", scheme.name()},
                 {"c_label", pen.label()},
                 {"c", c},
                 {"tau_max", f.tau_max > 0 ? json(f.tau_max) : json(nullptr)},
                 {"estimate_format", f.estimate_format}};
  j["n"] = n;
  j["p"] = p;
  j["selected_tau"] = profile.selected_tau;
  j["profile"] = {{"tau", profile.tau_grid}, {"sure_value", profile.values}};
  if (!f.profile_out.empty()) j["profile_file"] = f.profile_out;
  if (!f.estimate_out.empty()) j["estimate_file"] = f.estimate_out;
  emit(j.dump(2) + "\n", f.output, out);
  return kExitOk;
}

// --- simulate / table1 / table2 / clt ------------------------------------

struct SimulateFlags {
  std::string preset = "custom";
  std::string variant = "all";
  std::string kind = "table";
  bool fast = false;
  std::vector<Index> taus;
  std::vector<Index> n_list;
  Index truncation_band = 0;
  bool track_loss = false;
  std::string dump_dataset;
};

void apply_overrides(ExperimentConfig& cfg, const CLI::App* app, const RunFlags& r) {
  const auto given = [&](const char* name) { return app->get_option(name)->count() > 0; };
  if (given("--replications")) cfg.replications = r.replications;
  if (given("--seed")) cfg.base_seed = r.seed;
  if (given("--tau-max")) cfg.tau_max = r.tau_max > 0 ? std::optional<Index>(r.tau_max) : std::nullopt;
  if (given("--c")) cfg.penalties = parse_penalties(r.c);
  if (given("--scheme")) cfg.scheme = parse_scheme(r.scheme);
  cfg.threads = resolve_threads(r.threads);
}

void dump_dataset(const ExperimentConfig& cfg, const std::string& path) {
  const ExperimentContext ctx(cfg);
  const Dataset d = ctx.sampler.sample(cfg.n, derive_seed(cfg.base_seed, 0));
  write_file(path, [&](std::ostream& os) {
    for (Index j = 0; j < d.p(); ++j) os << (j ? "," : "") << 'x' << (j + 1);
    os << '\n';
    write_matrix_csv(os, d.rows());
  });
}

std::string run_reports(const std::vector<ExperimentConfig>& configs, const RunFlags& r) {
  const ReportFormat format = parse_report_format(r.format);
  for (const ExperimentConfig& cfg : configs) validate(cfg);
  std::vector<ExperimentReport> reports;
  for (const ExperimentConfig& cfg : configs) reports.push_back(run(cfg));
  if (reports.size() == 1) return serialize_report(reports.front(), format, r.timing);
  if (format == ReportFormat::json) {
    json all = json::array();
    for (const auto& rep : reports) all.push_back(report_to_json(rep, r.timing));
    return json{{"reports", all}}.dump(2) + "\n";
  }
  std::string text;
  for (const auto& rep : reports) text += serialize_report(rep, format, r.timing);
  return text;
}

std::vector<ExperimentConfig> table1_configs(const std::string& variant, bool fast) {
  std::vector<ExperimentConfig> out;
  if (variant == "all") {
    for (const std::string& v : table1_variants()) out.push_back(table1_preset(v, fast));
  } else {
    out.push_back(table1_preset(variant, fast));
  }
  return out;
}

int cmd_simulate(const CLI::App* app, const SimulateFlags& s, const ModelFlags& m, const RunFlags& r,
                 std::ostream& out) {
  std::vector<ExperimentConfig> configs;
  if (s.preset == "table1") {
    configs = table1_configs(s.variant, s.fast);
  } else if (s.preset == "table2") {
    const Index p = app->get_option("--p")->count() > 0 ? m.p : 500;
    configs.push_back(table2_preset(p, s.fast));
  } else if (s.preset == "custom") {
    ExperimentConfig cfg;
    cfg.name = "custom";
    cfg.kind = parse_experiment_kind(s.kind);
    cfg.model = checked_model(m);
    fill_run_config(cfg, r);
    if (!s.taus.empty()) cfg.fixed_taus = s.taus;
    cfg.n_list = s.n_list;
    if (s.truncation_band > 0) cfg.truncation_band = s.truncation_band;
    cfg.track_loss_profile = s.track_loss;
    configs.push_back(cfg);
  } else {
    throw ConfigError("unknown preset '" + s.preset + "' (expected table1, table2 or custom)");
  }
  if (s.preset != "custom") {
    for (ExperimentConfig& cfg : configs) {
      apply_overrides(cfg, app, r);
      cfg.track_loss_profile = s.track_loss;
    }
  }
  if (!s.dump_dataset.empty()) {
    validate(configs.front());
    dump_dataset(configs.front(), s.dump_dataset);
  }
  emit(run_reports(configs, r), r.output, out);
  return kExitOk;
}

// --- risk ----------------------------------------------------------------

struct RiskFlags {
  bool with_var = false;
  std::string var_method = "auto";
  Index truncation_band = 0;
};

int cmd_risk(const RiskFlags& k, const ModelFlags& m, const RunFlags& r, std::ostream& out) {
  const CovModel model = checked_model(m);
  if (r.n < 4) throw ConfigError("n must be >= 4");
  const WeightScheme scheme = parse_scheme(r.scheme);
  if (r.c.size() != 1) throw ConfigError("risk takes a single --c value");
  const Penalty pen = Penalty::parse(r.c.front());
  const double c = pen.resolve(r.n);
  const SymMatrix sigma = build_sigma(model);
  const auto grid =
      default_tau_grid(model.p, r.n, r.tau_max > 0 ? std::optional<Index>(r.tau_max) : std::nullopt);
  const RiskProfile prof = risk_profile(sigma, r.n, scheme, c, grid);

  std::vector<double> var_values;
  std::string method_label;
  if (k.with_var) {
    VarMethod method = VarMethod::exact;
    std::optional<Index> band;
    if (k.var_method == "exact") {
      method = VarMethod::exact;
    } else if (k.var_method == "truncated" || k.var_method == "banded-truncated" ||
               k.var_method == "auto") {
      method = VarMethod::banded_truncated;
      band = k.truncation_band > 0 ? std::optional<Index>(k.truncation_band) : model_bandwidth(model);
      if (k.var_method == "auto" && model.p <= kVarExactCap) method = VarMethod::exact;
      if (method == VarMethod::banded_truncated && !band) {
        throw ConfigError("Var_n at p = " + std::to_string(model.p) +
                          " needs --truncation-band: the model has no exact bandwidth and the exact "
                          "method is limited to p <= " + std::to_string(kVarExactCap));
      }
    } else {
      throw ConfigError("--var-method must be auto, exact or truncated");
    }
    if (method == VarMethod::exact && model.p > kVarExactCap) {
      throw ConfigError("exact Var_n is limited to p <= " + std::to_string(kVarExactCap) +
                        "; use --var-method truncated with --truncation-band");
    }
    for (Index tau : grid) var_values.push_back(var_n(sigma, r.n, scheme, tau, c, method, band).value);
    method_label = to_string(method) + (band && method != VarMethod::exact
                                            ? " band=" + std::to_string(*band)
                                            : std::string());
  }

  std::ostringstream os;
  os << "# model=" << describe(model) << "\n# n=" << r.n << "\n# scheme=" << scheme.name()
     << "\n# c=" << format_double(c) << " (" << pen.label() << ")\n";
  if (k.with_var) os << "# var_method=" << method_label << '\n';
  os << (k.with_var ? "tau,risk,var_n\n" : "tau,risk\n");
  for (std::size_t t = 0; t < grid.size(); ++t) {
    os << grid[t] << ',' << format_double(prof.values[t]);
    if (k.with_var) os << ',' << format_double(var_values[t]);
    os << '\n';
  }
  os << "# oracle_tau=" << prof.oracle_tau << '\n';
  emit(os.str(), r.output, out);
  return kExitOk;
}

int dispatch(CLI::App& app, std::ostream& out, const std::vector<std::string>& args) {
  app.require_subcommand(1);

  ModelFlags model;
  RunFlags run_flags;
  std::string config_path;

  SelectFlags sel;
  CLI::App* select = app.add_subcommand("select", "choose tau for a data file by minimizing SURE_c");
  select->add_option("--input", sel.input, "CSV data, rows = observations");
  select->add_option("--scheme", sel.scheme, "banding | czz");
  select->add_option("--c", sel.c, "penalty multiplier: a number >= 2 or 'logn'");
  select->add_option("--tau-max", sel.tau_max, "largest tau on the grid (default min(p, n))");
  select->add_option("--profile-out", sel.profile_out, "write tau,sure_value CSV here");
  select->add_option("--estimate-out", sel.estimate_out, "write the tapered estimate here");
  select->add_option("--estimate-format", sel.estimate_format, "band (i,j,value) | dense");
  select->add_option("--format", sel.format, "json | csv");
  select->add_option("--output", sel.output, "write the report here instead of stdout");
  select->add_option("--config", config_path, "flat key = value file");

  SimulateFlags sim;
  CLI::App* simulate = app.add_subcommand("simulate", "run a Monte Carlo experiment");
  simulate->add_option("preset", sim.preset, "table1 | table2 | custom");
  simulate->add_option("--variant", sim.variant, "table1 variant or 'all'");
  simulate->add_option("--kind", sim.kind,
                       "table | clt | rate | oracle-ratio | consistency | unbiasedness");
  simulate->add_flag("--fast", sim.fast, "small preset (p = 100, 30 replications)");
  simulate->add_option("--tau", sim.taus, "fixed tau values (clt, unbiasedness)")->delimiter(',');
  simulate->add_option("--n-list", sim.n_list, "sample sizes (rate, consistency)")->delimiter(',');
  simulate->add_option("--truncation-band", sim.truncation_band, "Var_n truncation band");
  simulate->add_flag("--track-loss", sim.track_loss, "report the mean loss at every tau");
  simulate->add_option("--dump-dataset", sim.dump_dataset, "write replication 0's data as CSV");
  simulate->add_option("--config", config_path, "flat key = value file");
  add_model_flags(simulate, model);
  add_run_flags(simulate, run_flags, true);

  RiskFlags risk_flags;
  CLI::App* risk = app.add_subcommand("risk", "exact R_c(tau) table and oracle tau for a model");
  risk->add_flag("--var", risk_flags.with_var, "add a Var_n column");
  risk->add_option("--var-method", risk_flags.var_method, "auto | exact | truncated");
  risk->add_option("--truncation-band", risk_flags.truncation_band, "Var_n truncation band");
  risk->add_option("--config", config_path, "flat key = value file");
  add_model_flags(risk, model);
  add_run_flags(risk, run_flags, false);

  SimulateFlags clt_flags;
  CLI::App* clt = app.add_subcommand("clt", "standardized SURE_c(tau) against N(0, 1)");
  clt->add_option("--tau", clt_flags.taus, "fixed tau")->delimiter(',');
  clt->add_option("--truncation-band", clt_flags.truncation_band, "Var_n truncation band");
  clt->add_option("--config", config_path, "flat key = value file");
  add_model_flags(clt, model);
  add_run_flags(clt, run_flags, true);

  SimulateFlags t1;
  CLI::App* table1 = app.add_subcommand("table1", "risk of SURE-tuned banding on the decay models");
  table1->add_option("--variant", t1.variant, "model1-a05 | model1-a01 | model2-r095 | model2-r05 | all");
  table1->add_flag("--fast", t1.fast, "p = 100, 30 replications");
  table1->add_flag("--track-loss", t1.track_loss, "report the mean loss at every tau");
  table1->add_option("--config", config_path, "flat key = value file");
  add_run_flags(table1, run_flags, true);

  SimulateFlags t2;
  Index t2_p = 500;
  CLI::App* table2 = app.add_subcommand("table2", "bandwidth recovery of SURE_logn on the banded model");
  table2->add_option("--p", t2_p, "dimension (500 or 1000 in the reference setup)");
  table2->add_flag("--fast", t2.fast, "p = 100, 30 replications");
  table2->add_option("--config", config_path, "flat key = value file");
  add_run_flags(table2, run_flags, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  app.parse(reversed);

  CLI::App* chosen = app.get_subcommands().front();
  apply_config_file(*chosen, config_path);

  if (chosen == select) return cmd_select(sel, out);
  if (chosen == simulate) return cmd_simulate(simulate, sim, model, run_flags, out);
  if (chosen == risk) return cmd_risk(risk_flags, model, run_flags, out);
  if (chosen == clt) {
    ExperimentConfig cfg;
    cfg.name = "clt";
    cfg.kind = ExperimentKind::clt;
    cfg.model = checked_model(model);
    fill_run_config(cfg, run_flags);
    if (clt_flags.taus.empty()) throw ConfigError("clt needs --tau");
    cfg.fixed_taus = clt_flags.taus;
    if (clt_flags.truncation_band > 0) cfg.truncation_band = clt_flags.truncation_band;
    emit(run_reports({cfg}, run_flags), run_flags.output, out);
    return kExitOk;
  }
  if (chosen == table1) {
    auto configs = table1_configs(t1.variant, t1.fast);
    for (auto& cfg : configs) {
      apply_overrides(cfg, table1, run_flags);
      cfg.track_loss_profile = t1.track_loss;
    }
    emit(run_reports(configs, run_flags), run_flags.output, out);
    return kExitOk;
  }
  if (chosen == table2) {
    ExperimentConfig cfg = table2_preset(t2_p, t2.fast);
    apply_overrides(cfg, table2, run_flags);
    emit(run_reports({cfg}, run_flags), run_flags.output, out);
    return kExitOk;
  }
  return kExitUsage;
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NotPositiveDefiniteError*>(&e) != nullptr) return kExitNumerical;
  if (dynamic_cast<const ParseError*>(&e) != nullptr ||
      dynamic_cast<const SampleSizeError*>(&e) != nullptr ||
      dynamic_cast<const DimensionError*>(&e) != nullptr) {
    return kExitData;
  }
  return kExitUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"surecov: SURE information criteria for banded and tapered covariance estimation"};
  app.name("surecov");
  try {
    return dispatch(app, out, args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace surecov::cli
