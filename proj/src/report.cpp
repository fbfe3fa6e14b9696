#include "surecov/report.hpp"

#include <ostream>
#include <sstream>
#include <variant>

#include "surecov/error.hpp"
#include "surecov/io.hpp"

namespace surecov {

namespace {

using nlohmann::json;

json model_to_json(const CovModel& model) {
  json j;
  j["p"] = model.p;
  if (const auto* m = std::get_if<PolyDecay>(&model.variant)) {
    j["kind"] = "poly_decay";
    j["rho"] = m->rho;
    j["alpha"] = m->alpha;
  } else if (const auto* m = std::get_if<ArDecay>(&model.variant)) {
    j["kind"] = "ar_decay";
    j["rho"] = m->rho;
  } else if (const auto* m = std::get_if<BandedUniform>(&model.variant)) {
    j["kind"] = "banded_uniform";
    j["k0"] = m->k0;
    j["offdiag"] = m->offdiag;
    j["unit_diagonal"] = m->unit_diagonal;
  } else if (const auto* m = std::get_if<Explicit>(&model.variant)) {
    j["kind"] = "explicit";
    json rows = json::array();
    for (Index i = 0; i < m->matrix.dim(); ++i) {
      json row = json::array();
      for (Index k = 0; k < m->matrix.dim(); ++k) row.push_back(m->matrix(i, k));
      rows.push_back(std::move(row));
    }
    j["matrix"] = std::move(rows);
  }
  return j;
}

json histogram_to_json(const std::map<Index, Index>& h) {
  json out = json::object();
  for (const auto& [tau, count] : h) out[std::to_string(tau)] = count;
  return out;
}

}  // namespace

ReportFormat parse_report_format(const std::string& text) {
  if (text == "json") return ReportFormat::json;
  if (text == "csv") return ReportFormat::csv;
  throw ConfigError("unknown format '" + text + "' (expected json or csv)");
}

json config_to_json(const ExperimentConfig& config) {
  json j;
  j["name"] = config.name;
  j["kind"] = to_string(config.kind);
  j["model"] = model_to_json(config.model);
  j["n"] = config.n;
  j["scheme"] = config.scheme.name();
  json pens = json::array();
  for (const Penalty& pen : config.penalties) {
    pens.push_back({{"label", pen.label()}, {"c", pen.resolve(config.n)}});
  }
  j["penalties"] = std::move(pens);
  j["replications"] = config.replications;
  j["base_seed"] = config.base_seed;
  j["seed_derivation"] = "derive_seed(base_seed, replication_index), splitmix64-mixed";
  j["tau_max"] = config.tau_max ? json(*config.tau_max) : json(nullptr);
  j["fixed_taus"] = config.fixed_taus;
  j["truncation_band"] = config.truncation_band ? json(*config.truncation_band) : json(nullptr);
  j["n_list"] = config.n_list;
  return j;
}

json report_to_json(const ExperimentReport& report, bool include_timing) {
  json j;
  j["config"] = config_to_json(report.config);
  if (!report.methods.empty()) {
    json methods = json::array();
    for (const MethodSummary& m : report.methods) {
      json mj;
      mj["label"] = m.label;
      mj["c"] = m.c;
      mj["mean_loss"] = m.mean_loss;
      mj["se_loss"] = report.se_defined ? json(m.se_loss) : json(nullptr);
      mj["mean_selected_tau"] = m.mean_tau;
      mj["histogram"] = histogram_to_json(m.histogram);
      methods.push_back(std::move(mj));
    }
    j["methods"] = std::move(methods);
    j["se_defined"] = report.se_defined;
    j["oracle_tau"] = report.oracle_tau;
    j["oracle_risk"] = report.oracle_risk;
    j["tau_grid"] = {{"min", report.tau_grid.front()}, {"max", report.tau_grid.back()}};
  }
  if (!report.mean_loss_by_tau.empty()) {
    j["mean_loss_by_tau"] = report.mean_loss_by_tau;
    j["se_loss_by_tau"] = report.se_loss_by_tau;
  }
  if (report.clt) {
    const CltSummary& c = *report.clt;
    j["clt"] = {{"tau", c.tau},
                {"c", c.c},
                {"risk", c.risk},
                {"var_n", c.var.value},
                {"var_method", to_string(c.var.method)},
                {"truncation_band", c.var.truncation_band ? json(*c.var.truncation_band) : json(nullptr)},
                {"mean", c.mean},
                {"variance", c.variance},
                {"ks", c.ks},
                {"replications", c.standardized.size()}};
  }
  if (report.rate) {
    const RateSummary& r = *report.rate;
    j["rate"] = {{"alpha", r.alpha},         {"target_slope", r.target_slope},
                 {"n_list", r.n_list},       {"mean_loss", r.mean_loss},
                 {"se_loss", r.se_loss},     {"min_risk", r.min_risk},
                 {"fitted_slope", r.slope}};
  }
  if (report.oracle_ratio) {
    const OracleRatioSummary& o = *report.oracle_ratio;
    j["oracle_ratio"] = {{"oracle_tau", o.oracle_tau}, {"oracle_risk", o.oracle_risk},
                         {"mean_loss", o.mean_loss},   {"ratio", o.ratio},
                         {"half_width", o.half_width}};
  }
  if (!report.consistency.empty()) {
    json pts = json::array();
    for (const ConsistencyPoint& pt : report.consistency) {
      pts.push_back({{"n", pt.n},
                     {"k0", pt.k0},
                     {"window", {pt.k0, pt.window_hi}},
                     {"fraction_logn_exact", pt.fraction_logn},
                     {"fraction_sure2_in_window", pt.fraction_window},
                     {"histogram_logn", histogram_to_json(pt.histogram_logn)},
                     {"histogram_sure2", histogram_to_json(pt.histogram_two)}});
    }
    j["consistency"] = std::move(pts);
  }
  if (!report.unbiasedness.empty()) {
    json cells = json::array();
    for (const UnbiasednessCell& c : report.unbiasedness) {
      cells.push_back({{"label", c.label}, {"c", c.c},   {"tau", c.tau}, {"mean", c.mean},
                       {"se", c.se},       {"risk", c.risk}, {"z", c.z}});
    }
    j["unbiasedness"] = std::move(cells);
  }
  if (include_timing) j["timing"] = {{"wall_seconds", report.wall_seconds}};
  return j;
}

void write_report_csv(std::ostream& out, const ExperimentReport& report, bool include_timing) {
  out << "# config\nkey,value\n";
  const json cfg = config_to_json(report.config);
  for (const auto& [key, value] : cfg.items()) {
    std::string text = value.dump();
    // Keep each value in one quoted CSV cell.
    std::string quoted = "\"";
    for (char ch : text) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    out << key << ',' << quoted << "\"\n";
  }
  if (!report.methods.empty()) {
    out << "# methods\nlabel,c,mean_loss,se_loss,mean_selected_tau,oracle_tau,oracle_risk\n";
    for (const MethodSummary& m : report.methods) {
      out << m.label << ',' << format_double(m.c) << ',' << format_double(m.mean_loss) << ','
          << (report.se_defined ? format_double(m.se_loss) : std::string("NA")) << ','
          << format_double(m.mean_tau) << ',' << report.oracle_tau << ','
          << format_double(report.oracle_risk) << '\n';
    }
    out << "# histogram\nlabel,tau,count\n";
    for (const MethodSummary& m : report.methods) {
      for (const auto& [tau, count] : m.histogram) out << m.label << ',' << tau << ',' << count << '\n';
    }
  }
  if (!report.mean_loss_by_tau.empty()) {
    out << "# loss_by_tau\ntau,mean_loss,se_loss\n";
    for (std::size_t k = 0; k < report.mean_loss_by_tau.size(); ++k) {
      out << report.tau_grid[k] << ',' << format_double(report.mean_loss_by_tau[k]) << ','
          << format_double(report.se_loss_by_tau[k]) << '\n';
    }
  }
  if (report.clt) {
    const CltSummary& c = *report.clt;
    out << "# clt\ntau,c,risk,var_n,mean,variance,ks\n"
        << c.tau << ',' << format_double(c.c) << ',' << format_double(c.risk) << ','
        << format_double(c.var.value) << ',' << format_double(c.mean) << ','
        << format_double(c.variance) << ',' << format_double(c.ks) << '\n';
    out << "# clt_sample\nreplication,standardized\n";
    for (std::size_t k = 0; k < c.standardized.size(); ++k) {
      out << k << ',' << format_double(c.standardized[k]) << '\n';
    }
  }
  if (report.rate) {
    const RateSummary& r = *report.rate;
    out << "# rate\nn,mean_loss,se_loss,min_risk\n";
    for (std::size_t k = 0; k < r.n_list.size(); ++k) {
      out << r.n_list[k] << ',' << format_double(r.mean_loss[k]) << ','
          << format_double(r.se_loss[k]) << ',' << format_double(r.min_risk[k]) << '\n';
    }
    out << "# rate_fit\nfitted_slope,target_slope\n"
        << format_double(r.slope) << ',' << format_double(r.target_slope) << '\n';
  }
  if (report.oracle_ratio) {
    const OracleRatioSummary& o = *report.oracle_ratio;
    out << "# oracle_ratio\noracle_tau,oracle_risk,mean_loss,ratio,half_width\n"
        << o.oracle_tau << ',' << format_double(o.oracle_risk) << ',' << format_double(o.mean_loss)
        << ',' << format_double(o.ratio) << ',' << format_double(o.half_width) << '\n';
  }
  if (!report.consistency.empty()) {
    out << "# consistency\nn,k0,window_hi,fraction_logn_exact,fraction_sure2_in_window\n";
    for (const ConsistencyPoint& pt : report.consistency) {
      out << pt.n << ',' << pt.k0 << ',' << pt.window_hi << ',' << format_double(pt.fraction_logn)
          << ',' << format_double(pt.fraction_window) << '\n';
    }
  }
  if (!report.unbiasedness.empty()) {
    out << "# unbiasedness\nlabel,c,tau,mean,se,risk,z\n";
    for (const UnbiasednessCell& c : report.unbiasedness) {
      out << c.label << ',' << format_double(c.c) << ',' << c.tau << ',' << format_double(c.mean)
          << ',' << format_double(c.se) << ',' << format_double(c.risk) << ','
          << format_double(c.z) << '\n';
    }
  }
  if (include_timing) out << "# timing\nwall_seconds\n" << format_double(report.wall_seconds) << '\n';
}

std::string serialize_report(const ExperimentReport& report, ReportFormat format,
                             bool include_timing) {
  if (format == ReportFormat::json) return report_to_json(report, include_timing).dump(2) + "\n";
  std::ostringstream os;
  write_report_csv(os, report, include_timing);
  return os.str();
}

}  // namespace surecov
