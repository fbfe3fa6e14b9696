#include "surecov/estimate.hpp"

#include <cmath>
#include <limits>

#include "surecov/error.hpp"
#include "surecov/numeric.hpp"

namespace surecov {

WeightScheme WeightScheme::banding() { return WeightScheme(Kind::banding); }

WeightScheme WeightScheme::czz_taper() { return WeightScheme(Kind::czz_taper); }

WeightScheme WeightScheme::custom(std::vector<std::vector<double>> table) {
  if (table.empty()) throw InvalidWeightError("custom weight table is empty");
  for (std::size_t k = 0; k < table.size(); ++k) {
    const Index tau = static_cast<Index>(k) + 1;
    std::vector<double> row = table[k];
    // Conditions must also hold on the implicit zero tail.
    if (static_cast<Index>(row.size()) < tau + 1) row.resize(static_cast<std::size_t>(tau) + 1, 0.0);
    check_weight_conditions(row, tau);
  }
  WeightScheme s(Kind::custom);
  s.table_ = std::make_shared<const std::vector<std::vector<double>>>(std::move(table));
  return s;
}

double WeightScheme::weight(Index tau, Index d) const {
  if (tau < 1) throw ParameterError("tapering parameter tau must be >= 1");
  if (d < 0) throw ParameterError("distance d must be >= 0");
  switch (kind_) {
    case Kind::banding:
      return d < tau ? 1.0 : 0.0;
    case Kind::czz_taper: {
      const Index half = tau / 2;
      if (d <= half) return 1.0;
      if (d >= tau) return 0.0;
      // half >= 2 here: tau <= 3 leaves no distance strictly inside (half, tau).
      return static_cast<double>(tau - d) / static_cast<double>(half);
    }
    case Kind::custom: {
      if (tau > max_tau()) {
        throw ParameterError("tau = " + std::to_string(tau) + " exceeds the custom table (max " +
                             std::to_string(max_tau()) + ")");
      }
      const auto& row = (*table_)[static_cast<std::size_t>(tau - 1)];
      return d < static_cast<Index>(row.size()) ? row[static_cast<std::size_t>(d)] : 0.0;
    }
  }
  return 0.0;
}

std::string WeightScheme::name() const {
  switch (kind_) {
    case Kind::banding:
      return "banding";
    case Kind::czz_taper:
      return "czz";
    case Kind::custom:
      return "custom";
  }
  return "unknown";
}

Index WeightScheme::max_tau() const noexcept {
  if (kind_ == Kind::custom) return static_cast<Index>(table_->size());
  return std::numeric_limits<Index>::max();
}

double weight(const WeightScheme& scheme, Index tau, Index d) { return scheme.weight(tau, d); }

std::vector<double> toeplitz_weights(const WeightScheme& scheme, Index tau, Index p) {
  std::vector<double> w(static_cast<std::size_t>(p));
  for (Index d = 0; d < p; ++d) w[static_cast<std::size_t>(d)] = scheme.weight(tau, d);
  return w;
}

void check_weight_conditions(const std::vector<double>& w, Index tau) {
  const Index half = tau / 2;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const Index d = static_cast<Index>(k);
    const double v = w[k];
    const auto fail = [&](const char* rule) {
      throw InvalidWeightError("weight tau=" + std::to_string(tau) + " d=" + std::to_string(d) +
                               " = " + std::to_string(v) + " violates " + rule);
    };
    if (d <= half) {
      if (v != 1.0) fail("omega = 1 for d <= floor(tau/2)");
    } else if (d >= tau) {
      if (v != 0.0) fail("omega = 0 for d >= tau");
    } else if (!(v >= 0.0 && v <= 1.0)) {
      fail("0 <= omega <= 1");
    }
  }
}

WeightScheme parse_scheme(const std::string& name) {
  if (name == "banding") return WeightScheme::banding();
  if (name == "czz" || name == "czz_taper" || name == "tapering") return WeightScheme::czz_taper();
  throw ConfigError("unknown weight scheme '" + name + "' (expected banding or czz)");
}

SymMatrix mle_cov(const Dataset& data) {
  const Index n = data.n();
  if (n < 3) throw SampleSizeError("mle_cov needs n >= 3");
  const Eigen::RowVectorXd mean = data.rows().colwise().mean();
  const Eigen::MatrixXd centered = data.rows().rowwise() - mean;
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(data.p(), data.p());
  s.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(), 1.0 / static_cast<double>(n));
  return SymMatrix::from_lower(std::move(s));
}

SymMatrix unbiased_cov(const SymMatrix& sigma_tilde, Index n) {
  if (n < 3) throw SampleSizeError("unbiased_cov needs n >= 3");
  const double scale = static_cast<double>(n) / static_cast<double>(n - 1);
  return SymMatrix(sigma_tilde.dense() * scale);
}

TaperedEstimate taper(const SymMatrix& sigma_tilde, const WeightScheme& scheme, Index tau) {
  const Index p = sigma_tilde.dim();
  const std::vector<double> w = toeplitz_weights(scheme, tau, p);
  Eigen::MatrixXd out(p, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) {
      out(i, j) = w[static_cast<std::size_t>(std::abs(i - j))] * sigma_tilde(i, j);
    }
  }
  return TaperedEstimate{tau, scheme, SymMatrix(std::move(out))};
}

double frob_sq_dist(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("frob_sq_dist: dimensions " + std::to_string(a.dim()) + " and " +
                         std::to_string(b.dim()) + " differ");
  }
  const Index p = a.dim();
  std::vector<double> column(static_cast<std::size_t>(p));
  std::vector<double> totals(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) {
      const double diff = a(i, j) - b(i, j);
      column[static_cast<std::size_t>(i)] = diff * diff;
    }
    totals[static_cast<std::size_t>(j)] = pairwise_sum(column);
  }
  return pairwise_sum(totals);
}

DistanceSums distance_sums(const SymMatrix& m) {
  const Index p = m.dim();
  DistanceSums out;
  out.sq.assign(static_cast<std::size_t>(p), 0.0);
  out.cross.assign(static_cast<std::size_t>(p), 0.0);
  std::vector<double> sq_terms;
  std::vector<double> cross_terms;
  sq_terms.reserve(static_cast<std::size_t>(p));
  cross_terms.reserve(static_cast<std::size_t>(p));
  for (Index d = 0; d < p; ++d) {
    sq_terms.clear();
    cross_terms.clear();
    for (Index i = 0; i + d < p; ++i) {
      const double v = m(i + d, i);
      sq_terms.push_back(v * v);
      cross_terms.push_back(m(i, i) * m(i + d, i + d));
    }
    const double mult = d == 0 ? 1.0 : 2.0;
    out.sq[static_cast<std::size_t>(d)] = mult * pairwise_sum(sq_terms);
    out.cross[static_cast<std::size_t>(d)] = mult * pairwise_sum(cross_terms);
  }
  return out;
}

}  // namespace surecov
