#include "surecov/criterion.hpp"

#include <algorithm>
#include <string>

#include "surecov/error.hpp"
#include "surecov/numeric.hpp"

namespace surecov {

namespace {

// Contribution of all pairs at one distance when they carry weight w.
struct DistanceTerm {
  double kappa;  // n / (n - 1)
  double c;
  double a_n;
  double b_n;

  double operator()(double w, double sq, double cross) const {
    const double shrink = kappa - w;
    return shrink * shrink * sq + (c * w - kappa) * (a_n * sq + b_n * cross);
  }
};

DistanceTerm make_term(const SureConstants& k) {
  const double n = static_cast<double>(k.n);
  return DistanceTerm{n / (n - 1.0), k.c, k.a_n, k.b_n};
}

void check_profile_inputs(const SureConstants& consts, const std::vector<Index>& grid) {
  if (consts.n < 4) throw SampleSizeError("SURE profile needs n >= 4");
  if (grid.empty()) throw ParameterError("tau grid is empty");
  for (Index tau : grid) {
    if (tau < 1) throw ParameterError("tau grid entries must be >= 1");
  }
}

// Sum of `out` terms over d >= tau accumulated from the far end, for every
// tau in 0..p. tail[p] = 0.
std::vector<double> tail_sums(const std::vector<double>& out) {
  std::vector<double> tail(out.size() + 1, 0.0);
  for (std::size_t d = out.size(); d-- > 0;) tail[d] = tail[d + 1] + out[d];
  return tail;
}

}  // namespace

SureConstants sure_constants(Index n, double c) {
  if (n < 3) throw SampleSizeError("SURE constants need n >= 3, got n = " + std::to_string(n));
  if (!(c >= 2.0)) throw ParameterError("penalty constant c must be >= 2");
  const double nd = static_cast<double>(n);
  SureConstants k;
  k.n = n;
  k.c = c;
  k.a_n = nd * (nd - 3.0) / ((nd - 1.0) * (nd - 2.0) * (nd + 1.0));
  k.b_n = nd / ((nd + 1.0) * (nd - 2.0));
  return k;
}

double var_hat(const SymMatrix& sigma_tilde, const SureConstants& consts, Index i, Index j) {
  const double n = static_cast<double>(consts.n);
  const double s = sigma_tilde(i, j);
  return n / (n - 1.0) *
         (consts.a_n * s * s + consts.b_n * sigma_tilde(i, i) * sigma_tilde(j, j));
}

double sure_value(const SymMatrix& sigma_tilde, const SureConstants& consts,
                  const WeightScheme& scheme, Index tau) {
  check_profile_inputs(consts, {tau});
  const DistanceSums sums = distance_sums(sigma_tilde);
  const DistanceTerm term = make_term(consts);
  const Index p = sigma_tilde.dim();
  double head = 0.0;
  for (Index d = 0; d < std::min(tau, p); ++d) {
    const auto k = static_cast<std::size_t>(d);
    head += term(scheme.weight(tau, d), sums.sq[k], sums.cross[k]);
  }
  double tail = 0.0;
  for (Index d = p - 1; d >= tau; --d) {
    const auto k = static_cast<std::size_t>(d);
    tail += term(0.0, sums.sq[k], sums.cross[k]);
  }
  return head + tail;
}

CriterionProfile sure_profile(const SymMatrix& sigma_tilde, const SureConstants& consts,
                              const WeightScheme& scheme, const std::vector<Index>& tau_grid) {
  check_profile_inputs(consts, tau_grid);
  const Index p = sigma_tilde.dim();
  const DistanceSums sums = distance_sums(sigma_tilde);
  const DistanceTerm term = make_term(consts);

  std::vector<double> full(static_cast<std::size_t>(p));
  std::vector<double> none(static_cast<std::size_t>(p));
  for (std::size_t d = 0; d < full.size(); ++d) {
    full[d] = term(1.0, sums.sq[d], sums.cross[d]);
    none[d] = term(0.0, sums.sq[d], sums.cross[d]);
  }
  // head[t] = sum_{d < t} full[d], accumulated left to right.
  std::vector<double> head(full.size() + 1, 0.0);
  for (std::size_t d = 0; d < full.size(); ++d) head[d + 1] = head[d] + full[d];
  const std::vector<double> tail = tail_sums(none);

  CriterionProfile profile;
  profile.tau_grid = tau_grid;
  profile.c = consts.c;
  profile.values.reserve(tau_grid.size());
  for (Index tau : tau_grid) {
    const Index cut = std::min(tau, p);
    if (scheme.kind() == WeightScheme::Kind::banding) {
      profile.values.push_back(head[static_cast<std::size_t>(cut)] +
                               tail[static_cast<std::size_t>(cut)]);
      continue;
    }
    // Weights are exactly 1 up to floor(tau/2); only the shell varies.
    const Index unit = std::min(tau / 2 + 1, cut);
    double acc = head[static_cast<std::size_t>(unit)];
    for (Index d = unit; d < cut; ++d) {
      const auto k = static_cast<std::size_t>(d);
      acc += term(scheme.weight(tau, d), sums.sq[k], sums.cross[k]);
    }
    profile.values.push_back(acc + tail[static_cast<std::size_t>(cut)]);
  }
  profile.selected_tau = select_tau(profile.tau_grid, profile.values);
  return profile;
}

double sure_eq2_reference(const SymMatrix& sigma_tilde, const SureConstants& consts,
                          const WeightScheme& scheme, Index tau) {
  check_profile_inputs(consts, {tau});
  const Index p = sigma_tilde.dim();
  const double n = static_cast<double>(consts.n);
  const TaperedEstimate est = taper(sigma_tilde, scheme, tau);
  const SymMatrix target = unbiased_cov(sigma_tilde, consts.n);
  const double fit = frob_sq_dist(est.matrix, target);

  std::vector<double> var_terms;
  std::vector<double> penalty_terms;
  var_terms.reserve(static_cast<std::size_t>(p * p));
  penalty_terms.reserve(static_cast<std::size_t>(p * p));
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) {
      const double v = var_hat(sigma_tilde, consts, i, j);
      var_terms.push_back(v);
      penalty_terms.push_back(scheme.weight(tau, std::abs(i - j)) * v);
    }
  }
  return fit - pairwise_sum(var_terms) +
         consts.c * (n - 1.0) / n * pairwise_sum(penalty_terms);
}

Index select_tau(const std::vector<Index>& tau_grid, const std::vector<double>& values) {
  if (tau_grid.empty() || tau_grid.size() != values.size()) {
    throw ParameterError("select_tau: grid and values must be nonempty and of equal length");
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] < values[best] ||
        (values[k] == values[best] && tau_grid[k] < tau_grid[best])) {
      best = k;
    }
  }
  return tau_grid[best];
}

Index select_tau(const CriterionProfile& profile) {
  return select_tau(profile.tau_grid, profile.values);
}

std::vector<Index> default_tau_grid(Index p, Index n, std::optional<Index> cap) {
  const Index top = cap ? std::min(p, *cap) : std::min(p, n);
  if (top < 1) throw ParameterError("tau grid would be empty");
  std::vector<Index> grid(static_cast<std::size_t>(top));
  for (Index k = 0; k < top; ++k) grid[static_cast<std::size_t>(k)] = k + 1;
  return grid;
}

}  // namespace surecov
