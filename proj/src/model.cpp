#include "surecov/model.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "surecov/error.hpp"
#include "surecov/numeric.hpp"

namespace surecov {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Toeplitz matrix from its first column; both triangles written from the same
// value so the result is bit-symmetric.
SymMatrix toeplitz(const Eigen::VectorXd& column) {
  const Index p = column.size();
  Eigen::MatrixXd m(p, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) m(i, j) = column(std::abs(i - j));
  }
  return SymMatrix(std::move(m));
}

}  // namespace

void validate(const CovModel& model) {
  if (model.p < 1) throw ParameterError("dimension p must be positive");
  std::visit(overloaded{
                 [](const PolyDecay& m) {
                   if (!(m.rho >= 0.0 && m.rho < 1.0)) {
                     throw ParameterError("poly_decay: rho must lie in [0, 1)");
                   }
                   if (!(m.alpha > 0.0)) throw ParameterError("poly_decay: alpha must be > 0");
                 },
                 [](const ArDecay& m) {
                   if (!(std::abs(m.rho) < 1.0)) {
                     throw ParameterError("ar_decay: |rho| must be < 1");
                   }
                 },
                 [&](const BandedUniform& m) {
                   if (m.k0 < 1 || m.k0 > model.p) {
                     throw ParameterError("banded_uniform: k0 must lie in [1, p]");
                   }
                   if (!std::isfinite(m.offdiag)) {
                     throw ParameterError("banded_uniform: offdiag must be finite");
                   }
                 },
                 [&](const Explicit& m) {
                   if (m.matrix.dim() != model.p) {
                     throw ParameterError("explicit: matrix dimension differs from p");
                   }
                   for (Index i = 0; i < m.matrix.dim(); ++i) {
                     if (!(m.matrix(i, i) > 0.0)) {
                       throw ParameterError("explicit: diagonal entries must be positive");
                     }
                   }
                 },
             },
             model.variant);
}

std::string describe(const CovModel& model) {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const PolyDecay& m) {
                   os << "poly_decay(rho=" << m.rho << ",alpha=" << m.alpha << ")";
                 },
                 [&](const ArDecay& m) { os << "ar_decay(rho=" << m.rho << ")"; },
                 [&](const BandedUniform& m) {
                   os << "banded_uniform(k0=" << m.k0 << ",offdiag=" << m.offdiag
                      << (m.unit_diagonal ? ",unit_diagonal" : "") << ")";
                 },
                 [&](const Explicit&) { os << "explicit"; },
             },
             model.variant);
  os << ",p=" << model.p;
  return os.str();
}

SymMatrix build_sigma(const CovModel& model) {
  validate(model);
  const Index p = model.p;
  Eigen::VectorXd column(p);
  return std::visit(
      overloaded{
          [&](const PolyDecay& m) {
            column(0) = 1.0;
            for (Index d = 1; d < p; ++d) {
              column(d) = m.rho * std::pow(static_cast<double>(d), -(m.alpha + 1.0));
            }
            return toeplitz(column);
          },
          [&](const ArDecay& m) {
            column(0) = 1.0;
            for (Index d = 1; d < p; ++d) column(d) = std::pow(m.rho, static_cast<double>(d));
            return toeplitz(column);
          },
          [&](const BandedUniform& m) {
            for (Index d = 0; d < p; ++d) column(d) = d <= m.k0 - 1 ? m.offdiag : 0.0;
            column(0) = m.unit_diagonal ? 1.0 : 1.0 + m.offdiag;
            return toeplitz(column);
          },
          [](const Explicit& m) { return m.matrix; },
      },
      model.variant);
}

Index detect_bandwidth(const SymMatrix& m) {
  const Index p = m.dim();
  for (Index d = p - 1; d >= 1; --d) {
    for (Index i = 0; i + d < p; ++i) {
      if (m(i + d, i) != 0.0) return d + 1;
    }
  }
  return 1;
}

std::optional<Index> model_bandwidth(const CovModel& model) {
  return std::visit(overloaded{
                        [](const PolyDecay& m) -> std::optional<Index> {
                          if (m.rho == 0.0) return Index{1};
                          return std::nullopt;
                        },
                        [](const ArDecay& m) -> std::optional<Index> {
                          if (m.rho == 0.0) return Index{1};
                          return std::nullopt;
                        },
                        [](const BandedUniform& m) -> std::optional<Index> {
                          if (m.offdiag == 0.0) return Index{1};
                          return m.k0;
                        },
                        [](const Explicit& m) -> std::optional<Index> {
                          return detect_bandwidth(m.matrix);
                        },
                    },
                    model.variant);
}

Dataset::Dataset(Eigen::MatrixXd rows, std::uint64_t seed) : rows_(std::move(rows)), seed_(seed) {
  if (rows_.rows() < 3) {
    throw SampleSizeError("dataset needs n >= 3 observations, got " +
                          std::to_string(rows_.rows()));
  }
}

GaussianSampler::GaussianSampler(const SymMatrix& sigma) {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma.dense());
  if (llt.info() != Eigen::Success) {
    const Index p = sigma.dim();
    const double jitter = 1e-10 * sigma.dense().trace() / static_cast<double>(p);
    Eigen::MatrixXd shifted = sigma.dense();
    shifted.diagonal().array() += jitter;
    llt.compute(shifted);
    if (llt.info() != Eigen::Success) {
      throw NotPositiveDefiniteError(
          "covariance matrix is not positive definite (Cholesky failed after jitter)");
    }
    jittered_ = true;
  }
  lower_ = llt.matrixL();
}

Dataset GaussianSampler::sample(Index n, std::uint64_t seed) const {
  if (n < 3) throw SampleSizeError("sample size n must be >= 3");
  const Index p = dim();
  std::mt19937_64 rng(mix64(seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  // Row-major fill order fixes the stream-to-entry mapping.
  Eigen::MatrixXd z(n, p);
  for (Index k = 0; k < n; ++k) {
    for (Index j = 0; j < p; ++j) z(k, j) = normal(rng);
  }
  Eigen::MatrixXd x(n, p);
  x.noalias() = z * lower_.transpose().triangularView<Eigen::Upper>();
  return Dataset(std::move(x), seed);
}

Dataset sample_dataset(const SymMatrix& sigma, Index n, std::uint64_t seed) {
  if (n < 3) throw SampleSizeError("sample size n must be >= 3");
  return GaussianSampler(sigma).sample(n, seed);
}

}  // namespace surecov
