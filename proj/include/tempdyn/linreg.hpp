#pragma once

// Least squares with Newey-West (Bartlett kernel) HAC covariance and Wald
// tests of zero restrictions against the asymptotic chi-square reference.

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include "tempdyn/error.hpp"

namespace tempdyn::linreg {

// Relative rank tolerance: a QR pivot counts as zero when it is at most
// this fraction of the largest column norm.
inline constexpr double kRankTolerance = 1e-10;

class DesignMatrix {
 public:
  DesignMatrix() = default;

  DesignMatrix& add(std::string name, std::span<const double> values) {
    if (name.empty()) throw ContractViolation("design column needs a name");
    if (std::find(names_.begin(), names_.end(), name) != names_.end()) {
      throw ContractViolation("duplicate design column '" + name + "'");
    }
    if (!names_.empty() && values.size() != rows()) {
      throw ContractViolation("column '" + name + "' has " +
                              std::to_string(values.size()) + " rows, expected " +
                              std::to_string(rows()));
    }
    const Eigen::Index n = static_cast<Eigen::Index>(values.size());
    matrix_.conservativeResize(n, matrix_.cols() + 1);
    matrix_.col(matrix_.cols() - 1) =
        Eigen::Map<const Eigen::VectorXd>(values.data(), n);
    names_.push_back(std::move(name));
    return *this;
  }

  DesignMatrix& add(std::string name, const std::vector<double>& values) {
    return add(std::move(name), std::span<const double>(values));
  }

  std::size_t rows() const { return static_cast<std::size_t>(matrix_.rows()); }
  std::size_t cols() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

  std::size_t index_of(std::string_view name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) {
      throw ContractViolation("no design column named '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - names_.begin());
  }

 private:
  std::vector<std::string> names_;
  Eigen::MatrixXd matrix_;
};

// HAC lag truncation: either fixed or the n-dependent automatic rule
// L = floor(4 (n/100)^(2/9)).
class HacBandwidth {
 public:
  static HacBandwidth automatic() { return HacBandwidth(); }
  static HacBandwidth fixed(std::size_t lags) { return HacBandwidth(lags); }

  static HacBandwidth parse(std::string_view text) {
    if (text == "auto") return automatic();
    std::size_t lags = 0;
    try {
      std::size_t pos = 0;
      const long v = std::stol(std::string(text), &pos);
      if (pos != text.size() || v < 0) throw std::invalid_argument("");
      lags = static_cast<std::size_t>(v);
    } catch (const std::logic_error&) {
      throw ConfigError("HAC bandwidth must be 'auto' or a nonnegative integer, got '" +
                        std::string(text) + "'");
    }
    return fixed(lags);
  }

  bool is_auto() const { return !lags_; }

  std::size_t resolve(std::size_t n) const {
    if (lags_) return *lags_;
    return static_cast<std::size_t>(
        std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 2.0 / 9.0)));
  }

  std::string to_string() const {
    return lags_ ? std::to_string(*lags_) : std::string("auto");
  }

 private:
  HacBandwidth() = default;
  explicit HacBandwidth(std::size_t lags) : lags_(lags) {}
  std::optional<std::size_t> lags_;
};

struct ModelFit {
  std::vector<std::string> names;
  Eigen::VectorXd beta;
  Eigen::VectorXd residuals;
  Eigen::VectorXd fitted;
  Eigen::MatrixXd xtx_inv;  // (X'X)^-1, the sandwich bread
  std::optional<Eigen::MatrixXd> hac_cov;
  double r_squared = 0.0;
  bool centered = false;  // R^2 uses the centered total sum of squares
  double ssr = 0.0;
  std::size_t nobs = 0;
  std::optional<std::size_t> bandwidth;  // lags used for hac_cov

  std::size_t index_of(std::string_view name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
      throw ContractViolation("fit has no coefficient '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - names.begin());
  }

  double coef(std::string_view name) const {
    return beta(static_cast<Eigen::Index>(index_of(name)));
  }

  double std_error(std::string_view name) const {
    if (!hac_cov) throw ContractViolation("HAC covariance not computed");
    const auto i = static_cast<Eigen::Index>(index_of(name));
    return std::sqrt((*hac_cov)(i, i));
  }
};

struct WaldResult {
  std::vector<std::string> restriction_labels;
  double statistic = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;
};

// Chi-square survival function Q(df/2, x/2).
inline double chi2_sf(double x, double df) {
  if (!(x >= 0.0)) throw DomainError("chi2_sf: x must be nonnegative");
  if (!(df > 0.0)) throw DomainError("chi2_sf: df must be positive");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(df / 2.0, x / 2.0);
}

namespace detail {

using Qr = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>;

inline Qr factor(const Eigen::MatrixXd& x) {
  Qr qr(x.rows(), x.cols());
  qr.setThreshold(kRankTolerance);
  qr.compute(x);
  return qr;
}

// Name of the first column, in design order, that lies in the span of the
// columns before it.
inline std::string first_dependent_column(const DesignMatrix& x) {
  for (std::size_t j = 1; j <= x.cols(); ++j) {
    const auto qr = factor(x.matrix().leftCols(static_cast<Eigen::Index>(j)));
    if (static_cast<std::size_t>(qr.rank()) < j) return x.names()[j - 1];
  }
  return x.names().back();
}

inline Eigen::MatrixXd bread_from_qr(const Qr& qr) {
  const Eigen::Index k = qr.cols();
  const Eigen::MatrixXd r =
      qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(
      Eigen::MatrixXd::Identity(k, k));
  const Eigen::MatrixXd inner = r_inv * r_inv.transpose();
  const auto& p = qr.colsPermutation();
  Eigen::MatrixXd out = p * inner * p.transpose();
  return (out + out.transpose()) / 2.0;
}

inline Qr checked_factor(const DesignMatrix& x) {
  if (x.cols() == 0) throw ContractViolation("design matrix has no columns");
  if (x.rows() <= x.cols()) {
    throw InsufficientDataError("need more observations (" + std::to_string(x.rows()) +
                                ") than regressors (" + std::to_string(x.cols()) + ")");
  }
  auto qr = factor(x.matrix());
  if (static_cast<std::size_t>(qr.rank()) < x.cols()) {
    throw SingularDesignError(first_dependent_column(x));
  }
  return qr;
}

// (X'X)^-1 [sum_j w_j Gamma_j] (X'X)^-1 with Bartlett weights.
inline Eigen::MatrixXd sandwich(const Eigen::MatrixXd& x,
                                const Eigen::VectorXd& u,
                                const Eigen::MatrixXd& bread,
                                std::size_t lags) {
  const Eigen::Index n = x.rows();
  const Eigen::MatrixXd scores = x.array().colwise() * u.array();
  Eigen::MatrixXd meat = scores.transpose() * scores;
  for (std::size_t j = 1; j <= lags; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double w = 1.0 - static_cast<double>(j) / static_cast<double>(lags + 1);
    const Eigen::MatrixXd gamma =
        scores.bottomRows(n - jj).transpose() * scores.topRows(n - jj);
    meat += w * (gamma + gamma.transpose());
  }
  Eigen::MatrixXd v = bread * meat * bread;
  return (v + v.transpose()) / 2.0;
}

inline std::size_t checked_lags(const HacBandwidth& bw, std::size_t n) {
  const std::size_t lags = bw.resolve(n);
  if (lags >= n) {
    throw BandwidthError("HAC bandwidth " + std::to_string(lags) +
                         " must be smaller than the sample size " + std::to_string(n));
  }
  return lags;
}

}  // namespace detail

// Least squares by column-pivoted Householder QR. hac_cov is left empty.
inline ModelFit ols_fit(const DesignMatrix& x, std::span<const double> y) {
  if (y.size() != x.rows()) {
    throw ContractViolation("regressand has " + std::to_string(y.size()) +
                            " rows, design has " + std::to_string(x.rows()));
  }
  const auto qr = detail::checked_factor(x);
  const Eigen::Index n = x.matrix().rows();
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);

  ModelFit fit;
  fit.names = x.names();
  fit.nobs = x.rows();
  fit.beta = qr.solve(yv);
  fit.fitted = x.matrix() * fit.beta;
  fit.residuals = yv - fit.fitted;
  fit.xtx_inv = detail::bread_from_qr(qr);
  fit.ssr = fit.residuals.squaredNorm();

  // Centered R^2 whenever the constant lies in the column space (intercept or
  // a complete dummy set); uncentered otherwise.
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd ones_resid = ones - x.matrix() * qr.solve(ones);
  fit.centered = ones_resid.norm() <= 1e-8 * std::sqrt(static_cast<double>(n));
  const double sst = fit.centered ? (yv.array() - yv.mean()).matrix().squaredNorm()
                                  : yv.squaredNorm();
  fit.r_squared = sst > 0.0 ? 1.0 - fit.ssr / sst : 0.0;
  return fit;
}

inline Eigen::MatrixXd hac_cov(const DesignMatrix& x, const Eigen::VectorXd& residuals,
                               const HacBandwidth& bandwidth) {
  if (static_cast<std::size_t>(residuals.size()) != x.rows()) {
    throw ContractViolation("residual length does not match the design");
  }
  const std::size_t lags = detail::checked_lags(bandwidth, x.rows());
  const auto qr = detail::checked_factor(x);
  return detail::sandwich(x.matrix(), residuals, detail::bread_from_qr(qr), lags);
}

// ols_fit followed by the HAC covariance, sharing one factorization.
inline ModelFit ols_fit_hac(const DesignMatrix& x, std::span<const double> y,
                            const HacBandwidth& bandwidth) {
  const std::size_t lags = detail::checked_lags(bandwidth, x.rows());
  ModelFit fit = ols_fit(x, y);
  fit.hac_cov = detail::sandwich(x.matrix(), fit.residuals, fit.xtx_inv, lags);
  fit.bandwidth = lags;
  return fit;
}

// Wald test that the named coefficients are jointly zero.
inline WaldResult wald_test(const ModelFit& fit, const std::vector<std::string>& restricted) {
  if (restricted.empty()) throw ContractViolation("empty restriction set");
  if (!fit.hac_cov) throw ContractViolation("wald_test needs a HAC covariance");
  if (std::set<std::string>(restricted.begin(), restricted.end()).size() != restricted.size()) {
    throw ContractViolation("duplicate names in restriction set");
  }
  const auto q = static_cast<Eigen::Index>(restricted.size());
  Eigen::VectorXd b(q);
  Eigen::MatrixXd v(q, q);
  std::vector<Eigen::Index> idx;
  for (const auto& name : restricted) {
    idx.push_back(static_cast<Eigen::Index>(fit.index_of(name)));
  }
  for (Eigen::Index i = 0; i < q; ++i) {
    b(i) = fit.beta(idx[i]);
    for (Eigen::Index j = 0; j < q; ++j) v(i, j) = (*fit.hac_cov)(idx[i], idx[j]);
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(v);
  const auto& lambda = eig.eigenvalues();
  if (eig.info() != Eigen::Success || !(lambda.maxCoeff() > 0.0) ||
      lambda.minCoeff() <= 1e-12 * lambda.maxCoeff()) {
    throw TestDegeneracyError("covariance of the restricted coefficients is singular");
  }
  const Eigen::VectorXd proj = eig.eigenvectors().transpose() * b;
  WaldResult r;
  r.restriction_labels = restricted;
  r.statistic = (proj.array().square() / lambda.array()).sum();
  r.df = restricted.size();
  r.p_value = chi2_sf(r.statistic, static_cast<double>(r.df));
  return r;
}

}  // namespace tempdyn::linreg
