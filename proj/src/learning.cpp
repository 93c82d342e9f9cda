#include "tab/learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SVD>

#include "tab/error.hpp"

namespace tab {

namespace {

void require_finite(const Eigen::MatrixXd& h) {
  if (h.size() == 0) throw InvalidParameter("matrix is empty");
  if (!h.allFinite()) throw InvalidParameter("matrix has non-finite entries");
}

Eigen::BDCSVD<Eigen::MatrixXd> thin_svd(const Eigen::MatrixXd& h) {
  return Eigen::BDCSVD<Eigen::MatrixXd>(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

Eigen::Index retained(const Eigen::VectorXd& sv, double tol) {
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  const double cutoff = tol * sv(0);
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > cutoff) ++r;
  return r;
}

// Rows n of P = H H^+ with max|P[n,:] - e_n| <= tol.
Eigen::Index identity_rows(const Eigen::MatrixXd& projector, double tol) {
  Eigen::Index count = 0;
  for (Eigen::Index n = 0; n < projector.rows(); ++n) {
    Eigen::RowVectorXd row = projector.row(n);
    row(n) -= 1.0;
    if (row.cwiseAbs().maxCoeff() <= tol) ++count;
  }
  return count;
}

}  // namespace

double auto_tolerance(const Eigen::MatrixXd& h) {
  return static_cast<double>(std::max(h.rows(), h.cols())) *
         std::numeric_limits<double>::epsilon();
}

PseudoinverseResult pseudoinverse(const Eigen::MatrixXd& h, std::optional<double> tol) {
  require_finite(h);
  const double rel = tol.value_or(auto_tolerance(h));
  if (!(rel >= 0.0) || !std::isfinite(rel)) throw InvalidParameter("tolerance must be non-negative");

  const auto svd = thin_svd(h);
  const Eigen::VectorXd& sv = svd.singularValues();
  const Eigen::Index r = retained(sv, rel);

  PseudoinverseResult out;
  out.effective_rank = r;
  out.tolerance_used = rel;
  // H^+ = V_r diag(1/s_r) U_r^T
  out.pinv = svd.matrixV().leftCols(r) * sv.head(r).cwiseInverse().asDiagonal() *
             svd.matrixU().leftCols(r).transpose();
  return out;
}

double rmse(const Eigen::MatrixXd& target, const Eigen::MatrixXd& estimate) {
  if (target.rows() != estimate.rows() || target.cols() != estimate.cols()) {
    throw DimensionMismatch("rmse operands differ in shape");
  }
  if (target.size() == 0) return 0.0;
  return std::sqrt((target - estimate).squaredNorm() / static_cast<double>(target.size()));
}

double nrmse(const Eigen::MatrixXd& target, const Eigen::MatrixXd& estimate) {
  const double err = rmse(target, estimate);
  if (target.size() == 0) return err;
  const double mean = target.mean();
  const double sd = std::sqrt((target.array() - mean).square().mean());
  return sd > 0.0 ? err / sd : err;
}

Eigen::MatrixXd TrainReport::quantized_weights() const {
  if (!quantized) throw InvalidParameter("training did not quantize weights");
  Eigen::MatrixXd w(weights.rows(), weights.cols());
  for (Eigen::Index k = 0; k < w.cols(); ++k) {
    const auto& q = (*quantized)[static_cast<std::size_t>(k)];
    for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, k) = q.value(static_cast<std::size_t>(i));
  }
  return w;
}

TrainReport train(const Eigen::MatrixXd& h, const Eigen::MatrixXd& y, const TrainOptions& opts) {
  require_finite(h);
  if (h.rows() != y.rows()) {
    throw DimensionMismatch("H has " + std::to_string(h.rows()) + " rows but Y has " +
                            std::to_string(y.rows()));
  }
  if (y.cols() < 1) throw DimensionMismatch("Y needs at least one output column");
  if (!y.allFinite()) throw InvalidParameter("targets must be finite");
  if (!(opts.ridge >= 0.0)) throw InvalidParameter("ridge must be non-negative");

  TrainReport report;
  const PseudoinverseResult pinv = pseudoinverse(h, opts.tol);
  report.effective_rank = pinv.effective_rank;
  if (opts.ridge > 0.0) {
    // W = V diag(s / (s^2 + lambda)) U^T Y
    const auto svd = thin_svd(h);
    const Eigen::VectorXd& s = svd.singularValues();
    const Eigen::VectorXd filt = s.array() / (s.array().square() + opts.ridge);
    report.weights = svd.matrixV() * filt.asDiagonal() * (svd.matrixU().transpose() * y);
    report.ridge_active = true;
  } else {
    report.weights = pinv.pinv * y;
  }

  const Eigen::MatrixXd fitted = h * report.weights;
  report.train_rmse = rmse(y, fitted);
  report.train_nrmse = nrmse(y, fitted);

  if (opts.quant_bits) {
    std::vector<QuantizedWeightVector> q;
    q.reserve(static_cast<std::size_t>(y.cols()));
    for (Eigen::Index k = 0; k < y.cols(); ++k) {
      const Eigen::VectorXd col = report.weights.col(k);
      q.push_back(quantize_vector(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())),
                                  *opts.quant_bits));
    }
    report.quantized = std::move(q);
    const Eigen::MatrixXd fitted_q = h * report.quantized_weights();
    report.quantized_train_rmse = rmse(y, fitted_q);
    report.quantized_train_nrmse = nrmse(y, fitted_q);
  }

  report.capacity = identity_rows(h * pinv.pinv, opts.capacity_tol);
  return report;
}

CapacityResult encoding_capacity(const Eigen::MatrixXd& h, double tol) {
  const PseudoinverseResult pinv = pseudoinverse(h);
  CapacityResult out;
  out.capacity = identity_rows(h * pinv.pinv, tol);
  out.full = out.capacity == h.rows();
  return out;
}

ConditionDiagnostics condition_diagnostics(const Eigen::MatrixXd& h) {
  require_finite(h);
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(h);
  const Eigen::VectorXd& sv = svd.singularValues();
  ConditionDiagnostics out;
  out.rank = retained(sv, auto_tolerance(h));
  if (out.rank > 0) {
    out.min_sv = sv(out.rank - 1);
    out.condition_number = sv(0) / out.min_sv;
  }
  return out;
}

}  // namespace tab
