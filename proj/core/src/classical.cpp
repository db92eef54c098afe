#include "gprd/classical.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

#include "gprd/errors.hpp"

namespace gprd::classical {

namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Matrix to_matrix(const Radargram& r) {
  return Eigen::Map<const Matrix>(r.data().data(),
                                  static_cast<Eigen::Index>(r.height()),
                                  static_cast<Eigen::Index>(r.width()));
}

Radargram from_matrix(const Radargram& like, const Matrix& m) {
  return like.with_data(std::vector<double>(m.data(), m.data() + m.size()));
}

double soft(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

}  // namespace

Radargram mean_subtraction(const Radargram& r, std::size_t col_start,
                           std::size_t col_end) {
  if (col_start < 1 || col_start > col_end || col_end > r.width()) {
    throw InvalidArgument("mean-subtraction window [" + std::to_string(col_start) +
                          ", " + std::to_string(col_end) + "] invalid for " +
                          std::to_string(r.width()) + " traces");
  }
  const std::size_t w = r.width();
  const double count = static_cast<double>(col_end - col_start + 1);
  std::vector<double> out(r.size());
  for (std::size_t i = 0; i < r.height(); ++i) {
    double mean = 0.0;
    for (std::size_t j = col_start - 1; j < col_end; ++j) mean += r(i, j);
    mean /= count;
    for (std::size_t j = 0; j < w; ++j) out[i * w + j] = r(i, j) - mean;
  }
  return r.with_data(std::move(out));
}

Radargram mean_subtraction(const Radargram& r) {
  return mean_subtraction(r, 1, r.width());
}

Radargram svd_removal(const Radargram& r, std::size_t k) {
  const std::size_t rank_limit = std::min(r.height(), r.width());
  if (k < 1 || k > rank_limit) {
    throw InvalidArgument("svd_removal k=" + std::to_string(k) +
                          " outside [1, " + std::to_string(rank_limit) + "]");
  }
  const Matrix x = to_matrix(r);
  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto kk = static_cast<Eigen::Index>(k);
  const Matrix dominant = svd.matrixU().leftCols(kk) *
                          svd.singularValues().head(kk).asDiagonal() *
                          svd.matrixV().leftCols(kk).transpose();
  return from_matrix(r, x - dominant);
}

RpcaResult rpca_decompose(const Radargram& r, const RpcaOptions& options) {
  if (!(options.lambda > 0.0)) {
    throw InvalidArgument("rpca lambda must be > 0");
  }
  if (!(options.tol > 0.0) || options.max_iter == 0 || !(options.rho > 1.0) ||
      !(options.mu_scale > 0.0)) {
    throw InvalidArgument("rpca requires tol > 0, max_iter >= 1, rho > 1, mu_scale > 0");
  }
  const Matrix m = to_matrix(r);
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  const double norm_fro = m.norm();

  RpcaResult result{Radargram::filled(r.height(), r.width(), 0.0, r.trace_spacing(),
                                      r.time_window(), r.label()),
                    Radargram::filled(r.height(), r.width(), 0.0, r.trace_spacing(),
                                      r.time_window(), r.label()),
                    0, 0.0, false, {}};
  if (norm_fro == 0.0) {
    result.iterations = 1;
    result.converged = true;
    result.objective.push_back(0.0);
    return result;
  }

  Eigen::BDCSVD<Matrix> top(m);
  const double norm_two = top.singularValues()(0);
  const double norm_inf = m.cwiseAbs().maxCoeff() / options.lambda;
  Matrix y = m / std::max(norm_two, norm_inf);
  Matrix low = Matrix::Zero(rows, cols);
  Matrix sparse = Matrix::Zero(rows, cols);
  double mu = options.mu_scale / norm_two;

  for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
    // Singular-value thresholding of M - S + Y/mu at 1/mu.
    Eigen::BDCSVD<Matrix> svd(m - sparse + y / mu,
                              Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    Eigen::Index kept = 0;
    while (kept < sigma.size() && sigma(kept) > 1.0 / mu) ++kept;
    double nuclear = 0.0;
    if (kept > 0) {
      Eigen::VectorXd shrunk = sigma.head(kept).array() - 1.0 / mu;
      nuclear = shrunk.sum();
      low = svd.matrixU().leftCols(kept) * shrunk.asDiagonal() *
            svd.matrixV().leftCols(kept).transpose();
    } else {
      low.setZero();
    }

    const double threshold = options.lambda / mu;
    sparse = (m - low + y / mu).unaryExpr([threshold](double v) { return soft(v, threshold); });

    const Matrix gap = m - low - sparse;
    y += mu * gap;
    mu *= options.rho;

    result.objective.push_back(nuclear + options.lambda * (m - low).cwiseAbs().sum());
    result.iterations = iter;
    result.residual = gap.norm() / norm_fro;
    if (result.residual < options.tol) {
      result.converged = true;
      break;
    }
  }
  result.low_rank = from_matrix(r, low);
  result.sparse = from_matrix(r, sparse);
  return result;
}

}  // namespace gprd::classical
