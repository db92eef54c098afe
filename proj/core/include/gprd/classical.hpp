#pragma once

#include <cstddef>
#include <vector>

#include "gprd/radargram.hpp"

/// Baseline clutter-removal algorithms.
namespace gprd::classical {

/// Subtracts the mean trace over columns col_start..col_end (1-based,
/// inclusive) from every trace.
Radargram mean_subtraction(const Radargram& r, std::size_t col_start,
                           std::size_t col_end);
/// Window spanning every column.
Radargram mean_subtraction(const Radargram& r);

/// Removes the k dominant singular components of the B-scan matrix.
Radargram svd_removal(const Radargram& r, std::size_t k = 1);

struct RpcaOptions {
  double lambda = 3e-2;
  double tol = 1e-7;
  std::size_t max_iter = 1000;
  /// Penalty schedule: mu_0 = mu_scale / ||M||_2, mu <- rho * mu.
  double mu_scale = 1.25;
  double rho = 1.5;
};

struct RpcaResult {
  Radargram low_rank;
  Radargram sparse;
  std::size_t iterations = 0;
  double residual = 0.0;  ///< ||M - L - S||_F / ||M||_F at exit
  bool converged = false;
  /// ||L||_* + lambda ||M - L||_1 after each iteration, i.e. the objective at
  /// the feasible pair (L, M - L).
  std::vector<double> objective;
};

/// Robust PCA by the inexact augmented Lagrange multiplier method. When
/// max_iter is reached the last iterate is returned with converged = false.
RpcaResult rpca_decompose(const Radargram& r, const RpcaOptions& options = {});

}  // namespace gprd::classical
