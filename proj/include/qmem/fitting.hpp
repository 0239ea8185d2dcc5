#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qmem/error_dynamics.hpp"
#include "qmem/readout.hpp"

namespace qmem {

struct FitResult {
  std::vector<std::string> names;
  std::vector<double> params;
  std::vector<double> sigmas;  // 1 sigma, s^2 (J^T J)^-1
  Eigen::MatrixXd covariance;
  double residual = 0.0;       // ||r||_2 at the solution
  bool converged = false;
  int iterations = 0;
  std::string diagnostics;
};

struct LeastSquaresOptions {
  int max_iterations = 200;
  double relative_step_tol = 1e-10;
};

using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Damped least squares (MINPACK Levenberg-Marquardt) with a central
/// difference Jacobian. Covariance from the Jacobian at the solution;
/// converged = false if the iteration limit is hit or J is rank deficient.
FitResult least_squares(const ResidualFunction& residuals, int n_residuals,
                        const Eigen::VectorXd& x0, const LeastSquaresOptions& options = {});

/// Global fit of A_0..A_N to the four echo channels.
/// Throws std::invalid_argument with fewer than 2(N+1) records.
FitResult fit_series(const std::vector<EchoRecord>& data, int order,
                     SeriesTail tail = SeriesTail::IdealTail,
                     std::array<double, 4> weights = {1, 1, 1, 1},
                     const LeastSquaresOptions& options = {});

enum class ExponentialKind {
  Decay,     // a exp(-t/T) + c
  Recovery,  // a (1 - 2 exp(-t/T)) + c
};

/// Parameters (a, T, c). Constant data give converged = false.
/// Throws std::invalid_argument with fewer than 4 points.
FitResult fit_exponential(const std::vector<double>& t, const std::vector<double>& y,
                          ExponentialKind kind, const LeastSquaresOptions& options = {});

struct SigmaEstimate {
  double sigma = 0.0;
  double ratio = 1.0;   // min/max or envelope ratio exp(-sigma^2 n^2)
  double fidelity = 1.0;
  double sigma_error = 0.0;
};

/// Fits S(theta) = c0 + c1 cos 2theta + c2 sin 2theta, ratio = (c0-r)/(c0+r),
/// sigma = sqrt(-ln ratio)/n. Needs n in {2, 4} and a grid spanning pi.
SigmaEstimate fit_dd_fidelity(const std::vector<double>& theta, const std::vector<double>& signal,
                              int n);

/// Regresses ln|S_n| on n^2 with a free intercept; slope = -sigma^2.
SigmaEstimate fit_nutation_envelope(const std::vector<int>& n, const std::vector<double>& signal);

/// Scale s minimising ||y - s m||.
double fit_vertical_scale(const std::vector<double>& y, const std::vector<double>& model);

/// Coefficient of determination of an ordinary straight-line fit.
double linear_r_squared(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qmem
