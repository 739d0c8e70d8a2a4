#pragma once

// Weighted nonlinear least squares: damped Gauss-Newton with Levenberg-Marquardt
// damping and Marquardt diagonal scaling, box bounds by projection.

#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qpower/series.hpp"

namespace qpower {

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Data cannot constrain the requested parameters (e.g. unresolved peaks).
class ConditioningError : public FitError {
 public:
  using FitError::FitError;
};

/// No usable starting point could be derived from the data.
class InitializationError : public FitError {
 public:
  using FitError::FitError;
};

struct Parameter {
  std::string name;
  double value = 0.0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  bool fixed = false;
  double scale = 0.0;  // typical magnitude; 0 means |value| (or 1 if value is 0)
};

struct FitResult {
  std::vector<std::string> names;
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;  // zero rows/columns for fixed parameters
  std::vector<bool> fixed;
  double chi2 = 0.0;
  double reduced_chi2 = 0.0;
  int dof = 0;
  bool converged = false;
  int n_iter = 0;
  std::vector<std::string> warnings;
  std::map<std::string, double> derived;  // fitter-specific quantities

  std::size_t index(std::string_view name) const;
  double value(std::string_view name) const;
  double sigma(std::string_view name) const;
  double rel_sigma(std::string_view name) const { return sigma(name) / std::abs(value(name)); }
};

struct LeastSquaresOptions {
  int max_iter = 500;
  double step_tol = 1e-10;   // max relative parameter step
  double cost_tol = 1e-12;   // relative cost change
};

/// Weighted residual vector for a full parameter vector.
using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
/// d residual / d parameter for all parameters (rows = residuals).
using JacobianFunction = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

FitResult minimize(const ResidualFunction& residuals, std::vector<Parameter> params,
                   const LeastSquaresOptions& options = {},
                   const JacobianFunction& jacobian = {});

/// Central-difference Jacobian of the residuals.
Eigen::MatrixXd numeric_jacobian(const ResidualFunction& residuals, const Eigen::VectorXd& p,
                                 std::span<const Parameter> params);

/// Model value at x. Real-valued series ignore the imaginary part.
using Model = std::function<std::complex<double>(std::span<const double> params, double x)>;
/// d model / d params at x, written into grad (one entry per parameter).
using ModelGradient = std::function<void(std::span<const double> params, double x,
                                         std::span<std::complex<double>> grad)>;

/// Fits model to the series with weights 1/sigma^2 (unit weights if every sigma
/// is zero). Complex data contributes separate real and imaginary residuals.
/// The covariance is (J^T W J)^-1 scaled by the reduced chi-square.
FitResult least_squares(const Model& model, const MeasurementSeries& data,
                        std::vector<Parameter> params, const LeastSquaresOptions& options = {},
                        const ModelGradient& gradient = {});

/// Weighted residual function and analytic Jacobian for a model/series pair.
ResidualFunction series_residuals(const Model& model, const MeasurementSeries& data);
JacobianFunction series_jacobian(const ModelGradient& gradient, const MeasurementSeries& data,
                                 std::size_t n_params);

}  // namespace qpower
