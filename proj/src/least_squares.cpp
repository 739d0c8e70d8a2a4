#include "qpower/fit.hpp"

#include <algorithm>
#include <cmath>

namespace qpower {
namespace {

double typical(const Parameter& p) {
  if (p.scale > 0.0) return p.scale;
  return p.value != 0.0 ? std::abs(p.value) : 1.0;
}

Eigen::VectorXd clamp_to_bounds(Eigen::VectorXd p, std::span<const Parameter> params) {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const auto& spec = params[static_cast<std::size_t>(i)];
    p[i] = std::clamp(p[i], spec.lower, spec.upper);
  }
  return p;
}

std::vector<double> effective_sigma(const MeasurementSeries& data) {
  const bool all_zero =
      std::all_of(data.sigma.begin(), data.sigma.end(), [](double s) { return s == 0.0; });
  if (all_zero) return std::vector<double>(data.size(), 1.0);
  for (double s : data.sigma) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw FitError("least_squares: sigma must be positive and finite at every point");
    }
  }
  return data.sigma;
}

}  // namespace

std::size_t FitResult::index(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  throw std::out_of_range("no fit parameter named '" + std::string(name) + "'");
}

double FitResult::value(std::string_view name) const {
  return params[static_cast<Eigen::Index>(index(name))];
}

double FitResult::sigma(std::string_view name) const {
  const auto i = static_cast<Eigen::Index>(index(name));
  return std::sqrt(std::max(0.0, covariance(i, i)));
}

Eigen::MatrixXd numeric_jacobian(const ResidualFunction& residuals, const Eigen::VectorXd& p,
                                 std::span<const Parameter> params) {
  const Eigen::VectorXd r0 = residuals(p);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(r0.size(), p.size());
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const auto& spec = params[static_cast<std::size_t>(j)];
    if (spec.fixed) continue;
    const double h = 6e-6 * (std::abs(p[j]) + typical(spec));
    Eigen::VectorXd hi = p;
    Eigen::VectorXd lo = p;
    hi[j] = std::min(p[j] + h, spec.upper);
    lo[j] = std::max(p[j] - h, spec.lower);
    const double span = hi[j] - lo[j];
    if (span <= 0.0) continue;
    jac.col(j) = (residuals(hi) - residuals(lo)) / span;
  }
  return jac;
}

FitResult minimize(const ResidualFunction& residuals, std::vector<Parameter> params,
                   const LeastSquaresOptions& options, const JacobianFunction& jacobian) {
  const auto n = static_cast<Eigen::Index>(params.size());
  std::vector<Eigen::Index> free;
  Eigen::VectorXd p(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& spec = params[static_cast<std::size_t>(i)];
    if (spec.value < spec.lower || spec.value > spec.upper) {
      throw FitError("initial value of '" + spec.name + "' is outside its bounds");
    }
    p[i] = spec.value;
    if (!spec.fixed) free.push_back(i);
  }
  const auto nf = static_cast<Eigen::Index>(free.size());

  auto full_jacobian = [&](const Eigen::VectorXd& x) {
    return jacobian ? jacobian(x) : numeric_jacobian(residuals, x, params);
  };
  auto free_jacobian = [&](const Eigen::VectorXd& x) {
    const Eigen::MatrixXd full = full_jacobian(x);
    Eigen::MatrixXd out(full.rows(), nf);
    for (Eigen::Index k = 0; k < nf; ++k) out.col(k) = full.col(free[static_cast<std::size_t>(k)]);
    return out;
  };

  Eigen::VectorXd r = residuals(p);
  const Eigen::Index m = r.size();
  if (m < nf) throw FitError("least_squares: fewer residuals than free parameters");
  double cost = 0.5 * r.squaredNorm();

  FitResult result;
  double mu = 1e-3;
  double nu = 2.0;
  int iter = 0;
  bool converged = nf == 0 || cost == 0.0;

  while (!converged && iter < options.max_iter) {
    ++iter;
    const Eigen::MatrixXd jac = free_jacobian(p);
    const Eigen::MatrixXd a = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;
    Eigen::VectorXd diag = a.diagonal();
    const double diag_floor = 1e-30 * std::max(1e-300, diag.maxCoeff());
    for (Eigen::Index k = 0; k < nf; ++k) diag[k] = std::max(diag[k], diag_floor);

    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd damped = a;
      damped.diagonal() += mu * diag;
      const Eigen::VectorXd step = damped.ldlt().solve(-g);

      Eigen::VectorXd trial = p;
      for (Eigen::Index k = 0; k < nf; ++k) trial[free[static_cast<std::size_t>(k)]] += step[k];
      trial = clamp_to_bounds(trial, params);

      double rel_step = 0.0;
      for (Eigen::Index k = 0; k < nf; ++k) {
        const auto i = free[static_cast<std::size_t>(k)];
        const double dp = trial[i] - p[i];
        rel_step = std::max(rel_step, std::abs(dp) / (std::abs(p[i]) + 1e-12 * typical(params[static_cast<std::size_t>(i)])));
      }

      const Eigen::VectorXd r_trial = residuals(trial);
      const double cost_trial = 0.5 * r_trial.squaredNorm();
      if (std::isfinite(cost_trial) && cost_trial <= cost) {
        const double predicted = -(g.dot(step) + 0.5 * step.dot(a * step));
        const double rho = predicted > 0.0 ? (cost - cost_trial) / predicted : 0.0;
        const double rel_cost = cost > 0.0 ? (cost - cost_trial) / cost : 0.0;
        p = trial;
        r = r_trial;
        cost = cost_trial;
        mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
        nu = 2.0;
        accepted = true;
        if (rel_step < options.step_tol || rel_cost < options.cost_tol || cost == 0.0) {
          converged = true;
        }
      } else {
        mu *= nu;
        nu *= 2.0;
        // no representable improvement left along any damped direction
        if (rel_step < options.step_tol || mu > 1e30) {
          converged = rel_step < options.step_tol || g.norm() <= 1e-12 * std::sqrt(2.0 * cost) * std::sqrt(a.trace());
          break;
        }
      }
    }
    if (!accepted) break;
  }

  result.names.reserve(params.size());
  for (const auto& spec : params) {
    result.names.push_back(spec.name);
    result.fixed.push_back(spec.fixed);
  }
  result.params = p;
  result.converged = converged;
  result.n_iter = iter;
  result.chi2 = 2.0 * cost;
  result.dof = static_cast<int>(m - nf);
  result.reduced_chi2 = result.dof > 0 ? result.chi2 / result.dof
                                       : std::numeric_limits<double>::quiet_NaN();
  result.covariance = Eigen::MatrixXd::Zero(n, n);
  if (nf == 0) return result;

  const Eigen::MatrixXd jac = free_jacobian(p);
  const Eigen::MatrixXd a = jac.transpose() * jac;
  Eigen::VectorXd inv_scale(nf);
  for (Eigen::Index k = 0; k < nf; ++k) {
    if (!(a(k, k) > 0.0)) {
      throw FitError("rank-deficient normal matrix: data do not depend on '" +
                     params[static_cast<std::size_t>(free[static_cast<std::size_t>(k)])].name + "'");
    }
    inv_scale[k] = 1.0 / std::sqrt(a(k, k));
  }
  const Eigen::MatrixXd scaled = inv_scale.asDiagonal() * a * inv_scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (!(min_eig > 1e-13 * eig.eigenvalues().maxCoeff())) {
    throw FitError("rank-deficient normal matrix (parameters are not jointly identifiable)");
  }
  const Eigen::MatrixXd scaled_inv =
      eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
      eig.eigenvectors().transpose();
  Eigen::MatrixXd cov_free = inv_scale.asDiagonal() * scaled_inv * inv_scale.asDiagonal();
  if (result.dof > 0) cov_free *= result.reduced_chi2;
  cov_free = 0.5 * (cov_free + cov_free.transpose());
  for (Eigen::Index a_i = 0; a_i < nf; ++a_i) {
    for (Eigen::Index b_i = 0; b_i < nf; ++b_i) {
      result.covariance(free[static_cast<std::size_t>(a_i)], free[static_cast<std::size_t>(b_i)]) =
          cov_free(a_i, b_i);
    }
  }
  if (!converged) result.warnings.push_back("least squares did not converge");
  return result;
}

ResidualFunction series_residuals(const Model& model, const MeasurementSeries& data) {
  data.check_shape();
  const auto sigma = effective_sigma(data);
  const bool cplx = data.complex_valued();
  return [&model, &data, sigma, cplx](const Eigen::VectorXd& p) {
    const std::span<const double> ps(p.data(), static_cast<std::size_t>(p.size()));
    const std::size_t n = data.size();
    Eigen::VectorXd r(static_cast<Eigen::Index>(cplx ? 2 * n : n));
    for (std::size_t i = 0; i < n; ++i) {
      const std::complex<double> d = (data.y[i] - model(ps, data.x[i])) / sigma[i];
      if (cplx) {
        r[static_cast<Eigen::Index>(2 * i)] = d.real();
        r[static_cast<Eigen::Index>(2 * i + 1)] = d.imag();
      } else {
        r[static_cast<Eigen::Index>(i)] = d.real();
      }
    }
    return r;
  };
}

JacobianFunction series_jacobian(const ModelGradient& gradient, const MeasurementSeries& data,
                                 std::size_t n_params) {
  const auto sigma = effective_sigma(data);
  const bool cplx = data.complex_valued();
  return [&gradient, &data, sigma, cplx, n_params](const Eigen::VectorXd& p) {
    const std::span<const double> ps(p.data(), static_cast<std::size_t>(p.size()));
    const std::size_t n = data.size();
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(cplx ? 2 * n : n),
                        static_cast<Eigen::Index>(n_params));
    std::vector<std::complex<double>> grad(n_params);
    for (std::size_t i = 0; i < n; ++i) {
      gradient(ps, data.x[i], grad);
      for (std::size_t j = 0; j < n_params; ++j) {
        const std::complex<double> d = -grad[j] / sigma[i];
        const auto col = static_cast<Eigen::Index>(j);
        if (cplx) {
          jac(static_cast<Eigen::Index>(2 * i), col) = d.real();
          jac(static_cast<Eigen::Index>(2 * i + 1), col) = d.imag();
        } else {
          jac(static_cast<Eigen::Index>(i), col) = d.real();
        }
      }
    }
    return jac;
  };
}

FitResult least_squares(const Model& model, const MeasurementSeries& data,
                        std::vector<Parameter> params, const LeastSquaresOptions& options,
                        const ModelGradient& gradient) {
  const std::size_t n_params = params.size();
  const auto residuals = series_residuals(model, data);
  if (gradient) {
    return minimize(residuals, std::move(params), options,
                    series_jacobian(gradient, data, n_params));
  }
  return minimize(residuals, std::move(params), options);
}

}  // namespace qpower
