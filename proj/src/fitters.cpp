#include "qpower/fitters.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qpower/mixing.hpp"
#include "qpower/mollow.hpp"
#include "qpower/scattering.hpp"

namespace qpower {
namespace {

std::vector<std::size_t> sorted_order(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  return idx;
}

std::vector<double> weights_of(const std::vector<double>& sigma, std::size_t n) {
  const bool all_zero = std::all_of(sigma.begin(), sigma.end(), [](double s) { return s == 0.0; });
  std::vector<double> w(n, 1.0);
  if (all_zero) return w;
  if (sigma.size() != n) throw FitError("sigma column has the wrong length");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(sigma[i] > 0.0) || !std::isfinite(sigma[i])) {
      throw FitError("sigma must be positive and finite at every point");
    }
    w[i] = 1.0 / sigma[i];
  }
  return w;
}

void require_points(std::size_t n, std::size_t needed, const char* what) {
  if (n < needed) {
    throw FitError(std::string(what) + ": need at least " + std::to_string(needed) + " points");
  }
}

// Half-maximum crossings of a peaked real sequence around index `peak` (sorted x).
struct HalfWidth {
  double left = 0.0;
  double right = 0.0;
  bool found_left = false;
  bool found_right = false;
};

HalfWidth half_max_crossings(const std::vector<double>& xs, const std::vector<double>& ys,
                             std::size_t peak) {
  HalfWidth h;
  const double half = 0.5 * ys[peak];
  for (std::size_t i = peak; i > 0; --i) {
    if (ys[i - 1] < half) {
      const double t = (half - ys[i - 1]) / (ys[i] - ys[i - 1]);
      h.left = xs[i - 1] + t * (xs[i] - xs[i - 1]);
      h.found_left = true;
      break;
    }
  }
  for (std::size_t i = peak; i + 1 < xs.size(); ++i) {
    if (ys[i + 1] < half) {
      const double t = (ys[i] - half) / (ys[i] - ys[i + 1]);
      h.right = xs[i] + t * (xs[i + 1] - xs[i]);
      h.found_right = true;
      break;
    }
  }
  return h;
}

// ---- reflection lineshape ----------------------------------------------------

enum LineshapeParam { kG1, kG2, kCenter, kRabiSq, kOffRe, kOffIm, kLineshapeParams };

std::complex<double> lineshape_value(const Eigen::VectorXd& p, double dx) {
  const double g1 = p[kG1];
  const double g2 = p[kG2];
  const double d = dx - p[kCenter];
  const double den = g2 * g2 + d * d + p[kRabiSq] * g2 / g1;
  return 0.5 * g1 * std::complex<double>(g2, d) / den + std::complex<double>(p[kOffRe], p[kOffIm]);
}

void lineshape_gradient(const Eigen::VectorXd& p, double dx,
                        std::array<std::complex<double>, kLineshapeParams>& g) {
  const double g1 = p[kG1];
  const double g2 = p[kG2];
  const double s = p[kRabiSq];
  const double d = dx - p[kCenter];
  const double den = g2 * g2 + d * d + s * g2 / g1;
  const std::complex<double> r = 0.5 * g1 * std::complex<double>(g2, d) / den;
  g[kG1] = r / g1 + r * (s * g2 / (g1 * g1)) / den;
  g[kG2] = 0.5 * g1 / den - r * (2.0 * g2 + s / g1) / den;
  g[kCenter] = -(0.5 * g1 * std::complex<double>(0.0, 1.0) / den - r * 2.0 * d / den);
  g[kRabiSq] = -r * (g2 / g1) / den;
  g[kOffRe] = 1.0;
  g[kOffIm] = std::complex<double>(0.0, 1.0);
}

struct LineshapeStart {
  double g1, g2, center, rabi_sq, width;
};

LineshapeStart lineshape_start(const std::vector<double>& dx, const std::vector<std::complex<double>>& y,
                               bool real_only, bool weak) {
  const auto order = sorted_order(dx);
  std::vector<double> xs, re;
  for (auto i : order) {
    xs.push_back(dx[i]);
    re.push_back(y[i].real());
  }
  const auto peak = static_cast<std::size_t>(std::max_element(re.begin(), re.end()) - re.begin());
  const double re_max = re[peak];
  if (!(re_max > 0.0)) throw InitializationError("reflection lineshape has no positive peak");

  const auto h = half_max_crossings(xs, re, peak);
  double width;
  double center = xs[peak];
  if (h.found_left && h.found_right) {
    width = 0.5 * (h.right - h.left);
    center = 0.5 * (h.left + h.right);
  } else if (h.found_left) {
    width = xs[peak] - h.left;
  } else if (h.found_right) {
    width = h.right - xs[peak];
  } else {
    width = xs.back() - xs.front();
  }
  if (!(width > 0.0)) throw InitializationError("cannot estimate the reflection linewidth");

  double g2 = width;
  if (!real_only) {
    // Im r / Re r = (dx - center) / G2 near the peak
    double s_w = 0, s_x = 0, s_y = 0, s_xx = 0, s_xy = 0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < dx.size(); ++i) {
      const double rr = y[i].real();
      if (rr < 0.5 * re_max) continue;
      const double w = rr * rr;
      const double q = y[i].imag() / rr;
      s_w += w;
      s_x += w * dx[i];
      s_y += w * q;
      s_xx += w * dx[i] * dx[i];
      s_xy += w * dx[i] * q;
      ++used;
    }
    const double det = s_w * s_xx - s_x * s_x;
    if (used >= 3 && det > 0.0) {
      const double slope = (s_w * s_xy - s_x * s_y) / det;
      const double intercept = (s_y - slope * s_x) / s_w;
      if (slope > 0.0) {
        g2 = std::min(1.0 / slope, width);
        center = -intercept / slope;
      }
    }
  }
  const double g1 = 2.0 * width * width * re_max / g2;
  const double rabi_sq = weak ? 0.0 : std::max(0.0, (width * width - g2 * g2) * g1 / g2);
  return {g1, g2, center, rabi_sq, width};
}

// ---- r versus power ------------------------------------------------------------

double r_vs_power_model(double k, double offset, double w, double g1, double g2) {
  return g1 / (2.0 * g2) / (1.0 + k * w / (g1 * g2)) + offset;
}

FitResult r_vs_power_core(const PowerSweep& data, double g1, double g2,
                          const PowerSweepOptions& options) {
  const std::size_t n = data.w_in.size();
  if (data.r_res.size() != n) throw std::invalid_argument("fit_r_vs_power: column length mismatch");
  require_points(n, options.fit_offset ? 3 : 2, "fit_r_vs_power");
  const auto w = weights_of(data.sigma, n);
  const double ceiling = g1 / (2.0 * g2);

  const bool saturated = std::all_of(data.r_res.begin(), data.r_res.end(),
                                     [&](double r) { return r < 0.02 * ceiling; });
  if (saturated) {
    throw ConditioningError("fit_r_vs_power: every point is saturated (r close to 0), k is unconstrained");
  }

  std::vector<double> k_point;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = data.r_res[i];
    if (data.w_in[i] > 0.0 && r > 0.0 && r < ceiling) {
      k_point.push_back((ceiling / r - 1.0) * g1 * g2 / data.w_in[i]);
    }
  }
  if (k_point.empty()) {
    throw InitializationError("fit_r_vs_power: no point below the weak-drive ceiling");
  }
  std::nth_element(k_point.begin(), k_point.begin() + static_cast<long>(k_point.size() / 2), k_point.end());
  const double k0 = k_point[k_point.size() / 2];

  std::vector<Parameter> params{
      {"k", k0, 0.0, std::numeric_limits<double>::infinity(), false, k0},
      {"offset", 0.0, -ceiling, ceiling, !options.fit_offset, ceiling}};

  auto residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      r[static_cast<Eigen::Index>(i)] =
          (data.r_res[i] - r_vs_power_model(p[0], p[1], data.w_in[i], g1, g2)) * w[i];
    }
    return r;
  };
  auto jacobian = [&](const Eigen::VectorXd& p) {
    Eigen::MatrixXd j(static_cast<Eigen::Index>(n), 2);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = data.w_in[i] / (g1 * g2);
      const double den = 1.0 + p[0] * x;
      const auto row = static_cast<Eigen::Index>(i);
      j(row, 0) = ceiling * x / (den * den) * w[i];
      j(row, 1) = -w[i];
    }
    return j;
  };
  return minimize(residuals, std::move(params), options.solver, jacobian);
}

// Closed-form amplitude for a model shape m: argmin_s sum w^2 (y - s m)^2.
struct ScaledCost {
  double scale = 0.0;
  double cost = 0.0;
};

ScaledCost best_scale(const std::vector<double>& y, const std::vector<double>& m,
                      const std::vector<double>& w) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double w2 = w[i] * w[i];
    num += w2 * y[i] * m[i];
    den += w2 * m[i] * m[i];
  }
  ScaledCost out;
  out.scale = den > 0.0 ? num / den : 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = (y[i] - out.scale * m[i]) * w[i];
    out.cost += d * d;
  }
  return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return g;
}

// Fits scale * shape(rabi, x) after a coarse scan over rabi.
template <typename Shape>
FitResult fit_scaled_shape(const MeasurementSeries& data, Shape shape, double rabi_lo,
                           double rabi_hi, const LeastSquaresOptions& solver) {
  data.check_shape();
  const std::size_t n = data.size();
  const auto w = weights_of(data.sigma, n);
  const auto y = data.real_values();

  double best_rabi = rabi_lo;
  ScaledCost best{0.0, std::numeric_limits<double>::infinity()};
  std::vector<double> m(n);
  for (double rabi : log_grid(rabi_lo, rabi_hi, 240)) {
    for (std::size_t i = 0; i < n; ++i) m[i] = shape(rabi, data.x[i]);
    const auto c = best_scale(y, m, w);
    if (c.cost < best.cost && c.scale > 0.0) {
      best = c;
      best_rabi = rabi;
    }
  }
  if (!(best.scale > 0.0)) throw InitializationError("no positive amplitude fits the data");

  std::vector<Parameter> params{
      {"rabi", best_rabi, 0.0, std::numeric_limits<double>::infinity(), false, best_rabi},
      {"scale", best.scale, 0.0, std::numeric_limits<double>::infinity(), false, best.scale}};
  auto residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      r[static_cast<Eigen::Index>(i)] = (y[i] - p[1] * shape(p[0], data.x[i])) * w[i];
    }
    return r;
  };
  auto jacobian = [&](const Eigen::VectorXd& p) {
    Eigen::MatrixXd j(static_cast<Eigen::Index>(n), 2);
    const double h = 1e-6 * p[0];
    for (std::size_t i = 0; i < n; ++i) {
      const double m0 = shape(p[0], data.x[i]);
      const double dm = (shape(p[0] + h, data.x[i]) - shape(p[0] - h, data.x[i])) / (2.0 * h);
      const auto row = static_cast<Eigen::Index>(i);
      j(row, 0) = -p[1] * dm * w[i];
      j(row, 1) = -m0 * w[i];
    }
    return j;
  };
  return minimize(residuals, std::move(params), solver, jacobian);
}

}  // namespace

FitResult fit_reflection_lineshape(const MeasurementSeries& data, const LineshapeOptions& options) {
  data.check_shape();
  if (options.real_only && !options.weak_drive) {
    throw std::invalid_argument("a real-only lineshape fit cannot separate Omega^2 from the rates");
  }
  const std::size_t n = data.size();
  const std::size_t n_free = 3 + (options.weak_drive ? 0 : 1) + (options.fit_offset ? 2 : 0);
  require_points(options.real_only ? n : 2 * n, n_free + 1, "fit_reflection_lineshape");
  const auto w = weights_of(data.sigma, n);

  const auto [xmin, xmax] = std::minmax_element(data.x.begin(), data.x.end());
  const double reference_hz = 0.5 * (*xmin + *xmax);
  std::vector<double> dx(n);
  for (std::size_t i = 0; i < n; ++i) dx[i] = hz_to_angular(data.x[i] - reference_hz);

  const auto start = lineshape_start(dx, data.y, options.real_only, options.weak_drive);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<Parameter> params{
      {"gamma1", start.g1, 1e-9 * start.g1, inf, false, start.g1},
      {"gamma2", start.g2, 1e-9 * start.g2, inf, false, start.g2},
      {"center", start.center, -inf, inf, false, start.width},
      {"rabi_sq", start.rabi_sq, 0.0, inf, options.weak_drive, start.g1 * start.g2},
      {"offset_re", 0.0, -inf, inf, !options.fit_offset, start.g1 / start.g2},
      {"offset_im", 0.0, -inf, inf, !options.fit_offset || options.real_only, start.g1 / start.g2}};

  const bool real_only = options.real_only;
  const std::size_t rows = real_only ? n : 2 * n;
  auto residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(rows));
    for (std::size_t i = 0; i < n; ++i) {
      const std::complex<double> d = (data.y[i] - lineshape_value(p, dx[i])) * w[i];
      if (real_only) {
        r[static_cast<Eigen::Index>(i)] = d.real();
      } else {
        r[static_cast<Eigen::Index>(2 * i)] = d.real();
        r[static_cast<Eigen::Index>(2 * i + 1)] = d.imag();
      }
    }
    return r;
  };
  auto jacobian = [&](const Eigen::VectorXd& p) {
    Eigen::MatrixXd j(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(kLineshapeParams));
    std::array<std::complex<double>, kLineshapeParams> g;
    for (std::size_t i = 0; i < n; ++i) {
      lineshape_gradient(p, dx[i], g);
      for (int k = 0; k < kLineshapeParams; ++k) {
        const std::complex<double> d = -g[static_cast<std::size_t>(k)] * w[i];
        if (real_only) {
          j(static_cast<Eigen::Index>(i), k) = d.real();
        } else {
          j(static_cast<Eigen::Index>(2 * i), k) = d.real();
          j(static_cast<Eigen::Index>(2 * i + 1), k) = d.imag();
        }
      }
    }
    return j;
  };

  FitResult fit = minimize(residuals, std::move(params), options.solver, jacobian);

  if (options.normalization_rel > 0.0) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(kLineshapeParams);
    v[kG1] = fit.params[kG1];
    v[kRabiSq] = fit.params[kRabiSq];
    fit.covariance += options.normalization_rel * options.normalization_rel * v * v.transpose();
  }

  const double g2 = fit.params[kG2];
  const double width = std::sqrt(g2 * g2 + fit.params[kRabiSq] * g2 / fit.params[kG1]);
  if (hz_to_angular(*xmax - *xmin) < 2.0 * width) {
    fit.warnings.push_back("data span less than one linewidth; rates poorly conditioned");
  }
  fit.derived["reference_hz"] = reference_hz;
  fit.derived["center_hz"] = reference_hz + angular_to_hz(fit.params[kCenter]);
  return fit;
}

SensorParams sensor_from_lineshape(const FitResult& fit, std::string label) {
  return SensorParams(std::move(label), hz_to_angular(fit.derived.at("center_hz")),
                      fit.value("gamma1"), fit.value("gamma2"));
}

FitResult fit_r_vs_power(const PowerSweep& data, const SensorParams& sensor,
                         const PowerSweepOptions& options) {
  const double g1 = sensor.gamma1();
  const double g2 = sensor.gamma2();
  FitResult fit = r_vs_power_core(data, g1, g2, options);

  // sensitivity of k to the rates held fixed, by refitting
  PowerSweepOptions tight = options;
  tight.solver.step_tol = std::min(options.solver.step_tol, 1e-12);
  tight.solver.cost_tol = std::min(options.solver.cost_tol, 1e-15);
  const double h = 1e-5;
  auto log_k = [&](double a, double b) { return std::log(r_vs_power_core(data, a, b, tight).params[0]); };
  fit.derived["dlnk_dgamma1"] = (log_k(g1 * (1 + h), g2) - log_k(g1 * (1 - h), g2)) / (2 * h * g1);
  fit.derived["dlnk_dgamma2"] = (log_k(g1, g2 * (1 + h)) - log_k(g1, g2 * (1 - h))) / (2 * h * g2);
  return fit;
}

FitResult fit_damped_sinusoid(const MeasurementSeries& data, const LeastSquaresOptions& solver) {
  data.check_shape();
  const std::size_t n = data.size();
  require_points(n, 8, "fit_damped_sinusoid");
  const auto w = weights_of(data.sigma, n);
  const auto y = data.real_values();

  const auto order = sorted_order(data.x);
  std::vector<double> ts, ys;
  for (auto i : order) {
    ts.push_back(data.x[i]);
    ys.push_back(y[i]);
  }
  const double span = ts.back() - ts.front();
  if (!(span > 0.0)) throw InitializationError("fit_damped_sinusoid: zero time span");
  std::vector<double> gaps;
  for (std::size_t i = 1; i < n; ++i) gaps.push_back(ts[i] - ts[i - 1]);
  std::nth_element(gaps.begin(), gaps.begin() + static_cast<long>(gaps.size() / 2), gaps.end());
  const double dt = gaps[gaps.size() / 2];
  if (!(dt > 0.0)) throw InitializationError("fit_damped_sinusoid: repeated sample times");

  // zero-padded discrete spectrum of the detrended trace
  const double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);
  const double w_lo = kTwoPi / span;
  const double w_hi = std::numbers::pi / dt;
  const double dw = kTwoPi / (8.0 * span);
  std::vector<double> freq, power;
  for (double om = w_lo; om <= w_hi; om += dw) {
    std::complex<double> acc{0.0};
    for (std::size_t i = 0; i < n; ++i) {
      acc += (ys[i] - mean) * std::polar(1.0, -om * (ts[i] - ts.front()));
    }
    freq.push_back(om);
    power.push_back(std::norm(acc));
  }
  if (power.size() < 3) throw InitializationError("fit_damped_sinusoid: trace too short for a spectrum");
  const auto peak = static_cast<std::size_t>(std::max_element(power.begin(), power.end()) - power.begin());
  std::vector<double> sorted_power = power;
  std::nth_element(sorted_power.begin(), sorted_power.begin() + static_cast<long>(sorted_power.size() / 2),
                   sorted_power.end());
  const double floor = sorted_power[sorted_power.size() / 2];
  if (!(power[peak] > 10.0 * floor)) {
    throw InitializationError("fit_damped_sinusoid: no spectral peak above the noise floor");
  }
  double om0 = freq[peak];
  if (peak > 0 && peak + 1 < power.size()) {
    const double a = power[peak - 1], b = power[peak], c = power[peak + 1];
    const double den = a - 2.0 * b + c;
    if (den < 0.0) om0 += 0.5 * (a - c) / den * dw;
  }
  if (om0 * span / kTwoPi < 1.5) {
    throw ConditioningError("fit_damped_sinusoid: fewer than 1.5 oscillation periods in the trace");
  }

  // linear amplitudes for a fixed frequency and decay
  auto linear_fit = [&](double gamma, std::size_t from, std::size_t to) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(to - from), 3);
    Eigen::VectorXd b(static_cast<Eigen::Index>(to - from));
    for (std::size_t i = from; i < to; ++i) {
      const double t = ts[i] - ts.front();
      const double e = std::exp(-gamma * t);
      const auto row = static_cast<Eigen::Index>(i - from);
      a(row, 0) = e * std::cos(om0 * t);
      a(row, 1) = e * std::sin(om0 * t);
      a(row, 2) = 1.0;
      b[row] = ys[i];
    }
    return Eigen::Vector3d(a.colPivHouseholderQr().solve(b));
  };
  const std::size_t mid = n / 2;
  const auto first = linear_fit(0.0, 0, mid);
  const auto second = linear_fit(0.0, mid, n);
  const double amp1 = std::hypot(first[0], first[1]);
  const double amp2 = std::hypot(second[0], second[1]);
  const double t1 = 0.5 * (ts[0] + ts[mid - 1]) - ts.front();
  const double t2 = 0.5 * (ts[mid] + ts[n - 1]) - ts.front();
  double gamma0 = (amp1 > 0.0 && amp2 > 0.0) ? std::log(amp1 / amp2) / (t2 - t1) : 0.0;
  gamma0 = std::clamp(gamma0, 0.0, om0);
  const auto lin = linear_fit(gamma0, 0, n);
  // referenced to the first sample; shifted to t = 0 below
  const double amp0 = std::hypot(lin[0], lin[1]);
  const double phase0 = std::atan2(-lin[1], lin[0]);
  const double t0 = ts.front();
  const double amp_at_zero = amp0 * std::exp(gamma0 * t0);
  const double phase_at_zero = std::remainder(phase0 - om0 * t0, kTwoPi);

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<Parameter> params{
      {"rabi", om0, 0.0, inf, false, om0},
      {"decay", gamma0, -inf, inf, false, std::max(gamma0, 0.01 * om0)},
      {"amplitude", amp_at_zero, 0.0, inf, false, amp_at_zero},
      {"phase", phase_at_zero, -inf, inf, false, 1.0},
      {"offset", lin[2], -inf, inf, false, std::max(std::abs(lin[2]), amp0)}};

  const Model model = [](std::span<const double> p, double t) {
    return std::complex<double>(p[2] * std::exp(-p[1] * t) * std::cos(p[0] * t + p[3]) + p[4], 0.0);
  };
  const ModelGradient gradient = [](std::span<const double> p, double t,
                                    std::span<std::complex<double>> g) {
    const double e = std::exp(-p[1] * t);
    const double c = std::cos(p[0] * t + p[3]);
    const double s = std::sin(p[0] * t + p[3]);
    g[0] = -p[2] * e * t * s;
    g[1] = -p[2] * e * t * c;
    g[2] = e * c;
    g[3] = -p[2] * e * s;
    g[4] = 1.0;
  };
  FitResult fit = least_squares(model, data, std::move(params), solver, gradient);
  if (fit.value("rabi") * span / kTwoPi < 1.5) {
    throw ConditioningError("fit_damped_sinusoid: fitted frequency gives fewer than 1.5 periods");
  }
  return fit;
}

double rabi_from_oscillation(double oscillation, const SensorParams& sensor) {
  if (!(oscillation >= 0.0)) throw DomainError("rabi_from_oscillation: frequency must be >= 0");
  const double half_diff = 0.5 * (sensor.gamma1() - sensor.gamma2());
  return std::sqrt(oscillation * oscillation + half_diff * half_diff);
}

double rabi_oscillation_jacobian(double oscillation, const SensorParams& sensor) {
  return oscillation / rabi_from_oscillation(oscillation, sensor);
}

FitResult fit_mollow(const MeasurementSeries& data, const SensorParams& sensor,
                     const LeastSquaresOptions& solver) {
  require_points(data.size(), 3, "fit_mollow");
  const double center_hz = angular_to_hz(sensor.omega_a());
  double reach = 0.0;
  for (double f : data.x) reach = std::max(reach, std::abs(hz_to_angular(f - center_hz)));
  if (!(reach > 0.0)) throw InitializationError("fit_mollow: spectrum has no frequency span");

  auto shape = [&](double rabi, double f) {
    return mollow_density(sensor, rabi, hz_to_angular(f - center_hz));
  };
  const double lo = std::min(0.5 * sensor.gamma1(), 0.5 * reach);
  FitResult fit = fit_scaled_shape(data, shape, lo, 1.5 * reach, solver);
  const double gamma_s = side_peak_halfwidth(sensor);
  if (fit.value("rabi") < 2.0 * gamma_s) {
    throw ConditioningError("fit_mollow: side peaks unresolved (Omega < 2 x side-peak half-width)");
  }
  fit.derived["gain_db"] = ratio_to_db(fit.value("scale"));
  fit.derived["gain_db_sigma"] = 10.0 / std::log(10.0) * fit.rel_sigma("scale");
  return fit;
}

FitResult fit_at_splitting(const MeasurementSeries& data, const SensorParams& sensor,
                           const LeastSquaresOptions& solver) {
  require_points(data.size(), 3, "fit_at_splitting");
  double reach = 0.0;
  for (double f : data.x) reach = std::max(reach, std::abs(hz_to_angular(f)));
  if (!(reach > 0.0)) throw InitializationError("fit_at_splitting: trace has no detuning span");

  auto shape = [&](double rabi, double f) { return at_ratio(sensor, rabi, hz_to_angular(f)); };
  const double lo = 0.05 * sensor.gamma1();
  FitResult fit = fit_scaled_shape(data, shape, lo, std::max(4.0 * reach, 10.0 * lo), solver);

  const auto y = data.real_values();
  const auto top = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  double closest = std::numeric_limits<double>::infinity();
  for (double f : data.x) closest = std::min(closest, std::abs(f));
  if (fit.value("rabi") > 2.0 * sensor.gamma1() && std::abs(data.x[top]) <= closest) {
    fit.warnings.push_back("single-peak trace although the fitted drive is strong");
  }
  return fit;
}

double peak_separation(const MeasurementSeries& data) {
  data.check_shape();
  if (data.size() < 3) return 0.0;
  const auto [xmin, xmax] = std::minmax_element(data.x.begin(), data.x.end());
  const double center = 0.5 * (*xmin + *xmax);
  const auto y = data.real_values();
  std::size_t top = 0, left = data.size(), right = data.size();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (y[i] > y[top]) top = i;
    if (data.x[i] < center && (left == data.size() || y[i] > y[left])) left = i;
    if (data.x[i] > center && (right == data.size() || y[i] > y[right])) right = i;
  }
  if (left == data.size() || right == data.size()) return 0.0;
  if (top != left && top != right) return 0.0;
  // a maximum sitting on the grid point next to the centre is a single peak
  const double step = (*xmax - *xmin) / static_cast<double>(data.size() - 1);
  if (std::abs(data.x[top] - center) <= 1.5 * step) return 0.0;
  return data.x[right] - data.x[left];
}

}  // namespace qpower
