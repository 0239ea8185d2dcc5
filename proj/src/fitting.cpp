#include "qmem/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

namespace qmem {

namespace {

struct Functor {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  Functor(const ResidualFunction* f, int m, int n) : fn(f), m_values(m), n_inputs(n) {}

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
    out = (*fn)(x);
    return 0;
  }
  int inputs() const { return n_inputs; }
  int values() const { return m_values; }

  const ResidualFunction* fn;
  int m_values;
  int n_inputs;
};

using Diff = Eigen::NumericalDiff<Functor, Eigen::Central>;

std::string status_text(Eigen::LevenbergMarquardtSpace::Status s) {
  using namespace Eigen::LevenbergMarquardtSpace;
  switch (s) {
    case RelativeReductionTooSmall:
      return "relative reduction below tolerance";
    case RelativeErrorTooSmall:
      return "relative step below tolerance";
    case RelativeErrorAndReductionTooSmall:
      return "relative step and reduction below tolerance";
    case CosinusTooSmall:
      return "gradient orthogonal to residuals";
    case TooManyFunctionEvaluation:
      return "too many function evaluations";
    case FtolTooSmall:
    case XtolTooSmall:
    case GtolTooSmall:
      return "stationary at machine precision";
    case ImproperInputParameters:
      return "improper input parameters";
    default:
      return "iteration limit reached";
  }
}

bool is_converged(Eigen::LevenbergMarquardtSpace::Status s) {
  using namespace Eigen::LevenbergMarquardtSpace;
  return s == RelativeReductionTooSmall || s == RelativeErrorTooSmall ||
         s == RelativeErrorAndReductionTooSmall || s == CosinusTooSmall || s == FtolTooSmall ||
         s == XtolTooSmall || s == GtolTooSmall;
}

}  // namespace

FitResult least_squares(const ResidualFunction& residuals, int n_residuals,
                        const Eigen::VectorXd& x0, const LeastSquaresOptions& options) {
  const int n = static_cast<int>(x0.size());
  if (n < 1 || n_residuals < n) {
    throw std::invalid_argument("least_squares: need at least as many residuals as parameters");
  }
  Functor functor(&residuals, n_residuals, n);
  Diff diff(functor);
  Eigen::LevenbergMarquardt<Diff> lm(diff);
  lm.parameters.xtol = options.relative_step_tol;
  lm.parameters.maxfev = 1000L * (n + 1);

  Eigen::VectorXd x = x0;
  auto status = lm.minimizeInit(x);
  int iterations = 0;
  if (status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters) {
    status = Eigen::LevenbergMarquardtSpace::Running;
    while (status == Eigen::LevenbergMarquardtSpace::Running &&
           iterations < options.max_iterations) {
      status = lm.minimizeOneStep(x);
      ++iterations;
    }
  }

  FitResult fit;
  fit.params.assign(x.data(), x.data() + n);
  const Eigen::VectorXd r = residuals(x);
  fit.residual = r.norm();
  fit.iterations = iterations;
  fit.converged = is_converged(status);
  fit.diagnostics = status_text(status);
  if (!r.allFinite()) {
    fit.converged = false;
    fit.diagnostics = "non-finite residuals";
    return fit;
  }

  Eigen::MatrixXd jac(n_residuals, n);
  diff.df(x, jac);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(jac);
  qr.setThreshold(1e-10);
  if (qr.rank() < n) {
    fit.converged = false;
    fit.diagnostics = "rank-deficient Jacobian (rank " + std::to_string(qr.rank()) + " of " +
                      std::to_string(n) + "): parameters not identifiable from the data";
    return fit;
  }
  if (!fit.converged) return fit;

  const int dof = std::max(1, n_residuals - n);
  const double s2 = r.squaredNorm() / dof;
  fit.covariance = s2 * (jac.transpose() * jac).inverse();
  fit.sigmas.resize(n);
  for (int k = 0; k < n; ++k) fit.sigmas[k] = std::sqrt(std::max(0.0, fit.covariance(k, k)));
  return fit;
}

FitResult fit_series(const std::vector<EchoRecord>& data, int order, SeriesTail tail,
                     std::array<double, 4> weights, const LeastSquaresOptions& options) {
  if (order < 1) throw std::invalid_argument("fit_series: order must be >= 1");
  const std::size_t needed = 2 * static_cast<std::size_t>(order + 1);
  if (data.size() < needed) {
    throw std::invalid_argument("fit_series: need at least " + std::to_string(needed) +
                                " records, got " + std::to_string(data.size()));
  }
  for (const auto& rec : data) {
    if (!std::isfinite(rec.sweep) || !std::isfinite(rec.I_half_x) ||
        !std::isfinite(rec.I_half_y) || !std::isfinite(rec.I_threehalf_x) ||
        !std::isfinite(rec.I_threehalf_y)) {
      throw std::invalid_argument("fit_series: non-finite record");
    }
  }

  double peak = 0.0;
  for (const auto& rec : data) {
    peak = std::max({peak, std::abs(rec.I_half_x), std::abs(rec.I_half_y), std::abs(rec.I_threehalf_x),
                     std::abs(rec.I_threehalf_y)});
  }
  if (peak < 1e-12) {
    FitResult none;
    none.diagnostics = "no signal: every echo is zero";
    return none;
  }

  const auto smallest = std::min_element(data.begin(), data.end(), [](const auto& a, const auto& b) {
    return std::abs(a.sweep) < std::abs(b.sweep);
  });
  const double a0 = std::sqrt(std::max(combine_uncorrupted(*smallest), 1e-12));

  const int m = static_cast<int>(4 * data.size());
  ResidualFunction fn = [&](const Eigen::VectorXd& x) {
    SeriesModel model{std::vector<double>(x.data(), x.data() + x.size()), tail};
    Eigen::VectorXd r(m);
    for (std::size_t k = 0; k < data.size(); ++k) {
      // factor() skips validation so the optimiser may probe A_0 <= 0.
      const double th = data[k].sweep;
      const Complex h = 0.75 * model.factor(th, 0.5) * std::conj(model.factor(th, -0.5));
      const Complex t = 0.25 * model.factor(th, 1.5) * std::conj(model.factor(th, -1.5));
      const EchoRecord e{th, h.real(), h.imag(), t.real(), t.imag()};
      r(4 * k + 0) = weights[0] * (e.I_half_x - data[k].I_half_x);
      r(4 * k + 1) = weights[1] * (e.I_half_y - data[k].I_half_y);
      r(4 * k + 2) = weights[2] * (e.I_threehalf_x - data[k].I_threehalf_x);
      r(4 * k + 3) = weights[3] * (e.I_threehalf_y - data[k].I_threehalf_y);
    }
    return r;
  };

  FitResult fit = least_squares(fn, m, Eigen::VectorXd::Constant(order + 1, a0), options);
  for (int n = 0; n <= order; ++n) fit.names.push_back("A" + std::to_string(n));
  return fit;
}

FitResult fit_exponential(const std::vector<double>& t, const std::vector<double>& y,
                          ExponentialKind kind, const LeastSquaresOptions& options) {
  if (t.size() != y.size()) throw std::invalid_argument("fit_exponential: size mismatch");
  if (t.size() < 4) throw std::invalid_argument("fit_exponential: need at least 4 points");

  const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  const double scale = std::max({1.0, std::abs(*ymin), std::abs(*ymax)});
  FitResult fit;
  fit.names = {"a", "T", "c"};
  if (*ymax - *ymin <= 1e-12 * scale) {
    fit.params = {0.0, 0.0, y.front()};
    fit.converged = false;
    fit.diagnostics = "degenerate: constant data, time constant unidentifiable";
    return fit;
  }

  std::vector<std::size_t> order(t.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return t[a] < t[b]; });
  const double y0 = y[order.front()];
  const double yinf = y[order.back()];
  const double span = t[order.back()] - t[order.front()];

  double a = 0.0;
  double c = 0.0;
  double target = 0.0;
  if (kind == ExponentialKind::Decay) {
    c = yinf;
    a = y0 - yinf;
    target = c + a / std::exp(1.0);
  } else {
    a = 0.5 * (yinf - y0);
    c = 0.5 * (yinf + y0);
    target = c + a * (1.0 - 2.0 / std::exp(1.0));
  }
  double T = span / 3.0;
  for (std::size_t k = 1; k < order.size(); ++k) {
    const double prev = y[order[k - 1]] - target;
    const double cur = y[order[k]] - target;
    if (prev == 0.0 || prev * cur < 0.0) {
      T = std::max(t[order[k]] - t[order.front()], 1e-12 * std::max(span, 1.0));
      break;
    }
  }

  const int m = static_cast<int>(t.size());
  ResidualFunction fn = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(m);
    for (int k = 0; k < m; ++k) {
      const double e = std::exp(-t[k] / x(1));
      const double model =
          kind == ExponentialKind::Decay ? x(0) * e + x(2) : x(0) * (1.0 - 2.0 * e) + x(2);
      r(k) = model - y[k];
    }
    return r;
  };
  Eigen::VectorXd x0(3);
  x0 << a, T, c;
  FitResult solved = least_squares(fn, m, x0, options);
  solved.names = fit.names;
  if (solved.converged && !(solved.params[1] > 0.0)) {
    solved.converged = false;
    solved.diagnostics = "time constant not positive";
    solved.sigmas.clear();
  }
  return solved;
}

SigmaEstimate fit_dd_fidelity(const std::vector<double>& theta, const std::vector<double>& signal,
                              int n) {
  if (n != 2 && n != 4) throw std::invalid_argument("fit_dd_fidelity: n must be 2 or 4");
  if (theta.size() != signal.size() || theta.size() < 3) {
    throw std::invalid_argument("fit_dd_fidelity: need >= 3 matching points");
  }
  const auto [lo, hi] = std::minmax_element(theta.begin(), theta.end());
  if (*hi - *lo < kPi - 1e-9) {
    throw std::invalid_argument("fit_dd_fidelity: theta grid must span one period (pi)");
  }
  const Eigen::Index m = static_cast<Eigen::Index>(theta.size());
  Eigen::MatrixXd design(m, 3);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    design(k, 0) = 1.0;
    design(k, 1) = std::cos(2.0 * theta[k]);
    design(k, 2) = std::sin(2.0 * theta[k]);
    rhs(k) = signal[k];
  }
  const Eigen::VectorXd c = design.colPivHouseholderQr().solve(rhs);
  const double r = std::hypot(c(1), c(2));
  SigmaEstimate est;
  est.ratio = (c(0) - r) / (c(0) + r);
  if (!(est.ratio > 0.0)) throw std::invalid_argument("fit_dd_fidelity: modulation exceeds mean");
  est.sigma = std::sqrt(std::max(0.0, -std::log(std::min(est.ratio, 1.0)))) / n;
  est.fidelity = fidelity_from_sigma(est.sigma);
  return est;
}

SigmaEstimate fit_nutation_envelope(const std::vector<int>& n, const std::vector<double>& signal) {
  if (n.size() != signal.size() || n.size() < 3) {
    throw std::invalid_argument("fit_nutation_envelope: need >= 3 matching points");
  }
  const Eigen::Index m = static_cast<Eigen::Index>(n.size());
  Eigen::MatrixXd design(m, 2);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    if (!(std::abs(signal[k]) > 0.0)) {
      throw std::invalid_argument("fit_nutation_envelope: zero signal");
    }
    design(k, 0) = 1.0;
    design(k, 1) = static_cast<double>(n[k]) * n[k];
    rhs(k) = std::log(std::abs(signal[k]));
  }
  const Eigen::VectorXd c = design.colPivHouseholderQr().solve(rhs);
  SigmaEstimate est;
  const double slope = c(1);
  est.sigma = std::sqrt(std::max(0.0, -slope));
  est.ratio = std::exp(slope);
  est.fidelity = fidelity_from_sigma(est.sigma);
  if (m > 2) {
    const Eigen::VectorXd res = design * c - rhs;
    const double s2 = res.squaredNorm() / static_cast<double>(m - 2);
    const double var_slope = s2 * (design.transpose() * design).inverse()(1, 1);
    est.sigma_error = est.sigma > 0.0 ? std::sqrt(var_slope) / (2.0 * est.sigma) : 0.0;
  }
  return est;
}

double fit_vertical_scale(const std::vector<double>& y, const std::vector<double>& model) {
  if (y.size() != model.size() || y.empty()) {
    throw std::invalid_argument("fit_vertical_scale: size mismatch");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    num += y[k] * model[k];
    den += model[k] * model[k];
  }
  if (den == 0.0) throw std::invalid_argument("fit_vertical_scale: model is identically zero");
  return num / den;
}

double linear_r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) {
    throw std::invalid_argument("linear_r_squared: need >= 3 matching points");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (syy == 0.0) return 1.0;
  return sxy * sxy / (sxx * syy);
}

}  // namespace qmem
