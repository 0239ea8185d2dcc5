#include "qmem/error_dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace qmem {

CVector z_error_exact(const CVector& state, double theta, const LevelView& view) {
  if (static_cast<std::size_t>(state.size()) != view.size()) {
    throw std::invalid_argument("z_error_exact: state size does not match view");
  }
  CVector out = state;
  for (std::size_t k = 0; k < view.size(); ++k) {
    out(static_cast<Eigen::Index>(k)) *= std::polar(1.0, -theta * view[k].mi());
  }
  return out;
}

void SeriesModel::validate() const {
  if (A.empty()) throw std::invalid_argument("SeriesModel: need at least A_0");
  for (double a : A) {
    if (!std::isfinite(a)) throw std::invalid_argument("SeriesModel: non-finite coefficient");
  }
  if (A[0] <= 0.0) throw std::invalid_argument("SeriesModel: A_0 must be > 0");
}

Complex SeriesModel::factor(double theta, double m) const {
  const Complex x(0.0, -theta * m);
  Complex term = 1.0;
  Complex sum = 0.0;
  int n = 0;
  for (; n < static_cast<int>(A.size()); ++n) {
    if (n > 0) term *= x / static_cast<double>(n);
    sum += A[n] * term;
  }
  if (tail == SeriesTail::IdealTail) {
    Complex rest = 0.0;
    for (; n < 200; ++n) {
      term *= x / static_cast<double>(n);
      rest += term;
      if (std::abs(term) < 1e-18 * (1.0 + std::abs(rest))) break;
    }
    sum += A[0] * rest;
  }
  return sum;
}

SeriesModel SeriesModel::ideal(int order, SeriesTail tail) {
  if (order < 0) throw std::invalid_argument("SeriesModel: order must be >= 0");
  return SeriesModel{std::vector<double>(static_cast<std::size_t>(order) + 1, 1.0), tail};
}

CVector z_error_series(const CVector& state, double theta, const SeriesModel& model,
                       const LevelView& view) {
  model.validate();
  if (static_cast<std::size_t>(state.size()) != view.size()) {
    throw std::invalid_argument("z_error_series: state size does not match view");
  }
  CVector out = state;
  for (std::size_t k = 0; k < view.size(); ++k) {
    out(static_cast<Eigen::Index>(k)) *= model.factor(theta, view[k].mi());
  }
  return out;
}

Complex logical_overlap(const CVector& psi, double theta) {
  return psi.dot(z_error_exact(psi, theta));
}

Complex error_overlap(const CVector& psi, double theta) {
  const auto& view = LevelView::nuclear();
  CVector iz = psi;
  for (std::size_t k = 0; k < view.size(); ++k) iz(static_cast<Eigen::Index>(k)) *= view[k].mi();
  return iz.dot(z_error_exact(psi, theta));
}

void LindbladModel::validate() const {
  if (!(T2n_ms > 0.0) || !std::isfinite(T2n_ms)) {
    throw std::invalid_argument("LindbladModel: T2n must be > 0");
  }
}

void check_density_matrix(const CMatrix& rho, double tol) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) {
    throw InvalidState("density matrix must be square and nonempty");
  }
  if (!rho.allFinite()) throw InvalidState("density matrix has non-finite entries");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) {
    throw InvalidState("density matrix is not Hermitian");
  }
  if (std::abs(rho.trace() - Complex(1.0, 0.0)) > tol) {
    throw InvalidState("density matrix trace is not 1");
  }
  const CMatrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -tol) {
    throw InvalidState("density matrix has a negative eigenvalue");
  }
}

CMatrix lindblad_evolve(const CMatrix& rho, double t_ms, const LindbladModel& model,
                        const LevelView& view) {
  model.validate();
  if (static_cast<std::size_t>(rho.rows()) != view.size()) {
    throw std::invalid_argument("lindblad_evolve: rho size does not match view");
  }
  if (t_ms < 0.0) throw std::invalid_argument("lindblad_evolve: t must be >= 0");
  check_density_matrix(rho);
  CMatrix out = rho;
  const Eigen::Index n = rho.rows();
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const double dm = view[a].mi() - view[b].mi();
      if (dm != 0.0) out(a, b) *= std::exp(-dm * dm * t_ms / model.T2n_ms);
    }
  }
  return out;
}

CMatrix collapse_operator(const LindbladModel& model, const LevelView& view) {
  model.validate();
  const Eigen::Index n = static_cast<Eigen::Index>(view.size());
  CMatrix l = CMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) l(k, k) = std::sqrt(2.0 / model.T2n_ms) * view[k].mi();
  return l;
}

namespace {

CMatrix lindblad_rhs(const CMatrix& rho, const std::vector<CMatrix>& collapse, const CMatrix& h) {
  CMatrix d = Complex(0.0, -1.0) * (h * rho - rho * h);
  for (const CMatrix& l : collapse) {
    const CMatrix ldl = l.adjoint() * l;
    d += l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl);
  }
  return d;
}

}  // namespace

CMatrix lindblad_rk4(const CMatrix& rho, double t, const std::vector<CMatrix>& collapse,
                     const CMatrix& hamiltonian, int steps) {
  if (steps < 1) throw std::invalid_argument("lindblad_rk4: steps must be >= 1");
  const double h = t / steps;
  CMatrix r = rho;
  for (int s = 0; s < steps; ++s) {
    const CMatrix k1 = lindblad_rhs(r, collapse, hamiltonian);
    const CMatrix k2 = lindblad_rhs(r + 0.5 * h * k1, collapse, hamiltonian);
    const CMatrix k3 = lindblad_rhs(r + 0.5 * h * k2, collapse, hamiltonian);
    const CMatrix k4 = lindblad_rhs(r + h * k3, collapse, hamiltonian);
    r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return r;
}

void InhomogeneityModel::validate() const {
  for (double s : {sigma_MW, sigma_RF, detuning_sigma_MHz}) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("InhomogeneityModel: sigmas must be finite and >= 0");
    }
  }
}

double InhomogeneityModel::angle_scale_sd(PulseKind kind) const {
  const double sigma = kind == PulseKind::MW ? sigma_MW : sigma_RF;
  return std::sqrt(2.0) * sigma / kPi;
}

double fidelity_from_sigma(double sigma) { return 0.5 * (1.0 + std::exp(-sigma * sigma)); }

double sigma_from_fidelity(double fidelity) {
  if (!(fidelity > 0.5) || fidelity > 1.0) {
    throw std::invalid_argument("sigma_from_fidelity: fidelity must lie in (0.5, 1]");
  }
  return std::sqrt(-std::log(2.0 * fidelity - 1.0));
}

ShotDraw draw_shot(const InhomogeneityModel& model, std::mt19937_64& rng) {
  std::normal_distribution<double> unit(0.0, 1.0);
  ShotDraw d;
  d.g_MW = model.angle_scale_sd(PulseKind::MW) * unit(rng);
  d.g_RF = model.angle_scale_sd(PulseKind::RF) * unit(rng);
  d.detunings.delta_f1_MHz = model.detuning_sigma_MHz * unit(rng);
  d.detunings.delta_f2_MHz = model.detuning_sigma_MHz * unit(rng);
  d.detunings.delta_f3_MHz = model.detuning_sigma_MHz * unit(rng);
  return d;
}

Pulse scale_pulse(const Pulse& pulse, const ShotDraw& draw) {
  Pulse p = pulse;
  p.angle *= 1.0 + (p.kind == PulseKind::MW ? draw.g_MW : draw.g_RF);
  return p;
}

PulseSequence scale_sequence(const PulseSequence& seq, const ShotDraw& draw) {
  PulseSequence out = seq;
  for (auto& e : out.mutable_events()) {
    if (auto* p = std::get_if<Pulse>(&e)) *p = scale_pulse(*p, draw);
  }
  return out;
}

Pulse sample_imperfect_rotation(const Pulse& pulse, const InhomogeneityModel& model,
                                std::uint64_t seed) {
  model.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  Pulse p = pulse;
  p.angle *= 1.0 + model.angle_scale_sd(pulse.kind) * unit(rng);
  return p;
}

double b_field_pulse_phase(double amplitude, double duration_us, double cal) {
  if (!(cal > 0.0)) throw std::invalid_argument("b_field_pulse_phase: cal must be > 0");
  return cal * amplitude * duration_us;
}

}  // namespace qmem
