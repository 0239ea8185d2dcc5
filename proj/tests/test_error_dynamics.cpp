#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qmem/error_dynamics.hpp"
#include "qmem/logical_code.hpp"

using namespace qmem;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

CMatrix random_rho(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  CMatrix r = a * a.adjoint();
  return r / r.trace();
}

const CVector& plus_L() {
  static const CVector v = LogicalQubit{1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}.encoded();
  return v;
}

}  // namespace

TEST(ZError, ExactMatchesExponential) {
  std::mt19937_64 rng(1);
  for (double th : {0.0, 0.2, -1.3, 3.0}) {
    const CVector psi = LogicalQubit::random(rng).encoded();
    const CVector out = z_error_exact(psi, th);
    EXPECT_LT((out - oracle::z_error(th) * psi).norm(), 1e-14);
    EXPECT_NEAR(out.norm(), 1.0, 1e-14);
  }
  EXPECT_THROW(z_error_exact(CVector::Zero(5), 0.1), std::invalid_argument);
}

TEST(ZError, LogicalOverlap) {
  EXPECT_NEAR(std::abs(logical_overlap(plus_L(), 0.0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(logical_overlap(plus_L(), kPi)), 0.0, 1e-15);
  // flat: no linear term
  const double h = 1e-4;
  const Complex d = (logical_overlap(plus_L(), h) - logical_overlap(plus_L(), -h)) / (2 * h);
  EXPECT_LT(std::abs(d), 1e-8);
}

TEST(ZError, ErrorOverlapSlope) {
  const double h = 1e-5;
  const Complex s = (error_overlap(plus_L(), h) - error_overlap(plus_L(), -h)) / (2 * h);
  EXPECT_NEAR(std::abs(s), 0.75, 1e-8);
  EXPECT_NEAR(std::abs(error_overlap(plus_L(), 0.0)), 0.0, 1e-15);
}

TEST(Series, ConvergesToExact) {
  const CVector psi = plus_L();
  const SeriesModel m5 = SeriesModel::ideal(5);
  const CVector a = z_error_series(psi, 0.1, m5);
  const CVector b = z_error_exact(psi, 0.1);
  for (int k = 0; k < 4; ++k) EXPECT_LE(std::abs(a(k) - b(k)), std::pow(0.15, 6) / 720 + 1e-16);
  double last = 1e9;
  for (int n = 1; n <= 10; ++n) {
    const double e = (z_error_series(psi, 0.8, SeriesModel::ideal(n)) - z_error_exact(psi, 0.8)).norm();
    EXPECT_LE(e, last);
    last = e;
  }
  const CVector tail = z_error_series(psi, 0.8, SeriesModel::ideal(2, SeriesTail::IdealTail));
  EXPECT_LT((tail - z_error_exact(psi, 0.8)).norm(), 1e-15);
}

TEST(Series, LowOrders) {
  const CVector psi = plus_L();
  SeriesModel a0;
  a0.A = {2.5};
  EXPECT_LT((z_error_series(psi, 0.7, a0) - 2.5 * psi).norm(), 1e-15);
  SeriesModel a1;
  a1.A = {1, 1};
  const CMatrix iz = oracle::spin(1.5).z;
  const CVector expect = psi - Complex(0, 0.05) * (iz * psi);
  EXPECT_LT((z_error_series(psi, 0.05, a1) - expect).norm(), 1e-15);
}

TEST(Series, FactorMatchesOracle) {
  const std::vector<double> A{14.19, 14.15, 15.9, 16.0, 14.5, 17.0};
  for (auto tail : {SeriesTail::Truncate, SeriesTail::IdealTail}) {
    SeriesModel m{A, tail};
    for (double th : {-1.5, -0.2, 0.9})
      for (double mi : {-1.5, -0.5, 0.5, 1.5}) {
        const Complex ref = oracle::series_factor(A, th, mi, tail == SeriesTail::IdealTail);
        EXPECT_LT(std::abs(m.factor(th, mi) - ref), 1e-12 * std::abs(ref));
      }
  }
}

TEST(Series, Validation) {
  SeriesModel m;
  m.A = {0.0, 1.0};
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m.A = {1.0, std::nan("")};
  EXPECT_THROW(m.validate(), std::invalid_argument);
}

TEST(Lindblad, ClosedFormMatchesLiouvillian) {
  std::mt19937_64 rng(2);
  const LindbladModel model{1.05};
  const CMatrix L = collapse_operator(model);
  for (double t : {0.0, 0.1, 0.7, 3.0}) {
    const CMatrix rho = random_rho(rng, 4);
    const CMatrix a = lindblad_evolve(rho, t, model);
    EXPECT_LT(max_abs(a - oracle::lindblad(rho, L, t)), 1e-12) << t;
    EXPECT_LT(max_abs(a - lindblad_rk4(rho, t, {L}, CMatrix::Zero(4, 4), 2000)), 1e-9) << t;
    EXPECT_NEAR(std::abs(a.trace() - 1.0), 0.0, 1e-12);
  }
}

TEST(Lindblad, CoherenceRates) {
  const LindbladModel model{1.05};
  CMatrix rho = CMatrix::Constant(4, 4, 0.25);
  for (double t : {0.05, 0.5, 2.0}) {
    const CMatrix out = lindblad_evolve(rho, t, model);
    EXPECT_NEAR(out(1, 2).real() / 0.25, std::exp(-t / 1.05), 1e-14);
    EXPECT_NEAR(out(0, 3).real() / 0.25, std::exp(-9 * t / 1.05), 1e-14);
    EXPECT_NEAR(out(0, 2).real() / 0.25, std::exp(-4 * t / 1.05), 1e-14);
    for (int k = 0; k < 4; ++k) EXPECT_EQ(out(k, k), rho(k, k));
  }
}

TEST(Lindblad, DiagonalUnchanged) {
  CMatrix rho = CMatrix::Zero(4, 4);
  rho.diagonal() << 0.1, 0.2, 0.3, 0.4;
  EXPECT_EQ(max_abs(lindblad_evolve(rho, 5.0, {1.05}) - rho), 0.0);
}

TEST(Lindblad, LogicalLeakStaysInErrorSpace) {
  const auto& b = LogicalBasis::standard();
  CMatrix basis(4, 4);
  basis << b.ket0L, b.ket1L, b.ketIz0L, b.ketIz1L;
  const CMatrix rho = plus_L() * plus_L().adjoint();
  const CMatrix out = lindblad_evolve(rho, 0.4, {1.05});
  const CMatrix in_code = basis.adjoint() * out * basis;
  EXPECT_NEAR(in_code.trace().real(), 1.0, 1e-14);
  EXPECT_GT(in_code(2, 2).real() + in_code(3, 3).real(), 0.0);
}

TEST(Lindblad, RejectsUnphysical) {
  CMatrix bad = CMatrix::Identity(4, 4);
  EXPECT_THROW(lindblad_evolve(bad, 0.1, {1.05}), InvalidState);
  CMatrix neg = CMatrix::Zero(4, 4);
  neg.diagonal() << 1.5, -0.5, 0, 0;
  EXPECT_THROW(check_density_matrix(neg), InvalidState);
  EXPECT_THROW(lindblad_evolve(CMatrix::Identity(4, 4) / 4, 0.1, {0.0}), std::invalid_argument);
}

TEST(Fidelity, SigmaRoundTrip) {
  EXPECT_DOUBLE_EQ(fidelity_from_sigma(0.0), 1.0);
  for (double f : {0.995, 0.935, 0.7}) EXPECT_NEAR(fidelity_from_sigma(sigma_from_fidelity(f)), f, 1e-14);
  EXPECT_NEAR(sigma_from_fidelity(0.995), 0.100250, 1e-5);
  EXPECT_NEAR(sigma_from_fidelity(0.935), 0.373178, 1e-5);
  EXPECT_THROW(sigma_from_fidelity(0.5), std::invalid_argument);
  EXPECT_THROW(sigma_from_fidelity(1.01), std::invalid_argument);
}

TEST(Inhomogeneity, ZeroSigmaIsIdentity) {
  Pulse p;
  p.transition = TransitionLabel{Level::of(-0.5, -0.5), Level::of(-0.5, 0.5), 0};
  p.angle = kPi;
  const Pulse q = sample_imperfect_rotation(p, InhomogeneityModel{}, 42);
  EXPECT_EQ(q.angle, p.angle);
}

TEST(Inhomogeneity, DeterministicInSeed) {
  Pulse p;
  p.transition = TransitionLabel{Level::of(-0.5, -0.5), Level::of(-0.5, 0.5), 0};
  p.angle = kPi;
  const InhomogeneityModel m{0.1, 0.3, 0.0};
  EXPECT_EQ(sample_imperfect_rotation(p, m, 7).angle, sample_imperfect_rotation(p, m, 7).angle);
  EXPECT_NE(sample_imperfect_rotation(p, m, 7).angle, sample_imperfect_rotation(p, m, 8).angle);
}

TEST(Inhomogeneity, NutationEnvelopeMonteCarlo) {
  // <cos(n pi (1+g))> with sd(g) = sqrt2 sigma / pi is exp(-sigma^2 n^2) (-1)^n.
  const InhomogeneityModel m{0.1, 0.0, 0.0};
  std::mt19937_64 rng(2024);
  const int shots = 10000;
  double sum = 0, sum2 = 0;
  for (int s = 0; s < shots; ++s) {
    const ShotDraw d = draw_shot(m, rng);
    const double v = std::cos(4 * kPi * (1 + d.g_MW));
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / shots;
  const double se = std::sqrt((sum2 / shots - mean * mean) / shots);
  EXPECT_NEAR(mean, std::exp(-0.16), 4 * se);
  EXPECT_NEAR(m.angle_scale_sd(PulseKind::MW), std::sqrt(2.0) * 0.1 / kPi, 1e-15);
}

TEST(Inhomogeneity, Validation) {
  EXPECT_THROW((InhomogeneityModel{-0.1, 0, 0}.validate()), std::invalid_argument);
}

TEST(BField, LinearCalibration) {
  EXPECT_EQ(b_field_pulse_phase(0.0, 10.0, 0.3), 0.0);
  EXPECT_NEAR(b_field_pulse_phase(1.0, 80.0, 0.3) / b_field_pulse_phase(1.0, 10.0, 0.3), 8.0,
              1e-14);
  EXPECT_NEAR(b_field_pulse_phase(2.0, 10.0, 0.3) / b_field_pulse_phase(1.0, 10.0, 0.3), 2.0,
              1e-14);
  EXPECT_THROW(b_field_pulse_phase(1.0, 1.0, 0.0), std::invalid_argument);
}
