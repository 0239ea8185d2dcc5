#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qmem/experiment.hpp"
#include "qmem/logical_code.hpp"
#include "qmem/readout.hpp"

using namespace qmem;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

Detunings random_detunings(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 0.02);
  return {g(rng), g(rng), g(rng)};
}

CVector random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVector v(4);
  for (int k = 0; k < 4; ++k) v(k) = Complex(g(rng), g(rng));
  return v.normalized();
}

// Echo of the ideal pipeline computed from scratch: oracle rotations on the
// five-level basis, exact Z(theta) after pulse 4.
Complex brute_force_echo(EchoVariant variant, double theta) {
  PipelineOptions opt;
  opt.phase_cycle = false;
  const PulseSequence seq = qec_sequence(variant, opt);
  CVector psi = CVector::Zero(5);
  psi(4) = 1;
  const CMatrix z = oracle::z_error(theta);
  for (const auto& ev : seq.events()) {
    if (const auto* m = std::get_if<Marker>(&ev)) {
      if (m->name == "error") psi.head(4) = z * psi.head(4);
      continue;
    }
    const Pulse& p = std::get<Pulse>(ev);
    const auto [i, j] = pulse_indices(p, LevelView::experiment());
    psi = oracle::rotation(5, i, j, p.angle, p.phase) * psi;
  }
  return report_quadrature(2.0 * std::conj(psi(1)) * psi(4), variant);
}

}  // namespace

TEST(Refocus, MatrixAsPrinted) {
  const CMatrix p = refocus_matrix(+1);
  EXPECT_LT(max_abs(p * p - CMatrix::Identity(4, 4)), 1e-15);
  const CMatrix m = refocus_matrix(-1);
  EXPECT_LT(max_abs((m * m).cwiseAbs() - CMatrix::Identity(4, 4)), 1e-15);
  EXPECT_EQ(m(0, 3), Complex(-1, 0));
  EXPECT_EQ(m(3, 0), Complex(1, 0));
  EXPECT_THROW(refocus_matrix(0), std::invalid_argument);
}

TEST(Refocus, PulseBlockStructure) {
  // Composed with the rotation convention, the "-" alternation of pulses
  // 5-12 is the printed P_+; both alternations are anti-diagonal.
  const CMatrix minus = sequence_propagator(refocus_sequence(-1), LevelView::nuclear());
  EXPECT_LT(max_abs(minus - refocus_matrix(+1)), 1e-12);
  for (int s : {+1, -1}) {
    const CMatrix u = sequence_propagator(refocus_sequence(s), LevelView::nuclear());
    for (int i = 0; i < 4; ++i) {
      EXPECT_NEAR(std::abs(u(i, 3 - i)), 1.0, 1e-12) << s;
    }
  }
}

TEST(Refocus, ZeroDetuningIsMatrix) {
  std::mt19937_64 rng(1);
  const CVector psi = random_state(rng);
  EXPECT_LT((refocus_apply(psi, 100, {}, +1) - refocus_matrix(+1) * psi).norm(), 1e-15);
}

TEST(Refocus, PairsRefocusedForAnyDetuning) {
  std::mt19937_64 rng(2);
  const CVector psi = random_state(rng);
  const CVector ref = refocus_apply(psi, 100, {}, +1);
  bool witness = false;
  for (int k = 0; k < 100; ++k) {
    const CVector out = refocus_apply(psi, 100, random_detunings(rng), +1);
    EXPECT_LT(std::abs(std::conj(out(0)) * out(3) - std::conj(ref(0)) * ref(3)), 1e-12);
    EXPECT_LT(std::abs(std::conj(out(1)) * out(2) - std::conj(ref(1)) * ref(2)), 1e-12);
    if (std::abs(std::conj(out(0)) * out(1) - std::conj(ref(0)) * ref(1)) > 1e-3) witness = true;
  }
  EXPECT_TRUE(witness);
}

TEST(Detection, EncodedStateAtZero) {
  PipelineOptions opt;
  const EchoRecord r = pipeline_record(0.0, opt);
  EXPECT_NEAR(r.I_half_x, 0.75, 1e-12);
  EXPECT_NEAR(r.I_threehalf_x, 0.25, 1e-12);
  EXPECT_NEAR(r.I_half_y, 0.0, 1e-9);
  EXPECT_NEAR(r.I_threehalf_y, 0.0, 1e-9);
}

TEST(Detection, HalfEchoNeedsMiddleAmplitudes) {
  CVector s(5);
  s << 0.6, 0, 0, 0.8, 0;
  EXPECT_NEAR(std::abs(detection_pathway(s, EchoVariant::Half)), 0.0, 1e-15);
  EXPECT_THROW(raw_echo(CVector::Zero(4)), std::invalid_argument);
}

TEST(Detection, MatchesBruteForce) {
  PipelineOptions opt;
  opt.phase_cycle = false;
  for (double th : {-1.2, -0.2, 0.0, 0.4, 1.0}) {
    for (auto v : {EchoVariant::Half, EchoVariant::ThreeHalf}) {
      const Complex lib = pipeline_echo(v, opt, ErrorSpec::exact(th));
      EXPECT_LT(std::abs(lib - brute_force_echo(v, th)), 1e-12) << th;
    }
  }
}

TEST(Detection, SeriesAtPointTwo) {
  const EchoRecord sim = pipeline_record(0.2, PipelineOptions{});
  const EchoRecord ser = echo_expansions(0.2, SeriesModel::ideal(5));
  EXPECT_NEAR(sim.I_half_x, ser.I_half_x, 1e-4);
  EXPECT_NEAR(sim.I_half_y, ser.I_half_y, 1e-4);
  EXPECT_NEAR(sim.I_threehalf_x, ser.I_threehalf_x, 1e-4);
  EXPECT_NEAR(sim.I_threehalf_y, ser.I_threehalf_y, 1e-4);
}

TEST(Expansions, ZeroTheta) {
  SeriesModel m;
  m.A = {2.0, 1.3, 0.7};
  const EchoRecord r = echo_expansions(0.0, m);
  EXPECT_DOUBLE_EQ(r.I_half_x, 3.0);
  EXPECT_DOUBLE_EQ(r.I_threehalf_x, 1.0);
  EXPECT_EQ(r.I_half_y, 0.0);
  EXPECT_EQ(r.I_threehalf_y, 0.0);
}

TEST(Expansions, ExactClosedForm) {
  const SeriesModel m = SeriesModel::ideal(5, SeriesTail::IdealTail);
  for (double th : {-1.5, 0.3, 1.1}) {
    const EchoRecord r = echo_expansions(th, m);
    EXPECT_NEAR(r.I_half_x, 0.75 * std::cos(th), 1e-14);
    EXPECT_NEAR(r.I_half_y, -0.75 * std::sin(th), 1e-14);
    EXPECT_NEAR(r.I_threehalf_x, 0.25 * std::cos(3 * th), 1e-14);
    EXPECT_NEAR(r.I_threehalf_y, -0.25 * std::sin(3 * th), 1e-14);
  }
}

TEST(Expansions, PrintedCubicCoefficient) {
  const std::vector<double> A{1, 1, 1, 1};
  const double th = 1e-2;
  const EchoRecord r = echo_expansions_printed(th, A);
  EXPECT_NEAR(r.I_half_y, -0.75 * th + th * th * th / 8, 1e-18);
  EXPECT_NEAR(r.I_threehalf_y, -0.75 * th + 9 * th * th * th / 8, 1e-18);
}

TEST(Expansions, PrintedOrderResidualScaling) {
  // sim - printed shrinks as theta^4 (x) and theta^5 (y).
  auto resid = [](double th) {
    const EchoRecord s = pipeline_record(th, PipelineOptions{});
    const EchoRecord p = echo_expansions_printed(th, {1, 1, 1, 1});
    return std::array<double, 2>{std::abs(s.I_half_x - p.I_half_x) + std::abs(s.I_threehalf_x - p.I_threehalf_x),
                                 std::abs(s.I_half_y - p.I_half_y) + std::abs(s.I_threehalf_y - p.I_threehalf_y)};
  };
  const auto a = resid(0.1), b = resid(0.05);
  EXPECT_NEAR(std::log2(a[0] / b[0]), 4.0, 0.1);
  EXPECT_NEAR(std::log2(a[1] / b[1]), 5.0, 0.1);
  for (double th = -1.0; th <= 1.0; th += 0.25) {
    const auto r = resid(th);
    EXPECT_LE(r[0], 1.0 * std::pow(th, 4) + 1e-12);
    EXPECT_LE(r[1], 0.6 * std::pow(std::abs(th), 5) + 1e-12);
  }
}

TEST(Combine, Values) {
  const SeriesModel ideal = SeriesModel::ideal(5, SeriesTail::IdealTail);
  const EchoRecord z = echo_expansions(0.0, ideal);
  EXPECT_DOUBLE_EQ(combine_uncorrupted(z), 1.0);
  EXPECT_EQ(combine_corrupted_linear(z).first, 0.0);
  EXPECT_EQ(combine_corrupted_square(z), 0.0);
  // theta^4 coefficient of (9 cos t - cos 3t)/8 is (9 - 81)/(8*24) = -3/8.
  const double th = 0.3;
  EXPECT_LE(std::abs(combine_uncorrupted(echo_expansions(th, ideal)) - 1.0), 0.375 * std::pow(th, 4) * 1.01);
  const double h = 1e-5;
  EXPECT_NEAR(combine_corrupted_linear(echo_expansions(h, ideal)).first / h, 1.0, 1e-9);
  EXPECT_NEAR(combine_corrupted_linear(echo_expansions(h, ideal)).second / h, 1.0, 1e-9);
  EXPECT_NEAR(combine_corrupted_square(echo_expansions(1e-3, ideal)) / 1e-6, 2.0, 1e-5);
  SeriesModel table;
  table.A = {14.19, 14.15, 15.9, 16.0, 14.5, 17.0};
  EXPECT_NEAR(combine_uncorrupted(echo_expansions(0.0, table)), 201.3561, 1e-4);
}

TEST(Combine, CubicRatioOneToNine) {
  // -4/3 I_y = theta - c theta^3: c_half : c_threehalf = 1 : 9 (printed order).
  const std::vector<double> A{1, 1, 1, 1};
  const double th = 0.1;
  const auto lin = combine_corrupted_linear(echo_expansions_printed(th, A));
  const double c1 = (th - lin.first) / std::pow(th, 3);
  const double c2 = (th - lin.second) / std::pow(th, 3);
  EXPECT_NEAR(c2 / c1, 9.0, 1e-9);
}

TEST(Combine, Symmetry) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.5), a(0.8, 1.2);
  for (int k = 0; k < 20; ++k) {
    SeriesModel m;
    m.A = {a(rng), a(rng), a(rng), a(rng), a(rng), a(rng)};
    const double th = u(rng);
    EXPECT_NEAR(combine_uncorrupted(echo_expansions(th, m)),
                combine_uncorrupted(echo_expansions(-th, m)), 1e-13);
    const auto p = combine_corrupted_linear(echo_expansions(th, m));
    const auto q = combine_corrupted_linear(echo_expansions(-th, m));
    EXPECT_NEAR(p.first, -q.first, 1e-13);
    EXPECT_NEAR(p.second, -q.second, 1e-13);
  }
}

TEST(Pipeline, TauDependenceRefocused) {
  // The cycled echoes come from the (+-1/2) and (+-3/2) pair coherences, which
  // tau-P-tau refocuses for any detuning triple: the echo does not depend on
  // tau. The U-spaced gaps are not refocused and do move it.
  std::mt19937_64 rng(4);
  PipelineOptions a, b;
  b.tau_us = 260.0;
  bool moved = false;
  for (int k = 0; k < 20; ++k) {
    ShotDraw d;
    d.detunings = random_detunings(rng);
    const EchoRecord r = pipeline_record(0.4, a, d);
    const EchoRecord q = pipeline_record(0.4, b, d);
    EXPECT_NEAR(r.I_half_x, q.I_half_x, 1e-10);
    EXPECT_NEAR(r.I_half_y, q.I_half_y, 1e-10);
    EXPECT_NEAR(r.I_threehalf_x, q.I_threehalf_x, 1e-10);
    EXPECT_NEAR(r.I_threehalf_y, q.I_threehalf_y, 1e-10);
    if (std::abs(r.I_half_x - pipeline_record(0.4, a).I_half_x) > 1e-3) moved = true;
  }
  EXPECT_TRUE(moved);
}
