#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qmem/error_dynamics.hpp"
#include "qmem/logical_code.hpp"

using namespace qmem;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

CMatrix oracle_propagator(const PulseSequence& seq, const LevelView& view) {
  CMatrix u = CMatrix::Identity(view.size(), view.size());
  for (const Pulse& p : seq.pulses()) {
    const auto [i, j] = pulse_indices(p, view);
    u = oracle::rotation(static_cast<int>(view.size()), i, j, p.angle, p.phase) * u;
  }
  return u;
}

}  // namespace

TEST(Basis, Orthonormal) {
  const auto& b = LogicalBasis::standard();
  const CVector v[4] = {b.ket0L, b.ket1L, b.ketIz0L, b.ketIz1L};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(std::abs(v[i].dot(v[j])), i == j ? 1.0 : 0.0, 1e-12);
  const CMatrix iz = oracle::spin(1.5).z;
  EXPECT_LT((b.ketIz0L - (2 / std::sqrt(3.0)) * iz * b.ket0L).norm(), 1e-15);
  EXPECT_LT((b.ketIz1L - (2 / std::sqrt(3.0)) * iz * b.ket1L).norm(), 1e-15);
}

TEST(Qubit, Validation) {
  EXPECT_THROW((LogicalQubit{1.0, 1.0}.validate()), InvalidState);
  EXPECT_NO_THROW((LogicalQubit{Complex(0, 1), 0.0}.validate()));
  std::mt19937_64 rng(1);
  for (int k = 0; k < 10; ++k) EXPECT_NO_THROW(LogicalQubit::random(rng).validate());
}

TEST(Encode, UnitaryActions) {
  const CMatrix& u = encode_unitary();
  EXPECT_LT(max_abs(u.adjoint() * u - CMatrix::Identity(4, 4)), 1e-15);
  const LogicalQubit q{1.0, 0.0};
  const CVector out = u * q.bare();
  EXPECT_NEAR(out(0).real(), 0.5, 1e-15);
  EXPECT_NEAR(out(2).real(), std::sqrt(3.0) / 2, 1e-15);
  std::mt19937_64 rng(2);
  const LogicalQubit r = LogicalQubit::random(rng);
  EXPECT_LT((u * r.bare() - r.encoded()).norm(), 1e-15);
}

TEST(Encode, PulseDecompositionMatchesUnitary) {
  const PulseSequence seq = encode_pulse_sequence();
  const CMatrix u = sequence_propagator(seq, LevelView::nuclear());
  EXPECT_GE(unitary_fidelity(encode_unitary(), u), 1 - 1e-10);
  EXPECT_LT(max_abs(u - oracle_propagator(seq, LevelView::nuclear())), 1e-12);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 100; ++k) {
    const LogicalQubit q = LogicalQubit::random(rng);
    const CVector out = apply_sequence(q.bare(), LevelView::nuclear(), seq);
    EXPECT_GE(state_fidelity(out, q.encoded()), 1 - 1e-10);
  }
}

TEST(Encode, DecodeIsAdjoint) {
  const CMatrix u = sequence_propagator(encode_pulse_sequence(), LevelView::nuclear());
  const CMatrix d = sequence_propagator(decode_pulse_sequence(), LevelView::nuclear());
  EXPECT_LT(max_abs(d - u.adjoint()), 1e-12);
  const CMatrix twice = d * d * u * u;
  EXPECT_LT(max_abs(twice - CMatrix::Identity(4, 4)), 1e-12);
}

TEST(Encode, NeedsDoubleQuantumLines) {
  EXPECT_THROW(encode_pulse_sequence(false), UnsupportedEncoding);
  EXPECT_THROW(decode_pulse_sequence(false), UnsupportedEncoding);
}

TEST(Encode, ExperimentalPathUpToSigns) {
  // f2 pi, f1 pi/3, f3 pi/3, f2 -pi: |-1/2> -> |1_L>, |+1/2> -> |0_L>
  // (logical labels swapped relative to U_enc).
  const PulseSequence seq = experimental_encode_sequence();
  const auto& b = LogicalBasis::standard();
  CVector lo = CVector::Zero(4), hi = CVector::Zero(4);
  lo(1) = 1;
  hi(2) = 1;
  EXPECT_LT((apply_sequence(lo, LevelView::nuclear(), seq) - b.ket1L).norm(), 1e-14);
  EXPECT_LT((apply_sequence(hi, LevelView::nuclear(), seq) - b.ket0L).norm(), 1e-14);
}

TEST(Swap, ElectronToNuclear) {
  const LevelView& q = LevelView::qudit();
  const PulseSequence seq = swap_electron_to_nuclear();
  std::mt19937_64 rng(4);
  for (int k = 0; k < 10; ++k) {
    const LogicalQubit s = LogicalQubit::random(rng);
    CVector in = CVector::Zero(8);
    in(*q.index_of(Level::of(-0.5, -0.5))) = s.alpha;
    in(*q.index_of(Level::of(0.5, -0.5))) = s.beta;
    const CVector out = apply_sequence(in, q, seq);
    CVector expect = CVector::Zero(8);
    expect(*q.index_of(Level::of(-0.5, -0.5))) = s.alpha;
    expect(*q.index_of(Level::of(-0.5, 0.5))) = s.beta;
    EXPECT_GE(state_fidelity(out, expect), 1 - 1e-12);
    EXPECT_LT((out - expect).norm(), 1e-12);
  }
  const CMatrix u = sequence_propagator(seq, q);
  const CMatrix v = sequence_propagator(seq.inverse(), q);
  EXPECT_GE(unitary_fidelity(CMatrix::Identity(8, 8), v * u), 1 - 1e-10);
}

TEST(Swap, CoherenceTransferSupport) {
  const PulseSequence seq = coherence_transfer_to_nuclear();
  CVector in = CVector::Zero(5);
  in(1) = 0.6;
  in(4) = 0.8;
  const CVector out = apply_sequence(in, LevelView::experiment(), seq);
  CVector expect = CVector::Zero(5);
  expect(1) = -0.8;
  expect(2) = 0.6;
  EXPECT_LT((out - expect).norm(), 1e-15);
  CVector only_a = CVector::Zero(5);
  only_a(1) = 1;
  const CVector o2 = apply_sequence(only_a, LevelView::experiment(), seq);
  EXPECT_NEAR(std::abs(o2(2)), 1.0, 1e-15);  // population stays in the nuclear manifold
}

TEST(ErrorTransfer, MovesCorruptedBranch) {
  const LevelView& q = LevelView::qudit();
  const PulseSequence seq = decode_error_transfer();
  std::mt19937_64 rng(5);
  const LogicalQubit s = LogicalQubit::random(rng);
  CVector in = CVector::Zero(8);
  in(*q.index_of(Level::of(-0.5, -1.5))) = s.alpha;
  in(*q.index_of(Level::of(-0.5, 1.5))) = s.beta;
  const CVector out = apply_sequence(in, q, seq);
  CVector expect = CVector::Zero(8);
  expect(*q.index_of(Level::of(0.5, -0.5))) = s.alpha;
  expect(*q.index_of(Level::of(0.5, 0.5))) = s.beta;
  EXPECT_LT((out - expect).norm(), 1e-14);
  EXPECT_THROW(apply_sequence(CVector::Zero(5), LevelView::experiment(), seq), InvalidSequence);
}

namespace {

// Decode (nuclear U_enc^dag) followed by the error transfer, from an encoded
// qubit hit by Z(theta).
CVector decoded(const LogicalQubit& s, double theta) {
  const LevelView& q = LevelView::qudit();
  const CVector hit = oracle::z_error(theta) * s.encoded();
  const CVector nuc = encode_unitary().adjoint() * hit;
  const CVector full = embed(nuc, LevelView::nuclear(), q);
  return apply_sequence(full, q, decode_error_transfer());
}

double upper_population(const CVector& psi) {
  double p = 0;
  for (std::size_t k = 0; k < LevelView::qudit().size(); ++k)
    if (LevelView::qudit()[k].twice_ms == 1) p += std::norm(psi(k));
  return p;
}

}  // namespace

TEST(ErrorTransfer, DecodedStructure) {
  std::mt19937_64 rng(6);
  const LogicalQubit s = LogicalQubit::random(rng);
  EXPECT_NEAR(upper_population(decoded(s, 0.0)), 0.0, 1e-15);
  // A_0 |-1/2>(a|-1/2> + b|+1/2>) - i A_1 theta |+1/2>(...) to O(theta^2).
  const double th = 1e-3;
  const CVector out = decoded(s, th);
  const LevelView& q = LevelView::qudit();
  EXPECT_NEAR(std::abs(out(*q.index_of(Level::of(-0.5, -0.5))) - s.alpha), 0.0, 1e-6);
  EXPECT_NEAR(std::abs(out(*q.index_of(Level::of(-0.5, 0.5))) - s.beta), 0.0, 1e-6);
  const double err = std::sqrt(3.0) / 2 * th;
  EXPECT_NEAR(std::abs(out(*q.index_of(Level::of(0.5, -0.5)))), err * std::abs(s.alpha), 1e-6);
  EXPECT_NEAR(std::abs(out(*q.index_of(Level::of(0.5, 0.5)))), err * std::abs(s.beta), 1e-6);
}

TEST(ErrorTransfer, UpperPopulationIsThreeQuartersSinSquared) {
  std::mt19937_64 rng(7);
  for (double th : {0.01, 0.1, 0.5, 1.3}) {
    const LogicalQubit s = LogicalQubit::random(rng);
    const double p = upper_population(decoded(s, th));
    EXPECT_NEAR(p, 0.75 * std::sin(th) * std::sin(th), 1e-12) << th;
  }
  const double small = upper_population(decoded(LogicalQubit{1.0, 0.0}, 0.01));
  EXPECT_NEAR(small / (0.75 * 1e-4), 1.0, 1e-4);
}

TEST(Fidelity, GlobalPhaseInvariant) {
  std::mt19937_64 rng(8);
  const CVector a = LogicalQubit::random(rng).encoded();
  EXPECT_NEAR(state_fidelity(a, std::polar(1.0, 0.7) * a), 1.0, 1e-15);
  EXPECT_EQ(state_fidelity(a, CVector::Zero(4)), 0.0);
  EXPECT_NEAR(unitary_fidelity(encode_unitary(), std::polar(1.0, -2.0) * encode_unitary()), 1.0,
              1e-15);
}
