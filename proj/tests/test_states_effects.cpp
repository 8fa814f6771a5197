#include <gtest/gtest.h>

#include "povmkit/errors.hpp"
#include "povmkit/states_effects.hpp"
#include "test_random.hpp"

using namespace povmkit;
namespace tr = povmkit::testing;
using tr::Rng;

namespace {

Matrix diag(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

Matrix plus_projector() {
  Matrix m(2, 2);
  m << 0.5, 0.5, 0.5, 0.5;
  return m;
}

const DensityOperator up = DensityOperator::basis(2, 0);

}  // namespace

TEST(DensityOperator, Validation) {
  EXPECT_NO_THROW(DensityOperator::from_matrix(diag(0.3, 0.7)));
  EXPECT_THROW(DensityOperator::from_matrix(diag(0.3, 0.3)), ValidationError);
  EXPECT_THROW(DensityOperator::from_matrix(diag(1.2, -0.2)), ValidationError);
  Matrix skew = diag(0.5, 0.5);
  skew(0, 1) = 0.1;
  EXPECT_THROW(DensityOperator::from_matrix(skew), ValidationError);
  const Vector psi = Vector::Ones(2);
  EXPECT_LT((DensityOperator::pure(psi).matrix() - plus_projector()).norm(), 1e-15);
}

TEST(BornProbability, Examples) {
  Rng rng(21);
  const auto rho = tr::random_state(3, rng);
  EXPECT_NEAR(born_probability(rho, Effect::unit(3)), 1.0, 1e-12);
  EXPECT_NEAR(born_probability(rho, Effect::semitransparent(3)), 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(born_probability(up, Effect::from_matrix(diag(0.8, 0.3))), 0.8);
}

TEST(BornProbability, DimensionMismatch) {
  EXPECT_THROW(born_probability(up, Effect::unit(3)), DimensionError);
}

TEST(BornProbability, ClampsAtBoundary) {
  const auto e = Effect::from_matrix(diag(1.0 + 1e-11, 0.0));
  EXPECT_EQ(born_probability(up, e), 1.0);
}

TEST(Complement, Examples) {
  EXPECT_EQ(Effect::zero(2).complement().matrix(), identity(2));
  EXPECT_EQ(Effect::semitransparent(2).complement().matrix(), 0.5 * identity(2));
  EXPECT_LT((complement(Effect::from_matrix(diag(0.8, 0.3))).matrix() - diag(0.2, 0.7)).norm(), 1e-15);
}

TEST(Complement, InvolutionExactAndProbabilitiesSumToOne) {
  Rng rng(22);
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Index d = tr::random_dim(rng, 2, 8);
    const Effect e = tr::random_effect(d, rng);
    EXPECT_EQ(complement(complement(e)).matrix(), e.matrix());
    const auto rho = tr::random_state(d, rng);
    EXPECT_NEAR(born_probability(rho, e) + born_probability(rho, complement(e)), 1.0, 1e-9);
  }
}

TEST(IsEffect, Examples) {
  Rng rng(23);
  EXPECT_TRUE(is_effect(tr::random_projector(4, 2, rng)));
  EXPECT_FALSE(is_effect(diag(1.2, 0.5)));
  EXPECT_TRUE(is_effect(plus_projector()));
  Matrix upper = Matrix::Zero(2, 2);
  upper(0, 1) = 1.0;
  EXPECT_THROW(is_effect(upper), ValidationError);
}

TEST(Effect, RejectsOutOfRangeWithMagnitude) {
  try {
    Effect::from_matrix(diag(1.2, 0.5));
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.invariant(), "effect-upper-bound");
    ASSERT_TRUE(e.magnitude().has_value());
    EXPECT_NEAR(*e.magnitude(), 0.2, 1e-12);
  }
}

TEST(IsSharp, Examples) {
  EXPECT_TRUE(is_sharp(Effect::from_matrix(diag(1, 0))));
  EXPECT_FALSE(is_sharp(Effect::from_matrix(diag(0.8, 0.3))));
  EXPECT_FALSE(is_sharp(Effect::semitransparent(2)));
}

TEST(IsRegular, Examples) {
  EXPECT_TRUE(is_regular(Effect::from_matrix(diag(1, 0))));
  EXPECT_FALSE(is_regular(Effect::from_matrix(0.4 * identity(2))));
  EXPECT_TRUE(is_regular(Effect::from_matrix(diag(0.7, 0.2))));
  // An eigenvalue of exactly one half counts toward neither side.
  EXPECT_FALSE(is_regular(Effect::from_matrix(diag(0.5, 0.2))));
  EXPECT_FALSE(is_regular(Effect::from_matrix(diag(0.5, 0.8))));
}

TEST(IsRealInState, Examples) {
  EXPECT_TRUE(is_real_in_state(Effect::from_matrix(diag(1, 0)), up));
  EXPECT_FALSE(is_real_in_state(Effect::semitransparent(2), up));
  EXPECT_FALSE(is_real_in_state(Effect::from_matrix(plus_projector()), DensityOperator::maximally_mixed(2)));
  EXPECT_TRUE(is_real_in_state(Effect::from_matrix(diag(0, 1)), up));
  EXPECT_THROW(is_real_in_state(Effect::unit(3), up), DimensionError);
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify(Effect::semitransparent(2)), EffectClass::Semitransparent);
  EXPECT_EQ(classify(Effect::from_matrix(identity(2))), EffectClass::TrivialI);
  EXPECT_EQ(classify(Effect::from_matrix(diag(0.3, 0.1))), EffectClass::BelowSemitransparent);
  EXPECT_EQ(classify(Effect::zero(3)), EffectClass::TrivialO);
  EXPECT_EQ(classify(Effect::from_matrix(diag(1, 0))), EffectClass::SharpProjection);
  EXPECT_EQ(classify(Effect::from_matrix(diag(0.7, 0.2))), EffectClass::Regular);
  EXPECT_EQ(classify(Effect::from_matrix(diag(0.9, 0.6))), EffectClass::AboveSemitransparent);
  EXPECT_EQ(to_string(EffectClass::TrivialO), "Trivial-O");
  EXPECT_EQ(to_string(EffectClass::SharpProjection), "SharpProjection");
}

// Independent oracle: classify from the sorted diagonal of a diagonal effect.
TEST(Classify, MatchesSpectrumOracleOnRandomDiagonals) {
  Rng rng(24);
  std::uniform_int_distribution<int> pick(0, 4);
  const double levels[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Index d = tr::random_dim(rng, 1, 4);
    RealVector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = levels[pick(rng)];
    const Matrix u = tr::random_unitary_matrix(d, rng);
    const Effect e = Effect::from_matrix(u * v.cast<cplx>().asDiagonal() * u.adjoint());
    const double lo = v.minCoeff(), hi = v.maxCoeff();
    const bool binary = (v.array() == 0.0 || v.array() == 1.0).all();
    EffectClass expected;
    if (hi == 0.0) expected = EffectClass::TrivialO;
    else if (lo == 1.0) expected = EffectClass::TrivialI;
    else if (lo == 0.5 && hi == 0.5) expected = EffectClass::Semitransparent;
    else if (binary) expected = EffectClass::SharpProjection;
    else if (lo < 0.5 && hi > 0.5) expected = EffectClass::Regular;
    else if (hi <= 0.5) expected = EffectClass::BelowSemitransparent;
    else expected = EffectClass::AboveSemitransparent;
    EXPECT_EQ(classify(e), expected) << v.transpose();
  }
}

TEST(Properties, RegularityPreservedByComplement) {
  Rng rng(25);
  for (int trial = 0; trial < 500; ++trial) {
    const Effect e = tr::random_effect(tr::random_dim(rng, 2, 8), rng);
    if (is_regular(e)) EXPECT_TRUE(is_regular(complement(e)));
    EXPECT_EQ(is_regular(e), is_regular(complement(e)));
  }
}

TEST(Properties, NontrivialProjectorsAreSharpRegularAndMeetComplementTrivially) {
  Rng rng(26);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index d = tr::random_dim(rng, 2, 8);
    const Matrix p = tr::random_projector(d, tr::random_dim(rng, 1, d - 1), rng);
    const Effect e = Effect::from_matrix(p);
    EXPECT_TRUE(is_sharp(e));
    EXPECT_TRUE(is_regular(e));
    EXPECT_LE(operator_norm(meet_projectors(p, complement(e).matrix())), 1e-9);
  }
}

TEST(BornBridge, RandomStatesAndEffectsGiveProbabilities) {
  Rng rng(27);
  for (int trial = 0; trial < 2000; ++trial) {
    const Eigen::Index d = tr::random_dim(rng, 2, 8);
    const double w = born_probability(tr::random_state(d, rng), tr::random_effect(d, rng));
    EXPECT_GE(w, 0.0);
    EXPECT_LE(w, 1.0);
  }
}

TEST(BornBridge, WitnessEscapesUnitInterval) {
  Rng rng(28);
  int witnessed = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index d = tr::random_dim(rng, 2, 8);
    const Matrix h = tr::random_hermitian(d, rng);
    const RealVector ev = eigenvalues_hermitian(h);
    const double excess = std::max(-ev.minCoeff(), ev.maxCoeff() - 1.0);
    const auto witness = born_violation_witness(h);
    if (excess <= 1e-9) {
      EXPECT_FALSE(witness.has_value());
      continue;
    }
    ASSERT_TRUE(witness.has_value());
    ++witnessed;
    const double value = trace_product(witness->matrix(), h);
    const double outside = std::max(-value, value - 1.0);
    EXPECT_NEAR(outside, excess, 1e-9);
  }
  EXPECT_GT(witnessed, 150);
  EXPECT_FALSE(born_violation_witness(diag(0.2, 0.9)).has_value());
}

TEST(SpanningStates, SpanHermitianOperators) {
  for (Eigen::Index d = 1; d <= 5; ++d) {
    const auto states = spanning_states(d);
    ASSERT_EQ(states.size(), static_cast<std::size_t>(d * d));
    RealMatrix coords(2 * d * d, d * d);
    for (std::size_t k = 0; k < states.size(); ++k) {
      const Matrix& m = states[k].matrix();
      for (Eigen::Index j = 0; j < d * d; ++j) {
        coords(j, static_cast<Eigen::Index>(k)) = m.reshaped()(j).real();
        coords(d * d + j, static_cast<Eigen::Index>(k)) = m.reshaped()(j).imag();
      }
    }
    EXPECT_EQ(Eigen::FullPivLU<RealMatrix>(coords).rank(), d * d);
  }
}
