#include <gtest/gtest.h>

#include <cmath>

#include "opnorm/cbminnorm.hpp"
#include "opnorm/multdomain.hpp"
#include "opnorm/testkit.hpp"

namespace opnorm {
namespace {

std::vector<ComplexMatrix> ginibre(SeededGenerator& g, int n, int d) {
  std::vector<ComplexMatrix> x;
  for (int j = 0; j < n; ++j) x.push_back(random_ginibre(g, d, d));
  return x;
}

LinearMapRep diagonal_pinching(int d) {
  const AlgebraShape sh = AlgebraShape::matrix(d);
  std::vector<AlgebraElement> images;
  for (int r = 0; r < d; ++r) {
    for (int s = 0; s < d; ++s) {
      images.push_back(r == s ? AlgebraElement::matrix_unit(sh, 0, r, s) : AlgebraElement::zero(sh));
    }
  }
  return LinearMapRep(sh, sh, std::move(images));
}

TEST(SeeSaw, ScalarCoefficients) {
  const std::vector<ComplexMatrix> x = {ComplexMatrix::Constant(1, 1, 1.0), ComplexMatrix::Constant(1, 1, -2.0),
                                        ComplexMatrix::Constant(1, 1, Complex(0.0, 3.0))};
  EXPECT_NEAR(seesaw_min_norm(x).lower_bound, 6.0, 1e-8);
}

TEST(SeeSaw, WitnessReproducesBound) {
  SeededGenerator g(21);
  const auto x = ginibre(g, 3, 2);
  SeeSawOptions o;
  o.seed = 5;
  const SeeSawResult r = seesaw_min_norm(x, o);
  EXPECT_EQ(r.K, 2);
  EXPECT_NEAR(evaluate_tensor_norm(r.unitaries, x), r.lower_bound, 1e-10);
  EXPECT_NEAR(r.xi.norm(), 1.0, 1e-12);
  EXPECT_NEAR(r.eta.norm(), 1.0, 1e-12);
  EXPECT_LE(r.max_decrease, 1e-12);
  for (const auto& u : r.unitaries) EXPECT_LT(unitarity_defect(u), 1e-10);
}

TEST(SeeSaw, PinnedFirstUnitary) {
  SeededGenerator g(22);
  SeeSawOptions o;
  o.pin_first = true;
  const SeeSawResult r = seesaw_min_norm(ginibre(g, 3, 2), o);
  EXPECT_LT((r.unitaries[0] - ComplexMatrix::Identity(2, 2)).norm(), 1e-14);
}

TEST(SeeSaw, IdentityUnitariesGiveNormOfSum) {
  SeededGenerator g(23);
  const auto x = ginibre(g, 2, 2);
  const std::vector<ComplexMatrix> ones(2, ComplexMatrix::Identity(3, 3));
  EXPECT_NEAR(evaluate_tensor_norm(ones, x), operator_norm(x[0] + x[1]), 1e-12);
}

TEST(CbNorm, BoundsAgreeRule) {
  EXPECT_TRUE(bounds_agree(1.0, 1.0));
  EXPECT_TRUE(bounds_agree(1.0, 1.0 + 5e-7));
  EXPECT_FALSE(bounds_agree(1.0, 1.0 + 2e-6));
  EXPECT_TRUE(bounds_agree(1000.0, 999.6));
  EXPECT_FALSE(bounds_agree(1.0, 0.999));
}

TEST(CbNorm, UpperAndLowerAgree) {
  SeededGenerator g(24);
  for (int d : {2, 3}) {
    const AgreementReport r = cb_norm_linf(ginibre(g, 3, d));
    EXPECT_TRUE(r.agree) << "d=" << d << " upper=" << r.upper << " lower=" << r.lower;
    EXPECT_LT(r.sdp.reconstruction_residual, 1e-6);
    EXPECT_NEAR(r.sdp.factorization_value, r.upper, 1e-5);
  }
}

TEST(CbNorm, FactorizationSdp) {
  SeededGenerator g(25);
  const auto x = ginibre(g, 2, 3);
  const MinNormFactorization f = min_norm_factorization_sdp(x);
  for (std::size_t j = 0; j < x.size(); ++j) EXPECT_LT((f.y[j] * f.z[j] - x[j]).norm(), 1e-6);
}

TEST(CbNorm, RejectsMultiBlockCoefficients) {
  EXPECT_THROW(matrix_coefficients({AlgebraElement::unit(AlgebraShape({1, 1}))}), ShapeError);
}

TEST(Tensor, IdentityTensorHasNormOne) {
  const FreeTensor t({AlgebraElement::unit(AlgebraShape::matrix(2))});
  EXPECT_NEAR(max_norm(t).value, 1.0, 1e-8);
  const MinNormReport m = min_norm(t);
  EXPECT_NEAR(m.upper, 1.0, 1e-8);
  EXPECT_NEAR(m.lower, 1.0, 1e-8);
}

TEST(Tensor, ConstructionChecksShapes) {
  EXPECT_THROW(FreeTensor(std::vector<AlgebraElement>{}), ShapeError);
  EXPECT_THROW(FreeTensor({AlgebraElement::unit(AlgebraShape({2})), AlgebraElement::unit(AlgebraShape({3}))}),
               ShapeError);
}

TEST(Tensor, NuclearityGapCloses) {
  SeededGenerator g(26);
  const NuclearityReport r = nuclearity_gap(random_free_tensor(g, 3, 2));
  EXPECT_TRUE(r.agree);
  EXPECT_LE(r.gap, 5e-4 * std::max(1.0, r.max_value));
}

TEST(Tensor, ContractionInequality) {
  SeededGenerator g(27);
  const FreeTensor t = random_free_tensor(g, 3, 2);
  const LinearMapRep u = random_linear_map(g, AlgebraShape::matrix(2), AlgebraShape({1, 2}));
  const ContractionReport r = check_finite_rank_contraction(u, t);
  EXPECT_TRUE(r.holds);
  EXPECT_NEAR(r.slack, r.rhs - r.lhs, 0.0);
}

TEST(MultDomain, ClosedFormDimensions) {
  for (int d = 2; d <= 3; ++d) {
    const AlgebraShape sh = AlgebraShape::matrix(d);
    EXPECT_EQ(multiplicative_domain(LinearMapRep::identity(sh)).dimension, d * d);
    EXPECT_EQ(multiplicative_domain(diagonal_pinching(d)).dimension, d);

    std::vector<AlgebraElement> dep;
    for (int r = 0; r < d; ++r) {
      for (int s = 0; s < d; ++s) {
        dep.push_back(r == s ? (1.0 / d) * AlgebraElement::unit(sh) : AlgebraElement::zero(sh));
      }
    }
    EXPECT_EQ(multiplicative_domain(LinearMapRep(sh, sh, std::move(dep))).dimension, 1);
  }
}

TEST(MultDomain, BasisIsSubalgebraAndBimodular) {
  const LinearMapRep u = diagonal_pinching(3);
  const SubalgebraBasis d = multiplicative_domain(u);
  EXPECT_LT(d.unit_residual, 1e-9);
  EXPECT_LT(d.adjoint_residual, 1e-9);
  EXPECT_LT(d.product_residual, 1e-9);
  EXPECT_LT(d.schwarz_residual, 1e-9);
  EXPECT_LT(span_residual(d, AlgebraElement::unit(u.domain())), 1e-12);
  EXPECT_LT(verify_bimodularity(u, d, 10, 1).max_residual, 1e-8);
}

TEST(MultDomain, NonMemberIsFlagged) {
  const LinearMapRep u = diagonal_pinching(2);
  const AlgebraShape& sh = u.domain();
  const AlgebraElement a = AlgebraElement::matrix_unit(sh, 0, 0, 1) + AlgebraElement::matrix_unit(sh, 0, 1, 0);
  const BimodularityReport r = bimodularity_residuals(u, a, a, AlgebraElement::unit(sh));
  EXPECT_GT(r.max_residual, 1e-3);
  EXPECT_GT(span_residual(multiplicative_domain(u), a), 1e-3);
}

TEST(MultDomain, RejectsNonCpAndNonUnital) {
  const AlgebraShape sh = AlgebraShape::matrix(2);
  std::vector<AlgebraElement> tr;
  for (int r = 0; r < 2; ++r) {
    for (int s = 0; s < 2; ++s) tr.push_back(AlgebraElement::matrix_unit(sh, 0, s, r));
  }
  EXPECT_THROW(multiplicative_domain(LinearMapRep(sh, sh, std::move(tr))), DomainError);
  EXPECT_THROW(multiplicative_domain(2.0 * LinearMapRep::identity(sh)), DomainError);
}

TEST(Testkit, RandomFreeTensorShape) {
  SeededGenerator g(28);
  const FreeTensor t = random_free_tensor(g, 4, 3);
  EXPECT_EQ(t.n(), 4);
  EXPECT_EQ(t.shape(), AlgebraShape::matrix(3));
}

TEST(Testkit, GridOracleMatchesSeeSaw) {
  SeededGenerator g(29);
  const auto x = ginibre(g, 3, 2);
  const double grid = grid_oracle_min_norm(x).value;
  EXPECT_NEAR(grid, seesaw_min_norm(x).lower_bound, 1e-3 * std::max(1.0, grid));
}

TEST(Testkit, GridOracleRange) {
  SeededGenerator g(30);
  EXPECT_THROW(grid_oracle_min_norm(ginibre(g, 2, 3)), ShapeError);
  EXPECT_THROW(grid_oracle_min_norm(ginibre(g, 4, 2)), ShapeError);
  EXPECT_LT(unitarity_defect(u2_from_angles(0.3, -1.2, 2.0, 0.7)), 1e-14);
}

}  // namespace
}  // namespace opnorm
