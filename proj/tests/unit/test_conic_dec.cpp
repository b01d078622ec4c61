#include <gtest/gtest.h>

#include <cmath>

#include "opnorm/decnorm.hpp"
#include "opnorm/random.hpp"

namespace opnorm {
namespace {

const Complex I{0.0, 1.0};

ConicProgram lambda_max(const ComplexMatrix& h) {
  ConicProgram p;
  const int t = p.add_variable(1.0);
  const int b = p.add_block(static_cast<int>(h.rows()));
  p.set_constant(b, -h);
  for (int a = 0; a < h.rows(); ++a) p.add_term(b, t, a, a, 1.0);
  return p;
}

std::vector<AlgebraElement> scalars(const std::vector<Complex>& v) {
  std::vector<AlgebraElement> out;
  for (Complex c : v) out.push_back(AlgebraElement::from_matrix(ComplexMatrix::Constant(1, 1, c)));
  return out;
}

TEST(Conic, LambdaMaxOfDiagonal) {
  ComplexMatrix h = ComplexMatrix::Zero(3, 3);
  h.diagonal() << 1.0, 4.0, 2.0;
  const ConicProgram p = lambda_max(h);
  const ConicSolution s = solve(p);
  EXPECT_EQ(s.status, SolveStatus::optimal);
  EXPECT_NEAR(s.primal_value, 4.0, 1e-7);
  EXPECT_TRUE(verify_certificate(p, s, 1e-7).clean);
}

TEST(Conic, LambdaMaxOfRandomHermitian) {
  SeededGenerator g(11);
  for (int n : {2, 5, 9}) {
    const ComplexMatrix h = random_hermitian(g, n);
    const ConicSolution s = solve(lambda_max(h));
    EXPECT_NEAR(s.primal_value, herm_eigensystem(h).values(n - 1), 1e-7) << "n=" << n;
    EXPECT_LE(std::abs(s.gap), 1e-7);
  }
}

TEST(Conic, EqualityConstraint) {
  // min y0 s.t. y0 - y1 >= 0, y1 = 2.
  ConicProgram p;
  const int y0 = p.add_variable(1.0);
  const int y1 = p.add_variable(0.0);
  const int b = p.add_block(1);
  p.add_term(b, y0, 0, 0, 1.0);
  p.add_term(b, y1, 0, 0, -1.0);
  p.add_equality({{y1, 1.0}}, 2.0);
  const ConicSolution s = solve(p);
  EXPECT_EQ(s.status, SolveStatus::optimal);
  EXPECT_NEAR(s.primal_value, 2.0, 1e-7);
}

TEST(Conic, InfeasibleProgramIsReported) {
  // -1 + y (e01 + e10) has eigenvalues -1 +- y.
  ConicProgram p;
  p.add_variable(0.0);
  const int b = p.add_block(2);
  p.set_constant(b, -ComplexMatrix::Identity(2, 2));
  p.add_term(b, 0, 0, 1, 1.0);
  EXPECT_EQ(solve(p).status, SolveStatus::infeasible_suspected);
}

TEST(Conic, PerturbedCertificateIsFlagged) {
  SeededGenerator g(12);
  const ConicProgram p = lambda_max(random_hermitian(g, 4));
  ConicSolution s = solve(p);
  ASSERT_TRUE(verify_certificate(p, s, 1e-7).clean);
  s.y(0) -= 1e-3;
  const CertificateReport r = verify_certificate(p, s, 1e-7);
  EXPECT_FALSE(r.clean);
  EXPECT_FALSE(r.issues.empty());
}

TEST(DecNorm, ScalarCoefficientsGiveL1Norm) {
  const DecCertificate c = dec_norm_linf(scalars({1.0, -2.0, 3.0 * I}));
  EXPECT_NEAR(c.value, 6.0, 1e-8);
  EXPECT_LT(c.reconstruction_residual, 1e-10);
  EXPECT_NEAR(c.factorization_bound, 6.0, 1e-7);
  EXPECT_FALSE(c.flagged);
}

TEST(DecNorm, IdentityHasNormOne) {
  EXPECT_NEAR(dec_norm(LinearMapRep::identity(AlgebraShape::matrix(3))).value, 1.0, 1e-8);
}

TEST(DecNorm, ZeroMap) {
  const DecCertificate c = dec_norm(LinearMapRep::zero(AlgebraShape({2}), AlgebraShape({1, 2})));
  EXPECT_EQ(c.value, 0.0);
}

TEST(DecNorm, FunctionalOnMatrixAlgebraIsTraceNorm) {
  ComplexMatrix c(2, 2);
  c << 1.0, 2.0 * I, 0.0, -1.0;
  const AlgebraShape scalar({1});
  std::vector<AlgebraElement> images;
  for (int r = 0; r < 2; ++r) {
    for (int s = 0; s < 2; ++s) images.push_back(AlgebraElement(scalar, {ComplexMatrix::Constant(1, 1, c(r, s))}));
  }
  const LinearMapRep u(AlgebraShape::matrix(2), scalar, std::move(images));
  EXPECT_NEAR(dec_norm_matrix_domain(u).value, 2.0 * std::sqrt(2.0), 1e-7);
}

TEST(DecNorm, UnitaryCoefficients) {
  SeededGenerator g(13);
  std::vector<AlgebraElement> x;
  for (int j = 0; j < 3; ++j) x.push_back(AlgebraElement::from_matrix(random_haar_unitary(g, 2)));
  EXPECT_NEAR(dec_norm_linf(x).value, 3.0, 1e-6);
}

TEST(DecNorm, PositiveCoefficientsGiveNormOfSum) {
  SeededGenerator g(14);
  const AlgebraShape sh({1, 2});
  std::vector<AlgebraElement> x;
  AlgebraElement sum = AlgebraElement::zero(sh);
  for (int j = 0; j < 3; ++j) {
    x.push_back(random_positive(g, sh));
    sum += x.back();
  }
  EXPECT_NEAR(dec_norm_linf(x).value, element_norm(sum), 1e-7);
}

TEST(DecNorm, CertificateReconstructsCoefficients) {
  SeededGenerator g(15);
  std::vector<AlgebraElement> x;
  for (int j = 0; j < 3; ++j) x.push_back(AlgebraElement::from_matrix(random_ginibre(g, 3, 3)));
  const DecCertificate c = dec_norm_linf(x);
  ASSERT_EQ(c.factor_a.size(), 3u);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const AlgebraElement rebuilt = multiply(c.factor_a[j].adjoint(), c.factor_b[j]);
    EXPECT_TRUE(approx_equal(rebuilt, x[j], 1e-6));
  }
  EXPECT_NEAR(c.factorization_bound, c.value, 1e-5);
  EXPECT_LE(c.dual_value, c.value + 1e-8);
}

TEST(DecNorm, ExtractFactorizationFromDiagonalBlocks) {
  const std::vector<AlgebraElement> x = scalars({2.0 * I});
  const std::vector<AlgebraElement> p = scalars({1.0});
  const std::vector<AlgebraElement> q = scalars({4.0});
  const Factorization f = extract_factorization(x, p, q);
  EXPECT_LT(f.residual, 1e-12);
  EXPECT_TRUE(approx_equal(multiply(f.a[0].adjoint(), f.b[0]), x[0], 1e-12));
}

TEST(DecNorm, SelfAdjointMatchesGeneral) {
  SeededGenerator g(16);
  const AlgebraShape sh({1, 2});
  std::vector<AlgebraElement> x;
  for (int j = 0; j < 3; ++j) x.push_back(random_self_adjoint(g, sh));
  const SelfAdjointDecResult sa = selfadjoint_dec_norm(x);
  EXPECT_NEAR(sa.value, dec_norm_linf(x).value, 2e-6);
  EXPECT_LT(sa.decomposition_residual, 1e-8);
  for (std::size_t j = 0; j < x.size(); ++j) {
    EXPECT_TRUE(is_positive(sa.positive_part[j], 1e-7));
    EXPECT_TRUE(is_positive(sa.negative_part[j], 1e-7));
  }
}

TEST(DecNorm, DirectSumIsMaxOfBlocks) {
  SeededGenerator g(17);
  const AlgebraShape dom({2});
  const std::vector<LinearMapRep> parts = {random_linear_map(g, dom, AlgebraShape({2})),
                                           random_linear_map(g, dom, AlgebraShape({3}))};
  const DirectSumDec r = dec_norm_direct_sum(parts);
  EXPECT_LT(r.discrepancy, 1e-6);
  EXPECT_NEAR(r.max_of_blocks, std::max(r.block_values[0], r.block_values[1]), 0.0);
}

TEST(DecNorm, FactoredBoundDominates) {
  SeededGenerator g(18);
  FactoredMapData data;
  const AlgebraShape sh({2});
  data.a.push_back({random_element(g, sh), random_element(g, sh)});
  data.b.push_back({random_element(g, sh), random_element(g, sh)});
  EXPECT_LE(dec_norm_matrix_domain(map_from_factored(data)).value, dec_upper_bound_factored(data) + 1e-6);
}

TEST(DecNorm, Submultiplicative) {
  SeededGenerator g(19);
  const LinearMapRep u = random_linear_map(g, AlgebraShape({1, 1, 1}), AlgebraShape({2}));
  const LinearMapRep v = random_linear_map(g, AlgebraShape({2}), AlgebraShape({1, 2}));
  EXPECT_LE(dec_norm(compose(v, u)).value, dec_norm(v).value * dec_norm(u).value + 1e-6);
}

TEST(DecNorm, MatrixDomainRejectsSeveralBlocks) {
  SeededGenerator g(20);
  EXPECT_THROW(dec_norm_matrix_domain(random_linear_map(g, AlgebraShape({1, 2}), AlgebraShape({2}))), ShapeError);
}

}  // namespace
}  // namespace opnorm
