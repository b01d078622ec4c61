#include <gtest/gtest.h>

#include <cmath>

#include "opnorm/cpmap.hpp"
#include "opnorm/random.hpp"

namespace opnorm {
namespace {

const Complex I{0.0, 1.0};

LinearMapRep transpose_map(int d) {
  const AlgebraShape sh = AlgebraShape::matrix(d);
  std::vector<AlgebraElement> images;
  for (int r = 0; r < d; ++r) {
    for (int s = 0; s < d; ++s) images.push_back(AlgebraElement::matrix_unit(sh, 0, s, r));
  }
  return LinearMapRep(sh, sh, std::move(images));
}

TEST(Matrix, NormsOfSmallMatrices) {
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d.diagonal() << 3.0, -5.0;
  EXPECT_NEAR(operator_norm(d), 5.0, 1e-14);
  EXPECT_NEAR(trace_norm(d), 8.0, 1e-14);

  ComplexMatrix c(2, 2);
  c << 1.0, 2.0 * I, 0.0, -1.0;
  EXPECT_NEAR(trace_norm(c), 2.0 * std::sqrt(2.0), 1e-13);
}

TEST(Matrix, SqrtPolarKron) {
  SeededGenerator g(1);
  const ComplexMatrix a = random_ginibre(g, 4, 4);
  const ComplexMatrix p = a.adjoint() * a;
  const ComplexMatrix r = psd_sqrt(p);
  EXPECT_LT((r * r - p).norm(), 1e-11);
  EXPECT_LT(hermiticity_defect(r), 1e-13);

  const ComplexMatrix u = polar_unitary(a);
  EXPECT_LT(unitarity_defect(u), 1e-12);
  EXPECT_LT((u * psd_sqrt(p) - a).norm(), 1e-10);

  const ComplexMatrix k = kron(ComplexMatrix::Identity(2, 2), a);
  EXPECT_EQ(k.rows(), 8);
  EXPECT_NEAR(operator_norm(k), operator_norm(a), 1e-12);
}

TEST(Matrix, PsdCheck) {
  ComplexMatrix m(2, 2);
  m << 1.0, 2.0, 2.0, 1.0;
  const PsdCheck c = psd_check(m, 1e-12);
  EXPECT_FALSE(c.is_psd);
  EXPECT_NEAR(c.min_eigenvalue, -1.0, 1e-13);
  EXPECT_TRUE(psd_check(ComplexMatrix::Identity(3, 3), 0.0).is_psd);
}

TEST(Algebra, ShapeBookkeeping) {
  const AlgebraShape sh({1, 2});
  EXPECT_EQ(sh.dimension(), 5);
  EXPECT_EQ(sh.representation_size(), 3);
  EXPECT_EQ(sh.representation_offset(1), 1);
  EXPECT_EQ(sh.basis_offset(1), 1);
  EXPECT_FALSE(sh.is_commutative());
  EXPECT_TRUE(AlgebraShape::commutative(3).is_commutative());
  EXPECT_THROW(AlgebraShape({0}), ShapeError);
}

TEST(Algebra, MatrixUnitsMultiply) {
  const AlgebraShape sh({1, 2});
  const AlgebraElement e01 = AlgebraElement::matrix_unit(sh, 1, 0, 1);
  const AlgebraElement e10 = AlgebraElement::matrix_unit(sh, 1, 1, 0);
  EXPECT_TRUE(approx_equal(multiply(e01, e10), AlgebraElement::matrix_unit(sh, 1, 0, 0)));
  EXPECT_TRUE(multiply(e01, e01).is_zero());
  EXPECT_TRUE(approx_equal(e01.adjoint(), e10));
  EXPECT_NEAR(element_norm(AlgebraElement::unit(sh)), 1.0, 1e-15);
  EXPECT_THROW(multiply(e01, AlgebraElement::unit(AlgebraShape({2}))), ShapeError);
}

TEST(Algebra, CoordinatesRoundTrip) {
  SeededGenerator g(2);
  const AlgebraShape sh({2, 1, 3});
  const AlgebraElement x = random_element(g, sh);
  EXPECT_TRUE(approx_equal(AlgebraElement::from_coordinates(sh, x.coordinates()), x, 0.0));
  EXPECT_NEAR(hs_norm(x) * hs_norm(x), hs_inner(x, x).real(), 1e-12);
}

TEST(CpMap, IdentityAndTranspose) {
  const LinearMapRep id = LinearMapRep::identity(AlgebraShape::matrix(3));
  EXPECT_TRUE(is_cp(id));
  EXPECT_TRUE(is_unital(id));

  const LinearMapRep t = transpose_map(2);
  EXPECT_TRUE(is_unital(t));
  EXPECT_FALSE(is_cp(t));
  EXPECT_NEAR(choi_min_eigenvalue(t), -1.0, 1e-12);
}

TEST(CpMap, CompositionAndAdjoint) {
  SeededGenerator g(3);
  const AlgebraShape a({1, 2}), b({2});
  const LinearMapRep u = random_linear_map(g, a, b);
  EXPECT_LT(map_distance(compose(LinearMapRep::identity(b), u), u), 1e-14);
  EXPECT_LT(map_distance(star_map(star_map(u)), u), 1e-14);

  const AlgebraElement x = random_element(g, a);
  const AlgebraElement lhs = apply(star_map(u), x);
  const AlgebraElement rhs = apply(u, x.adjoint()).adjoint();
  EXPECT_TRUE(approx_equal(lhs, rhs, 1e-12));
}

TEST(CpMap, SandwichIsCp) {
  SeededGenerator g(4);
  const AlgebraElement a = random_element(g, AlgebraShape({2, 1}));
  EXPECT_TRUE(is_cp(sandwich_map(a, a)));
}

TEST(CpMap, DirectSumAndBlocks) {
  SeededGenerator g(5);
  const AlgebraShape dom({2});
  const std::vector<LinearMapRep> parts = {random_linear_map(g, dom, AlgebraShape({1})),
                                           random_linear_map(g, dom, AlgebraShape({2}))};
  const LinearMapRep s = direct_sum(parts);
  EXPECT_EQ(s.codomain(), AlgebraShape({1, 2}));
  EXPECT_LT(map_distance(codomain_block(s, 1), parts[1]), 1e-15);
}

TEST(Random, DeterministicForks) {
  SeededGenerator a(42), b(42);
  EXPECT_EQ(a.next_u64(), b.next_u64());
  SeededGenerator f1 = SeededGenerator(42).fork(1), f2 = SeededGenerator(42).fork(2);
  EXPECT_NE(f1.next_u64(), f2.next_u64());
  SeededGenerator h1(7), h2(7);
  EXPECT_EQ((random_haar_unitary(h1, 3) - random_haar_unitary(h2, 3)).norm(), 0.0);
}

TEST(Random, GeneratedObjectsHaveTheirProperties) {
  SeededGenerator g(6);
  EXPECT_LT(unitarity_defect(random_haar_unitary(g, 5)), 1e-12);
  EXPECT_LT(hermiticity_defect(random_hermitian(g, 4)), 1e-15);
  EXPECT_TRUE(is_positive(random_positive(g, AlgebraShape({1, 3})), 1e-12));
  const LinearMapRep u = random_unital_cp_map(g, AlgebraShape({2}), AlgebraShape({1, 2}));
  EXPECT_TRUE(is_cp(u));
  EXPECT_TRUE(is_unital(u));
}

}  // namespace
}  // namespace opnorm
