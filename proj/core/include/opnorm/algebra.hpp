#pragma once

// Finite-dimensional C*-algebras A = M_{d_1} (+) ... (+) M_{d_k} and their
// elements as block-diagonal complex matrices.

#include <cstddef>
#include <string>
#include <vector>

#include "opnorm/matrix.hpp"

namespace opnorm {

/// Block sizes (d_1, ..., d_k) of a finite-dimensional C*-algebra.
/// The commutative algebra l_inf^n is the shape (1, ..., 1); M_n is (n).
class AlgebraShape {
 public:
  AlgebraShape() = default;
  explicit AlgebraShape(std::vector<int> block_dims);

  static AlgebraShape matrix(int n) { return AlgebraShape({n}); }
  static AlgebraShape commutative(int n);

  const std::vector<int>& block_dims() const { return dims_; }
  std::size_t block_count() const { return dims_.size(); }
  int block_dim(std::size_t i) const { return dims_[i]; }

  /// Sum of d_i^2, the complex dimension of the algebra.
  int dimension() const;
  /// Sum of d_i, the size of the block-diagonal representation.
  int representation_size() const;
  /// Offset of block i in the block-diagonal representation.
  int representation_offset(std::size_t i) const;
  /// Offset of block i in the matrix-unit basis ordering.
  int basis_offset(std::size_t i) const;

  bool is_single_block() const { return dims_.size() == 1; }
  bool is_commutative() const;

  std::string to_string() const;

  friend bool operator==(const AlgebraShape&, const AlgebraShape&) = default;

 private:
  std::vector<int> dims_;
};

/// An element of a finite-dimensional C*-algebra, one square block per
/// summand.
class AlgebraElement {
 public:
  AlgebraElement() = default;
  AlgebraElement(AlgebraShape shape, std::vector<ComplexMatrix> blocks);

  static AlgebraElement zero(const AlgebraShape& shape);
  static AlgebraElement unit(const AlgebraShape& shape);
  /// The matrix unit e^{(block)}_{rs}.
  static AlgebraElement matrix_unit(const AlgebraShape& shape, std::size_t block, int r, int s);
  /// Basis element with the given index in the matrix-unit ordering.
  static AlgebraElement basis_element(const AlgebraShape& shape, int index);
  /// Single-block element wrapping a square matrix.
  static AlgebraElement from_matrix(const ComplexMatrix& m);
  /// Splits a block-diagonal matrix; off-diagonal blocks are ignored.
  static AlgebraElement from_block_diagonal(const AlgebraShape& shape, const ComplexMatrix& m);

  const AlgebraShape& shape() const { return shape_; }
  const std::vector<ComplexMatrix>& blocks() const { return blocks_; }
  const ComplexMatrix& block(std::size_t i) const { return blocks_[i]; }
  ComplexMatrix& block(std::size_t i) { return blocks_[i]; }

  ComplexMatrix to_block_diagonal() const;

  /// Coefficients on the matrix-unit basis.
  ComplexVector coordinates() const;
  static AlgebraElement from_coordinates(const AlgebraShape& shape, const ComplexVector& c);

  AlgebraElement adjoint() const;
  bool is_zero() const;

  AlgebraElement& operator+=(const AlgebraElement& other);
  AlgebraElement& operator-=(const AlgebraElement& other);
  AlgebraElement& operator*=(Complex alpha);

 private:
  AlgebraShape shape_;
  std::vector<ComplexMatrix> blocks_;
};

AlgebraElement operator+(AlgebraElement x, const AlgebraElement& y);
AlgebraElement operator-(AlgebraElement x, const AlgebraElement& y);
AlgebraElement operator*(Complex alpha, AlgebraElement x);
AlgebraElement multiply(const AlgebraElement& x, const AlgebraElement& y);
inline AlgebraElement adjoint(const AlgebraElement& x) { return x.adjoint(); }

/// C*-norm: max over blocks of the operator norm.
double element_norm(const AlgebraElement& x);

/// Hilbert-Schmidt inner product <x, y> = tr(x* y), summed over blocks.
Complex hs_inner(const AlgebraElement& x, const AlgebraElement& y);
double hs_norm(const AlgebraElement& x);

bool is_self_adjoint(const AlgebraElement& x, double tol);
bool is_positive(const AlgebraElement& x, double tol);

/// ||x - y|| <= tol * max(1, ||x||).
bool approx_equal(const AlgebraElement& x, const AlgebraElement& y, double tol = 1e-10);

void require_same_shape(const AlgebraShape& a, const AlgebraShape& b, const char* op);

}  // namespace opnorm
