#pragma once

// Dense complex-matrix primitives shared by every other module.

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace opnorm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Inputs that violate an operation's shape or structural contract.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to converge or met non-finite data.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs within this distance of Hermitian are accepted as Hermitian.
inline constexpr double kHermitianTolerance = 1e-12;

struct EigenSystem {
  RealVector values;      // ascending
  ComplexMatrix vectors;  // columns, unitary
};

struct SingularSystem {
  ComplexMatrix u;   // rows x rows, unitary
  RealVector s;      // nonincreasing, length min(rows, cols)
  ComplexMatrix v;   // cols x cols, unitary
};

bool all_finite(const ComplexMatrix& a);

/// (A + A*) / 2.
ComplexMatrix hermitian_part(const ComplexMatrix& a);

/// max |A - A*| entry, scaled by max(1, max |A|).
double hermiticity_defect(const ComplexMatrix& a);

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized
/// first; inputs further than kHermitianTolerance from Hermitian are
/// rejected. Degenerate eigenvectors come back orthonormal.
EigenSystem herm_eigensystem(const ComplexMatrix& a);

/// Full SVD, A = U diag(s) V*.
SingularSystem svd(const ComplexMatrix& a);

RealVector singular_values(const ComplexMatrix& a);

/// Largest singular value; 0 for empty or zero matrices.
double operator_norm(const ComplexMatrix& a);

/// Sum of singular values.
double trace_norm(const ComplexMatrix& a);

struct PsdCheck {
  bool is_psd = false;
  double min_eigenvalue = 0.0;
};

PsdCheck psd_check(const ComplexMatrix& a, double tol);

/// Unitary factor of the polar decomposition A = U|A|. For rank-deficient
/// A the kernel is completed by the SVD basis, which is deterministic.
ComplexMatrix polar_unitary(const ComplexMatrix& a);

/// Square root of a Hermitian PSD matrix; negative eigenvalues are clipped.
ComplexMatrix psd_sqrt(const ComplexMatrix& a);

/// Kronecker product with row index (i, k) -> i * b.rows() + k.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Frobenius-norm distance from V*V to the identity.
double unitarity_defect(const ComplexMatrix& v);

/// Largest step alpha >= 0 with X + alpha * D still PSD, for X positive
/// definite. Returns +infinity when D does not point out of the cone.
double max_psd_step(const ComplexMatrix& x, const ComplexMatrix& d);

}  // namespace opnorm
