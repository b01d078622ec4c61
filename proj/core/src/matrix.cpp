#include "opnorm/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace opnorm {

namespace {

std::string describe(const ComplexMatrix& a) {
  std::ostringstream os;
  os << a.rows() << "x" << a.cols() << " matrix, max |entry| = "
     << (a.size() ? a.cwiseAbs().maxCoeff() : 0.0);
  return os.str();
}

void require_finite(const ComplexMatrix& a, const char* op) {
  if (!all_finite(a)) {
    throw NumericalError(std::string(op) + ": non-finite entries in " + describe(a));
  }
}

void require_square(const ComplexMatrix& a, const char* op) {
  if (a.rows() != a.cols()) {
    throw ShapeError(std::string(op) + ": expected a square matrix, got " +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

}  // namespace

bool all_finite(const ComplexMatrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
    }
  }
  return true;
}

ComplexMatrix hermitian_part(const ComplexMatrix& a) {
  return (a + a.adjoint()) * 0.5;
}

double hermiticity_defect(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
}

EigenSystem herm_eigensystem(const ComplexMatrix& a) {
  require_square(a, "herm_eigensystem");
  require_finite(a, "herm_eigensystem");
  if (hermiticity_defect(a) > kHermitianTolerance) {
    throw ShapeError("herm_eigensystem: input is not Hermitian (defect " +
                     std::to_string(hermiticity_defect(a)) + ")");
  }
  if (a.rows() == 0) return {RealVector(0), ComplexMatrix(0, 0)};
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(a));
  if (solver.info() != Eigen::Success) {
    throw NumericalError("herm_eigensystem: QL iteration did not converge for " + describe(a));
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

SingularSystem svd(const ComplexMatrix& a) {
  require_finite(a, "svd");
  Eigen::JacobiSVD<ComplexMatrix> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("svd: iteration did not converge for " + describe(a));
  }
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

RealVector singular_values(const ComplexMatrix& a) {
  require_finite(a, "singular_values");
  if (a.size() == 0) return RealVector(0);
  Eigen::JacobiSVD<ComplexMatrix> solver(a);
  return solver.singularValues();
}

double operator_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a)(0);
}

double trace_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a).sum();
}

PsdCheck psd_check(const ComplexMatrix& a, double tol) {
  if (a.rows() == 0) return {true, 0.0};
  const EigenSystem es = herm_eigensystem(a);
  const double lo = es.values(0);
  return {lo >= -tol, lo};
}

ComplexMatrix polar_unitary(const ComplexMatrix& a) {
  require_square(a, "polar_unitary");
  if (a.rows() == 0) return a;
  const SingularSystem s = svd(a);
  return s.u * s.v.adjoint();
}

ComplexMatrix psd_sqrt(const ComplexMatrix& a) {
  if (a.rows() == 0) return a;
  const EigenSystem es = herm_eigensystem(a);
  const RealVector root = es.values.cwiseMax(0.0).cwiseSqrt();
  return es.vectors * root.asDiagonal() * es.vectors.adjoint();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double unitarity_defect(const ComplexMatrix& v) {
  return (v.adjoint() * v - ComplexMatrix::Identity(v.cols(), v.cols())).norm();
}

double max_psd_step(const ComplexMatrix& x, const ComplexMatrix& d) {
  if (x.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::LLT<ComplexMatrix> chol(hermitian_part(x));
  if (chol.info() != Eigen::Success) return 0.0;
  // L^{-1} D L^{-*}
  ComplexMatrix w = chol.matrixL().solve(hermitian_part(d));
  w = chol.matrixL().solve(w.adjoint().eval()).adjoint();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(w), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  if (lo >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lo;
}

}  // namespace opnorm
