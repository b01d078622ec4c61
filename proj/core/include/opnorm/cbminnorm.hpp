#pragma once

// cb-norm of T: l_inf^n -> M_d, T(e_i) = x_i, from two sides.
//
// Lower bounds: ||T||_cb = sup ||sum_i u_i (x) x_i|| over unitaries u_i on
// some finite-dimensional C^K. The see-saw alternates between the optimal
// unitaries for fixed witness vectors (a polar decomposition per index) and
// the top singular pair of sum_i u_i (x) x_i for fixed unitaries, so the
// objective never decreases.
//
// Upper bound: inf ||sum y_i y_i*||^{1/2} ||sum z_i* z_i||^{1/2} over
// x_i = y_i z_i, which is the same conic program as the dec-norm. Since M_d
// is injective the two norms coincide, and the gap between the bounds
// measures how well the see-saw closed in.

#include <cstdint>
#include <string>
#include <vector>

#include "opnorm/decnorm.hpp"

namespace opnorm {

struct SeeSawOptions {
  /// Dimension of the unitaries; 0 means K = d.
  int K = 0;
  int restarts = 32;
  std::uint64_t seed = 0;
  int max_iter = 500;
  double tol = 1e-10;
  /// Keep u_0 = 1 fixed (the unit index of a free tensor).
  bool pin_first = false;
};

struct SeeSawResult {
  double lower_bound = 0.0;
  std::vector<ComplexMatrix> unitaries;
  /// Unit vectors in C^K (x) C^d with <eta, (sum u_i (x) x_i) xi> = lower_bound.
  ComplexVector xi;
  ComplexVector eta;
  int K = 0;
  /// Sweeps of the winning restart.
  int iterations = 0;
  int restarts_used = 0;
  int best_restart = 0;
  bool converged = false;
  /// Largest per-sweep decrease over all restarts; stays <= 0 up to rounding.
  double max_decrease = 0.0;
};

/// ||sum_i u_i (x) x_i|| on C^K (x) C^d.
double evaluate_tensor_norm(const std::vector<ComplexMatrix>& u, const std::vector<ComplexMatrix>& x);

SeeSawResult seesaw_min_norm(const std::vector<ComplexMatrix>& x, const SeeSawOptions& options = {});

struct MinNormFactorization {
  double value = 0.0;
  /// x_i = y_i z_i.
  std::vector<ComplexMatrix> y;
  std::vector<ComplexMatrix> z;
  double reconstruction_residual = 0.0;
  /// ||sum y_i y_i*||^{1/2} ||sum z_i* z_i||^{1/2} of the returned factors.
  double factorization_value = 0.0;
  DecCertificate certificate;
};

MinNormFactorization min_norm_factorization_sdp(const std::vector<ComplexMatrix>& x, const DecOptions& options = {});

struct CbOptions {
  SeeSawOptions seesaw;
  DecOptions sdp;
  /// Retry the see-saw with K = 2d when the bounds disagree.
  bool escalate = true;
  double relative_tolerance = 5e-4;
  double negative_tolerance = 1e-6;
};

struct AgreementReport {
  double upper = 0.0;
  double lower = 0.0;
  double gap = 0.0;
  double relative_gap = 0.0;
  bool agree = false;
  int K_used = 0;
  bool escalated = false;
  SeeSawResult seesaw;
  MinNormFactorization sdp;

  std::string verdict() const { return agree ? "agree" : "disagree"; }
};

/// Bounds must come from the same x; verdict "agree" iff
/// -negative_tolerance <= gap <= relative_tolerance * max(1, upper).
bool bounds_agree(double upper, double lower, double relative_tolerance = 5e-4, double negative_tolerance = 1e-6);

AgreementReport cb_norm_linf(const std::vector<ComplexMatrix>& x, const CbOptions& options = {});

/// Blocks of single-block elements; throws ShapeError on a multi-block or
/// mismatched list.
std::vector<ComplexMatrix> matrix_coefficients(const std::vector<AlgebraElement>& x);

}  // namespace opnorm
