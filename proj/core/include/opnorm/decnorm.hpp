#pragma once

// The dec-norm of a linear map u: A -> B between finite-dimensional
// C*-algebras,
//
//   ||u||_dec = inf max(||S_1||, ||S_2||)  over CP maps S_1, S_2 such that
//   x -> [[S_1(x), u(x)], [u_*(x), S_2(x)]] is CP into M_2(B),
//
// computed as one conic program over the Choi matrices of S_1 and S_2:
//
//   minimize s  s.t.  [[C(S_1)_i, C(u)_i], [C(u)_i*, C(S_2)_i]] >= 0  per domain block i,
//                     s 1 - sum_i S_k(1_i) >= 0                      for k = 1, 2.
//
// For a domain l_inf^n the Choi blocks are P_j = S_1(e_j), Q_j = S_2(e_j)
// and the program reads [[P_j, x_j], [x_j*, Q_j]] >= 0, sum P_j <= s,
// sum Q_j <= s. Every optimal point yields a factorization
// x_j = a_j* b_j with ||sum a_j* a_j||^{1/2} ||sum b_j* b_j||^{1/2} <= s.
//
// The returned point is a near-optimal feasible point of the program, not an
// exact minimizer; no claim is made about attainment of the infimum.

#include <vector>

#include "opnorm/conic.hpp"
#include "opnorm/cpmap.hpp"

namespace opnorm {

/// The conic solver could not certify a value.
class SolverFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct DecOptions {
  double gap_tol = 1e-9;
  double feas_tol = 1e-8;
  int max_iter = 200;
};

struct DecCertificate {
  double value = 0.0;
  /// Lower bound from the dual point of the conic program.
  double dual_value = 0.0;
  /// One entry per domain block: the Choi block of S_1 (resp. S_2), as an
  /// element of M_{d_i}(B). For l_inf^n these are P_j = S_1(e_j) in B.
  std::vector<AlgebraElement> p;
  std::vector<AlgebraElement> q;
  /// a_i, b_i in M_{d_i}(B) with C(u)_i = a_i* b_i.
  std::vector<AlgebraElement> factor_a;
  std::vector<AlgebraElement> factor_b;
  double reconstruction_residual = 0.0;
  /// ||sum_i tr_i(a_i* a_i)||^{1/2} ||sum_i tr_i(b_i* b_i)||^{1/2}, with
  /// tr_i the partial trace over the domain factor.
  double factorization_bound = 0.0;
  /// Set when reconstruction_residual exceeds 1e-5.
  bool flagged = false;

  SolveStatus solver_status = SolveStatus::optimal;
  int solver_iterations = 0;
  double solver_gap = 0.0;
  double psd_residual = 0.0;
};

/// ||u||_dec for any map between finite-dimensional C*-algebras.
DecCertificate dec_norm(const LinearMapRep& u, const DecOptions& options = {});

/// The program solved by dec_norm, built from the map scaled by 1 / scale
/// (scale = largest Choi-block norm), so scale times its optimum is
/// ||u||_dec. Empty with scale 0 for the zero map.
struct DecProgram {
  ConicProgram program;
  double scale = 0.0;
};

DecProgram dec_conic_program(const LinearMapRep& u);

/// ||T||_dec for T: l_inf^n -> A, T(e_j) = x_j.
DecCertificate dec_norm_linf(const std::vector<AlgebraElement>& x, const DecOptions& options = {});

/// ||u||_dec for u: M_n -> A.
DecCertificate dec_norm_matrix_domain(const LinearMapRep& u, const DecOptions& options = {});

struct Factorization {
  std::vector<AlgebraElement> a;
  std::vector<AlgebraElement> b;
  double residual = 0.0;
};

/// Given [[P_j, x_j], [x_j*, Q_j]] >= 0, returns a_j, b_j with
/// x_j = a_j* b_j, a_j* a_j <= P_j and b_j* b_j = Q_j (up to clipping of
/// negative eigenvalues of the block matrix, which are at solver tolerance).
Factorization extract_factorization(const std::vector<AlgebraElement>& x, const std::vector<AlgebraElement>& p,
                                    const std::vector<AlgebraElement>& q);

struct SelfAdjointDecResult {
  double value = 0.0;
  /// Positive images u_1(e_j), u_2(e_j) with x_j = u_1(e_j) - u_2(e_j).
  std::vector<AlgebraElement> positive_part;
  std::vector<AlgebraElement> negative_part;
  double decomposition_residual = 0.0;
  SolveStatus solver_status = SolveStatus::optimal;
};

/// inf ||u_1 + u_2|| over CP u_1, u_2 with u = u_1 - u_2, for self-adjoint
/// x_j = u(e_j) on l_inf^n.
SelfAdjointDecResult selfadjoint_dec_norm(const std::vector<AlgebraElement>& x, const DecOptions& options = {});

/// u: M_n -> A with u(e_ij) = sum_k a[k][i]* b[k][j].
struct FactoredMapData {
  std::vector<std::vector<AlgebraElement>> a;
  std::vector<std::vector<AlgebraElement>> b;
};

LinearMapRep map_from_factored(const FactoredMapData& data);

/// ||sum_{k,i} a_ki* a_ki||^{1/2} ||sum_{k,j} b_kj* b_kj||^{1/2}, an upper
/// bound for ||u||_dec.
double dec_upper_bound_factored(const FactoredMapData& data);

struct DirectSumDec {
  std::vector<double> block_values;
  double max_of_blocks = 0.0;
  double joint = 0.0;
  double discrepancy = 0.0;
};

/// Maps u_i: A -> B_i with a common domain. Computes max_i ||u_i||_dec and,
/// independently, ||u||_dec for u = (u_i) into the direct sum.
DirectSumDec dec_norm_direct_sum(const std::vector<LinearMapRep>& parts, const DecOptions& options = {});

}  // namespace opnorm
