#pragma once

// Tensors t = sum_{j<n} U_j (x) x_j with U_0 = 1 and U_1, ..., U_{n-1} free
// unitary generators of the full group C*-algebra of the free group.
//
//   ||t||_max = ||T||_dec,  ||t||_min = ||T||_cb,  T: l_inf^n -> A, e_j -> x_j.
//
// The unit index takes part in both identities; the see-saw for the min
// norm keeps u_0 = 1 fixed, while the conic program treats all indices alike.
// Words of length >= 2 in the generators and the case where both tensor
// factors are free group algebras are out of scope.

#include <string>
#include <vector>

#include "opnorm/cbminnorm.hpp"

namespace opnorm {

class FreeTensor {
 public:
  FreeTensor() = default;
  /// coeffs[0] multiplies the unit U_0.
  explicit FreeTensor(std::vector<AlgebraElement> coeffs);

  int n() const { return static_cast<int>(coeffs_.size()); }
  const AlgebraShape& shape() const { return coeffs_.front().shape(); }
  const std::vector<AlgebraElement>& coeffs() const { return coeffs_; }

 private:
  std::vector<AlgebraElement> coeffs_;
};

struct MaxNorm {
  double value = 0.0;
  DecCertificate certificate;
};

MaxNorm max_norm(const FreeTensor& t, const DecOptions& options = {});

struct MinNormReport {
  double upper = 0.0;
  double lower = 0.0;
  double gap = 0.0;
  bool agree = false;
  /// One report per codomain block; the norm is the max over blocks.
  std::vector<AgreementReport> blocks;

  std::string verdict() const { return agree ? "agree" : "disagree"; }
};

/// Pins u_0 = 1 in the see-saw regardless of options.seesaw.pin_first.
MinNormReport min_norm(const FreeTensor& t, const CbOptions& options = {});

struct NuclearityReport {
  double max_value = 0.0;
  double min_upper = 0.0;
  double min_lower = 0.0;
  /// |max - min upper|.
  double gap = 0.0;
  /// min upper - min lower.
  double closure = 0.0;
  bool agree = false;

  std::string verdict() const { return agree ? "agree" : "disagree"; }
};

NuclearityReport nuclearity_gap(const FreeTensor& t, const CbOptions& options = {});

struct ContractionReport {
  /// ||(id (x) u)(t)||_max.
  double lhs = 0.0;
  double dec_value = 0.0;
  /// Upper bound for ||t||_min.
  double min_upper = 0.0;
  /// dec_value * min_upper.
  double rhs = 0.0;
  double slack = 0.0;
  bool holds = false;
};

/// ||(id (x) u)(t)||_max <= ||u||_dec ||t||_min, checked with tolerance
/// 1e-5. u maps the coefficient algebra of t into another algebra.
ContractionReport check_finite_rank_contraction(const LinearMapRep& u, double dec_value, const FreeTensor& t,
                                                const DecOptions& options = {});
/// Same, with ||u||_dec computed.
ContractionReport check_finite_rank_contraction(const LinearMapRep& u, const FreeTensor& t,
                                                const DecOptions& options = {});

}  // namespace opnorm
