#include "opnorm/tensorcalc.hpp"

#include <algorithm>
#include <cmath>

namespace opnorm {

FreeTensor::FreeTensor(std::vector<AlgebraElement> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw ShapeError("FreeTensor: need at least the unit coefficient");
  for (const auto& x : coeffs_) require_same_shape(x.shape(), coeffs_.front().shape(), "FreeTensor");
}

MaxNorm max_norm(const FreeTensor& t, const DecOptions& options) {
  MaxNorm out;
  out.certificate = dec_norm_linf(t.coeffs(), options);
  out.value = out.certificate.value;
  return out;
}

MinNormReport min_norm(const FreeTensor& t, const CbOptions& options) {
  CbOptions opt = options;
  opt.seesaw.pin_first = true;
  MinNormReport out;
  out.agree = true;
  for (std::size_t b = 0; b < t.shape().block_count(); ++b) {
    std::vector<ComplexMatrix> x;
    for (const auto& c : t.coeffs()) x.push_back(c.block(b));
    const bool all_zero = std::all_of(x.begin(), x.end(), [](const ComplexMatrix& m) { return m.isZero(0.0); });
    AgreementReport rep;
    if (all_zero) {
      rep.agree = true;
    } else {
      rep = cb_norm_linf(x, opt);
    }
    out.upper = std::max(out.upper, rep.upper);
    out.lower = std::max(out.lower, rep.lower);
    out.blocks.push_back(std::move(rep));
  }
  out.gap = out.upper - out.lower;
  out.agree = bounds_agree(out.upper, out.lower, options.relative_tolerance, options.negative_tolerance);
  return out;
}

NuclearityReport nuclearity_gap(const FreeTensor& t, const CbOptions& options) {
  NuclearityReport out;
  out.max_value = max_norm(t, options.sdp).value;
  const MinNormReport mn = min_norm(t, options);
  out.min_upper = mn.upper;
  out.min_lower = mn.lower;
  out.gap = std::abs(out.max_value - out.min_upper);
  out.closure = mn.upper - mn.lower;
  out.agree = out.gap <= options.relative_tolerance * std::max(1.0, out.max_value) && mn.agree;
  return out;
}

ContractionReport check_finite_rank_contraction(const LinearMapRep& u, double dec_value, const FreeTensor& t,
                                                const DecOptions& options) {
  require_same_shape(u.domain(), t.shape(), "check_finite_rank_contraction");
  std::vector<AlgebraElement> mapped;
  for (const auto& x : t.coeffs()) mapped.push_back(apply(u, x));

  ContractionReport out;
  out.lhs = max_norm(FreeTensor(std::move(mapped)), options).value;
  out.dec_value = dec_value;
  // For matrix coefficients the min norm equals the factorization bound.
  out.min_upper = dec_norm_linf(t.coeffs(), options).value;
  out.rhs = out.dec_value * out.min_upper;
  out.slack = out.rhs - out.lhs;
  out.holds = out.lhs <= out.rhs + 1e-5;
  return out;
}

ContractionReport check_finite_rank_contraction(const LinearMapRep& u, const FreeTensor& t,
                                                const DecOptions& options) {
  return check_finite_rank_contraction(u, dec_norm(u, options).value, t, options);
}

}  // namespace opnorm
