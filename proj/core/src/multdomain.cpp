#include "opnorm/multdomain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "opnorm/random.hpp"

namespace opnorm {

namespace {

double relative_distance(const SubalgebraBasis& d, const AlgebraElement& x) {
  AlgebraElement r = x;
  for (const auto& b : d.basis) r -= hs_inner(b, x) * b;
  return hs_norm(r) / std::max(1.0, hs_norm(x));
}

AlgebraElement random_member(const SubalgebraBasis& d, SeededGenerator& gen) {
  AlgebraElement a = AlgebraElement::zero(d.ambient);
  for (const auto& b : d.basis) a += gen.complex_gaussian() * b;
  const double nrm = element_norm(a);
  if (nrm > 0.0) a *= 1.0 / nrm;
  return a;
}

}  // namespace

double span_residual(const SubalgebraBasis& d, const AlgebraElement& x) {
  require_same_shape(d.ambient, x.shape(), "span_residual");
  return relative_distance(d, x);
}

SubalgebraBasis multiplicative_domain(const LinearMapRep& u, const MultDomainOptions& options) {
  if (!is_cp(u, options.cp_tol)) throw DomainError("multiplicative_domain: map is not completely positive");
  if (!is_unital(u, options.unital_tol)) throw DomainError("multiplicative_domain: map is not unital");

  const AlgebraShape& dom = u.domain();
  const int n = dom.dimension();
  const int m = u.codomain().dimension();

  // Column j: the conditions evaluated at a = e_j, for every matrix unit e_k.
  ComplexMatrix system(2 * n * m, n);
  for (int j = 0; j < n; ++j) {
    const AlgebraElement ej = AlgebraElement::basis_element(dom, j);
    const AlgebraElement& uj = u.image(j);
    for (int k = 0; k < n; ++k) {
      const AlgebraElement ek = AlgebraElement::basis_element(dom, k);
      const AlgebraElement& uk = u.image(k);
      const AlgebraElement left = apply(u, multiply(ek, ej)) - multiply(uk, uj);
      const AlgebraElement right = apply(u, multiply(ej, ek)) - multiply(uj, uk);
      system.col(j).segment(2 * k * m, m) = left.coordinates();
      system.col(j).segment(2 * k * m + m, m) = right.coordinates();
    }
  }

  Eigen::JacobiSVD<ComplexMatrix> svd_sys(system, Eigen::ComputeFullV);
  const RealVector& sv = svd_sys.singularValues();
  SubalgebraBasis out;
  out.ambient = dom;
  out.kernel_cutoff = options.rank_tol * std::max(sv.size() ? sv(0) : 0.0, 1.0);
  out.smallest_retained = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    const double s = j < sv.size() ? sv(j) : 0.0;
    if (s > out.kernel_cutoff) {
      out.smallest_retained = std::min(out.smallest_retained, s);
    } else {
      out.basis.push_back(AlgebraElement::from_coordinates(dom, svd_sys.matrixV().col(j)));
    }
  }
  out.dimension = static_cast<int>(out.basis.size());

  out.unit_residual = relative_distance(out, AlgebraElement::unit(dom));
  for (const auto& a : out.basis) {
    out.adjoint_residual = std::max(out.adjoint_residual, relative_distance(out, a.adjoint()));
    for (const auto& b : out.basis) {
      out.product_residual = std::max(out.product_residual, relative_distance(out, multiply(a, b)));
    }
    const AlgebraElement ua = apply(u, a);
    const AlgebraElement ua_star = ua.adjoint();
    const double left = element_norm(apply(u, multiply(a.adjoint(), a)) - multiply(ua_star, ua));
    const double right = element_norm(apply(u, multiply(a, a.adjoint())) - multiply(ua, ua_star));
    out.schwarz_residual = std::max({out.schwarz_residual, left, right});
  }
  return out;
}

BimodularityReport bimodularity_residuals(const LinearMapRep& u, const AlgebraElement& a, const AlgebraElement& x,
                                          const AlgebraElement& b) {
  const AlgebraElement ua = apply(u, a);
  const AlgebraElement ux = apply(u, x);
  const AlgebraElement ub = apply(u, b);
  BimodularityReport r;
  r.samples = 1;
  r.left = element_norm(apply(u, multiply(a, x)) - multiply(ua, ux));
  r.right = element_norm(apply(u, multiply(x, b)) - multiply(ux, ub));
  r.two_sided = element_norm(apply(u, multiply(multiply(a, x), b)) - multiply(multiply(ua, ux), ub));
  r.max_residual = std::max({r.left, r.right, r.two_sided});
  return r;
}

BimodularityReport verify_bimodularity(const LinearMapRep& u, const SubalgebraBasis& d, int samples,
                                       std::uint64_t seed) {
  require_same_shape(u.domain(), d.ambient, "verify_bimodularity");
  SeededGenerator gen(seed);
  BimodularityReport out;
  for (int s = 0; s < samples; ++s) {
    const AlgebraElement a = random_member(d, gen);
    const AlgebraElement b = random_member(d, gen);
    AlgebraElement x = random_element(gen, d.ambient);
    x *= 1.0 / element_norm(x);
    const BimodularityReport r = bimodularity_residuals(u, a, x, b);
    out.left = std::max(out.left, r.left);
    out.right = std::max(out.right, r.right);
    out.two_sided = std::max(out.two_sided, r.two_sided);
    ++out.samples;
  }
  out.max_residual = std::max({out.left, out.right, out.two_sided});
  return out;
}

}  // namespace opnorm
