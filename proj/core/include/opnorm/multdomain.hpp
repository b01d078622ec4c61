#pragma once

// Multiplicative domain of a unital CP map u: A -> B,
//
//   D_u = {a : u(a* a) = u(a)* u(a) and u(a a*) = u(a) u(a)*}.
//
// D_u is a C*-subalgebra and u(a x b) = u(a) u(x) u(b) for a, b in D_u and
// every x. Conversely, any a with u(e a) = u(e) u(a) and u(a e) = u(a) u(e)
// for all matrix units e lies in D_u (take x = a*), so D_u is the kernel of a
// complex-linear system and no quadratic solve is needed. The Schwarz
// equalities are checked afterwards on the basis.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "opnorm/cpmap.hpp"

namespace opnorm {

/// The map is not unital CP.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SubalgebraBasis {
  AlgebraShape ambient;
  /// Hilbert-Schmidt orthonormal.
  std::vector<AlgebraElement> basis;
  int dimension = 0;

  /// Distances to the span, relative to the norm of the tested element.
  double unit_residual = 0.0;
  double adjoint_residual = 0.0;
  double product_residual = 0.0;
  /// max over basis a of ||u(a* a) - u(a)* u(a)|| and ||u(a a*) - u(a) u(a)*||.
  double schwarz_residual = 0.0;
  /// Smallest singular value kept out of the kernel, and the cutoff used.
  double kernel_cutoff = 0.0;
  double smallest_retained = 0.0;
};

struct MultDomainOptions {
  double cp_tol = 1e-9;
  double unital_tol = 1e-9;
  /// Kernel cutoff relative to max(largest singular value, 1).
  double rank_tol = 1e-9;
};

SubalgebraBasis multiplicative_domain(const LinearMapRep& u, const MultDomainOptions& options = {});

/// HS distance from x to span(D), divided by max(1, ||x||_HS).
double span_residual(const SubalgebraBasis& d, const AlgebraElement& x);

struct BimodularityReport {
  int samples = 0;
  /// max ||u(a x) - u(a) u(x)||.
  double left = 0.0;
  /// max ||u(x b) - u(x) u(b)||.
  double right = 0.0;
  /// max ||u(a x b) - u(a) u(x) u(b)||.
  double two_sided = 0.0;
  double max_residual = 0.0;
};

/// The three residuals for one triple, each a, b, x used as given.
BimodularityReport bimodularity_residuals(const LinearMapRep& u, const AlgebraElement& a, const AlgebraElement& x,
                                          const AlgebraElement& b);

/// Random unit-norm a, b in span(D) and x in the domain.
BimodularityReport verify_bimodularity(const LinearMapRep& u, const SubalgebraBasis& d, int samples,
                                       std::uint64_t seed);

}  // namespace opnorm
