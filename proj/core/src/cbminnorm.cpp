#include "opnorm/cbminnorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "opnorm/random.hpp"

namespace opnorm {

namespace {

void check_coefficients(const std::vector<ComplexMatrix>& x, const char* op) {
  if (x.empty()) throw ShapeError(std::string(op) + ": need at least one coefficient");
  const auto d = x.front().rows();
  if (d < 1) throw ShapeError(std::string(op) + ": empty coefficient");
  for (const auto& xi : x) {
    if (xi.rows() != d || xi.cols() != d) throw ShapeError(std::string(op) + ": coefficients must share one square size");
    if (!all_finite(xi)) throw ShapeError(std::string(op) + ": non-finite coefficient");
  }
}

ComplexMatrix assemble(const std::vector<ComplexMatrix>& u, const std::vector<ComplexMatrix>& x) {
  const auto k = u.front().rows();
  const auto d = x.front().rows();
  ComplexMatrix t = ComplexMatrix::Zero(k * d, k * d);
  for (std::size_t i = 0; i < u.size(); ++i) t += kron(u[i], x[i]);
  return t;
}

struct TopPair {
  double sigma = 0.0;
  ComplexVector xi;
  ComplexVector eta;
};

TopPair top_singular_pair(const ComplexMatrix& t) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(t.adjoint() * t);
  const auto last = t.cols() - 1;
  TopPair p;
  p.xi = es.eigenvectors().col(last);
  ComplexVector tx = t * p.xi;
  p.sigma = tx.norm();
  if (p.sigma > 0.0) {
    p.eta = tx / p.sigma;
  } else {
    p.eta = p.xi;
  }
  return p;
}

// Start unitary from conj(x) placed in the top-left corner of a K x K
// identity (or truncated to K x K).
ComplexMatrix aligned_start(const ComplexMatrix& x, int k) {
  const auto d = static_cast<int>(x.rows());
  ComplexMatrix m = ComplexMatrix::Identity(k, k);
  const int c = std::min(k, d);
  m.topLeftCorner(c, c) = x.conjugate().topLeftCorner(c, c);
  return polar_unitary(m);
}

struct RunResult {
  double value = 0.0;
  std::vector<ComplexMatrix> u;
  TopPair pair;
  int sweeps = 0;
  bool converged = false;
  double max_decrease = -std::numeric_limits<double>::infinity();
};

RunResult run_seesaw(const std::vector<ComplexMatrix>& x, std::vector<ComplexMatrix> u, const SeeSawOptions& opt) {
  const auto d = x.front().rows();
  const auto k = u.front().rows();
  RunResult r;
  r.pair = top_singular_pair(assemble(u, x));
  r.value = r.pair.sigma;
  int quiet = 0;
  for (; r.sweeps < opt.max_iter; ++r.sweeps) {
    // Xi(a, alpha) = xi(a d + alpha); Re <eta, (u (x) x) xi> = Re tr(u Xi x^T H*).
    const ComplexMatrix big_xi = r.pair.xi.reshaped<Eigen::RowMajor>(k, d);
    const ComplexMatrix big_eta = r.pair.eta.reshaped<Eigen::RowMajor>(k, d);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (opt.pin_first && i == 0) continue;
      const ComplexMatrix m = big_xi * x[i].transpose() * big_eta.adjoint();
      u[i] = polar_unitary(m).adjoint();
    }
    const TopPair next = top_singular_pair(assemble(u, x));
    const double improvement = next.sigma - r.value;
    r.max_decrease = std::max(r.max_decrease, -improvement);
    r.pair = next;
    r.value = next.sigma;
    if (improvement < opt.tol) {
      if (++quiet >= 3) {
        r.converged = true;
        ++r.sweeps;
        break;
      }
    } else {
      quiet = 0;
    }
  }
  r.u = std::move(u);
  return r;
}

}  // namespace

std::vector<ComplexMatrix> matrix_coefficients(const std::vector<AlgebraElement>& x) {
  std::vector<ComplexMatrix> out;
  for (const auto& xi : x) {
    if (!xi.shape().is_single_block()) throw ShapeError("coefficients must lie in a single matrix block");
    out.push_back(xi.block(0));
  }
  check_coefficients(out, "matrix_coefficients");
  return out;
}

double evaluate_tensor_norm(const std::vector<ComplexMatrix>& u, const std::vector<ComplexMatrix>& x) {
  if (u.size() != x.size()) throw ShapeError("evaluate_tensor_norm: list lengths differ");
  check_coefficients(x, "evaluate_tensor_norm");
  check_coefficients(u, "evaluate_tensor_norm");
  return operator_norm(assemble(u, x));
}

SeeSawResult seesaw_min_norm(const std::vector<ComplexMatrix>& x, const SeeSawOptions& options) {
  check_coefficients(x, "seesaw_min_norm");
  const int d = static_cast<int>(x.front().rows());
  const int k = options.K > 0 ? options.K : d;
  const int restarts = std::max(1, options.restarts);
  const SeededGenerator root(options.seed);

  SeeSawResult out;
  out.K = k;
  out.lower_bound = -1.0;
  out.max_decrease = -std::numeric_limits<double>::infinity();
  for (int rs = 0; rs < restarts; ++rs) {
    std::vector<ComplexMatrix> start;
    SeededGenerator gen = root.fork(static_cast<std::uint64_t>(rs));
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (options.pin_first && i == 0) {
        start.push_back(ComplexMatrix::Identity(k, k));
      } else if (rs == 0) {
        start.push_back(aligned_start(x[i], k));
      } else {
        start.push_back(random_haar_unitary(gen, k));
      }
    }
    RunResult r = run_seesaw(x, std::move(start), options);
    out.max_decrease = std::max(out.max_decrease, r.max_decrease);
    ++out.restarts_used;
    if (r.value > out.lower_bound) {
      out.lower_bound = r.value;
      out.unitaries = std::move(r.u);
      out.xi = r.pair.xi;
      out.eta = r.pair.eta;
      out.iterations = r.sweeps;
      out.converged = r.converged;
      out.best_restart = rs;
    }
  }
  return out;
}

MinNormFactorization min_norm_factorization_sdp(const std::vector<ComplexMatrix>& x, const DecOptions& options) {
  check_coefficients(x, "min_norm_factorization_sdp");
  std::vector<AlgebraElement> elems;
  for (const auto& xi : x) elems.push_back(AlgebraElement::from_matrix(xi));

  MinNormFactorization out;
  out.certificate = dec_norm_linf(elems, options);
  out.value = out.certificate.value;
  const auto d = x.front().rows();
  ComplexMatrix syy = ComplexMatrix::Zero(d, d);
  ComplexMatrix szz = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < x.size(); ++i) {
    // x_i = a_i* b_i: y_i = a_i*, z_i = b_i.
    out.y.push_back(out.certificate.factor_a[i].block(0).adjoint());
    out.z.push_back(out.certificate.factor_b[i].block(0));
    out.reconstruction_residual = std::max(out.reconstruction_residual, operator_norm(x[i] - out.y[i] * out.z[i]));
    syy += out.y[i] * out.y[i].adjoint();
    szz += out.z[i].adjoint() * out.z[i];
  }
  out.factorization_value = std::sqrt(operator_norm(syy)) * std::sqrt(operator_norm(szz));
  return out;
}

bool bounds_agree(double upper, double lower, double relative_tolerance, double negative_tolerance) {
  const double gap = upper - lower;
  return gap >= -negative_tolerance && gap <= relative_tolerance * std::max(1.0, upper);
}

AgreementReport cb_norm_linf(const std::vector<ComplexMatrix>& x, const CbOptions& options) {
  check_coefficients(x, "cb_norm_linf");
  const int d = static_cast<int>(x.front().rows());

  AgreementReport rep;
  rep.sdp = min_norm_factorization_sdp(x, options.sdp);
  rep.upper = rep.sdp.value;

  SeeSawOptions ss = options.seesaw;
  rep.seesaw = seesaw_min_norm(x, ss);
  rep.K_used = rep.seesaw.K;
  rep.lower = rep.seesaw.lower_bound;
  rep.agree = bounds_agree(rep.upper, rep.lower, options.relative_tolerance, options.negative_tolerance);

  if (!rep.agree && options.escalate && rep.seesaw.K < 2 * d) {
    ss.K = 2 * d;
    SeeSawResult wide = seesaw_min_norm(x, ss);
    rep.escalated = true;
    if (wide.lower_bound > rep.lower) {
      rep.seesaw = std::move(wide);
      rep.lower = rep.seesaw.lower_bound;
      rep.K_used = rep.seesaw.K;
    }
    rep.agree = bounds_agree(rep.upper, rep.lower, options.relative_tolerance, options.negative_tolerance);
  }
  rep.gap = rep.upper - rep.lower;
  rep.relative_gap = rep.gap / std::max(1.0, rep.upper);
  return rep;
}

}  // namespace opnorm
