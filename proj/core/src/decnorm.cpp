#include "opnorm/decnorm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace opnorm {

namespace {

// dim^2 real variables parametrizing a dim x dim Hermitian matrix: the
// diagonal first, then (re, im) for every i < j in row-major order.
struct HermitianVar {
  int dim = 0;
  int first = 0;

  static HermitianVar create(ConicProgram& p, int dim) {
    HermitianVar v{dim, p.variable_count()};
    for (int k = 0; k < dim * dim; ++k) p.add_variable(0.0);
    return v;
  }

  // fn(variable, i, j, coefficient) for the upper-triangle entry each
  // variable controls; the lower triangle follows by Hermitian symmetry.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    int k = first;
    for (int i = 0; i < dim; ++i) fn(k++, i, i, Complex(1.0, 0.0));
    for (int i = 0; i < dim; ++i) {
      for (int j = i + 1; j < dim; ++j) {
        fn(k++, i, j, Complex(1.0, 0.0));
        fn(k++, i, j, Complex(0.0, 1.0));
      }
    }
  }

  void place(ConicProgram& p, int block, int offset, double scale) const {
    for_each([&](int k, int i, int j, Complex c) { p.add_term(block, k, offset + i, offset + j, scale * c); });
  }

  ComplexMatrix value(const RealVector& y) const {
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    for_each([&](int k, int i, int j, Complex c) {
      m(i, j) += y(k) * c;
      if (i != j) m(j, i) += y(k) * std::conj(c);
    });
    return m;
  }
};

// Choi block of u restricted to domain block i and codomain block b, with
// index (r, alpha) -> r * m_b + alpha.
ComplexMatrix choi_part(const LinearMapRep& u, std::size_t i, std::size_t b) {
  const int n = u.domain().block_dim(i);
  const int mb = u.codomain().block_dim(b);
  ComplexMatrix c(n * mb, n * mb);
  for (int r = 0; r < n; ++r) {
    for (int s = 0; s < n; ++s) c.block(r * mb, s * mb, mb, mb) = u.image(i, r, s).block(b);
  }
  return c;
}

// tr over the domain factor of an (n * mb)-square matrix.
ComplexMatrix partial_trace(const ComplexMatrix& c, int n, int mb) {
  ComplexMatrix out = ComplexMatrix::Zero(mb, mb);
  for (int r = 0; r < n; ++r) out += c.block(r * mb, r * mb, mb, mb);
  return out;
}

struct BlockFactors {
  ComplexMatrix a;
  ComplexMatrix b;
};

// [[P, X], [X*, Q]] >= 0  ->  X = a* b with a* a <= P, b* b = Q. Uses the
// square root R of the (clipped) block matrix: R = [R1 R2], X = R1* R2,
// and R2 = W S V* (thin SVD) gives b = V S V*, a = V W* R1.
BlockFactors factor_block(const ComplexMatrix& p, const ComplexMatrix& x, const ComplexMatrix& q) {
  const auto k = p.rows();
  const auto l = q.rows();
  ComplexMatrix m(k + l, k + l);
  m << p, x, x.adjoint(), q;
  const ComplexMatrix r = psd_sqrt(hermitian_part(m));
  const ComplexMatrix r1 = r.leftCols(k);
  const ComplexMatrix r2 = r.rightCols(l);
  Eigen::JacobiSVD<ComplexMatrix> svd_r2(r2, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const ComplexMatrix& w = svd_r2.matrixU();
  const ComplexMatrix& v = svd_r2.matrixV();
  BlockFactors f;
  f.b = v * svd_r2.singularValues().asDiagonal() * v.adjoint();
  f.a = v * w.adjoint() * r1;
  return f;
}

struct Part {
  std::size_t dom_block = 0;
  std::size_t cod_block = 0;
  int n = 0;
  int mb = 0;
  ComplexMatrix cu;
  HermitianVar c1;
  HermitianVar c2;
};

void accept_or_throw(const ConicSolution& sol, const char* what) {
  if (sol.status == SolveStatus::optimal) return;
  const double rel_gap = std::abs(sol.gap) / std::max(1.0, std::abs(sol.primal_value));
  if (sol.status == SolveStatus::max_iterations && rel_gap <= 1e-6 && sol.psd_residual <= 1e-7 &&
      sol.dual_residual <= 1e-6) {
    return;
  }
  std::ostringstream os;
  os << what << ": conic solver returned " << to_string(sol.status) << " after " << sol.iterations
     << " iterations (gap " << sol.gap << ", psd residual " << sol.psd_residual << ", dual residual "
     << sol.dual_residual << ")";
  if (!sol.message.empty()) os << ": " << sol.message;
  throw SolverFailure(os.str());
}

AlgebraShape amplified_shape(const AlgebraShape& codomain, int n) {
  std::vector<int> dims;
  for (int m : codomain.block_dims()) dims.push_back(n * m);
  return AlgebraShape(dims);
}

}  // namespace

namespace {

struct BuiltProgram {
  ConicProgram program;
  std::vector<Part> parts;
  double scale = 0.0;
};

BuiltProgram build_dec_program(const LinearMapRep& u) {
  const AlgebraShape& dom = u.domain();
  const AlgebraShape& cod = u.codomain();
  BuiltProgram bp;
  for (std::size_t i = 0; i < dom.block_count(); ++i) {
    for (std::size_t b = 0; b < cod.block_count(); ++b) {
      ComplexMatrix cu = choi_part(u, i, b);
      if (cu.isZero(0.0)) continue;
      if (!all_finite(cu)) throw NumericalError("dec_norm: non-finite map data");
      Part part;
      part.dom_block = i;
      part.cod_block = b;
      part.n = dom.block_dim(i);
      part.mb = cod.block_dim(b);
      bp.scale = std::max(bp.scale, operator_norm(cu));
      part.cu = std::move(cu);
      bp.parts.push_back(std::move(part));
    }
  }
  if (bp.parts.empty()) return bp;

  ConicProgram& prog = bp.program;
  const int s_var = prog.add_variable(1.0);
  for (auto& part : bp.parts) {
    const int dim = part.n * part.mb;
    part.c1 = HermitianVar::create(prog, dim);
    part.c2 = HermitianVar::create(prog, dim);
    const int blk = prog.add_block(2 * dim);
    ComplexMatrix constant = ComplexMatrix::Zero(2 * dim, 2 * dim);
    constant.topRightCorner(dim, dim) = part.cu / bp.scale;
    constant.bottomLeftCorner(dim, dim) = part.cu.adjoint() / bp.scale;
    prog.set_constant(blk, constant);
    part.c1.place(prog, blk, 0, 1.0);
    part.c2.place(prog, blk, dim, 1.0);
  }
  // s 1 - S_k(1) >= 0 on every codomain block that carries data.
  for (std::size_t b = 0; b < cod.block_count(); ++b) {
    const bool used =
        std::any_of(bp.parts.begin(), bp.parts.end(), [b](const Part& p) { return p.cod_block == b; });
    if (!used) continue;
    const int mb = cod.block_dim(b);
    for (int which = 0; which < 2; ++which) {
      const int blk = prog.add_block(mb);
      for (int a = 0; a < mb; ++a) prog.add_term(blk, s_var, a, a, 1.0);
      for (const auto& part : bp.parts) {
        if (part.cod_block != b) continue;
        const HermitianVar& v = which == 0 ? part.c1 : part.c2;
        v.for_each([&](int k, int row, int col, Complex c) {
          if (row / mb == col / mb) prog.add_term(blk, k, row % mb, col % mb, -c);
        });
      }
    }
  }
  return bp;
}

}  // namespace

DecProgram dec_conic_program(const LinearMapRep& u) {
  BuiltProgram bp = build_dec_program(u);
  return {std::move(bp.program), bp.scale};
}

DecCertificate dec_norm(const LinearMapRep& u, const DecOptions& options) {
  const AlgebraShape& dom = u.domain();
  const AlgebraShape& cod = u.codomain();
  BuiltProgram bp = build_dec_program(u);
  const std::vector<Part>& parts = bp.parts;
  const double scale = bp.scale;
  const ConicProgram& prog = bp.program;

  DecCertificate cert;
  for (std::size_t i = 0; i < dom.block_count(); ++i) {
    const AlgebraShape sh = amplified_shape(cod, dom.block_dim(i));
    cert.p.push_back(AlgebraElement::zero(sh));
    cert.q.push_back(AlgebraElement::zero(sh));
    cert.factor_a.push_back(AlgebraElement::zero(sh));
    cert.factor_b.push_back(AlgebraElement::zero(sh));
  }
  if (parts.empty()) return cert;

  const ConicSolution sol = solve(prog, {options.gap_tol, options.feas_tol, options.max_iter});
  accept_or_throw(sol, "dec_norm");

  cert.value = scale * sol.primal_value;
  cert.dual_value = scale * sol.dual_value;
  cert.solver_status = sol.status;
  cert.solver_iterations = sol.iterations;
  cert.solver_gap = scale * sol.gap;
  cert.psd_residual = scale * sol.psd_residual;

  std::vector<ComplexMatrix> sum_a, sum_b;
  for (int mb : cod.block_dims()) {
    sum_a.push_back(ComplexMatrix::Zero(mb, mb));
    sum_b.push_back(ComplexMatrix::Zero(mb, mb));
  }
  for (const auto& part : parts) {
    const ComplexMatrix c1 = scale * part.c1.value(sol.y);
    const ComplexMatrix c2 = scale * part.c2.value(sol.y);
    const BlockFactors f = factor_block(c1, part.cu, c2);
    cert.p[part.dom_block].block(part.cod_block) = c1;
    cert.q[part.dom_block].block(part.cod_block) = c2;
    cert.factor_a[part.dom_block].block(part.cod_block) = f.a;
    cert.factor_b[part.dom_block].block(part.cod_block) = f.b;
    cert.reconstruction_residual =
        std::max(cert.reconstruction_residual, operator_norm(part.cu - f.a.adjoint() * f.b));
    sum_a[part.cod_block] += partial_trace(f.a.adjoint() * f.a, part.n, part.mb);
    sum_b[part.cod_block] += partial_trace(f.b.adjoint() * f.b, part.n, part.mb);
  }
  double na = 0.0, nb = 0.0;
  for (std::size_t b = 0; b < cod.block_count(); ++b) {
    na = std::max(na, operator_norm(sum_a[b]));
    nb = std::max(nb, operator_norm(sum_b[b]));
  }
  cert.factorization_bound = std::sqrt(na) * std::sqrt(nb);
  cert.flagged = cert.reconstruction_residual > 1e-5;
  return cert;
}

DecCertificate dec_norm_linf(const std::vector<AlgebraElement>& x, const DecOptions& options) {
  return dec_norm(LinearMapRep::from_linf_images(x), options);
}

DecCertificate dec_norm_matrix_domain(const LinearMapRep& u, const DecOptions& options) {
  if (!u.domain().is_single_block()) throw ShapeError("dec_norm_matrix_domain: domain must be a single matrix block");
  return dec_norm(u, options);
}

Factorization extract_factorization(const std::vector<AlgebraElement>& x, const std::vector<AlgebraElement>& p,
                                    const std::vector<AlgebraElement>& q) {
  if (x.size() != p.size() || x.size() != q.size()) throw ShapeError("extract_factorization: list lengths differ");
  Factorization out;
  for (std::size_t j = 0; j < x.size(); ++j) {
    require_same_shape(x[j].shape(), p[j].shape(), "extract_factorization");
    require_same_shape(x[j].shape(), q[j].shape(), "extract_factorization");
    std::vector<ComplexMatrix> a_blocks, b_blocks;
    for (std::size_t b = 0; b < x[j].blocks().size(); ++b) {
      const BlockFactors f = factor_block(p[j].block(b), x[j].block(b), q[j].block(b));
      out.residual = std::max(out.residual, operator_norm(x[j].block(b) - f.a.adjoint() * f.b));
      a_blocks.push_back(f.a);
      b_blocks.push_back(f.b);
    }
    out.a.emplace_back(x[j].shape(), std::move(a_blocks));
    out.b.emplace_back(x[j].shape(), std::move(b_blocks));
  }
  return out;
}

SelfAdjointDecResult selfadjoint_dec_norm(const std::vector<AlgebraElement>& x, const DecOptions& options) {
  if (x.empty()) throw ShapeError("selfadjoint_dec_norm: need at least one element");
  const AlgebraShape& shape = x.front().shape();
  double scale = 0.0;
  for (const auto& xj : x) {
    require_same_shape(xj.shape(), shape, "selfadjoint_dec_norm");
    if (!is_self_adjoint(xj, 1e-10 * std::max(1.0, element_norm(xj)))) {
      throw ShapeError("selfadjoint_dec_norm: coefficients must be self-adjoint");
    }
    scale = std::max(scale, element_norm(xj));
  }

  SelfAdjointDecResult res;
  res.positive_part.assign(x.size(), AlgebraElement::zero(shape));
  res.negative_part.assign(x.size(), AlgebraElement::zero(shape));
  if (scale == 0.0) return res;

  // u_1(e_j) = p_j >= 0, u_2(e_j) = p_j - x_j >= 0, minimize ||sum_j (2 p_j - x_j)||.
  ConicProgram prog;
  const int s_var = prog.add_variable(1.0);
  struct Slot {
    std::size_t j;
    std::size_t b;
    HermitianVar p;
  };
  std::vector<Slot> slots;
  for (std::size_t j = 0; j < x.size(); ++j) {
    for (std::size_t b = 0; b < shape.block_count(); ++b) {
      const ComplexMatrix& xb = x[j].block(b);
      if (xb.isZero(0.0)) continue;
      const int mb = shape.block_dim(b);
      Slot slot{j, b, HermitianVar::create(prog, mb)};
      const int pos = prog.add_block(mb);
      slot.p.place(prog, pos, 0, 1.0);
      const int neg = prog.add_block(mb);
      prog.set_constant(neg, -hermitian_part(xb) / scale);
      slot.p.place(prog, neg, 0, 1.0);
      slots.push_back(slot);
    }
  }
  for (std::size_t b = 0; b < shape.block_count(); ++b) {
    const bool used = std::any_of(slots.begin(), slots.end(), [b](const Slot& s) { return s.b == b; });
    if (!used) continue;
    const int mb = shape.block_dim(b);
    const int blk = prog.add_block(mb);
    ComplexMatrix constant = ComplexMatrix::Zero(mb, mb);
    for (const auto& xj : x) constant += hermitian_part(xj.block(b));
    prog.set_constant(blk, constant / scale);
    for (int a = 0; a < mb; ++a) prog.add_term(blk, s_var, a, a, 1.0);
    for (const auto& slot : slots) {
      if (slot.b == b) slot.p.place(prog, blk, 0, -2.0);
    }
  }

  const ConicSolution sol = solve(prog, {options.gap_tol, options.feas_tol, options.max_iter});
  accept_or_throw(sol, "selfadjoint_dec_norm");
  res.value = scale * sol.primal_value;
  res.solver_status = sol.status;
  for (const auto& slot : slots) {
    const ComplexMatrix pj = scale * slot.p.value(sol.y);
    res.positive_part[slot.j].block(slot.b) = pj;
    res.negative_part[slot.j].block(slot.b) = pj - x[slot.j].block(slot.b);
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    res.decomposition_residual = std::max(
        res.decomposition_residual, element_norm(x[j] - (res.positive_part[j] - res.negative_part[j])));
  }
  return res;
}

LinearMapRep map_from_factored(const FactoredMapData& data) {
  if (data.a.empty() || data.a.size() != data.b.size()) {
    throw ShapeError("map_from_factored: a and b need the same nonzero number of rows");
  }
  const std::size_t n = data.a.front().size();
  if (n == 0) throw ShapeError("map_from_factored: empty rows");
  const AlgebraShape& shape = data.a.front().front().shape();
  for (std::size_t k = 0; k < data.a.size(); ++k) {
    if (data.a[k].size() != n || data.b[k].size() != n) throw ShapeError("map_from_factored: ragged index ranges");
    for (std::size_t i = 0; i < n; ++i) {
      require_same_shape(data.a[k][i].shape(), shape, "map_from_factored");
      require_same_shape(data.b[k][i].shape(), shape, "map_from_factored");
    }
  }
  std::vector<AlgebraElement> images;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      AlgebraElement acc = AlgebraElement::zero(shape);
      for (std::size_t k = 0; k < data.a.size(); ++k) acc += multiply(data.a[k][i].adjoint(), data.b[k][j]);
      images.push_back(std::move(acc));
    }
  }
  return LinearMapRep(AlgebraShape::matrix(static_cast<int>(n)), shape, std::move(images));
}

double dec_upper_bound_factored(const FactoredMapData& data) {
  map_from_factored(data);  // validates index ranges
  const AlgebraShape& shape = data.a.front().front().shape();
  AlgebraElement sa = AlgebraElement::zero(shape);
  AlgebraElement sb = AlgebraElement::zero(shape);
  for (std::size_t k = 0; k < data.a.size(); ++k) {
    for (const auto& a : data.a[k]) sa += multiply(a.adjoint(), a);
    for (const auto& b : data.b[k]) sb += multiply(b.adjoint(), b);
  }
  return std::sqrt(element_norm(sa)) * std::sqrt(element_norm(sb));
}

DirectSumDec dec_norm_direct_sum(const std::vector<LinearMapRep>& parts, const DecOptions& options) {
  if (parts.empty()) throw ShapeError("dec_norm_direct_sum: no parts");
  DirectSumDec out;
  for (const auto& p : parts) {
    require_same_shape(p.domain(), parts.front().domain(), "dec_norm_direct_sum");
    out.block_values.push_back(dec_norm(p, options).value);
  }
  out.max_of_blocks = *std::max_element(out.block_values.begin(), out.block_values.end());
  out.joint = dec_norm(direct_sum(parts), options).value;
  out.discrepancy = std::abs(out.joint - out.max_of_blocks);
  return out;
}

}  // namespace opnorm
