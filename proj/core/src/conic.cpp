#include "opnorm/conic.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace opnorm {

void SparseHermitian::add(int row, int col, Complex value) {
  if (row == col) {
    entries_.push_back({row, col, Complex(value.real(), 0.0)});
  } else {
    entries_.push_back({row, col, value});
    entries_.push_back({col, row, std::conj(value)});
  }
}

ComplexMatrix SparseHermitian::dense(int dim) const {
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  add_to(m, 1.0);
  return m;
}

double SparseHermitian::inner(const ComplexMatrix& m) const {
  double acc = 0.0;
  for (const auto& e : entries_) acc += (e.value * m(e.col, e.row)).real();
  return acc;
}

void SparseHermitian::add_to(ComplexMatrix& target, double scale) const {
  for (const auto& e : entries_) target(e.row, e.col) += scale * e.value;
}

int ConicProgram::add_variable(double cost) {
  const auto n = objective_.size();
  objective_.conservativeResize(n + 1);
  objective_(n) = cost;
  if (eq_matrix_.rows() > 0) {
    eq_matrix_.conservativeResize(eq_matrix_.rows(), n + 1);
    eq_matrix_.col(n).setZero();
  }
  return static_cast<int>(n);
}

int ConicProgram::add_block(int dim) {
  if (dim <= 0) throw ShapeError("add_block: dimension must be positive");
  PsdBlock b;
  b.dim = dim;
  b.constant = ComplexMatrix::Zero(dim, dim);
  blocks_.push_back(std::move(b));
  return static_cast<int>(blocks_.size()) - 1;
}

namespace {

void check_index(const PsdBlock& b, int row, int col) {
  if (row < 0 || col < 0 || row >= b.dim || col >= b.dim) {
    throw ShapeError("conic program: entry (" + std::to_string(row) + "," + std::to_string(col) +
                     ") outside block of dimension " + std::to_string(b.dim));
  }
}

}  // namespace

void ConicProgram::add_constant(int block, int row, int col, Complex value) {
  PsdBlock& b = blocks_.at(static_cast<std::size_t>(block));
  check_index(b, row, col);
  if (row == col) {
    b.constant(row, row) += value.real();
  } else {
    b.constant(row, col) += value;
    b.constant(col, row) += std::conj(value);
  }
}

void ConicProgram::set_constant(int block, const ComplexMatrix& value) {
  PsdBlock& b = blocks_.at(static_cast<std::size_t>(block));
  if (value.rows() != b.dim || value.cols() != b.dim) throw ShapeError("set_constant: size mismatch");
  b.constant = hermitian_part(value);
}

void ConicProgram::add_term(int block, int variable, int row, int col, Complex value) {
  if (variable < 0 || variable >= variable_count()) throw ShapeError("add_term: unknown variable");
  PsdBlock& b = blocks_.at(static_cast<std::size_t>(block));
  check_index(b, row, col);
  b.terms[variable].add(row, col, value);
}

void ConicProgram::add_equality(const std::vector<std::pair<int, double>>& coefficients, double rhs) {
  const auto r = eq_matrix_.rows();
  eq_matrix_.conservativeResize(r + 1, variable_count());
  eq_matrix_.row(r).setZero();
  for (const auto& [k, a] : coefficients) {
    if (k < 0 || k >= variable_count()) throw ShapeError("add_equality: unknown variable");
    eq_matrix_(r, k) += a;
  }
  eq_rhs_.conservativeResize(r + 1);
  eq_rhs_(r) = rhs;
}

ComplexMatrix ConicProgram::block_value(int block, const RealVector& y) const {
  const PsdBlock& b = blocks_.at(static_cast<std::size_t>(block));
  ComplexMatrix m = b.constant;
  for (const auto& [k, f] : b.terms) f.add_to(m, y(k));
  return m;
}

void ConicProgram::validate() const {
  if (!objective_.allFinite()) throw NumericalError("conic program: non-finite objective");
  if (eq_matrix_.rows() > 0 && (!eq_matrix_.allFinite() || !eq_rhs_.allFinite())) {
    throw NumericalError("conic program: non-finite equality data");
  }
  for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
    const PsdBlock& b = blocks_[bi];
    if (!all_finite(b.constant)) throw NumericalError("conic program: non-finite constant in block " + std::to_string(bi));
    if (b.constant.rows() != b.dim || b.constant.cols() != b.dim) {
      throw ShapeError("conic program: constant of block " + std::to_string(bi) + " has wrong size");
    }
    if (hermiticity_defect(b.constant) > kHermitianTolerance) {
      throw ShapeError("conic program: constant of block " + std::to_string(bi) + " is not Hermitian");
    }
    for (const auto& [k, f] : b.terms) {
      if (k < 0 || k >= variable_count()) throw ShapeError("conic program: term references unknown variable");
      for (const auto& e : f.entries()) {
        if (!std::isfinite(e.value.real()) || !std::isfinite(e.value.imag())) {
          throw NumericalError("conic program: non-finite coefficient for variable " + std::to_string(k));
        }
        check_index(b, e.row, e.col);
      }
    }
  }
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::infeasible_suspected: return "infeasible_suspected";
  }
  return "unknown";
}

namespace {

using Blocks = std::vector<ComplexMatrix>;

double block_min_eigenvalue(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

struct VariableTerm {
  int block;
  const SparseHermitian* coeff;
};

class InteriorPoint {
 public:
  InteriorPoint(const ConicProgram& p, const SolverOptions& o) : p_(p), opt_(o) {
    m_ = p.variable_count();
    nb_ = p.blocks().size();
    terms_.resize(static_cast<std::size_t>(m_));
    block_vars_.resize(nb_);
    for (std::size_t b = 0; b < nb_; ++b) {
      for (const auto& [k, f] : p.blocks()[b].terms) {
        if (f.empty()) continue;
        terms_[static_cast<std::size_t>(k)].push_back({static_cast<int>(b), &f});
        block_vars_[b].push_back(k);
      }
      total_dim_ += p.blocks()[b].dim;
    }
  }

  ConicSolution run();

 private:
  // <F_k, M> summed over blocks.
  double apply_adjoint(int k, const Blocks& m) const {
    double acc = 0.0;
    for (const auto& t : terms_[static_cast<std::size_t>(k)]) acc += t.coeff->inner(m[static_cast<std::size_t>(t.block)]);
    return acc;
  }

  Blocks evaluate(const RealVector& y) const {
    Blocks out(nb_);
    for (std::size_t b = 0; b < nb_; ++b) out[b] = p_.block_value(static_cast<int>(b), y);
    return out;
  }

  Blocks linear_part(const RealVector& dy) const {
    Blocks out(nb_);
    for (std::size_t b = 0; b < nb_; ++b) {
      out[b] = ComplexMatrix::Zero(p_.blocks()[b].dim, p_.blocks()[b].dim);
      for (const auto& [k, f] : p_.blocks()[b].terms) f.add_to(out[b], dy(k));
    }
    return out;
  }

  RealMatrix schur(const Blocks& s_inv, const Blocks& z) const;

  const ConicProgram& p_;
  SolverOptions opt_;
  int m_ = 0;
  std::size_t nb_ = 0;
  int total_dim_ = 0;
  std::vector<std::vector<VariableTerm>> terms_;
  std::vector<std::vector<int>> block_vars_;
};

RealMatrix InteriorPoint::schur(const Blocks& s_inv, const Blocks& z) const {
  // M_kl = Re tr(S^{-1} F_k Z F_l)
  RealMatrix m = RealMatrix::Zero(m_, m_);
  for (std::size_t b = 0; b < nb_; ++b) {
    const auto& vars = block_vars_[b];
    const auto& terms = p_.blocks()[b].terms;
    const ComplexMatrix& si = s_inv[b];
    const ComplexMatrix& zb = z[b];
    std::vector<const SparseHermitian*> coeffs;
    coeffs.reserve(vars.size());
    for (int k : vars) coeffs.push_back(&terms.at(k));
    for (std::size_t a = 0; a < vars.size(); ++a) {
      const auto& ek = coeffs[a]->entries();
      for (std::size_t c = a; c < vars.size(); ++c) {
        const auto& el = coeffs[c]->entries();
        double acc = 0.0;
        for (const auto& f : ek) {
          for (const auto& g : el) {
            acc += (f.value * g.value * si(g.col, f.row) * zb(f.col, g.row)).real();
          }
        }
        m(vars[a], vars[c]) += acc;
        if (c != a) m(vars[c], vars[a]) += acc;
      }
    }
  }
  return m;
}

ConicSolution InteriorPoint::run() {
  ConicSolution sol;
  const RealVector& c = p_.objective();
  const double c_norm = c.size() ? c.cwiseAbs().maxCoeff() : 0.0;

  double f0_norm = 0.0;
  for (const auto& b : p_.blocks()) f0_norm = std::max(f0_norm, b.constant.norm());

  if (nb_ == 0) throw ShapeError("solve: program has no PSD blocks");

  for (int k = 0; k < m_; ++k) {
    if (terms_[static_cast<std::size_t>(k)].empty()) {
      throw ShapeError("solve: variable " + std::to_string(k) + " does not appear in any PSD block");
    }
  }

  // Initial point in the style of SDPT3's infeasible start.
  double max_fk = 0.0;
  double z_scale = std::max(10.0, std::sqrt(static_cast<double>(total_dim_)));
  for (int k = 0; k < m_; ++k) {
    double fk = 0.0;
    for (const auto& t : terms_[static_cast<std::size_t>(k)]) {
      for (const auto& e : t.coeff->entries()) fk += std::norm(e.value);
    }
    fk = std::sqrt(fk);
    max_fk = std::max(max_fk, fk);
    z_scale = std::max(z_scale, std::sqrt(static_cast<double>(total_dim_)) * (1.0 + std::abs(c(k))) / (1.0 + fk));
  }
  const double s_scale = std::max({10.0, std::sqrt(static_cast<double>(total_dim_)), f0_norm, max_fk});

  RealVector y = RealVector::Zero(m_);
  Blocks s(nb_), z(nb_);
  for (std::size_t b = 0; b < nb_; ++b) {
    const int d = p_.blocks()[b].dim;
    s[b] = s_scale * ComplexMatrix::Identity(d, d);
    z[b] = z_scale * ComplexMatrix::Identity(d, d);
  }
  const double z_trace0 = z_scale * total_dim_;

  struct Snapshot {
    RealVector y;
    Blocks z;
    double merit = std::numeric_limits<double>::infinity();
    bool converged = false;
  } best;

  int stalls = 0;
  int it = 0;
  bool infeasible = false;
  for (; it <= opt_.max_iter; ++it) {
    const Blocks fy = evaluate(y);
    Blocks rp(nb_);
    for (std::size_t b = 0; b < nb_; ++b) rp[b] = fy[b] - s[b];

    RealVector rd(m_);
    for (int k = 0; k < m_; ++k) rd(k) = c(k) - apply_adjoint(k, z);

    const double pobj = c.dot(y);
    double dobj = 0.0;
    for (std::size_t b = 0; b < nb_; ++b) dobj -= (p_.blocks()[b].constant * z[b]).trace().real();

    double lam_min = std::numeric_limits<double>::infinity();
    for (const auto& f : fy) lam_min = std::min(lam_min, block_min_eigenvalue(f));
    const double psd_res = std::max(0.0, -lam_min);
    const double dres = m_ ? rd.cwiseAbs().maxCoeff() : 0.0;
    const double gap = pobj - dobj;

    const double gap_rel = std::abs(gap) / std::max(1.0, std::abs(pobj));
    const double p_rel = psd_res / std::max(1.0, f0_norm);
    const double d_rel = dres / std::max(1.0, c_norm);
    const double merit = std::max({gap_rel / opt_.gap_tol, p_rel / opt_.feas_tol, d_rel / opt_.feas_tol});
    const bool converged = merit <= 1.0;
    if (!std::isfinite(merit)) break;
    if (merit < best.merit) {
      best.y = y;
      best.z = z;
      best.merit = merit;
      best.converged = converged;
    }
    if (converged) break;

    // Farkas ray: Z / tr Z nearly annihilated by every F_k while <F_0, Z> < 0.
    double z_trace = 0.0;
    for (const auto& zb : z) z_trace += zb.trace().real();
    if (z_trace > 1e8 * z_trace0) {
      Blocks zn(nb_);
      for (std::size_t b = 0; b < nb_; ++b) zn[b] = z[b] / z_trace;
      double f0z = 0.0;
      for (std::size_t b = 0; b < nb_; ++b) f0z += (p_.blocks()[b].constant * zn[b]).trace().real();
      double az = 0.0;
      for (int k = 0; k < m_; ++k) az = std::max(az, std::abs(apply_adjoint(k, zn)));
      if (f0z < 0.0 && az <= 1e-6 * std::abs(f0z)) {
        infeasible = true;
        break;
      }
    }

    double mu = 0.0;
    for (std::size_t b = 0; b < nb_; ++b) mu += (s[b] * z[b]).trace().real();
    mu /= total_dim_;

    Blocks s_inv(nb_);
    bool chol_ok = true;
    for (std::size_t b = 0; b < nb_; ++b) {
      Eigen::LLT<ComplexMatrix> llt(hermitian_part(s[b]));
      if (llt.info() != Eigen::Success) {
        chol_ok = false;
        break;
      }
      s_inv[b] = llt.solve(ComplexMatrix::Identity(s[b].rows(), s[b].cols()));
      s_inv[b] = hermitian_part(s_inv[b]);
    }
    if (!chol_ok) break;

    RealMatrix schur_m = schur(s_inv, z);
    Eigen::LLT<RealMatrix> schur_llt(schur_m);
    if (schur_llt.info() != Eigen::Success) {
      const double reg = 1e-13 * std::max(1.0, schur_m.diagonal().cwiseAbs().maxCoeff());
      schur_m.diagonal().array() += reg;
      schur_llt.compute(schur_m);
      if (schur_llt.info() != Eigen::Success) break;
    }

    Blocks zrs(nb_);  // Z Rp S^{-1}
    for (std::size_t b = 0; b < nb_; ++b) zrs[b] = z[b] * rp[b] * s_inv[b];

    auto direction = [&](double target_mu, const Blocks* corr, RealVector& dy, Blocks& ds, Blocks& dz) {
      Blocks a(nb_);
      for (std::size_t b = 0; b < nb_; ++b) {
        a[b] = target_mu * s_inv[b] - z[b] - zrs[b];
        if (corr) a[b] -= (*corr)[b];
      }
      RealVector rhs(m_);
      for (int k = 0; k < m_; ++k) rhs(k) = apply_adjoint(k, a) - rd(k);
      dy = schur_llt.solve(rhs);
      dy += schur_llt.solve(rhs - schur_m * dy);
      ds = linear_part(dy);
      for (std::size_t b = 0; b < nb_; ++b) {
        ds[b] += rp[b];
        ds[b] = hermitian_part(ds[b]);
        ComplexMatrix t = z[b] * ds[b] * s_inv[b];
        if (corr) t += (*corr)[b];
        dz[b] = target_mu * s_inv[b] - z[b] - hermitian_part(t);
      }
    };

    auto step_length = [&](const Blocks& x, const Blocks& dx) {
      double alpha = std::numeric_limits<double>::infinity();
      for (std::size_t b = 0; b < nb_; ++b) alpha = std::min(alpha, max_psd_step(x[b], dx[b]));
      return alpha;
    };

    RealVector dy;
    Blocks ds(nb_), dz(nb_);
    direction(0.0, nullptr, dy, ds, dz);
    const double ap_aff = std::min(1.0, step_length(s, ds));
    const double ad_aff = std::min(1.0, step_length(z, dz));
    double mu_aff = 0.0;
    for (std::size_t b = 0; b < nb_; ++b) {
      mu_aff += ((s[b] + ap_aff * ds[b]) * (z[b] + ad_aff * dz[b])).trace().real();
    }
    mu_aff /= total_dim_;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    Blocks corr(nb_);
    for (std::size_t b = 0; b < nb_; ++b) corr[b] = dz[b] * ds[b] * s_inv[b];
    direction(sigma * mu, &corr, dy, ds, dz);

    const double tau = 0.9 + 0.09 * std::min(ap_aff, ad_aff);
    const double ap = std::min(1.0, tau * step_length(s, ds));
    const double ad = std::min(1.0, tau * step_length(z, dz));
    if (!(ap > 0.0) || !(ad > 0.0) || !dy.allFinite()) break;

    y += ap * dy;
    for (std::size_t b = 0; b < nb_; ++b) {
      s[b] = hermitian_part(s[b] + ap * ds[b]);
      z[b] = hermitian_part(z[b] + ad * dz[b]);
    }

    if (std::max(ap, ad) < 1e-8) {
      if (++stalls >= 3) break;
    } else {
      stalls = 0;
    }
  }

  if (infeasible) {
    sol.status = SolveStatus::infeasible_suspected;
    sol.message = "dual iterates approach a Farkas ray; primal constraints look infeasible";
    sol.y = y;
    sol.dual_blocks = z;
  } else if (best.merit < std::numeric_limits<double>::infinity()) {
    sol.status = best.converged ? SolveStatus::optimal : SolveStatus::max_iterations;
    if (!best.converged) {
      std::ostringstream os;
      os << "stopped after " << it << " iterations; best merit " << best.merit << " (1 = tolerance)";
      sol.message = os.str();
    }
    sol.y = best.y;
    sol.dual_blocks = best.z;
  } else {
    sol.status = SolveStatus::max_iterations;
    sol.message = "no finite iterate";
    sol.y = y;
    sol.dual_blocks = z;
  }
  sol.iterations = it;
  return sol;
}

// Fills objective values and residuals from (y, Z).
void finalize(const ConicProgram& p, ConicSolution& sol) {
  const std::size_t nb = p.blocks().size();
  sol.primal_value = p.objective().dot(sol.y);
  double lam_min = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < nb; ++b) lam_min = std::min(lam_min, block_min_eigenvalue(p.block_value(static_cast<int>(b), sol.y)));
  sol.psd_residual = std::max(0.0, -lam_min);
  double dobj = 0.0;
  for (std::size_t b = 0; b < nb; ++b) dobj -= (p.blocks()[b].constant * sol.dual_blocks[b]).trace().real();
  RealVector adj = RealVector::Zero(p.variable_count());
  for (std::size_t b = 0; b < nb; ++b) {
    for (const auto& [k, f] : p.blocks()[b].terms) adj(k) += f.inner(sol.dual_blocks[b]);
  }
  RealVector rd = p.objective() - adj;
  if (p.equality_matrix().rows() > 0) {
    const RealMatrix& a = p.equality_matrix();
    sol.equality_multipliers = a.transpose().completeOrthogonalDecomposition().solve(rd);
    rd -= a.transpose() * sol.equality_multipliers;
    dobj += p.equality_rhs().dot(sol.equality_multipliers);
    sol.equality_residual = (a * sol.y - p.equality_rhs()).cwiseAbs().maxCoeff();
  } else {
    sol.equality_residual = 0.0;
  }
  sol.dual_residual = rd.size() ? rd.cwiseAbs().maxCoeff() : 0.0;
  sol.dual_value = dobj;
  sol.gap = sol.primal_value - sol.dual_value;
}

ConicSolution solve_without_equalities(const ConicProgram& p, const SolverOptions& o) {
  if (p.variable_count() == 0) {
    ConicSolution sol;
    sol.y = RealVector(0);
    bool feasible = true;
    for (const auto& b : p.blocks()) {
      sol.dual_blocks.push_back(ComplexMatrix::Zero(b.dim, b.dim));
      if (block_min_eigenvalue(b.constant) < -o.feas_tol * std::max(1.0, b.constant.norm())) feasible = false;
    }
    sol.status = feasible ? SolveStatus::optimal : SolveStatus::infeasible_suspected;
    if (!feasible) sol.message = "constant constraint is not PSD";
    return sol;
  }
  InteriorPoint ipm(p, o);
  return ipm.run();
}

}  // namespace

ConicSolution solve(const ConicProgram& program, const SolverOptions& options) {
  program.validate();
  if (program.blocks().empty()) throw ShapeError("solve: program has no PSD blocks");

  if (program.equality_matrix().rows() == 0) {
    ConicSolution sol = solve_without_equalities(program, options);
    finalize(program, sol);
    return sol;
  }

  // Eliminate A y = b through y = y_p + N w.
  const RealMatrix& a = program.equality_matrix();
  Eigen::JacobiSVD<RealMatrix> svd_a(a, Eigen::ComputeFullV);
  const RealVector& sv = svd_a.singularValues();
  const double cutoff = 1e-12 * std::max(1.0, sv.size() ? sv(0) : 0.0);
  int rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  const RealVector y_p = a.completeOrthogonalDecomposition().solve(program.equality_rhs());
  const int m = program.variable_count();
  const RealMatrix basis = svd_a.matrixV().rightCols(m - rank);

  ConicSolution sol;
  if ((a * y_p - program.equality_rhs()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, program.equality_rhs().cwiseAbs().maxCoeff())) {
    sol.status = SolveStatus::infeasible_suspected;
    sol.message = "equality constraints are inconsistent";
    sol.y = y_p;
    for (const auto& b : program.blocks()) sol.dual_blocks.push_back(ComplexMatrix::Zero(b.dim, b.dim));
    finalize(program, sol);
    return sol;
  }

  ConicProgram reduced;
  const RealVector c_red = basis.transpose() * program.objective();
  for (int j = 0; j < basis.cols(); ++j) reduced.add_variable(c_red(j));
  for (std::size_t bi = 0; bi < program.blocks().size(); ++bi) {
    const PsdBlock& b = program.blocks()[bi];
    const int rb = reduced.add_block(b.dim);
    reduced.set_constant(rb, program.block_value(static_cast<int>(bi), y_p));
    for (int j = 0; j < basis.cols(); ++j) {
      ComplexMatrix fj = ComplexMatrix::Zero(b.dim, b.dim);
      for (const auto& [k, f] : b.terms) {
        if (basis(k, j) != 0.0) f.add_to(fj, basis(k, j));
      }
      for (int r = 0; r < b.dim; ++r) {
        for (int col = r; col < b.dim; ++col) {
          if (std::abs(fj(r, col)) > 1e-14) reduced.add_term(rb, j, r, col, fj(r, col));
        }
      }
    }
  }
  ConicSolution inner = solve_without_equalities(reduced, options);
  sol.status = inner.status;
  sol.message = inner.message;
  sol.iterations = inner.iterations;
  sol.y = y_p + basis * inner.y;
  sol.dual_blocks = inner.dual_blocks;
  finalize(program, sol);
  return sol;
}

CertificateReport verify_certificate(const ConicProgram& program, const ConicSolution& solution, double tol) {
  CertificateReport rep;
  auto flag = [&](const std::string& what, double reported, double recomputed) {
    std::ostringstream os;
    os << what << ": reported " << reported << ", recomputed " << recomputed;
    rep.issues.push_back(os.str());
    rep.clean = false;
  };

  if (solution.y.size() != program.variable_count()) {
    rep.clean = false;
    rep.issues.push_back("solution has " + std::to_string(solution.y.size()) + " variables, program has " +
                         std::to_string(program.variable_count()));
    return rep;
  }
  const std::size_t nb = program.blocks().size();

  double lam_min = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < nb; ++b) {
    const ComplexMatrix v = program.block_value(static_cast<int>(b), solution.y);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(v), Eigen::EigenvaluesOnly);
    lam_min = std::min(lam_min, es.eigenvalues()(0));
  }
  rep.psd_residual = std::max(0.0, -lam_min);
  rep.objective = program.objective().dot(solution.y);
  rep.equality_residual = program.equality_matrix().rows() > 0
                              ? (program.equality_matrix() * solution.y - program.equality_rhs()).cwiseAbs().maxCoeff()
                              : 0.0;

  bool have_dual = solution.dual_blocks.size() == nb;
  if (have_dual) {
    RealVector adj = RealVector::Zero(program.variable_count());
    double dobj = 0.0;
    double dual_lam_min = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < nb; ++b) {
      const ComplexMatrix& z = solution.dual_blocks[b];
      dobj -= (program.blocks()[b].constant * z).trace().real();
      for (const auto& [k, f] : program.blocks()[b].terms) adj(k) += (f.dense(program.blocks()[b].dim) * z).trace().real();
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(z), Eigen::EigenvaluesOnly);
      dual_lam_min = std::min(dual_lam_min, es.eigenvalues()(0));
    }
    RealVector rd = program.objective() - adj;
    if (program.equality_matrix().rows() > 0 && solution.equality_multipliers.size() == program.equality_matrix().rows()) {
      rd -= program.equality_matrix().transpose() * solution.equality_multipliers;
      dobj += program.equality_rhs().dot(solution.equality_multipliers);
    }
    rep.dual_residual = rd.size() ? rd.cwiseAbs().maxCoeff() : 0.0;
    rep.dual_psd_residual = std::max(0.0, -dual_lam_min);
    rep.dual_objective = dobj;
  } else {
    rep.clean = false;
    rep.issues.push_back("solution carries no dual blocks");
  }
  rep.gap = rep.objective - rep.dual_objective;

  const auto differs = [tol](double a, double b) { return std::abs(a - b) > tol * std::max(1.0, std::abs(b)); };
  if (differs(solution.primal_value, rep.objective)) flag("primal objective", solution.primal_value, rep.objective);
  if (std::abs(solution.psd_residual - rep.psd_residual) > tol) flag("psd residual", solution.psd_residual, rep.psd_residual);
  if (std::abs(solution.equality_residual - rep.equality_residual) > tol) {
    flag("equality residual", solution.equality_residual, rep.equality_residual);
  }
  if (have_dual) {
    if (differs(solution.dual_value, rep.dual_objective)) flag("dual objective", solution.dual_value, rep.dual_objective);
    if (std::abs(solution.gap - rep.gap) > tol * std::max(1.0, std::abs(rep.objective))) flag("gap", solution.gap, rep.gap);
    if (std::abs(solution.dual_residual - rep.dual_residual) > tol) flag("dual residual", solution.dual_residual, rep.dual_residual);
  }
  if (solution.status == SolveStatus::optimal) {
    const double scale = std::max(1.0, std::abs(rep.objective));
    if (rep.psd_residual > tol) flag("psd violation", 0.0, rep.psd_residual);
    if (rep.equality_residual > tol) flag("equality violation", 0.0, rep.equality_residual);
    if (have_dual) {
      if (rep.dual_psd_residual > tol) flag("dual psd violation", 0.0, rep.dual_psd_residual);
      if (rep.dual_residual > tol) flag("dual feasibility violation", 0.0, rep.dual_residual);
      if (std::abs(rep.gap) > tol * scale) flag("duality gap", 0.0, rep.gap);
    }
  }
  return rep;
}

void write_diagnostic(std::ostream& out, const ConicProgram& program, const ConicSolution& solution) {
  const auto old_precision = out.precision();
  out << std::setprecision(17);
  out << "# opnorm conic diagnostic v1\n";
  out << "variables " << program.variable_count() << "\n";
  out << "objective";
  for (int k = 0; k < program.variable_count(); ++k) out << ' ' << program.objective()(k);
  out << "\n";
  out << "blocks " << program.blocks().size() << "\n";
  auto write_entries = [&](const ComplexMatrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = i; j < m.cols(); ++j) {
        if (m(i, j) != Complex(0.0)) out << "  " << i << ' ' << j << ' ' << m(i, j).real() << ' ' << m(i, j).imag() << "\n";
      }
    }
  };
  for (std::size_t b = 0; b < program.blocks().size(); ++b) {
    const PsdBlock& blk = program.blocks()[b];
    out << "block " << b << " dim " << blk.dim << "\n";
    out << " constant\n";
    write_entries(blk.constant);
    for (const auto& [k, f] : blk.terms) {
      out << " term " << k << "\n";
      write_entries(f.dense(blk.dim));
    }
  }
  const RealMatrix& a = program.equality_matrix();
  out << "equalities " << a.rows() << "\n";
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    out << " ";
    for (Eigen::Index k = 0; k < a.cols(); ++k) out << a(r, k) << ' ';
    out << "= " << program.equality_rhs()(r) << "\n";
  }
  out << "solution\n";
  out << "status " << to_string(solution.status) << "\n";
  out << "iterations " << solution.iterations << "\n";
  out << "primal_value " << solution.primal_value << "\n";
  out << "dual_value " << solution.dual_value << "\n";
  out << "gap " << solution.gap << "\n";
  out << "psd_residual " << solution.psd_residual << "\n";
  out << "equality_residual " << solution.equality_residual << "\n";
  out << "dual_residual " << solution.dual_residual << "\n";
  out << "y";
  for (Eigen::Index k = 0; k < solution.y.size(); ++k) out << ' ' << solution.y(k);
  out << "\n";
  for (std::size_t b = 0; b < solution.dual_blocks.size(); ++b) {
    out << "dual_block " << b << "\n";
    write_entries(solution.dual_blocks[b]);
  }
  out.precision(old_precision);
}

}  // namespace opnorm
