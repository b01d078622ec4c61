#include "report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "opnorm/cbminnorm.hpp"
#include "opnorm/multdomain.hpp"
#include "opnorm/tensorcalc.hpp"
#include "opnorm/version.hpp"

namespace opnorm::cli {

namespace {

using nlohmann::json;

constexpr double kFlagResidual = 1e-5;

json vector_to_json(const ComplexVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

json elements_json(const std::vector<AlgebraElement>& xs) {
  json out = json::array();
  for (const auto& x : xs) out.push_back(element_to_json(x));
  return out;
}

json matrices_json(const std::vector<ComplexMatrix>& xs) {
  json out = json::array();
  for (const auto& x : xs) out.push_back(matrix_to_json(x));
  return out;
}

DecOptions dec_options(const Instance& inst, const NormFlags& flags) {
  DecOptions o;
  const std::optional<double> tol = flags.tol ? flags.tol : inst.parameters.tol;
  if (tol) {
    o.gap_tol = *tol;
    o.feas_tol = std::max(*tol, o.feas_tol);
  }
  return o;
}

CbOptions cb_options(const Instance& inst, const NormFlags& flags) {
  CbOptions o;
  o.sdp = dec_options(inst, flags);
  if (auto s = flags.seed ? flags.seed : inst.parameters.seed) o.seesaw.seed = *s;
  if (auto k = flags.K ? flags.K : inst.parameters.K) o.seesaw.K = *k;
  if (auto r = flags.restarts ? flags.restarts : inst.parameters.restarts) o.seesaw.restarts = *r;
  return o;
}

json solver_json(const DecCertificate& c) {
  return {{"status", to_string(c.solver_status)},
          {"iterations", c.solver_iterations},
          {"gap", c.solver_gap},
          {"psd_residual", c.psd_residual}};
}

json dec_certificate_json(const DecCertificate& c) {
  return {{"dual_value", c.dual_value},
          {"reconstruction_residual", c.reconstruction_residual},
          {"factorization_bound", c.factorization_bound},
          {"factorization_error", std::abs(c.factorization_bound - c.value)},
          {"flagged", c.flagged},
          {"factor_a", elements_json(c.factor_a)},
          {"factor_b", elements_json(c.factor_b)}};
}

bool dec_flagged(const DecCertificate& c) {
  return c.flagged || std::abs(c.factorization_bound - c.value) > kFlagResidual;
}

json seesaw_json(const SeeSawResult& s) {
  return {{"lower_bound", s.lower_bound},
          {"K", s.K},
          {"restarts_used", s.restarts_used},
          {"best_restart", s.best_restart},
          {"iterations", s.iterations},
          {"converged", s.converged},
          {"max_decrease", s.max_decrease},
          {"unitaries", matrices_json(s.unitaries)},
          {"xi", vector_to_json(s.xi)},
          {"eta", vector_to_json(s.eta)}};
}

json agreement_json(const AgreementReport& a) {
  return {{"upper", a.upper},
          {"lower", a.lower},
          {"gap", a.gap},
          {"relative_gap", a.relative_gap},
          {"verdict", a.verdict()},
          {"K_used", a.K_used},
          {"escalated", a.escalated},
          {"seesaw", seesaw_json(a.seesaw)},
          {"sdp",
           {{"value", a.sdp.value},
            {"reconstruction_residual", a.sdp.reconstruction_residual},
            {"factorization_value", a.sdp.factorization_value},
            {"y", matrices_json(a.sdp.y)},
            {"z", matrices_json(a.sdp.z)},
            {"solver", solver_json(a.sdp.certificate)}}}};
}

bool agreement_flagged(const AgreementReport& a) {
  return a.sdp.reconstruction_residual > kFlagResidual ||
         std::abs(a.sdp.factorization_value - a.sdp.value) > kFlagResidual;
}

NormOutcome dec_outcome(const DecCertificate& c) {
  NormOutcome out;
  out.report["result"] = {{"value", c.value}};
  out.report["certificate"] = dec_certificate_json(c);
  out.report["solver"] = solver_json(c);
  out.flagged = dec_flagged(c);
  return out;
}

NormOutcome dispatch(const Instance& inst, const NormFlags& flags) {
  switch (inst.kind) {
    case InstanceKind::dec_linf:
      return dec_outcome(dec_norm_linf(inst.elements, dec_options(inst, flags)));
    case InstanceKind::dec_matrix:
      return dec_outcome(dec_norm_matrix_domain(inst.map, dec_options(inst, flags)));
    case InstanceKind::cb_linf: {
      const AgreementReport a = cb_norm_linf(matrix_coefficients(inst.elements), cb_options(inst, flags));
      NormOutcome out;
      out.report["result"] = {{"upper", a.upper}, {"lower", a.lower}, {"verdict", a.verdict()}};
      out.report["certificate"] = agreement_json(a);
      out.report["solver"] = solver_json(a.sdp.certificate);
      out.flagged = agreement_flagged(a);
      return out;
    }
    case InstanceKind::free_tensor: {
      const FreeTensor t(inst.elements);
      const CbOptions opts = cb_options(inst, flags);
      const MaxNorm mx = max_norm(t, opts.sdp);
      const MinNormReport mn = min_norm(t, opts);
      const double gap = std::abs(mx.value - mn.upper);
      const bool agree = gap <= opts.relative_tolerance * std::max(1.0, mx.value) && mn.agree;
      NormOutcome out;
      out.report["result"] = {{"max", mx.value},        {"min_upper", mn.upper}, {"min_lower", mn.lower},
                              {"nuclearity_gap", gap},  {"closure", mn.upper - mn.lower},
                              {"verdict", agree ? "agree" : "disagree"}};
      json blocks = json::array();
      bool flagged = dec_flagged(mx.certificate);
      for (const auto& b : mn.blocks) {
        blocks.push_back(agreement_json(b));
        flagged = flagged || agreement_flagged(b);
      }
      out.report["certificate"] = {{"max", dec_certificate_json(mx.certificate)}, {"min_blocks", blocks}};
      out.report["solver"] = solver_json(mx.certificate);
      out.flagged = flagged;
      return out;
    }
    case InstanceKind::selfadjoint_dec: {
      const DecOptions opts = dec_options(inst, flags);
      const SelfAdjointDecResult sa = selfadjoint_dec_norm(inst.elements, opts);
      const DecCertificate dec = dec_norm_linf(inst.elements, opts);
      NormOutcome out;
      out.report["result"] = {{"value", sa.value}, {"dec_value", dec.value}, {"difference", std::abs(sa.value - dec.value)}};
      out.report["certificate"] = {{"decomposition_residual", sa.decomposition_residual},
                                   {"positive_part", elements_json(sa.positive_part)},
                                   {"negative_part", elements_json(sa.negative_part)},
                                   {"dec", dec_certificate_json(dec)}};
      out.report["solver"] = {{"status", to_string(sa.solver_status)}, {"dec", solver_json(dec)}};
      out.flagged = sa.decomposition_residual > kFlagResidual || dec_flagged(dec);
      return out;
    }
    case InstanceKind::mult_domain: {
      MultDomainOptions mo;
      const std::optional<double> tol = flags.tol ? flags.tol : inst.parameters.tol;
      if (tol) mo.rank_tol = *tol;
      const SubalgebraBasis d = multiplicative_domain(inst.map, mo);
      const std::uint64_t seed = flags.seed ? *flags.seed : inst.parameters.seed.value_or(0);
      const int samples = inst.parameters.samples.value_or(20);
      const BimodularityReport b = verify_bimodularity(inst.map, d, samples, seed);
      NormOutcome out;
      out.report["result"] = {{"dimension", d.dimension}, {"basis", elements_json(d.basis)}};
      out.report["certificate"] = {{"unit_residual", d.unit_residual},
                                   {"adjoint_residual", d.adjoint_residual},
                                   {"product_residual", d.product_residual},
                                   {"schwarz_residual", d.schwarz_residual},
                                   {"bimodularity",
                                    {{"samples", b.samples},
                                     {"left", b.left},
                                     {"right", b.right},
                                     {"two_sided", b.two_sided},
                                     {"max_residual", b.max_residual}}}};
      out.report["solver"] = {{"kernel_cutoff", d.kernel_cutoff}, {"smallest_retained", d.smallest_retained}};
      const double closure = std::max({d.unit_residual, d.adjoint_residual, d.product_residual});
      out.flagged = closure > 1e-6 || d.schwarz_residual > 1e-6 || b.max_residual > 1e-6;
      return out;
    }
  }
  throw ValidationError("kind: unsupported");
}

void text_scalars(std::ostringstream& os, const json& obj, const std::string& prefix) {
  for (const auto& [key, v] : obj.items()) {
    if (v.is_object()) {
      text_scalars(os, v, prefix + key + ".");
    } else if (v.is_number_float()) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.12g", v.get<double>());
      os << "  " << prefix << key << " = " << buf << "\n";
    } else if (!v.is_array()) {
      os << "  " << prefix << key << " = " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    }
  }
}

}  // namespace

NormOutcome compute_report(const Instance& inst, const NormFlags& flags) {
  const auto t0 = std::chrono::steady_clock::now();
  NormOutcome out = dispatch(inst, flags);
  json& r = out.report;
  r["toolkit"] = "opnorm";
  r["version"] = kVersionString;
  r["command"] = "norm";
  r["instance"] = {{"kind", to_string(inst.kind)}, {"digest", inst.digest}};
  json params = json::object();
  if (flags.tol || inst.parameters.tol) params["tol"] = flags.tol ? *flags.tol : *inst.parameters.tol;
  if (flags.seed || inst.parameters.seed) params["seed"] = flags.seed ? *flags.seed : *inst.parameters.seed;
  if (flags.K || inst.parameters.K) params["K"] = flags.K ? *flags.K : *inst.parameters.K;
  if (flags.restarts || inst.parameters.restarts) {
    params["restarts"] = flags.restarts ? *flags.restarts : *inst.parameters.restarts;
  }
  r["parameters"] = params;
  r["flagged"] = out.flagged;
  r["timing"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
  return out;
}

std::string render_text(const json& report) {
  std::ostringstream os;
  os << "opnorm " << report.value("version", "") << "  " << report["instance"].value("kind", "") << "  "
     << report["instance"].value("digest", "") << "\n";
  for (const char* section : {"result", "certificate", "solver", "timing"}) {
    if (!report.contains(section)) continue;
    os << section << ":\n";
    text_scalars(os, report[section], "");
  }
  if (report.value("flagged", false)) os << "WARNING: certificate residuals above 1e-5\n";
  return os.str();
}

json strip_timing(json report) {
  if (report.is_object()) {
    report.erase("timing");
    report.erase("seconds");
    for (auto& [key, v] : report.items()) v = strip_timing(v);
  } else if (report.is_array()) {
    for (auto& v : report) v = strip_timing(v);
  }
  return report;
}

}  // namespace opnorm::cli
