#include "suite.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "opnorm/multdomain.hpp"
#include "opnorm/testkit.hpp"
#include "opnorm/version.hpp"

namespace opnorm::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// One observation of one check on one instance.
struct Obs {
  double stat = 0.0;
  bool ok = true;
  bool applicable = true;
  std::string note;
};

Obs observe(double stat, bool ok, const std::string& note = {}) { return {stat, ok, true, note}; }
Obs not_applicable() { return {0.0, true, false, {}}; }

struct CheckDef {
  std::string id;
  int criterion = 0;
  std::string title;
  std::string statistic;
  std::string tolerance;
  /// The interesting extreme is the minimum (negative controls).
  bool lower_is_worse = false;
};

using InstanceFn = std::function<std::vector<Obs>(int)>;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

SeededGenerator instance_gen(std::uint64_t seed, std::uint64_t stream, int i) {
  return SeededGenerator(seed).fork(stream).fork(static_cast<std::uint64_t>(i));
}

class Runner {
 public:
  explicit Runner(const VerifyConfig& cfg) : cfg_(cfg) {}

  int count(int full, int quick) const {
    if (cfg_.instances) return std::max(0, *cfg_.instances);
    return cfg_.profile == Profile::full ? full : quick;
  }

  /// Runs f on instances 0..n-1 and appends one CheckResult per definition.
  double group(std::vector<CheckResult>& out, const std::vector<CheckDef>& defs, int n, const InstanceFn& f) {
    const auto t0 = Clock::now();
    std::vector<std::vector<Obs>> obs(static_cast<std::size_t>(n));
    auto guarded = [&](int i) {
      try {
        obs[static_cast<std::size_t>(i)] = f(i);
      } catch (const std::exception& e) {
        obs[static_cast<std::size_t>(i)] =
            std::vector<Obs>(defs.size(), Obs{std::numeric_limits<double>::quiet_NaN(), false, true,
                                               std::string("exception: ") + e.what()});
      }
    };
    const int threads = std::min(std::max(1, cfg_.threads), std::max(1, n));
    if (threads == 1) {
      for (int i = 0; i < n; ++i) guarded(i);
    } else {
      std::atomic<int> next{0};
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
          for (int i = next++; i < n; i = next++) guarded(i);
        });
      }
      for (auto& th : pool) th.join();
    }
    const double secs = seconds_since(t0);

    for (std::size_t k = 0; k < defs.size(); ++k) {
      CheckResult r;
      r.id = defs[k].id;
      r.criterion = defs[k].criterion;
      r.title = defs[k].title;
      r.statistic = defs[k].statistic;
      r.tolerance = defs[k].tolerance;
      r.seconds = secs;
      bool have = false;
      for (int i = 0; i < n; ++i) {
        const auto& row = obs[static_cast<std::size_t>(i)];
        if (k >= row.size() || !row[k].applicable) continue;
        const Obs& o = row[k];
        ++r.instances;
        if (!o.ok) {
          ++r.failures;
          if (r.first_failure.empty()) r.first_failure = "instance " + std::to_string(i) + ": " + o.note;
        }
        if (std::isfinite(o.stat)) {
          if (!have) {
            r.worst = o.stat;
            have = true;
          } else {
            r.worst = defs[k].lower_is_worse ? std::min(r.worst, o.stat) : std::max(r.worst, o.stat);
          }
        }
      }
      out.push_back(std::move(r));
    }
    return secs;
  }

  const VerifyConfig& cfg() const { return cfg_; }

  CbOptions cb_options(std::uint64_t seesaw_seed) const {
    CbOptions o;
    o.seesaw.seed = seesaw_seed;
    if (cfg_.regression == Regression::seesaw_k1) {
      o.seesaw.K = 1;
      o.escalate = false;
    }
    return o;
  }

 private:
  const VerifyConfig& cfg_;
};

std::vector<ComplexMatrix> ginibre_list(SeededGenerator& g, int n, int d) {
  std::vector<ComplexMatrix> x;
  for (int j = 0; j < n; ++j) x.push_back(random_ginibre(g, d, d));
  return x;
}

std::vector<AlgebraElement> as_elements(const std::vector<ComplexMatrix>& x) {
  std::vector<AlgebraElement> out;
  for (const auto& m : x) out.push_back(AlgebraElement::from_matrix(m));
  return out;
}

// Violation of the dec-certificate invariants: block PSD-ness and the two
// operator-sum bounds.
double certificate_invariant_violation(const std::vector<ComplexMatrix>& x, const DecCertificate& c) {
  double worst = 0.0;
  const auto d = x.front().rows();
  ComplexMatrix sp = ComplexMatrix::Zero(d, d);
  ComplexMatrix sq = ComplexMatrix::Zero(d, d);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const ComplexMatrix& p = c.p[j].block(0);
    const ComplexMatrix& q = c.q[j].block(0);
    ComplexMatrix m(2 * d, 2 * d);
    m << p, x[j], x[j].adjoint(), q;
    worst = std::max(worst, -psd_check(m, 0.0).min_eigenvalue);
    sp += p;
    sq += q;
  }
  worst = std::max(worst, operator_norm(sp) - c.value);
  worst = std::max(worst, operator_norm(sq) - c.value);
  return worst;
}

void criteria_1_2(Runner& run, SuiteReport& rep) {
  const std::uint64_t seed = run.cfg().seed;
  const int n_inst = run.count(200, 30);
  const std::vector<CheckDef> defs = {
      {"C1.dec-cb-agreement", 1, "dec = cb: SDP upper vs see-saw lower, n in {2,3,4}, d in {2,3}",
       "max (upper - lower) / max(1, upper)", "gap in [-1e-6, 5e-4 max(1, upper)]"},
      {"C2.reconstruction", 2, "factorization x_j = a_j* b_j from the optimal point", "max ||x_j - a_j* b_j||",
       "<= 1e-6"},
      {"C2.value", 2, "factorization bound reproduces the SDP value",
       "max |(sum a*a)^1/2 (sum b*b)^1/2 - value|", "<= 1e-5"},
      {"C2.invariants", 2, "[[P_j, x_j], [x_j*, Q_j]] >= 0 and ||sum P||, ||sum Q|| <= value",
       "max violation", "<= 1e-7"},
      {"P.seesaw.monotone", 0, "see-saw objective never decreases", "max per-sweep decrease", "<= 1e-12"},
  };
  const double secs = run.group(rep.checks, defs, n_inst, [&](int i) {
    SeededGenerator g = instance_gen(seed, 1, i);
    const int n = 2 + i % 3;
    const int d = 2 + (i / 3) % 2;
    const auto x = ginibre_list(g, n, d);
    const AgreementReport a = cb_norm_linf(x, run.cb_options(g.next_u64()));
    const DecCertificate& c = a.sdp.certificate;
    const double fb_err = std::abs(c.factorization_bound - c.value);
    const double inv = certificate_invariant_violation(x, c);
    const std::string tag = "n=" + std::to_string(n) + " d=" + std::to_string(d);
    return std::vector<Obs>{
        observe(a.relative_gap, a.agree,
                tag + " upper=" + fmt(a.upper) + " lower=" + fmt(a.lower) + " K=" + std::to_string(a.K_used)),
        observe(c.reconstruction_residual, c.reconstruction_residual <= 1e-6, tag),
        observe(fb_err, fb_err <= 1e-5, tag),
        observe(inv, inv <= 1e-7, tag),
        observe(a.seesaw.max_decrease, a.seesaw.max_decrease <= 1e-12, tag),
    };
  });
  // Runtime budget for the agreement experiment.
  CheckResult& c1 = rep.checks[rep.checks.size() - defs.size()];
  c1.tolerance += "; runtime <= 300 s";
  if (secs > 300.0) {
    ++c1.failures;
    if (c1.first_failure.empty()) c1.first_failure = "runtime " + fmt(secs) + " s exceeds 300 s";
  }
}

void criterion_3(Runner& run, SuiteReport& rep) {
  const std::uint64_t seed = run.cfg().seed;
  run.group(rep.checks,
            {{"C3.scalar", 3, "scalar coefficients: dec = cb = sum |x_j|", "max |value - sum |x_j||",
              "<= 1e-8 (dec, SDP upper, see-saw lower)"}},
            run.count(50, 10), [&](int i) {
              SeededGenerator g = instance_gen(seed, 31, i);
              const int n = 1 + i % 6;
              const auto x = ginibre_list(g, n, 1);
              double l1 = 0.0;
              for (const auto& m : x) l1 += std::abs(m(0, 0));
              const double dec = dec_norm_linf(as_elements(x)).value;
              const AgreementReport a = cb_norm_linf(x, run.cb_options(g.next_u64()));
              const double err = std::max({std::abs(dec - l1), std::abs(a.upper - l1), std::abs(a.lower - l1)});
              return std::vector<Obs>{observe(err, err <= 1e-8, "n=" + std::to_string(n))};
            });
  run.group(rep.checks,
            {{"C3.unitary", 3, "unitary coefficients in M_d: dec = cb = n", "max |value - n|",
              "<= 1e-6 (dec and see-saw lower)"}},
            run.count(30, 6), [&](int i) {
              SeededGenerator g = instance_gen(seed, 32, i);
              const int n = 2 + i % 3;
              const int d = 2 + (i / 3) % 2;
              std::vector<ComplexMatrix> x;
              for (int j = 0; j < n; ++j) x.push_back(random_haar_unitary(g, d));
              const double dec = dec_norm_linf(as_elements(x)).value;
              SeeSawOptions so = run.cb_options(g.next_u64()).seesaw;
              const double lower = seesaw_min_norm(x, so).lower_bound;
              const double err = std::max(std::abs(dec - n), std::abs(lower - n));
              return std::vector<Obs>{
                  observe(err, err <= 1e-6, "n=" + std::to_string(n) + " d=" + std::to_string(d))};
            });
  run.group(rep.checks,
            {{"C3.trace-norm", 3, "u: M_n -> C has dec norm = trace norm of [u(e_rs)]", "max |dec - ||C||_1|",
              "<= 1e-7"}},
            run.count(30, 6), [&](int i) {
              SeededGenerator g = instance_gen(seed, 33, i);
              const int n = 2 + i % 3;
              const ComplexMatrix c = random_ginibre(g, n, n);
              const AlgebraShape scalar({1});
              std::vector<AlgebraElement> images;
              for (int r = 0; r < n; ++r) {
                for (int s = 0; s < n; ++s) images.push_back(AlgebraElement(scalar, {ComplexMatrix::Constant(1, 1, c(r, s))}));
              }
              const LinearMapRep u(AlgebraShape::matrix(n), scalar, std::move(images));
              const double err = std::abs(dec_norm_matrix_domain(u).value - trace_norm(c));
              return std::vector<Obs>{observe(err, err <= 1e-7, "n=" + std::to_string(n))};
            });
}

void criterion_4(Runner& run, SuiteReport& rep) {
  const std::uint64_t seed = run.cfg().seed;
  const std::vector<AlgebraShape> shapes = {AlgebraShape({2}), AlgebraShape({3}), AlgebraShape({1, 2}),
                                            AlgebraShape({2, 2})};
  run.group(rep.checks,
            {{"C4.selfadjoint", 4, "self-adjoint decomposition value equals the dec norm",
              "max |selfadjoint - dec|", "<= 2e-6"}},
            run.count(50, 10), [&](int i) {
              SeededGenerator g = instance_gen(seed, 4, i);
              const int n = 1 + i % 4;
              const AlgebraShape& sh = shapes[static_cast<std::size_t>((i / 4) % shapes.size())];
              std::vector<AlgebraElement> x;
              for (int j = 0; j < n; ++j) x.push_back(random_self_adjoint(g, sh));
              const double sa = selfadjoint_dec_norm(x).value;
              const double dec = dec_norm_linf(x).value;
              const double err = std::abs(sa - dec);
              return std::vector<Obs>{observe(err, err <= 2e-6, "n=" + std::to_string(n) + " shape=" + sh.to_string())};
            });
}

LinearMapRep random_matrix_map(SeededGenerator& g, int n, int d) {
  return random_linear_map(g, AlgebraShape::matrix(n), AlgebraShape::matrix(d));
}

void criterion_5(Runner& run, SuiteReport& rep) {
  const std::uint64_t seed = run.cfg().seed;
  const int count = run.count(100, 15);

  const std::vector<AlgebraShape> a_shapes = {AlgebraShape({1, 1, 1}), AlgebraShape({2})};
  const std::vector<AlgebraShape> b_shapes = {AlgebraShape({2}), AlgebraShape({1, 2})};
  const std::vector<AlgebraShape> c_shapes = {AlgebraShape({2}), AlgebraShape({1, 1})};
  run.group(rep.checks,
            {{"C5.submultiplicative", 5, "||v u||_dec <= ||v||_dec ||u||_dec", "max violation", "<= 1e-6"}}, count,
            [&](int i) {
              SeededGenerator g = instance_gen(seed, 51, i);
              const auto& a = a_shapes[static_cast<std::size_t>(i % 2)];
              const auto& b = b_shapes[static_cast<std::size_t>((i / 2) % 2)];
              const auto& c = c_shapes[static_cast<std::size_t>((i / 4) % 2)];
              const LinearMapRep u = random_linear_map(g, a, b);
              const LinearMapRep v = random_linear_map(g, b, c);
              const double viol = dec_norm(compose(v, u)).value - dec_norm(v).value * dec_norm(u).value;
              return std::vector<Obs>{
                  observe(viol, viol <= 1e-6, a.to_string() + " -> " + b.to_string() + " -> " + c.to_string())};
            });

  run.group(rep.checks,
            {{"C5.cb-below-dec", 5, "see-saw cb lower bound <= dec", "max (lower - dec)", "<= 1e-6"}}, count,
            [&](int i) {
              SeededGenerator g = instance_gen(seed, 52, i);
              const int n = 2 + i % 3;
              const int d = 1 + (i / 3) % 3;
              const auto x = ginibre_list(g, n, d);
              SeeSawOptions so = run.cb_options(g.next_u64()).seesaw;
              const double viol = seesaw_min_norm(x, so).lower_bound - dec_norm_linf(as_elements(x)).value;
              return std::vector<Obs>{
                  observe(viol, viol <= 1e-6, "n=" + std::to_string(n) + " d=" + std::to_string(d))};
            });

  const std::vector<AlgebraShape> f_shapes = {AlgebraShape({2}), AlgebraShape({1, 2}), AlgebraShape({3})};
  run.group(rep.checks,
            {{"C5.factored-bound", 5, "(sum a*a)^1/2 (sum b*b)^1/2 bounds the dec norm of sum_k a_ki* b_kj",
              "max (dec - bound)", "<= 1e-6"},
             {"C5.sandwich-bound", 5, "||x -> a* x b||_dec <= ||a|| ||b||", "max (dec - ||a|| ||b||)", "<= 1e-6"}},
            count, [&](int i) {
              SeededGenerator g = instance_gen(seed, 53, i);
              const int m = 1 + i % 2;
              const int n = 2;
              const auto& sh = f_shapes[static_cast<std::size_t>((i / 2) % f_shapes.size())];
              FactoredMapData data;
              for (int k = 0; k < m; ++k) {
                std::vector<AlgebraElement> ak, bk;
                for (int j = 0; j < n; ++j) {
                  ak.push_back(random_element(g, sh));
                  bk.push_back(random_element(g, sh));
                }
                data.a.push_back(std::move(ak));
                data.b.push_back(std::move(bk));
              }
              const double bound = dec_upper_bound_factored(data);
              const double viol = dec_norm_matrix_domain(map_from_factored(data)).value - bound;
              const AlgebraElement a = random_element(g, sh);
              const AlgebraElement b = random_element(g, sh);
              const double sviol = dec_norm(sandwich_map(a, b)).value - element_norm(a) * element_norm(b);
              const std::string tag = "m=" + std::to_string(m) + " shape=" + sh.to_string();
              return std::vector<Obs>{observe(viol, viol <= 1e-6, tag), observe(sviol, sviol <= 1e-6, tag)};
            });

  const std::vector<AlgebraShape> targets = {AlgebraShape({2}), AlgebraShape({1, 1}), AlgebraShape({1, 2})};
  run.group(rep.checks,
            {{"C5.contraction", 5, "||(id (x) u)(t)||_max <= ||u||_dec ||t||_min", "max (lhs - rhs)", "<= 1e-5"}},
            count, [&](int i) {
              SeededGenerator g = instance_gen(seed, 54, i);
              const FreeTensor t = random_free_tensor(g, 2 + i % 2, 2);
              const AlgebraShape dom = AlgebraShape::matrix(2);
              const AlgebraShape& cod = targets[static_cast<std::size_t>((i / 2) % targets.size())];
              LinearMapRep u;
              std::string what;
              switch ((i / 6) % 3) {
                case 0:
                  u = random_cp_map(g, dom, cod);
                  what = "cp";
                  break;
                case 1: {
                  AlgebraElement a = random_element(g, dom);
                  a *= 1.0 / element_norm(a);
                  u = sandwich_map(a, a);
                  what = "a*xa";
                  break;
                }
                default:
                  u = random_linear_map(g, dom, cod);
                  what = "general";
              }
              const ContractionReport r = check_finite_rank_contraction(u, t);
              return std::vector<Obs>{observe(r.lhs - r.rhs, r.holds, what + " into " + u.codomain().to_string())};
            });

  run.group(rep.checks,
            {{"C5.tensor-submultiplicative", 5, "||u1 (x) u2||_dec <= ||u1||_dec ||u2||_dec on M_n -> M_d, n, d <= 2",
              "max violation", "<= 1e-5"}},
            run.count(100, 10), [&](int i) {
              SeededGenerator g = instance_gen(seed, 55, i);
              const int n1 = 1 + i % 2, d1 = 1 + (i / 2) % 2, n2 = 1 + (i / 4) % 2, d2 = 1 + (i / 8) % 2;
              const LinearMapRep u1 = random_matrix_map(g, n1, d1);
              const LinearMapRep u2 = random_matrix_map(g, n2, d2);
              const double viol = dec_norm(tensor(u1, u2)).value - dec_norm(u1).value * dec_norm(u2).value;
              char tag[64];
              std::snprintf(tag, sizeof tag, "M%d->M%d (x) M%d->M%d", n1, d1, n2, d2);
              return std::vector<Obs>{observe(viol, viol <= 1e-5, tag)};
            });
}

void criterion_6(Runner& run, SuiteReport& rep) {
  const std::uint64_t seed = run.cfg().seed;
  run.group(rep.checks,
            {{"C6.direct-sum", 6, "joint SDP into B_1 (+) B_2 equals max of the block SDPs",
              "max |joint - max blocks|", "<= 1e-6"}},
            run.count(30, 6), [&](int i) {
              SeededGenerator g = instance_gen(seed, 6, i);
              const AlgebraShape dom = i % 2 == 0 ? AlgebraShape(std::vector<int>(static_cast<std::size_t>(2 + i % 3), 1))
                                                  : AlgebraShape::matrix(2);
              const int d1 = 1 + i % 3;
              const int d2 = 1 + (i / 3) % 3;
              const std::vector<LinearMapRep> parts = {random_linear_map(g, dom, AlgebraShape::matrix(d1)),
                                                       random_linear_map(g, dom, AlgebraShape::matrix(d2))};
              const DirectSumDec r = dec_norm_direct_sum(parts);
              return std::vector<Obs>{observe(r.discrepancy, r.discrepancy <= 1e-6,
                                              "domain " + dom.to_string() + " into M" + std::to_string(d1) +
                                                  " (+) M" + std::to_string(d2))};
            });
}

void criterion_7(Runner& run, SuiteReport& rep) {
  const std::uint64_t seed = run.cfg().seed;
  run.group(rep.checks,
            {{"C7.nuclearity", 7, "free tensors: max norm = min upper, see-saw closes the gap",
              "max relative gap or closure", "<= 5e-4 relative"}},
            run.count(100, 15), [&](int i) {
              SeededGenerator g = instance_gen(seed, 7, i);
              const int n = 2 + i % 3;
              const int d = 2 + (i / 3) % 2;
              const FreeTensor t = random_free_tensor(g, n, d);
              const NuclearityReport r = nuclearity_gap(t, run.cb_options(g.next_u64()));
              const double stat = std::max(r.gap, r.closure) / std::max(1.0, r.max_value);
              return std::vector<Obs>{observe(stat, r.agree,
                                              "n=" + std::to_string(n) + " d=" + std::to_string(d) +
                                                  " max=" + fmt(r.max_value) + " lower=" + fmt(r.min_lower))};
            });
}

struct MdCase {
  std::string name;
  LinearMapRep map;
  int expected = -1;
  bool pinching = false;
};

std::vector<MdCase> multdomain_cases(std::uint64_t seed) {
  std::vector<MdCase> cases;
  SeededGenerator g = SeededGenerator(seed).fork(8);
  for (int d = 2; d <= 4; ++d) {
    const AlgebraShape sh = AlgebraShape::matrix(d);
    const std::string md = "M" + std::to_string(d);
    cases.push_back({"identity on " + md, LinearMapRep::identity(sh), d * d, false});

    std::vector<AlgebraElement> dep, pin;
    for (int r = 0; r < d; ++r) {
      for (int s = 0; s < d; ++s) {
        dep.push_back(r == s ? (1.0 / d) * AlgebraElement::unit(sh) : AlgebraElement::zero(sh));
        pin.push_back(r == s ? AlgebraElement::matrix_unit(sh, 0, r, s) : AlgebraElement::zero(sh));
      }
    }
    cases.push_back({"depolarizing on " + md, LinearMapRep(sh, sh, std::move(dep)), 1, false});
    cases.push_back({"diagonal pinching on " + md, LinearMapRep(sh, sh, std::move(pin)), d, true});

    const AlgebraElement w = random_unitary_element(g, sh);
    cases.push_back({"unitary conjugation on " + md, sandwich_map(w, w), d * d, false});
  }
  // x -> (x, x) into M_2 (+) M_2.
  {
    const AlgebraShape m2 = AlgebraShape::matrix(2);
    std::vector<LinearMapRep> parts = {LinearMapRep::identity(m2), LinearMapRep::identity(m2)};
    cases.push_back({"diagonal embedding M2 -> M2 (+) M2", direct_sum(parts), 4, false});
  }
  cases.push_back({"random unital CP M2 -> M3",
                   random_unital_cp_map(g, AlgebraShape::matrix(2), AlgebraShape::matrix(3)), -1, false});
  cases.push_back({"random unital CP M3 -> M3",
                   random_unital_cp_map(g, AlgebraShape::matrix(3), AlgebraShape::matrix(3)), -1, false});
  cases.push_back({"random unital CP on C (+) M2",
                   random_unital_cp_map(g, AlgebraShape({1, 2}), AlgebraShape({1, 2})), -1, false});
  return cases;
}

void criterion_8(Runner& run, SuiteReport& rep) {
  const std::uint64_t seed = run.cfg().seed;
  const std::vector<MdCase> cases = multdomain_cases(seed);
  const int samples = run.cfg().profile == Profile::full ? 40 : 10;
  run.group(
      rep.checks,
      {
          {"C8.dimension", 8, "identity -> d^2, depolarizing -> 1, pinching -> d, homomorphisms -> full",
           "max |dim - expected|", "== 0"},
          {"C8.schwarz", 8, "u(a*a) = u(a)*u(a) and u(aa*) = u(a)u(a)* on the basis", "max residual", "<= 1e-9"},
          {"C8.subalgebra", 8, "basis contains 1, closed under adjoint and products", "max span residual",
           "<= 1e-9"},
          {"C8.bimodularity", 8, "u(axb) = u(a)u(x)u(b) for a, b in the domain", "max residual", "<= 1e-8"},
          {"C8.negative-control", 8, "pinching with a = e12 + e21 is flagged", "min residual", "> 1e-3", true},
      },
      static_cast<int>(cases.size()), [&](int i) {
        const MdCase& c = cases[static_cast<std::size_t>(i)];
        const SubalgebraBasis d = multiplicative_domain(c.map);
        const double closure = std::max({d.unit_residual, d.adjoint_residual, d.product_residual});
        const BimodularityReport b = verify_bimodularity(c.map, d, samples, seed + static_cast<std::uint64_t>(i));
        std::vector<Obs> out;
        if (c.expected >= 0) {
          const double diff = std::abs(d.dimension - c.expected);
          out.push_back(observe(diff, diff == 0, c.name + ": dimension " + std::to_string(d.dimension)));
        } else {
          out.push_back(not_applicable());
        }
        out.push_back(observe(d.schwarz_residual, d.schwarz_residual <= 1e-9, c.name));
        out.push_back(observe(closure, closure <= 1e-9, c.name));
        out.push_back(observe(b.max_residual, b.max_residual <= 1e-8, c.name));
        if (c.pinching) {
          const AlgebraShape& sh = c.map.domain();
          AlgebraElement a = AlgebraElement::matrix_unit(sh, 0, 0, 1) + AlgebraElement::matrix_unit(sh, 0, 1, 0);
          SeededGenerator g = instance_gen(seed, 81, i);
          double worst = 0.0;
          for (int s = 0; s < 5; ++s) {
            AlgebraElement x = random_element(g, sh);
            x *= 1.0 / element_norm(x);
            worst = std::max(worst, bimodularity_residuals(c.map, a, x, AlgebraElement::unit(sh)).max_residual);
          }
          out.push_back(observe(worst, worst > 1e-3, c.name));
        } else {
          out.push_back(not_applicable());
        }
        return out;
      });
}

ConicProgram lambda_max_program(const ComplexMatrix& h) {
  ConicProgram p;
  const int t = p.add_variable(1.0);
  const int b = p.add_block(static_cast<int>(h.rows()));
  p.set_constant(b, -h);
  for (int a = 0; a < h.rows(); ++a) p.add_term(b, t, a, a, 1.0);
  return p;
}

std::vector<Obs> solver_observations(const ConicProgram& p, const ConicSolution& s, const std::string& tag) {
  const bool opt = s.status == SolveStatus::optimal;
  const CertificateReport cr = verify_certificate(p, s, 1e-7);
  const double weak = s.dual_value - s.primal_value;
  return {
      opt ? observe(std::abs(s.gap), std::abs(s.gap) <= 1e-7, tag) : observe(0.0, false, tag + ": status " + to_string(s.status)),
      observe(static_cast<double>(cr.issues.size()), cr.clean, cr.clean ? tag : tag + ": " + cr.issues.front()),
      observe(weak, weak <= 1e-8 * std::max(1.0, std::abs(s.primal_value)), tag),
  };
}

void criterion_9(Runner& run, SuiteReport& rep) {
  const std::uint64_t seed = run.cfg().seed;
  const std::vector<CheckDef> defs = {
      {"C9.lambda-max", 9, "min t s.t. t 1 - H >= 0 matches the eigensolver, sizes 2-12", "max |t - lambda_max|",
       "<= 1e-7"},
      {"C9.gap", 9, "duality gap of every optimal solve", "max |gap|", "<= 1e-7"},
      {"C9.certificate", 9, "verify_certificate clean on every solve", "issues", "clean at tol 1e-7"},
      {"P.conic.weak-duality", 0, "dual value <= primal value", "max (dual - primal)", "<= 1e-8 max(1, |primal|)"},
      {"P.conic.determinism", 0, "repeat solve is bitwise identical", "max |y1 - y2|", "== 0"},
  };
  run.group(rep.checks, defs, run.count(100, 20), [&](int i) {
    SeededGenerator g = instance_gen(seed, 9, i);
    const int size = 2 + i % 11;
    const ComplexMatrix h = random_hermitian(g, size);
    const ConicProgram p = lambda_max_program(h);
    const ConicSolution s = solve(p);
    const double lmax = herm_eigensystem(h).values(size - 1);
    const double err = std::abs(s.primal_value - lmax);
    const ConicSolution s2 = solve(p);
    const double det = (s.y - s2.y).cwiseAbs().maxCoeff();
    const std::string tag = "size " + std::to_string(size);
    std::vector<Obs> out = {observe(err, err <= 1e-7, tag)};
    for (auto& o : solver_observations(p, s, tag)) out.push_back(o);
    out.push_back(observe(det, det == 0.0, tag));
    return out;
  });

  // The same certificate checks on the programs behind dec norms.
  run.group(rep.checks,
            {
                {"C9.gap", 9, "duality gap of every optimal solve (dec programs)", "max |gap|", "<= 1e-7"},
                {"C9.certificate", 9, "verify_certificate clean on every solve (dec programs)", "issues",
                 "clean at tol 1e-7"},
                {"P.conic.weak-duality", 0, "dual value <= primal value (dec programs)", "max (dual - primal)",
                 "<= 1e-8 max(1, |primal|)"},
            },
            run.count(30, 6), [&](int i) {
              SeededGenerator g = instance_gen(seed, 91, i);
              const AlgebraShape dom = i % 2 ? AlgebraShape::matrix(2) : AlgebraShape({1, 1, 1});
              const AlgebraShape cod = AlgebraShape::matrix(1 + i % 3);
              const DecProgram dp = dec_conic_program(random_linear_map(g, dom, cod));
              const ConicSolution s = solve(dp.program, {1e-9, 1e-8, 200});
              return solver_observations(dp.program, s, dom.to_string() + " -> " + cod.to_string());
            });

  run.group(rep.checks,
            {{"C9.examples", 9, "diag(1,4,2) -> 4; -1 >= 0 infeasible; perturbed y flagged", "failed examples",
              "== 0"}},
            3, [&](int i) {
              if (i == 0) {
                ComplexMatrix h = ComplexMatrix::Zero(3, 3);
                h.diagonal() << 1.0, 4.0, 2.0;
                const ConicSolution s = solve(lambda_max_program(h));
                const double err = std::abs(s.primal_value - 4.0);
                return std::vector<Obs>{observe(err, err <= 1e-7, "diag(1,4,2)")};
              }
              if (i == 1) {
                ConicProgram p;
                p.add_variable(0.0);
                const int b = p.add_block(2);
                p.set_constant(b, -ComplexMatrix::Identity(2, 2));
                p.add_term(b, 0, 0, 1, 1.0);
                const ConicSolution s = solve(p);
                const bool ok = s.status == SolveStatus::infeasible_suspected;
                return std::vector<Obs>{observe(ok ? 0.0 : 1.0, ok, "status " + to_string(s.status))};
              }
              SeededGenerator g = instance_gen(seed, 92, 0);
              const ConicProgram p = lambda_max_program(random_hermitian(g, 4));
              ConicSolution s = solve(p);
              s.y(0) -= 1e-3;
              const bool flagged = !verify_certificate(p, s, 1e-7).clean;
              return std::vector<Obs>{observe(flagged ? 0.0 : 1.0, flagged, "perturbed certificate")};
            });
}

// Elements a of D_v with v(a) in D_u, as coordinate columns.
ComplexMatrix chained_domain(const SubalgebraBasis& du, const LinearMapRep& v, const SubalgebraBasis& dv) {
  const int n = v.codomain().dimension();
  ComplexMatrix bu(n, static_cast<Eigen::Index>(du.basis.size()));
  for (std::size_t k = 0; k < du.basis.size(); ++k) bu.col(static_cast<Eigen::Index>(k)) = du.basis[k].coordinates();
  ComplexMatrix av(v.domain().dimension(), static_cast<Eigen::Index>(dv.basis.size()));
  ComplexMatrix off(n, static_cast<Eigen::Index>(dv.basis.size()));
  for (std::size_t k = 0; k < dv.basis.size(); ++k) {
    const auto c = static_cast<Eigen::Index>(k);
    av.col(c) = dv.basis[k].coordinates();
    const ComplexVector y = apply(v, dv.basis[k]).coordinates();
    off.col(c) = y - bu * (bu.adjoint() * y);
  }
  const Eigen::JacobiSVD<ComplexMatrix> svd(off, Eigen::ComputeFullV);
  const RealVector& sv = svd.singularValues();
  const double cutoff = 1e-9 * std::max(1.0, sv.size() ? sv(0) : 0.0);
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) rank += sv(k) > cutoff ? 1 : 0;
  const ComplexMatrix kernel = svd.matrixV().rightCols(off.cols() - rank);
  return av * kernel;
}

void multdomain_composition(Runner& run, SuiteReport& rep) {
  const std::uint64_t seed = run.cfg().seed;
  run.group(
      rep.checks,
      {{"P.multdomain.composition", 0, "a in D_v with v(a) in D_u lies in D_{u v}; pinching, depolarizing, conjugation",
        "max span residual", "<= 1e-9"}},
      27, [&](int i) {
        const int d = 2 + i / 9;
        const AlgebraShape sh = AlgebraShape::matrix(d);
        SeededGenerator g = instance_gen(seed, 106, d);
        const AlgebraElement w = random_unitary_element(g, sh);
        std::vector<AlgebraElement> dep, pin;
        for (int r = 0; r < d; ++r) {
          for (int s = 0; s < d; ++s) {
            dep.push_back(r == s ? (1.0 / d) * AlgebraElement::unit(sh) : AlgebraElement::zero(sh));
            pin.push_back(r == s ? AlgebraElement::matrix_unit(sh, 0, r, s) : AlgebraElement::zero(sh));
          }
        }
        const std::vector<std::pair<std::string, LinearMapRep>> maps = {
            {"pinching", LinearMapRep(sh, sh, pin)},
            {"depolarizing", LinearMapRep(sh, sh, dep)},
            {"conjugation", sandwich_map(w, w)}};
        const auto& [un, u] = maps[static_cast<std::size_t>(i % 3)];
        const auto& [vn, v] = maps[static_cast<std::size_t>((i / 3) % 3)];
        const SubalgebraBasis du = multiplicative_domain(u);
        const SubalgebraBasis dv = multiplicative_domain(v);
        const SubalgebraBasis duv = multiplicative_domain(compose(u, v));
        const ComplexMatrix chain = chained_domain(du, v, dv);
        double worst = 0.0;
        for (Eigen::Index k = 0; k < chain.cols(); ++k) {
          worst = std::max(worst, span_residual(duv, AlgebraElement::from_coordinates(sh, chain.col(k))));
        }
        const bool ok = worst <= 1e-9 && duv.dimension >= chain.cols();
        return std::vector<Obs>{observe(worst, ok,
                                        un + " after " + vn + " on M" + std::to_string(d) + ": chained dimension " +
                                            std::to_string(chain.cols()) + ", dim D_uv " +
                                            std::to_string(duv.dimension))};
      });
}

void properties(Runner& run, SuiteReport& rep) {
  const std::uint64_t seed = run.cfg().seed;
  const int count = run.count(20, 5);
  const std::vector<AlgebraShape> shapes = {AlgebraShape({2}), AlgebraShape({1, 2})};

  run.group(rep.checks,
            {
                {"P.decnorm.homogeneity", 0, "dec(lambda x) = |lambda| dec(x)", "max relative error", "<= 1e-8"},
                {"P.decnorm.triangle", 0, "dec(x + y) <= dec(x) + dec(y)", "max violation", "<= 1e-7"},
                {"P.decnorm.cp-case", 0, "positive coefficients: dec = ||sum x_j||", "max |dec - ||sum x||",
                 "<= 1e-7"},
            },
            count, [&](int i) {
              SeededGenerator g = instance_gen(seed, 101, i);
              const int n = 2 + i % 2;
              const AlgebraShape& sh = shapes[static_cast<std::size_t>(i % 2)];
              std::vector<AlgebraElement> x, y, p, lx, xy;
              AlgebraElement sum = AlgebraElement::zero(sh);
              const Complex lambda = 2.0 * g.complex_gaussian();
              for (int j = 0; j < n; ++j) {
                x.push_back(random_element(g, sh));
                y.push_back(random_element(g, sh));
                p.push_back(random_positive(g, sh));
                sum += p.back();
                lx.push_back(lambda * x.back());
                xy.push_back(x.back() + y.back());
              }
              const double dx = dec_norm_linf(x).value;
              const double hom = std::abs(dec_norm_linf(lx).value - std::abs(lambda) * dx) / std::max(1e-300, std::abs(lambda) * dx);
              const double tri = dec_norm_linf(xy).value - dx - dec_norm_linf(y).value;
              const double cp = std::abs(dec_norm_linf(p).value - element_norm(sum));
              const std::string tag = "shape " + sh.to_string();
              return std::vector<Obs>{observe(hom, hom <= 1e-8, tag), observe(tri, tri <= 1e-7, tag),
                                      observe(cp, cp <= 1e-7, tag)};
            });

  run.group(rep.checks,
            {{"P.seesaw.k-monotone", 0, "best bound with K = 2d >= best bound with K = d", "max (K=d) - (K=2d)",
              "<= 1e-9"}},
            count, [&](int i) {
              SeededGenerator g = instance_gen(seed, 102, i);
              const int n = 2 + i % 3;
              const int d = 2 + (i / 3) % 2;
              const auto x = ginibre_list(g, n, d);
              SeeSawOptions so;
              so.seed = g.next_u64();
              const double small = seesaw_min_norm(x, so).lower_bound;
              so.K = 2 * d;
              const double large = seesaw_min_norm(x, so).lower_bound;
              return std::vector<Obs>{
                  observe(small - large, small - large <= 1e-9, "n=" + std::to_string(n) + " d=" + std::to_string(d))};
            });

  run.group(rep.checks,
            {
                {"P.tensor.unitary-invariance", 0, "max norm unchanged by x_j -> w* x_j w", "max |difference|",
                 "<= 1e-7"},
                {"P.tensor.permutation", 0, "max norm and min upper unchanged by permuting indices 1..n-1",
                 "max |difference|", "<= 1e-8"},
            },
            count, [&](int i) {
              SeededGenerator g = instance_gen(seed, 103, i);
              const int n = 3 + i % 2;
              const int d = 2;
              const FreeTensor t = random_free_tensor(g, n, d);
              const ComplexMatrix w = random_haar_unitary(g, d);
              std::vector<AlgebraElement> conj, perm = t.coeffs();
              for (const auto& c : t.coeffs()) conj.push_back(AlgebraElement::from_matrix(w.adjoint() * c.block(0) * w));
              std::reverse(perm.begin() + 1, perm.end());
              const double base = max_norm(t).value;
              const double inv = std::abs(max_norm(FreeTensor(conj)).value - base);
              const FreeTensor tp(perm);
              CbOptions co;
              co.seesaw.seed = g.next_u64();
              const double upper = min_norm(t, co).upper;
              const double pdiff =
                  std::max(std::abs(max_norm(tp).value - base), std::abs(min_norm(tp, co).upper - upper));
              const std::string tag = "n=" + std::to_string(n);
              return std::vector<Obs>{observe(inv, inv <= 1e-7, tag), observe(pdiff, pdiff <= 1e-8, tag)};
            });

  run.group(rep.checks,
            {
                {"P.testkit.determinism", 0, "same seed gives identical instances", "max |difference|", "== 0"},
                {"P.testkit.haar", 0, "Haar unitaries are unitary", "max unitarity defect", "<= 1e-12"},
                {"P.testkit.cp", 0, "random CP maps pass is_cp at 1e-10", "min Choi eigenvalue", ">= -1e-12",
                 true},
            },
            count, [&](int i) {
              const int d = 1 + i % 4;
              SeededGenerator g1 = instance_gen(seed, 104, i);
              SeededGenerator g2 = instance_gen(seed, 104, i);
              const ComplexMatrix a1 = random_ginibre(g1, d, d + 1);
              const ComplexMatrix a2 = random_ginibre(g2, d, d + 1);
              const double diff = (a1 - a2).cwiseAbs().maxCoeff();
              const double defect = unitarity_defect(random_haar_unitary(g1, d + 1));
              const LinearMapRep u = random_cp_map(g1, AlgebraShape({d, 1}), AlgebraShape::matrix(2));
              const double mine = choi_min_eigenvalue(u);
              const std::string tag = "d=" + std::to_string(d);
              return std::vector<Obs>{observe(diff, diff == 0.0, tag), observe(defect, defect <= 1e-12, tag),
                                      observe(mine, mine >= -1e-12 && is_cp(u, 1e-10), tag)};
            });

  run.group(rep.checks,
            {
                {"P.testkit.grid-oracle", 0, "grid oracle agrees with the see-saw, d <= 2, n <= 3",
                 "max relative difference", "<= 1e-3"},
                {"P.testkit.grid-below-sdp", 0, "grid oracle never exceeds the SDP upper bound",
                 "max (grid - upper)", "<= 1e-5"},
            },
            run.count(20, 4), [&](int i) {
              SeededGenerator g = instance_gen(seed, 105, i);
              const int n = 2 + i % 2;
              const int d = 1 + (i / 2) % 2;
              const auto x = ginibre_list(g, n, d);
              const double grid = grid_oracle_min_norm(x).value;
              SeeSawOptions so;
              so.seed = g.next_u64();
              const double ss = seesaw_min_norm(x, so).lower_bound;
              const double upper = dec_norm_linf(as_elements(x)).value;
              const double diff = std::abs(grid - ss) / std::max(1.0, ss);
              const std::string tag = "n=" + std::to_string(n) + " d=" + std::to_string(d);
              return std::vector<Obs>{observe(diff, diff <= 1e-3, tag),
                                      observe(grid - upper, grid - upper <= 1e-5, tag)};
            });
}

// Pools checks that share an id (run in more than one group) into one row.
void merge_duplicates(std::vector<CheckResult>& checks) {
  std::vector<CheckResult> out;
  for (auto& c : checks) {
    auto it = std::find_if(out.begin(), out.end(), [&](const CheckResult& o) { return o.id == c.id; });
    if (it == out.end()) {
      out.push_back(std::move(c));
      continue;
    }
    const bool lower = c.id == "P.testkit.cp" || c.id == "C8.negative-control";
    if (c.instances > 0) {
      it->worst = it->instances == 0 ? c.worst : (lower ? std::min(it->worst, c.worst) : std::max(it->worst, c.worst));
    }
    it->instances += c.instances;
    it->failures += c.failures;
    if (it->first_failure.empty()) it->first_failure = c.first_failure;
    it->seconds += c.seconds;
  }
  checks = std::move(out);
}

}  // namespace

std::string to_string(Profile p) { return p == Profile::full ? "full" : "quick"; }

Profile profile_from_string(const std::string& s) {
  if (s == "full") return Profile::full;
  if (s == "quick") return Profile::quick;
  throw std::invalid_argument("unknown profile '" + s + "' (expected quick or full)");
}

bool SuiteReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
}

std::vector<const CheckResult*> SuiteReport::criterion(int number) const {
  std::vector<const CheckResult*> out;
  for (const auto& c : checks) {
    if (c.criterion == number) out.push_back(&c);
  }
  return out;
}

SuiteReport run_suite(const VerifyConfig& config) {
  const auto t0 = Clock::now();
  SuiteReport rep;
  rep.config = config;
  Runner run(rep.config);
  criteria_1_2(run, rep);
  criterion_3(run, rep);
  criterion_4(run, rep);
  criterion_5(run, rep);
  criterion_6(run, rep);
  criterion_7(run, rep);
  criterion_8(run, rep);
  criterion_9(run, rep);
  properties(run, rep);
  multdomain_composition(run, rep);
  merge_duplicates(rep.checks);
  std::stable_sort(rep.checks.begin(), rep.checks.end(), [](const CheckResult& a, const CheckResult& b) {
    const int ka = a.criterion == 0 ? 1000 : a.criterion;
    const int kb = b.criterion == 0 ? 1000 : b.criterion;
    return ka < kb;
  });
  rep.seconds = seconds_since(t0);
  return rep;
}

nlohmann::json suite_to_json(const SuiteReport& report, bool include_timing) {
  nlohmann::json j;
  j["toolkit"] = "opnorm";
  j["version"] = kVersionString;
  j["command"] = "verify";
  j["seed"] = report.config.seed;
  j["profile"] = to_string(report.config.profile);
  if (report.config.instances) j["instances"] = *report.config.instances;
  if (report.config.regression != Regression::none) j["injected_regression"] = "seesaw-k1";
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    nlohmann::json e;
    e["id"] = c.id;
    e["criterion"] = c.criterion;
    e["title"] = c.title;
    e["statistic"] = c.statistic;
    e["tolerance"] = c.tolerance;
    e["instances"] = c.instances;
    e["failures"] = c.failures;
    e["worst"] = c.worst;
    e["verdict"] = c.passed() ? "pass" : "fail";
    if (!c.first_failure.empty()) e["first_failure"] = c.first_failure;
    if (include_timing) e["seconds"] = c.seconds;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  j["all_passed"] = report.all_passed();
  if (include_timing) j["timing"] = {{"seconds", report.seconds}, {"threads", report.config.threads}};
  return j;
}

std::string render_table(const SuiteReport& report) {
  std::ostringstream os;
  char line[512];
  std::snprintf(line, sizeof line, "%-30s %4s %6s %6s %-10s  %s\n", "check", "crit", "inst", "fail", "worst",
                "tolerance");
  os << line;
  for (const auto& c : report.checks) {
    std::snprintf(line, sizeof line, "%-30s %4s %6d %6d %-10s  %s  [%s]\n", c.id.c_str(),
                  c.criterion ? std::to_string(c.criterion).c_str() : "-", c.instances, c.failures,
                  fmt(c.worst).c_str(), c.tolerance.c_str(), c.passed() ? "pass" : "FAIL");
    os << line;
    if (!c.passed() && !c.first_failure.empty()) os << "    first failure: " << c.first_failure << "\n";
  }
  const long passed = std::count_if(report.checks.begin(), report.checks.end(), [](const CheckResult& c) { return c.passed(); });
  os << passed << "/" << report.checks.size() << " checks passed (seed " << report.config.seed << ", profile "
     << to_string(report.config.profile) << ")\n";
  return os.str();
}

int default_thread_count() {
  if (const char* env = std::getenv("OPNORM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 256) return static_cast<int>(v);
  }
  return 1;
}

}  // namespace opnorm::cli
