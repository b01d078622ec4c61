#include "instance.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace opnorm::cli {

namespace {

using nlohmann::json;

constexpr int kMaxBlockDim = 64;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError(where + ": " + what);
}

AlgebraShape shape_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of block sizes");
  std::vector<int> dims;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& v = j[i];
    if (!v.is_number_integer()) fail(where + "[" + std::to_string(i) + "]", "block size must be an integer");
    const auto d = v.get<long long>();
    if (d < 1 || d > kMaxBlockDim) {
      fail(where + "[" + std::to_string(i) + "]", "block size must lie in [1, " + std::to_string(kMaxBlockDim) + "]");
    }
    dims.push_back(static_cast<int>(d));
  }
  return AlgebraShape(dims);
}

json shape_to_json(const AlgebraShape& s) { return json(s.block_dims()); }

template <typename T>
T get_param(const json& p, const char* key, const std::string& where) {
  const json& v = p.at(key);
  if constexpr (std::is_same_v<T, double>) {
    if (!v.is_number()) fail(where + "." + key, "expected a number");
  } else {
    if (!v.is_number_integer()) fail(where + "." + key, "expected an integer");
  }
  return v.get<T>();
}

InstanceParameters parameters_from_json(const json& p) {
  const std::string where = "parameters";
  if (!p.is_object()) fail(where, "expected an object");
  static const std::set<std::string> known = {"K", "restarts", "seed", "tol", "samples"};
  for (const auto& [key, value] : p.items()) {
    if (!known.count(key)) fail(where + "." + key, "unknown parameter");
  }
  InstanceParameters out;
  if (p.contains("K")) {
    out.K = get_param<int>(p, "K", where);
    if (*out.K < 1) fail(where + ".K", "must be at least 1");
  }
  if (p.contains("restarts")) {
    out.restarts = get_param<int>(p, "restarts", where);
    if (*out.restarts < 1) fail(where + ".restarts", "must be at least 1");
  }
  if (p.contains("seed")) {
    if (!p.at("seed").is_number_unsigned()) fail(where + ".seed", "expected a non-negative integer");
    out.seed = p.at("seed").get<std::uint64_t>();
  }
  if (p.contains("tol")) {
    out.tol = get_param<double>(p, "tol", where);
    if (!(*out.tol > 0.0) || !std::isfinite(*out.tol)) fail(where + ".tol", "must be positive and finite");
  }
  if (p.contains("samples")) {
    out.samples = get_param<int>(p, "samples", where);
    if (*out.samples < 1) fail(where + ".samples", "must be at least 1");
  }
  return out;
}

json parameters_to_json(const InstanceParameters& p) {
  json j = json::object();
  if (p.K) j["K"] = *p.K;
  if (p.restarts) j["restarts"] = *p.restarts;
  if (p.seed) j["seed"] = *p.seed;
  if (p.tol) j["tol"] = *p.tol;
  if (p.samples) j["samples"] = *p.samples;
  return j;
}

std::vector<AlgebraElement> elements_from_json(const json& j, const AlgebraShape& shape, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of elements");
  std::vector<AlgebraElement> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(element_from_json(j[i], shape, where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

bool is_list_kind(InstanceKind k) {
  return k == InstanceKind::dec_linf || k == InstanceKind::cb_linf || k == InstanceKind::free_tensor ||
         k == InstanceKind::selfadjoint_dec;
}

}  // namespace

std::string to_string(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::dec_linf: return "dec_linf";
    case InstanceKind::dec_matrix: return "dec_matrix";
    case InstanceKind::cb_linf: return "cb_linf";
    case InstanceKind::free_tensor: return "free_tensor";
    case InstanceKind::mult_domain: return "mult_domain";
    case InstanceKind::selfadjoint_dec: return "selfadjoint_dec";
  }
  return "unknown";
}

InstanceKind kind_from_string(const std::string& s) {
  for (auto k : {InstanceKind::dec_linf, InstanceKind::dec_matrix, InstanceKind::cb_linf, InstanceKind::free_tensor,
                 InstanceKind::mult_domain, InstanceKind::selfadjoint_dec}) {
    if (to_string(k) == s) return k;
  }
  fail("kind", "unknown kind '" + s + "'");
}

ComplexMatrix matrix_from_json(const json& j, int dim, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    fail(where, "expected " + std::to_string(dim) + " rows" + (j.is_array() ? ", got " + std::to_string(j.size()) : ""));
  }
  ComplexMatrix m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != dim) {
      fail(rw, "expected " + std::to_string(dim) + " entries" +
                   (row.is_array() ? ", got " + std::to_string(row.size()) : ""));
    }
    for (int c = 0; c < dim; ++c) {
      const json& e = row[static_cast<std::size_t>(c)];
      const std::string ew = rw + "[" + std::to_string(c) + "]";
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        fail(ew, "expected a [re, im] pair of numbers");
      }
      const double re = e[0].get<double>();
      const double im = e[1].get<double>();
      if (!std::isfinite(re) || !std::isfinite(im)) fail(ew, "non-finite entry");
      m(r, c) = Complex(re, im);
    }
  }
  return m;
}

AlgebraElement element_from_json(const json& j, const AlgebraShape& shape, const std::string& where) {
  if (!j.is_array() || j.size() != shape.block_count()) {
    fail(where, "expected " + std::to_string(shape.block_count()) + " blocks" +
                    (j.is_array() ? ", got " + std::to_string(j.size()) : ""));
  }
  std::vector<ComplexMatrix> blocks;
  for (std::size_t b = 0; b < shape.block_count(); ++b) {
    blocks.push_back(matrix_from_json(j[b], shape.block_dim(b), where + "[" + std::to_string(b) + "]"));
  }
  return AlgebraElement(shape, std::move(blocks));
}

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

json element_to_json(const AlgebraElement& x) {
  json blocks = json::array();
  for (const auto& b : x.blocks()) blocks.push_back(matrix_to_json(b));
  return blocks;
}

Instance parse_instance(const json& j) {
  if (!j.is_object()) fail("(root)", "expected a JSON object");
  if (!j.contains("version")) fail("version", "missing");
  if (!j.at("version").is_string() || j.at("version").get<std::string>() != kInstanceVersion) {
    fail("version", std::string("expected \"") + kInstanceVersion + "\"");
  }
  if (!j.contains("kind") || !j.at("kind").is_string()) fail("kind", "missing or not a string");

  Instance inst;
  inst.kind = kind_from_string(j.at("kind").get<std::string>());
  const bool list_kind = is_list_kind(inst.kind);
  const std::set<std::string> allowed =
      list_kind ? std::set<std::string>{"version", "kind", "algebra", "elements", "parameters"}
                : std::set<std::string>{"version", "kind", "domain", "codomain", "images", "parameters"};
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) fail(key, "not allowed for kind " + to_string(inst.kind));
  }
  if (j.contains("parameters")) inst.parameters = parameters_from_json(j.at("parameters"));

  if (list_kind) {
    if (!j.contains("algebra")) fail("algebra", "missing");
    if (!j.contains("elements")) fail("elements", "missing");
    inst.codomain = shape_from_json(j.at("algebra"), "algebra");
    inst.elements = elements_from_json(j.at("elements"), inst.codomain, "elements");
    if (inst.kind == InstanceKind::cb_linf && !inst.codomain.is_single_block()) {
      fail("algebra", "cb_linf needs a single matrix block");
    }
    if (inst.kind == InstanceKind::selfadjoint_dec) {
      for (std::size_t i = 0; i < inst.elements.size(); ++i) {
        const auto& x = inst.elements[i];
        if (!is_self_adjoint(x, 1e-10 * std::max(1.0, element_norm(x)))) {
          fail("elements[" + std::to_string(i) + "]", "must be self-adjoint");
        }
      }
    }
  } else {
    for (const char* key : {"domain", "codomain", "images"}) {
      if (!j.contains(key)) fail(key, "missing");
    }
    inst.domain = shape_from_json(j.at("domain"), "domain");
    inst.codomain = shape_from_json(j.at("codomain"), "codomain");
    if (inst.kind == InstanceKind::dec_matrix && !inst.domain.is_single_block()) {
      fail("domain", "dec_matrix needs a single matrix block");
    }
    const json& images = j.at("images");
    if (!images.is_array() || static_cast<int>(images.size()) != inst.domain.dimension()) {
      fail("images", "expected " + std::to_string(inst.domain.dimension()) + " images (one per matrix unit)" +
                         (images.is_array() ? ", got " + std::to_string(images.size()) : ""));
    }
    inst.map = LinearMapRep(inst.domain, inst.codomain, elements_from_json(images, inst.codomain, "images"));
    if (inst.kind == InstanceKind::mult_domain) {
      if (!is_cp(inst.map, 1e-9)) fail("images", "mult_domain needs a completely positive map");
      if (!is_unital(inst.map, 1e-9)) fail("images", "mult_domain needs a unital map");
    }
  }
  inst.digest = digest_string(instance_to_json(inst));
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("instance", "cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail("instance", std::string("not valid JSON: ") + e.what());
  }
  return parse_instance(j);
}

json instance_to_json(const Instance& inst) {
  json j;
  j["version"] = kInstanceVersion;
  j["kind"] = to_string(inst.kind);
  if (is_list_kind(inst.kind)) {
    j["algebra"] = shape_to_json(inst.codomain);
    json el = json::array();
    for (const auto& x : inst.elements) el.push_back(element_to_json(x));
    j["elements"] = std::move(el);
  } else {
    j["domain"] = shape_to_json(inst.domain);
    j["codomain"] = shape_to_json(inst.codomain);
    json im = json::array();
    for (const auto& x : inst.map.images()) im.push_back(element_to_json(x));
    j["images"] = std::move(im);
  }
  const json params = parameters_to_json(inst.parameters);
  if (!params.empty()) j["parameters"] = params;
  return j;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest_string(const json& j) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

}  // namespace opnorm::cli
