#pragma once

// Instance files: JSON with complex entries written as [re, im] pairs.
// Layout and worked examples are in docs/formats.md.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "opnorm/cpmap.hpp"

namespace opnorm::cli {

inline constexpr const char* kInstanceVersion = "opnorm-instance/1";

/// Schema or dimension problem; the message starts with the offending field.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class InstanceKind { dec_linf, dec_matrix, cb_linf, free_tensor, mult_domain, selfadjoint_dec };

std::string to_string(InstanceKind kind);
InstanceKind kind_from_string(const std::string& s);

struct InstanceParameters {
  std::optional<int> K;
  std::optional<int> restarts;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<int> samples;
};

struct Instance {
  InstanceKind kind = InstanceKind::dec_linf;
  /// Coefficient algebra for list-valued kinds; codomain for map kinds.
  AlgebraShape codomain;
  /// Map kinds only.
  AlgebraShape domain;
  /// dec_linf, cb_linf, free_tensor, selfadjoint_dec.
  std::vector<AlgebraElement> elements;
  /// dec_matrix, mult_domain.
  LinearMapRep map;
  InstanceParameters parameters;
  /// fnv1a64 of the canonical serialization.
  std::string digest;
};

Instance parse_instance(const nlohmann::json& j);
/// Throws ValidationError when the file is missing or not JSON.
Instance load_instance(const std::string& path);

nlohmann::json instance_to_json(const Instance& inst);

nlohmann::json matrix_to_json(const ComplexMatrix& m);
nlohmann::json element_to_json(const AlgebraElement& x);
ComplexMatrix matrix_from_json(const nlohmann::json& j, int dim, const std::string& where);
AlgebraElement element_from_json(const nlohmann::json& j, const AlgebraShape& shape, const std::string& where);

std::uint64_t fnv1a64(const std::string& bytes);
std::string digest_string(const nlohmann::json& j);

}  // namespace opnorm::cli
