#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "cohcost/errors.hpp"
#include "cohcost/implementation.hpp"
#include "cohcost/numerics.hpp"
#include "cohcost/quantum.hpp"

namespace cohcost {

namespace detail {

inline ComplexMatrix matrix_from_json(const nlohmann::json& j, std::size_t d, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) throw ValidationError(std::string("model: missing array '") + key + "'");
  const auto& arr = j[key];
  if (arr.size() != d * d)
    throw ValidationError(std::string("model: '") + key + "' must have d_S*d_S = " + std::to_string(d * d) +
                          " entries");
  std::vector<cplx> data;
  data.reserve(d * d);
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw ValidationError(std::string("model: entries of '") + key + "' must be [re, im] pairs");
    data.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return ComplexMatrix(d, d, std::move(data));
}

inline nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& z : m.data()) arr.push_back({z.real(), z.imag()});
  return arr;
}

}  // namespace detail

/// Parses {"d_S": int, "A_S": [[re,im],...], "U_S": [[re,im],...]} (row-major).
inline TargetSpec model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("d_S") || !j["d_S"].is_number_integer())
    throw ValidationError("model: missing integer 'd_S'");
  const auto d = j["d_S"].get<long long>();
  if (d < 1) throw ValidationError("model: d_S must be positive");
  const auto ds = static_cast<std::size_t>(d);
  return TargetSpec(HermitianObservable(detail::matrix_from_json(j, ds, "A_S")),
                    UnitaryGate(detail::matrix_from_json(j, ds, "U_S")));
}

inline nlohmann::json model_to_json(const TargetSpec& t) {
  return {{"d_S", t.d_S()}, {"A_S", detail::matrix_to_json(t.A_S.mat())}, {"U_S", detail::matrix_to_json(t.U_S.mat())}};
}

inline TargetSpec load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("model file '" + path + "' is not valid JSON: " + e.what());
  }
  return model_from_json(j);
}

/// A_S = (|1><1| - |0><0|)/2, U_S = X.
inline TargetSpec bitflip_model() {
  return TargetSpec(HermitianObservable::diagonal({-0.5, 0.5}),
                    UnitaryGate(ComplexMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}})));
}

/// A_S = (|1><1| - |0><0|)^(x)2 with U'_S = |00><00| + |01><01| + |11><10| + |10><11|.
inline TargetSpec erasure_model() {
  ComplexMatrix u(4, 4);
  u(0, 0) = 1.0;
  u(1, 1) = 1.0;
  u(3, 2) = 1.0;
  u(2, 3) = 1.0;
  ComplexMatrix z = ComplexMatrix::diagonal(std::vector<double>{-1.0, 1.0});
  return TargetSpec(HermitianObservable(kron(z, z)), UnitaryGate(std::move(u)));
}

inline TargetSpec builtin_model(const std::string& name) {
  if (name == "bitflip") return bitflip_model();
  if (name == "erasure") return erasure_model();
  throw ValidationError("unknown builtin model '" + name + "' (expected bitflip or erasure)");
}

}  // namespace cohcost
