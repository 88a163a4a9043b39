// Copyright 2026 The tickbound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON model files.
//
//   {
//     "schema_version": "tickbound-model/1",
//     "dim": 2,
//     "hamiltonian": [[[re, im], ...], ...],        row-major
//     "notick_lindblad_ops": [matrix, ...],
//     "tick_jumps": [matrix, ...],
//     "initial_state": matrix,
//     "metadata": {"name": "...", "provenance": {...}}
//   }
//
// Every real is written with 17 significant digits ("%.16e"), so parsing a
// serialized model reproduces it bit for bit. Analytic families use
//   {"schema_version": "tickbound-oracle/1", "family": "erlang", "gamma": 1, "m": 4}
//   {"schema_version": "tickbound-oracle/1", "family": "heaviside", "gamma": 1, "t0": 3.5}

#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tickbound/clock_model.hpp"
#include "tickbound/oracles.hpp"

namespace tickbound {

inline constexpr const char* kModelSchema = "tickbound-model/1";
inline constexpr const char* kOracleSchema = "tickbound-oracle/1";

using Json = nlohmann::ordered_json;

struct ModelDocument {
  std::string schema_version = kModelSchema;
  Eigen::Index dim = 0;
  ComplexMatrix hamiltonian;
  std::vector<ComplexMatrix> notick_lindblad_ops;
  std::vector<ComplexMatrix> tick_jumps;
  ComplexMatrix initial_state;
  std::string name;
  Json provenance = Json::object();
};

struct OracleDocument {
  std::string family;  // "erlang" or "heaviside"
  ErlangOracle erlang;
  HeavisideOracle heaviside;
};

/// "%.16e" for finite values; JSON has no representation for the rest.
inline std::string format_real_exact(double v) {
  if (!std::isfinite(v)) {
    throw Error(ErrorKind::kNonFinite, "cannot encode a non-finite number in JSON");
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

/// "%.<digits>g"; non-finite values become JSON null.
inline std::string format_real(double v, int digits = 12) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

namespace detail {

// nlohmann's own dump prints the shortest round-trip form, which can be fewer
// than 17 digits; this writer keeps the structure and fixes the float format.
inline void write_json(const Json& j, std::string& out, int indent, int depth, int digits) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string pad_close(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad + Json(it.key()).dump() + (indent > 0 ? ": " : ":");
        // Embedded model documents keep full precision inside reports.
        write_json(it.value(), out, indent, depth + 1, it.key() == "document" ? 17 : digits);
      }
      out += nl + pad_close + "}";
      return;
    }
    case Json::value_t::array: {
      // Arrays of scalars stay on one line: matrices remain readable.
      bool flat = true;
      for (const auto& v : j) flat = flat && !v.is_structured();
      bool nested_flat = true;
      for (const auto& v : j) {
        if (!v.is_array()) nested_flat = false;
        else
          for (const auto& w : v) nested_flat = nested_flat && !w.is_structured();
      }
      if (flat || nested_flat || indent == 0) {
        out += "[";
        bool first = true;
        for (const auto& v : j) {
          if (!first) out += ", ";
          first = false;
          write_json(v, out, 0, 0, digits);
        }
        out += "]";
        return;
      }
      out += "[";
      out += nl;
      bool first = true;
      for (const auto& v : j) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        write_json(v, out, indent, depth + 1, digits);
      }
      out += nl + pad_close + "]";
      return;
    }
    case Json::value_t::number_float:
      out += digits >= 17 ? format_real_exact(j.get<double>()) : format_real(j.get<double>(), digits);
      return;
    default:
      out += j.dump();
      return;
  }
}

inline Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

[[noreturn]] inline void malformed(const std::string& what) {
  throw Error(ErrorKind::kMalformedDocument, what);
}

inline double json_real(const Json& v, const std::string& where) {
  if (!v.is_number()) malformed(where + " is not a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw Error(ErrorKind::kNonFinite, where + " is not finite");
  return x;
}

inline ComplexMatrix json_to_matrix(const Json& j, Eigen::Index dim, const std::string& where) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != dim) {
    malformed(where + " must be an array of " + std::to_string(dim) + " rows");
  }
  ComplexMatrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    const std::string row_name = where + "[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
      malformed(row_name + " must have " + std::to_string(dim) + " entries");
    }
    for (Eigen::Index k = 0; k < dim; ++k) {
      const Json& z = row[static_cast<std::size_t>(k)];
      const std::string name = row_name + "[" + std::to_string(k) + "]";
      if (!z.is_array() || z.size() != 2) malformed(name + " must be a pair [re, im]");
      m(i, k) = Complex(json_real(z[0], name + ".re"), json_real(z[1], name + ".im"));
    }
  }
  return m;
}

inline std::vector<ComplexMatrix> json_to_matrix_list(const Json& j, Eigen::Index dim,
                                                      const std::string& where) {
  if (!j.is_array()) malformed(where + " must be an array of matrices");
  std::vector<ComplexMatrix> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    out.push_back(json_to_matrix(j[k], dim, where + "[" + std::to_string(k) + "]"));
  }
  return out;
}

inline const Json& require_key(const Json& j, const char* key) {
  if (!j.contains(key)) malformed(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

}  // namespace detail

/// JSON text with `digits` significant digits per real (17 = bit exact).
/// Values under a "document" key are always written bit exact.
/// indent = 0 gives one line.
inline std::string dump_json(const Json& j, int indent = 2, int digits = 17) {
  std::string out;
  detail::write_json(j, out, indent, 0, digits);
  out += "\n";
  return out;
}

inline ModelDocument serialize_model(const ClockModel& model, Json provenance = Json::object()) {
  ModelDocument doc;
  doc.dim = model.dim();
  doc.hamiltonian = model.hamiltonian();
  doc.notick_lindblad_ops = model.notick_lindblad_ops();
  doc.tick_jumps = model.tick_jumps();
  doc.initial_state = model.initial_state().matrix();
  doc.name = model.name();
  doc.provenance = std::move(provenance);
  return doc;
}

inline Json document_to_json(const ModelDocument& doc) {
  Json j = Json::object();
  j["schema_version"] = doc.schema_version;
  j["dim"] = doc.dim;
  j["hamiltonian"] = detail::matrix_to_json(doc.hamiltonian);
  j["notick_lindblad_ops"] = Json::array();
  for (const auto& m : doc.notick_lindblad_ops) {
    j["notick_lindblad_ops"].push_back(detail::matrix_to_json(m));
  }
  j["tick_jumps"] = Json::array();
  for (const auto& m : doc.tick_jumps) j["tick_jumps"].push_back(detail::matrix_to_json(m));
  j["initial_state"] = detail::matrix_to_json(doc.initial_state);
  j["metadata"] = {{"name", doc.name}, {"provenance", doc.provenance}};
  return j;
}

inline std::string model_document_text(const ModelDocument& doc) {
  return dump_json(document_to_json(doc));
}

inline ModelDocument json_to_document(const Json& j) {
  if (!j.is_object()) detail::malformed("model document must be a JSON object");
  const Json& schema = detail::require_key(j, "schema_version");
  if (!schema.is_string()) detail::malformed("schema_version must be a string");
  if (schema.get<std::string>() != kModelSchema) {
    throw Error(ErrorKind::kSchemaVersionUnsupported,
                "schema_version \"" + schema.get<std::string>() + "\", expected \"" +
                    kModelSchema + "\"");
  }
  ModelDocument doc;
  const Json& dim = detail::require_key(j, "dim");
  if (!dim.is_number_integer() || dim.get<long long>() < 1) {
    detail::malformed("dim must be a positive integer");
  }
  doc.dim = dim.get<Eigen::Index>();
  doc.hamiltonian = detail::json_to_matrix(detail::require_key(j, "hamiltonian"), doc.dim,
                                           "hamiltonian");
  doc.notick_lindblad_ops = j.contains("notick_lindblad_ops")
                                ? detail::json_to_matrix_list(j["notick_lindblad_ops"], doc.dim,
                                                              "notick_lindblad_ops")
                                : std::vector<ComplexMatrix>{};
  doc.tick_jumps =
      detail::json_to_matrix_list(detail::require_key(j, "tick_jumps"), doc.dim, "tick_jumps");
  doc.initial_state = detail::json_to_matrix(detail::require_key(j, "initial_state"), doc.dim,
                                             "initial_state");
  if (j.contains("metadata")) {
    const Json& meta = j["metadata"];
    if (!meta.is_object()) detail::malformed("metadata must be an object");
    if (meta.contains("name")) {
      if (!meta["name"].is_string()) detail::malformed("metadata.name must be a string");
      doc.name = meta["name"].get<std::string>();
    }
    if (meta.contains("provenance")) doc.provenance = meta["provenance"];
  }
  return doc;
}

inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::kMalformedDocument, std::string("invalid JSON: ") + e.what());
  }
}

inline ModelDocument parse_model_document(const std::string& text) {
  return json_to_document(parse_json_text(text));
}

/// Builds and validates the model; errors name the offending entry.
inline ClockModel parse_model(const ModelDocument& doc) {
  if (doc.schema_version != kModelSchema) {
    throw Error(ErrorKind::kSchemaVersionUnsupported, "schema_version " + doc.schema_version);
  }
  const ComplexMatrix& h = doc.hamiltonian;
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index k = i; k < h.cols(); ++k) {
      if (std::abs(h(i, k) - std::conj(h(k, i))) > kHermitianTolerance) {
        throw Error(ErrorKind::kNonHermitian,
                    "hamiltonian[" + std::to_string(i) + "][" + std::to_string(k) +
                        "] is not the conjugate of hamiltonian[" + std::to_string(k) + "][" +
                        std::to_string(i) + "]");
      }
    }
  }
  const ComplexMatrix& rho = doc.initial_state;
  for (Eigen::Index i = 0; i < rho.rows(); ++i) {
    for (Eigen::Index k = i; k < rho.cols(); ++k) {
      if (std::abs(rho(i, k) - std::conj(rho(k, i))) > kHermitianTolerance) {
        throw Error(ErrorKind::kNonHermitian,
                    "initial_state[" + std::to_string(i) + "][" + std::to_string(k) +
                        "] is not the conjugate of initial_state[" + std::to_string(k) + "][" +
                        std::to_string(i) + "]");
      }
    }
  }
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > kTraceTolerance) {
    throw Error(ErrorKind::kInvalidState, "initial_state trace " + format_real_exact(tr) + " != 1");
  }
  return ClockModel(doc.hamiltonian, doc.notick_lindblad_ops, doc.tick_jumps, doc.initial_state,
                    doc.name);
}

inline ClockModel parse_model_text(const std::string& text) {
  return parse_model(parse_model_document(text));
}

inline OracleDocument json_to_oracle(const Json& j) {
  OracleDocument doc;
  const Json& fam = detail::require_key(j, "family");
  if (!fam.is_string()) detail::malformed("family must be a string");
  doc.family = fam.get<std::string>();
  const double gamma = detail::json_real(detail::require_key(j, "gamma"), "gamma");
  if (doc.family == "erlang") {
    const Json& m = detail::require_key(j, "m");
    if (!m.is_number_integer()) detail::malformed("m must be an integer");
    doc.erlang = ErlangOracle{gamma, m.get<int>()};
    doc.erlang.validate();
  } else if (doc.family == "heaviside") {
    doc.heaviside = HeavisideOracle{gamma, detail::json_real(detail::require_key(j, "t0"), "t0")};
    doc.heaviside.validate();
  } else {
    detail::malformed("unknown oracle family \"" + doc.family + "\"");
  }
  return doc;
}

inline Json oracle_to_json(const OracleDocument& doc) {
  Json j = {{"schema_version", kOracleSchema}, {"family", doc.family}};
  if (doc.family == "erlang") {
    j["gamma"] = doc.erlang.gamma;
    j["m"] = doc.erlang.m;
  } else {
    j["gamma"] = doc.heaviside.gamma;
    j["t0"] = doc.heaviside.t0;
  }
  return j;
}

/// Either kind of input file, dispatched on schema_version.
using AnyDocument = std::variant<ModelDocument, OracleDocument>;

inline AnyDocument parse_any_document(const std::string& text) {
  const Json j = parse_json_text(text);
  if (!j.is_object()) detail::malformed("document must be a JSON object");
  const Json& schema = detail::require_key(j, "schema_version");
  if (schema.is_string() && schema.get<std::string>() == kOracleSchema) return json_to_oracle(j);
  return json_to_document(j);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kMalformedDocument, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kInvalidArgument, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::kInvalidArgument, "write failed for " + path);
}

}  // namespace tickbound
