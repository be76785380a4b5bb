#pragma once
// QSDP instance files (JSON).
//
// {
//   "x_dim": int, "eq_dim": int, "cone_blocks": [int],
//   "Q": [[...]] (x_dim rows), "c": [...],
//   "H": [[...]] (eq_dim rows), "p": [...],
//   "G": [[...]] (x_dim rows; row j is the stacked svec of the block image of e_j),
//   "q": [...] (stacked svec), "f0": number (optional, default 0)
// }

#include "problem.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace ssnsdp {

class FormatError : public Error {
 public:
  using Error::Error;
};

namespace detail {

using nlohmann::json;

inline const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("qsdp file: missing key '") + key + "'");
  return j.at(key);
}

inline Index need_int(const json& j, const char* key) {
  const json& v = need(j, key);
  if (!v.is_number_integer()) throw FormatError(std::string("qsdp file: '") + key + "' must be an integer");
  return v.get<Index>();
}

inline Vector read_vector(const json& j, const char* key, Index len) {
  const json& v = need(j, key);
  if (!v.is_array()) throw FormatError(std::string("qsdp file: '") + key + "' must be an array");
  if (static_cast<Index>(v.size()) != len)
    throw DimensionError(std::string("qsdp file: '") + key + "' has length " + std::to_string(v.size()) +
                         ", expected " + std::to_string(len));
  Vector out(len);
  for (Index i = 0; i < len; ++i) {
    if (!v[i].is_number()) throw FormatError(std::string("qsdp file: non-numeric entry in '") + key + "'");
    out[i] = v[i].get<double>();
  }
  return out;
}

// rows x cols, row-major array of arrays
inline Matrix read_matrix(const json& j, const char* key, Index rows, Index cols) {
  const json& v = need(j, key);
  if (!v.is_array()) throw FormatError(std::string("qsdp file: '") + key + "' must be an array of rows");
  if (static_cast<Index>(v.size()) != rows)
    throw DimensionError(std::string("qsdp file: '") + key + "' has " + std::to_string(v.size()) + " rows, expected " +
                         std::to_string(rows));
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = v[r];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw DimensionError(std::string("qsdp file: row ") + std::to_string(r) + " of '" + key + "' should have " +
                           std::to_string(cols) + " entries");
    for (Index c = 0; c < cols; ++c) {
      if (!row[c].is_number()) throw FormatError(std::string("qsdp file: non-numeric entry in '") + key + "'");
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

inline json write_matrix(const Matrix& m) {
  json a = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    a.push_back(std::move(row));
  }
  return a;
}

inline json write_vector(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

}  // namespace detail

inline QsdpData parse_qsdp(const nlohmann::json& j) {
  using namespace detail;
  QsdpData d;
  d.x_dim = need_int(j, "x_dim");
  d.eq_dim = need_int(j, "eq_dim");
  if (d.x_dim < 1 || d.eq_dim < 0) throw DimensionError("qsdp file: bad x_dim/eq_dim");
  const json& cb = need(j, "cone_blocks");
  if (!cb.is_array()) throw FormatError("qsdp file: 'cone_blocks' must be an array");
  for (const auto& b : cb) {
    if (!b.is_number_integer() || b.get<Index>() < 1) throw FormatError("qsdp file: cone block orders must be positive integers");
    d.cone_blocks.push_back(b.get<Index>());
  }
  const Index sg = svec_size(d.cone_blocks);
  const Matrix q = read_matrix(j, "Q", d.x_dim, d.x_dim);
  d.Q = q.sparseView();
  d.c = read_vector(j, "c", d.x_dim);
  d.H = read_matrix(j, "H", d.eq_dim, d.x_dim).sparseView();
  d.p = read_vector(j, "p", d.eq_dim);
  d.G = Matrix(read_matrix(j, "G", d.x_dim, sg).transpose()).sparseView();
  d.q = read_vector(j, "q", sg);
  if (j.contains("f0")) {
    if (!j.at("f0").is_number()) throw FormatError("qsdp file: 'f0' must be a number");
    d.f0 = j.at("f0").get<double>();
  }
  validate(d);
  return d;
}

inline QsdpData read_qsdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open qsdp file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("qsdp file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_qsdp(j);
}

inline std::shared_ptr<QsdpProblem> load_qsdp(const std::string& path) {
  return std::make_shared<QsdpProblem>(read_qsdp(path), path);
}

inline nlohmann::json qsdp_to_json(const QsdpData& d) {
  using namespace detail;
  json j;
  j["x_dim"] = d.x_dim;
  j["eq_dim"] = d.eq_dim;
  j["cone_blocks"] = d.cone_blocks;
  j["Q"] = write_matrix(Matrix(d.Q));
  j["c"] = write_vector(d.c);
  j["H"] = write_matrix(Matrix(d.H));
  j["p"] = write_vector(d.p);
  j["G"] = write_matrix(Matrix(Matrix(d.G).transpose()));
  j["q"] = write_vector(d.q);
  if (d.f0 != 0.0) j["f0"] = d.f0;
  return j;
}

inline void save_qsdp(const std::string& path, const QsdpData& d) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << qsdp_to_json(d).dump(1) << '\n';
}

}  // namespace ssnsdp
