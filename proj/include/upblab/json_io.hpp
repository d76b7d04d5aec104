#pragma once

#include "upblab/product.hpp"

#include <json.hpp>

#include <fstream>

namespace upblab {

using json = nlohmann::json;

inline json to_json(cd z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_json(v(i)));
  return a;
}

inline json to_json(const Mat& M) {
  json a = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(to_json(M(i, j)));
    a.push_back(row);
  }
  return a;
}

inline json to_json(const ProductVector& p) {
  json f = json::array();
  for (const auto& v : p.factors) f.push_back(to_json(v));
  return json{{"factors", f}};
}

inline cd complex_from_json(const json& j) {
  if (j.is_number()) return cd(j.get<double>(), 0.0);
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw InputError("complex number must be [re, im]");
  return cd(j[0].get<double>(), j[1].get<double>());
}

inline Vec vec_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InputError("vector must be a nonempty array");
  Vec v(Eigen::Index(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(Eigen::Index(i)) = complex_from_json(j[i]);
  return v;
}

inline Mat mat_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw InputError("matrix must be an array of rows");
  Mat M(Eigen::Index(j.size()), Eigen::Index(j[0].size()));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != j[0].size()) throw InputError("matrix rows have unequal length");
    for (std::size_t c = 0; c < j[r].size(); ++c) M(Eigen::Index(r), Eigen::Index(c)) = complex_from_json(j[r][c]);
  }
  return M;
}

inline ProductVector product_from_json(const json& j) {
  if (!j.is_object() || !j.contains("factors")) throw InputError("product vector needs \"factors\"");
  ProductVector p;
  for (const auto& f : j.at("factors")) p.factors.push_back(vec_from_json(f));
  if (p.factors.empty()) throw InputError("product vector has no factors");
  for (const auto& f : p.factors)
    if (f.norm() == 0.0) throw InputError("product vector factor is zero");
  return p;
}

struct VectorFile {
  std::vector<int> dims;
  std::vector<ProductVector> vectors;
};

inline json to_json(const VectorFile& f) {
  json vs = json::array();
  for (const auto& v : f.vectors) vs.push_back(to_json(v));
  return json{{"dims", f.dims}, {"vectors", vs}};
}

inline VectorFile vector_file_from_json(const json& j) {
  VectorFile f;
  if (!j.is_object() || !j.contains("dims") || !j.contains("vectors")) throw InputError("expected {\"dims\", \"vectors\"}");
  for (const auto& d : j.at("dims")) {
    if (!d.is_number_integer() || d.get<int>() < 1) throw InputError("dims must be positive integers");
    f.dims.push_back(d.get<int>());
  }
  for (const auto& v : j.at("vectors")) {
    ProductVector p = product_from_json(v);
    if (p.parties() != f.dims.size()) throw InputError("factor count does not match dims");
    for (std::size_t k = 0; k < p.parties(); ++k)
      if (p.factors[k].size() != f.dims[k]) throw InputError("factor dimension does not match dims");
    f.vectors.push_back(std::move(p));
  }
  return f;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON in ") + path + ": " + e.what());
  }
}

}  // namespace upblab
