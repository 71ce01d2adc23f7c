#pragma once

// JSON form of a jet: {"order": n, "coeffs": [[i, j, value], ...]} with only
// the nonzero coefficients listed. Doubles are stored as JSON numbers (the
// serializer emits shortest round-tripping decimals); rationals as "p/q"
// strings, so both scalar types re-import equal to the original.

#include <json.hpp>

#include "germlab/jet.hpp"

namespace germlab {

inline nlohmann::json jet_to_json(const Jet<double>& f) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (int d = 0; d <= f.order(); ++d)
    for (int j = 0; j <= d; ++j)
      if (f.coeff(d - j, j) != 0.0) coeffs.push_back({d - j, j, f.coeff(d - j, j)});
  return {{"order", f.order()}, {"coeffs", coeffs}};
}

inline nlohmann::json jet_to_json(const Jet<Rational>& f) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (int d = 0; d <= f.order(); ++d)
    for (int j = 0; j <= d; ++j)
      if (f.coeff(d - j, j) != 0) coeffs.push_back({d - j, j, rational_string(f.coeff(d - j, j))});
  return {{"order", f.order()}, {"coeffs", coeffs}};
}

namespace detail {

inline void parse_jet_header(const nlohmann::json& j, int& order) {
  if (!j.is_object() || !j.contains("order") || !j.contains("coeffs") ||
      !j["coeffs"].is_array())
    throw std::runtime_error("jet JSON must be {order, coeffs: [[i,j,value],...]}");
  order = j["order"].get<int>();
}

}  // namespace detail

inline Jet<double> jet_from_json(const nlohmann::json& j) {
  int order = 0;
  detail::parse_jet_header(j, order);
  Jet<double> f(order);
  for (const auto& e : j["coeffs"]) {
    if (!e.is_array() || e.size() != 3)
      throw std::runtime_error("jet JSON coefficient entries must be [i, j, value]");
    f.set(e[0].get<int>(), e[1].get<int>(),
          e[2].is_string() ? to_double(parse_rational(e[2].get<std::string>()))
                           : e[2].get<double>());
  }
  return f;
}

inline Jet<Rational> rational_jet_from_json(const nlohmann::json& j) {
  int order = 0;
  detail::parse_jet_header(j, order);
  Jet<Rational> f(order);
  for (const auto& e : j["coeffs"]) {
    if (!e.is_array() || e.size() != 3)
      throw std::runtime_error("jet JSON coefficient entries must be [i, j, value]");
    if (!e[2].is_string())
      throw std::runtime_error("rational jet JSON stores coefficients as \"p/q\" strings");
    f.set(e[0].get<int>(), e[1].get<int>(), parse_rational(e[2].get<std::string>()));
  }
  return f;
}

}  // namespace germlab
