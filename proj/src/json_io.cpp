#include "bcheun/json_io.hpp"

#include <cstdio>

#include "bcheun/errors.hpp"

namespace bcheun::json_io {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorCode::InvalidArgument, "complex value must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json params_to_json(const BcHeunParams& p) {
  return json{{"gamma", complex_to_json(p.gamma)},
              {"delta", complex_to_json(p.delta)},
              {"epsilon", complex_to_json(p.epsilon)},
              {"alpha", complex_to_json(p.alpha)},
              {"q", complex_to_json(p.q)}};
}

BcHeunParams params_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "parameter set must be a JSON object");
  auto field = [&](const char* name) {
    if (!j.contains(name)) throw Error(ErrorCode::InvalidArgument, std::string("missing parameter '") + name + "'");
    return complex_from_json(j.at(name));
  };
  return {field("gamma"), field("delta"), field("epsilon"), field("alpha"), field("q")};
}

json series_to_json(const frobenius::FrobeniusSeries& s) {
  json coeffs = json::array();
  for (const auto& c : s.coeffs) coeffs.push_back(complex_to_json(c));
  json j{{"center", complex_to_json(s.center)}, {"mu", complex_to_json(s.mu)}, {"coeffs", coeffs}};
  if (s.band > 0) j["band"] = s.band;
  return j;
}

frobenius::FrobeniusSeries series_from_json(const json& j) {
  if (!j.is_object() || !j.contains("center") || !j.contains("mu") || !j.contains("coeffs") ||
      !j.at("coeffs").is_array())
    throw Error(ErrorCode::InvalidArgument, "series needs center, mu and coeffs");
  frobenius::FrobeniusSeries s;
  s.center = complex_from_json(j.at("center"));
  s.mu = complex_from_json(j.at("mu"));
  for (const auto& c : j.at("coeffs")) s.coeffs.push_back(complex_from_json(c));
  if (j.contains("band")) s.band = j.at("band").get<int>();
  return s;
}

json solution_to_json(const expansions::ExpansionSolution& s) {
  auto series = s.series;
  series.coeffs.resize(static_cast<std::size_t>(s.N) + 1);
  return json{{"kind", std::string(expansions::to_string(s.kind))},
              {"params", params_to_json(s.params)},
              {"series", series_to_json(series)},
              {"c0", complex_to_json(s.c0)},
              {"c1", complex_to_json(s.c1)},
              {"N", s.N},
              {"z_ref", complex_to_json(s.z_ref)},
              {"valid_region", {{"description", s.valid_region}, {"radius", s.radius}}}};
}

json certificate_to_json(const expansions::TerminationCertificate& c) {
  return json{{"N", c.N},
              {"mu", complex_to_json(c.mu)},
              {"params", params_to_json(c.params)},
              {"p_n", complex_to_json(c.p_n)},
              {"tail_norms", c.tail_norms},
              {"global_residual", c.global_residual}};
}

std::string trajectory_csv(const reference::OdeTrajectory& t) {
  std::string out = "z_re,z_im,u_re,u_im,du_re,du_im\n";
  for (std::size_t i = 0; i < t.path.size(); ++i) {
    out += num(t.path[i].real()) + "," + num(t.path[i].imag()) + "," + num(t.u[i].real()) + "," +
           num(t.u[i].imag()) + "," + num(t.du[i].real()) + "," + num(t.du[i].imag()) + "\n";
  }
  return out;
}

}  // namespace bcheun::json_io
