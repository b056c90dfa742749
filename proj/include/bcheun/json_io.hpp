#pragma once

#include <string>

#include <json.hpp>

#include "bcheun/expansions.hpp"
#include "bcheun/frobenius.hpp"
#include "bcheun/model.hpp"
#include "bcheun/reference.hpp"

namespace bcheun::json_io {

using nlohmann::json;

// Complex numbers are [re, im] pairs throughout.
json complex_to_json(Complex z);
Complex complex_from_json(const json& j);

json params_to_json(const BcHeunParams& p);
BcHeunParams params_from_json(const json& j);

json series_to_json(const frobenius::FrobeniusSeries& s);
frobenius::FrobeniusSeries series_from_json(const json& j);

json solution_to_json(const expansions::ExpansionSolution& s);
json certificate_to_json(const expansions::TerminationCertificate& c);

/// Fixed columns z_re,z_im,u_re,u_im,du_re,du_im; %.17g formatting.
std::string trajectory_csv(const reference::OdeTrajectory& t);

/// "%.17g" rendering shared by every text output.
std::string num(double x);

}  // namespace bcheun::json_io
