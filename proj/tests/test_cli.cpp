#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../tools/cli.hpp"
#include "bcheun/expansions.hpp"
#include "bcheun/json_io.hpp"

using bcheun::cli::run_cli;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

const std::vector<std::string> kParams{"--gamma", "0.5", "--delta", "0.3", "--epsilon", "1",
                                       "--alpha", "1.2", "--q",     "0.7"};

std::vector<std::string> with_params(std::vector<std::string> head, std::vector<std::string> tail = {}) {
  head.insert(head.end(), kParams.begin(), kParams.end());
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("eval outside the region needs --allow-outside") {
  auto r = run(with_params({"eval", "--method", "beta_single"}, {"--z", "1.5,0"}));
  CHECK(r.code == 1);
  CHECK(r.err.find("outside validity region") != std::string::npos);
  r = run(with_params({"eval", "--method", "beta_single"}, {"--z", "1.5,0", "--allow-outside"}));
  CHECK(r.code != 1);
}

TEST_CASE("eval csv with origin-series comparison") {
  const auto r = run(with_params({"eval", "--method", "beta_single", "--order", "60"},
                                 {"--z", "0.25,0", "--z", "0.28,0.03", "--compare", "origin_series"}));
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0][0] == "z_re");
  CHECK(rows[0].back() == "oracle_rel_diff");
  const auto pos = r.out.find("# max_rel_diff,");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(r.out.substr(pos + 15)) <= 1e-7);
}

TEST_CASE("eval quadrature with c2 = 0 is constant") {
  const auto r = run({"eval", "--method", "quadrature", "--gamma", "0.4", "--delta", "0.2", "--epsilon", "1",
                      "--alpha", "0", "--q", "0", "--c1", "2", "--c2", "0", "--grid", "0.2:1:5@0.3"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::stod(rows[i][2]) == 2.0);
    CHECK(std::stod(rows[i][3]) == 0.0);
  }
}

TEST_CASE("eval json output") {
  const auto r = run(with_params({"eval", "--method", "gamma_delta", "--output", "json"}, {"--z", "0.2,0.1"}));
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("rows").size() == 1);
}

TEST_CASE("converge shows residual decay") {
  const auto r = run(with_params({"converge", "--method", "beta_single", "--orders", "5,10,20,40"}, {"--z", "0.3,0.02"}));
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 5);
  CHECK(std::stod(rows[4][1]) <= 1e-4 * std::stod(rows[1][1]));
}

TEST_CASE("converge at terminating parameters stays flat") {
  const auto found = bcheun::expansions::find_terminating_params(0.5, 1.0, 1, 1.0, 1.0);
  REQUIRE(found.found);
  const auto path = std::filesystem::temp_directory_path() / "bcheun_term_params.json";
  {
    std::ofstream f(path);
    f << bcheun::json_io::params_to_json(found.params).dump();
  }
  const auto z0 = found.params.q / found.params.alpha;
  const std::string zs = bcheun::json_io::num(0.4 * z0.real()) + "," + bcheun::json_io::num(0.4 * z0.imag());
  const auto r = run({"converge", "--method", "beta_single", "--params", path.string(), "--orders", "1,2,5,10",
                      "--z", zs});
  std::filesystem::remove(path);
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 5);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][1]) <= 1e-10);
}

TEST_CASE("non-admissible parameters exit 1") {
  const auto r = run({"eval", "--method", "beta_single", "--gamma", "0.5", "--delta", "0.3", "--epsilon", "1",
                      "--alpha", "0", "--q", "0.7", "--z", "0.2,0"});
  CHECK(r.code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run(with_params({"eval", "--method", "nonsense"}, {"--z", "0.2,0"})).code == 1);
}

TEST_CASE("recurrence-check") {
  auto r = run(with_params({"recurrence-check", "--kind", "v12"}));
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out).is_object());
  r = run(with_params({"recurrence-check", "--kind", "w23"}));
  CHECK(r.code == 2);
}

TEST_CASE("terminate") {
  const auto r = run({"terminate", "--gamma", "0.5", "--epsilon", "1", "--N", "1"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("found").get<bool>());
  for (const auto& t : j.at("certificate").at("tail_norms")) CHECK(t.get<double>() <= 1e-12);
}

TEST_CASE("trajectory") {
  const auto r = run(with_params({"trajectory"}, {"--z", "0.3,0.1"}));
  CHECK(r.code == 0);
  CHECK(r.out.rfind("z_re,z_im,u_re,u_im,du_re,du_im", 0) == 0);
}
