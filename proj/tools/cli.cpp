#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bcheun/errors.hpp"
#include "bcheun/expansions.hpp"
#include "bcheun/frobenius.hpp"
#include "bcheun/json_io.hpp"
#include "bcheun/model.hpp"
#include "bcheun/reference.hpp"

namespace bcheun::cli {

namespace {

using json_io::json;
using json_io::num;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Complex parse_complex(const std::string& s) {
  std::string t = s;
  t.erase(std::remove(t.begin(), t.end(), ' '), t.end());
  const auto comma = t.find(',');
  try {
    std::size_t used = 0;
    if (comma == std::string::npos) {
      const double re = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return {re, 0.0};
    }
    const std::string a = t.substr(0, comma), b = t.substr(comma + 1);
    const double re = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(t);
    const double im = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(t);
    return {re, im};
  } catch (const std::exception&) {
    throw UsageError("cannot parse complex value '" + s + "' (expected \"re,im\")");
  }
}

struct RunConfig {
  std::string params_file;
  std::string gamma, delta, epsilon, alpha, q;
  std::string method = "beta_single";
  int order = 60;
  std::vector<std::string> z_list;
  std::string grid;
  std::string output = "csv";
  std::string compare;
  bool allow_outside = false;
  std::string root = "z1";
  std::string c1 = "1";
  std::string c2 = "0";
  bool meta = false;
  bool trajectory = false;
};

void add_common(CLI::App* app, RunConfig& cfg) {
  app->add_option("--params", cfg.params_file, "JSON parameter file");
  app->add_option("--gamma", cfg.gamma, "\"re,im\"");
  app->add_option("--delta", cfg.delta, "\"re,im\"");
  app->add_option("--epsilon", cfg.epsilon, "\"re,im\"");
  app->add_option("--alpha", cfg.alpha, "\"re,im\"");
  app->add_option("--q", cfg.q, "\"re,im\"");
  app->add_flag("--meta", cfg.meta, "write a run record to stderr");
}

void add_points(CLI::App* app, RunConfig& cfg) {
  app->add_option("--method", cfg.method,
                  "beta_single|beta_double|gamma_delta|gamma_eps|origin_series|integrate|"
                  "closed_form_eps0|quadrature|quadrature_special");
  app->add_option("--order", cfg.order, "truncation order N")->check(CLI::NonNegativeNumber);
  app->add_option("--z", cfg.z_list, "evaluation point \"re,im\" (repeatable)");
  app->add_option("--grid", cfg.grid, "radial grid r0:r1:steps@arg");
  app->add_option("--output", cfg.output, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--compare", cfg.compare, "oracle to compare against (origin_series)");
  app->add_flag("--allow-outside", cfg.allow_outside, "evaluate outside the validity region");
  app->add_option("--root", cfg.root, "z1|z2 for beta_double")->check(CLI::IsMember({"z1", "z2"}));
  app->add_option("--c1", cfg.c1, "first constant for the closed-form methods");
  app->add_option("--c2", cfg.c2, "second constant for the closed-form methods");
}

BcHeunParams load_params(const RunConfig& cfg) {
  BcHeunParams p{};
  if (!cfg.params_file.empty()) {
    std::ifstream in(cfg.params_file);
    if (!in) throw UsageError("cannot open parameter file " + cfg.params_file);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw UsageError(std::string("invalid JSON in parameter file: ") + e.what());
    }
    p = json_io::params_from_json(j);
  }
  if (!cfg.gamma.empty()) p.gamma = parse_complex(cfg.gamma);
  if (!cfg.delta.empty()) p.delta = parse_complex(cfg.delta);
  if (!cfg.epsilon.empty()) p.epsilon = parse_complex(cfg.epsilon);
  if (!cfg.alpha.empty()) p.alpha = parse_complex(cfg.alpha);
  if (!cfg.q.empty()) p.q = parse_complex(cfg.q);
  return p;
}

std::vector<Complex> load_points(const RunConfig& cfg) {
  std::vector<Complex> zs;
  for (const auto& s : cfg.z_list) zs.push_back(parse_complex(s));
  if (!cfg.grid.empty()) {
    // r0:r1:steps@arg -> steps points z = r e^{i arg}, r evenly spaced from r0 to r1.
    const auto at = cfg.grid.find('@');
    const std::string radial = cfg.grid.substr(0, at);
    double arg = 0.0;
    std::vector<std::string> parts;
    std::stringstream ss(radial);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    try {
      if (at != std::string::npos) arg = std::stod(cfg.grid.substr(at + 1));
      if (parts.size() != 3) throw std::invalid_argument(cfg.grid);
      const double r0 = std::stod(parts[0]), r1 = std::stod(parts[1]);
      const int steps = std::stoi(parts[2]);
      if (steps < 1) throw std::invalid_argument(cfg.grid);
      for (int i = 0; i < steps; ++i) {
        const double r = steps == 1 ? r0 : r0 + (r1 - r0) * i / (steps - 1);
        zs.push_back(std::polar(r, arg));
      }
    } catch (const std::invalid_argument&) {
      throw UsageError("bad --grid '" + cfg.grid + "' (expected r0:r1:steps@arg)");
    } catch (const std::out_of_range&) {
      throw UsageError("bad --grid '" + cfg.grid + "'");
    }
  }
  if (zs.empty()) throw UsageError("no evaluation points (use --z or --grid)");
  return zs;
}

struct PointResult {
  Complex z;
  Jet jet;
  double residual = 0.0;
  int terms_used = 0;
  bool converged = true;
};

struct Method {
  std::function<PointResult(Complex)> at;
  Complex branch_ref = 1.0;
};

double series_tail(const reference::OriginSeries& s, Complex z) {
  double mx = 0.0, last = 0.0;
  Complex zn = 1.0;
  for (std::size_t n = 0; n < s.coeffs.size(); ++n) {
    const double t = std::abs(s.coeffs[n] * zn);
    mx = std::max(mx, t);
    if (n + 2 >= s.coeffs.size()) last = std::max(last, t);
    zn *= z;
  }
  return mx > 0.0 ? last / mx : 0.0;
}

Method make_method(const RunConfig& cfg, const BcHeunParams& p, int N, std::vector<Complex>* path_hint) {
  Method m;
  auto finish = [&p](Complex z, const Jet& j, int terms, bool conv) {
    return PointResult{z, j, residual(p, z, j).relative, terms, conv};
  };
  if (auto kind = expansions::parse_kind(cfg.method)) {
    const auto root = cfg.root == "z2" ? expansions::RootChoice::Z2 : expansions::RootChoice::Z1;
    auto sol = std::make_shared<expansions::ExpansionSolution>(expansions::expand(*kind, p, N, root));
    const bool outside = cfg.allow_outside;
    m.branch_ref = sol->branch_ref;
    m.at = [sol, outside, finish](Complex z) {
      const auto e = sol->evaluate(z, outside);
      return finish(z, e.jet, e.terms_used, e.converged);
    };
    return m;
  }
  const Complex c1 = parse_complex(cfg.c1), c2 = parse_complex(cfg.c2);
  if (cfg.method == "origin_series") {
    auto s = std::make_shared<reference::OriginSeries>(reference::origin_series(p, N));
    m.at = [s, finish, N](Complex z) {
      return finish(z, s->eval(z), N + 1, series_tail(*s, z) <= 1e-14);
    };
  } else if (cfg.method == "closed_form_eps0") {
    m.at = [p, c1, c2, finish](Complex z) { return finish(z, reference::closed_form_eps0(p, z, c1, c2), 0, true); };
  } else if (cfg.method == "quadrature") {
    m.at = [p, c1, c2, finish](Complex z) {
      return finish(z, reference::quadrature_alpha_q_zero(p, z, c1, c2), 0, true);
    };
  } else if (cfg.method == "quadrature_special") {
    m.at = [p, c1, c2, finish](Complex z) {
      return finish(z, expansions::quadrature_special(p, z, c1, c2), 0, true);
    };
  } else if (cfg.method == "integrate") {
    // Seeded from the exponent-0 origin series near the origin, then continued through the
    // points in input order.
    const Complex scale = p.alpha != 0.0 ? p.q / p.alpha : Complex{1.0};
    const Complex zb = 0.2 * (path_hint && !path_hint->empty() ? path_hint->front() / std::abs(path_hint->front())
                                                                  : Complex{1.0}) *
                       std::abs(scale);
    const auto seed = reference::origin_series(p, std::max(N, 200)).eval(zb);
    struct State {
      Complex z;
      Complex u, du;
    };
    auto st = std::make_shared<State>(State{zb, seed.u, seed.du});
    m.at = [p, st, finish](Complex z) {
      const auto tr = reference::integrate(p, st->z, st->u, st->du, z);
      *st = {z, tr.final_u(), tr.final_du()};
      const Complex d2 = -(p.gamma / z + p.delta + p.epsilon * z) * st->du - (p.alpha * z - p.q) / z * st->u;
      return finish(z, Jet{st->u, st->du, d2}, tr.steps, true);
    };
  } else {
    throw UsageError("unknown method '" + cfg.method + "'");
  }
  return m;
}

// Origin-series basis fitted to (u, u') at the first point; returns relative differences.
std::vector<double> compare_with_origin(const BcHeunParams& p, const std::vector<PointResult>& rows, int N,
                                        Complex ref) {
  const int order = std::max(N, 200);
  const auto f = reference::origin_series(p, order);
  std::optional<reference::OriginSeries> g;
  try {
    g = reference::origin_series(p, order, 1.0 - p.gamma);
  } catch (const Error&) {
  }
  const Complex z1 = rows.front().z;
  const Jet F = f.eval(z1);
  Complex cf = rows.front().jet.u / F.u, cg = 0.0;
  if (g && std::abs(1.0 - p.gamma) > 1e-12) {
    const Jet G = g->eval(z1, ref);
    const Complex det = F.u * G.du - G.u * F.du;
    if (det != 0.0) {
      cf = (rows.front().jet.u * G.du - G.u * rows.front().jet.du) / det;
      cg = (F.u * rows.front().jet.du - F.du * rows.front().jet.u) / det;
    }
  }
  std::vector<double> out;
  for (const auto& r : rows) {
    Complex o = cf * f.eval(r.z).u;
    if (cg != 0.0) o += cg * g->eval(r.z, ref).u;
    out.push_back(std::abs(r.jet.u - o) / std::max(std::abs(r.jet.u), 1e-300));
  }
  return out;
}

void write_meta(std::ostream& err, const std::string& command, const RunConfig& cfg) {
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  json j{{"command", command},
         {"method", cfg.method},
         {"order", cfg.order},
         {"unix_time", std::chrono::duration_cast<std::chrono::seconds>(now).count()}};
  err << j.dump() << "\n";
}

int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto p = load_params(cfg);
  auto zs = load_points(cfg);
  if (!cfg.compare.empty() && cfg.compare != "origin_series")
    throw UsageError("unknown oracle '" + cfg.compare + "'");
  if (cfg.meta) write_meta(err, "eval", cfg);

  const auto method = make_method(cfg, p, cfg.order, &zs);
  std::vector<PointResult> rows;
  for (const auto& z : zs) rows.push_back(method.at(z));
  std::vector<double> diffs;
  if (!cfg.compare.empty()) diffs = compare_with_origin(p, rows, cfg.order, method.branch_ref);
  const bool all_conv = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.converged; });

  if (cfg.output == "json") {
    json arr = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      json row{{"z", json_io::complex_to_json(r.z)},
               {"u", json_io::complex_to_json(r.jet.u)},
               {"du", json_io::complex_to_json(r.jet.du)},
               {"residual", r.residual},
               {"terms_used", r.terms_used},
               {"converged", r.converged}};
      if (!diffs.empty()) row["oracle_rel_diff"] = diffs[i];
      arr.push_back(row);
    }
    json doc{{"method", cfg.method}, {"params", json_io::params_to_json(p)}, {"order", cfg.order}, {"rows", arr}};
    if (!diffs.empty()) doc["max_rel_diff"] = *std::max_element(diffs.begin(), diffs.end());
    out << doc.dump(2) << "\n";
  } else {
    out << "z_re,z_im,u_re,u_im,du_re,du_im,residual,terms_used,converged";
    if (!diffs.empty()) out << ",oracle_rel_diff";
    out << "\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      out << num(r.z.real()) << "," << num(r.z.imag()) << "," << num(r.jet.u.real()) << "," << num(r.jet.u.imag())
          << "," << num(r.jet.du.real()) << "," << num(r.jet.du.imag()) << "," << num(r.residual) << ","
          << r.terms_used << "," << (r.converged ? 1 : 0);
      if (!diffs.empty()) out << "," << num(diffs[i]);
      out << "\n";
    }
    if (!diffs.empty()) out << "# max_rel_diff," << num(*std::max_element(diffs.begin(), diffs.end())) << "\n";
  }
  return all_conv ? kOk : kNotConverged;
}

int cmd_integrate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto p = load_params(cfg);
  const auto zs = load_points(cfg);
  if (cfg.meta) write_meta(err, "trajectory", cfg);
  const Complex scale = p.alpha != 0.0 ? p.q / p.alpha : Complex{1.0};
  const Complex zb = 0.2 * zs.front() / std::abs(zs.front()) * std::abs(scale);
  const auto seed = reference::origin_series(p, std::max(cfg.order, 200)).eval(zb);
  std::vector<Complex> path{zb};
  path.insert(path.end(), zs.begin(), zs.end());
  const auto tr = reference::integrate_path(p, path, seed.u, seed.du);
  out << json_io::trajectory_csv(tr);
  return kOk;
}

int cmd_converge(const RunConfig& cfg, const std::vector<int>& orders, std::ostream& out, std::ostream& err) {
  const auto p = load_params(cfg);
  auto zs = load_points(cfg);
  if (!expansions::parse_kind(cfg.method)) throw UsageError("converge needs one of the four expansion methods");
  if (orders.empty()) throw UsageError("empty --orders list");
  if (cfg.meta) write_meta(err, "converge", cfg);
  out << "N,max_residual,max_rel_diff,converged\n";
  bool last_conv = true;
  for (int N : orders) {
    if (N < 0) throw UsageError("orders must be non-negative");
    const auto method = make_method(cfg, p, N, &zs);
    std::vector<PointResult> rows;
    for (const auto& z : zs) rows.push_back(method.at(z));
    double res = 0.0;
    bool conv = true;
    for (const auto& r : rows) {
      res = std::max(res, r.residual);
      conv = conv && r.converged;
    }
    const auto diffs = compare_with_origin(p, rows, N, method.branch_ref);
    out << N << "," << num(res) << "," << num(*std::max_element(diffs.begin(), diffs.end())) << ","
        << (conv ? 1 : 0) << "\n";
    last_conv = conv;
  }
  return last_conv ? kOk : kNotConverged;
}

int cmd_recurrence_check(const RunConfig& cfg, const std::string& kind, int n_max, std::ostream& out,
                         std::ostream& err) {
  const auto p = load_params(cfg);
  if (cfg.meta) write_meta(err, "recurrence-check", cfg);
  const double tol = 1e-12;
  auto rel = [](Complex a, Complex b, double scale) { return std::abs(a - b) / std::max(scale, 1e-300); };
  json report{{"kind", kind}, {"n_max", n_max}, {"tolerance", tol}};
  bool ok = true;
  if (kind == "v12") {
    const auto ode = frobenius::build_local_ode(frobenius::OdeKind::AUX_V12, p);
    const frobenius::ShiftedOde sh(ode, p.q / p.alpha);
    std::array<double, 4> worst{};
    for (int n = 0; n <= n_max; ++n) {
      const auto e = sh.band(2.0, n);
      const auto c = frobenius::closed_form_band_E1(p, 2.0, n);
      for (std::size_t k = 0; k < c.terms.size(); ++k)
        worst[k] = std::max(worst[k], rel(e[static_cast<int>(k)], c.terms[k].second,
                                          std::max(e.magnitudes[k], c.magnitudes[k])));
    }
    report["slots"] = {{"S", worst[0]}, {"R", worst[1]}, {"Q", worst[2]}, {"P", worst[3]}};
    ok = *std::max_element(worst.begin(), worst.end()) <= tol;
  } else if (kind == "w23") {
    const auto s = singular_structure(p);
    const auto ode = frobenius::build_local_ode(frobenius::OdeKind::AUX_W23, p);
    const frobenius::ShiftedOde sh(ode, s.z1);
    const Complex mu = sh.exponents().first;
    double wt = 0.0, wp = 0.0;
    for (int n = 0; n <= n_max; ++n) {
      const auto e = sh.band(mu, n);
      const auto [T, P] = frobenius::printed_five_term_edges(p, s.z1, s.z2, mu, n);
      wt = std::max(wt, rel(e[0], T, std::max(e.magnitudes[0], std::abs(T))));
      if (n >= 4) wp = std::max(wp, rel(e[4], P, std::max(e.magnitudes[4], std::abs(P))));
    }
    report["band"] = sh.width();
    report["mu"] = json_io::complex_to_json(mu);
    report["slots"] = {{"T", wt}, {"P", wp}};
    ok = wt <= tol && wp <= tol;
  } else {
    throw UsageError("--kind must be v12 or w23");
  }
  report["pass"] = ok;
  out << report.dump(2) << "\n";
  return ok ? kOk : kNotConverged;
}

int cmd_terminate(const RunConfig& cfg, int N, const std::string& seed_q, const std::string& seed_delta,
                  std::ostream& out, std::ostream& err) {
  if (cfg.gamma.empty() || cfg.epsilon.empty()) throw UsageError("terminate needs --gamma and --epsilon");
  if (cfg.meta) write_meta(err, "terminate", cfg);
  const auto res = expansions::find_terminating_params(parse_complex(cfg.gamma), parse_complex(cfg.epsilon), N,
                                                       parse_complex(seed_q), parse_complex(seed_delta));
  json doc{{"found", res.found}, {"iterations", res.iterations}, {"reason", res.reason}};
  if (res.found) {
    const auto cert = expansions::check_termination(res.params, expansions::ExpansionKind::BETA_SINGLE, N);
    doc["params"] = json_io::params_to_json(res.params);
    doc["certificate"] = json_io::certificate_to_json(cert.certificate);
  }
  out << doc.dump(2) << "\n";
  return res.found ? kOk : kNotConverged;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Biconfluent Heun solutions by incomplete Beta and Gamma expansions", "bcheun"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::vector<int> orders{5, 10, 20, 40};
  std::string rc_kind = "v12";
  int n_max = 25;
  int term_n = 1;
  std::string seed_q = "1", seed_delta = "1";

  auto* eval = app.add_subcommand("eval", "evaluate a method at points");
  add_common(eval, cfg);
  add_points(eval, cfg);

  auto* traj = app.add_subcommand("trajectory", "integrator trajectory as CSV");
  add_common(traj, cfg);
  add_points(traj, cfg);

  auto* conv = app.add_subcommand("converge", "residual and oracle difference against N");
  add_common(conv, cfg);
  add_points(conv, cfg);
  conv->add_option("--orders", orders, "list of truncation orders")->delimiter(',');

  auto* rec = app.add_subcommand("recurrence-check", "synthesized bands against the closed-form recurrences");
  add_common(rec, cfg);
  rec->add_option("--kind", rc_kind, "v12|w23");
  rec->add_option("--n-max", n_max)->check(CLI::NonNegativeNumber);

  auto* term = app.add_subcommand("terminate", "search for terminating parameters");
  add_common(term, cfg);
  term->add_option("--N", term_n, "terminating order")->check(CLI::PositiveNumber);
  term->add_option("--seed-q", seed_q);
  term->add_option("--seed-delta", seed_delta);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*eval) return cmd_eval(cfg, out, err);
    if (*traj) return cmd_integrate(cfg, out, err);
    if (*conv) return cmd_converge(cfg, orders, out, err);
    if (*rec) return cmd_recurrence_check(cfg, rc_kind, n_max, out, err);
    if (*term) return cmd_terminate(cfg, term_n, seed_q, seed_delta, out, err);
  } catch (const Error& e) {
    const bool numeric = e.code() == ErrorCode::DivergentSeries || e.code() == ErrorCode::StepSizeUnderflow;
    if (e.code() == ErrorCode::OutsideRegion) {
      err << "error: outside validity region (use --allow-outside)\n";
    } else {
      err << "error: " << e.what() << "\n";
    }
    return numeric ? kNotConverged : kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace bcheun::cli
