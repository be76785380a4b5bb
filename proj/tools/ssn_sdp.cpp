// ssn_sdp: run the corrected semismooth Newton method on catalog problems or
// QSDP files, or print the regularity report at a KKT point.
//
//   ssn_sdp run --example ex3 --variant u0 --delta 0.5 --perturb 10 --seed 2
//   ssn_sdp run --example ex5 --format json
//   ssn_sdp check --example ex1 --l1 60 --l2 40
//
// exit codes: 0 ok, 2 bad config / not a KKT point, 3 singular system,
// 4 max_iter or diverged

#include <ssnsdp/ssnsdp.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace ssnsdp;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSingular = 3;
constexpr int kExitNoConv = 4;

struct RunConfig {
  std::string example;
  std::string qsdp;
  CatalogParams cat;
  SolverParams solver;
  std::string variant = "u0";
  double perturb = 10.0;
  std::uint64_t seed = 0;
  bool no_correction = false;
  std::optional<double> start_eps;
  std::string start_file;
  std::string point_file;
  std::string format = "table";
  std::string output;
};

struct Loaded {
  ProblemPtr problem;
  std::optional<KktPoint> z_bar;
  std::string label;
};

Loaded load(const RunConfig& c) {
  Loaded l;
  if (!c.qsdp.empty()) {
    l.problem = load_qsdp(c.qsdp);
    l.label = c.qsdp;
    return l;
  }
  auto e = catalog(c.example, c.cat);
  l.problem = e.problem;
  if (e.solution) l.z_bar = e.solution->z_bar;
  l.label = c.example;
  return l;
}

// {"x": [...], "xi": [...], "gamma": [stacked svec]}
KktPoint read_point(const NlsdpProblem& p, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open point file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError("point file '" + path + "' is not valid JSON: " + e.what());
  }
  auto vec = [&](const char* key, Index len) {
    if (!j.contains(key) || !j[key].is_array()) throw FormatError(std::string("point file: missing array '") + key + "'");
    if (static_cast<Index>(j[key].size()) != len)
      throw DimensionError(std::string("point file: '") + key + "' should have " + std::to_string(len) + " entries");
    Vector v(len);
    for (Index i = 0; i < len; ++i) v[i] = j[key][i].get<double>();
    return v;
  };
  KktPoint z;
  z.x = vec("x", p.x_dim());
  z.xi = vec("xi", p.eq_dim());
  z.gamma = smat_blocks(vec("gamma", p.gamma_dim()), p.cone_blocks());
  return z;
}

std::string sci(double v) {
  if (std::isnan(v)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

// JSON numbers: non-finite values are not representable, use null
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_trace(std::ostream& os, const RunConfig& c, const Loaded& l, const SolveResult& r) {
  if (c.format == "json") {
    json j;
    j["problem"] = l.label;
    j["params"] = {{"delta", c.solver.delta},
                   {"eta", c.solver.eta},
                   {"tau", c.solver.tau},
                   {"variant", c.variant},
                   {"tol", c.solver.tol},
                   {"max_iter", c.solver.max_iter},
                   {"correction", !c.no_correction},
                   {"perturb", c.perturb}};
    if (c.qsdp.empty()) {
      j["params"]["l1"] = c.cat.l1;
      j["params"]["l2"] = c.cat.l2;
      j["params"]["eps"] = c.cat.eps;
    }
    if (c.start_eps) j["params"]["start_eps"] = *c.start_eps;
    j["seed"] = c.seed;
    j["status"] = status_name(r.status);
    json its = json::array();
    for (const auto& t : r.trace)
      its.push_back({{"k", t.k},
                     {"f_norm", num(t.f_norm)},
                     {"dist", t.dist ? num(*t.dist) : json(nullptr)},
                     {"sigma_min", num(t.sigma_min)},
                     {"correction_shift", num(t.correction_shift)},
                     {"newton_residual", num(t.newton_residual)}});
    j["iterations"] = std::move(its);
    os << j.dump(2) << '\n';
    return;
  }
  if (c.format == "csv") {
    os << "seed,k,f_norm,dist,sigma_min,correction_shift,newton_residual\n";
    char buf[256];
    for (const auto& t : r.trace) {
      std::snprintf(buf, sizeof buf, "%llu,%d,%.17g,", static_cast<unsigned long long>(c.seed), t.k, t.f_norm);
      os << buf;
      if (t.dist) {
        std::snprintf(buf, sizeof buf, "%.17g", *t.dist);
        os << buf;
      }
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g\n", t.sigma_min, t.correction_shift, t.newton_residual);
      os << buf;
    }
    return;
  }
  os << "problem " << l.label << "  seed " << c.seed << "  variant " << c.variant << "  delta "
     << (c.no_correction ? std::string("off") : sci(c.solver.delta)) << '\n';
  char buf[160];
  std::snprintf(buf, sizeof buf, "%3s  %10s  %10s  %10s  %10s\n", "k", "|F(Z)|", "|Z-Zbar|", "sigma_min", "shift");
  os << buf;
  for (const auto& t : r.trace) {
    std::snprintf(buf, sizeof buf, "%3d  %10s  %10s  %10s  %10s\n", t.k, sci(t.f_norm).c_str(),
                  t.dist ? sci(*t.dist).c_str() : "-", sci(t.sigma_min).c_str(), sci(t.correction_shift).c_str());
    os << buf;
  }
  os << "status: " << status_name(r.status);
  if (!r.message.empty()) os << " (" << r.message << ')';
  os << '\n';
}

int cmd_run(RunConfig c) {
  c.solver.variant = c.variant == "ui" ? Variant::identity : Variant::zero;
  validate(c.solver);
  const Loaded l = load(c);
  KktPoint z0;
  if (!c.start_file.empty()) {
    z0 = read_point(*l.problem, c.start_file);
  } else if (c.start_eps) {
    if (c.example != "ex7") throw PreconditionError("--start-eps is only defined for ex7");
    z0 = ex7_start(*c.start_eps);
  } else {
    // without a known solution the perturbation is taken around the origin
    z0 = perturbed_start(l.z_bar ? *l.z_bar : zero_point(*l.problem), c.perturb, c.seed);
  }
  const SolveResult r = c.no_correction ? classical_ssn_solve(*l.problem, z0, c.solver, l.z_bar)
                                        : ssn_solve(*l.problem, z0, c.solver, l.z_bar);
  if (c.output.empty()) {
    write_trace(std::cout, c, l, r);
  } else {
    std::ofstream out(c.output);
    if (!out) throw FormatError("cannot write '" + c.output + "'");
    write_trace(out, c, l, r);
  }
  switch (r.status) {
    case SolveStatus::converged: return kExitOk;
    case SolveStatus::singular_system: return kExitSingular;
    default: return kExitNoConv;
  }
}

const char* mark(bool b) { return b ? "yes" : "no"; }

int cmd_check(const RunConfig& c) {
  const Loaded l = load(c);
  KktPoint z;
  if (!c.point_file.empty()) z = read_point(*l.problem, c.point_file);
  else if (l.z_bar) z = *l.z_bar;
  else throw PreconditionError("no known solution for this problem; pass --point");

  const ConditionReport r = regularity_report(*l.problem, z);
  std::ostringstream os;
  char buf[160];
  os << "problem " << l.label << "  kkt residual " << sci(kkt_residual(*l.problem, z).norm()) << '\n';
  auto line = [&](const char* name, const CheckResult& cr) {
    std::snprintf(buf, sizeof buf, "  %-7s %-4s margin %s\n", name, mark(cr.holds), sci(cr.margin).c_str());
    os << buf;
  };
  line("W-SOC", r.w_soc);
  line("S-SOSC", r.s_sosc);
  line("W-SRCQ", r.w_srcq);
  line("CN", r.cn);
  const double tol = 1e-8;
  auto sig = [&](const char* name, double s) {
    std::snprintf(buf, sizeof buf, "  sigma_min(%s) %s  %s\n", name, sci(s).c_str(), s > tol ? "nonsingular" : "singular");
    os << buf;
  };
  sig("U0", r.u0_sigma_min);
  sig("UI", r.ui_sigma_min);
  sig("(U0+UI)/2", r.clarke_mid_sigma_min);
  os << "  dim appl " << r.appl_dim << ", dim app " << r.app_dim << '\n';
  if (r.warnings.empty()) {
    os << "implications consistent\n";
  } else {
    for (const auto& w : r.warnings) os << "  inconsistent: " << w << '\n';
  }
  if (c.output.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream out(c.output);
    if (!out) throw FormatError("cannot write '" + c.output + "'");
    out << os.str();
  }
  return kExitOk;
}

void add_problem_opts(CLI::App* sc, RunConfig& c) {
  auto* ex = sc->add_option("--example", c.example, "catalog example (ex1..ex7, ex4_dual, ex4_primal)");
  auto* qf = sc->add_option("--qsdp", c.qsdp, "QSDP instance file (JSON)");
  ex->excludes(qf);
  sc->add_option("--l1", c.cat.l1, "ex1/ex5 block size l1")->capture_default_str();
  sc->add_option("--l2", c.cat.l2, "ex1/ex5 block size l2")->capture_default_str();
  sc->add_option("--eps", c.cat.eps, "ex4 perturbation")->capture_default_str();
  sc->add_option("-o,--output", c.output, "write to file instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semismooth Newton for nonlinear SDP KKT systems"};
  app.require_subcommand(1);
  RunConfig c;

  auto* run = app.add_subcommand("run", "solve from a perturbed (or given) start and print the iterate trace");
  add_problem_opts(run, c);
  run->add_option("--variant", c.variant, "generalized Jacobian element")
      ->check(CLI::IsMember({"u0", "ui"}))
      ->capture_default_str();
  run->add_option("--delta", c.solver.delta, "correction threshold")->capture_default_str();
  run->add_option("--eta", c.solver.eta, "inexact-solve forcing constant")->capture_default_str();
  run->add_option("--tau", c.solver.tau, "inexact-solve exponent")->capture_default_str();
  run->add_option("--tol", c.solver.tol, "stop when |F| <= tol")->capture_default_str();
  run->add_option("--max-iter", c.solver.max_iter)->capture_default_str();
  run->add_option("--perturb", c.perturb, "start perturbation magnitude")->capture_default_str();
  run->add_option("--seed", c.seed)->capture_default_str();
  run->add_flag("--no-correction", c.no_correction, "plain semismooth Newton (no P_delta step)");
  auto* se = run->add_option("--start-eps", c.start_eps, "ex7 start family parameter");
  auto* sf = run->add_option("--start", c.start_file, "start point file {x, xi, gamma}");
  se->excludes(sf);
  run->add_option("--format", c.format)->check(CLI::IsMember({"table", "csv", "json"}))->capture_default_str();

  auto* check = app.add_subcommand("check", "second-order conditions, constraint qualifications, sigma_min");
  add_problem_opts(check, c);
  check->add_option("--point", c.point_file, "KKT point file {x, xi, gamma} (default: known solution)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  if (c.example.empty() && c.qsdp.empty()) {
    std::cerr << "error: one of --example or --qsdp is required\n";
    return kExitConfig;
  }
  try {
    if (run->parsed()) return cmd_run(c);
    return cmd_check(c);
  } catch (const SingularSystemError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSingular;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNoConv;
  } catch (const Error& e) {
    // precondition, dimension, format problems, and "not a KKT point"
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}
