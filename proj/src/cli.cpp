#include "qvi/cli.hpp"

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "qvi/sensitivity.hpp"

namespace qvi::cli {

using nlohmann::json;

namespace {

void rejectUnknown(const json& j, std::initializer_list<const char*> allowed,
                   const std::string& ctx) {
  if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) known = true;
    if (!known) throw ConfigError(ctx + ": unknown key '" + it.key() + "'");
  }
}

const json& need(const json& j, const char* key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(ctx + ": missing key '" + key + "'");
  return *it;
}

double asNum(const json& j, const std::string& ctx) {
  if (!j.is_number()) throw ConfigError(ctx + ": expected a number");
  return j.get<double>();
}

double numAt(const json& j, const char* key, const std::string& ctx) {
  return asNum(need(j, key, ctx), ctx + "." + key);
}

double numOr(const json& j, const char* key, double fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : asNum(*it, key);
}

int intOr(const json& j, const char* key, int fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer()) throw ConfigError(std::string(key) + ": expected an integer");
  return it->get<int>();
}

bool boolOr(const json& j, const char* key, bool fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) throw ConfigError(std::string(key) + ": expected a boolean");
  return it->get<bool>();
}

std::string strAt(const json& j, const char* key, const std::string& ctx) {
  const json& v = need(j, key, ctx);
  if (!v.is_string()) throw ConfigError(ctx + "." + key + ": expected a string");
  return v.get<std::string>();
}

Eigen::VectorXd asVector(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw ConfigError(ctx + ": expected an array of numbers");
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = asNum(j[i], ctx);
  return v;
}

// scalar -> constant vector of length n, array -> checked length
Eigen::VectorXd asBound(const json& j, int n, const std::string& ctx) {
  if (j.is_number()) return Eigen::VectorXd::Constant(n, j.get<double>());
  Eigen::VectorXd v = asVector(j, ctx);
  if (v.size() != n) throw ConfigError(ctx + ": expected length " + std::to_string(n));
  return v;
}

Eigen::MatrixXd asMatrix(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty()) throw ConfigError(ctx + ": expected an array of rows");
  const size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw ConfigError(ctx + ": expected nonempty rows");
  Eigen::MatrixXd m(j.size(), cols);
  for (size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw ConfigError(ctx + ": ragged rows");
    for (size_t c = 0; c < cols; ++c)
      m(static_cast<int>(r), static_cast<int>(c)) = asNum(j[r][c], ctx);
  }
  return m;
}

json toJson(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::shared_ptr<Space> parseSpace(const json& j) {
  rejectUnknown(j, {"kind", "dim", "n", "matrix"}, "space");
  const std::string kind = strAt(j, "kind", "space");
  if (kind == "euclidean")
    return std::make_shared<Space>(Space::euclidean(intOr(j, "dim", -1)));
  if (kind == "stiffness1d")
    return std::make_shared<Space>(Space::stiffness1d(intOr(j, "n", -1)));
  if (kind == "gram")
    return std::make_shared<Space>(Space::withGram(asMatrix(need(j, "matrix", "space"), "space.matrix")));
  throw ConfigError("space.kind: expected euclidean|stiffness1d|gram");
}

OperatorSpec parseA(const json& j, const Space& space) {
  rejectUnknown(j, {"kind", "matrix", "mu", "lip", "potential"}, "a");
  const std::string kind = strAt(j, "kind", "a");
  if (kind == "riesz")
    return OperatorSpec::linear(space.denseGram(), Certificate(1.0, 1.0, true));
  if (kind == "matrix") {
    Eigen::MatrixXd m = asMatrix(need(j, "matrix", "a"), "a.matrix");
    Certificate cert(numAt(j, "mu", "a"), numAt(j, "lip", "a"), boolOr(j, "potential", false));
    return OperatorSpec::linear(std::move(m), cert);
  }
  throw ConfigError("a.kind: expected riesz|matrix");
}

MovingMap parsePhi(const json& j, const Space& space) {
  rejectUnknown(j, {"kind", "value", "matrix", "lip"}, "phi");
  const std::string kind = strAt(j, "kind", "phi");
  if (kind == "zero") return MovingMap::zero();
  if (kind == "scalar") return MovingMap::scalar(numAt(j, "value", "phi"));
  if (kind == "matrix") {
    Eigen::MatrixXd m = asMatrix(need(j, "matrix", "phi"), "phi.matrix");
    const double lip = j.contains("lip") ? numAt(j, "lip", "phi") : primalOpNorm(space, m);
    return MovingMap::linearMap(std::move(m), lip);
  }
  throw ConfigError("phi.kind: expected zero|scalar|matrix");
}

ConvexSet parseSet(const json& j, int n) {
  rejectUnknown(j, {"kind", "lower", "upper", "basis"}, "set");
  const std::string kind = strAt(j, "kind", "set");
  if (kind == "whole") return ConvexSet::wholeSpace(n);
  if (kind == "box")
    return ConvexSet::box(asBound(need(j, "lower", "set"), n, "set.lower"),
                          asBound(need(j, "upper", "set"), n, "set.upper"));
  if (kind == "box_upper")
    return ConvexSet::boxUpper(asBound(need(j, "upper", "set"), n, "set.upper"));
  if (kind == "box_lower")
    return ConvexSet::boxLower(asBound(need(j, "lower", "set"), n, "set.lower"));
  if (kind == "span") {
    Eigen::MatrixXd rows = asMatrix(need(j, "basis", "set"), "set.basis");
    if (rows.cols() != n) throw ConfigError("set.basis: vectors must have length " + std::to_string(n));
    return ConvexSet::span(rows.transpose());
  }
  throw ConfigError("set.kind: expected whole|box|box_upper|box_lower|span");
}

Functional parseF(const json& j, const Space& space) {
  rejectUnknown(j, {"kind", "values", "load"}, "f");
  const std::string kind = strAt(j, "kind", "f");
  if (kind == "coords") {
    Eigen::VectorXd v = asVector(need(j, "values", "f"), "f.values");
    space.requireDim(static_cast<int>(v.size()), "f.values");
    return Functional(std::move(v));
  }
  if (kind == "uniform_load") return uniformLoad(space, numOr(j, "load", 1.0));
  throw ConfigError("f.kind: expected coords|uniform_load");
}

json reportSolution(const Space& space, const QviSolution& sol, double tol) {
  json r;
  r["y"] = toJson(sol.y.coords);
  r["z"] = toJson(sol.z.coords);
  r["lam"] = toJson(sol.lam.coords);
  r["norm_y"] = space.norm(sol.y);
  r["qvi_residual"] = sol.qvi_residual;
  r["iterations"] = sol.vi_report.iterations;
  r["contraction_estimate"] = sol.vi_report.contraction_estimate;
  r["inside_region"] = sol.inside_region;
  r["tol"] = tol;
  return r;
}

QviOptions parseSolveOptions(const json& config, const CliOptions& opts) {
  QviOptions qo;
  qo.tol = opts.tol.value_or(numOr(config, "tol", 1e-10));
  qo.max_iter = opts.max_iter.value_or(intOr(config, "max_iter", 500000));
  qo.max_outer = intOr(config, "max_outer", 10000);
  qo.skip_uniqueness_check = boolOr(config, "skip_uniqueness_check", false);
  if (config.contains("cert_b")) {
    const json& c = config["cert_b"];
    rejectUnknown(c, {"mu", "lip", "potential"}, "cert_b");
    qo.cert_b = Certificate(numAt(c, "mu", "cert_b"), numAt(c, "lip", "cert_b"),
                            boolOr(c, "potential", false));
  }
  return qo;
}

uint64_t seedOf(const json& config, const CliOptions& opts) {
  if (opts.seed) return *opts.seed;
  auto it = config.find("seed");
  if (it == config.end()) return 0;
  if (!it->is_number_unsigned() && !it->is_number_integer())
    throw ConfigError("seed: expected an integer");
  return it->get<uint64_t>();
}

std::string csvFromTable(const std::vector<std::string>& cols,
                         const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  os.precision(17);
  for (size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  return os.str();
}

}  // namespace

ProblemHandle parseProblem(const json& j) {
  if (j.contains("case")) {
    rejectUnknown(j, {"case"}, "problem");
    const json& c = j["case"];
    rejectUnknown(c, {"kind", "n_grid", "alpha", "h0", "load"}, "problem.case");
    if (strAt(c, "kind", "problem.case") != "moving_obstacle")
      throw ConfigError("problem.case.kind: expected moving_obstacle");
    ObstacleInstance inst =
        caseMovingObstacle(intOr(c, "n_grid", 255), numOr(c, "alpha", 0.5),
                           numOr(c, "h0", 0.02), numOr(c, "load", 1.0));
    return {inst.space, std::move(inst.problem)};
  }
  rejectUnknown(j, {"space", "a", "phi", "set", "f", "region"}, "problem");
  ProblemHandle h;
  h.space = parseSpace(need(j, "space", "problem"));
  h.problem.space = h.space.get();
  h.problem.a_op = parseA(need(j, "a", "problem"), *h.space);
  h.problem.phi = j.contains("phi") ? parsePhi(j["phi"], *h.space) : MovingMap::zero();
  h.problem.set_k = parseSet(need(j, "set", "problem"), h.space->dim());
  h.problem.f = parseF(need(j, "f", "problem"), *h.space);
  if (j.contains("region")) {
    const json& r = j["region"];
    rejectUnknown(r, {"center", "radius"}, "problem.region");
    Ball ball;
    ball.center = Primal(asVector(need(r, "center", "region"), "region.center"));
    ball.radius = numAt(r, "radius", "region");
    h.problem.region_y = std::move(ball);
  }
  return h;
}

json reportFromCase(const CaseReport& rep) {
  json r;
  r["name"] = rep.name;
  r["params"] = rep.params;
  r["quantities"] = rep.quantities;
  r["notes"] = rep.notes;
  json checks = json::array();
  for (const auto& a : rep.assertions) {
    checks.push_back({{"name", a.name},
                      {"value", a.value},
                      {"expected", a.expected},
                      {"tol", a.tol},
                      {"pass", a.pass}});
  }
  r["assertions"] = checks;
  r["all_pass"] = rep.allPass();
  if (!rep.table.empty()) {
    r["table_columns"] = rep.table_columns;
    r["table"] = rep.table;
  }
  return r;
}

int cmdCheckConditions(const json& config, json& report) {
  rejectUnknown(config, {"command", "mu_a", "lip_a", "lip_phi", "has_convex_potential"},
                "config");
  Certificate cert(numAt(config, "mu_a", "config"), numAt(config, "lip_a", "config"),
                   boolOr(config, "has_convex_potential", false));
  const double lip_phi = numAt(config, "lip_phi", "config");
  ThresholdReport t = checkUniqueness(cert, lip_phi);
  report["gamma"] = t.gamma;
  report["lip_phi"] = t.lip_phi;
  report["thresholds"] = {{"noor_oettli", t.noor_oettli},
                          {"nesterov_scrimali", t.nesterov_scrimali},
                          {"convex_potential", t.convex_potential},
                          {"ahr", t.ahr}};
  report["satisfied"] = {{"noor_oettli", t.ok_noor_oettli},
                         {"nesterov_scrimali", t.ok_nesterov_scrimali},
                         {"convex_potential", t.ok_convex_potential},
                         {"ahr", t.ok_ahr}};
  report["has_convex_potential"] = cert.has_convex_potential;
  report["ordering_holds"] = t.ordering_holds;
  report["unique"] = t.unique;
  return t.unique ? kOk : kMathFailure;
}

int cmdSolve(const json& config, const CliOptions& opts, json& report) {
  rejectUnknown(config,
                {"command", "problem", "method", "tol", "max_iter", "max_outer", "cert_b",
                 "skip_uniqueness_check", "seed"},
                "config");
  ProblemHandle h = parseProblem(need(config, "problem", "config"));
  QviOptions qo = parseSolveOptions(config, opts);
  std::string method = config.contains("method") ? strAt(config, "method", "config")
                                                 : std::string("reformulation");
  report["method"] = method;
  try {
    QviSolution sol;
    if (method == "reformulation")
      sol = solveQvi(h.problem, qo);
    else if (method == "sequential")
      sol = solveQviSequential(h.problem, qo);
    else if (method == "localized")
      sol = solveQviLocalized(h.problem, qo);
    else
      throw ConfigError("method: expected reformulation|sequential|localized");
    report["solution"] = reportSolution(*h.space, sol, qo.tol);
    report["converged"] = sol.qvi_residual <= qo.tol;
    return sol.qvi_residual <= qo.tol ? kOk : kMathFailure;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    report["error"] = e.what();
    return kMathFailure;
  }
}

int cmdDerivative(const json& config, const CliOptions& opts, json& report,
                  std::string& csv) {
  rejectUnknown(config,
                {"command", "problem", "direction", "t_list", "tol", "fd_threshold", "seed"},
                "config");
  ProblemHandle h = parseProblem(need(config, "problem", "config"));
  const double tol = opts.tol.value_or(numOr(config, "tol", 1e-10));
  const double fd_threshold = numOr(config, "fd_threshold", 1e-3);
  std::vector<double> t_list{1e-2, 1e-3, 1e-4, 1e-5};
  if (config.contains("t_list")) {
    Eigen::VectorXd t = asVector(config["t_list"], "t_list");
    t_list.assign(t.data(), t.data() + t.size());
  }
  Functional dir = config.contains("direction")
                       ? parseF(config["direction"], *h.space)
                       : uniformLoad(*h.space, 1.0);

  QviOptions qo;
  qo.tol = tol;
  QviSolution sol = solveQvi(h.problem, qo);
  Linearization lin = linearize(h.problem, sol);
  report["n_active"] = lin.cone.active.size();
  report["n_biactive"] = lin.cone.biactive.size();
  if (lin.cone.hasBiactive()) {
    report["warning"] = "biactive coordinates: derivative may be nonlinear in h";
    return kMathFailure;
  }
  Primal x = directionalDerivative(*h.space, lin, dir, tol / 10.0);
  const double x_norm = h.space->norm(x);

  std::vector<std::vector<double>> rows;
  double final_rel = std::numeric_limits<double>::infinity();
  for (double t : t_list) {
    QviProblem pt = h.problem;
    pt.f = Functional(h.problem.f.coords + t * dir.coords);
    QviSolution st = solveQvi(pt, qo);
    const double err = h.space->norm(Primal((st.y.coords - sol.y.coords) / t - x.coords));
    rows.push_back({t, err, st.qvi_residual});
    final_rel = err / std::max(x_norm, 1e-300);
  }
  csv = csvFromTable({"t", "fd_error", "residual"}, rows);
  report["table_columns"] = {"t", "fd_error", "residual"};
  report["table"] = rows;
  report["derivative_norm"] = x_norm;
  report["final_relative_error"] = final_rel;
  report["fd_threshold"] = fd_threshold;
  return final_rel <= fd_threshold ? kOk : kMathFailure;
}

int cmdCounterexample(const json& config, json& report) {
  rejectUnknown(config, {"command", "which", "mu", "l"}, "config");
  const std::string which = strAt(config, "which", "config");
  const double mu = numAt(config, "mu", "config");
  const double l = numAt(config, "l", "config");
  CaseReport rep;
  if (which == "general")
    rep = caseSharpGeneral(mu, l);
  else if (which == "symmetric")
    rep = caseSharpSymmetric(mu, l);
  else
    throw ConfigError("which: expected general|symmetric");
  report = reportFromCase(rep);
  return rep.allPass() ? kOk : kMathFailure;
}

int cmdObstacleStudy(const json& config, json& report, std::string& csv) {
  rejectUnknown(config, {"command", "n_grid", "h_list"}, "config");
  const int n_grid = intOr(config, "n_grid", 4096);
  std::vector<double> h_list{1e-2, 5e-3, 2e-3, 1e-3, 5e-4, 2e-4, 1e-4};
  if (config.contains("h_list")) {
    Eigen::VectorXd h = asVector(config["h_list"], "h_list");
    h_list.assign(h.data(), h.data() + h.size());
  }
  CaseReport rep = caseObstacleProjection(n_grid, h_list);
  report = reportFromCase(rep);
  csv = csvFromTable(rep.table_columns, rep.table);
  const double slope = rep.quantities.at("slope");
  return (slope >= 0.73 && slope <= 0.77) ? kOk : kMathFailure;
}

int cmdControl(const json& config, const CliOptions& opts, json& report) {
  rejectUnknown(config,
                {"command", "problem", "control", "u_bar", "descent", "tol", "n_dirs",
                 "seed"},
                "config");
  ProblemHandle h = parseProblem(need(config, "problem", "config"));
  const json& cj = need(config, "control", "config");
  rejectUnknown(cj, {"b_ctrl", "space", "objective"}, "control");

  ControlProblem cp;
  cp.qvi = h.problem;
  const json& bj = need(cj, "b_ctrl", "control");
  if (bj.is_string() && bj.get<std::string>() == "identity")
    cp.b_ctrl = Eigen::MatrixXd::Identity(h.space->dim(), h.space->dim());
  else
    cp.b_ctrl = asMatrix(bj, "control.b_ctrl");
  if (cp.b_ctrl.rows() != h.space->dim())
    throw ConfigError("control.b_ctrl: row count must equal the state dimension");
  cp.control_space = cj.contains("space")
                         ? *parseSpace(cj["space"])
                         : Space::euclidean(static_cast<int>(cp.b_ctrl.cols()));

  const json& oj = need(cj, "objective", "control");
  rejectUnknown(oj, {"y_d", "alpha"}, "control.objective");
  cp.objective = QuadraticObjective::tracking(
      Primal(asBound(need(oj, "y_d", "objective"), h.space->dim(), "objective.y_d")),
      numAt(oj, "alpha", "objective"), cp.control_space.dim());

  const double tol = opts.tol.value_or(numOr(config, "tol", 1e-8));
  const int n_dirs = intOr(config, "n_dirs", 100);
  std::mt19937_64 rng(seedOf(config, opts));

  Primal u_bar;
  if (config.contains("u_bar")) {
    u_bar = Primal(asBound(config["u_bar"], cp.control_space.dim(), "u_bar"));
  } else if (config.contains("descent")) {
    const json& dj = config["descent"];
    rejectUnknown(dj, {"u0", "steps", "grad_tol"}, "descent");
    Primal u0(dj.contains("u0")
                  ? asBound(dj["u0"], cp.control_space.dim(), "descent.u0")
                  : Eigen::VectorXd::Zero(cp.control_space.dim()));
    StepRule rule;
    rule.grad_tol = numOr(dj, "grad_tol", 1e-9);
    DescentResult dr = solveControlDescent(cp, u0, intOr(dj, "steps", 100), rule);
    u_bar = dr.u;
    report["descent"] = {{"objective_history", dr.objective_history},
                         {"grad_norm", dr.grad_norm},
                         {"line_search_failed", dr.line_search_failed}};
  } else {
    throw ConfigError("config: expected 'u_bar' or 'descent'");
  }

  QviSolution sol = solveState(cp, u_bar);
  Linearization lin = linearize(cp.qvi, sol);
  StationarityCertificate cert = recoverMultipliers(cp, sol.y, u_bar, lin, tol);
  const bool strong = checkStrongStationarity(cert, tol);
  const double min_lhs = checkBStationarity(cp, sol.y, u_bar, lin, n_dirs, rng);

  report["u_bar"] = toJson(u_bar.coords);
  report["y_bar"] = toJson(sol.y.coords);
  report["p"] = toJson(cert.p.coords);
  report["mu"] = toJson(cert.mu.coords);
  report["res_adjoint"] = cert.res_adjoint;
  report["res_gradient"] = cert.res_gradient;
  report["p_in_minus_cone"] = cert.p_in_minus_cone;
  report["mu_in_polar"] = cert.mu_in_polar;
  report["strong_stationary"] = strong;
  report["min_lhs"] = min_lhs;
  report["n_dirs"] = n_dirs;
  report["tol"] = tol;
  return strong ? kOk : kMathFailure;
}

int cmdSweep(const json& config, const CliOptions& opts, json& report, std::string& csv) {
  rejectUnknown(config, {"command", "parameter", "values", "n_grid", "h0", "load", "tol"},
                "config");
  if (strAt(config, "parameter", "config") != "alpha")
    throw ConfigError("parameter: expected alpha");
  Eigen::VectorXd values = asVector(need(config, "values", "config"), "values");
  const int n_grid = intOr(config, "n_grid", 255);
  const double h0 = numOr(config, "h0", 0.02);
  const double load = numOr(config, "load", 1.0);
  const double tol = opts.tol.value_or(numOr(config, "tol", 1e-10));

  struct Row {
    double alpha, residual, norm_y;
    int iterations;
  };
  std::vector<std::future<Row>> jobs;
  for (int i = 0; i < values.size(); ++i) {
    const double alpha = values[i];
    jobs.push_back(std::async(std::launch::async, [=] {
      ObstacleInstance inst = caseMovingObstacle(n_grid, alpha, h0, load);
      QviOptions qo;
      qo.tol = tol;
      QviSolution sol = solveQvi(inst.problem, qo);
      return Row{alpha, sol.qvi_residual, inst.space->norm(sol.y),
                 sol.vi_report.iterations};
    }));
  }
  bool all_ok = true;
  std::vector<std::vector<double>> rows;
  for (auto& job : jobs) {
    Row r = job.get();
    rows.push_back({r.alpha, r.residual, static_cast<double>(r.iterations), r.norm_y});
    all_ok = all_ok && r.residual <= tol;
  }
  csv = csvFromTable({"alpha", "qvi_residual", "iterations", "norm_y"}, rows);
  report["table_columns"] = {"alpha", "qvi_residual", "iterations", "norm_y"};
  report["table"] = rows;
  report["tol"] = tol;
  report["all_converged"] = all_ok;
  return all_ok ? kOk : kMathFailure;
}

int runCommand(const CliOptions& opts) {
  json report;
  std::string csv;
  std::string csv_name;
  int code = kConfigError;
  try {
    json config = json::object();
    if (!opts.config_path.empty()) {
      std::ifstream in(opts.config_path);
      if (!in) throw ConfigError("cannot open config file: " + opts.config_path);
      try {
        config = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
      }
    }
    if (config.contains("command") &&
        config["command"].get<std::string>() != opts.command)
      throw ConfigError("config command does not match the invoked command");

    if (opts.command == "check-conditions") {
      code = cmdCheckConditions(config, report);
    } else if (opts.command == "solve") {
      code = cmdSolve(config, opts, report);
    } else if (opts.command == "derivative") {
      code = cmdDerivative(config, opts, report, csv);
      csv_name = "derivative.csv";
    } else if (opts.command == "counterexample") {
      code = cmdCounterexample(config, report);
    } else if (opts.command == "obstacle-study") {
      code = cmdObstacleStudy(config, report, csv);
      csv_name = "obstacle_study.csv";
    } else if (opts.command == "control") {
      code = cmdControl(config, opts, report);
    } else if (opts.command == "sweep") {
      code = cmdSweep(config, opts, report, csv);
      csv_name = "sweep.csv";
    } else {
      throw ConfigError("unknown command: " + opts.command);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    report["error"] = e.what();
    code = kMathFailure;
  }

  report["command"] = opts.command;
  report["exit_code"] = code;
  const std::string text = report.dump(2) + "\n";
  if (opts.out_dir.empty()) {
    std::cout << text;
  } else {
    std::filesystem::create_directories(opts.out_dir);
    std::ofstream(std::filesystem::path(opts.out_dir) / "report.json") << text;
    if (!csv.empty() && !csv_name.empty())
      std::ofstream(std::filesystem::path(opts.out_dir) / csv_name) << csv;
  }
  return code;
}

}  // namespace qvi::cli
