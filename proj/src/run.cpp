#include "mmot/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "mmot/dgf.hpp"
#include "mmot/errors.hpp"
#include "mmot/gamma_limit.hpp"
#include "mmot/jsonw.hpp"
#include "mmot/mollifier.hpp"
#include "mmot/parallel.hpp"
#include "mmot/smoothing.hpp"

namespace mmot {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) throw config_error("config: unknown key '" + it.key() + "' in " + where);
  }
}

std::vector<double> as_vector(const json& v, int dim, const std::string& what) {
  std::vector<double> out;
  if (v.is_number()) {
    out.assign(dim, v.get<double>());
  } else if (v.is_array()) {
    for (const auto& x : v) out.push_back(x.get<double>());
  } else {
    throw config_error("config: " + what + " must be a number or array");
  }
  if (static_cast<int>(out.size()) != dim)
    throw config_error("config: " + what + " size does not match dimension");
  return out;
}

GridSpec parse_grid(const json& g) {
  reject_unknown(g, {"d", "box_min", "box_max", "n"}, "grid");
  if (!g.contains("d") || !g.contains("box_min") || !g.contains("box_max") || !g.contains("n"))
    throw config_error("config: grid needs d, box_min, box_max, n");
  const int d = g.at("d").get<int>();
  const int n = g.at("n").get<int>();
  if (d < 1 || d > 4) throw config_error("config: grid dimension must be 1..4");
  if (n < 2 || n > 4096) throw config_error("config: points per axis out of range");
  try {
    return build_grid(d, as_vector(g.at("box_min"), d, "box_min"),
                      as_vector(g.at("box_max"), d, "box_max"), n);
  } catch (const error& e) {
    throw config_error(std::string("config: ") + e.what());
  }
}

void parse_density(const json& v, RunConfig& cfg) {
  reject_unknown(v, {"type", "mean", "sigma", "weight", "components", "lo", "hi", "path", "floor"},
                 "density");
  const std::string type = v.at("type").get<std::string>();
  DensitySpec& spec = cfg.density;
  if (v.contains("floor")) spec.floor_rel = v.at("floor").get<double>();
  if (spec.floor_rel < 0.0 || spec.floor_rel >= 1.0)
    throw config_error("config: density floor must be in [0, 1)");
  const int d = cfg.grid.dim;
  if (type == "gaussian") {
    spec.kind = DensitySpec::Kind::Gaussian;
    GaussianComponent c;
    c.mean = as_vector(v.at("mean"), d, "mean");
    c.sigma = v.at("sigma").get<double>();
    if (!(c.sigma > 0.0)) throw config_error("config: sigma must be positive");
    spec.components = {c};
  } else if (type == "mixture") {
    spec.kind = DensitySpec::Kind::Mixture;
    if (!v.contains("components") || !v.at("components").is_array() || v.at("components").empty())
      throw config_error("config: mixture needs a component array");
    for (const auto& cj : v.at("components")) {
      reject_unknown(cj, {"mean", "sigma", "weight"}, "mixture component");
      GaussianComponent c;
      c.mean = as_vector(cj.at("mean"), d, "mean");
      c.sigma = cj.at("sigma").get<double>();
      c.weight = cj.value("weight", 1.0);
      if (!(c.sigma > 0.0) || c.weight < 0.0)
        throw config_error("config: bad mixture component");
      spec.components.push_back(c);
    }
  } else if (type == "uniform") {
    spec.kind = DensitySpec::Kind::UniformBox;
    spec.lo = as_vector(v.at("lo"), d, "lo");
    spec.hi = as_vector(v.at("hi"), d, "hi");
  } else if (type == "file") {
    spec.kind = DensitySpec::Kind::Values;
    cfg.density_file = v.at("path").get<std::string>();
    if (!fs::exists(cfg.density_file))
      throw config_error("config: density file does not exist: " + cfg.density_file);
  } else {
    throw config_error("config: unknown density type '" + type + "'");
  }
}

DiscreteDensity load_density(const RunConfig& cfg) {
  if (!cfg.density_file.empty()) {
    Dgf1Data d = read_dgf1(cfg.density_file);
    if (d.arity != 1) throw error("density file must hold a density (N = 1)");
    if (static_cast<int>(d.dim) != cfg.grid.dim ||
        static_cast<int>(d.points_per_axis) != cfg.grid.points_per_axis)
      throw error("density file does not match the configured grid");
    DensitySpec spec = cfg.density;
    spec.kind = DensitySpec::Kind::Values;
    spec.values = std::move(d.values);
    return ingest_density(cfg.grid, spec);
  }
  return ingest_density(cfg.grid, cfg.density);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw error("cannot write artifact: " + path);
  f << content;
}

std::string n17(double v) { return JsonWriter::num17(v); }

// plan for the smooth/fermionize pipelines
ProductField obtain_plan(const RunConfig& cfg, const DiscreteDensity& rho, PlanSolution* sol_out,
                         std::string* provenance) {
  if (cfg.plan_source == "file") {
    Dgf1Data d = read_dgf1(cfg.plan_file);
    if (static_cast<int>(d.arity) != cfg.arity || static_cast<int>(d.dim) != cfg.grid.dim ||
        static_cast<int>(d.points_per_axis) != cfg.grid.points_per_axis)
      throw error("plan file does not match the configured grid");
    ProductField plan;
    plan.grid = cfg.grid;
    plan.arity = cfg.arity;
    plan.values = std::move(d.values);
    for (double v : plan.values)
      if (v < 0.0 || !std::isfinite(v)) throw error("plan file has negative or non-finite entries");
    *provenance = "file";
    return plan;
  }
  if (cfg.plan_source == "product") {
    *provenance = "product";
    return product_plan(rho, cfg.arity, cfg.solver.cap);
  }
  PlanSolution sol = solve_mmot(rho, cfg.arity, cfg.method, cfg.cost, cfg.solver);
  if (!sol.feasible) throw error("no admissible transport plan for this density");
  if (!sol.converged) throw convergence_error("solver did not converge");
  sol.plan = symmetrize(sol.plan);
  *provenance = cfg.method == SolveMethod::ExactLp ? "exact-lp" : "entropic";
  if (sol_out) *sol_out = sol;
  return sol_out ? sol_out->plan : sol.plan;
}

int run_solve(const RunConfig& cfg) {
  DiscreteDensity rho = load_density(cfg);
  PlanSolution sol = solve_mmot(rho, cfg.arity, cfg.method, cfg.cost, cfg.solver);

  std::string csv = "axis,l1_residual\n";
  for (std::size_t a = 0; a < sol.marginal_residuals.size(); ++a)
    csv += std::to_string(a + 1) + "," + n17(sol.marginal_residuals[a]) + "\n";
  write_file(cfg.out_dir + "/report.csv", csv);

  auto alpha = offdiag_radius(rho, cfg.arity);
  JsonWriter w;
  w.open_object();
  w.key("command"); w.value("solve");
  w.key("method"); w.value(sol.method == SolveMethod::ExactLp ? "exact-lp" : "entropic");
  w.key("cost"); w.value(sol.cost);
  w.key("iterations"); w.value(sol.iterations);
  w.key("converged"); w.value(sol.converged);
  w.key("feasible"); w.value(sol.feasible);
  w.key("marginal_residuals");
  w.open_array();
  for (double r : sol.marginal_residuals) w.value(r);
  w.close_array();
  w.key("support_gap"); w.value(sol.feasible ? support_gap(sol.plan) : 0.0);
  w.key("offdiag_radius");
  if (alpha) w.value(*alpha); else w.value("none");
  w.key("diagonal_mass_at_offdiag_radius");
  if (alpha && sol.feasible) w.value(diagonal_mass(sol.plan, *alpha)); else w.value("none");
  w.close_object();
  write_file(cfg.out_dir + "/summary.json", w.str());

  if (cfg.dump_fields && sol.feasible) write_dgf1(cfg.out_dir + "/plan.dgf1", sol.plan);
  if (!sol.converged) return 4;
  return 0;
}

int run_smooth(const RunConfig& cfg) {
  DiscreteDensity rho = load_density(cfg);
  std::string provenance;
  ProductField plan = obtain_plan(cfg, rho, nullptr, &provenance);

  std::string csv = "eps,mass,marginal_err,kinetic,kinetic_bound,cost,bl_distance\n";
  JsonWriter w;
  w.open_object();
  w.key("command"); w.value("smooth");
  w.key("plan_source"); w.value(provenance);
  w.key("records");
  w.open_array();
  int index = 0;
  for (double eps : cfg.eps_schedule) {
    SmoothedPlan sp = regularize_general(plan, rho, eps, cfg.cost, cfg.solver);
    if (sp.skipped_infinite_cost) throw error("smooth: plan has infinite cost");
    double marg_err = 0.0;
    const double vol = rho.grid.cell_volume();
    for (int a = 1; a <= plan.arity; ++a) {
      DiscreteDensity m = marginal(sp.p_restored, a);
      double l1 = 0.0;
      for (std::int64_t i = 0; i < rho.grid.cells(); ++i)
        l1 += std::abs(m.values[i] - rho.values[i]) * vol;
      marg_err = std::max(marg_err, l1);
    }
    const double bl = bl_distance_diagnostic(sp.p_restored, plan, cfg.seed, 8);
    const double mass = sp.p_restored.mass();
    csv += n17(eps) + "," + n17(mass) + "," + n17(marg_err) + "," + n17(sp.kinetic) + "," +
           n17(sp.kinetic_bound) + "," + n17(sp.cost) + "," + n17(bl) + "\n";
    w.open_object();
    w.key("eps"); w.value(eps);
    w.key("mass"); w.value(mass);
    w.key("marginal_err"); w.value(marg_err);
    w.key("kinetic"); w.value(sp.kinetic);
    w.key("kinetic_bound"); w.value(sp.kinetic_bound);
    w.key("cost"); w.value(sp.cost);
    w.key("bl_distance"); w.value(bl);
    w.close_object();
    if (cfg.dump_fields) {
      write_dgf1(cfg.out_dir + "/p_eps_" + std::to_string(index) + ".dgf1", sp.p_restored);
    }
    ++index;
  }
  w.close_array();
  w.close_object();
  write_file(cfg.out_dir + "/report.csv", csv);
  write_file(cfg.out_dir + "/summary.json", w.str());
  return 0;
}

int run_fermionize(const RunConfig& cfg) {
  DiscreteDensity rho = load_density(cfg);
  std::string provenance;
  ProductField plan = obtain_plan(cfg, rho, nullptr, &provenance);
  const double eps = cfg.fermion_eps > 0.0 ? cfg.fermion_eps : 2.0 * cfg.grid.spacing;
  SmoothedPlan sp = smooth_plan(plan, rho, eps, cfg.cost);

  double alpha = cfg.fermion_alpha;
  const double gap = support_gap(sp.p_restored);
  if (alpha <= 0.0) {
    if (!(gap > 0.0) || std::isinf(gap))
      throw error("fermionize: smoothed plan has no off-diagonal support gap");
    alpha = gap;
  }

  SpinWaveFunction wf;
  if (cfg.statistics == Statistics::Bosonic) {
    wf = build_bosonic(sp.phi);
  } else {
    AuxiliaryPair aux =
        aux_pair(alpha / std::sqrt(static_cast<double>(cfg.grid.dim)), cfg.aux_variant);
    wf = build_fermionic(sp.phi, alpha, aux);
  }
  StatisticsReport rep = verify_statistics(wf);

  std::string csv = "check,value\n";
  csv += "max_density_error," + n17(rep.max_density_error) + "\n";
  csv += "max_antisymmetry_violation," + n17(rep.max_antisymmetry_violation) + "\n";
  csv += "max_symmetry_violation," + n17(rep.max_symmetry_violation) + "\n";
  csv += "min_gradient_margin," + n17(rep.min_gradient_margin) + "\n";
  write_file(cfg.out_dir + "/report.csv", csv);

  // component blocks: real and imaginary DGF1 per spin state
  std::vector<std::string> files;
  if (cfg.dump_fields) {
    for (std::size_t s = 0; s < wf.components.size(); ++s) {
      std::string bits;
      for (int b = wf.arity - 1; b >= 0; --b) bits += ((s >> b) & 1) ? '1' : '0';
      std::vector<double> re(wf.source.size(), 0.0), im(wf.source.size(), 0.0);
      if (!wf.components[s].empty()) {
        for (std::int64_t i = 0; i < wf.source.size(); ++i) {
          re[i] = wf.components[s][i].real();
          im[i] = wf.components[s][i].imag();
        }
      }
      const std::string base = cfg.out_dir + "/psi_" + bits;
      write_dgf1(base + "_re.dgf1", static_cast<std::uint32_t>(wf.dim),
                 static_cast<std::uint32_t>(wf.arity),
                 static_cast<std::uint32_t>(wf.grid.points_per_axis), re);
      write_dgf1(base + "_im.dgf1", static_cast<std::uint32_t>(wf.dim),
                 static_cast<std::uint32_t>(wf.arity),
                 static_cast<std::uint32_t>(wf.grid.points_per_axis), im);
      files.push_back("psi_" + bits);
    }
  }

  JsonWriter w;
  w.open_object();
  w.key("command"); w.value("fermionize");
  w.key("N"); w.value(wf.arity);
  w.key("d"); w.value(wf.dim);
  w.key("alpha"); w.value(alpha);
  w.key("support_gap"); w.value(gap);
  w.key("eps"); w.value(eps);
  w.key("k"); w.value(wf.aux_k);
  w.key("C"); w.value(wf.gradient_constant);
  w.key("statistics");
  w.value(cfg.statistics == Statistics::Bosonic ? "bosonic" : "fermionic");
  w.key("variant"); w.value(cfg.aux_variant == AuxVariant::Trig ? "trig" : "smoothstep");
  w.key("max_density_error"); w.value(rep.max_density_error);
  w.key("max_antisymmetry_violation"); w.value(rep.max_antisymmetry_violation);
  w.key("min_gradient_margin"); w.value(rep.min_gradient_margin);
  w.key("components");
  w.open_array();
  for (const auto& fname : files) w.value(fname);
  w.close_array();
  w.close_object();
  write_file(cfg.out_dir + "/summary.json", w.str());
  return 0;
}

int run_sweep(const RunConfig& cfg) {
  DiscreteDensity rho = load_density(cfg);
  SweepReport rep =
      sweep(rho, cfg.hbar_schedule, cfg.statistics, cfg.cost, cfg.solver, cfg.density.describe());
  write_file(cfg.out_dir + "/report.csv", sweep_csv(rep));

  JsonWriter w;
  w.open_object();
  w.key("command"); w.value("sweep");
  w.key("statistics"); w.value(rep.statistics == Statistics::Bosonic ? "bosonic" : "fermionic");
  w.key("density"); w.value(rep.density_descriptor);
  w.key("provenance"); w.value(rep.provenance);
  w.key("c_ref"); w.value(rep.c_ref);
  w.key("complete"); w.value(rep.complete);
  w.key("rows"); w.value(static_cast<long>(rep.rows.size()));
  if (!rep.rows.empty()) {
    const SweepRow& last = rep.rows.back();
    w.key("final_hbar"); w.value(last.hbar);
    w.key("final_gap"); w.value(last.gap);
    w.key("final_T"); w.value(last.kinetic);
  }
  w.close_object();
  write_file(cfg.out_dir + "/summary.json", w.str());
  return rep.complete ? 0 : 4;
}

int run_constants(const RunConfig& cfg) {
  std::string csv = "d,k,K\n";
  JsonWriter w;
  w.open_object();
  w.key("command"); w.value("constants");
  w.key("rows");
  w.open_array();
  for (int d : cfg.constant_dims) {
    auto [k, K] = mollifier_constant(d);
    csv += std::to_string(d) + "," + n17(k) + "," + n17(K) + "\n";
    w.open_object();
    w.key("d"); w.value(d);
    w.key("k"); w.value(k);
    w.key("K"); w.value(K);
    w.close_object();
  }
  w.close_array();
  w.close_object();
  write_file(cfg.out_dir + "/report.csv", csv);
  write_file(cfg.out_dir + "/summary.json", w.str());
  return 0;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const std::exception& e) {
    throw config_error(std::string("config: parse failure: ") + e.what());
  }
  if (!doc.is_object()) throw config_error("config: document must be an object");
  reject_unknown(doc,
                 {"version", "command", "grid", "density", "N", "cost", "solver", "eps",
                  "hbar", "statistics", "fermion", "dims", "plan", "output"},
                 "document");
  if (doc.value("version", 0) != 1) throw config_error("config: unsupported version");

  RunConfig cfg;
  const std::string cmd = doc.at("command").get<std::string>();
  if (cmd == "solve") cfg.command = Command::Solve;
  else if (cmd == "smooth") cfg.command = Command::Smooth;
  else if (cmd == "fermionize") cfg.command = Command::Fermionize;
  else if (cmd == "sweep") cfg.command = Command::Sweep;
  else if (cmd == "constants") cfg.command = Command::Constants;
  else throw config_error("config: unknown command '" + cmd + "'");

  if (cfg.command == Command::Constants) {
    if (doc.contains("dims")) {
      cfg.constant_dims.clear();
      for (const auto& d : doc.at("dims")) cfg.constant_dims.push_back(d.get<int>());
      for (int d : cfg.constant_dims)
        if (d < 1 || d > 4) throw config_error("config: dims must be within 1..4");
    }
    return cfg;
  }

  if (!doc.contains("grid") || !doc.contains("density"))
    throw config_error("config: grid and density are required");
  cfg.grid = parse_grid(doc.at("grid"));
  parse_density(doc.at("density"), cfg);

  cfg.arity = doc.value("N", 2);
  if (cfg.arity < 2 || cfg.arity > 3) throw config_error("config: N must be 2 or 3");
  cfg.cost.arity = cfg.arity;
  cfg.cost.dim = cfg.grid.dim;

  if (doc.contains("cost")) {
    const json& c = doc.at("cost");
    reject_unknown(c, {"diagonal", "alpha"}, "cost");
    const std::string pol = c.value("diagonal", "forbid");
    if (pol == "forbid") {
      cfg.cost.policy = DiagonalPolicy::Forbid;
    } else if (pol == "truncate") {
      cfg.cost.policy = DiagonalPolicy::Truncate;
      cfg.cost.trunc_alpha = c.value("alpha", 0.0);
      if (!(cfg.cost.trunc_alpha > 0.0))
        throw config_error("config: truncate policy needs a positive alpha");
    } else {
      throw config_error("config: diagonal policy must be forbid or truncate");
    }
  }

  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    reject_unknown(s, {"method", "cap", "eta_schedule", "max_iterations", "marginal_tol"},
                   "solver");
    const std::string m = s.value("method", "exact");
    if (m == "exact") cfg.method = SolveMethod::ExactLp;
    else if (m == "entropic") cfg.method = SolveMethod::Entropic;
    else throw config_error("config: solver method must be exact or entropic");
    cfg.solver.cap = s.value("cap", cfg.solver.cap);
    if (s.contains("eta_schedule")) {
      cfg.solver.eta_schedule.clear();
      for (const auto& e : s.at("eta_schedule")) cfg.solver.eta_schedule.push_back(e.get<double>());
      if (cfg.solver.eta_schedule.empty())
        throw config_error("config: eta schedule must not be empty");
      for (double e : cfg.solver.eta_schedule)
        if (!(e > 0.0)) throw config_error("config: eta values must be positive");
    }
    cfg.solver.max_iterations = s.value("max_iterations", cfg.solver.max_iterations);
    cfg.solver.marginal_tol = s.value("marginal_tol", cfg.solver.marginal_tol);
    if (cfg.solver.max_iterations < 1 || !(cfg.solver.marginal_tol > 0.0))
      throw config_error("config: bad solver limits");
  }

  if (doc.contains("statistics")) {
    const std::string st = doc.at("statistics").get<std::string>();
    if (st == "bosonic") cfg.statistics = Statistics::Bosonic;
    else if (st == "fermionic") cfg.statistics = Statistics::Fermionic;
    else throw config_error("config: statistics must be bosonic or fermionic");
  }

  if (doc.contains("plan")) {
    const json& p = doc.at("plan");
    reject_unknown(p, {"type", "path"}, "plan");
    cfg.plan_source = p.value("type", "solve");
    if (cfg.plan_source == "file") {
      cfg.plan_file = p.at("path").get<std::string>();
      if (!fs::exists(cfg.plan_file))
        throw config_error("config: plan file does not exist: " + cfg.plan_file);
    } else if (cfg.plan_source != "solve" && cfg.plan_source != "product") {
      throw config_error("config: plan type must be solve, product or file");
    }
  }

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    reject_unknown(o, {"fields"}, "output");
    cfg.dump_fields = o.value("fields", false);
  }

  switch (cfg.command) {
    case Command::Smooth: {
      if (!doc.contains("eps")) throw config_error("config: smooth needs an eps schedule");
      const json& e = doc.at("eps");
      if (e.is_number()) cfg.eps_schedule = {e.get<double>()};
      else for (const auto& x : e) cfg.eps_schedule.push_back(x.get<double>());
      for (double x : cfg.eps_schedule)
        if (!(x >= 2.0 * cfg.grid.spacing - 1e-12))
          throw config_error("config: eps must be at least 2h");
      break;
    }
    case Command::Sweep: {
      if (!doc.contains("hbar")) throw config_error("config: sweep needs an hbar schedule");
      for (const auto& x : doc.at("hbar")) cfg.hbar_schedule.push_back(x.get<double>());
      for (std::size_t i = 0; i < cfg.hbar_schedule.size(); ++i) {
        if (!(cfg.hbar_schedule[i] > 0.0))
          throw config_error("config: hbar values must be positive");
        if (i > 0 && cfg.hbar_schedule[i] >= cfg.hbar_schedule[i - 1])
          throw config_error("config: hbar schedule must be sorted descending");
      }
      break;
    }
    case Command::Fermionize: {
      if (doc.contains("fermion")) {
        const json& f = doc.at("fermion");
        reject_unknown(f, {"variant", "alpha", "eps"}, "fermion");
        const std::string var = f.value("variant", "trig");
        if (var == "trig") cfg.aux_variant = AuxVariant::Trig;
        else if (var == "smoothstep") cfg.aux_variant = AuxVariant::Smoothstep;
        else throw config_error("config: fermion variant must be trig or smoothstep");
        if (f.contains("alpha") && !f.at("alpha").is_string())
          cfg.fermion_alpha = f.at("alpha").get<double>();
        cfg.fermion_eps = f.value("eps", 0.0);
      }
      if (cfg.statistics == Statistics::Fermionic &&
          (cfg.grid.dim != 3 && cfg.grid.dim != 4))
        throw config_error("config: fermionize needs d in {3, 4}");
      break;
    }
    default: break;
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw config_error("config: cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

int run(const RunConfig& config) {
  set_threads(config.threads);
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);

  auto write_error = [&](const std::string& message, int code) {
    JsonWriter w;
    w.open_object();
    w.key("error"); w.value(message);
    w.key("exit"); w.value(code);
    w.close_object();
    try {
      write_file(config.out_dir + "/error.json", w.str());
    } catch (...) {
    }
    return code;
  };

  try {
    switch (config.command) {
      case Command::Solve: return run_solve(config);
      case Command::Smooth: return run_smooth(config);
      case Command::Fermionize: return run_fermionize(config);
      case Command::Sweep: return run_sweep(config);
      case Command::Constants: return run_constants(config);
    }
    return 1;
  } catch (const cap_error& e) {
    return write_error(e.what(), 3);
  } catch (const convergence_error& e) {
    return write_error(e.what(), 4);
  } catch (const std::exception& e) {
    return write_error(e.what(), 1);
  }
}

}  // namespace mmot
