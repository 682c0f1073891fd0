// Python bindings for the transport, smoothing and wavefunction pipelines.
// Fields cross the boundary as flat numpy arrays in the row-major cell order
// used by the DGF1 format.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mmot/coulomb.hpp"
#include "mmot/errors.hpp"
#include "mmot/dgf.hpp"
#include "mmot/fermion.hpp"
#include "mmot/gamma_limit.hpp"
#include "mmot/grid.hpp"
#include "mmot/mollifier.hpp"
#include "mmot/smoothing.hpp"
#include "mmot/solver.hpp"

namespace py = pybind11;
using namespace mmot;

namespace {

std::vector<double> to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  return std::vector<double>(a.data(), a.data() + a.size());
}

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

DiagonalPolicy parse_policy(const std::string& s) {
  if (s == "forbid") return DiagonalPolicy::Forbid;
  if (s == "truncate") return DiagonalPolicy::Truncate;
  throw mmot::error("diagonal policy must be 'forbid' or 'truncate'");
}

Statistics parse_statistics(const std::string& s) {
  if (s == "bosonic") return Statistics::Bosonic;
  if (s == "fermionic") return Statistics::Fermionic;
  throw mmot::error("statistics must be 'bosonic' or 'fermionic'");
}

AuxVariant parse_variant(const std::string& s) {
  if (s == "trig") return AuxVariant::Trig;
  if (s == "smoothstep") return AuxVariant::Smoothstep;
  throw mmot::error("variant must be 'trig' or 'smoothstep'");
}

CoulombCost make_cost(int arity, int dim, const std::string& policy, double alpha) {
  CoulombCost c{arity, dim, parse_policy(policy), alpha};
  if (c.policy == DiagonalPolicy::Truncate && !(alpha > 0.0))
    throw mmot::error("truncate policy needs a positive alpha");
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multimarginal optimal transport with Coulomb cost, plan mollification "
            "with exact marginal restoration, and bosonic/fermionic recovery "
            "wavefunctions";

  py::register_exception<mmot::error>(m, "MmotError");

  py::class_<GridSpec>(m, "GridSpec")
      .def_readonly("dim", &GridSpec::dim)
      .def_readonly("points_per_axis", &GridSpec::points_per_axis)
      .def_readonly("box_min", &GridSpec::box_min)
      .def_readonly("box_max", &GridSpec::box_max)
      .def_readonly("spacing", &GridSpec::spacing)
      .def_property_readonly("cells", &GridSpec::cells)
      .def("center", &GridSpec::center, py::arg("axis"), py::arg("i"))
      .def("__repr__", [](const GridSpec& g) {
        return "GridSpec(dim=" + std::to_string(g.dim) +
               ", n=" + std::to_string(g.points_per_axis) + ")";
      });

  m.def(
      "build_grid",
      [](int dim, const std::vector<double>& lo, const std::vector<double>& hi, int n) {
        return build_grid(dim, lo, hi, n);
      },
      py::arg("dim"), py::arg("box_min"), py::arg("box_max"), py::arg("n"));
  m.def(
      "build_grid",
      [](int dim, double lo, double hi, int n) { return build_grid(dim, lo, hi, n); },
      py::arg("dim"), py::arg("box_min"), py::arg("box_max"), py::arg("n"));

  py::class_<DiscreteDensity>(m, "DiscreteDensity")
      .def_readonly("grid", &DiscreteDensity::grid)
      .def_property_readonly("values",
                             [](const DiscreteDensity& d) { return to_array(d.values); })
      .def("mass", &DiscreteDensity::mass);

  py::class_<ProductField>(m, "ProductField")
      .def_readonly("grid", &ProductField::grid)
      .def_readonly("arity", &ProductField::arity)
      .def_property_readonly("values", [](const ProductField& f) { return to_array(f.values); })
      .def(
          "with_values",
          [](const ProductField& f, py::array_t<double, py::array::c_style> v) {
            ProductField out = f;
            if (static_cast<std::int64_t>(v.size()) != f.size())
              throw mmot::error("value array size does not match the field");
            out.values = to_vector(v);
            return out;
          },
          py::arg("values"))
      .def("mass", &ProductField::mass);

  m.def(
      "gaussian_density",
      [](const GridSpec& g, const std::vector<double>& mean, double sigma, double floor_rel) {
        DensitySpec spec;
        spec.kind = DensitySpec::Kind::Gaussian;
        spec.components = {{mean, sigma, 1.0}};
        spec.floor_rel = floor_rel;
        return ingest_density(g, spec);
      },
      py::arg("grid"), py::arg("mean"), py::arg("sigma"), py::arg("floor_rel") = 0.0);
  m.def(
      "mixture_density",
      [](const GridSpec& g, const std::vector<std::tuple<std::vector<double>, double, double>>& comps,
         double floor_rel) {
        DensitySpec spec;
        spec.kind = DensitySpec::Kind::Mixture;
        for (const auto& [mean, sigma, weight] : comps) spec.components.push_back({mean, sigma, weight});
        spec.floor_rel = floor_rel;
        return ingest_density(g, spec);
      },
      py::arg("grid"), py::arg("components"), py::arg("floor_rel") = 0.0);
  m.def(
      "uniform_density",
      [](const GridSpec& g, const std::vector<double>& lo, const std::vector<double>& hi) {
        DensitySpec spec;
        spec.kind = DensitySpec::Kind::UniformBox;
        spec.lo = lo;
        spec.hi = hi;
        return ingest_density(g, spec);
      },
      py::arg("grid"), py::arg("lo"), py::arg("hi"));
  m.def(
      "density_from_values",
      [](const GridSpec& g, py::array_t<double, py::array::c_style | py::array::forcecast> v,
         double floor_rel) {
        DensitySpec spec;
        spec.kind = DensitySpec::Kind::Values;
        spec.values = to_vector(v);
        spec.floor_rel = floor_rel;
        return ingest_density(g, spec);
      },
      py::arg("grid"), py::arg("values"), py::arg("floor_rel") = 0.0);
  m.def(
      "field_from_values",
      [](const GridSpec& g, int arity, py::array_t<double, py::array::c_style | py::array::forcecast> v) {
        ProductField f;
        f.grid = g;
        f.arity = arity;
        f.values = to_vector(v);
        if (static_cast<std::int64_t>(f.values.size()) != f.size())
          throw mmot::error("value array size does not match grid^arity");
        return f;
      },
      py::arg("grid"), py::arg("arity"), py::arg("values"));

  m.def("sqrt_density_h1", &sqrt_density_h1, py::arg("rho"));
  m.def("integrate", py::overload_cast<const DiscreteDensity&>(&integrate), py::arg("rho"));
  m.def("marginal", &marginal, py::arg("plan"), py::arg("axis"));

  m.def(
      "coulomb_cost",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> pts, int arity, int dim) {
        return coulomb_cost(to_vector(pts), arity, dim);
      },
      py::arg("points"), py::arg("arity"), py::arg("dim"));
  m.def(
      "truncated_cost",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> pts, int arity, int dim,
         double alpha) { return truncated_cost(to_vector(pts), arity, dim, alpha); },
      py::arg("points"), py::arg("arity"), py::arg("dim"), py::arg("alpha"));
  m.def(
      "product_plan",
      [](const DiscreteDensity& rho, int arity, std::int64_t cap) {
        return product_plan(rho, arity, cap);
      },
      py::arg("rho"), py::arg("arity"), py::arg("cap") = 2'000'000);
  m.def("symmetrize", &symmetrize, py::arg("plan"));
  m.def(
      "cost_of_plan",
      [](const ProductField& plan, const std::string& policy, double alpha) {
        return cost_of_plan(plan, make_cost(plan.arity, plan.grid.dim, policy, alpha));
      },
      py::arg("plan"), py::arg("diagonal") = "forbid", py::arg("alpha") = 0.0);
  m.def("diagonal_mass", &diagonal_mass, py::arg("plan"), py::arg("alpha"));
  m.def("support_gap", &support_gap, py::arg("plan"));

  py::class_<ConcentrationProfile>(m, "ConcentrationProfile")
      .def_readonly("radii", &ConcentrationProfile::radii)
      .def_readonly("values", &ConcentrationProfile::values)
      .def_readonly("limit_estimate", &ConcentrationProfile::limit_estimate);
  m.def("concentration_profile", &concentration_profile, py::arg("rho"), py::arg("radii"));
  m.def(
      "offdiag_radius",
      [](const DiscreteDensity& rho, int arity) -> py::object {
        auto r = offdiag_radius(rho, arity);
        if (!r) return py::none();
        return py::float_(*r);
      },
      py::arg("rho"), py::arg("arity"));

  py::class_<HolderBound>(m, "HolderBound")
      .def_readonly("bound", &HolderBound::bound)
      .def_readonly("f_norm", &HolderBound::f_norm)
      .def_readonly("f_radial_integral", &HolderBound::f_radial_integral)
      .def_readonly("g_sup", &HolderBound::g_sup)
      .def_readonly("rho_lp", &HolderBound::rho_lp);
  m.def("finite_cost_bound", &finite_cost_bound, py::arg("rho"), py::arg("arity"), py::arg("p"),
        py::arg("a"));
  m.def("finite_cost_bound_detail", &finite_cost_bound_detail, py::arg("rho"), py::arg("arity"),
        py::arg("p"), py::arg("a"));

  py::class_<PlanSolution>(m, "PlanSolution")
      .def_readonly("plan", &PlanSolution::plan)
      .def_readonly("cost", &PlanSolution::cost)
      .def_readonly("marginal_residuals", &PlanSolution::marginal_residuals)
      .def_readonly("iterations", &PlanSolution::iterations)
      .def_readonly("converged", &PlanSolution::converged)
      .def_readonly("feasible", &PlanSolution::feasible)
      .def_property_readonly("method", [](const PlanSolution& s) {
        return s.method == SolveMethod::ExactLp ? "exact-lp" : "entropic";
      });

  m.def(
      "solve_mmot",
      [](const DiscreteDensity& rho, int arity, const std::string& method,
         const std::string& policy, double trunc_alpha, std::int64_t cap,
         const std::vector<double>& eta_schedule, long max_iterations, double marginal_tol) {
        SolverParams params;
        params.cap = cap;
        if (!eta_schedule.empty()) params.eta_schedule = eta_schedule;
        params.max_iterations = max_iterations;
        params.marginal_tol = marginal_tol;
        const SolveMethod sm = method == "entropic" ? SolveMethod::Entropic : SolveMethod::ExactLp;
        if (method != "exact" && method != "entropic")
          throw mmot::error("method must be 'exact' or 'entropic'");
        return solve_mmot(rho, arity, sm, make_cost(arity, rho.grid.dim, policy, trunc_alpha),
                          params);
      },
      py::arg("rho"), py::arg("arity"), py::arg("method") = "exact",
      py::arg("diagonal") = "forbid", py::arg("trunc_alpha") = 0.0, py::arg("cap") = 2'000'000,
      py::arg("eta_schedule") = std::vector<double>{}, py::arg("max_iterations") = 5000,
      py::arg("marginal_tol") = 1e-8);

  m.def("mollifier_constant", &mollifier_constant, py::arg("dim"));
  m.def("discrete_kernel_energy", &discrete_kernel_energy, py::arg("dim"), py::arg("eps"),
        py::arg("samples"));
  m.def("mollify_density", &mollify_density, py::arg("rho"), py::arg("eps"));
  m.def("mollify_plan", &mollify_plan, py::arg("plan"), py::arg("eps"));
  m.def("restore_marginals", &restore_marginals, py::arg("p_tilde"), py::arg("rho"),
        py::arg("eps"));
  m.def("kinetic_energy", &kinetic_energy, py::arg("phi"));
  m.def("kinetic_bound", &kinetic_bound, py::arg("rho"), py::arg("eps"), py::arg("arity"));

  py::class_<SmoothedPlan>(m, "SmoothedPlan")
      .def_readonly("p_tilde", &SmoothedPlan::p_tilde)
      .def_readonly("p_restored", &SmoothedPlan::p_restored)
      .def_readonly("phi", &SmoothedPlan::phi)
      .def_readonly("eps", &SmoothedPlan::eps)
      .def_readonly("kinetic", &SmoothedPlan::kinetic)
      .def_readonly("kinetic_bound", &SmoothedPlan::kinetic_bound)
      .def_readonly("cost", &SmoothedPlan::cost)
      .def_readonly("recombined_cost", &SmoothedPlan::recombined_cost)
      .def_readonly("skipped_infinite_cost", &SmoothedPlan::skipped_infinite_cost);
  m.def(
      "smooth_plan",
      [](const ProductField& plan, const DiscreteDensity& rho, double eps,
         const std::string& policy, double alpha) {
        return smooth_plan(plan, rho, eps, make_cost(plan.arity, rho.grid.dim, policy, alpha));
      },
      py::arg("plan"), py::arg("rho"), py::arg("eps"), py::arg("diagonal") = "forbid",
      py::arg("alpha") = 0.0);
  m.def(
      "regularize_general",
      [](const ProductField& plan, const DiscreteDensity& rho, double r,
         const std::string& policy, double alpha) {
        SolverParams params;
        return regularize_general(plan, rho, r,
                                  make_cost(plan.arity, rho.grid.dim, policy, alpha), params);
      },
      py::arg("plan"), py::arg("rho"), py::arg("r"), py::arg("diagonal") = "forbid",
      py::arg("alpha") = 0.0);
  m.def("bl_distance_diagnostic", &bl_distance_diagnostic, py::arg("a"), py::arg("b"),
        py::arg("seed") = 0, py::arg("num_test_functions") = 8);

  py::class_<AuxiliaryPair>(m, "AuxiliaryPair")
      .def_readonly("r", &AuxiliaryPair::r)
      .def_readonly("k", &AuxiliaryPair::k)
      .def("a", &AuxiliaryPair::a, py::arg("t"))
      .def("b", &AuxiliaryPair::b, py::arg("t"))
      .def("da", &AuxiliaryPair::da, py::arg("t"))
      .def("db", &AuxiliaryPair::db, py::arg("t"));
  m.def(
      "aux_pair",
      [](double r, const std::string& variant) { return aux_pair(r, parse_variant(variant)); },
      py::arg("r"), py::arg("variant") = "trig");
  m.def(
      "g_factors",
      [](const std::vector<double>& x, const std::vector<double>& y, int dim,
         const AuxiliaryPair& aux) {
        if (static_cast<int>(x.size()) != dim || static_cast<int>(y.size()) != dim)
          throw mmot::error("point size does not match dimension");
        return g_factors(x.data(), y.data(), dim, aux);
      },
      py::arg("x"), py::arg("y"), py::arg("dim"), py::arg("aux"));

  py::class_<SpinWaveFunction>(m, "SpinWaveFunction")
      .def_readonly("grid", &SpinWaveFunction::grid)
      .def_readonly("arity", &SpinWaveFunction::arity)
      .def_readonly("dim", &SpinWaveFunction::dim)
      .def_readonly("alpha", &SpinWaveFunction::alpha)
      .def_readonly("aux_k", &SpinWaveFunction::aux_k)
      .def_readonly("gradient_constant", &SpinWaveFunction::gradient_constant)
      .def_readonly("source", &SpinWaveFunction::source)
      .def_property_readonly("statistics",
                             [](const SpinWaveFunction& w) {
                               return w.statistics == Statistics::Bosonic ? "bosonic"
                                                                          : "fermionic";
                             })
      .def_property_readonly("components",
                             [](const SpinWaveFunction& w) {
                               py::list out;
                               const std::vector<std::complex<double>> zeros(
                                   w.source.size(), {0.0, 0.0});
                               for (const auto& comp : w.components) {
                                 const auto& src = comp.empty() ? zeros : comp;
                                 out.append(py::array_t<std::complex<double>>(
                                     static_cast<py::ssize_t>(src.size()), src.data()));
                               }
                               return out;
                             })
      .def("density", [](const SpinWaveFunction& w) { return to_array(w.density()); })
      .def("kinetic", &SpinWaveFunction::kinetic);
  m.def("build_fermionic", &build_fermionic, py::arg("psi"), py::arg("alpha"), py::arg("aux"));
  m.def("build_bosonic", &build_bosonic, py::arg("psi"));

  py::class_<StatisticsReport>(m, "StatisticsReport")
      .def_readonly("max_antisymmetry_violation", &StatisticsReport::max_antisymmetry_violation)
      .def_readonly("max_symmetry_violation", &StatisticsReport::max_symmetry_violation)
      .def_readonly("max_density_error", &StatisticsReport::max_density_error)
      .def_readonly("min_gradient_margin", &StatisticsReport::min_gradient_margin)
      .def_readonly("antisymmetry_checked", &StatisticsReport::antisymmetry_checked);
  m.def("verify_statistics", &verify_statistics, py::arg("wavefunction"));

  py::class_<AlphaProfile>(m, "AlphaProfile")
      .def(py::init([](const std::vector<double>& eps, const std::vector<double>& alpha) {
             AlphaProfile p;
             p.eps = eps;
             p.alpha = alpha;
             return p;
           }),
           py::arg("eps"), py::arg("alpha"))
      .def_readonly("eps", &AlphaProfile::eps)
      .def_readonly("alpha", &AlphaProfile::alpha);
  m.def(
      "epsilon_schedule",
      [](double hbar, const std::string& statistics, const AlphaProfile* profile) {
        return epsilon_schedule(hbar, parse_statistics(statistics), profile);
      },
      py::arg("hbar"), py::arg("statistics"), py::arg("profile") = nullptr);
  m.def(
      "vee_of",
      [](const SpinWaveFunction& wf, const std::string& policy, double alpha) {
        return vee_of(wf, make_cost(wf.arity, wf.grid.dim, policy, alpha));
      },
      py::arg("wavefunction"), py::arg("diagonal") = "forbid", py::arg("alpha") = 0.0);

  py::class_<HkResult>(m, "HkResult")
      .def_readonly("kinetic_term", &HkResult::kinetic_term)
      .def_readonly("interaction_term", &HkResult::interaction_term)
      .def_readonly("upper_bound", &HkResult::upper_bound)
      .def_readonly("eps", &HkResult::eps)
      .def_readonly("alpha", &HkResult::alpha);
  m.def(
      "hk_upper_bound",
      [](const DiscreteDensity& rho, double hbar, const std::string& statistics,
         const std::string& policy) {
        SolverParams params;
        return hk_upper_bound(rho, hbar, parse_statistics(statistics),
                              make_cost(2, rho.grid.dim, policy, 0.0), params);
      },
      py::arg("rho"), py::arg("hbar"), py::arg("statistics") = "bosonic",
      py::arg("diagonal") = "forbid");

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("hbar", &SweepRow::hbar)
      .def_readonly("eps", &SweepRow::eps)
      .def_readonly("alpha", &SweepRow::alpha)
      .def_readonly("kinetic", &SweepRow::kinetic)
      .def_readonly("vee", &SweepRow::vee)
      .def_readonly("upper", &SweepRow::upper)
      .def_readonly("c_ref", &SweepRow::c_ref)
      .def_readonly("gap", &SweepRow::gap);
  py::class_<SweepReport>(m, "SweepReport")
      .def_readonly("rows", &SweepReport::rows)
      .def_readonly("c_ref", &SweepReport::c_ref)
      .def_readonly("provenance", &SweepReport::provenance)
      .def_readonly("complete", &SweepReport::complete)
      .def("csv", [](const SweepReport& r) { return sweep_csv(r); });
  m.def(
      "sweep",
      [](const DiscreteDensity& rho, const std::vector<double>& hbars,
         const std::string& statistics, int arity, const std::string& policy) {
        SolverParams params;
        return sweep(rho, hbars, parse_statistics(statistics),
                     make_cost(arity, rho.grid.dim, policy, 0.0), params, "");
      },
      py::arg("rho"), py::arg("hbars"), py::arg("statistics") = "bosonic", py::arg("arity") = 2,
      py::arg("diagonal") = "forbid");

  m.def(
      "write_dgf1",
      [](const std::string& path, const DiscreteDensity& rho) { write_dgf1(path, rho); },
      py::arg("path"), py::arg("rho"));
  m.def(
      "write_dgf1_field",
      [](const std::string& path, const ProductField& f) { write_dgf1(path, f); },
      py::arg("path"), py::arg("field"));
  m.def(
      "read_dgf1",
      [](const std::string& path) {
        Dgf1Data d = read_dgf1(path);
        return py::make_tuple(d.dim, d.arity, d.points_per_axis, to_array(d.values));
      },
      py::arg("path"));
}
