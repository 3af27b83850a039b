#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nlslab/config.hpp"
#include "nlslab/error.hpp"
#include "nlslab/evolve.hpp"
#include "nlslab/experiments.hpp"
#include "nlslab/fields.hpp"
#include "nlslab/groundstate.hpp"
#include "nlslab/modulation.hpp"
#include "nlslab/spectral.hpp"

namespace py = pybind11;
using namespace nlslab;

namespace {

py::array_t<double> as_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::array_t<cplx> field_values(const FieldState& u) {
  if (u.d() == 1) return py::array_t<cplx>(u.values.size(), u.values.data());
  return py::array_t<cplx>({u.n(), u.n()}, u.values.data());
}

void set_field_values(FieldState& u, py::array_t<cplx, py::array::c_style | py::array::forcecast> a) {
  if (static_cast<std::size_t>(a.size()) != u.grid.size()) throw std::invalid_argument("array size does not match grid");
  u.values.assign(a.data(), a.data() + a.size());
}

}  // namespace

PYBIND11_MODULE(_nlslab, m) {
  m.doc() = "nlslab: ground states, linearized spectra, modulation and split-step evolution for mass-critical NLS";
  m.attr("__version__") = "0.1.0";

  static py::exception<Error> err(m, "NlslabError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(err, (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  // groundstate
  py::class_<RadialProfile>(m, "RadialProfile")
      .def_readonly("d", &RadialProfile::d)
      .def_property_readonly("r", [](const RadialProfile& p) { return as_array(p.r_grid); })
      .def_property_readonly("q", [](const RadialProfile& p) { return as_array(p.q); })
      .def_property_readonly("dq", [](const RadialProfile& p) { return as_array(p.dq); })
      .def_readonly("q0", &RadialProfile::q0)
      .def_readonly("delta", &RadialProfile::delta)
      .def_readonly("mass_sq", &RadialProfile::mass_sq)
      .def_readonly("r_max", &RadialProfile::r_max);
  m.def(
      "solve_ground_state",
      [](int d, double tol, double r_max, double tol_ode) {
        GroundStateOptions o;
        o.tol = tol;
        o.r_max = r_max;
        o.tol_ode = tol_ode;
        return solve_ground_state(d, o);
      },
      py::arg("d"), py::arg("tol") = 1e-10, py::arg("r_max") = 0.0, py::arg("tol_ode") = 1e-8);
  m.def("evaluate_radial", [](const RadialProfile& p, const std::vector<double>& r) {
    return as_array(evaluate_radial(p, r));
  });
  m.def("pohozaev_energy", &pohozaev_energy);
  m.def("gn_sharp_constant", &gn_sharp_constant);
  m.def("gradient_ratio_sup", &gradient_ratio_sup, py::arg("profile"), py::arg("alpha"));
  m.def("profile_norms", [](const RadialProfile& p) {
    const auto n = profile_norms(p);
    py::dict out;
    out["mass_sq"] = n.mass_sq;
    out["grad_sq"] = n.grad_sq;
    out["potential"] = n.potential;
    out["xq_sq"] = n.xq_sq;
    return out;
  });

  // spectral
  py::class_<SpectralData>(m, "SpectralData")
      .def_readonly("d", &SpectralData::d)
      .def_readonly("lambda_d", &SpectralData::lambda_d)
      .def_readonly("gap", &SpectralData::gap)
      .def_readonly("kernel_ell1", &SpectralData::kernel_ell1)
      .def_readonly("lminus_ground", &SpectralData::lminus_ground)
      .def_readonly("chi0_norm", &SpectralData::chi0_norm)
      .def_readonly("coercivity", &SpectralData::coercivity)
      .def("chi0", [](const SpectralData& s, double r) { return s.chi0.value(r); });
  m.def(
      "compute_spectral_data",
      [](const RadialProfile& p, int n, double radius) {
        SectorOptions o;
        o.n = n;
        o.radius = radius;
        return compute_spectral_data(p, o);
      },
      py::arg("profile"), py::arg("n") = 800, py::arg("radius") = 20.0);
  m.def(
      "operator_identities",
      [](const RadialProfile& p, double tol) {
        const auto rep = operator_identity_suite(p, {}, tol);
        py::list out;
        for (const auto& e : rep.entries) out.append(py::make_tuple(e.name, e.residual, e.expected_zero));
        return out;
      },
      py::arg("profile"), py::arg("tol") = 1e-5);
  m.def(
      "coercivity_trials",
      [](const SpectralData& s, const RadialProfile& p, int trials, std::uint64_t seed) {
        CoercivityOptions o;
        o.seed = seed;
        const auto r = coercivity_trials(s, p, trials, o);
        py::dict out;
        out["minimum"] = r.minimum;
        out["mean"] = r.mean;
        out["positive"] = r.positive;
        out["trials"] = r.trials;
        out["max_constraint"] = r.max_constraint;
        return out;
      },
      py::arg("spectral"), py::arg("profile"), py::arg("trials") = 100, py::arg("seed") = 1);

  // fields
  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init([](int d, int n, double box) {
             GridSpec g{d, n, box};
             g.validate();
             return g;
           }),
           py::arg("d"), py::arg("n"), py::arg("box"))
      .def_readonly("d", &GridSpec::d)
      .def_readonly("n", &GridSpec::n)
      .def_readonly("box", &GridSpec::box)
      .def_property_readonly("dx", &GridSpec::dx)
      .def_property_readonly("axis", [](const GridSpec& g) { return as_array(g.axis()); });
  py::class_<FieldState>(m, "FieldState")
      .def(py::init([](const GridSpec& g, double t) { return FieldState(g, t); }), py::arg("grid"), py::arg("t") = 0.0)
      .def_readonly("grid", &FieldState::grid)
      .def_readwrite("t", &FieldState::t)
      .def_property("values", &field_values, &set_field_values);
  py::class_<SolitonParams>(m, "SolitonParams")
      .def(py::init([](double lambda, double gamma, std::array<double, 2> x0, std::array<double, 2> xi) {
             return SolitonParams{lambda, gamma, x0, xi};
           }),
           py::arg("lam") = 1.0, py::arg("gamma") = 0.0, py::arg("x0") = std::array<double, 2>{0, 0},
           py::arg("xi") = std::array<double, 2>{0, 0})
      .def_readwrite("lam", &SolitonParams::lambda)
      .def_readwrite("gamma", &SolitonParams::gamma)
      .def_readwrite("x0", &SolitonParams::x0)
      .def_readwrite("xi", &SolitonParams::xi);
  m.def("synthesize_soliton", &synthesize_soliton, py::arg("profile"), py::arg("params"), py::arg("grid"),
        py::arg("t") = 0.0);
  m.def("mass", &mass);
  m.def("kinetic", &kinetic);
  m.def("energy", &energy, py::arg("u"), py::arg("sign") = 1);
  m.def("momentum", &momentum);
  m.def("virial", &virial, py::arg("u"), py::arg("tail_tol") = 1e-8);
  m.def("morawetz_potential", &morawetz_potential, py::arg("u"), py::arg("radius"));
  m.def("scaling_transform", &scaling_transform);
  m.def("galilean_transform", &galilean_transform);
  m.def("pseudoconformal_transform", &pseudoconformal_transform);
  m.def("gn_check", &gn_check, py::arg("u"), py::arg("c_d"), py::arg("slack") = 1e-10);

  // evolve
  m.def("step", &step, py::arg("u"), py::arg("dt"), py::arg("sign") = 1, py::arg("dealias") = false);
  m.def(
      "evolve",
      [](const FieldState& u0, double dt, double t_end, int record_every, int sign) {
        EvolveConfig c;
        c.dt = dt;
        c.t_end = t_end;
        c.record_every = record_every;
        c.sign = sign;
        const auto r = run(u0, c, {}, false);
        const auto drift = conservation_report(r.log);
        py::dict out;
        std::vector<double> t, ms, en;
        for (const auto& row : r.log) {
          t.push_back(row.t);
          ms.push_back(row.mass);
          en.push_back(row.energy);
        }
        out["t"] = as_array(t);
        out["mass"] = as_array(ms);
        out["energy"] = as_array(en);
        out["mass_drift"] = drift.mass_drift;
        out["energy_drift"] = drift.energy_drift;
        out["termination"] = to_string(r.cause);
        return out;
      },
      py::arg("u0"), py::arg("dt"), py::arg("t_end"), py::arg("record_every") = 10, py::arg("sign") = 1);

  // modulation
  py::class_<ModulationBasis>(m, "ModulationBasis")
      .def(py::init<const RadialProfile&, const SpectralData&>(), py::keep_alive<1, 2>())
      .def_property_readonly("q_norm", &ModulationBasis::q_norm);
  py::class_<Decomposition>(m, "Decomposition")
      .def_readonly("params", &Decomposition::params)
      .def_readonly("residuals", &Decomposition::residuals)
      .def_readonly("distance", &Decomposition::distance)
      .def_readonly("proximity", &Decomposition::proximity)
      .def_readonly("iterations", &Decomposition::iterations)
      .def_readonly("epsilon", &Decomposition::epsilon);
  m.def(
      "decompose",
      [](const FieldState& u, const ModulationBasis& b, const SolitonParams& guess, double alpha, double tol_orth) {
        DecomposeOptions o;
        o.alpha = alpha;
        o.tol_orth = tol_orth;
        return decompose(u, b, guess, o);
      },
      py::arg("u"), py::arg("basis"), py::arg("guess") = SolitonParams{}, py::arg("alpha") = 0.3,
      py::arg("tol_orth") = 1e-9);
  m.def("decomposition_of_soliton", &decomposition_of_soliton);

  // configuration and presets
  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def("__eq__", [](const RunConfig& a, const RunConfig& b) { return a == b; })
      .def("set", &set_config_value)
      .def_readwrite("experiment", &RunConfig::experiment)
      .def_readwrite("dimension", &RunConfig::dimension)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("output_dir", &RunConfig::output_dir)
      .def_readwrite("n", &RunConfig::n)
      .def_readwrite("box", &RunConfig::box)
      .def_readwrite("trials", &RunConfig::trials)
      .def_readwrite("dt", &RunConfig::dt)
      .def_readwrite("t_end", &RunConfig::t_end);
  m.def("parse_config", &parse_config);
  m.def("serialize_config", &serialize_config);
  m.def("run_experiment", [](const RunConfig& c) {
    const auto r = run_experiment(c);
    return py::make_tuple(r.status, r.summary_json, r.failures);
  });
}
