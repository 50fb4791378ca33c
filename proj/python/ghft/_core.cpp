#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ghft/runner.hpp"

namespace py = pybind11;
using namespace ghft;

namespace {

std::unique_ptr<GreenModel> model_for(const ScenarioConfig& cfg, const std::string& name, LatticePtr lat) {
    if (name == "scalar") return std::make_unique<ScalarModel>(lat, cfg.scalar_m2, cfg.scalar_xi);
    if (name == "dirac") return std::make_unique<DiracModel>(lat, cfg.dirac_m);
    if (name == "proca") return std::make_unique<ProcaModel>(lat, cfg.proca_m2);
    throw ConfigError("unknown model '" + name + "'");
}

py::dict config_dict(const ScenarioConfig& c) {
    py::dict d;
    d["n_t"] = c.spacetime.n_t;
    d["n_x"] = c.spacetime.n_x;
    d["dt"] = c.spacetime.dt;
    d["dx"] = c.spacetime.dx;
    d["scalar_m2"] = c.scalar_m2;
    d["scalar_xi"] = c.scalar_xi;
    d["dirac_m"] = c.dirac_m;
    d["proca_m2"] = c.proca_m2;
    d["suites"] = c.suites;
    d["output_dir"] = c.output_dir;
    return d;
}

std::string out_dir_for(const ScenarioConfig& cfg, const std::optional<std::string>& out) {
    return out ? *out : resolve_output_dir(cfg);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Lattice Green operators and field algebras";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    m.def("load_config", [](const std::string& path) { return config_dict(load_config(path)); }, py::arg("path"));

    m.def(
        "check",
        [](const std::string& path, std::optional<std::string> out, bool parallel) {
            ScenarioConfig cfg = load_config(path);
            RunResult res;
            {
                py::gil_scoped_release release;
                res = run_scenario(cfg, out_dir_for(cfg, out), parallel);
            }
            py::list rows;
            for (const auto& s : res.suites)
                for (const auto& r : s.rows) rows.append(py::make_tuple(r.suite, r.check, r.measured, r.threshold, r.pass));
            return py::make_tuple(res.pass(), rows);
        },
        py::arg("config"), py::arg("out_dir") = py::none(), py::arg("parallel") = false,
        "Runs the configured suites; returns (all passed, [(suite, check, measured, threshold, pass)]).");

    m.def(
        "algebra",
        [](const std::string& path, const std::string& expr, std::optional<std::string> out) {
            ScenarioConfig cfg = load_config(path);
            return run_algebra(cfg, expr, out_dir_for(cfg, out));
        },
        py::arg("config"), py::arg("expr"), py::arg("out_dir") = py::none(),
        "Normal form of an expression over the configured registry.");

    m.def(
        "green",
        [](const std::string& path, const std::string& model, py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> source,
           const std::string& which) {
            ScenarioConfig cfg = load_config(path);
            LatticePtr lat = make_lattice(cfg.spacetime);
            auto mdl = model_for(cfg, model, lat);
            const int fiber = mdl->dynamics().fiber();
            if (source.ndim() != 3 || source.shape(0) != lat->n_t || source.shape(1) != lat->n_x || source.shape(2) != fiber)
                throw PreconditionError("source must have shape (n_t, n_x, fiber) = (" + std::to_string(lat->n_t) + ", " +
                                        std::to_string(lat->n_x) + ", " + std::to_string(fiber) + ")");
            Section f(lat, fiber, mdl->dynamics().kind());
            auto in = source.unchecked<3>();
            for (int k = 0; k < lat->n_t; ++k)
                for (int j = 0; j < lat->n_x; ++j)
                    for (int c = 0; c < fiber; ++c) {
                        const std::complex<double> v = in(k, j, c);
                        if (f.kind() == ScalarKind::real && v.imag() != 0.0)
                            throw PreconditionError("imaginary part in a real source");
                        f(k, j, c) = v;
                    }
            Section u;
            {
                py::gil_scoped_release release;
                if (which == "causal")
                    u = causal_propagator(*mdl, f);
                else if (which == "retarded" || which == "advanced")
                    u = green_apply(*mdl, f, which == "retarded" ? Which::retarded : Which::advanced);
                else
                    throw ConfigError("which must be retarded, advanced or causal");
            }
            py::array_t<std::complex<double>> res({lat->n_t, lat->n_x, fiber});
            auto o = res.mutable_unchecked<3>();
            for (int k = 0; k < lat->n_t; ++k)
                for (int j = 0; j < lat->n_x; ++j)
                    for (int c = 0; c < fiber; ++c) o(k, j, c) = u(k, j, c);
            return res;
        },
        py::arg("config"), py::arg("model"), py::arg("source"), py::arg("which") = "retarded",
        "E+, E- or E = E- - E+ of a (n_t, n_x, fiber) source on the configured lattice.");

    m.def(
        "clifford_check",
        [](std::uint64_t seed) {
            CliffordReport r = clifford_check(GammaRep::chiral(), seed);
            py::list out;
            for (const auto& c : r.checks) out.append(py::make_tuple(c.name, c.pass));
            return out;
        },
        py::arg("seed") = 1);
}
