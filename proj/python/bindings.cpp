#include "semibloch/bloch.hpp"
#include "semibloch/commands.hpp"
#include "semibloch/config.hpp"
#include "semibloch/errors.hpp"
#include "semibloch/experiments.hpp"
#include "semibloch/fit.hpp"
#include "semibloch/geometry.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace semibloch;

namespace {

py::dict band_dict(const BlochSpectrum& s) {
  MatX frac(static_cast<Eigen::Index>(s.n_k()), s.grid.dim());
  for (std::size_t k = 0; k < s.n_k(); ++k) frac.row(static_cast<Eigen::Index>(k)) = s.grid.fractional(k).transpose();
  py::dict d;
  d["k_fractional"] = frac;
  d["energies"] = s.energies;
  d["solver"] = s.model->describe();
  d["converged"] = s.convergence.converged;
  d["warnings"] = s.convergence.warnings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "semiclassical Bloch-electron dynamics";
  m.attr("__version__") = version();

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  static py::exception<ConfigError> config_error(m, "ConfigError", base.ptr());
  static py::exception<NondegeneracyError> nondeg(m, "NondegeneracyError", base.ptr());
  static py::exception<FitError> fit_error(m, "FitError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const NondegeneracyError& e) {
      py::set_error(nondeg, e.what());
    } catch (const FitError& e) {
      py::set_error(fit_error, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  m.def(
      "fit_order",
      [](const std::vector<double>& eps, const std::vector<double>& err) {
        OrderFit f = fit_order(eps, err);
        return py::make_tuple(f.order, f.intercept, f.residual);
      },
      py::arg("eps"), py::arg("errors"), "log-log least squares: (order, intercept, rms residual)");

  m.def(
      "check_config",
      [](const std::string& text, const std::string& source) {
        RunConfig c = parse_config(text, source);
        py::dict d;
        d["dim"] = static_cast<int>(c.lattice_rows.rows());
        d["solver"] = c.potential.solver;
        d["eps"] = c.eps;
        d["grid"] = c.grid;
        d["hash"] = c.hash;
        return d;
      },
      py::arg("text"), py::arg("source") = "<string>", "parse and validate a YAML configuration");

  m.def(
      "bands",
      [](const std::string& text) {
        RunConfig c = parse_config(text);
        SolveOptions o;
        o.n_bands = c.bands;
        o.strict = c.strict;
        KGrid grid(make_lattice(c), c.grid);
        BlochSpectrum s = c.potential.solver == "plane-wave"
                              ? solve_bands(make_potential(c), PlaneWaveBasis(make_lattice(c), plane_wave_cutoff(c)),
                                            grid, o)
                              : solve_bands(make_hamiltonian(c), grid, o);
        return band_dict(s);
      },
      py::arg("config_text"), "band energies on the configured grid");

  m.def(
      "free_bands",
      [](const Eigen::MatrixXd& rows, double cutoff, const std::vector<int>& grid) {
        Lattice lat = Lattice::from_rows(Mat(rows));
        SolveOptions o;
        o.check_convergence = false;
        return band_dict(solve_bands(PeriodicPotential::zero(lat), PlaneWaveBasis(lat, cutoff), KGrid(lat, grid), o));
      },
      py::arg("rows"), py::arg("cutoff"), py::arg("grid"), "V = 0 bands of a lattice given by basis rows");

  m.def(
      "run",
      [](const std::string& command, const std::string& config_path, const std::string& out, int threads,
         bool strict) {
        RunConfig c = load_config(config_path);
        CommandOptions o;
        o.out = out;
        o.threads = threads;
        o.strict = strict;
        CommandResult r;
        {
          py::gil_scoped_release release;
          r = run_command(command, c, o);
        }
        py::dict d;
        d["exit_code"] = r.exit_code;
        d["dir"] = r.dir.string();
        d["error"] = r.error;
        d["lines"] = r.lines;
        return d;
      },
      py::arg("command"), py::arg("config"), py::arg("out") = "", py::arg("threads") = 0, py::arg("strict") = false,
      "run a subcommand; returns exit code, artifact directory and summary lines");

  m.def("criteria", []() { return criterion_ids(); });
  m.def(
      "run_criterion",
      [](int id, int threads) {
        CriterionResult r;
        {
          py::gil_scoped_release release;
          r = run_criterion(id, threads);
        }
        py::list checks;
        for (const auto& c : r.checks) {
          py::dict d;
          d["name"] = c.name;
          d["value"] = c.value;
          d["pass"] = c.pass;
          d["rule"] = c.describe();
          checks.append(d);
        }
        py::dict d;
        d["id"] = r.id;
        d["title"] = r.title;
        d["pass"] = r.pass();
        d["seconds"] = r.seconds;
        d["checks"] = checks;
        d["notes"] = r.info;
        return d;
      },
      py::arg("id"), py::arg("threads") = 1);
}
