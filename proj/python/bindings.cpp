#include "diagsym/config.hpp"
#include "diagsym/oracle.hpp"
#include "diagsym/runner.hpp"
#include "diagsym/scan.hpp"
#include "diagsym/symmetrize.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

namespace py = pybind11;
using namespace diagsym;

namespace {

// Configs and reports cross the boundary as JSON text; the Python side wraps them.
ExperimentConfig config_from(const std::string& text) { return parse_config(parse_document(text)); }

RunOptions options(const std::string& out, const std::optional<std::string>& checkpoint, bool quiet) {
  RunOptions o;
  o.out = out;
  if (checkpoint) o.checkpoint = *checkpoint;
  o.quiet = quiet;
  return o;
}

Configuration configuration(const Wavefunction& psi, const Mat& positions) {
  if (positions.rows() != psi.n_electrons() || positions.cols() != psi.dim())
    throw ConfigError("positions must be " + std::to_string(psi.n_electrons()) + " x " + std::to_string(psi.dim()));
  return {positions, psi.spin_layout()};
}

std::unique_ptr<Wavefunction> wavefunction(const ExperimentConfig& c, const std::optional<std::string>& checkpoint) {
  const Ansatz a = checkpoint ? load_checkpoint(*checkpoint, c) : build_initial_ansatz(c);
  const SpaceGroup g = build_group(c);
  const std::string& m = c.method.name;
  if (m == "pa" || m == "ga") return std::make_unique<GroupAveraged>(a, g.subset(build_subset(c, g)));
  if (m == "pc" || m == "sc") return std::make_unique<SmoothedCanonical>(a, g, build_region(c), build_smoothing(c));
  return std::make_unique<Ansatz>(a);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "diagonal symmetrization laboratory";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());
  py::register_exception<CheckpointError>(m, "CheckpointError", base.ptr());

  m.def("canonical_config", [](const std::string& text) { return emit_config(config_from(text)).dump(); },
        py::arg("text"));
  m.def("validate_config", [](const std::string& text, const std::string& stage) { validate_config(config_from(text), stage); },
        py::arg("text"), py::arg("stage"));

  m.def(
      "run_stage",
      [](const std::string& stage, const std::string& text, const std::string& out,
         const std::optional<std::string>& checkpoint, bool quiet) {
        const ExperimentConfig c = config_from(text);
        py::gil_scoped_release release;
        return run_stage(stage, c, options(out, checkpoint, quiet)).dump();
      },
      py::arg("stage"), py::arg("text"), py::arg("out"), py::arg("checkpoint") = std::nullopt, py::arg("quiet") = true);

  m.def(
      "oracle_levels",
      [](const std::string& text, int count) {
        const ExperimentConfig c = config_from(text);
        const SpectrumResult s = diagonalize(build_hamiltonian(c), c.oracle.cutoff, count);
        return std::vector<double>(s.eigenvalues.begin(), s.eigenvalues.begin() + std::min<std::size_t>(count, s.eigenvalues.size()));
      },
      py::arg("text"), py::arg("count") = 4);

  m.def(
      "evaluate",
      [](const std::string& text, const Mat& positions, const std::optional<std::string>& checkpoint) {
        const ExperimentConfig c = config_from(text);
        const auto psi = wavefunction(c, checkpoint);
        const Configuration x = configuration(*psi, positions);
        const auto e = psi->evaluate(x);
        const double el = e.is_node() ? std::numeric_limits<double>::quiet_NaN() : local_energy(build_hamiltonian(c), x, e);
        py::dict d;
        d["sign"] = e.sign;
        d["log_abs"] = e.log_abs;
        d["grad_x"] = e.grad_x;
        d["laplacian_over_psi"] = e.laplacian_over_psi;
        d["local_energy"] = el;
        return d;
      },
      py::arg("text"), py::arg("positions"), py::arg("checkpoint") = std::nullopt,
      "log|psi|, sign, derivatives and local energy of the configured wavefunction (method og, pa/ga or pc/sc).");

  m.def(
      "symmetry_error",
      [](const std::string& text, const Mat& base, int resolution, const std::optional<std::string>& checkpoint) {
        const ExperimentConfig c = config_from(text);
        const auto psi = wavefunction(c, checkpoint);
        const SpaceGroup g = build_group(c);
        const ScanGrid grid = scan(*psi, g, configuration(*psi, base), resolution, c.scan.axes);
        const SymmetryErrorMap err = symmetry_error(grid, g);
        py::dict d;
        d["values"] = grid.values;
        d["error"] = err.error;
        d["max"] = err.max;
        d["relations_checked"] = err.relations_checked;
        d["relations_satisfied"] = err.relations_satisfied;
        return d;
      },
      py::arg("text"), py::arg("base"), py::arg("resolution") = 51, py::arg("checkpoint") = std::nullopt);

  m.def("builtin_groups", [] {
    std::vector<std::tuple<std::string, std::string, std::string>> out;
    for (const auto& g : builtin_groups()) out.emplace_back(g.name, to_string(g.lattice), g.description);
    return out;
  });
  m.def(
      "group_elements",
      [](const std::string& name) {
        const SpaceGroup group = builtin_group(name);
        std::vector<std::pair<Mat, Vec>> out;
        for (const auto& g : group.elements()) out.emplace_back(g.rotation, g.translation);
        return out;
      },
      py::arg("name"));
}
