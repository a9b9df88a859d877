#include "bggm/cli.hpp"
#include "bggm/error.hpp"
#include "bggm/synthetic.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace bggm;

namespace {

// 1 and 2 for the classes, 0 for unknown.
std::vector<int> label_codes(const std::vector<ClassLabel>& labels) {
  std::vector<int> out;
  for (ClassLabel l : labels) out.push_back(l == ClassLabel::unknown ? 0 : static_cast<int>(class_index(l)) + 1);
  return out;
}

std::vector<ClassLabel> labels_from_codes(const std::vector<int>& codes) {
  std::vector<ClassLabel> out;
  for (int c : codes) {
    if (c == 0) out.push_back(ClassLabel::unknown);
    else if (c == 1 || c == 2) out.push_back(class_from_index(static_cast<std::size_t>(c - 1)));
    else throw ValidationError("labels must be 0 (unknown), 1 or 2");
  }
  return out;
}

py::dict simulate(Index p, std::size_t n_conserved, std::size_t n_differential, std::size_t n1, std::size_t n2,
                  std::uint64_t seed) {
  ModelSpec spec;
  spec.p = p;
  spec.n_conserved = n_conserved;
  spec.n_differential = n_differential;
  spec.seed = seed;
  const TrueModel m = generate_model(spec);
  const Dataset d = sample_data(m, n1, n2, Rng(seed).split(1).seed());
  py::dict out;
  out["y"] = d.y;
  out["labels"] = label_codes(d.labels);
  out["names"] = d.names;
  out["adjacency1"] = m.adjacency[0];
  out["adjacency2"] = m.adjacency[1];
  out["partial_corr1"] = m.partial_corr[0];
  out["partial_corr2"] = m.partial_corr[1];
  return out;
}

py::dict fit(const Matrix& y, const std::vector<int>& labels, std::vector<std::string> names, std::size_t iterations,
             std::size_t burn_in, std::size_t thin, std::uint64_t seed) {
  Dataset d;
  d.y = y;
  d.labels = labels_from_codes(labels);
  if (names.empty())
    for (Index i = 0; i < y.cols(); ++i) names.push_back("X" + std::to_string(i + 1));
  d.names = std::move(names);
  ChainConfig cfg;
  cfg.iterations = iterations;
  cfg.burn_in = burn_in;
  cfg.thin = thin;
  cfg.seed = seed;
  ChainSamples samples;
  {
    py::gil_scoped_release release;
    samples = run_chain(d, default_hyperparameters(d.p()), cfg);
  }
  const PosteriorSummary s = summarize(samples);
  py::dict out;
  out["ppi1"] = s.ppi[0];
  out["ppi2"] = s.ppi[1];
  out["ppi_diff"] = s.ppi_diff;
  out["partial_corr1"] = s.mean_partial_corr[0];
  out["partial_corr2"] = s.mean_partial_corr[1];
  out["class1_probability"] = s.class1_probability;
  out["unknown_rows"] = s.unknown_rows;
  out["draws"] = samples.draws.size();
  out["invariant_violations"] = samples.invariant_violations;
  return out;
}

py::tuple cli(const std::vector<std::string>& args) {
  std::vector<std::string> full{"bggm"};
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : full) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bayesian two-class graphical models: sampler, inference and CLI entry point";
  m.attr("__version__") = std::string(kToolVersion);

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def(
      "admissible_interval",
      [](const Matrix& c, Index i, Index j) {
        const Interval iv = admissible_interval(c, i, j);
        return py::make_tuple(iv.lower, iv.upper);
      },
      py::arg("c"), py::arg("i"), py::arg("j"), "Range of C[i, j] keeping C positive definite.");
  m.def(
      "fdr_threshold",
      [](const std::vector<double>& probs, double alpha) {
        const FdrThreshold t = fdr_threshold(probs, alpha);
        return py::make_tuple(t.selected, t.phi);
      },
      py::arg("probs"), py::arg("alpha"), "Bayesian FDR cut: (number selected, PPI threshold).");
  m.def("simulate", &simulate, py::arg("p") = 10, py::arg("n_conserved") = 8, py::arg("n_differential") = 4,
        py::arg("n1") = 100, py::arg("n2") = 100, py::arg("seed") = 1);
  m.def("fit", &fit, py::arg("y"), py::arg("labels"), py::arg("names") = std::vector<std::string>{},
        py::arg("iterations") = 5000, py::arg("burn_in") = 1000, py::arg("thin") = 1, py::arg("seed") = 1);
  m.def("cli", &cli, py::arg("args"), "Run the command-line tool in-process: (exit code, stdout, stderr).");
}
