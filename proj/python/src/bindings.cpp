#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ssm/dataset.hpp"
#include "ssm/diagnostics.hpp"
#include "ssm/inference.hpp"
#include "ssm/model.hpp"
#include "ssm/viz.hpp"

namespace py = pybind11;
using namespace ssm;

namespace {

Dataset dataset_from_arrays(py::array_t<int, py::array::c_style | py::array::forcecast> choices,
                            py::array_t<double, py::array::c_style | py::array::forcecast> rts) {
  if (choices.ndim() != 1 || rts.ndim() != 1 || choices.shape(0) != rts.shape(0)) {
    throw DomainError("choices and rts must be 1-d arrays of equal length");
  }
  Dataset ds;
  ds.trials.reserve(choices.shape(0));
  auto c = choices.unchecked<1>();
  auto t = rts.unchecked<1>();
  for (py::ssize_t i = 0; i < choices.shape(0); ++i) ds.trials.push_back({c(i), t(i)});
  return ds;
}

py::array_t<int> choices_of(const Dataset& ds) {
  py::array_t<int> out(ds.size());
  auto v = out.mutable_unchecked<1>();
  for (std::size_t i = 0; i < ds.size(); ++i) v(i) = ds.trials[i].choice;
  return out;
}

py::array_t<double> rts_of(const Dataset& ds) {
  py::array_t<double> out(ds.size());
  auto v = out.mutable_unchecked<1>();
  for (std::size_t i = 0; i < ds.size(); ++i) v(i) = ds.trials[i].rt;
  return out;
}

std::string model_repr(const ModelSpec& spec) { return "<" + model_to_json(spec).dump() + ">"; }

// Chains draws as a (chain, iteration, param) array; copies.
py::array_t<double> chain_draws(const Chains& c) {
  py::array_t<double> out({c.n_chains, c.n_iterations, c.n_params()});
  std::copy(c.draws.begin(), c.draws.end(), out.mutable_data());
  return out;
}

// Wraps f(spec, choice, t) so that choice and t broadcast like numpy ufunc
// arguments; scalars in give a scalar out.
auto broadcast(double (*f)(const ModelSpec&, int, double)) {
  return [f](const ModelSpec& spec, py::array_t<int, py::array::forcecast> choice,
             py::array_t<double, py::array::forcecast> t) {
    return py::vectorize([&spec, f](int c, double x) { return f(spec, c, x); })(choice, t);
  };
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sequential sampling models: DDM, LBA and RDM";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<DDMParams>(m, "DDM")
      .def(py::init([](double nu, double alpha, double tau, double z) { return DDMParams{nu, alpha, tau, z}; }),
           py::kw_only(), py::arg("nu") = 1.0, py::arg("alpha") = 0.8, py::arg("tau") = 0.3, py::arg("z") = 0.5)
      .def_readwrite("nu", &DDMParams::nu)
      .def_readwrite("alpha", &DDMParams::alpha)
      .def_readwrite("tau", &DDMParams::tau)
      .def_readwrite("z", &DDMParams::z)
      .def("__repr__", [](const DDMParams& p) { return model_repr(p); });

  py::class_<LBAParams>(m, "LBA")
      .def(py::init([](std::vector<double> nu, double A, double k, double tau, double sigma) {
             return LBAParams{std::move(nu), A, k, tau, sigma};
           }),
           py::kw_only(), py::arg("nu") = std::vector<double>{3.0, 2.0}, py::arg("A") = 0.8, py::arg("k") = 0.2,
           py::arg("tau") = 0.3, py::arg("sigma") = 1.0)
      .def_readwrite("nu", &LBAParams::nu)
      .def_readwrite("A", &LBAParams::A)
      .def_readwrite("k", &LBAParams::k)
      .def_readwrite("tau", &LBAParams::tau)
      .def_readwrite("sigma", &LBAParams::sigma)
      .def("__repr__", [](const LBAParams& p) { return model_repr(p); });

  py::class_<RDMParams>(m, "RDM")
      .def(py::init([](std::vector<double> nu, double k, double A, double tau) {
             return RDMParams{std::move(nu), k, A, tau};
           }),
           py::kw_only(), py::arg("nu") = std::vector<double>{2.0, 1.0}, py::arg("k") = 0.5, py::arg("A") = 1.0,
           py::arg("tau") = 0.3)
      .def_readwrite("nu", &RDMParams::nu)
      .def_readwrite("k", &RDMParams::k)
      .def_readwrite("A", &RDMParams::A)
      .def_readwrite("tau", &RDMParams::tau)
      .def("__repr__", [](const RDMParams& p) { return model_repr(p); });

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&dataset_from_arrays), py::arg("choices"), py::arg("rts"))
      .def_property_readonly("choices", &choices_of)
      .def_property_readonly("rts", &rts_of)
      .def_property_readonly("warnings", [](const Dataset& ds) { return ds.meta.warnings; })
      .def("__len__", &Dataset::size)
      .def("to_csv", [](const Dataset& ds) {
        std::ostringstream out;
        format_dataset(ds, out);
        return out.str();
      });

  m.def("read_dataset", &read_dataset, py::arg("path"));
  m.def("write_dataset", &write_dataset, py::arg("dataset"), py::arg("path"));
  m.def("read_model", &read_model, py::arg("path"));
  m.def("model_json", [](const ModelSpec& spec) { return model_to_json(spec).dump(); }, py::arg("model"));
  m.def("model_from_json", [](const std::string& text) {
    try {
      return model_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what());
    }
  }, py::arg("text"));

  m.def("validate", [](const ModelSpec& spec) {
    const auto v = validate(spec);
    return py::make_tuple(v.ok, v.message);
  }, py::arg("model"), "(ok, message) for a parameter set; never raises.");

  m.def("pdf", broadcast(&model_pdf), py::arg("model"), py::arg("choice"), py::arg("t"),
        "Joint density of (choice, rt); broadcasts over choice and t.");
  m.def("logpdf", broadcast(&model_logpdf), py::arg("model"), py::arg("choice"), py::arg("t"));
  m.def("cdf", broadcast(&model_cdf), py::arg("model"), py::arg("choice"), py::arg("t"), "P(choice, rt <= t).");
  m.def("choice_prob", &model_choice_prob, py::arg("model"), py::arg("choice"));

  m.def("sample",
        [](const ModelSpec& spec, std::size_t n, std::uint64_t seed, unsigned threads) {
          py::gil_scoped_release release;
          SampleOptions options;
          options.threads = threads;
          return model_sample(spec, n, seed, options);
        },
        py::arg("model"), py::arg("n"), py::kw_only(), py::arg("seed"), py::arg("threads") = 1);

  m.def("loglik",
        [](const ModelSpec& spec, const Dataset& ds, unsigned threads) { return dataset_loglik(spec, ds, threads); },
        py::arg("model"), py::arg("data"), py::kw_only(), py::arg("threads") = 1);

  m.def("fit_mle",
        [](const ModelSpec& init, const Dataset& ds, unsigned threads) {
          MleOptions options;
          options.threads = threads;
          FitResult fit;
          {
            py::gil_scoped_release release;
            fit = fit_mle(init, ds, options);
          }
          py::dict values;
          for (std::size_t i = 0; i < fit.names.size(); ++i) values[py::str(fit.names[i])] = fit.values[i];
          py::dict out;
          out["model"] = fit.estimate;
          out["params"] = values;
          out["loglik"] = fit.loglik;
          out["converged"] = fit.converged;
          out["n_evals"] = fit.n_evals;
          return out;
        },
        py::arg("init"), py::arg("data"), py::kw_only(), py::arg("threads") = 1,
        "Nelder-Mead maximum likelihood from `init` (a local optimizer).");

  py::class_<Chains>(m, "Chains")
      .def_readonly("model", &Chains::model)
      .def_readonly("param_names", &Chains::param_names)
      .def_readonly("warmup", &Chains::warmup)
      .def_readonly("thin", &Chains::thin)
      .def_readonly("seed", &Chains::seed)
      .def_readonly("acceptance_rate", &Chains::acceptance_rate)
      .def_property_readonly("draws", &chain_draws, "(chain, iteration, param), warmup included")
      .def("summary", [](const Chains& c) {
        py::list rows;
        for (const auto& r : summarystats(c)) {
          py::dict row;
          row["parameter"] = r.name;
          row["mean"] = r.mean;
          row["sd"] = r.sd;
          row["mcse"] = r.mcse;
          row["ess"] = r.ess;
          row["rhat"] = r.rhat;
          rows.append(row);
        }
        return rows;
      })
      .def("save", [](const Chains& c, const std::filesystem::path& csv) {
        auto sidecar = csv;
        write_chains(c, csv, sidecar.replace_extension(".json"));
      }, py::arg("csv_path"));

  m.def("sample_posterior",
        [](const std::string& kind, const Dataset& ds, std::uint64_t seed, std::size_t chains, std::size_t warmup,
           std::size_t samples, unsigned threads, double lba_sigma) {
          const auto k = parse_model_kind(kind);
          const std::size_t n_acc = k == ModelKind::ddm ? 0 : std::max<std::size_t>(2, ds.max_choice());
          const auto priors = default_priors(k, ds, n_acc);
          PosteriorOptions options;
          options.seed = seed;
          options.n_chains = chains;
          options.warmup = warmup;
          options.samples = samples;
          options.threads = threads;
          options.lba_sigma = lba_sigma;
          py::gil_scoped_release release;
          return sample_posterior(k, ds, priors, options);
        },
        py::arg("kind"), py::arg("data"), py::kw_only(), py::arg("seed"), py::arg("chains") = 4,
        py::arg("warmup") = 1000, py::arg("samples") = 1000, py::arg("threads") = 1, py::arg("lba_sigma") = 1.0,
        "Adaptive Metropolis under the default priors for `kind` ('ddm', 'lba' or 'rdm').");

  m.def("histogram_svg",
        [](const Dataset& ds, std::optional<ModelSpec> spec, std::size_t bins, std::optional<py::tuple> t_range) {
          BinSpec b;
          b.count = bins;
          std::optional<TimeRange> range;
          if (t_range) {
            range = TimeRange{(*t_range)[0].cast<double>(), (*t_range)[1].cast<double>(),
                              (*t_range)[2].cast<std::size_t>()};
          }
          return render_histogram_svg(ds, spec, b, range);
        },
        py::arg("data"), py::arg("model") = py::none(), py::kw_only(), py::arg("bins") = 0,
        py::arg("t_range") = py::none(), "t_range is (start, stop, length) for the density overlay.");
  m.def("model_svg",
        [](const ModelSpec& spec, std::size_t n_sim, py::tuple t_range, std::uint64_t seed) {
          return render_model_svg(spec, n_sim,
                                  {t_range[0].cast<double>(), t_range[1].cast<double>(), t_range[2].cast<std::size_t>()},
                                  seed);
        },
        py::arg("model"), py::kw_only(), py::arg("n_sim") = 5, py::arg("t_range"), py::arg("seed"));
  m.def("chains_svg", &render_chains_svg, py::arg("chains"));
}
