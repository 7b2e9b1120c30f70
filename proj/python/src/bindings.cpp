#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "houses/acquisition.hpp"
#include "houses/benchmarks.hpp"
#include "houses/cli.hpp"
#include "houses/fanova.hpp"
#include "houses/gp.hpp"
#include "houses/kernels.hpp"
#include "houses/objective.hpp"
#include "houses/optimizer.hpp"
#include "houses/run_log.hpp"

namespace py = pybind11;
using namespace houses;

namespace {

std::optional<AnchorPoint> to_anchor(const std::optional<std::vector<double>>& s) {
  if (!s) return std::nullopt;
  return AnchorPoint{*s};
}

// Records as a JSON string; the Python side decodes it.
std::string history_json(const RunState& state) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : state.history) out.push_back(record_to_json(r));
  return out.dump();
}

}  // namespace

PYBIND11_MODULE(_houses, m) {
  m.doc() = "Native core of the houses optimizer";

  m.def("kumaraswamy_warp", &kumaraswamy_warp, py::arg("u"), py::arg("alpha"), py::arg("beta"));

  py::class_<KernelParams>(m, "KernelParams")
      .def(py::init([](const std::string& kind, std::size_t dim) {
             return KernelParams::defaults(parse_kernel_kind(kind), dim);
           }),
           py::arg("kind"), py::arg("dim"))
      .def_property_readonly("kind", [](const KernelParams& p) { return to_string(p.kind); })
      .def_readwrite("theta_f", &KernelParams::theta_f)
      .def_readwrite("theta_k", &KernelParams::theta_k)
      .def_readwrite("theta_c", &KernelParams::theta_c)
      .def_readwrite("theta", &KernelParams::theta)
      .def_readwrite("gamma", &KernelParams::gamma)
      .def_readwrite("alpha", &KernelParams::alpha)
      .def_readwrite("beta", &KernelParams::beta)
      .def("validate", [](const KernelParams& p) { p.validate(p.dim()); });

  m.def(
      "kernel",
      [](const std::vector<double>& x, const std::vector<double>& z, const KernelParams& p,
         const std::optional<std::vector<double>>& anchor) {
        const auto a = to_anchor(anchor);
        return kernel(x, z, p, a ? &*a : nullptr);
      },
      py::arg("x"), py::arg("z"), py::arg("params"), py::arg("anchor") = py::none());
  m.def(
      "cov_matrix",
      [](const Eigen::MatrixXd& X, const KernelParams& p, const std::optional<std::vector<double>>& anchor) {
        const auto a = to_anchor(anchor);
        return build_cov_matrix(X, p, a ? &*a : nullptr);
      },
      py::arg("X"), py::arg("params"), py::arg("anchor") = py::none());

  py::class_<GPModel>(m, "GPModel")
      .def_static(
          "fit",
          [](const Eigen::MatrixXd& X, const std::vector<double>& y, const std::string& kernel,
             const std::optional<std::vector<double>>& anchor, std::uint64_t seed) {
            return GPModel::fit(X, y, parse_kernel_kind(kernel), to_anchor(anchor), seed);
          },
          py::arg("X"), py::arg("y"), py::arg("kernel") = "houses", py::arg("anchor") = py::none(),
          py::arg("seed") = 0)
      .def_static(
          "build",
          [](const Eigen::MatrixXd& X, const std::vector<double>& y, const KernelParams& p,
             const std::optional<std::vector<double>>& anchor, bool standardize) {
            return GPModel::build(X, y, p, to_anchor(anchor), standardize);
          },
          py::arg("X"), py::arg("y"), py::arg("params"), py::arg("anchor") = py::none(),
          py::arg("standardize") = true)
      .def(
          "predict",
          [](const GPModel& gp, const std::vector<double>& x) {
            const Prediction p = gp.predict(x);
            return py::make_tuple(p.mean, p.variance);
          },
          py::arg("x"))
      .def_property_readonly("log_marginal_likelihood", &GPModel::log_marginal_likelihood)
      .def_property_readonly("params", &GPModel::params)
      .def_property_readonly("size", &GPModel::size)
      .def_property_readonly("dim", &GPModel::dim);

  m.def("normal_cdf", &normal_cdf, py::arg("z"));
  m.def("normal_pdf", &normal_pdf, py::arg("z"));
  m.def(
      "acquisition",
      [](const std::string& kind, double mean, double sigma, double f_best, double w) {
        return score({parse_acquisition_kind(kind), w, f_best}, mean, sigma);
      },
      py::arg("kind"), py::arg("mean"), py::arg("sigma"), py::arg("f_best") = 0.0, py::arg("w") = 2.0);

  m.def(
      "importance",
      [](const std::function<double(std::vector<double>)>& fn, std::size_t dim, std::size_t grid_size,
         std::size_t mc_samples, std::uint64_t seed) {
        const MeanFunction f = [&fn](std::span<const double> x) { return fn({x.begin(), x.end()}); };
        const ImportanceReport r = importance(f, dim, {grid_size, mc_samples, seed});
        py::dict out;
        out["total_variance"] = r.total_variance;
        out["variances"] = r.variances;
        out["importances"] = r.importances;
        return out;
      },
      py::arg("fn"), py::arg("dim"), py::arg("grid_size") = 20, py::arg("mc_samples") = 512, py::arg("seed") = 0);

  m.def(
      "benchmark", [](const std::string& name, const std::vector<double>& unit) { return eval_builtin(name, unit); },
      py::arg("name"), py::arg("unit"));

  m.def(
      "_optimize_builtin",
      [](const std::string& space_json, const std::string& name, const std::string& config_json,
         std::uint64_t objective_seed) {
        const SearchSpace space = SearchSpace::from_json(nlohmann::json::parse(space_json));
        const RunConfig config = RunConfig::from_json(nlohmann::json::parse(config_json));
        BuiltinObjective obj(name, space, objective_seed);
        return history_json(run(space, obj, config));
      },
      py::arg("space_json"), py::arg("name"), py::arg("config_json"), py::arg("objective_seed") = 0);

  m.def(
      "_optimize_callable",
      [](const std::string& space_json, const std::function<py::object(py::dict)>& fn, const std::string& config_json) {
        const SearchSpace space = SearchSpace::from_json(nlohmann::json::parse(space_json));
        const RunConfig config = RunConfig::from_json(nlohmann::json::parse(config_json));
        FunctionObjective obj([&](const Configuration& c) {
          py::dict params;
          for (std::size_t d = 0; d < space.dim(); ++d) {
            const auto& p = space.param(d);
            if (p.kind == ParamKind::integer) {
              params[py::str(p.name)] = static_cast<long long>(c.raw[d]);
            } else {
              params[py::str(p.name)] = c.raw[d];
            }
          }
          const py::object v = fn(params);
          if (v.is_none()) return EvalOutcome::failure("objective returned None");
          return EvalOutcome::success(v.cast<double>());
        });
        return history_json(run(space, obj, config));
      },
      py::arg("space_json"), py::arg("fn"), py::arg("config_json"));

  m.def(
      "cli_main",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::main(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
