#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qbandits/bandit_core.hpp"
#include "qbandits/concentration.hpp"
#include "qbandits/distributions.hpp"
#include "qbandits/experiments.hpp"
#include "qbandits/order_stats.hpp"
#include "qbandits/parallel.hpp"
#include "qbandits/policies.hpp"
#include "qbandits/rng.hpp"

namespace py = pybind11;
using namespace qbandits;

namespace {

Environment make_preset_environment(const std::string& name, std::int64_t m,
                                    std::optional<double> tau) {
    const PresetName preset = parse_preset(name);
    std::vector<DistributionSpec> arms = expand_preset(preset, m);
    return Environment(std::move(arms), QuantileLevel(tau.value_or(preset_default_tau(preset))),
                       m);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Quantile-based fixed-budget best-arm identification";

    py::register_exception<ConfigError>(m, "ConfigError");

    py::class_<RngStream>(m, "RngStream")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("next_u64", &RngStream::next_u64)
        .def("next_unit", &RngStream::next_unit)
        .def("child", py::overload_cast<std::uint64_t>(&RngStream::child, py::const_),
             py::arg("key"))
        .def_property_readonly("seed", &RngStream::seed);

    py::class_<QuantileLevel>(m, "QuantileLevel")
        .def(py::init<double>(), py::arg("tau"))
        .def_readonly("tau", &QuantileLevel::tau);
    py::implicitly_convertible<py::float_, QuantileLevel>();

    py::class_<DistributionSpec>(m, "DistributionSpec")
        .def_static("abs_gaussian", &DistributionSpec::abs_gaussian, py::arg("mu"),
                    py::arg("sigma"))
        .def_static("exponential", &DistributionSpec::exponential, py::arg("rate"))
        .def_static("empirical", &DistributionSpec::empirical, py::arg("samples"))
        .def_property_readonly("parametric", &DistributionSpec::is_parametric)
        .def("name", &DistributionSpec::name)
        .def("sample",
             [](const DistributionSpec& spec, std::int64_t count, RngStream& stream) {
                 return spec.sample(count, stream);
             },
             py::arg("count"), py::arg("stream"))
        .def("cdf", &DistributionSpec::cdf, py::arg("x"))
        .def("survival", &DistributionSpec::survival, py::arg("x"))
        .def("true_quantile", &DistributionSpec::true_quantile, py::arg("tau"))
        .def("hazard_rate", &DistributionSpec::hazard_rate, py::arg("x"))
        .def("hazard_lower_bound", &DistributionSpec::hazard_lower_bound)
        .def("mean", &DistributionSpec::mean)
        .def("__eq__", [](const DistributionSpec& a, const DistributionSpec& b) { return a == b; })
        .def("__repr__", [](const DistributionSpec& spec) { return spec.name(); });

    m.def("rank_for", [](std::int64_t n, QuantileLevel tau) { return rank_for(n, tau).k; },
          py::arg("n"), py::arg("tau"));
    m.def("empirical_quantile",
          [](const std::vector<double>& raw, QuantileLevel tau) {
              return empirical_quantile(raw, tau);
          },
          py::arg("sample"), py::arg("tau"));
    m.def("spacing",
          [](const std::vector<double>& raw, std::int64_t k) {
              return SortedSample(raw).spacing(k);
          },
          py::arg("sample"), py::arg("k"));

    py::class_<OsBoundParams>(m, "OsBoundParams")
        .def(py::init([](std::int64_t n, std::int64_t k, double hazard_floor) {
                 return OsBoundParams{n, k, hazard_floor};
             }),
             py::arg("n"), py::arg("k"), py::arg("hazard_floor"))
        .def_readwrite("n", &OsBoundParams::n)
        .def_readwrite("k", &OsBoundParams::k)
        .def_readwrite("hazard_floor", &OsBoundParams::hazard_floor);

    py::class_<QuantileBoundParams>(m, "QuantileBoundParams")
        .def(py::init([](std::int64_t n, QuantileLevel tau, double hazard_floor,
                         double bias_constant) {
                 return QuantileBoundParams{n, tau, hazard_floor, bias_constant};
             }),
             py::arg("n"), py::arg("tau"), py::arg("hazard_floor"), py::arg("bias_constant"))
        .def_readwrite("n", &QuantileBoundParams::n)
        .def_readwrite("hazard_floor", &QuantileBoundParams::hazard_floor)
        .def_readwrite("bias_constant", &QuantileBoundParams::bias_constant);

    m.def("os_right_radius", &os_right_radius, py::arg("params"), py::arg("gamma"));
    m.def("os_left_radius", &os_left_radius, py::arg("params"), py::arg("gamma"));
    m.def("quantile_radii",
          [](const QuantileBoundParams& p, double gamma) {
              const TwoSided r = quantile_radii(p, gamma);
              return py::make_tuple(r.right, r.left);
          },
          py::arg("params"), py::arg("gamma"));
    m.def("quantile_epsilon_bound",
          [](const QuantileBoundParams& p, double epsilon) {
              const TailProbabilities probs = quantile_epsilon_bound(p, epsilon);
              py::dict out;
              out["right"] = probs.right;
              out["left"] = probs.left;
              out["right_exponent"] = probs.right_exponent;
              out["left_exponent"] = probs.left_exponent;
              out["gamma_below_one"] = probs.gamma_below_one;
              return out;
          },
          py::arg("params"), py::arg("epsilon"));
    m.def("quantile_n_form_bound", &quantile_n_form_bound, py::arg("params"), py::arg("epsilon"));
    m.def("quantile_n_form_bound_unrestricted", &quantile_n_form_bound_unrestricted,
          py::arg("params"), py::arg("epsilon"));
    m.def("invert_right_radius", &invert_right_radius, py::arg("params"), py::arg("epsilon"));
    m.def("invert_left_radius", &invert_left_radius, py::arg("params"), py::arg("epsilon"));
    m.def("log_bar", &log_bar, py::arg("num_arms"));
    m.def("log_tilde", &log_tilde, py::arg("num_arms"), py::arg("m"));

    py::class_<ComplexityTerm>(m, "ComplexityTerm")
        .def_readonly("arm", &ComplexityTerm::arm)
        .def_readonly("gap_rank", &ComplexityTerm::gap_rank)
        .def_readonly("value", &ComplexityTerm::value);

    py::class_<ComplexityReport>(m, "ComplexityReport")
        .def_readonly("h_tau", &ComplexityReport::h_tau)
        .def_readonly("h_tilde", &ComplexityReport::h_tilde)
        .def_readonly("constant_c", &ComplexityReport::constant_c)
        .def_readonly("h_tau_argmax", &ComplexityReport::h_tau_argmax)
        .def_readonly("h_tilde_argmax", &ComplexityReport::h_tilde_argmax)
        .def_readonly("gaps_sorted", &ComplexityReport::gaps_sorted);

    m.def("problem_complexity",
          [](const std::vector<double>& gaps, const std::vector<double>& hazard_floors,
             const std::vector<double>& bias_constants, double tau) {
              return problem_complexity({gaps, hazard_floors, bias_constants, tau});
          },
          py::arg("gaps"), py::arg("hazard_floors"), py::arg("bias_constants"), py::arg("tau"));
    m.def("qsar_error_bound", &qsar_error_bound, py::arg("budget"), py::arg("num_arms"),
          py::arg("tau"), py::arg("complexity"), py::arg("variant") = false);
    m.def("estimate_bias_constant",
          [](const DistributionSpec& spec, QuantileLevel tau,
             const std::vector<std::int64_t>& n_grid, std::int64_t oracle_trials,
             std::uint64_t seed, int jobs) {
              return estimate_bias_constant(spec, tau, n_grid, oracle_trials, RngStream(seed),
                                            jobs);
          },
          py::arg("spec"), py::arg("tau"), py::arg("n_grid"), py::arg("oracle_trials") = 1000000,
          py::arg("seed") = 0, py::arg("jobs") = 1);

    py::class_<Environment>(m, "Environment")
        .def(py::init<std::vector<DistributionSpec>, QuantileLevel, std::int64_t>(),
             py::arg("arms"), py::arg("tau"), py::arg("m"))
        .def_property_readonly("num_arms", &Environment::num_arms)
        .def_property_readonly("m", &Environment::target_size)
        .def_property_readonly("tau", [](const Environment& env) { return env.tau().tau; })
        .def_property_readonly("true_quantiles", &Environment::true_quantiles)
        .def("arm", &Environment::arm, py::arg("index"));

    m.def("preset_environment", &make_preset_environment, py::arg("name"), py::arg("m"),
          py::arg("tau") = std::nullopt);
    m.def("true_optimal_set", &true_optimal_set, py::arg("env"));

    py::class_<GapProfile>(m, "GapProfile")
        .def_readonly("delta", &GapProfile::delta)
        .def_readonly("delta_sorted", &GapProfile::delta_sorted)
        .def_readonly("optimal_set", &GapProfile::optimal_set);
    m.def("gaps", &gaps, py::arg("env"));

    py::class_<RunOutcome>(m, "RunOutcome")
        .def_readonly("recommended", &RunOutcome::recommended)
        .def_readonly("pulls_used", &RunOutcome::pulls_used)
        .def_readonly("pull_counts", &RunOutcome::pull_counts);

    py::class_<ErrorEstimate>(m, "ErrorEstimate")
        .def_readonly("runs", &ErrorEstimate::runs)
        .def_readonly("errors", &ErrorEstimate::errors)
        .def_readonly("e_hat", &ErrorEstimate::e_hat)
        .def_readonly("stderr", &ErrorEstimate::stderr_);

    m.def("run_policy",
          [](const std::string& policy, const Environment& env, std::int64_t budget,
             std::uint64_t seed) {
              return run_policy(PolicyConfig::parse(policy), env, budget, RngStream(seed));
          },
          py::arg("policy"), py::arg("env"), py::arg("budget"), py::arg("seed"));
    m.def("min_budget",
          [](const std::string& policy, std::int64_t num_arms, std::int64_t m,
             QuantileLevel tau) {
              return min_budget(PolicyConfig::parse(policy), num_arms, m, tau);
          },
          py::arg("policy"), py::arg("num_arms"), py::arg("m"), py::arg("tau"));
    m.def("evaluate",
          [](const Environment& env, const std::string& policy, std::int64_t budget,
             std::int64_t runs, std::uint64_t seed, bool crn, int jobs) {
              EvalOptions opts;
              opts.common_random_numbers = crn;
              opts.jobs = jobs;
              py::gil_scoped_release release;
              return evaluate(env, PolicyConfig::parse(policy), budget, runs, seed, opts);
          },
          py::arg("env"), py::arg("policy"), py::arg("budget"), py::arg("runs"),
          py::arg("seed") = 0, py::arg("crn") = false, py::arg("jobs") = 1);

    py::class_<PhaseSchedule>(m, "PhaseSchedule")
        .def_readonly("normalizer", &PhaseSchedule::normalizer)
        .def_readonly("cumulative", &PhaseSchedule::cumulative);
    m.def("build_schedule",
          [](std::int64_t num_arms, std::int64_t m, std::int64_t budget,
             const std::string& family) {
              if (family == "sar") {
                  return build_schedule(num_arms, m, budget, ScheduleFamily::accept_reject);
              }
              if (family == "sr") {
                  return build_schedule(num_arms, m, budget, ScheduleFamily::reject_only);
              }
              throw std::invalid_argument("family must be \"sar\" or \"sr\"");
          },
          py::arg("num_arms"), py::arg("m"), py::arg("budget"), py::arg("family"));

    m.def("ingest_arm_data",
          [](const std::filesystem::path& directory) { return ingest_arm_data(directory); },
          py::arg("directory"));

    m.attr("__version__") = "0.1.0";
}
