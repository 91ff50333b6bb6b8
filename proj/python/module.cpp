#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "banditlc/experiment.hpp"
#include "banditlc/lcb.hpp"
#include "banditlc/lipschitz.hpp"
#include "banditlc/nts.hpp"
#include "banditlc/oracle.hpp"

namespace py = pybind11;
using namespace banditlc;

namespace {

SourceModel make_source(const std::vector<double>& pmf,
                        const std::optional<std::pair<std::vector<double>, int>>& product) {
  if (product) return SourceModel::product(product->first, product->second);
  return SourceModel::categorical(pmf);
}

py::dict trace_to_dict(const PolicyTrace& trace) {
  std::vector<std::uint32_t> actions, emitted;
  std::vector<double> costs;
  std::vector<bool> escaped;
  std::vector<Symbol> recon;
  for (const auto& r : trace.rounds) {
    actions.push_back(r.action);
    costs.push_back(r.cost_bits);
    emitted.push_back(r.emitted_bits);
    escaped.push_back(r.escaped);
    recon.push_back(r.reconstruction);
  }
  py::dict d;
  d["action"] = actions;
  d["cost_bits"] = costs;
  d["emitted_bits"] = emitted;
  d["escaped"] = escaped;
  d["reconstruction"] = recon;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "bandit-driven backward-adaptive lossy compression simulator";

  py::class_<SourceModel>(m, "SourceModel")
      .def_static("categorical", &SourceModel::categorical, py::arg("pmf"))
      .def_static("product", &SourceModel::product, py::arg("per_symbol_pmf"), py::arg("length"))
      .def_property_readonly("alphabet_size", &SourceModel::alphabet_size)
      .def("pmf", &SourceModel::pmf, py::arg("x"));

  py::class_<DistortionSpec>(m, "DistortionSpec")
      .def_static("table", &DistortionSpec::table, py::arg("rho"), py::arg("level"))
      .def_static("additive", &DistortionSpec::additive, py::arg("per_symbol"), py::arg("length"),
                  py::arg("level"))
      .def_static("hamming", &DistortionSpec::hamming, py::arg("alphabet"), py::arg("level"))
      .def_static("additive_hamming", &DistortionSpec::additive_hamming, py::arg("u_size"),
                  py::arg("length"), py::arg("level"))
      .def_property_readonly("level", &DistortionSpec::level)
      .def_property_readonly("x_size", &DistortionSpec::x_size)
      .def_property_readonly("y_size", &DistortionSpec::y_size)
      .def("total", &DistortionSpec::total, py::arg("x"), py::arg("y"))
      .def("max_matches", &DistortionSpec::max_matches);

  py::class_<TypeVector>(m, "TypeVector")
      .def(py::init([](std::vector<int> counts) { return TypeVector{std::move(counts)}; }),
           py::arg("counts"))
      .def_readonly("counts", &TypeVector::counts)
      .def_property_readonly("length", &TypeVector::length)
      .def("distribution", &TypeVector::distribution);

  py::class_<ReconDistribution>(m, "ReconDistribution")
      .def_static("categorical", &ReconDistribution::categorical, py::arg("pmf"))
      .def_static("memoryless", &ReconDistribution::memoryless, py::arg("per_symbol"),
                  py::arg("length"))
      .def_static("uniform_on_type",
                  [](std::vector<int> counts) {
                    return ReconDistribution::uniform_on_type(TypeVector{std::move(counts)});
                  },
                  py::arg("counts"))
      .def_static("type_mixture_of_memoryless", &ReconDistribution::type_mixture_of_memoryless,
                  py::arg("per_symbol"), py::arg("length"))
      .def_property_readonly("alphabet_size", &ReconDistribution::alphabet_size)
      .def("pmf", &ReconDistribution::pmf, py::arg("y"))
      .def("__repr__", &ReconDistribution::describe);

  m.def("match_probability", &match_probability, py::arg("q"), py::arg("x"), py::arg("spec"));
  m.def(
      "min_match_probability",
      [](const ReconDistribution& q, const DistortionSpec& spec) {
        const auto r = min_match_probability(q, spec);
        return py::make_tuple(r.value, r.has_zero, r.argmin_x);
      },
      py::arg("q"), py::arg("spec"),
      "returns (value, has_zero, argmin_x)");

  m.def("expected_bits_given_x",
        [](double p, double tol) { return expected_bits_given_x(p, tol); }, py::arg("p"),
        py::arg("tol") = 1e-9);
  m.def("expected_log_given_x_integral", &expected_log_given_x_integral, py::arg("p"));
  m.def(
      "expected_bits",
      [](const ReconDistribution& q, const SourceModel& source, const DistortionSpec& spec,
         double tol) {
        const auto r = expected_bits(q, source, spec, tol);
        py::dict d;
        d["per_x"] = r.per_x;
        d["average"] = r.average;
        d["truncation_index"] = r.truncation_index;
        d["tail_bound"] = r.tail_bound;
        return d;
      },
      py::arg("q"), py::arg("source"), py::arg("spec"), py::arg("tol") = 1e-9);

  m.def(
      "optimal_action_and_gaps",
      [](const std::vector<ReconDistribution>& arms, const SourceModel& source,
         const DistortionSpec& spec, double tol) {
        const auto g = optimal_action_and_gaps(arms, source, spec, tol);
        py::dict d;
        d["a_star"] = g.a_star;
        d["r_star"] = g.r_star;
        d["cost"] = g.cost;
        d["gaps"] = g.gaps;
        d["lambda"] = g.lambda;
        d["eta"] = g.eta;
        d["eta_has_zero"] = g.eta_has_zero;
        return d;
      },
      py::arg("arms"), py::arg("source"), py::arg("spec"), py::arg("tol") = 1e-9);

  m.def(
      "blahut_arimoto_fixed_distortion",
      [](const std::vector<double>& p_u, const std::vector<std::vector<double>>& rho, double d,
         double tol, int max_iters) {
        const auto r = blahut_arimoto_fixed_distortion(p_u, rho, d, tol, max_iters);
        py::dict out;
        out["q_star"] = r.q_star;
        out["rate_bits"] = r.rate_bits;
        out["distortion"] = r.distortion;
        out["iterations"] = r.iterations;
        return out;
      },
      py::arg("p_u"), py::arg("rho"), py::arg("d"), py::arg("tol") = 1e-9,
      py::arg("max_iters") = 5000);

  m.def("kl_divergence_bits",
        [](const std::vector<double>& p, const std::vector<double>& q) {
          return kl_divergence_bits(p, q);
        },
        py::arg("p"), py::arg("q"));
  m.def("nts_regret_bound",
        [](const std::vector<double>& q1, const std::vector<double>& q_star) {
          return nts_regret_bound(q1, q_star);
        },
        py::arg("q1"), py::arg("q_star"));

  py::class_<LcbConfig>(m, "LcbConfig")
      .def(py::init<>())
      .def_readwrite("alpha", &LcbConfig::alpha)
      .def_readwrite("c", &LcbConfig::c)
      .def_readwrite("eta", &LcbConfig::eta)
      .def_readwrite("j_max", &LcbConfig::j_max)
      .def_readwrite("allow_escape_arms", &LcbConfig::allow_escape_arms);

  m.def(
      "run_lcb_episode",
      [](const SourceModel& source, const std::vector<ReconDistribution>& arms,
         const DistortionSpec& spec, const LcbConfig& cfg, std::uint64_t horizon,
         std::uint64_t seed) { return trace_to_dict(run_lcb_episode(source, arms, spec, cfg,
                                                                    horizon, seed)); },
      py::arg("source"), py::arg("arms"), py::arg("spec"), py::arg("cfg"), py::arg("horizon"),
      py::arg("seed"));
  m.def("regret_bound_thm1",
        [](const std::vector<double>& gaps, double t, const LcbConfig& cfg) {
          return regret_bound_thm1(gaps, t, cfg);
        },
        py::arg("gaps"), py::arg("t"), py::arg("cfg"));

  m.def("metric_mu", &metric_mu, py::arg("q1"), py::arg("q2"), py::arg("spec"));
  m.def(
      "build_net",
      [](double eta, double epsilon, const DistortionSpec& spec) {
        const auto net = build_net(eta, epsilon, spec);
        py::list points;
        for (const auto& p : net.points) {
          points.append(std::get<ReconDistribution::Categorical>(p.variant()).pmf);
        }
        py::dict d;
        d["points"] = points;
        d["epsilon"] = net.epsilon;
        d["eta"] = net.eta;
        d["beta"] = net.beta;
        d["lemma_cardinality"] = net.lemma_cardinality;
        d["refinements"] = net.refinements;
        return d;
      },
      py::arg("eta"), py::arg("epsilon"), py::arg("spec"));
  m.def(
      "gamma_and_epsilon",
      [](const DistortionSpec& spec, double eta, double lambda, std::uint64_t horizon) {
        const auto g = gamma_and_epsilon(spec, eta, lambda, horizon);
        return py::make_tuple(g.max_matches, g.gamma, g.epsilon_star);
      },
      py::arg("spec"), py::arg("eta"), py::arg("lambda_"), py::arg("horizon"),
      "returns (max_matches, gamma, epsilon_star)");

  m.def("run_experiment",
        [](const std::string& config_path, const std::string& out_dir) {
          const auto cfg = load_config(config_path);
          run_experiment(cfg, out_dir.empty() ? cfg.output_dir : out_dir);
        },
        py::arg("config_path"), py::arg("out_dir") = std::string());
}
