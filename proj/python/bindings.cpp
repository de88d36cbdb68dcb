// python bindings for the identification toolkit core
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "varxid/certify.hpp"
#include "varxid/estimators.hpp"
#include "varxid/linalg.hpp"
#include "varxid/rng.hpp"
#include "varxid/simulate.hpp"

namespace py = pybind11;
using namespace varxid;

PYBIND11_MODULE(varxid_py, m) {
  m.doc() = "low-rank identification of linear dynamical systems from repeated samples";

  py::register_exception<numerical_error>(m, "NumericalError", PyExc_RuntimeError);

  // --- linear algebra -------------------------------------------------------
  py::class_<SvdFactors>(m, "SvdFactors")
      .def_readonly("left", &SvdFactors::left)
      .def_readonly("singulars", &SvdFactors::singulars)
      .def_readonly("right", &SvdFactors::right)
      .def("reconstruct", &SvdFactors::reconstruct);
  m.def("svd", &svd, py::arg("M"));

  m.def("nuclear_norm", &nuclear_norm, py::arg("M"));
  m.def("operator_norm", &operator_norm, py::arg("M"));
  m.def("frobenius_norm", &frobenius_norm, py::arg("M"));
  m.def("svt", &svt, py::arg("M"), py::arg("tau"),
        "singular value soft-thresholding (nuclear-norm prox)");

  py::enum_<Subspace>(m, "Subspace")
      .value("model", Subspace::model)
      .value("model_bar", Subspace::model_bar)
      .value("model_bar_perp", Subspace::model_bar_perp);

  py::class_<SubspaceFrame>(m, "SubspaceFrame")
      .def_readonly("col_basis", &SubspaceFrame::col_basis)
      .def_readonly("row_basis", &SubspaceFrame::row_basis)
      .def_readonly("rank", &SubspaceFrame::rank);
  m.def("subspace_frame", &subspace_frame, py::arg("theta_star"), py::arg("r"));
  m.def("project", &project, py::arg("frame"), py::arg("delta"), py::arg("target"));

  py::class_<LqSplit>(m, "LqSplit")
      .def_readonly("s_size", &LqSplit::s_size)
      .def_readonly("tail", &LqSplit::tail)
      .def_readonly("tail_nuclear", &LqSplit::tail_nuclear)
      .def_readonly("radius", &LqSplit::radius);
  m.def("lq_threshold_split", &lq_threshold_split, py::arg("theta"), py::arg("q"), py::arg("tau"));
  m.def("lq_radius", &lq_radius, py::arg("theta"), py::arg("q"));

  m.def("derive_seed", py::overload_cast<std::uint64_t, std::uint64_t>(&derive_seed),
        py::arg("seed"), py::arg("index"));

  // --- simulation ------------------------------------------------------------
  py::enum_<DistFamily>(m, "DistFamily")
      .value("gaussian", DistFamily::gaussian)
      .value("uniform", DistFamily::uniform)
      .value("rademacher", DistFamily::rademacher);

  py::class_<DistSpec>(m, "DistSpec")
      .def(py::init<>())
      .def(py::init<DistFamily, double, int>(), py::arg("family"), py::arg("scale"),
           py::arg("dim"))
      .def_readwrite("family", &DistSpec::family)
      .def_readwrite("scale", &DistSpec::scale)
      .def_readwrite("dim", &DistSpec::dim)
      .def("variance", &DistSpec::variance);

  py::class_<SingularSpec> singular_spec(m, "SingularSpec");
  py::enum_<SingularSpec::Kind>(singular_spec, "Kind")
      .value("equal", SingularSpec::Kind::equal)
      .value("geometric", SingularSpec::Kind::geometric);
  singular_spec.def(py::init<>())
      .def_readwrite("kind", &SingularSpec::kind)
      .def_readwrite("ratio", &SingularSpec::ratio);

  py::class_<SystemModel>(m, "SystemModel")
      .def(py::init<>())
      .def_readwrite("A", &SystemModel::A)
      .def_readwrite("B", &SystemModel::B)
      .def_readwrite("rank_r", &SystemModel::rank_r)
      .def_readwrite("sigma_w", &SystemModel::sigma_w)
      .def("n", &SystemModel::n)
      .def("m", &SystemModel::m)
      .def("theta_star", &SystemModel::theta_star);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("states", &Trajectory::states)
      .def_readonly("inputs", &Trajectory::inputs)
      .def_readonly("noises", &Trajectory::noises);

  py::class_<RegressionData>(m, "RegressionData")
      .def(py::init<>())
      .def_readwrite("X", &RegressionData::X)
      .def_readwrite("Z", &RegressionData::Z)
      .def_readwrite("W", &RegressionData::W)
      .def_readwrite("Sigma", &RegressionData::Sigma)
      .def("num_samples", &RegressionData::num_samples);

  m.def("generate_system", &generate_system, py::arg("n"), py::arg("m"), py::arg("r"),
        py::arg("spectral_radius_cap"), py::arg("spec") = SingularSpec{}, py::arg("seed") = 0);
  m.def("simulate_trajectory", &simulate_trajectory, py::arg("model"), py::arg("T0"),
        py::arg("input"), py::arg("noise") = std::nullopt, py::arg("seed") = 0);
  m.def("collect_repeated", &collect_repeated, py::arg("model"), py::arg("N"), py::arg("T0"),
        py::arg("input"), py::arg("noise") = std::nullopt, py::arg("seed") = 0);
  m.def("stack_trajectory", &stack_trajectory, py::arg("trajectory"));
  m.def("subgaussian_param", &subgaussian_param, py::arg("model"), py::arg("T0"),
        py::arg("sigma_u"), py::arg("sigma_w"));
  m.def("population_covariance", &population_covariance, py::arg("model"), py::arg("T0"),
        py::arg("input"), py::arg("noise") = std::nullopt);

  // --- estimation -------------------------------------------------------------
  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("max_iters", &SolverConfig::max_iters)
      .def_readwrite("rel_tol", &SolverConfig::rel_tol)
      .def_readwrite("kkt_tol", &SolverConfig::kkt_tol)
      .def_readwrite("admm_rho", &SolverConfig::admm_rho)
      .def_readwrite("acceleration", &SolverConfig::acceleration)
      .def_readwrite("trace_objective", &SolverConfig::trace_objective);

  py::class_<Estimate>(m, "Estimate")
      .def_readonly("theta_hat", &Estimate::theta_hat)
      .def_readonly("lambda_used", &Estimate::lambda_used)
      .def_readonly("iters", &Estimate::iters)
      .def_readonly("converged", &Estimate::converged)
      .def_readonly("kkt_residual", &Estimate::kkt_residual)
      .def_readonly("objective", &Estimate::objective)
      .def_readonly("unique_solution", &Estimate::unique_solution)
      .def_readonly("objective_trace", &Estimate::objective_trace);

  m.def(
      "least_squares", [](const RegressionData& d) { return least_squares(d); }, py::arg("data"));
  m.def("nuclear_reg_solve", &nuclear_reg_solve, py::arg("data"), py::arg("lam"),
        py::arg("config") = SolverConfig{});
  m.def("nuclear_min_exact", &nuclear_min_exact, py::arg("data"),
        py::arg("config") = SolverConfig{});
  m.def("lambda_rule", &lambda_rule, py::arg("n"), py::arg("m"), py::arg("N"), py::arg("alpha"));
  m.def("alpha_param", &alpha_param, py::arg("sigma_w"), py::arg("beta"), py::arg("gamma_max"));
  m.def("kkt_check", &kkt_check, py::arg("theta_hat"), py::arg("data"), py::arg("lam"));

  // --- certification ------------------------------------------------------------
  m.def("exact_recovery_threshold", &exact_recovery_threshold);
  m.def("s_value", &s_value, py::arg("K1"), py::arg("K2"));

  py::class_<WeakRipEstimate>(m, "WeakRipEstimate")
      .def_readonly("order", &WeakRipEstimate::order)
      .def_readonly("K1", &WeakRipEstimate::K1)
      .def_readonly("K2", &WeakRipEstimate::K2)
      .def_readonly("delta_hat", &WeakRipEstimate::delta_hat)
      .def_readonly("samples", &WeakRipEstimate::samples)
      .def_readonly("ratio_min", &WeakRipEstimate::ratio_min)
      .def_readonly("ratio_max", &WeakRipEstimate::ratio_max);
  m.def("empirical_weak_rip", &empirical_weak_rip, py::arg("Z"), py::arg("order"), py::arg("K1"),
        py::arg("K2"), py::arg("trials"), py::arg("seed"));
  m.def("empirical_weak_rip_profile", &empirical_weak_rip_profile, py::arg("Z"),
        py::arg("orders"), py::arg("K1"), py::arg("K2"), py::arg("trials_per_order"),
        py::arg("seed"));

  py::class_<CovarianceDeviation>(m, "CovarianceDeviation")
      .def_readonly("dev", &CovarianceDeviation::dev)
      .def_readonly("ambient", &CovarianceDeviation::ambient)
      .def_readonly("num_samples", &CovarianceDeviation::num_samples)
      .def("bound_at", &CovarianceDeviation::bound_at, py::arg("delta"), py::arg("beta"));
  m.def("covariance_deviation", &covariance_deviation, py::arg("Z"), py::arg("Sigma"));

  py::class_<CrossTerm>(m, "CrossTerm")
      .def_readonly("value", &CrossTerm::value)
      .def_readonly("threshold", &CrossTerm::threshold);
  m.def("cross_term", &cross_term, py::arg("Z"), py::arg("W"), py::arg("alpha"));

  py::class_<CurvatureEstimate>(m, "CurvatureEstimate")
      .def_readonly("curvature", &CurvatureEstimate::curvature)
      .def_readonly("sampled_min", &CurvatureEstimate::sampled_min);
  m.def("curvature_estimate", &curvature_estimate, py::arg("Z"), py::arg("trials"),
        py::arg("seed"), py::arg("probe_cols") = -1);

  py::class_<BoundParams>(m, "BoundParams")
      .def(py::init<>())
      .def_readwrite("K", &BoundParams::K)
      .def_readwrite("lam", &BoundParams::lambda)
      .def_readwrite("alpha", &BoundParams::alpha)
      .def_readwrite("gamma_min", &BoundParams::gamma_min)
      .def_readwrite("n", &BoundParams::n)
      .def_readwrite("m", &BoundParams::m)
      .def_readwrite("N", &BoundParams::N)
      .def_readwrite("r", &BoundParams::r)
      .def_readwrite("R_q", &BoundParams::R_q)
      .def_readwrite("tau_N", &BoundParams::tau_N);

  py::class_<BoundPredictions>(m, "BoundPredictions")
      .def_readonly("op_deterministic", &BoundPredictions::op_deterministic)
      .def_readonly("op_corollary_stmt", &BoundPredictions::op_corollary_stmt)
      .def_readonly("op_corollary_proof", &BoundPredictions::op_corollary_proof)
      .def_readonly("frob_remark", &BoundPredictions::frob_remark)
      .def_readonly("op_lq", &BoundPredictions::op_lq);
  m.def("predict_bounds", &predict_bounds, py::arg("params"));

  py::class_<ConeCheck>(m, "ConeCheck")
      .def_readonly("cone_ratio", &ConeCheck::cone_ratio)
      .def_readonly("nuc_vs_frob", &ConeCheck::nuc_vs_frob)
      .def_readonly("nuc_perp", &ConeCheck::nuc_perp)
      .def_readonly("nuc_bar", &ConeCheck::nuc_bar)
      .def_readonly("nuc_total", &ConeCheck::nuc_total)
      .def_readonly("frob_total", &ConeCheck::frob_total);
  m.def("cone_check", &cone_check, py::arg("delta_hat"), py::arg("frame"), py::arg("r"));
}
