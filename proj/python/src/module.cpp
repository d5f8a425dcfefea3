#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "glk/eval.hpp"
#include "glk/io.hpp"
#include "glk/netdyn.hpp"
#include "glk/simulate.hpp"
#include "glk/smoothlearn.hpp"
#include "glk/spectral_id.hpp"
#include "glk/statnet.hpp"

namespace py = pybind11;
using namespace glk;

namespace {

ShiftSetKind set_kind(const std::string& s) {
  if (s == "adjacency") return ShiftSetKind::AdjacencySet;
  if (s == "laplacian") return ShiftSetKind::LaplacianSet;
  fail(ErrorCode::BadParameter, "constraint set must be 'adjacency' or 'laplacian'");
}

ScaleRule scale_rule(const std::string& s) {
  if (s == "first-node") return ScaleRule::FirstNodeDegreeOne;
  if (s == "total") return ScaleRule::TotalWeightN;
  fail(ErrorCode::BadParameter, "scale must be 'first-node' or 'total'");
}

CombineRule combine_rule(const std::string& s) {
  if (s == "or") return CombineRule::Or;
  if (s == "and") return CombineRule::And;
  fail(ErrorCode::BadParameter, "rule must be 'or' or 'and'");
}

ShiftKind shift_kind(const std::string& s) {
  if (s == "adjacency") return ShiftKind::Adjacency;
  if (s == "laplacian") return ShiftKind::Laplacian;
  if (s == "precision") return ShiftKind::Precision;
  if (s == "generic") return ShiftKind::Generic;
  fail(ErrorCode::BadParameter, "unknown graph kind '" + s + "'");
}

py::dict trace_dict(const SolveTrace& t) {
  py::dict d;
  d["converged"] = t.converged;
  d["iterations"] = t.iters_used;
  d["objective"] = t.objective;
  d["warnings"] = t.warnings;
  return d;
}

py::dict shift_dict(const InferShiftResult& r) {
  py::dict d;
  d["S"] = r.S;
  d["eigenvalues"] = r.eigenvalues;
  d["eps"] = r.eps;
  d["partial"] = r.partial;
  d["kept_modes"] = r.kept_modes;
  d["template_distance"] = r.template_distance;
  d["trace"] = trace_dict(r.trace);
  return d;
}

ShiftConstraintSet make_set(const std::string& kind, const std::string& scale) {
  return {set_kind(kind), scale_rule(scale)};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Graph topology learning from nodal observations";

  static PyObject* error_type = PyErr_NewException("glk._core.GlkError", PyExc_RuntimeError, nullptr);
  m.attr("GlkError") = py::handle(error_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = py::handle(error_type)(e.what());
      err.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type, err.ptr());
    }
  });

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("max_iters", &SolverConfig::max_iters)
      .def_readwrite("tol", &SolverConfig::tol)
      .def_readwrite("rho", &SolverConfig::rho)
      .def_readwrite("adaptive_rho", &SolverConfig::adaptive_rho)
      .def_readwrite("step_scale", &SolverConfig::step_scale)
      .def_readwrite("power_iters", &SolverConfig::power_iters)
      .def_readwrite("seed", &SolverConfig::seed)
      .def_readwrite("jobs", &SolverConfig::jobs);

  // simulate
  m.def(
      "er_graph",
      [](Index n, double p_edge, double lo, double hi, std::uint64_t seed, bool connected) {
        Rng rng(seed);
        return Matrix(gen_er_graph(n, p_edge, WeightDist{lo, hi}, rng, connected).matrix());
      },
      py::arg("n"), py::arg("p_edge"), py::arg("lo") = 0.5, py::arg("hi") = 1.5, py::arg("seed") = 0,
      py::arg("connected") = false);
  m.def(
      "sample_gmrf",
      [](const Matrix& precision, Index p, std::uint64_t seed) {
        Rng rng(seed);
        return Matrix(sample_gmrf(precision, p, rng).data());
      },
      py::arg("precision"), py::arg("p"), py::arg("seed") = 0);
  m.def(
      "diffusion",
      [](const Matrix& S, const Vector& h, Index p, std::uint64_t seed) {
        Rng rng(seed);
        return Matrix(gen_diffusion(ShiftOperator(S, ShiftKind::Generic), FilterSpec(h), p, {}, rng).data());
      },
      py::arg("S"), py::arg("h"), py::arg("p"), py::arg("seed") = 0);
  m.def(
      "smooth_signals",
      [](const Matrix& W, Index p, double noise_var, std::uint64_t seed) {
        Rng rng(seed);
        ShiftOperator l(laplacian_from_adjacency(W), ShiftKind::Laplacian);
        return Matrix(gen_smooth(l, p, noise_var, rng).data());
      },
      py::arg("W"), py::arg("p"), py::arg("noise_var") = 0.0, py::arg("seed") = 0);
  m.def(
      "sem_signals",
      [](const Matrix& W, const Vector& omega, const Matrix& inputs, double noise_var, std::uint64_t seed) {
        Rng rng(seed);
        return Matrix(gen_sem(ShiftOperator(W, ShiftKind::Generic, true), omega, inputs, noise_var, rng).data());
      },
      py::arg("W"), py::arg("omega"), py::arg("inputs"), py::arg("noise_var") = 0.0, py::arg("seed") = 0);

  // graph primitives
  m.def("laplacian", &laplacian_from_adjacency, py::arg("W"));
  m.def(
      "eigendecompose",
      [](const Matrix& s) {
        SpectralBasis b = eigendecompose(s);
        return py::make_tuple(b.vals, b.vecs);
      },
      py::arg("S"));
  m.def(
      "gft", [](const Vector& x, const Matrix& s) { return gft(x, eigendecompose(s)); }, py::arg("x"), py::arg("S"));
  m.def(
      "total_variation",
      [](const Vector& x, const Matrix& W) {
        return total_variation(x, ShiftOperator(laplacian_from_adjacency(W), ShiftKind::Laplacian));
      },
      py::arg("x"), py::arg("W"));
  m.def(
      "stationarity_score",
      [](const Matrix& cov, const Matrix& s) { return stationarity_score(cov, eigendecompose(s)); }, py::arg("cov"),
      py::arg("S"));

  // statistical network inference
  m.def(
      "sample_covariance", [](const Matrix& X, bool centered) { return sample_covariance(SignalSet(X), centered); },
      py::arg("X"), py::arg("centered") = true);
  m.def(
      "correlation_network",
      [](const Matrix& X, double q) { return Matrix(correlation_network(SignalSet(X), q).graph.matrix()); },
      py::arg("X"), py::arg("q") = 0.1);
  m.def(
      "partial_correlation_network",
      [](const Matrix& X, double q, bool ridge) {
        return Matrix(partial_correlation_network(SignalSet(X), q, ridge).graph.matrix());
      },
      py::arg("X"), py::arg("q") = 0.1, py::arg("ridge") = false);
  m.def(
      "graphical_lasso",
      [](const Matrix& cov, double lambda, bool penalize_diagonal, const SolverConfig& cfg) {
        return graphical_lasso(cov, lambda, penalize_diagonal, cfg).theta;
      },
      py::arg("cov"), py::arg("lam"), py::arg("penalize_diagonal") = false, py::arg("config") = SolverConfig{});
  m.def(
      "laplacian_gmrf",
      [](const Matrix& cov, double lambda, const SolverConfig& cfg) {
        LaplacianGmrfResult r = laplacian_gmrf(cov, lambda, cfg);
        return py::make_tuple(r.laplacian, r.gamma);
      },
      py::arg("cov"), py::arg("lam"), py::arg("config") = SolverConfig{});
  m.def(
      "neighborhood_lasso",
      [](const Matrix& X, double lambda, const std::string& rule, const SolverConfig& cfg) {
        return Matrix(neighborhood_lasso(SignalSet(X), lambda, combine_rule(rule), cfg).graph.matrix());
      },
      py::arg("X"), py::arg("lam"), py::arg("rule") = "or", py::arg("config") = SolverConfig{});

  // smooth-signal learners
  m.def(
      "distance_matrix", [](const Matrix& X) { return distance_matrix(SignalSet(X)); }, py::arg("X"));
  m.def(
      "log_barrier_learn",
      [](const Matrix& Z, double alpha, double beta, const SolverConfig& cfg) {
        return kalofolias_learn(Z, alpha, beta, cfg).W;
      },
      py::arg("Z"), py::arg("alpha") = 1.0, py::arg("beta") = 0.5, py::arg("config") = SolverConfig{});
  m.def(
      "factor_analysis_learn",
      [](const Matrix& X, double alpha, double beta, const SolverConfig& cfg) {
        DongResult r = dong_learn(SignalSet(X), alpha, beta, cfg);
        return py::make_tuple(r.laplacian, r.Y);
      },
      py::arg("X"), py::arg("alpha"), py::arg("beta"), py::arg("config") = SolverConfig{});
  m.def(
      "edge_select", [](const Matrix& X, Index k) { return edge_select(SignalSet(X), k).laplacian; }, py::arg("X"),
      py::arg("k"));

  // spectral identification
  m.def(
      "infer_shift",
      [](const Matrix& cov, double eps, const std::string& set, const std::string& scale, const SolverConfig& cfg) {
        InferShiftOptions o;
        o.set = make_set(set, scale);
        o.eps = eps;
        return shift_dict(infer_shift(estimate_eigenbasis(cov), o, cfg));
      },
      py::arg("cov"), py::arg("eps") = 0.0, py::arg("set") = "adjacency", py::arg("scale") = "first-node",
      py::arg("config") = SolverConfig{});
  m.def(
      "network_deconvolve",
      [](const Matrix& T, double eps, const std::string& set, const std::string& scale, const SolverConfig& cfg) {
        return shift_dict(network_deconvolve(T, make_set(set, scale), eps, cfg));
      },
      py::arg("T"), py::arg("eps") = 0.0, py::arg("set") = "adjacency", py::arg("scale") = "first-node",
      py::arg("config") = SolverConfig{});
  m.def(
      "psd_filter",
      [](const std::vector<Matrix>& cov_x, const std::vector<Matrix>& cov_w, const std::vector<double>& weights) {
        if (cov_x.size() == 1 && cov_w.size() == 1) return psd_filter_recover(cov_x[0], cov_w[0]).H;
        return psd_filter_ls(cov_x, cov_w, weights).H;
      },
      py::arg("cov_x"), py::arg("cov_w"), py::arg("weights") = std::vector<double>{});
  m.def(
      "sym_filter",
      [](const std::vector<Matrix>& cov_x, const std::vector<Matrix>& cov_w) {
        SymFilterResult r = sym_filter_select(cov_x, cov_w);
        py::dict d;
        d["H"] = r.estimate.H;
        d["tie_count"] = r.tie_count;
        d["identifiable"] = r.identifiable;
        d["exhaustive"] = r.exhaustive;
        return d;
      },
      py::arg("cov_x"), py::arg("cov_w"));

  // directed and dynamic topologies
  m.def(
      "sem_fit",
      [](const std::vector<Matrix>& X, const std::vector<Matrix>& U, double alpha, const SolverConfig& cfg) {
        SemFit f = sem_fit(CascadeData(X, U), alpha, cfg);
        return py::make_tuple(Matrix(f.W.matrix()), f.omega);
      },
      py::arg("X"), py::arg("U"), py::arg("alpha"), py::arg("config") = SolverConfig{});
  m.def(
      "svarm_fit",
      [](const Matrix& X, Index lags, py::object lambda, const std::string& rule, const SolverConfig& cfg) {
        double lam = lambda.is_none() ? svarm_auto_lambda(X.rows(), lags, X.cols()) : lambda.cast<double>();
        SvarmFit f = svarm_fit(X, lags, lam, combine_rule(rule), cfg);
        return py::make_tuple(f.lags, Matrix(f.graph.matrix()));
      },
      py::arg("X"), py::arg("lags"), py::arg("lam") = py::none(), py::arg("rule") = "or",
      py::arg("config") = SolverConfig{});
  m.def(
      "dynamic_sem",
      [](const std::vector<Matrix>& X, const std::vector<Matrix>& U, double gamma, double alpha, Index stride,
         const SolverConfig& cfg) {
        GraphTrajectory tr = dynamic_sem_track(CascadeData(X, U), gamma, alpha, cfg, stride);
        py::dict d;
        d["times"] = tr.times;
        d["W"] = tr.W;
        d["omega"] = tr.omega;
        d["edge_counts"] = tr.edge_counts;
        return d;
      },
      py::arg("X"), py::arg("U"), py::arg("gamma"), py::arg("alpha"), py::arg("stride") = 1,
      py::arg("config") = SolverConfig{});

  // evaluation and files
  m.def(
      "edge_prf",
      [](const Matrix& s_hat, const Matrix& s_true, double threshold, bool directed) {
        EvalReport r = edge_prf(s_hat, s_true, threshold, directed);
        py::dict d;
        d["precision"] = r.precision;
        d["recall"] = r.recall;
        d["f_score"] = r.f_score;
        d["scale_error"] = r.scale_error;
        return d;
      },
      py::arg("S_hat"), py::arg("S_true"), py::arg("threshold") = -1.0, py::arg("directed") = false);
  m.def("scale_aligned_error", &scale_aligned_error, py::arg("S_hat"), py::arg("S_true"));
  m.def(
      "read_csv", [](const std::string& path, bool header) { return read_csv(path, header); }, py::arg("path"),
      py::arg("header") = false);
  m.def(
      "write_csv", [](const std::string& path, const Matrix& m) { write_csv(path, m); }, py::arg("path"),
      py::arg("M"));
  m.def(
      "graph_to_json",
      [](const Matrix& m, const std::string& kind, bool directed, double threshold) {
        return graph_to_json(m, shift_kind(kind), directed, threshold);
      },
      py::arg("M"), py::arg("kind") = "adjacency", py::arg("directed") = false, py::arg("threshold") = 0.0);
  m.def(
      "graph_from_json", [](const std::string& text) { return graph_from_json(text).matrix; }, py::arg("text"));
}
