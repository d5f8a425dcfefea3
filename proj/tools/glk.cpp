// glk: simulate graph signals, learn topologies, evaluate estimates.
//
// Exit status: 0 ok, 2 usage, 3 data or model error, 4 infeasible problem.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "glk/eval.hpp"
#include "glk/io.hpp"
#include "glk/netdyn.hpp"
#include "glk/simulate.hpp"
#include "glk/smoothlearn.hpp"
#include "glk/spectral_id.hpp"
#include "glk/statnet.hpp"

using namespace glk;
using json = nlohmann::ordered_json;

namespace {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("GLK_LOG");
  if (env == nullptr) return LogLevel::Error;
  std::string v(env);
  if (v == "debug") return LogLevel::Debug;
  if (v == "info") return LogLevel::Info;
  return LogLevel::Error;
}

void log_trace(const std::string& what, const SolveTrace& t) {
  LogLevel lvl = log_level();
  if (lvl < LogLevel::Info) return;
  std::fprintf(stderr, "[glk] %s: %s after %d iterations\n", what.c_str(), t.converged ? "converged" : "stopped",
               t.iters_used);
  for (const auto& w : t.warnings) std::fprintf(stderr, "[glk] warning: %s\n", w.c_str());
  if (lvl >= LogLevel::Debug && !t.objective.empty())
    std::fprintf(stderr, "[glk] objective first %.10g last %.10g\n", t.objective.front(), t.objective.back());
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::Info) std::fprintf(stderr, "[glk] %s\n", msg.c_str());
}

// Options shared by every subcommand.
struct Common {
  std::string input;
  std::string output = "-";
  std::uint64_t seed = 0;
  std::string config_path;
  int jobs = 1;
  bool header = false;
};

SolverConfig load_config(const Common& c) {
  SolverConfig cfg;
  if (!c.config_path.empty()) {
    json j;
    try {
      j = json::parse(read_text(c.config_path));
    } catch (const json::exception& e) {
      fail(ErrorCode::BadInput, std::string("config: ") + e.what());
    }
    try {
      cfg.max_iters = j.value("max_iters", cfg.max_iters);
      cfg.tol = j.value("tol", cfg.tol);
      cfg.rho = j.value("rho", cfg.rho);
      cfg.adaptive_rho = j.value("adaptive_rho", cfg.adaptive_rho);
      cfg.step_scale = j.value("step_scale", cfg.step_scale);
      cfg.power_iters = j.value("power_iters", cfg.power_iters);
      cfg.seed = j.value("seed", cfg.seed);
      cfg.jobs = j.value("jobs", cfg.jobs);
    } catch (const json::exception& e) {
      fail(ErrorCode::BadInput, std::string("config: ") + e.what());
    }
  }
  cfg.jobs = std::max(cfg.jobs, c.jobs);
  if (c.seed != 0) cfg.seed = c.seed;
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* app, Common& c, bool needs_input) {
  auto* in = app->add_option("-i,--input", c.input, "input file");
  if (needs_input) in->required();
  app->add_option("-o,--output", c.output, "output file ('-' for stdout)");
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--config", c.config_path, "solver configuration (JSON)");
  app->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
  app->add_flag("--header", c.header, "CSV files carry a header line");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

FilterSpec parse_filter(const std::string& s) {
  std::vector<double> h;
  for (const auto& item : split_list(s)) {
    try {
      h.push_back(std::stod(item));
    } catch (const std::exception&) {
      fail(ErrorCode::BadInput, "cannot parse filter coefficient '" + item + "'");
    }
  }
  require(!h.empty(), ErrorCode::BadInput, "filter needs at least one coefficient");
  return FilterSpec(Eigen::Map<const Vector>(h.data(), static_cast<Index>(h.size())));
}

double parse_lambda(const std::string& s, double automatic) {
  if (s == "auto") return automatic;
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::BadParameter, "lambda must be a number or 'auto'");
}

ShiftConstraintSet parse_set(const std::string& kind, const std::string& scale) {
  ShiftConstraintSet set;
  if (kind == "adjacency") {
    set.kind = ShiftSetKind::AdjacencySet;
  } else if (kind == "laplacian") {
    set.kind = ShiftSetKind::LaplacianSet;
  } else {
    fail(ErrorCode::BadParameter, "shift set must be 'adjacency' or 'laplacian'");
  }
  if (scale == "first-node") {
    set.scale = ScaleRule::FirstNodeDegreeOne;
  } else if (scale == "total") {
    set.scale = ScaleRule::TotalWeightN;
  } else {
    fail(ErrorCode::BadParameter, "scale must be 'first-node' or 'total'");
  }
  return set;
}

SparsityObjective parse_objective(const std::string& s) {
  if (s == "l1") return SparsityObjective::L1;
  if (s == "fro") return SparsityObjective::Frobenius;
  if (s == "linf") return SparsityObjective::Linf;
  fail(ErrorCode::BadParameter, "objective must be l1, fro or linf");
}

CombineRule parse_rule(const std::string& s) {
  if (s == "or") return CombineRule::Or;
  if (s == "and") return CombineRule::And;
  fail(ErrorCode::BadParameter, "rule must be 'or' or 'and'");
}

Matrix read_signals(const Common& c) { return read_csv(c.input, c.header); }

void emit_graph(const Common& c, const Matrix& m, ShiftKind kind, bool directed, double threshold) {
  write_text(c.output, graph_to_json(m, kind, directed, threshold < 0.0 ? default_support_threshold(m) : threshold));
}

void emit_json(const std::string& path, const json& j) { write_text(path, j.dump(1) + "\n"); }

// ---------------------------------------------------------------------------
// simulate

struct SimOpts {
  Common c;
  Index n = 10;
  Index p = 500;
  double p_edge = 0.3;
  double wlo = 0.5, whi = 1.5;
  std::string graph_in;
  std::string graph_out;
  std::string filter = "1,0.5,0.2";
  double noise = 0.0;
  double radius = 0.5;
  std::string inputs_out;
};

ShiftOperator sim_graph(const SimOpts& o, Rng& rng) {
  if (!o.graph_in.empty()) {
    GraphFile g = read_graph(o.graph_in);
    Matrix a = g.kind == ShiftKind::Laplacian ? adjacency_from_laplacian(g.matrix) : g.matrix;
    return ShiftOperator(a, ShiftKind::Adjacency, g.directed);
  }
  return gen_er_graph(o.n, o.p_edge, WeightDist{o.wlo, o.whi}, rng, true);
}

int run_simulate(const std::string& model, const SimOpts& o) {
  Rng rng(o.c.seed);
  if (model == "er") {
    ShiftOperator g = gen_er_graph(o.n, o.p_edge, WeightDist{o.wlo, o.whi}, rng, false);
    write_graph(o.c.output, g.matrix(), ShiftKind::Adjacency);
    return 0;
  }
  if (model == "sem") {
    Matrix W;
    if (!o.graph_in.empty()) {
      W = read_graph(o.graph_in).matrix;
    } else {
      W = Matrix::Zero(o.n, o.n);
      for (Index i = 0; i < o.n; ++i)
        for (Index j = 0; j < o.n; ++j)
          if (i != j && rng.bernoulli(o.p_edge)) W(i, j) = rng.uniform(o.wlo, o.whi);
      double r = spectral_radius(W);
      if (r > 0.0) W *= o.radius / r;
    }
    Matrix U = rng.normal_matrix(W.rows(), o.p);
    SignalSet X = gen_sem(ShiftOperator(W, ShiftKind::Generic, true), Vector::Ones(W.rows()), U,
                          o.noise > 0.0 ? o.noise : 0.01, rng);
    write_csv(o.c.output, X.data());
    if (!o.inputs_out.empty()) write_csv(o.inputs_out, U);
    if (!o.graph_out.empty()) write_graph(o.graph_out, W, ShiftKind::Generic, true);
    return 0;
  }

  ShiftOperator A = sim_graph(o, rng);
  Matrix X;
  ShiftKind out_kind = ShiftKind::Adjacency;
  Matrix out_graph = A.matrix();
  if (model == "gmrf") {
    Matrix L = laplacian_from_adjacency(A.matrix());
    Matrix precision = L + Matrix::Identity(L.rows(), L.cols());
    X = sample_gmrf(precision, o.p, rng).data();
    out_kind = ShiftKind::Precision;
    out_graph = precision;
  } else if (model == "diffusion") {
    X = gen_diffusion(A, parse_filter(o.filter), o.p, std::nullopt, rng).data();
  } else if (model == "smooth") {
    ShiftOperator L(laplacian_from_adjacency(A.matrix()), ShiftKind::Laplacian);
    std::vector<std::string> warnings;
    X = gen_smooth(L, o.p, o.noise, rng, &warnings).data();
    for (const auto& w : warnings) log_info("warning: " + w);
    out_kind = ShiftKind::Laplacian;
    out_graph = L.matrix();
  }
  write_csv(o.c.output, X);
  if (!o.graph_out.empty()) write_graph(o.graph_out, out_graph, out_kind, false);
  return 0;
}

// ---------------------------------------------------------------------------
// learn

struct LearnOpts {
  Common c;
  double q = 0.1;
  bool ridge = false;
  std::string lambda = "auto";
  bool penalize_diagonal = false;
  std::string rule = "or";
  double alpha = 1.0;
  double beta = 0.5;
  std::optional<double> noisy_alpha;
  Index k = 1;
  std::string set = "adjacency";
  std::string scale = "first-node";
  std::string eps = "auto";
  double kappa = 1.5;
  std::string objective = "l1";
  bool cov = false;
  Index modes = 0;
  std::string noise_inputs;
  std::string inputs;
  Index lags = 1;
  double gamma = 0.9;
  Index cascades = 1;
  Index stride = 1;
  double threshold = -1.0;
};

std::vector<Matrix> read_covariances(const std::string& list, const LearnOpts& o) {
  std::vector<Matrix> out;
  for (const auto& path : split_list(list)) {
    Matrix m = read_csv(path, o.c.header);
    out.push_back(o.cov ? m : sample_covariance(SignalSet(m)));
  }
  return out;
}

json filter_report(const FilterEstimate& f) {
  return {{"psd", f.psd}, {"method", f.provenance}};
}

CascadeData read_cascades(const LearnOpts& o) {
  Matrix X = read_csv(o.c.input, o.c.header);
  require(!o.inputs.empty(), ErrorCode::BadInput, "--inputs is required");
  Matrix U = read_csv(o.inputs, o.c.header);
  require(U.rows() == X.rows() && U.cols() == X.cols(), ErrorCode::BadDimension, "inputs must match the signals");
  require(o.cascades >= 1 && X.cols() % o.cascades == 0, ErrorCode::BadParameter,
          "column count must be a multiple of --cascades");
  const Index t = X.cols() / o.cascades;
  std::vector<Matrix> xs, us;
  for (Index c = 0; c < o.cascades; ++c) {
    xs.push_back(X.middleCols(c * t, t));
    us.push_back(U.middleCols(c * t, t));
  }
  return CascadeData(std::move(xs), std::move(us));
}

int run_learn(const std::string& method, const LearnOpts& o) {
  SolverConfig cfg = load_config(o.c);

  if (method == "psd-filter" || method == "sym-filter") {
    std::vector<Matrix> sx = read_covariances(o.c.input, o);
    require(!o.noise_inputs.empty(), ErrorCode::BadInput, "--noise is required");
    std::vector<Matrix> sw = read_covariances(o.noise_inputs, o);
    if (method == "psd-filter") {
      std::vector<double> weights;
      if (!o.cov) {
        std::vector<Index> sizes;
        for (const auto& path : split_list(o.c.input)) sizes.push_back(read_csv(path, o.c.header).cols());
        weights = sample_size_weights(sizes);
      }
      FilterEstimate f = sx.size() == 1 ? psd_filter_recover(sx[0], sw[0]) : psd_filter_ls(sx, sw, weights, cfg);
      write_csv(o.c.output, f.H);
      log_info("filter estimate: " + filter_report(f).dump());
    } else {
      SymFilterResult r = sym_filter_select(sx, sw, cfg);
      write_csv(o.c.output, r.estimate.H);
      json rep = {{"identifiable", r.identifiable}, {"tie_count", r.tie_count},
                  {"exhaustive", r.exhaustive},     {"residual", r.residual},
                  {"signs", r.signs}};
      log_info("sign search: " + rep.dump());
      if (!r.identifiable) std::fprintf(stderr, "[glk] warning: filter not identifiable (%lld tied sign patterns)\n", r.tie_count);
    }
    return 0;
  }

  if (method == "deconv") {
    Matrix T = read_matrix_any(o.c.input);
    double eps = parse_lambda(o.eps, 0.0);
    InferShiftResult r = network_deconvolve(T, parse_set(o.set, o.scale), eps, cfg);
    log_trace("deconvolution", r.trace);
    emit_graph(o.c, r.S, ShiftKind::Adjacency, false, o.threshold);
    return 0;
  }

  if (method == "sem" || method == "dsem") {
    CascadeData data = read_cascades(o);
    if (method == "sem") {
      SemFit f = sem_fit(data, o.alpha, cfg);
      log_trace("sem", f.trace);
      emit_graph(o.c, f.W.matrix(), ShiftKind::Generic, true, o.threshold);
    } else {
      GraphTrajectory tr = dynamic_sem_track(data, o.gamma, o.alpha, cfg, o.stride);
      log_trace("dynamic sem", tr.trace);
      json j;
      j["times"] = tr.times;
      j["edge_counts"] = tr.edge_counts;
      j["objective"] = tr.objective;
      json graphs = json::array();
      for (size_t k = 0; k < tr.W.size(); ++k) {
        json g = json::parse(graph_to_json(tr.W[k], ShiftKind::Generic, true, 0.0));
        g["t"] = tr.times[k];
        std::vector<double> om(tr.omega[k].data(), tr.omega[k].data() + tr.omega[k].size());
        g["omega"] = om;
        graphs.push_back(std::move(g));
      }
      j["graphs"] = std::move(graphs);
      emit_json(o.c.output, j);
    }
    return 0;
  }

  Matrix X = read_signals(o.c);
  const Index n = X.rows();
  const Index p = X.cols();

  if (method == "svarm") {
    SvarmFit f = svarm_fit(X, o.lags, parse_lambda(o.lambda, svarm_auto_lambda(n, o.lags, p)), parse_rule(o.rule), cfg);
    log_trace("svarm", f.trace);
    emit_graph(o.c, f.graph.matrix(), ShiftKind::Adjacency, true, 0.0);
    return 0;
  }
  if (method == "spectral" || method == "spectral-partial") {
    SpectralBasis basis = o.cov ? estimate_eigenbasis(X) : estimate_eigenbasis(SignalSet(X));
    ShiftConstraintSet set = parse_set(o.set, o.scale);
    InferShiftResult r;
    if (method == "spectral") {
      InferShiftOptions opts;
      opts.set = set;
      opts.objective = parse_objective(o.objective);
      opts.eps = o.eps == "auto" ? eps_heuristic(basis.vecs, set, o.kappa) : parse_lambda(o.eps, 0.0);
      log_info("eps = " + std::to_string(opts.eps));
      r = infer_shift(basis, opts, cfg);
    } else {
      require(o.modes >= 1 && o.modes <= n, ErrorCode::BadParameter, "--modes must lie in [1, N]");
      // Leading modes: largest covariance eigenvalues.
      Matrix vk = basis.vecs.rightCols(o.modes);
      double eps = o.eps == "auto" ? eps_heuristic(vk, set, o.kappa) : parse_lambda(o.eps, 0.0);
      log_info("eps = " + std::to_string(eps));
      r = infer_shift_partial(vk, set, cfg, eps);
    }
    log_trace("spectral templates", r.trace);
    emit_graph(o.c, r.S, set.kind == ShiftSetKind::LaplacianSet ? ShiftKind::Laplacian : ShiftKind::Adjacency, false,
               o.threshold);
    return 0;
  }

  SignalSet S(X);
  if (method == "corr" || method == "pcorr") {
    NetworkTest t = method == "corr" ? correlation_network(S, o.q) : partial_correlation_network(S, o.q, o.ridge);
    emit_graph(o.c, t.graph.matrix(), ShiftKind::Adjacency, false, 0.0);
    return 0;
  }
  if (method == "glasso") {
    double lam = parse_lambda(o.lambda, glasso_auto_lambda(n, p));
    log_info("lambda = " + std::to_string(lam));
    GlassoResult g = graphical_lasso(sample_covariance(S), lam, o.penalize_diagonal, cfg);
    log_trace("graphical lasso", g.trace);
    emit_graph(o.c, g.theta, ShiftKind::Precision, false, o.threshold);
    return 0;
  }
  if (method == "lgmrf") {
    double lam = parse_lambda(o.lambda, glasso_auto_lambda(n, p));
    LaplacianGmrfResult g = laplacian_gmrf(sample_covariance(S), lam, cfg);
    log_trace("Laplacian GMRF", g.trace);
    emit_graph(o.c, g.laplacian, ShiftKind::Laplacian, false, o.threshold);
    return 0;
  }
  if (method == "nlasso") {
    double lam = parse_lambda(o.lambda, neighborhood_auto_lambda(n, p));
    NeighborhoodResult r = neighborhood_lasso(S, lam, parse_rule(o.rule), cfg);
    emit_graph(o.c, r.graph.matrix(), ShiftKind::Adjacency, false, 0.0);
    return 0;
  }
  if (method == "dong") {
    DongResult r = dong_learn(S, o.alpha, o.beta, cfg);
    log_trace("factor-analysis learner", r.trace);
    emit_graph(o.c, r.laplacian, ShiftKind::Laplacian, false, o.threshold);
    return 0;
  }
  if (method == "kalofolias") {
    GraphSolveResult r = kalofolias_learn(distance_matrix(S), o.alpha, o.beta, cfg);
    log_trace("log-barrier learner", r.trace);
    emit_graph(o.c, r.W, ShiftKind::Adjacency, false, o.threshold);
    return 0;
  }
  if (method == "edge-select") {
    EdgeSelection sel = o.noisy_alpha ? edge_select_noisy(S, o.k, *o.noisy_alpha).selection : edge_select(S, o.k);
    emit_graph(o.c, sel.laplacian, ShiftKind::Laplacian, false, 0.0);
    return 0;
  }
  fail(ErrorCode::BadParameter, "unknown method " + method);
}

// ---------------------------------------------------------------------------
// eval and spectrum

struct EvalOpts {
  Common c;
  std::string truth;
  double threshold = -1.0;
  bool directed = false;
  std::string ks;
};

int run_eval(const EvalOpts& o) {
  Matrix est = read_matrix_any(o.c.input);
  Matrix truth = read_matrix_any(o.truth);
  // Laplacians are compared through their adjacency weights.
  auto as_weights = [](const std::string& path, const Matrix& m) {
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json" && read_graph(path).kind == ShiftKind::Laplacian)
      return adjacency_from_laplacian(m);
    return m;
  };
  est = as_weights(o.c.input, est);
  truth = as_weights(o.truth, truth);
  EvalReport r = edge_prf(est, truth, o.threshold, o.directed);
  json j;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f_score"] = r.f_score;
  j["true_positives"] = r.true_positives;
  j["false_positives"] = r.false_positives;
  j["false_negatives"] = r.false_negatives;
  if (truth.norm() > 0.0) j["scale_aligned_error"] = r.scale_error;
  else j["scale_aligned_error"] = nullptr;
  if (!o.ks.empty()) {
    std::vector<Index> ks;
    for (const auto& s : split_list(o.ks)) ks.push_back(std::stol(s));
    json curve = json::array();
    for (auto [k, frac] : topk_recovery_curve(est, truth, ks, o.threshold, o.directed))
      curve.push_back({{"k", k}, {"fraction", frac}});
    j["topk_curve"] = std::move(curve);
  }
  emit_json(o.c.output, j);
  return 0;
}

struct SpectrumOpts {
  Common c;
  std::string signal;
  Index bandlimit = 0;
  std::string order = "magnitude";
};

int run_spectrum(const SpectrumOpts& o) {
  GraphFile g = read_graph(o.c.input);
  require(!g.directed, ErrorCode::NotSymmetric, "spectrum needs an undirected graph");
  ShiftOperator S(g.matrix, g.kind);
  SpectralBasis basis = eigendecompose(S);
  json j;
  j["kind"] = std::string(to_string(g.kind));
  j["eigenvalues"] = std::vector<double>(basis.vals.data(), basis.vals.data() + basis.n());
  j["degenerate"] = basis.degenerate();
  if (!o.signal.empty()) {
    Matrix X = read_csv(o.signal, o.c.header);
    require(X.rows() == basis.n(), ErrorCode::BadDimension, "signal length does not match the graph");
    json sigs = json::array();
    for (Index p = 0; p < X.cols(); ++p) {
      Vector x = X.col(p);
      Vector xt = gft(x, basis);
      json s;
      s["gft"] = std::vector<double>(xt.data(), xt.data() + xt.size());
      if (g.kind == ShiftKind::Laplacian) s["total_variation"] = total_variation(x, S);
      if (o.bandlimit > 0) {
        CoefficientOrder ord = o.order == "frequency" ? CoefficientOrder::Frequency : CoefficientOrder::Magnitude;
        Reconstruction r = bandlimit_reconstruct(x, basis, o.bandlimit, ord);
        s["bandlimited_rel_err"] = r.rel_err;
        s["kept"] = r.kept;
      }
      sigs.push_back(std::move(s));
    }
    j["signals"] = std::move(sigs);
    if (X.cols() >= 2) {
      PsdEstimate psd = graph_psd(sample_covariance(SignalSet(X)), basis);
      j["psd"] = std::vector<double>(psd.psd.data(), psd.psd.data() + psd.psd.size());
      j["stationarity_score"] = psd.score;
    }
  }
  emit_json(o.c.output, j);
  return 0;
}

int exit_code_for(const Error& e) { return e.code() == ErrorCode::Infeasible ? 4 : 3; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph topology inference toolkit"};
  app.require_subcommand(1);

  // simulate
  SimOpts sim;
  std::string sim_model;
  auto* simulate = app.add_subcommand("simulate", "generate synthetic graphs and signals");
  simulate->add_option("model", sim_model, "er | gmrf | diffusion | smooth | sem")
      ->required()
      ->check(CLI::IsMember({"er", "gmrf", "diffusion", "smooth", "sem"}));
  add_common(simulate, sim.c, false);
  simulate->add_option("--n", sim.n, "number of vertices")->check(CLI::PositiveNumber);
  simulate->add_option("--p", sim.p, "number of samples")->check(CLI::PositiveNumber);
  simulate->add_option("--p-edge", sim.p_edge, "edge probability")->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--wlo", sim.wlo, "smallest edge weight");
  simulate->add_option("--whi", sim.whi, "largest edge weight");
  simulate->add_option("--graph", sim.graph_in, "use this graph instead of a random one");
  simulate->add_option("--graph-out", sim.graph_out, "write the generating graph here");
  simulate->add_option("--filter", sim.filter, "diffusion filter taps, comma separated");
  simulate->add_option("--noise", sim.noise, "noise variance")->check(CLI::NonNegativeNumber);
  simulate->add_option("--radius", sim.radius, "SEM spectral radius")->check(CLI::Range(0.0, 0.999));
  simulate->add_option("--inputs-out", sim.inputs_out, "SEM exogenous inputs");

  // learn
  LearnOpts learn;
  std::string learn_method;
  auto* lrn = app.add_subcommand("learn", "estimate a graph from data");
  lrn->add_option("method", learn_method, "inference method")
      ->required()
      ->check(CLI::IsMember({"corr", "pcorr", "glasso", "lgmrf", "nlasso", "dong", "kalofolias", "edge-select",
                             "spectral", "spectral-partial", "psd-filter", "sym-filter", "deconv", "sem", "svarm",
                             "dsem"}));
  add_common(lrn, learn.c, true);
  lrn->add_option("--q", learn.q, "FDR level")->check(CLI::Range(0.0, 1.0));
  lrn->add_flag("--ridge", learn.ridge, "ridge-load the covariance (pcorr)");
  lrn->add_option("--lambda", learn.lambda, "penalty weight or 'auto'");
  lrn->add_flag("--penalize-diagonal", learn.penalize_diagonal, "penalize the precision diagonal (glasso)");
  lrn->add_option("--rule", learn.rule, "edge rule: or | and")->check(CLI::IsMember({"or", "and"}));
  lrn->add_option("--alpha", learn.alpha, "smoothness / sparsity weight");
  lrn->add_option("--beta", learn.beta, "Frobenius weight");
  lrn->add_option("--denoise", learn.noisy_alpha, "edge-select: alternate with denoising at this weight");
  lrn->add_option("--k", learn.k, "edge count (edge-select)");
  lrn->add_option("--set", learn.set, "adjacency | laplacian")->check(CLI::IsMember({"adjacency", "laplacian"}));
  lrn->add_option("--scale", learn.scale, "first-node | total")->check(CLI::IsMember({"first-node", "total"}));
  lrn->add_option("--eps", learn.eps, "spectral tolerance or 'auto'");
  lrn->add_option("--kappa", learn.kappa, "multiplier for --eps auto");
  lrn->add_option("--objective", learn.objective, "l1 | fro | linf")->check(CLI::IsMember({"l1", "fro", "linf"}));
  lrn->add_flag("--cov", learn.cov, "inputs are covariance matrices");
  lrn->add_option("--modes", learn.modes, "leading eigenvectors used (spectral-partial)");
  lrn->add_option("--noise", learn.noise_inputs, "input-noise signals, comma separated (filter methods)");
  lrn->add_option("--inputs", learn.inputs, "exogenous inputs (sem, dsem)");
  lrn->add_option("--lags", learn.lags, "lag order (svarm)")->check(CLI::PositiveNumber);
  lrn->add_option("--gamma", learn.gamma, "forgetting factor (dsem)");
  lrn->add_option("--cascades", learn.cascades, "cascades stacked side by side (sem, dsem)")
      ->check(CLI::PositiveNumber);
  lrn->add_option("--stride", learn.stride, "emit every k-th epoch (dsem)")->check(CLI::PositiveNumber);
  lrn->add_option("--threshold", learn.threshold, "drop entries at or below this magnitude");

  // eval
  EvalOpts ev;
  auto* eval = app.add_subcommand("eval", "compare an estimate with the truth");
  add_common(eval, ev.c, true);
  eval->add_option("--truth", ev.truth, "reference graph")->required();
  eval->add_option("--threshold", ev.threshold, "support threshold (default 1e-6 max|entry|)");
  eval->add_flag("--directed", ev.directed, "count ordered pairs");
  eval->add_option("--ks", ev.ks, "top-k curve points, comma separated");

  // spectrum
  SpectrumOpts sp;
  auto* spectrum = app.add_subcommand("spectrum", "GFT, PSD and total-variation utilities");
  add_common(spectrum, sp.c, true);
  spectrum->add_option("--signal", sp.signal, "signals to transform (CSV)");
  spectrum->add_option("--bandlimit", sp.bandlimit, "keep this many GFT coefficients");
  spectrum->add_option("--order", sp.order, "magnitude | frequency")->check(CLI::IsMember({"magnitude", "frequency"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    if (*simulate) return run_simulate(sim_model, sim);
    if (*lrn) return run_learn(learn_method, learn);
    if (*eval) return run_eval(ev);
    if (*spectrum) return run_spectrum(sp);
  } catch (const Error& e) {
    std::fprintf(stderr, "glk: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "glk: %s\n", e.what());
    return 3;
  }
  return 2;
}
