#include "finito/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include "finito/io.hpp"
#include "finito/lower_bounds.hpp"
#include "finito/solvers.hpp"
#include "finito/theory.hpp"

namespace finito::cli {
namespace {

using theory::CheckReport;

struct ProblemArgs {
  std::string data;
  std::string format = "auto";  // libsvm, csv or auto (by extension)
  std::string synth;
  std::string loss = "logistic";
  std::optional<double> s;
  std::optional<double> l1;
  std::optional<Index> d_hint;
  std::string fstar = "auto";
};

struct LoadedProblem {
  std::unique_ptr<FiniteSumProblem> problem;
  std::optional<ReferenceSolution> reference;
};

void add_problem_flags(CLI::App* cmd, ProblemArgs& args) {
  auto* data = cmd->add_option("--data", args.data, "LIBSVM or CSV dataset");
  auto* synth = cmd->add_option("--synth", args.synth,
                                "synthetic problem, e.g. n=200,d=10,beta=2,loss=logistic");
  data->excludes(synth);
  cmd->add_option("--format", args.format, "dataset format")
      ->check(CLI::IsMember({"auto", "libsvm", "csv"}));
  cmd->add_option("--loss", args.loss, "logistic or squared (datasets)");
  cmd->add_option("--s", args.s, "ridge / strong convexity constant");
  cmd->add_option("--l1", args.l1, "L1 weight");
  cmd->add_option("--dim", args.d_hint, "feature dimension for LIBSVM input");
  cmd->add_option("--fstar", args.fstar, "reference optimum: a file holding f*, auto or none");
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  return in;
}

LoadedProblem load_problem(const ProblemArgs& args, std::ostream& err) {
  LoadedProblem out;
  const bool want_reference = args.fstar == "auto";
  if (!args.synth.empty()) {
    io::SynthSpec spec = io::parse_synth_spec(args.synth);
    if (args.s) spec.s = *args.s;
    if (args.l1) spec.l1_weight = *args.l1;
    out.problem = std::make_unique<FiniteSumProblem>(io::synth_problem(spec));
  } else if (!args.data.empty()) {
    std::ifstream in = open_in(args.data);
    const bool csv = args.format == "csv" ||
                     (args.format == "auto" &&
                      std::filesystem::path(args.data).extension() == ".csv");
    io::Dataset ds = csv ? io::parse_csv_dataset(in)
                         : io::parse_libsvm(in, io::LibsvmOptions{.d_hint = args.d_hint});
    if (!ds.warning.empty()) err << "warning: " << ds.warning << '\n';
    const LossKind loss = parse_loss(args.loss);
    if (loss == LossKind::Logistic) io::normalize_binary_labels(ds.targets);
    FiniteSumProblem::Options opts{.ridge = args.s.value_or(1e-3),
                                   .l1_weight = args.l1.value_or(0.0)};
    out.problem = std::make_unique<FiniteSumProblem>(std::move(ds.features),
                                                     std::move(ds.targets), loss, opts);
  } else {
    throw InvalidArgument("one of --data or --synth is required");
  }

  if (want_reference) {
    out.reference = solve_reference(*out.problem);
  } else if (args.fstar != "none") {
    std::ifstream in = open_in(args.fstar);
    std::string token;
    in >> token;
    ReferenceSolution ref;
    ref.f_star = io::parse_double(token);
    ref.method_tag = "file";
    out.reference = ref;
  }
  return out;
}

/// "-" is standard output.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw InvalidArgument("cannot write '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

Initialization parse_init(const std::string& name) {
  if (name == "first-pass") return Initialization::FirstPass;
  if (name == "all-equal") return Initialization::AllEqual;
  throw InvalidArgument("unknown initialization '" + name + "'");
}

// ---------------------------------------------------------------------------
// run

struct RunArgs {
  ProblemArgs problem;
  std::string solver = "finito";
  double alpha = 2.0;
  std::optional<double> step;
  bool practical_step = false;
  std::string sampling = "uniform";
  std::uint64_t seed = 0;
  long epochs = 10;
  std::string init = "first-pass";
  long record_every = 0;
  std::string out = "-";
  std::string checkpoint;
  std::string resume;
};

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err) {
  SolverConfig config;
  config.solver = parse_solver(args.solver);
  config.alpha = args.alpha;
  config.step = args.step;
  config.sag_practical_step = args.practical_step;
  config.sampling = parse_sampling(args.sampling, args.seed);
  config.epochs = args.epochs;
  config.init = parse_init(args.init);
  config.record_every = args.record_every;

  LoadedProblem loaded = load_problem(args.problem, err);
  const ReferenceSolution* ref = loaded.reference ? &*loaded.reference : nullptr;

  std::optional<Runner> runner;
  if (!args.resume.empty()) {
    std::ifstream in = open_in(args.resume);
    const io::Checkpoint ckpt = io::checkpoint_load(in, *loaded.problem);
    runner.emplace(io::resume(*loaded.problem, ckpt, config, ref));
  } else {
    runner.emplace(*loaded.problem, config, ref);
  }

  Sink sink(args.out, out);
  std::vector<TraceRecord> trace;
  try {
    trace = continue_run(*runner);
  } catch (const DivergenceError& e) {
    io::write_trace(*sink, e.partial_trace);
    err << "diverged: " << e.what() << '\n';
    return kDivergence;
  }
  io::write_trace(*sink, trace);
  if (!args.checkpoint.empty()) {
    std::ofstream ck(args.checkpoint);
    if (!ck) throw InvalidArgument("cannot write '" + args.checkpoint + "'");
    io::checkpoint_save(ck, io::capture(*runner));
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// compare

struct CompareArgs {
  ProblemArgs problem;
  std::vector<std::string> configs;
  long seeds = 11;
  std::uint64_t seed_base = 0;
  double alpha = 2.0;
  long epochs = 10;
  std::string init = "first-pass";
  std::string trace_dir;
  std::string out = "-";
};

struct CellConfig {
  std::string label;
  SolverKind solver;
  std::string sampling;
};

CellConfig parse_cell(const std::string& text) {
  const auto colon = text.find(':');
  CellConfig cell;
  cell.solver = parse_solver(text.substr(0, colon));
  cell.sampling = colon == std::string::npos ? "uniform" : text.substr(colon + 1);
  parse_sampling(cell.sampling, 0);
  cell.label = std::string(to_string(cell.solver)) + "-" + cell.sampling;
  return cell;
}

int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err) {
  if (args.configs.empty()) throw InvalidArgument("at least one --config is required");
  if (args.seeds < 1) throw InvalidArgument("--seeds must be >= 1");
  std::vector<CellConfig> cells;
  for (const auto& c : args.configs) cells.push_back(parse_cell(c));

  LoadedProblem loaded = load_problem(args.problem, err);
  if (!loaded.reference) throw InvalidArgument("compare needs a reference (--fstar)");
  const auto rows = static_cast<std::size_t>(args.epochs) + 1;

  // subopt[cell][row] holds one value per seed; missing rows stay +inf.
  std::vector<std::vector<std::vector<double>>> subopt(
      cells.size(), std::vector<std::vector<double>>(rows));
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (long t = 0; t < args.seeds; ++t) {
      const std::uint64_t seed = args.seed_base + static_cast<std::uint64_t>(t);
      SolverConfig config;
      config.solver = cells[c].solver;
      config.alpha = args.alpha;
      config.sampling = parse_sampling(cells[c].sampling, seed);
      config.epochs = args.epochs;
      config.init = parse_init(args.init);
      std::vector<TraceRecord> trace;
      try {
        trace = run(*loaded.problem, config, &*loaded.reference);
      } catch (const DivergenceError& e) {
        trace = e.partial_trace;
        err << "note: " << cells[c].label << " seed " << seed << " diverged at epoch "
            << (trace.empty() ? 0.0 : trace.back().epoch) << '\n';
      }
      if (!args.trace_dir.empty()) {
        const auto path = std::filesystem::path(args.trace_dir) /
                          (cells[c].label + "-seed" + std::to_string(seed) + ".csv");
        std::ofstream f(path);
        if (!f) throw InvalidArgument("cannot write '" + path.string() + "'");
        io::write_trace(f, trace);
      }
      for (std::size_t r = 0; r < rows; ++r)
        subopt[c][r].push_back(r < trace.size()
                                   ? trace[r].suboptimality
                                   : std::numeric_limits<double>::infinity());
    }
  }

  Sink sink(args.out, out);
  *sink << "epoch";
  for (const auto& cell : cells) *sink << ',' << cell.label;
  *sink << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    *sink << r;
    for (std::size_t c = 0; c < cells.size(); ++c)
      *sink << ',' << io::format_double(median(subopt[c][r]));
    *sink << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// verify suites

io::SynthSpec suite_problem(const VerifyOptions& o, Index n, Index d, LossKind loss) {
  io::SynthSpec spec;
  spec.n = n;
  spec.d = d;
  spec.loss = loss;
  spec.target_beta = o.beta;
  spec.seed = o.seed;
  return spec;
}

void append(std::vector<CheckReport>& to, std::vector<CheckReport> from) {
  to.insert(to.end(), std::make_move_iterator(from.begin()),
            std::make_move_iterator(from.end()));
}

std::vector<CheckReport> suite_inequalities(const VerifyOptions& o) {
  const io::SynthResult synth =
      io::synth_problem_with_reference(suite_problem(o, o.n.value_or(40), o.d.value_or(5),
                                                     LossKind::Logistic));
  const FiniteSumProblem& p = synth.problem;
  const long draws = o.draws.value_or(1000);
  const double tol = theory::kInequalityTolerance;
  std::vector<CheckReport> out =
      theory::convexity_suite(p, draws, tol, o.seed, synth.reference.w_star);

  rng::Stream gen(rng::derive(o.seed, 0x1b));
  for (long t = 0; t < draws; ++t) {
    const auto i = static_cast<Index>(t % p.n());
    const Vector x = theory::random_in_ball(gen, synth.reference.w_star, 2.0);
    const Vector y = theory::random_in_ball(gen, synth.reference.w_star, 2.0);
    out.push_back(theory::strong_lb_check(p, i, x, y, tol));
    const Matrix phi = theory::random_phi_table(gen, p.n(), synth.reference.w_star, 2.0);
    const Vector z = theory::random_in_ball(gen, synth.reference.w_star, 2.0);
    out.push_back(theory::big_data_lb_check(p, phi, z, o.beta, tol));
  }
  return out;
}

std::vector<CheckReport> suite_lyapunov(const VerifyOptions& o,
                                        std::vector<CheckReport>* diagnostics) {
  const io::SynthResult synth =
      io::synth_problem_with_reference(suite_problem(o, o.n.value_or(40), o.d.value_or(5),
                                                     LossKind::Logistic));
  const FiniteSumProblem& p = synth.problem;
  rng::Stream gen(rng::derive(o.seed, 0x17));
  const Vector w0 = theory::random_in_ball(gen, synth.reference.w_star, 2.0);
  const auto states =
      theory::trajectory_states(p, o.alpha, w0, o.draws.value_or(200), o.seed);

  std::vector<CheckReport> out;
  const theory::LyapunovTerms t0 = theory::lyapunov_evaluate(p, states.front().phi_table,
                                                             states.front().w);
  const double closed = theory::initial_lyapunov(p, w0, o.alpha);
  out.push_back(theory::equality_report(
      "initial-lyapunov", closed, t0.total,
      theory::kEqualityTolerance * (1.0 + std::abs(t0.total))));
  for (const FinitoState& st : states) {
    const std::string ctx = "k=" + std::to_string(st.k);
    auto tag = [&](CheckReport r) {
      if (r.context.rfind(ctx, 0) != 0)
        r.context = r.context.empty() ? ctx : ctx + ";" + r.context;
      return r;
    };
    out.push_back(tag(theory::expected_decrease_check(p, st, o.beta)));
    out.push_back(tag(theory::bound_gap_check(p, st.phi_table, st.w, o.alpha,
                                              synth.reference)));
    out.push_back(tag(theory::expected_step_check(p, st)));
    out.push_back(tag(theory::variance_decomposition_check(st.phi_table, st.w)));
    out.push_back(tag(theory::update_identity_check(
        p, st, static_cast<Index>(st.k % static_cast<std::uint64_t>(p.n())))));
    if (diagnostics != nullptr)
      for (auto& r : theory::term_diagnostics(p, st, o.beta)) diagnostics->push_back(tag(r));
  }
  return out;
}

std::vector<CheckReport> suite_rate(const VerifyOptions& o) {
  const io::SynthResult synth =
      io::synth_problem_with_reference(suite_problem(o, o.n.value_or(200), o.d.value_or(10),
                                                     LossKind::Logistic));
  const FiniteSumProblem& p = synth.problem;
  const long seeds = o.draws.value_or(20);
  const Vector phi0 = Vector::Zero(p.d());
  std::vector<std::vector<TraceRecord>> traces;
  for (long t = 0; t < seeds; ++t) {
    SolverConfig config;
    config.solver = SolverKind::Finito;
    config.alpha = o.alpha;
    config.sampling = SamplingScheme{SamplingKind::UniformWithReplacement,
                                     o.seed + static_cast<std::uint64_t>(t)};
    config.epochs = 10;
    config.audit = true;
    config.init = Initialization::AllEqual;
    config.trace_point = TracePoint::PhiMean;
    config.w0 = phi0;
    traces.push_back(run(p, config, &synth.reference));
  }
  return theory::rate_curve(traces, p, o.alpha, phi0);
}

std::vector<CheckReport> suite_lowerbound(const VerifyOptions& o) {
  const Index n = o.n.value_or(10);
  const auto trials = static_cast<std::uint64_t>(o.draws.value_or(100000));
  const std::vector<std::uint64_t> ks = {1, 5, 10, 20};
  const auto curve = lower_bounds::simulate_unseen_curve(n, ks, trials, o.seed);
  std::vector<CheckReport> out;
  for (const auto& row : curve) {
    const std::string ctx = "k=" + std::to_string(row.k);
    out.push_back(theory::inequality_report(
        "unseen-mean", std::abs(row.mean - lower_bounds::expected_unseen(n, row.k)),
        4.0 * row.stderr_mean, 0.0, ctx));
    out.push_back(theory::inequality_report(
        "unseen-martingale", std::abs(row.martingale_mean - static_cast<double>(n)),
        4.0 * row.martingale_stderr, 0.0, ctx));
  }
  const auto steps = static_cast<std::uint64_t>(20 * n);
  for (SolverKind solver : {SolverKind::Finito, SolverKind::Sag}) {
    const auto m = lower_bounds::floor_margin(n, solver, steps, o.seed, o.alpha);
    out.push_back(theory::inequality_report(
        "oracle-floor-" + std::string(to_string(solver)), m.floor_at_worst, m.gap_at_worst,
        1e-9, "step=" + std::to_string(m.worst_step)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// lowerbound

struct LowerBoundArgs {
  Index n = 10;
  std::vector<std::uint64_t> ks = {0, 1, 5, 10, 20};
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  std::string out = "-";
};

int cmd_lowerbound(LowerBoundArgs args, std::ostream& out) {
  std::sort(args.ks.begin(), args.ks.end());
  args.ks.erase(std::unique(args.ks.begin(), args.ks.end()), args.ks.end());
  const auto curve = lower_bounds::simulate_unseen_curve(args.n, args.ks, args.trials,
                                                         args.seed);
  Sink sink(args.out, out);
  *sink << "k,formula,mc_mean,mc_stderr,martingale_mean\n";
  for (const auto& row : curve)
    *sink << row.k << ',' << io::format_double(lower_bounds::expected_unseen(args.n, row.k))
          << ',' << io::format_double(row.mean) << ',' << io::format_double(row.stderr_mean)
          << ',' << io::format_double(row.martingale_mean) << '\n';
  return kOk;
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  if (values.size() % 2 == 1) return values[m];
  return 0.5 * (values[m - 1] + values[m]);
}

std::vector<CheckReport> verify(const VerifyOptions& options,
                                std::vector<CheckReport>* diagnostics) {
  const std::string& s = options.suite;
  const bool all = s == "all";
  if (!all && s != "inequalities" && s != "lyapunov" && s != "rate" && s != "lowerbound")
    throw InvalidArgument("unknown suite '" + s + "'");
  // Suite-specific defaults only apply when the suite runs alone.
  VerifyOptions o = options;
  if (all) {
    o.n.reset();
    o.d.reset();
    o.draws.reset();
  }
  std::vector<CheckReport> out;
  if (all || s == "inequalities") append(out, suite_inequalities(o));
  if (all || s == "lyapunov") append(out, suite_lyapunov(o, diagnostics));
  if (all || s == "rate") append(out, suite_rate(o));
  if (all || s == "lowerbound") append(out, suite_lowerbound(o));
  return out;
}

void write_reports(std::ostream& out, const std::vector<CheckReport>& reports) {
  out << kReportHeader << '\n';
  for (const auto& r : reports)
    out << r.name << ',' << r.context << ',' << io::format_double(r.lhs) << ','
        << io::format_double(r.rhs) << ',' << io::format_double(r.slack) << ','
        << io::format_double(r.tolerance) << ',' << (r.satisfied ? "true" : "false")
        << '\n';
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Incremental gradient solvers, benchmarks and numerical proof checks"};
  app.name("finito");
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "run one solver and write its trace");
  add_problem_flags(run_cmd, run_args.problem);
  run_cmd->add_option("--solver", run_args.solver)
      ->check(CLI::IsMember({"finito", "prox-finito", "sag", "miso", "full-gradient"}));
  run_cmd->add_option("--alpha", run_args.alpha);
  run_cmd->add_option("--step", run_args.step, "step size (sag, full-gradient)");
  run_cmd->add_flag("--practical-step", run_args.practical_step, "SAG step 1/(L n)");
  run_cmd->add_option("--sampling", run_args.sampling)
      ->check(CLI::IsMember({"uniform", "permuted", "permuted-frozen", "cyclic"}));
  run_cmd->add_option("--seed", run_args.seed);
  run_cmd->add_option("--epochs", run_args.epochs, "total passes");
  run_cmd->add_option("--init", run_args.init)
      ->check(CLI::IsMember({"first-pass", "all-equal"}));
  run_cmd->add_option("--record-every", run_args.record_every, "steps between records");
  run_cmd->add_option("--out", run_args.out, "trace CSV ('-' for stdout)");
  run_cmd->add_option("--checkpoint", run_args.checkpoint, "write a checkpoint at the end");
  run_cmd->add_option("--resume", run_args.resume, "continue from a checkpoint");

  CompareArgs cmp_args;
  auto* cmp_cmd = app.add_subcommand("compare", "median traces over seeds per config");
  add_problem_flags(cmp_cmd, cmp_args.problem);
  cmp_cmd->add_option("--config", cmp_args.configs, "solver[:sampling], repeatable")
      ->required();
  cmp_cmd->add_option("--seeds", cmp_args.seeds, "seeds per config");
  cmp_cmd->add_option("--seed-base", cmp_args.seed_base);
  cmp_cmd->add_option("--alpha", cmp_args.alpha);
  cmp_cmd->add_option("--epochs", cmp_args.epochs);
  cmp_cmd->add_option("--init", cmp_args.init)
      ->check(CLI::IsMember({"first-pass", "all-equal"}));
  cmp_cmd->add_option("--trace-dir", cmp_args.trace_dir, "write one trace per cell here");
  cmp_cmd->add_option("--out", cmp_args.out, "aggregate CSV");

  VerifyOptions ver;
  std::string ver_out = "-";
  auto* ver_cmd = app.add_subcommand("verify", "numerical checks of the convergence proof");
  ver_cmd->add_option("--suite", ver.suite)
      ->check(CLI::IsMember({"inequalities", "lyapunov", "rate", "lowerbound", "all"}));
  ver_cmd->add_option("--n", ver.n);
  ver_cmd->add_option("--d", ver.d);
  ver_cmd->add_option("--beta", ver.beta);
  ver_cmd->add_option("--alpha", ver.alpha);
  ver_cmd->add_option("--draws", ver.draws,
                      "draws, states, seeds or trials depending on the suite");
  ver_cmd->add_option("--seed", ver.seed);
  ver_cmd->add_flag("--diagnostics", ver.diagnostics, "append per-term diagnostic rows");
  ver_cmd->add_option("--out", ver_out);

  LowerBoundArgs lb_args;
  auto* lb_cmd = app.add_subcommand("lowerbound", "Monte Carlo of the unseen-component count");
  lb_cmd->add_option("--n", lb_args.n);
  lb_cmd->add_option("--k", lb_args.ks, "step counts")->delimiter(',');
  lb_cmd->add_option("--trials", lb_args.trials);
  lb_cmd->add_option("--seed", lb_args.seed);
  lb_cmd->add_option("--out", lb_args.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run_args, out, err);
    if (*cmp_cmd) return cmd_compare(cmp_args, out, err);
    if (*lb_cmd) return cmd_lowerbound(lb_args, out);
    if (*ver_cmd) {
      std::vector<CheckReport> diagnostics;
      auto reports = verify(ver, ver.diagnostics ? &diagnostics : nullptr);
      const bool ok = std::all_of(reports.begin(), reports.end(),
                                  [](const CheckReport& r) { return r.satisfied; });
      for (auto& r : diagnostics) r.name = "diagnostic:" + r.name;
      append(reports, std::move(diagnostics));
      Sink sink(ver_out, out);
      write_reports(*sink, reports);
      if (!ok) err << "verification failed\n";
      return ok ? kOk : kVerificationFailure;
    }
  } catch (const DivergenceError& e) {
    err << "diverged: " << e.what() << '\n';
    return kDivergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace finito::cli
