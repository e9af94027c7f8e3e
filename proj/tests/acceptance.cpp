// Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails. Every tolerance used is a named constant below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "finito/cli.hpp"
#include "finito/io.hpp"
#include "finito/lower_bounds.hpp"
#include "finito/solvers.hpp"
#include "finito/theory.hpp"

using namespace finito;

namespace {

constexpr double kRateAbsTol = 1e-9;
constexpr double kRateRuntimeSec = 10.0;
constexpr double kFactorLow = 0.60;
constexpr double kFactorHigh = 0.61;
constexpr double kMinReduction = 148.0;
constexpr double kDecreaseTol = 1e-10;  // scaled by |T| + 1
constexpr double kDecreaseRuntimeSec = 30.0;
constexpr double kIdentityTol = 1e-12;  // scaled by 1 + magnitude
constexpr double kInequalityTol = 1e-9;
constexpr double kClosedFormTol = 1e-12;
constexpr double kStderrMultiple = 4.0;
constexpr double kFloorTol = 1e-9;
constexpr double kLowerBoundRuntimeSec = 60.0;
constexpr double kLassoObjectiveTol = 1e-8;
constexpr double kReferenceResidual = 1e-12;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %d. %s: %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
              o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

io::SynthResult rate_problem() {
  io::SynthSpec spec;
  spec.n = 200;
  spec.d = 10;
  spec.loss = LossKind::Logistic;
  spec.target_beta = 2.0;
  return io::synth_problem_with_reference(spec);
}

// Independent evaluation of the Lyapunov function from its definition.
double lyapunov(const FiniteSumProblem& p, const Matrix& phi, const Vector& w) {
  const Index n = p.n();
  const double nd = static_cast<double>(n), s = p.s();
  const Vector bar = phi.colwise().mean().transpose();
  double t2 = 0.0, t3 = 0.0, t4 = 0.0;
  for (Index i = 0; i < n; ++i) {
    const Vector ph = phi.row(i).transpose();
    t2 -= p.component_value(i, ph) + p.component_gradient(i, ph).dot(w - ph);
    t3 -= (w - ph).squaredNorm();
    t4 += (bar - ph).squaredNorm();
  }
  return p.smooth_objective(bar) + t2 / nd + s / (2 * nd) * t3 + s / (2 * nd) * t4;
}

// Criteria 1 and 2 share the experiment.
struct RateRun {
  std::vector<double> mean_subopt;  // per epoch 0..10
  std::vector<double> bound;
  double seconds = 0.0;
  double n = 0.0;
};

const RateRun& rate_run() {
  static const RateRun result = [] {
    RateRun r;
    const auto t0 = Clock::now();
    const auto synth = rate_problem();
    const auto& p = synth.problem;
    const Vector phi0 = Vector::Zero(p.d());
    const int seeds = 20;
    r.mean_subopt.assign(11, 0.0);
    for (int seed = 0; seed < seeds; ++seed) {
      SolverConfig c;
      c.alpha = 2.0;
      c.audit = true;
      c.init = Initialization::AllEqual;
      c.trace_point = TracePoint::PhiMean;
      c.sampling = {SamplingKind::UniformWithReplacement, static_cast<std::uint64_t>(seed)};
      c.epochs = 10;
      c.w0 = phi0;
      const auto trace = run(p, c, &synth.reference);
      for (int e = 0; e <= 10; ++e) r.mean_subopt[e] += trace.at(e).suboptimality / seeds;
    }
    r.seconds = seconds_since(t0);
    r.n = static_cast<double>(p.n());
    const double g2 = p.full_gradient(phi0).squaredNorm();
    for (int e = 0; e <= 10; ++e)
      r.bound.push_back(3.0 / (4.0 * p.s()) * std::pow(1.0 - 1.0 / (2.0 * r.n), e * r.n) * g2);
    return r;
  }();
  return result;
}

Outcome criterion_rate_bound() {
  const RateRun& r = rate_run();
  double worst = INFINITY;
  int worst_epoch = -1;
  bool ok = true;
  for (int e = 1; e <= 10; ++e) {
    const double slack = r.bound[e] - r.mean_subopt[e];
    if (slack < worst) worst = slack, worst_epoch = e;
    ok = ok && r.mean_subopt[e] <= r.bound[e] + kRateAbsTol;
  }
  ok = ok && r.seconds < kRateRuntimeSec;
  return {ok, "min slack " + fmt(worst) + " at epoch " + std::to_string(worst_epoch) +
                  ", 20 seeds in " + fmt(r.seconds) + " s"};
}

Outcome criterion_epoch_factor() {
  const RateRun& r = rate_run();
  const double factor = std::pow(1.0 - 1.0 / (2.0 * r.n), r.n);
  const double curve_factor = r.bound[1] / r.bound[0];
  const double reduction = r.mean_subopt[0] / r.mean_subopt[10];
  const bool ok = factor >= kFactorLow && factor <= kFactorHigh &&
                  std::abs(curve_factor - factor) <= 1e-12 && reduction >= kMinReduction;
  return {ok, "bound factor " + fmt(factor) + " per epoch, measured reduction " +
                  fmt(reduction) + "x over 10 epochs"};
}

Outcome criterion_expected_decrease() {
  const auto t0 = Clock::now();
  io::SynthSpec spec;
  spec.n = 40;
  spec.d = 5;
  spec.target_beta = 2.0;
  const auto synth = io::synth_problem_with_reference(spec);
  const auto& p = synth.problem;
  rng::Stream gen(rng::derive(31, 0));
  const Vector w0 = theory::random_in_ball(gen, synth.reference.w_star, 2.0);
  const auto states = theory::trajectory_states(p, 2.0, w0, 200, 31);
  const double rate = 1.0 - 1.0 / (2.0 * 40.0);
  int violations = 0, library_disagree = 0;
  double worst = INFINITY;
  for (const auto& st : states) {
    const double t = lyapunov(p, st.phi_table, st.w);
    double expected = 0.0;
    for (Index j = 0; j < 40; ++j) {
      FinitoState next = st;
      finito_step(next, p, j);
      expected += lyapunov(p, next.phi_table, next.w) / 40.0;
    }
    const double tol = kDecreaseTol * (std::abs(t) + 1.0);
    const double slack = rate * t - expected;
    worst = std::min(worst, slack / (std::abs(t) + 1e-300));
    if (slack < -tol) ++violations;
    const auto lib = theory::expected_decrease_check(p, st, 2.0, kDecreaseTol);
    if (!lib.satisfied || std::abs(lib.lhs - expected) > tol) ++library_disagree;
  }
  const double secs = seconds_since(t0);
  const bool ok = violations == 0 && library_disagree == 0 && secs < kDecreaseRuntimeSec;
  return {ok, std::to_string(states.size()) + " states, " + std::to_string(violations) +
                  " violations, min relative slack " + fmt(worst) + ", " + fmt(secs) + " s"};
}

Outcome criterion_identities() {
  io::SynthSpec spec;
  spec.n = 30;
  spec.d = 4;
  const auto synth = io::synth_problem_with_reference(spec);
  const auto& p = synth.problem;
  const double alpha = 2.0, s = p.s(), nd = 30.0;
  rng::Stream gen(rng::derive(41, 0));
  double step_err = 0.0, variance_err = 0.0, update_err = 0.0;
  int failed = 0;
  for (int t = 0; t < 100; ++t) {
    const Matrix phi = theory::random_phi_table(gen, 30, synth.reference.w_star, 2.0);
    const auto st = finito_from_table(p, alpha, phi);
    const Vector& w = st.w;
    const double scale = 1.0 + w.norm() + phi.norm() / std::sqrt(nd);

    Vector mean = Vector::Zero(4);
    for (Index j = 0; j < 30; ++j) {
      FinitoState next = st;
      finito_step(next, p, j);
      mean += next.w / nd;
      const Vector phij = phi.row(j).transpose();
      const Vector rhs = (w - phij) / nd + (p.component_gradient(j, phij) -
                                            p.component_gradient(j, w)) /
                                               (alpha * s * nd);
      update_err = std::max(update_err, (next.w - w - rhs).norm() / scale);
    }
    step_err = std::max(step_err,
                      (mean - (w - p.full_gradient(w) / (alpha * s * nd))).norm() / scale);

    const Vector bar = phi.colwise().mean().transpose();
    double lhs = 0.0, spread = 0.0;
    for (Index i = 0; i < 30; ++i) {
      lhs += (w - phi.row(i).transpose()).squaredNorm() / nd;
      spread += (bar - phi.row(i).transpose()).squaredNorm() / nd;
    }
    variance_err = std::max(variance_err,
                      std::abs(lhs - (w - bar).squaredNorm() - spread) / (1.0 + lhs));

    failed += !theory::expected_step_check(p, st, kIdentityTol).satisfied;
    failed += !theory::variance_decomposition_check(phi, w, kIdentityTol).satisfied;
    failed += !theory::update_identity_check(p, st, t % 30, kIdentityTol).satisfied;
  }
  const bool ok = step_err <= kIdentityTol && variance_err <= kIdentityTol && update_err <= kIdentityTol &&
                  failed == 0;
  return {ok, "max scaled error: expected step " + fmt(step_err) + ", variance " +
                  fmt(variance_err) + ", update identity " + fmt(update_err)};
}

Outcome criterion_inequalities() {
  io::SynthSpec spec;
  spec.n = 40;
  spec.d = 5;
  spec.target_beta = 2.0;
  const auto synth = io::synth_problem_with_reference(spec);
  const auto& p = synth.problem;
  const Vector& center = synth.reference.w_star;
  const long draws = 1000;
  const auto suite = theory::convexity_suite(p, draws, kInequalityTol, 51, center);
  std::map<std::string, int> count, bad;
  for (const auto& r : suite) {
    ++count[r.name];
    bad[r.name] += !r.satisfied;
  }

  // Strong lower bound, evaluated here from its formula as well.
  rng::Stream gen(rng::derive(52, 0));
  const double lip = p.lipschitz_constant(), s = p.s();
  for (long t = 0; t < draws; ++t) {
    const auto i = static_cast<Index>(t % p.n());
    const Vector x = theory::random_in_ball(gen, center, 2.0);
    const Vector y = theory::random_in_ball(gen, center, 2.0);
    const Vector gx = p.component_gradient(i, x), gy = p.component_gradient(i, y);
    const double lower = p.component_value(i, y) + gy.dot(x - y) +
                         (gx - gy).squaredNorm() / (2 * (lip - s)) +
                         s * lip / (2 * (lip - s)) * (y - x).squaredNorm() +
                         s / (lip - s) * (gx - gy).dot(y - x);
    const double fx = p.component_value(i, x);
    const bool own = fx >= lower - kInequalityTol * (1 + std::abs(fx) + std::abs(lower));
    const auto lib = theory::strong_lb_check(p, i, x, y, kInequalityTol);
    ++count["strong-lower-bound"];
    bad["strong-lower-bound"] += !(own && lib.satisfied);

    const Matrix phi = theory::random_phi_table(gen, p.n(), center, 2.0);
    const Vector z = theory::random_in_ball(gen, center, 2.0);
    ++count["big-data-lower-bound"];
    bad["big-data-lower-bound"] += !theory::big_data_lb_check(p, phi, z, 2.0, kInequalityTol)
                                        .satisfied;
  }
  int total_bad = 0;
  bool all_counts = count.size() == 9;
  for (const auto& [name, c] : count) {
    total_bad += bad[name];
    all_counts = all_counts && c == draws;
  }
  return {total_bad == 0 && all_counts,
          std::to_string(count.size()) + " families x " + std::to_string(draws) +
              " draws, " + std::to_string(total_bad) + " violations"};
}

Outcome criterion_bound_gap() {
  io::SynthSpec spec;
  spec.n = 40;
  spec.d = 5;
  const auto synth = io::synth_problem_with_reference(spec);
  const auto& p = synth.problem;
  const auto states =
      theory::trajectory_states(p, 2.0, Vector::Constant(5, 1.0), 100, 61);
  int bad_gap = 0;
  for (const auto& st : states) {
    const double gap =
        p.smooth_objective(st.phi_table.colwise().mean().transpose()) - synth.reference.f_star;
    const double t = lyapunov(p, st.phi_table, st.w);
    const bool own = gap <= 2.0 * t + kInequalityTol * (1 + std::abs(gap));
    bad_gap += !(own && theory::bound_gap_check(p, st.phi_table, st.w, 2.0, synth.reference)
                            .satisfied);
  }

  // Closed-form initial value against direct evaluation, including the hand
  // example on f_1 = (w-1)^2/2, f_2 = (w+1)^2/2 with phi0 = 1, alpha = 2.
  double worst = 0.0;
  rng::Stream gen(rng::derive(62, 0));
  for (int t = 0; t < 50; ++t) {
    const Vector phi0 = theory::random_in_ball(gen, synth.reference.w_star, 2.0);
    const auto st = finito_init(p, 2.0, phi0, true);
    const double closed = theory::initial_lyapunov(p, phi0, 2.0);
    const double direct = theory::lyapunov_evaluate(p, st.phi_table, st.w).total;
    worst = std::max(worst, std::abs(closed - direct) / (1 + std::abs(direct)));
    worst = std::max(worst, std::abs(lyapunov(p, st.phi_table, st.w) - direct) /
                                (1 + std::abs(direct)));
  }
  Matrix x(2, 1);
  x << 1.0, 1.0;
  Vector y(2);
  y << 1.0, -1.0;
  const FiniteSumProblem toy(x, y, LossKind::Squared,
                             FiniteSumProblem::Options{.ridge = 0.0, .strong_convexity = 1.0});
  const double toy_closed = theory::initial_lyapunov(toy, Vector::Ones(1), 2.0);
  const auto toy_state = finito_init(toy, 2.0, Vector::Ones(1), true);
  const double toy_direct = theory::lyapunov_evaluate(toy, toy_state.phi_table, toy_state.w).total;
  const bool toy_ok = std::abs(toy_closed - 0.375) <= kClosedFormTol &&
                      std::abs(toy_direct - 0.375) <= kClosedFormTol;
  const bool ok = bad_gap == 0 && worst <= kClosedFormTol && toy_ok;
  return {ok, std::to_string(bad_gap) + " gap violations on 100 states, closed form error " +
                  fmt(worst) + ", hand example " + fmt(toy_direct)};
}

Outcome criterion_lower_bound() {
  const auto t0 = Clock::now();
  const Index n = 10;
  const std::uint64_t ks[] = {1, 5, 10, 20};
  const auto curve = lower_bounds::simulate_unseen_curve(n, ks, 1'000'000, 71);
  bool ok = true;
  double worst_z = 0.0;
  for (const auto& row : curve) {
    const double expect = 10.0 * std::pow(0.9, static_cast<double>(row.k));
    // At k = 1 the count is deterministic and both errors are exactly zero.
    const double diff = std::abs(row.mean - expect);
    const double diffm = std::abs(row.martingale_mean - 10.0);
    ok = ok && diff <= kStderrMultiple * row.stderr_mean &&
         diffm <= kStderrMultiple * row.martingale_stderr;
    if (row.stderr_mean > 0) worst_z = std::max(worst_z, diff / row.stderr_mean);
    if (row.martingale_stderr > 0) worst_z = std::max(worst_z, diffm / row.martingale_stderr);
  }

  // Floor: drive both solvers from w = 0 with uniform draws and compare with
  // (number unseen)/4 at every step, tracking the seen set here.
  const auto problem = lower_bounds::make_worst_case(n);
  auto objective = [](const Vector& w) {
    return 0.5 * (w.array() - 1.0).square().sum() + 0.5 * w.squaredNorm();
  };
  const double f_star = n / 4.0;
  double min_margin = INFINITY;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    for (int which = 0; which < 2; ++which) {
      FinitoState fin;
      SagState sag;
      if (which == 0)
        fin = finito_init_lazy(problem, 2.0, Vector::Zero(n));
      else
        sag = sag_init_lazy(problem, sag_default_step(problem, true), Vector::Zero(n));
      Sampler sampler({SamplingKind::UniformWithReplacement, seed}, n);
      std::vector<bool> seen(n, false);
      int unseen = static_cast<int>(n);
      for (int step = 0; step <= 40 * n; ++step) {
        const Vector& w = which == 0 ? fin.w : sag.w;
        min_margin = std::min(min_margin, objective(w) - f_star - unseen / 4.0);
        const Index j = sampler.next();
        if (!seen[j]) seen[j] = true, --unseen;
        if (which == 0)
          finito_step(fin, problem, j);
        else
          sag_step(sag, problem, j);
      }
    }
  }
  ok = ok && min_margin >= -kFloorTol;
  const double secs = seconds_since(t0);
  ok = ok && secs < kLowerBoundRuntimeSec;
  return {ok, "max |z| " + fmt(worst_z) + " over 1e6 trials, min floor margin " +
                  fmt(min_margin) + ", " + fmt(secs) + " s"};
}

Outcome criterion_permuted_vs_uniform() {
  const auto synth = rate_problem();
  std::vector<double> uniform, permuted;
  for (std::uint64_t seed = 0; seed < 11; ++seed) {
    for (SamplingKind kind : {SamplingKind::UniformWithReplacement, SamplingKind::PermutedPerPass}) {
      SolverConfig c;
      c.epochs = 10;
      c.sampling = {kind, seed};
      const double v = run(synth.problem, c, &synth.reference).back().suboptimality;
      (kind == SamplingKind::PermutedPerPass ? permuted : uniform).push_back(v);
    }
  }
  const double mu = cli::median(uniform), mp = cli::median(permuted);
  return {mp <= mu, "median epoch-10 suboptimality permuted " + fmt(mp) + " vs uniform " +
                        fmt(mu)};
}

Outcome criterion_lasso() {
  io::SynthSpec spec;
  spec.n = 50;
  spec.d = 10;
  spec.loss = LossKind::Squared;
  spec.target_beta = 2.0;
  spec.seed = 81;
  const FiniteSumProblem smooth = io::synth_problem(spec);
  auto zeros_at = [&](double lambda, ReferenceSolution* out) {
    const auto ref = solve_reference(smooth.with_l1(lambda));
    if (out) *out = ref;
    return static_cast<int>((ref.w_star.array() == 0.0).count());
  };
  double lo = 0.0, hi = smooth.full_gradient(Vector::Zero(10)).cwiseAbs().maxCoeff();
  double lambda = 0.5 * (lo + hi);
  ReferenceSolution ref;
  int zeros = -1;
  for (int it = 0; it < 80; ++it) {
    lambda = 0.5 * (lo + hi);
    zeros = zeros_at(lambda, &ref);
    if (zeros == 5) break;
    (zeros < 5 ? lo : hi) = lambda;
  }
  const FiniteSumProblem lasso = smooth.with_l1(lambda);

  SolverConfig c;
  c.solver = SolverKind::ProxFinito;
  c.epochs = 150;
  c.sampling = {SamplingKind::PermutedPerPass, 3};
  const auto trace = run(lasso, c, &ref);
  const double gap = std::abs(trace.back().objective - ref.f_star);

  // Zero weight: every iterate equals plain Finito's bit for bit.
  auto prox = prox_finito_init(smooth, 2.0, Vector::Zero(10));
  auto plain = finito_init(smooth, 2.0, Vector::Zero(10), true);
  Sampler sampler({SamplingKind::UniformWithReplacement, 9}, 50);
  bool identical = true;
  for (int t = 0; t < 2000 && identical; ++t) {
    const Index j = sampler.next();
    prox_finito_step(prox, smooth, j);
    finito_step(plain, smooth, j);
    identical = prox.w == plain.w;
  }
  const bool ok = zeros == 5 && ref.grad_norm_at_solution <= kReferenceResidual &&
                  gap <= kLassoObjectiveTol && identical;
  return {ok, "lambda " + fmt(lambda) + " zeroes " + std::to_string(zeros) +
                  " of 10, objective gap " + fmt(gap) + ", zero-weight trajectory " +
                  (identical ? "identical" : "differs")};
}

Outcome criterion_infrastructure() {
  std::vector<std::string> problems;
  io::SynthSpec spec;
  spec.n = 40;
  spec.d = 4;
  const auto synth = io::synth_problem_with_reference(spec);
  const auto& p = synth.problem;

  // Resume reproduces the uninterrupted trace for every solver and scheme.
  const auto lasso = p.with_l1(0.01);
  const auto lasso_ref = solve_reference(lasso);
  int resume_cases = 0, resume_bad = 0;
  for (SolverKind solver : {SolverKind::Finito, SolverKind::ProxFinito, SolverKind::Sag,
                            SolverKind::Miso, SolverKind::FullGradient}) {
    for (const char* sampling : {"uniform", "permuted", "permuted-frozen", "cyclic"}) {
      const bool prox = solver == SolverKind::ProxFinito;
      const auto& prob = prox ? lasso : p;
      const auto* ref = prox ? &lasso_ref : &synth.reference;
      SolverConfig c;
      c.solver = solver;
      c.sampling = parse_sampling(sampling, 5);
      c.epochs = 5;
      const auto full = run(prob, c, ref);
      SolverConfig head = c;
      head.epochs = 2;
      Runner a(prob, head, ref);
      auto joined = continue_run(a);
      std::stringstream buf;
      io::checkpoint_save(buf, io::capture(a));
      Runner b = io::resume(prob, io::checkpoint_load(buf, prob), c, ref);
      const auto tail = continue_run(b);
      joined.insert(joined.end(), tail.begin() + 1, tail.end());
      ++resume_cases;
      bool same = joined.size() == full.size();
      for (std::size_t i = 0; same && i < full.size(); ++i)
        same = joined[i].objective == full[i].objective &&
               joined[i].suboptimality == full[i].suboptimality &&
               joined[i].grad_norm == full[i].grad_norm && joined[i].epoch == full[i].epoch;
      resume_bad += !same;
    }
  }
  if (resume_bad) problems.push_back(std::to_string(resume_bad) + " resume mismatches");

  // Checkpoint save -> load -> save.
  SolverConfig c;
  c.audit = true;
  Runner r(p, c, &synth.reference);
  r.advance_to(123);
  std::ostringstream first;
  io::checkpoint_save(first, io::capture(r));
  std::istringstream in(first.str());
  std::ostringstream second;
  io::checkpoint_save(second, io::checkpoint_load(in, p));
  if (first.str() != second.str()) problems.push_back("checkpoint round trip differs");

  // Trace round trip.
  c.epochs = 3;
  const auto trace = run(p, c, &synth.reference);
  std::stringstream tbuf;
  io::write_trace(tbuf, trace);
  const auto back = io::read_trace(tbuf);
  bool same = back.size() == trace.size();
  for (std::size_t i = 0; same && i < trace.size(); ++i)
    same = back[i].epoch == trace[i].epoch && back[i].objective == trace[i].objective &&
           back[i].suboptimality == trace[i].suboptimality &&
           back[i].grad_norm == trace[i].grad_norm && back[i].wall_ms == trace[i].wall_ms;
  if (!same) problems.push_back("trace round trip differs");

  // LIBSVM error cases.
  auto error_line = [](const std::string& text) -> long {
    std::istringstream s(text);
    try {
      io::parse_libsvm(s);
    } catch (const ParseError& e) {
      return static_cast<long>(e.line());
    }
    return -1;
  };
  std::istringstream good("+1 1:0.5 3:-2\n");
  const auto ds = io::parse_libsvm(good, io::LibsvmOptions{.d_hint = 3});
  if (!(ds.features(0, 0) == 0.5 && ds.features(0, 1) == 0.0 && ds.features(0, 2) == -2.0))
    problems.push_back("libsvm example parsed wrongly");
  if (error_line("+1 0:1\n") != 1) problems.push_back("index 0 not rejected");
  if (error_line("1 1:1\n1 2:1 1:1\n") != 2) problems.push_back("non-ascending not rejected");
  if (error_line("1 1:1\n1 1:2\n-1 x:1\n") != 3) problems.push_back("bad token not rejected");

  std::string detail = std::to_string(resume_cases) + " resume cases";
  for (const auto& msg : problems) detail += "; " + msg;
  return {problems.empty(), detail};
}

}  // namespace

int main() {
  report(1, "rate bound", criterion_rate_bound);
  report(2, "per-epoch factor", criterion_epoch_factor);
  report(3, "exact expected decrease", criterion_expected_decrease);
  report(4, "expected step, variance and update identities", criterion_identities);
  report(5, "inequality suites", criterion_inequalities);
  report(6, "Lyapunov bound and closed form", criterion_bound_gap);
  report(7, "lower bound", criterion_lower_bound);
  report(8, "permuted vs uniform", criterion_permuted_vs_uniform);
  report(9, "proximal variant", criterion_lasso);
  report(10, "infrastructure", criterion_infrastructure);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
