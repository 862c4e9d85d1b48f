#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "snsm/core.hpp"
#include "snsm/data.hpp"
#include "snsm/learning.hpp"
#include "snsm/oracle.hpp"
#include "snsm/rng.hpp"

using namespace snsm;

namespace {

SynapticState random_init(Index k, Index n, std::mt19937_64& gen) {
  SynapticState s;
  s.W = Matrix::NullaryExpr(k, n, [&](Index, Index) { return rng::uniform(gen, -0.5, 0.5); });
  s.M = Matrix::Identity(k, k);
  s.b = Vector::Zero(k);
  return s;
}

bool coeff_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

}  // namespace

TEST_CASE("schedule segments are consumed in order, then final_eta applies") {
  LearningSchedule sched;
  sched.segments = {{10, 1e-3}, {90, 1e-5}};
  sched.final_eta = 0.5e-5;
  CHECK(sched.eta_at(1) == 1e-3);
  CHECK(sched.eta_at(10) == 1e-3);
  CHECK(sched.eta_at(11) == 1e-5);
  CHECK(sched.eta_at(100) == 1e-5);
  CHECK(sched.eta_at(101) == 0.5e-5);
  CHECK(sched.eta_at(100000) == 0.5e-5);

  LearningSchedule bad;
  bad.segments = {{0, 1e-3}};
  CHECK_THROWS_AS(bad.validate(), InvalidStateError);
  bad.segments = {{5, 0.0}};
  CHECK_THROWS_AS(bad.validate(), InvalidStateError);
  bad.segments = {{5, 1.5}};
  CHECK_THROWS_AS(bad.validate(), InvalidStateError);
  bad.segments.clear();
  bad.final_eta = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidStateError);
}

TEST_CASE("full-rate update replaces the parameters by the outer products") {
  auto gen = rng::make_engine(51);
  SynapticState s = random_init(3, 2, gen);
  s.M = Matrix::NullaryExpr(3, 3, [&](Index, Index) { return rng::uniform01(gen); });
  s.M = (s.M + Matrix(s.M.transpose())).eval();
  s.b = Vector::NullaryExpr(3, [&](Index) { return rng::uniform01(gen); });
  Vector y(3), x(2);
  y << 0.7, 0.0, 1.3;
  x << -0.4, 2.0;
  apply_updates_inplace(s, y, x, 1.0, 0.3);
  CHECK(coeff_equal(s.W, y * x.transpose()));
  CHECK(coeff_equal(s.M, y * y.transpose()));
  CHECK((s.b.array() == (0.3 * y).array()).all());
}

TEST_CASE("silent output decays every parameter by the retention factor") {
  auto gen = rng::make_engine(52);
  SynapticState s = random_init(3, 2, gen);
  s.b = Vector::NullaryExpr(3, [&](Index) { return rng::uniform01(gen); });
  const SynapticState before = s;
  const double eta = 0.25;
  apply_updates_inplace(s, Vector::Zero(3), Vector::Ones(2), eta, 0.8);
  const double keep = 1.0 - eta;
  CHECK((s.W - keep * before.W).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s.M - keep * before.M).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s.b - keep * before.b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("repeated identical pairs contract toward the outer product at rate 1 - eta") {
  // Perturb only rows whose y entry is zero: there the update is a pure
  // scalar multiply, so the per-step contraction ratio is exact.
  Vector y(3), x(2);
  y << 0.9, 0.0, 0.4;
  x << 1.0, -0.5;
  const double eta = 0.3;
  SynapticState s;
  s.W = y * x.transpose();
  s.M = y * y.transpose();
  s.M.diagonal().array() += 1e-9;  // keep thresholds positive with lambda2 = 0.1
  s.b = 0.2 * y;
  s.W.row(1) << 0.8, -1.7;  // the perturbation, on the y_i = 0 row

  double prev = s.W.row(1).cwiseAbs().maxCoeff();
  for (int step = 0; step < 100; ++step) {
    apply_updates_inplace(s, y, x, eta, 0.2);
    const double now = s.W.row(1).cwiseAbs().maxCoeff();
    CHECK(now / prev == doctest::Approx(1.0 - eta).epsilon(1e-12));
    prev = now;
  }
  // Rows with active y land on the outer product immediately and stay there.
  CHECK((s.W.row(0) - (y(0) * x).transpose()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("updates preserve symmetry exactly and keep thresholds alive") {
  auto gen = rng::make_engine(53);
  SynapticState s = random_init(4, 3, gen);
  for (int step = 0; step < 50; ++step) {
    const Vector y = Vector::NullaryExpr(4, [&](Index) { return rng::uniform(gen, 0.0, 1.5); });
    const Vector x = Vector::NullaryExpr(3, [&](Index) { return rng::uniform(gen, -1.0, 1.0); });
    const Vector diag_before = s.M.diagonal();
    const double eta = rng::uniform(gen, 0.01, 1.0);
    apply_updates_inplace(s, y, x, eta, 0.3);
    CHECK((s.M - Matrix(s.M.transpose())).cwiseAbs().maxCoeff() == 0.0);
    for (Index i = 0; i < 4; ++i) {
      CHECK(s.M(i, i) >= (1.0 - eta) * diag_before(i));
      CHECK(s.M(i, i) >= 0.0);
    }
  }
}

TEST_CASE("update rejects rates outside (0, 1] and mismatched shapes") {
  auto gen = rng::make_engine(54);
  SynapticState s = random_init(2, 2, gen);
  CHECK_THROWS_AS(apply_updates_inplace(s, Vector::Zero(2), Vector::Zero(2), 0.0, 0.0),
                  InvalidStateError);
  CHECK_THROWS_AS(apply_updates_inplace(s, Vector::Zero(2), Vector::Zero(2), 1.1, 0.0),
                  InvalidStateError);
  CHECK_THROWS_AS(apply_updates_inplace(s, Vector::Zero(2), Vector::Zero(2), -0.2, 0.0),
                  InvalidStateError);
  CHECK_THROWS_AS(apply_updates_inplace(s, Vector::Zero(3), Vector::Zero(2), 0.5, 0.0),
                  DimensionError);
  CHECK_THROWS_AS(apply_updates_inplace(s, Vector::Zero(2), Vector::Zero(3), 0.5, 0.0),
                  DimensionError);
}

TEST_CASE("one full-rate training step lands on the batch optima of the drawn pair") {
  Dataset data = gen_ring_manifold(16, 8, 0.3, 99);
  Hyperparams hyper{0.2, 0.05, 0.1};
  LearningSchedule sched;
  sched.segments = {{1, 1.0}};
  SolverConfig cfg;
  TrainOptions opts;
  opts.solver = SolverKind::oracle;
  opts.steps = 1;
  opts.seed = 7;
  auto gen = rng::make_engine(55);
  SynapticState init = random_init(3, 8, gen);

  TrainResult res = train(data, hyper, sched, init, cfg, opts);

  // Replay the single draw to recover the sample and output it used.
  auto sampler = rng::make_engine(opts.seed);
  const Index t = Index(rng::uniform_index(sampler, 16));
  const Vector x = data.sample(t);
  const Vector y = solve_nnen(init, hyper, x, cfg).y;
  Dataset one{Matrix(x.transpose())};
  SynapticState expect = batch_optima(one, Matrix(y.transpose()), hyper.alpha);
  CHECK(coeff_equal(res.state.W, expect.W));
  CHECK(coeff_equal(res.state.M, expect.M));
  CHECK((res.state.b.array() == expect.b.array()).all());
}

TEST_CASE("batch optima are a stationary point of the averaged update") {
  auto engine = rng::make_engine(56);
  Dataset data{Matrix::NullaryExpr(4, 2, [&](Index, Index) { return rng::uniform01(engine); })};
  Hyperparams hyper{0.2, 0.05, 0.1};
  SolverConfig cfg;
  cfg.tol = 1e-13;

  SynapticState state = random_init(2, 2, engine);
  state.W = state.W.cwiseAbs();
  Matrix Y(4, 2);
  for (int round = 0; round < 400; ++round) {
    for (Index t = 0; t < 4; ++t) {
      Y.row(t) = solve_nnen(state, hyper, data.sample(t), cfg).y.transpose();
    }
    state = batch_optima(data, Y, hyper.alpha);
  }
  REQUIRE(Y.cwiseAbs().maxCoeff() > 0.0);  // the fixed point is not the trivial one

  Matrix dW = Matrix::Zero(2, 2), dM = Matrix::Zero(2, 2);
  Vector db = Vector::Zero(2);
  for (Index t = 0; t < 4; ++t) {
    const Vector x = data.sample(t);
    const Vector y = solve_nnen(state, hyper, x, cfg).y;
    dW += y * x.transpose() - state.W;
    dM += y * y.transpose() - state.M;
    db += hyper.alpha * y - state.b;
  }
  const double scale = state.W.cwiseAbs().maxCoeff();
  CHECK(dW.cwiseAbs().maxCoeff() / 4.0 <= 1e-9 * scale);
  CHECK(dM.cwiseAbs().maxCoeff() / 4.0 <= 1e-9 * scale);
  CHECK(db.cwiseAbs().maxCoeff() / 4.0 <= 1e-9 * scale);
}

TEST_CASE("active_fraction counts entries strictly above the threshold") {
  std::vector<Vector> all_zero{Vector::Zero(3), Vector::Zero(3)};
  CHECK(active_fraction(all_zero, 0.0) == 0.0);

  Vector a(2), b(2);
  a << 1.0, 0.0;
  b << 0.0, 1.0;
  CHECK(active_fraction({a, b}, 0.0) == 0.5);
  CHECK(active_fraction({a, b}, 1.0) == 0.0);
  CHECK(active_fraction({}, 0.0) == 0.0);

  auto vals = activity_values({a, b});
  CHECK(vals == std::vector<double>{0.0, 0.0, 1.0, 1.0});
}

TEST_CASE("training log checkpoints are strictly increasing on the configured cadence") {
  Dataset data = gen_ring_manifold(24, 8, 0.3, 100);
  Hyperparams hyper{0.0, 0.05, 0.1};
  LearningSchedule sched;
  sched.segments = {{5, 0.05}};
  sched.final_eta = 0.01;
  SolverConfig cfg;
  TrainOptions opts;
  opts.solver = SolverKind::oracle;
  opts.steps = 10;
  opts.checkpoint_every = 3;
  auto gen = rng::make_engine(57);
  TrainResult res = train(data, hyper, sched, random_init(4, 8, gen), cfg, opts);

  std::vector<long> steps;
  for (const auto& cp : res.log.checkpoints) steps.push_back(cp.step);
  CHECK(steps == std::vector<long>{0, 3, 6, 9, 10});
  for (size_t i = 1; i < steps.size(); ++i) CHECK(steps[i] > steps[i - 1]);
  CHECK(res.log.checkpoints[1].eta == 0.05);
  CHECK(res.log.checkpoints[3].eta == 0.01);
  CHECK(res.log.checkpoints.front().eta == 0.05);  // step 0 reports the first rate
  for (const auto& cp : res.log.checkpoints) {
    CHECK(cp.active_fraction >= 0.0);
    CHECK(cp.active_fraction <= 1.0);
    CHECK(std::isfinite(cp.nsm_cost));
  }
}

TEST_CASE("training aborts when an update kills the firing thresholds") {
  // Zero drive makes every output zero; at eta = 1 with lambda2 = 0 the
  // lateral diagonal collapses to zero and the invariant trips immediately.
  Dataset data{Matrix::Ones(4, 2)};
  Hyperparams hyper{0.0, 0.0, 0.0};
  LearningSchedule sched;
  sched.segments = {{10, 1.0}};
  SynapticState init;
  init.W = Matrix::Zero(2, 2);
  init.M = Matrix::Identity(2, 2);
  init.b = Vector::Zero(2);
  SolverConfig cfg;
  TrainOptions opts;
  opts.solver = SolverKind::oracle;
  opts.steps = 5;
  try {
    train(data, hyper, sched, init, cfg, opts);
    FAIL("expected an invalid-state abort");
  } catch (const InvalidStateError& e) {
    CHECK(std::string(e.what()).find("step 1") != std::string::npos);
  }
}

TEST_CASE("inner solver divergence is rewrapped with the training step") {
  Dataset data{Matrix::Ones(3, 1)};
  Hyperparams hyper{0.0, 0.0, 0.1};
  LearningSchedule sched;
  sched.segments = {{10, 0.01}};
  SynapticState init;
  init.M.resize(2, 2);
  init.M << 1.0, -50.0, -50.0, 1.0;
  init.W = Matrix::Constant(2, 1, 5.0);
  init.b = Vector::Zero(2);
  SolverConfig cfg;
  TrainOptions opts;
  opts.solver = SolverKind::aunn;
  opts.steps = 5;
  try {
    train(data, hyper, sched, init, cfg, opts);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.step == 1);
    CHECK(std::string(e.what()).find("train: inner solver diverged") != std::string::npos);
  }
}

TEST_CASE("solver selector parses the three kinds and rejects others") {
  CHECK(solver_kind_from_string("oracle") == SolverKind::oracle);
  CHECK(solver_kind_from_string("aunn") == SolverKind::aunn);
  CHECK(solver_kind_from_string("snn") == SolverKind::snn);
  CHECK(to_string(SolverKind::snn) == "snn");
  CHECK_THROWS_AS(solver_kind_from_string("fmincon"), ConfigError);
}

TEST_CASE("spiking inner solver trains end to end at a small horizon") {
  Dataset data = gen_ring_manifold(16, 8, 0.3, 101);
  Hyperparams hyper{0.5, 0.0, 0.0};
  LearningSchedule sched;
  sched.segments = {{20, 0.05}};
  SolverConfig cfg;
  cfg.tau_end = 50.0;
  SynapticState init;
  init.W = Matrix::Constant(4, 8, 0.1);
  init.M = Matrix::Identity(4, 4);
  init.b = Vector::Zero(4);
  TrainOptions opts;
  opts.solver = SolverKind::snn;
  opts.steps = 20;
  TrainResult res = train(data, hyper, sched, init, cfg, opts);
  CHECK(res.log.checkpoints.back().step == 20);
  CHECK(res.state.M.rows() == 4);
}
