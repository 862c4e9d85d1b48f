#include "snsm/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>

#include "snsm/aunn.hpp"
#include "snsm/bench.hpp"
#include "snsm/core.hpp"
#include "snsm/data.hpp"
#include "snsm/io.hpp"
#include "snsm/learning.hpp"
#include "snsm/oracle.hpp"
#include "snsm/rng.hpp"
#include "snsm/snn.hpp"

namespace fs = std::filesystem;

namespace snsm {

namespace {

// Stream tags for deriving independent generator seeds from the run seed.
// The ring tag is shared by cmd_train and cmd_tuning so that the tuning
// analysis regenerates the exact dataset the state was trained on.
constexpr std::uint64_t kSeedRing = 0x72696e67;
constexpr std::uint64_t kSeedPatches = 0x70746368;
constexpr std::uint64_t kSeedInit = 0x696e6974;

void set_default(config::KeyValues& kv, const std::string& key,
                 const std::string& value) {
  kv.emplace(key, value);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Value-range problems in config-sourced settings are usage errors, not
// numerical ones; downgrade the validation exception accordingly.
template <typename Fn>
void validate_as_config(Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

SolverConfig solver_config_from(const config::KeyValues& kv) {
  SolverConfig cfg;
  cfg.tau_end = config::get_double(kv, "tau_end", cfg.tau_end);
  cfg.dtau = config::get_double(kv, "dtau", cfg.dtau);
  cfg.max_iters = static_cast<int>(config::get_long(kv, "max_iters", cfg.max_iters));
  cfg.tol = config::get_double(kv, "tol", cfg.tol);
  cfg.early_stop_window = config::get_double(kv, "early_stop_window", 0.0);
  cfg.early_stop_tol = config::get_double(kv, "early_stop_tol", 0.0);
  cfg.record_spike_times = false;
  validate_as_config([&] { cfg.validate(); });
  return cfg;
}

Hyperparams hyperparams_from(const config::KeyValues& kv) {
  Hyperparams hyper;
  hyper.alpha = config::get_double(kv, "alpha", 0.0);
  hyper.lambda1 = config::get_double(kv, "lambda1", 0.0);
  hyper.lambda2 = config::get_double(kv, "lambda2", 0.0);
  validate_as_config([&] { hyper.validate(); });
  return hyper;
}

Dataset ring_dataset_from(const config::KeyValues& kv, std::uint64_t seed) {
  const long T = config::get_long(kv, "ring_samples", 71);
  const long n = config::get_long(kv, "ring_dim", 64);
  const double width = config::get_double(kv, "ring_width", 0.3);
  if (T < 8 || n < 8) throw ConfigError("ring_samples and ring_dim must be >= 8");
  if (!(width > 0.0)) throw ConfigError("ring_width must be positive");
  return gen_ring_manifold(static_cast<int>(T), static_cast<int>(n), width,
                           rng::derive_seed(seed, kSeedRing));
}

}  // namespace

void cmd_bench(config::KeyValues kv, const fs::path& out) {
  config::check_keys(
      kv, {.required = {},
           .optional = {"k_list", "instances", "tau_end", "dtau", "aunn_dtau", "tol",
                        "max_iters", "retry_cap", "seed"}});
  set_default(kv, "k_list", "2,4,8,16,32");
  set_default(kv, "instances", "20");
  set_default(kv, "tau_end", "500");
  set_default(kv, "dtau", "0.01");
  set_default(kv, "aunn_dtau", config::get_string(kv, "dtau"));
  set_default(kv, "tol", "1e-10");
  set_default(kv, "max_iters", "10000");
  set_default(kv, "retry_cap", "100");
  set_default(kv, "seed", "0");
  config::write_resolved(kv, out / "config.resolved");

  std::vector<int> ks = config::get_int_list(kv, "k_list");
  std::sort(ks.begin(), ks.end());
  if (std::adjacent_find(ks.begin(), ks.end()) != ks.end()) {
    throw ConfigError("k_list contains duplicates");
  }
  if (ks.front() < 1) throw ConfigError("k_list entries must be >= 1");
  const long instances = config::get_long(kv, "instances");
  if (instances < 1) throw ConfigError("instances must be >= 1");
  const int retry_cap = static_cast<int>(config::get_long(kv, "retry_cap"));
  const std::uint64_t seed = config::get_u64(kv, "seed", 0);

  SolverConfig snn_cfg = solver_config_from(kv);
  SolverConfig aunn_cfg = snn_cfg;
  aunn_cfg.dtau = config::get_double(kv, "aunn_dtau");
  validate_as_config([&] { aunn_cfg.validate(); });
  SolverConfig oracle_cfg = snn_cfg;

  const Hyperparams hyper = bench::protocol_hyperparams();

  struct Row {
    int k;
    long instance;
    const char* solver;
    double err;
    double runtime;
  };
  std::vector<Row> rows;
  struct SummaryRow {
    int k;
    const char* solver;
    bench::BoxStats stats;
  };
  std::vector<SummaryRow> summary;

  for (const int k : ks) {
    // One stream per k: the instance set depends only on (seed, k), so a
    // rerun with a different step size or k list sees identical instances.
    auto gen = rng::make_engine(rng::derive_seed(seed, static_cast<std::uint64_t>(k)));
    std::vector<double> aunn_errs, oracle_errs, snn_errs;
    for (long inst = 0; inst < instances; ++inst) {
      const auto acc = bench::sample_accepted(k, gen, oracle_cfg, retry_cap);
      const SynapticState& st = acc.instance.state;
      const Vector& x = acc.instance.x;

      auto t0 = std::chrono::steady_clock::now();
      const AunnTrace atrace = run_aunn(st, hyper, x, aunn_cfg);
      const double atime = seconds_since(t0);
      const double aerr = relative_error(atrace.y, acc.oracle.y);

      t0 = std::chrono::steady_clock::now();
      const OracleResult control = solve_nnen(st, hyper, x, oracle_cfg);
      const double otime = seconds_since(t0);
      const double oerr = relative_error(control.y, acc.oracle.y);

      t0 = std::chrono::steady_clock::now();
      const SnnTrace strace = run_snn(st, hyper, x, snn_cfg);
      const double stime = seconds_since(t0);
      const double serr = relative_error(strace.y_tilde, acc.oracle.y);

      rows.push_back({k, inst, "aunn", aerr, atime});
      rows.push_back({k, inst, "oracle", oerr, otime});
      rows.push_back({k, inst, "snn", serr, stime});
      aunn_errs.push_back(aerr);
      oracle_errs.push_back(oerr);
      snn_errs.push_back(serr);
    }
    summary.push_back({k, "aunn", bench::box_stats(aunn_errs)});
    summary.push_back({k, "oracle", bench::box_stats(oracle_errs)});
    summary.push_back({k, "snn", bench::box_stats(snn_errs)});
  }

  std::ofstream csv(out / "bench.csv");
  if (!csv) throw Error("cannot open " + (out / "bench.csv").string());
  csv << "k,instance,solver,relative_error,runtime\n";
  for (const auto& r : rows) {
    csv << r.k << ',' << r.instance << ',' << r.solver << ','
        << io::format_double(r.err) << ',' << io::format_double(r.runtime) << '\n';
  }

  std::ofstream sum(out / "bench_summary.csv");
  if (!sum) throw Error("cannot open " + (out / "bench_summary.csv").string());
  sum << "k,solver,median,q25,q75,min,max\n";
  for (const auto& s : summary) {
    sum << s.k << ',' << s.solver << ',' << io::format_double(s.stats.median) << ','
        << io::format_double(s.stats.q25) << ',' << io::format_double(s.stats.q75)
        << ',' << io::format_double(s.stats.min) << ','
        << io::format_double(s.stats.max) << '\n';
  }
}

void cmd_train(config::KeyValues kv, const fs::path& out) {
  const std::string kind = config::get_string(kv, "data");
  config::Schema schema{
      .required = {"data", "k", "steps", "solver", "eta"},
      .optional = {"alpha", "lambda1", "lambda2", "schedule", "w_init", "w_scale",
                   "probe_size", "checkpoint_every", "active_threshold", "tau_end",
                   "dtau", "max_iters", "tol", "early_stop_window", "early_stop_tol",
                   "seed"}};
  if (kind == "idx") {
    schema.required.push_back("idx_path");
    schema.optional.insert(schema.optional.end(), {"take", "scale"});
  } else if (kind == "patches") {
    schema.required.insert(schema.required.end(), {"idx_path", "patch_count"});
    schema.optional.insert(schema.optional.end(),
                           {"patch_size", "scale", "whiten", "whiten_epsilon"});
  } else if (kind == "ring") {
    schema.optional.insert(schema.optional.end(),
                           {"ring_samples", "ring_dim", "ring_width"});
  } else {
    throw ConfigError("key 'data': expected idx|patches|ring, got '" + kind + "'");
  }
  config::check_keys(kv, schema);

  set_default(kv, "alpha", "0");
  set_default(kv, "lambda1", "0");
  set_default(kv, "lambda2", "0");
  set_default(kv, "schedule", "");
  set_default(kv, "w_init", "uniform");
  set_default(kv, "w_scale", io::format_double(1.0 / 14.0));
  set_default(kv, "probe_size", "500");
  set_default(kv, "checkpoint_every", "0");
  set_default(kv, "active_threshold", "0");
  set_default(kv, "tau_end", "500");
  set_default(kv, "dtau", "0.01");
  set_default(kv, "max_iters", "10000");
  set_default(kv, "tol", "1e-10");
  set_default(kv, "early_stop_window", "0");
  set_default(kv, "early_stop_tol", "0");
  set_default(kv, "seed", "0");
  if (kind == "idx") {
    set_default(kv, "take", "0");
    set_default(kv, "scale", io::format_double(1.0 / 255.0));
  } else if (kind == "patches") {
    set_default(kv, "patch_size", "16");
    set_default(kv, "scale", io::format_double(1.0 / 255.0));
    set_default(kv, "whiten", "true");
    set_default(kv, "whiten_epsilon", "0.01");
  } else {
    set_default(kv, "ring_samples", "71");
    set_default(kv, "ring_dim", "64");
    set_default(kv, "ring_width", "0.3");
  }
  config::write_resolved(kv, out / "config.resolved");

  const long k = config::get_long(kv, "k");
  if (k < 1) throw ConfigError("key 'k': must be >= 1");
  const std::uint64_t seed = config::get_u64(kv, "seed", 0);

  TrainOptions opts;
  opts.solver = solver_kind_from_string(config::get_string(kv, "solver"));
  opts.steps = config::get_long(kv, "steps");
  if (opts.steps < 1) throw ConfigError("key 'steps': must be >= 1");
  opts.probe_size = static_cast<int>(config::get_long(kv, "probe_size"));
  opts.checkpoint_every = config::get_long(kv, "checkpoint_every");
  opts.active_threshold = config::get_double(kv, "active_threshold");
  opts.seed = seed;
  validate_as_config([&] { opts.validate(); });

  const Hyperparams hyper = hyperparams_from(kv);
  const SolverConfig cfg = solver_config_from(kv);
  const LearningSchedule schedule = config::parse_schedule(
      config::get_string(kv, "schedule"), config::get_double(kv, "eta"));

  Dataset data;
  if (kind == "ring") {
    data = ring_dataset_from(kv, seed);
  } else if (kind == "idx") {
    ImageSet images = load_idx(config::get_string(kv, "idx_path"));
    images = take_images(images,
                         static_cast<std::uint32_t>(config::get_long(kv, "take")));
    data = to_samples(images, config::get_double(kv, "scale"));
  } else {
    const long patch = config::get_long(kv, "patch_size");
    const long count = config::get_long(kv, "patch_count");
    if (patch < 1) throw ConfigError("key 'patch_size': must be >= 1");
    if (count < 1) throw ConfigError("key 'patch_count': must be >= 1");
    const ImageSet images = load_idx(config::get_string(kv, "idx_path"));
    data = sample_patches(images, static_cast<int>(patch), static_cast<int>(count),
                          rng::derive_seed(seed, kSeedPatches));
    data.X *= config::get_double(kv, "scale");
    if (config::get_bool(kv, "whiten", true)) {
      data = zca_whiten(data, config::get_double(kv, "whiten_epsilon"));
    }
  }

  const std::string w_init = config::get_string(kv, "w_init");
  const double w_scale = config::get_double(kv, "w_scale");
  if (w_scale < 0.0) throw ConfigError("key 'w_scale': must be >= 0");
  if (w_init != "uniform" && w_init != "normal") {
    throw ConfigError("key 'w_init': expected uniform|normal, got '" + w_init + "'");
  }
  auto wgen = rng::make_engine(rng::derive_seed(seed, kSeedInit));
  SynapticState init;
  init.W.resize(k, data.dim());
  for (Index i = 0; i < init.W.rows(); ++i) {
    for (Index j = 0; j < init.W.cols(); ++j) {
      init.W(i, j) = w_init == "uniform" ? rng::uniform(wgen, 0.0, w_scale)
                                         : rng::normal(wgen, 0.0, w_scale);
    }
  }
  init.M = Matrix::Identity(k, k);
  init.b = Vector::Zero(k);

  const TrainResult result = train(data, hyper, schedule, init, cfg, opts);
  io::save_state(result.state, out / "state.snsm");
  io::write_train_log(result.log, out / "trainlog.csv");
}

void cmd_features(config::KeyValues kv, const fs::path& out) {
  config::check_keys(kv, {.required = {"state"},
                          .optional = {"tile_rows", "tile_cols", "seed"}});
  const SynapticState state = io::load_state(config::get_string(kv, "state"));
  long rows = config::get_long(kv, "tile_rows", 0);
  long cols = config::get_long(kv, "tile_cols", 0);
  if (rows == 0 && cols == 0) {
    const long side = std::lround(std::sqrt(static_cast<double>(state.n())));
    if (side * side != state.n()) {
      throw ConfigError("feature length " + std::to_string(state.n()) +
                        " is not square; set tile_rows and tile_cols");
    }
    rows = cols = side;
  }
  if (rows < 1 || cols < 1) {
    throw ConfigError("tile_rows and tile_cols must both be set and positive");
  }
  if (rows * cols != state.n()) {
    throw ConfigError("tile_rows * tile_cols = " + std::to_string(rows * cols) +
                      " does not match feature length " + std::to_string(state.n()));
  }
  kv["tile_rows"] = std::to_string(rows);
  kv["tile_cols"] = std::to_string(cols);
  config::write_resolved(kv, out / "config.resolved");
  io::write_feature_grid(state.W, static_cast<int>(rows), static_cast<int>(cols),
                         out / "features.pgm");
}

void cmd_tuning(config::KeyValues kv, const fs::path& out) {
  config::check_keys(
      kv, {.required = {"state"},
           .optional = {"ring_samples", "ring_dim", "ring_width", "alpha", "lambda1",
                        "lambda2", "tau_end", "dtau", "max_iters", "tol",
                        "active_threshold", "seed"}});
  set_default(kv, "ring_samples", "71");
  set_default(kv, "ring_dim", "64");
  set_default(kv, "ring_width", "0.3");
  set_default(kv, "alpha", "0");
  set_default(kv, "lambda1", "0");
  set_default(kv, "lambda2", "0");
  set_default(kv, "tau_end", "500");
  set_default(kv, "dtau", "0.01");
  set_default(kv, "max_iters", "10000");
  set_default(kv, "tol", "1e-10");
  set_default(kv, "active_threshold", "0");
  set_default(kv, "seed", "0");
  config::write_resolved(kv, out / "config.resolved");

  const SynapticState state = io::load_state(config::get_string(kv, "state"));
  const Hyperparams hyper = hyperparams_from(kv);
  const SolverConfig cfg = solver_config_from(kv);
  const double threshold = config::get_double(kv, "active_threshold");
  const Dataset data = ring_dataset_from(kv, config::get_u64(kv, "seed", 0));
  if (state.n() != data.dim()) {
    throw ConfigError("state expects input dimension " + std::to_string(state.n()) +
                      " but ring_dim is " + std::to_string(data.dim()));
  }
  validate_as_config([&] { state.validate(hyper.lambda2); });

  const Index T = data.size();
  const Index k = state.k();
  Matrix Y(T, k);  // time-averaged responses, sample-major
  for (Index t = 0; t < T; ++t) {
    Y.row(t) = run_snn(state, hyper, data.sample(t), cfg).y_tilde.transpose();
  }

  std::ofstream curves(out / "tuning.csv");
  if (!curves) throw Error("cannot open " + (out / "tuning.csv").string());
  curves << "angle,unit,y_tilde\n";
  for (Index t = 0; t < T; ++t) {
    const double angle_deg = 360.0 * static_cast<double>(t) / static_cast<double>(T);
    for (Index i = 0; i < k; ++i) {
      curves << io::format_double(angle_deg) << ',' << i << ','
             << io::format_double(Y(t, i)) << '\n';
    }
  }

  std::ofstream units(out / "tuning_units.csv");
  if (!units) throw Error("cannot open " + (out / "tuning_units.csv").string());
  units << "unit,peak_angle,circular_variance,active\n";
  for (Index i = 0; i < k; ++i) {
    double rx = 0, ry = 0, total = 0;
    Index peak = 0;
    for (Index t = 0; t < T; ++t) {
      const double theta = ring_angle(static_cast<int>(t), static_cast<int>(T));
      rx += Y(t, i) * std::cos(theta);
      ry += Y(t, i) * std::sin(theta);
      total += Y(t, i);
      if (Y(t, i) > Y(peak, i)) peak = t;
    }
    const bool active = Y.col(i).maxCoeff() > threshold;
    const double variance = total > 0.0 ? 1.0 - std::hypot(rx, ry) / total : 1.0;
    const double peak_deg = 360.0 * static_cast<double>(peak) / static_cast<double>(T);
    units << i << ',' << io::format_double(peak_deg) << ','
          << io::format_double(variance) << ',' << (active ? 1 : 0) << '\n';
  }
}

void cmd_oracle(config::KeyValues kv, const fs::path& out) {
  config::check_keys(kv, {.required = {"k"},
                          .optional = {"tau_end", "dtau", "tol", "max_iters",
                                       "retry_cap", "snn", "raster", "seed"}});
  set_default(kv, "tau_end", "500");
  set_default(kv, "dtau", "0.01");
  set_default(kv, "tol", "1e-10");
  set_default(kv, "max_iters", "10000");
  set_default(kv, "retry_cap", "100");
  set_default(kv, "snn", "true");
  set_default(kv, "raster", "false");
  set_default(kv, "seed", "0");
  config::write_resolved(kv, out / "config.resolved");

  const long k = config::get_long(kv, "k");
  if (k < 1) throw ConfigError("key 'k': must be >= 1");
  const std::uint64_t seed = config::get_u64(kv, "seed", 0);
  const int retry_cap = static_cast<int>(config::get_long(kv, "retry_cap"));
  const bool with_snn = config::get_bool(kv, "snn", true);
  const bool raster = config::get_bool(kv, "raster", false);
  SolverConfig cfg = solver_config_from(kv);
  cfg.record_spike_times = raster;

  // Same stream the benchmark uses for this k, so instance 0 here is the
  // benchmark's first instance.
  auto gen = rng::make_engine(rng::derive_seed(seed, static_cast<std::uint64_t>(k)));
  const auto acc = bench::sample_accepted(static_cast<int>(k), gen, cfg, retry_cap);
  const Hyperparams hyper = bench::protocol_hyperparams();

  std::ofstream csv(out / "oracle.csv");
  if (!csv) throw Error("cannot open " + (out / "oracle.csv").string());
  csv << "key,value\n";
  csv << "k," << k << '\n';
  csv << "attempts," << acc.attempts << '\n';
  csv << "iterations," << acc.oracle.iterations << '\n';
  csv << "converged," << (acc.oracle.converged ? 1 : 0) << '\n';
  csv << "kkt_residual," << io::format_double(acc.oracle.kkt_residual) << '\n';
  csv << "y_norm," << io::format_double(acc.oracle.y.norm()) << '\n';
  csv << "active_coords," << (acc.oracle.y.array() > 0.0).count() << '\n';
  for (Index i = 0; i < acc.oracle.y.size(); ++i) {
    csv << "y[" << i << "]," << io::format_double(acc.oracle.y(i)) << '\n';
  }

  std::cout << "instance accepted after " << acc.attempts << " attempt(s)\n"
            << "oracle: " << acc.oracle.iterations
            << " sweeps, kkt residual " << io::format_double(acc.oracle.kkt_residual)
            << ", |y| = " << io::format_double(acc.oracle.y.norm()) << '\n';

  if (with_snn) {
    const auto t0 = std::chrono::steady_clock::now();
    const SnnTrace trace =
        run_snn(acc.instance.state, hyper, acc.instance.x, cfg);
    const double runtime = seconds_since(t0);
    const double err = relative_error(trace.y_tilde, acc.oracle.y);
    csv << "snn_relative_error," << io::format_double(err) << '\n';
    std::cout << "snn: relative error " << io::format_double(err) << " in "
              << io::format_double(runtime) << " s\n";
    if (raster) io::write_spike_raster(trace.record, out / "raster.csv");
  }
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Spiking similarity-matching network tools"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed_override = 0;

  using Handler = void (*)(config::KeyValues, const fs::path&);
  const std::vector<std::pair<std::string, Handler>> table = {
      {"bench", &cmd_bench},   {"train", &cmd_train},   {"features", &cmd_features},
      {"tuning", &cmd_tuning}, {"oracle", &cmd_oracle}};
  const std::map<std::string, std::string> descriptions = {
      {"bench", "Solver-vs-oracle convergence benchmark on random instances"},
      {"train", "Online training run; writes state.snsm and trainlog.csv"},
      {"features", "Render learned feature rows as a tiled PGM image"},
      {"tuning", "Tuning curves of a trained state on the ring dataset"},
      {"oracle", "Sample one benchmark instance and solve it (debugging)"}};

  for (const auto& [name, handler] : table) {
    auto* sub = app.add_subcommand(name, descriptions.at(name));
    sub->add_option("--config", config_path, "Key = value configuration file")
        ->required();
    sub->add_option("--out", out_dir, "Output directory (created if missing)");
    sub->add_option("--seed", seed_override, "Overrides the config's seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    config::KeyValues kv = config::parse_file(config_path);
    if (sub->count("--seed") > 0) kv["seed"] = std::to_string(seed_override);
    fs::create_directories(out_dir);
    for (const auto& [name, handler] : table) {
      if (sub->get_name() == name) {
        handler(std::move(kv), out_dir);
        return 0;
      }
    }
    throw Error("unreachable: unknown subcommand");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("snsm");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace snsm
