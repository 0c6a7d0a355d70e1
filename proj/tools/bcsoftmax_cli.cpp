// bcsoftmax: batch front end for the box-constrained softmax library.
//
//   bcsoftmax eval       probabilities for each row of a logit file
//   bcsoftmax verify     random instances against the brute-force oracle
//   bcsoftmax bench      runtime scaling as CSV
//   bcsoftmax calibrate  fit a calibrator and report ECE / accuracy
//   bcsoftmax gen        synthetic miscalibrated logits
//
// Exit codes: 0 ok, 1 usage, 2 bad data, 3 verification failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bcsoftmax/bench.hpp"
#include "bcsoftmax/calib.hpp"
#include "bcsoftmax/core.hpp"
#include "bcsoftmax/instances.hpp"
#include "bcsoftmax/io.hpp"
#include "bcsoftmax/oracle.hpp"

namespace {

using namespace bcsoftmax;
namespace calib = bcsoftmax::calib;
namespace io = bcsoftmax::io;

enum Exit { ok = 0, usage = 1, data = 2, verification = 3 };

struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "-" means stdin / stdout
io::Table read_table(const std::string& path) {
  if (path == "-") return io::read_csv(std::cin, "<stdin>");
  std::ifstream in(path);
  if (!in) throw io::DataError(path + ": cannot open");
  return io::read_csv(in, path);
}

template <class F>
void with_output(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw io::DataError(path + ": cannot open for writing");
  write(out);
  if (!out) throw io::DataError(path + ": write failed");
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string input = "-";
  std::string bounds;
  std::optional<double> lower;
  std::optional<double> upper;
  double tau = 1.0;
  std::string algo = "auto";
  std::string output = "-";
};

std::vector<double> eval_row(const std::vector<double>& x, const BoxBounds<double>& box,
                             Temperature<double> tau, const std::string& algo) {
  const bool no_lower = box.lower().all_zero();
  const bool no_upper = box.upper().all_one();
  if (algo == "quadratic") return bcsoftmax_quadratic<double>(x, box, tau).y;
  if (algo == "select") {
    if (!no_lower) throw calib::UsageError("--algo select handles upper bounds only");
    return ubsoftmax_select<double>(x, box.upper(), tau).y;
  }
  if (algo == "sorted") {
    if (no_lower) return ubsoftmax_sorted<double>(x, box.upper(), tau).y;
    return bcsoftmax<double>(x, box, tau, SearchOptions{false}).y;
  }
  // auto
  if (no_lower) return ubsoftmax_select<double>(x, box.upper(), tau).y;
  if (no_upper) return lbsoftmax<double>(x, box.lower(), tau).y;
  return bcsoftmax<double>(x, box, tau, SearchOptions{false}).y;
}

int run_eval(const EvalArgs& args) {
  if (!args.bounds.empty() && (args.lower || args.upper))
    throw calib::UsageError("use either --bounds or --lower/--upper, not both");
  const Temperature<double> tau{args.tau};
  const auto table = read_table(args.input);
  const auto data = io::to_dataset(table, args.input, false);
  const std::size_t K = data.num_classes;

  std::vector<io::BoundsRow> bounds;
  if (!args.bounds.empty()) {
    bounds = io::to_bounds(read_table(args.bounds), args.bounds);
    if (bounds.size() != 1 && bounds.size() != data.size())
      throw io::DataError(args.bounds + ": expected 1 row or " + std::to_string(data.size()) +
                          " rows, got " + std::to_string(bounds.size()));
  }

  std::vector<std::vector<double>> out;
  out.reserve(data.size());
  for (std::size_t n = 0; n < data.size(); ++n) {
    const std::string where = args.input + ":" + std::to_string(table.line[n]);
    try {
      std::vector<double> a(K, args.lower.value_or(0.0));
      std::vector<double> b(K, args.upper.value_or(1.0));
      if (!bounds.empty()) {
        const auto& row = bounds.size() == 1 ? bounds.front() : bounds[n];
        if (row.a.size() != K)
          throw io::DataError("bounds have " + std::to_string(row.a.size()) + " classes, logits " +
                              std::to_string(K));
        a = row.a;
        b = row.b;
      }
      out.push_back(eval_row(data.logits[n], BoxBounds<double>(a, b), tau, args.algo));
    } catch (const DomainError& e) {
      throw io::DataError(where + ": " + e.what());
    } catch (const io::DataError& e) {
      throw io::DataError(where + ": " + e.what());
    }
  }
  with_output(args.output, [&](std::ostream& os) {
    if (K > 0) io::write_probabilities(os, out, K);
  });
  return ok;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::size_t K = 6;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
};

int run_verify(const VerifyArgs& args) {
  if (args.K < 1 || args.K > oracle::max_enumeration_size)
    throw calib::UsageError("--K must be between 1 and " +
                            std::to_string(oracle::max_enumeration_size));
  const std::size_t K = args.K;
  const std::vector<std::string> names{"bcsoftmax", "bcsoftmax_quadratic", "ubsoftmax_sorted",
                                       "ubsoftmax_select", "lbsoftmax"};
  std::vector<double> worst(names.size(), 0.0);
  const std::array taus{0.5, 1.0, 2.0};
  Rng rng(args.seed);

  auto deviation = [](const std::vector<double>& got, const std::vector<double>& want) {
    double d = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) d = std::max(d, std::abs(got[i] - want[i]));
    return d;
  };

  for (std::size_t t = 0; t < args.trials; ++t) {
    const auto inst = random_instance(rng, K);
    const Temperature<double> tau{taus[t % taus.size()]};
    const auto box = inst.bounds();
    const BoxBounds<double> upper_only(std::vector<double>(K, 0.0), inst.b);
    const BoxBounds<double> lower_only(inst.a, std::vector<double>(K, 1.0));
    const auto want = oracle::solve_enumerate<double>(inst.x, box, tau).y;
    const auto want_ub = oracle::solve_enumerate<double>(inst.x, upper_only, tau).y;
    const auto want_lb = oracle::solve_enumerate<double>(inst.x, lower_only, tau).y;
    const std::vector<double> dev{
        deviation(bcsoftmax<double>(inst.x, box, tau, SearchOptions{true}).y, want),
        deviation(bcsoftmax_quadratic<double>(inst.x, box, tau).y, want),
        deviation(ubsoftmax_sorted<double>(inst.x, upper_only.upper(), tau).y, want_ub),
        deviation(ubsoftmax_select<double>(inst.x, upper_only.upper(), tau).y, want_ub),
        deviation(lbsoftmax<double>(inst.x, lower_only.lower(), tau).y, want_lb)};
    for (std::size_t i = 0; i < dev.size(); ++i) worst[i] = std::max(worst[i], dev[i]);
  }

  const double overall = *std::max_element(worst.begin(), worst.end());
  std::cout << "K=" << K << " trials=" << args.trials << " seed=" << args.seed << '\n';
  for (std::size_t i = 0; i < names.size(); ++i)
    std::cout << "  " << std::left << std::setw(22) << names[i] << io::format_double(worst[i])
              << '\n';
  const bool pass = overall <= tol::eq;
  std::cout << (pass ? "max deviation < 1e-9" : "max deviation exceeds 1e-9") << " ("
            << io::format_double(overall) << ")\n";
  return pass ? ok : verification;
}

// ---------------------------------------------------------------------------
// calibrate

struct CalibrateArgs {
  std::string train;
  std::string test;
  std::string method = "ts";
  std::string ablate = "both";
  std::size_t epochs = 500;
  std::size_t batch = 128;
  std::uint64_t seed = 0;
  int bins = 15;
  std::string model_out;
};

calib::LabeledLogitSet load_labeled(const std::string& path) {
  auto data = io::to_dataset(read_table(path), path, true);
  try {
    data.validate();
  } catch (const calib::UsageError& e) {
    throw io::DataError(path + ": " + e.what());
  }
  return data;
}

int run_calibrate(const CalibrateArgs& args) {
  const auto kind = calib::parse_kind(args.method);
  if (args.bins < 1) throw calib::UsageError("--bins must be >= 1");
  const auto train = load_labeled(args.train);
  const auto test = load_labeled(args.test);
  if (train.num_classes != test.num_classes)
    throw io::DataError("train and test files have different numbers of classes");
  if (calib::is_linear(kind) && (!train.has_features() || !test.has_features() ||
                                 train.feature_dim() != test.feature_dim()))
    throw io::DataError(args.method + " needs matching feat_ columns in both files");

  calib::FitConfig cfg;
  cfg.epochs = args.epochs;
  cfg.batch_size = args.batch;
  cfg.seed = args.seed;
  cfg.use_lower = args.ablate != "upper";
  cfg.use_upper = args.ablate != "lower";

  const auto init = calib::initial_model(kind, train, cfg.use_lower, cfg.use_upper);
  calib::CalibModel model;
  try {
    model = calib::fit(kind, train, cfg);
  } catch (const calib::FitDivergence& e) {
    throw io::DataError(std::string("fit diverged: ") + e.what());
  }

  const auto raw = calib::ece_from_predictions(calib::uncalibrated(test), test.labels, args.bins);
  const auto start = calib::ece(init, test, args.bins);
  const auto fitted = calib::ece(model, test, args.bins);

  std::cout << "method " << args.method << "  ablate " << args.ablate << "  epochs " << args.epochs
            << "  seed " << args.seed << "  bins " << args.bins << '\n';
  std::cout << "tau " << fmt(model.tau()) << "  final train loss "
            << fmt(model.meta.final_loss) << '\n';
  std::cout << std::left << std::setw(14) << "model" << std::setw(12) << "ECE(%)" << "Acc(%)\n";
  auto line = [](const char* name, const calib::EceReport& r) {
    std::cout << std::left << std::setw(14) << name << std::setw(12) << fmt(100.0 * r.ece, 4)
              << fmt(100.0 * r.accuracy, 2) << '\n';
  };
  line("uncalibrated", raw);
  line("initial", start);
  line("calibrated", fitted);

  if (!args.model_out.empty())
    with_output(args.model_out,
                [&](std::ostream& os) { os << io::model_to_json(model).dump(2) << '\n'; });
  return ok;
}

// ---------------------------------------------------------------------------

int dispatch(int argc, char** argv) {
  CLI::App app{"Box-constrained softmax: evaluation, verification, benchmarks, calibration"};
  app.require_subcommand(1);

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Evaluate the constrained softmax row by row");
  e->add_option("-i,--input", eval.input, "Logit CSV (logit_0..), '-' for stdin")
      ->capture_default_str();
  e->add_option("--bounds", eval.bounds, "Bounds CSV (a_0..,b_0..): one row or one per input row");
  e->add_option("--lower", eval.lower, "Scalar lower bound for every class");
  e->add_option("--upper", eval.upper, "Scalar upper bound for every class");
  e->add_option("--tau", eval.tau, "Temperature")->capture_default_str();
  e->add_option("--algo", eval.algo, "auto | sorted | select | quadratic")
      ->check(CLI::IsMember({"auto", "sorted", "select", "quadratic"}))
      ->capture_default_str();
  e->add_option("-o,--output", eval.output, "Output CSV, '-' for stdout")->capture_default_str();

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Compare every algorithm with the brute-force oracle");
  v->add_option("--K", verify.K, "Number of classes (at most 12)")->capture_default_str();
  v->add_option("--trials", verify.trials, "Random instances")->capture_default_str();
  v->add_option("--seed", verify.seed, "Seed")->capture_default_str();

  bench::Config bcfg;
  std::string bench_out = "-";
  auto* b = app.add_subcommand("bench", "Time the solvers over K = kmin..kmax (powers of two)");
  b->add_option("--kmin", bcfg.kmin)->capture_default_str();
  b->add_option("--kmax", bcfg.kmax)->capture_default_str();
  b->add_option("--batch", bcfg.batch)->capture_default_str();
  b->add_option("--reps", bcfg.reps, "Timed repetitions (after warm-up)")->capture_default_str();
  b->add_option("--warmup", bcfg.warmup)->capture_default_str();
  b->add_option("--seed", bcfg.seed)->capture_default_str();
  b->add_option("-o,--out", bench_out, "CSV output, '-' for stdout")->capture_default_str();

  CalibrateArgs cal;
  auto* c = app.add_subcommand("calibrate", "Fit a calibrator and report test ECE / accuracy");
  c->add_option("--train", cal.train, "Training CSV with labels")->required();
  c->add_option("--test", cal.test, "Held-out CSV with labels")->required();
  c->add_option("--method", cal.method, "ts | pb-c | pb-l | lb-c | lb-l")
      ->check(CLI::IsMember({"ts", "pb-c", "pb-l", "lb-c", "lb-l"}))
      ->capture_default_str();
  c->add_option("--ablate", cal.ablate, "both | lower | upper: which bounds are used")
      ->check(CLI::IsMember({"both", "lower", "upper"}))
      ->capture_default_str();
  c->add_option("--epochs", cal.epochs)->capture_default_str();
  c->add_option("--batch", cal.batch)->capture_default_str();
  c->add_option("--seed", cal.seed)->capture_default_str();
  c->add_option("--bins", cal.bins)->capture_default_str();
  c->add_option("--model-out", cal.model_out, "Write the fitted model as JSON");

  std::size_t gen_n = 1000;
  std::size_t gen_k = 10;
  double gen_scale = 3.0;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "-";
  auto* g = app.add_subcommand("gen", "Write a synthetic labeled logit file");
  g->add_option("--N", gen_n)->capture_default_str();
  g->add_option("--K", gen_k)->capture_default_str();
  g->add_option("--scale", gen_scale, "Logit scale; > 1 is overconfident")->capture_default_str();
  g->add_option("--seed", gen_seed)->capture_default_str();
  g->add_option("-o,--out", gen_out, "CSV output, '-' for stdout")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return usage;
  }

  if (*e) return run_eval(eval);
  if (*v) return run_verify(verify);
  if (*b) {
    try {
      const auto rows = bench::run(bcfg);
      with_output(bench_out, [&](std::ostream& os) { bench::write_csv(os, rows); });
    } catch (const std::invalid_argument& err) {
      throw calib::UsageError(err.what());
    }
    return ok;
  }
  if (*c) return run_calibrate(cal);
  if (*g) {
    const auto set = calib::gen_synthetic(gen_n, gen_k, gen_scale, gen_seed);
    with_output(gen_out, [&](std::ostream& os) { io::write_dataset(os, set); });
    return ok;
  }
  return usage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const calib::UsageError& err) {
    std::cerr << "usage error: " << err.what() << '\n';
    return usage;
  } catch (const io::DataError& err) {
    std::cerr << "data error: " << err.what() << '\n';
    return data;
  } catch (const DomainError& err) {
    std::cerr << "data error: " << err.what() << '\n';
    return data;
  } catch (const InternalError& err) {
    std::cerr << "internal check failed: " << err.what() << '\n';
    return verification;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return data;
  }
}
