// SPDX-License-Identifier: Apache-2.0
#include "matgrad/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <ostream>
#include <random>

#include "json.hpp"
#include "matgrad/io.hpp"
#include "matgrad/kernels.hpp"
#include "matgrad/trainer.hpp"

namespace matgrad::cli {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kKinkMargin = 1e-3;
constexpr int kMaxDraws = 1000;

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

// Maps library exceptions onto exit codes.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const NonFiniteIntermediateError& e) {
    err << "error: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
}

bool near_kink(const NetworkSpec& spec, const ForwardTrace& t) {
  for (std::size_t i = 1; i <= spec.layers(); ++i) {
    const LayerActivation& sig = spec.activation(i);
    for (std::size_t j = 0; j < sig.dim(); ++j) {
      for (double kink : sig[j].kinks) {
        if (std::abs(t.n(i)[j] - kink) < kKinkMargin) return true;
      }
    }
  }
  return false;
}

struct Draw {
  WeightSet weights;
  ColumnVector input;  // already lifted for affine specs
  ForwardTrace trace;
};

// Random weights and input in [-1, 1]; redrawn while any pre-activation sits
// within kKinkMargin of a kink so finite differences stay valid.
Draw draw_trial(const io::SpecFile& file, const NetworkSpec& spec, std::mt19937_64& rng) {
  const std::size_t raw_dim = file.affine ? spec.input_dim() - 1 : spec.input_dim();
  for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
    WeightSet w = file.initial_weights(rng());
    std::vector<double> x(raw_dim);
    for (double& v : x) v = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
    ColumnVector input = file.affine ? lift_input(ColumnVector(x)) : ColumnVector(x);
    ForwardTrace t = forward(spec, w, input);
    if (!near_kink(spec, t)) return {std::move(w), std::move(input), std::move(t)};
  }
  throw std::runtime_error("could not draw a sample away from activation kinks");
}

std::vector<Engine> select_engines(const std::vector<std::string>& names, const NetworkSpec& spec) {
  std::vector<Engine> out;
  if (names.empty()) {
    for (Engine e : all_engines()) {
      if (e != Engine::scalar || spec.is_scalar_chain()) out.push_back(e);
    }
    return out;
  }
  for (const auto& n : names) {
    const Engine e = parse_engine(n);
    if (e == Engine::scalar && !spec.is_scalar_chain()) throw NotScalarChainError();
    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
  }
  return out;
}

ordered_json tolerance_json(Tolerance t) { return {{"rel", t.rel}, {"abs_floor", t.abs_floor}}; }

ordered_json matrix_json(std::size_t layer, const Matrix& m) {
  return {{"layer", layer}, {"rows", m.rows()}, {"cols", m.cols()},
          {"data", std::vector<double>(m.data().begin(), m.data().end())}};
}

}  // namespace

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> from_spec) {
  if (flag) return *flag;
  if (const char* env = std::getenv("MATGRAD_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != nullptr && *end == '\0' && env[0] != '-') return v;
    throw std::invalid_argument("MATGRAD_SEED must be a non-negative integer");
  }
  return from_spec.value_or(0);
}

int run_gradcheck(const GradcheckOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const io::SpecFile file = io::load_spec(opt.spec_path);
    const NetworkSpec spec = file.network();
    const std::vector<Engine> engines = select_engines(opt.engines, spec);
    if (!(opt.h > 0.0)) throw std::invalid_argument("--h must be positive");
    const std::uint64_t seed = resolve_seed(opt.seed, file.seed);
    std::mt19937_64 rng(seed);

    std::vector<double> vs_reference(engines.size(), 0.0);
    std::vector<double> vs_fd(engines.size(), 0.0);
    for (std::size_t t = 0; t < opt.trials; ++t) {
      const Draw d = draw_trial(file, spec, rng);
      const GradientSet reference = grad_recursive(d.trace, d.weights);
      const GradientSet fd = grad_fd(spec, d.weights, d.input, opt.h);
      for (std::size_t e = 0; e < engines.size(); ++e) {
        const GradientSet g = compute_gradient(engines[e], d.trace, d.weights);
        vs_reference[e] = std::max(vs_reference[e], max_scaled_error(g, reference, kEngineTolerance));
        vs_fd[e] = std::max(vs_fd[e], max_scaled_error(g, fd, kFdTolerance));
      }
    }

    bool passed = true;
    std::vector<bool> engine_ok(engines.size());
    for (std::size_t e = 0; e < engines.size(); ++e) {
      engine_ok[e] = vs_reference[e] <= kEngineTolerance.rel && vs_fd[e] <= kFdTolerance.rel;
      passed = passed && engine_ok[e];
    }

    if (opt.json) {
      ordered_json report;
      report["command"] = "gradcheck";
      report["seed"] = seed;
      report["trials"] = opt.trials;
      report["h"] = opt.h;
      report["tolerance"] = {{"engine", tolerance_json(kEngineTolerance)},
                             {"fd", tolerance_json(kFdTolerance)}};
      ordered_json list = ordered_json::array();
      for (std::size_t e = 0; e < engines.size(); ++e) {
        list.push_back({{"name", engine_name(engines[e])},
                        {"max_error_vs_recursive", vs_reference[e]},
                        {"max_error_vs_fd", vs_fd[e]},
                        {"passed", static_cast<bool>(engine_ok[e])}});
      }
      report["engines"] = list;
      report["passed"] = passed;
      out << report.dump(2) << "\n";
    } else {
      out << "gradcheck: " << opt.trials << " trials, seed " << seed << ", h " << opt.h
          << ", kernels " << kernels::isa_name(kernels::active().isa) << "\n";
      out << std::left << std::setw(12) << "engine" << std::setw(16) << "vs-recursive"
          << std::setw(16) << "vs-fd" << "status\n";
      for (std::size_t e = 0; e < engines.size(); ++e) {
        out << std::left << std::setw(12) << engine_name(engines[e]) << std::setw(16)
            << sci(vs_reference[e]) << std::setw(16) << sci(vs_fd[e])
            << (engine_ok[e] ? "ok" : "FAIL") << "\n";
      }
      out << "tolerance: engines " << kEngineTolerance.rel << " (floor " << kEngineTolerance.abs_floor
          << "), fd " << kFdTolerance.rel << " (floor " << kFdTolerance.abs_floor << ")\n";
      out << (passed ? "PASS" : "FAIL") << "\n";
    }
    return passed ? kOk : kNumericFailure;
  });
}

int run_grad(const GradOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const io::SpecFile file = io::load_spec(opt.spec_path);
    const NetworkSpec spec = file.network();
    const Engine engine = parse_engine(opt.engine);
    if (engine == Engine::scalar && !spec.is_scalar_chain()) throw NotScalarChainError();

    WeightSet w = opt.weights_path ? io::load_weights(*opt.weights_path)
                                   : file.initial_weights(resolve_seed(opt.seed, file.seed));
    w.check_against(spec);
    if (file.affine) w = freeze_affine_rows(spec, std::move(w));

    const ColumnVector raw = io::parse_vector(opt.input);
    const std::size_t want = file.affine ? spec.input_dim() - 1 : spec.input_dim();
    if (raw.dim() != want) {
      throw std::invalid_argument("input has dimension " + std::to_string(raw.dim()) + ", expected " +
                                  std::to_string(want));
    }
    const ColumnVector x = file.affine ? lift_input(raw) : raw;
    const ForwardTrace trace = forward(spec, w, x);
    const GradientSet g = compute_gradient(engine, trace, w);

    if (opt.json) {
      ordered_json report;
      report["command"] = "grad";
      report["engine"] = engine_name(engine);
      report["output"] = trace.output;
      ordered_json layers = ordered_json::array();
      for (std::size_t i = 1; i <= g.layers(); ++i) layers.push_back(matrix_json(i, g.layer(i)));
      report["gradient"] = layers;
      out << report.dump(2) << "\n";
    } else {
      out << "f = " << io::format_real(trace.output) << "\n";
      for (std::size_t i = 1; i <= g.layers(); ++i) {
        out << "grad W_" << i << " (" << to_string(g.layer(i).shape()) << "):\n" << g.layer(i) << "\n";
      }
    }
    return kOk;
  });
}

int run_train(const TrainOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const io::SpecFile file = io::load_spec(opt.spec_path);
    const NetworkSpec spec = file.network();
    const std::uint64_t seed = resolve_seed(opt.seed, file.seed);

    WeightSet w0 = opt.weights_path ? io::load_weights(*opt.weights_path) : file.initial_weights(seed);
    w0.check_against(spec);
    if (file.affine) w0 = freeze_affine_rows(spec, std::move(w0));

    const std::size_t input_dim = file.affine ? spec.input_dim() - 1 : spec.input_dim();
    const Dataset data = io::load_dataset(opt.data_path, opt.header, input_dim);

    TrainConfig cfg;
    cfg.learning_rate = opt.learning_rate;
    cfg.epochs = opt.epochs;
    cfg.seed = seed;
    cfg.affine = file.affine;
    cfg.engine = parse_engine(opt.engine);
    if (cfg.engine == Engine::scalar && !spec.is_scalar_chain()) throw NotScalarChainError();

    const TrainReport report = train(spec, w0, data, cfg);
    const double final_loss = mean_loss(spec, report.weights, data, file.affine);
    if (opt.out_path) io::save_weights(*opt.out_path, report.weights);

    if (opt.json) {
      ordered_json j;
      j["command"] = "train";
      j["seed"] = seed;
      j["learning_rate"] = opt.learning_rate;
      j["epochs"] = opt.epochs;
      j["loss"] = report.loss;
      j["grad_norm"] = report.grad_norm;
      j["final_loss"] = final_loss;
      out << j.dump(2) << "\n";
    } else {
      out << std::left << std::setw(8) << "epoch" << std::setw(26) << "loss" << "grad_norm\n";
      for (std::size_t e = 0; e < report.loss.size(); ++e) {
        out << std::left << std::setw(8) << e + 1 << std::setw(26) << io::format_real(report.loss[e])
            << io::format_real(report.grad_norm[e]) << "\n";
      }
      out << "final loss: " << io::format_real(final_loss) << "\n";
      if (opt.out_path) out << "weights written to " << opt.out_path->string() << "\n";
    }
    return kOk;
  });
}

int run_identities(const IdentitiesOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const io::SpecFile file = io::load_spec(opt.spec_path);
    const NetworkSpec spec = file.network();
    if (!(opt.h > 0.0)) throw std::invalid_argument("--h must be positive");
    const std::uint64_t seed = resolve_seed(opt.seed, file.seed);
    std::mt19937_64 rng(seed);
    const std::size_t k = spec.layers();

    std::vector<double> weight_err(k, 0.0);
    std::vector<double> sigma_err(k > 1 ? k - 1 : 0, 0.0);
    for (std::size_t t = 0; t < opt.trials; ++t) {
      const Draw d = draw_trial(file, spec, rng);
      const IdentityReport r = check_proof_identities(spec, d.trace, d.weights, opt.h);
      for (const auto& c : r.weight_identity) {
        weight_err[c.layer - 1] = std::max(weight_err[c.layer - 1], c.error);
      }
      for (const auto& c : r.sigma_recurrence) {
        sigma_err[c.layer - 1] = std::max(sigma_err[c.layer - 1], c.error);
      }
    }
    const double max_w = weight_err.empty() ? 0.0 : *std::max_element(weight_err.begin(), weight_err.end());
    const double max_s = sigma_err.empty() ? 0.0 : *std::max_element(sigma_err.begin(), sigma_err.end());
    const bool passed = max_w <= kFdTolerance.rel && max_s <= kFdTolerance.rel;

    if (opt.json) {
      ordered_json j;
      j["command"] = "identities";
      j["seed"] = seed;
      j["trials"] = opt.trials;
      j["h"] = opt.h;
      j["tolerance"] = tolerance_json(kFdTolerance);
      j["interior_layers"] = k - 1;
      ordered_json layers = ordered_json::array();
      for (std::size_t r = 1; r <= k; ++r) {
        ordered_json row{{"layer", r}, {"weight_identity", weight_err[r - 1]}};
        row["sigma_recurrence"] = r < k ? ordered_json(sigma_err[r - 1]) : ordered_json(nullptr);
        layers.push_back(row);
      }
      j["layers"] = layers;
      j["max_weight_identity"] = max_w;
      j["max_sigma_recurrence"] = max_s;
      j["passed"] = passed;
      out << j.dump(2) << "\n";
    } else {
      out << "identities: " << opt.trials << " trials, seed " << seed << ", h " << opt.h << "\n";
      out << "  weight identity:  grad W_r = (grad Sigma_r) o Sigma'_r . Sigma_{r-1}^T\n";
      out << "  sigma recurrence: grad Sigma_r = (grad Sigma_{r+1}) o Sigma'_{r+1} * W_{r+1}^T\n";
      out << std::left << std::setw(8) << "layer" << std::setw(18) << "weight-identity"
          << "sigma-recurrence\n";
      for (std::size_t r = 1; r <= k; ++r) {
        out << std::left << std::setw(8) << r << std::setw(18) << sci(weight_err[r - 1])
            << (r < k ? sci(sigma_err[r - 1]) : std::string("-")) << "\n";
      }
      if (k == 1) out << "no interior layers: the sigma recurrence has nothing to check\n";
      out << "tolerance: " << kFdTolerance.rel << " (floor " << kFdTolerance.abs_floor << ")\n";
      out << (passed ? "PASS" : "FAIL") << "\n";
    }
    return passed ? kOk : kNumericFailure;
  });
}

}  // namespace matgrad::cli
