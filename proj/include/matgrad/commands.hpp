// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "matgrad/gradient.hpp"

// The `matgrad` subcommands, callable in-process. Each returns the process
// exit code: 0 success, 1 numeric or tolerance failure, 2 usage, I/O or
// parse failure.
namespace matgrad::cli {

enum ExitCode : int { kOk = 0, kNumericFailure = 1, kUsageError = 2 };

// --seed wins, then MATGRAD_SEED, then the spec file's "seed", then 0.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> from_spec);

struct GradcheckOptions {
  std::filesystem::path spec_path;
  std::optional<std::uint64_t> seed;
  std::size_t trials = 20;
  double h = kDefaultFdStep;
  std::vector<std::string> engines;  // empty: every engine valid for the spec
  bool json = false;
};

struct GradOptions {
  std::filesystem::path spec_path;
  std::string input;
  std::string engine = "recursive";
  std::optional<std::filesystem::path> weights_path;
  std::optional<std::uint64_t> seed;
  bool json = false;
};

struct TrainOptions {
  std::filesystem::path spec_path;
  std::filesystem::path data_path;
  double learning_rate = 0.1;
  std::size_t epochs = 100;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out_path;
  std::optional<std::filesystem::path> weights_path;
  std::string engine = "recursive";
  bool header = false;
  bool json = false;
};

struct IdentitiesOptions {
  std::filesystem::path spec_path;
  std::optional<std::uint64_t> seed;
  std::size_t trials = 20;
  double h = kDefaultFdStep;
  bool json = false;
};

int run_gradcheck(const GradcheckOptions& opt, std::ostream& out, std::ostream& err);
int run_grad(const GradOptions& opt, std::ostream& out, std::ostream& err);
int run_train(const TrainOptions& opt, std::ostream& out, std::ostream& err);
int run_identities(const IdentitiesOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace matgrad::cli
