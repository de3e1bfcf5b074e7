// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "CLI11.hpp"
#include "matgrad/commands.hpp"

int main(int argc, char** argv) {
  using namespace matgrad::cli;

  CLI::App app{"matgrad: network-function gradients in matrix form"};
  app.require_subcommand(1);
  // "-h" is left free: "--h" is the finite-difference step.
  app.set_help_flag("--help", "Print this help message and exit");

  GradcheckOptions gc;
  std::optional<std::uint64_t> gc_seed;
  auto* gradcheck = app.add_subcommand("gradcheck", "Cross-check every gradient engine and the finite-difference oracle");
  gradcheck->add_option("spec", gc.spec_path, "Network spec JSON")->required()->check(CLI::ExistingFile);
  gradcheck->add_option("--seed", gc_seed, "Seed for weights and inputs");
  gradcheck->add_option("--trials", gc.trials, "Random (weights, input) draws")->capture_default_str();
  gradcheck->add_option("--h", gc.h, "Finite-difference step")->capture_default_str();
  gradcheck->add_option("--engines", gc.engines, "Comma-separated engines (recursive,explicit,kronecker,diagonal,scalar)")
      ->delimiter(',');
  gradcheck->add_flag("--json", gc.json, "Machine-readable report");

  GradOptions gr;
  std::optional<std::uint64_t> gr_seed;
  std::string gr_weights;
  auto* grad = app.add_subcommand("grad", "Print the gradient of f with respect to every weight matrix");
  grad->add_option("spec", gr.spec_path, "Network spec JSON")->required()->check(CLI::ExistingFile);
  grad->add_option("--input", gr.input, "Input column as \"v1,v2,...\"")->required();
  grad->add_option("--engine", gr.engine, "Gradient engine")->capture_default_str();
  grad->add_option("--weights-path", gr_weights, "Weights JSON (default: seeded initialization)");
  grad->add_option("--seed", gr_seed, "Seed for initialization when no weights are given");
  grad->add_flag("--json", gr.json, "Machine-readable output");

  TrainOptions tr;
  std::optional<std::uint64_t> tr_seed;
  std::string tr_out;
  std::string tr_weights;
  auto* trainc = app.add_subcommand("train", "Full-batch gradient descent on a CSV regression dataset");
  trainc->add_option("spec", tr.spec_path, "Network spec JSON")->required()->check(CLI::ExistingFile);
  trainc->add_option("data", tr.data_path, "CSV dataset: inputs then target per row")->required();
  trainc->add_option("--lr", tr.learning_rate, "Learning rate")->capture_default_str();
  trainc->add_option("--epochs", tr.epochs, "Number of epochs")->capture_default_str();
  trainc->add_option("--seed", tr_seed, "Seed for initialization");
  trainc->add_option("--out", tr_out, "Write final weights JSON here");
  trainc->add_option("--weights-path", tr_weights, "Start from these weights instead of a seeded init");
  trainc->add_option("--engine", tr.engine, "Gradient engine")->capture_default_str();
  trainc->add_flag("--header", tr.header, "First CSV line is a header");
  trainc->add_flag("--json", tr.json, "Machine-readable report");

  IdentitiesOptions id;
  std::optional<std::uint64_t> id_seed;
  auto* identities = app.add_subcommand("identities", "Check the layer identities behind the matrix backpropagation formulas");
  identities->add_option("spec", id.spec_path, "Network spec JSON")->required()->check(CLI::ExistingFile);
  identities->add_option("--seed", id_seed, "Seed for weights and inputs");
  identities->add_option("--trials", id.trials, "Random (weights, input) draws")->capture_default_str();
  identities->add_option("--h", id.h, "Finite-difference step")->capture_default_str();
  identities->add_flag("--json", id.json, "Machine-readable report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  if (*gradcheck) {
    gc.seed = gc_seed;
    return run_gradcheck(gc, std::cout, std::cerr);
  }
  if (*grad) {
    gr.seed = gr_seed;
    if (!gr_weights.empty()) gr.weights_path = gr_weights;
    return run_grad(gr, std::cout, std::cerr);
  }
  if (*trainc) {
    tr.seed = tr_seed;
    if (!tr_out.empty()) tr.out_path = tr_out;
    if (!tr_weights.empty()) tr.weights_path = tr_weights;
    return run_train(tr, std::cout, std::cerr);
  }
  id.seed = id_seed;
  return run_identities(id, std::cout, std::cerr);
}
