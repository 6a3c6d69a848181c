// mcpad: multi-channel face-detector PAD pipeline.
//
// Subcommands: gen, train, score, eval. Exit codes: 0 ok, 1 internal
// error, 2 bad config, 3 missing data/layout, 4 corrupt input,
// 5 undefined metric.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mcpad/pipeline.hpp"

namespace {

struct SharedArgs {
  std::string config_path;
  bool has_seed = false;
  std::uint64_t seed = 0;
};

mcpad::RunConfig resolve_config(const SharedArgs &args) {
  mcpad::RunConfig cfg = args.config_path.empty()
                             ? mcpad::default_run_config()
                             : mcpad::load_run_config(args.config_path);
  if (args.has_seed) {
    cfg.gen.seed = args.seed;
    cfg.train.seed = args.seed;
  }
  return cfg;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"multi-channel face-detector presentation attack detection"};
  app.require_subcommand(1);

  SharedArgs shared;
  std::string data_dir, model_path, out_path;

  auto add_common = [&](CLI::App *cmd) {
    cmd->add_option("--config", shared.config_path, "JSON run configuration");
    cmd->add_option("--seed", shared.seed, "override gen/train seeds")
        ->each([&](const std::string &) { shared.has_seed = true; });
  };

  CLI::App *gen = app.add_subcommand("gen", "generate a synthetic dataset");
  add_common(gen);
  gen->add_option("--out", out_path, "output dataset directory")->required();

  CLI::App *train = app.add_subcommand("train", "train the detector");
  add_common(train);
  train->add_option("--data", data_dir, "dataset directory")->required();
  train->add_option("--out", out_path, "model output path")->required();

  CLI::App *score = app.add_subcommand("score", "score every sample");
  add_common(score);
  score->add_option("--data", data_dir, "dataset directory")->required();
  score->add_option("--model", model_path, "trained model path")->required();
  score->add_option("--out", out_path, "score CSV output path")->required();

  CLI::App *eval = app.add_subcommand("eval", "evaluate a score file");
  add_common(eval);
  eval->add_option("--data", data_dir, "score CSV path")->required();
  eval->add_option("--out", out_path, "report JSON output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const mcpad::RunConfig cfg = resolve_config(shared);
    if (gen->parsed()) {
      mcpad::run_gen(cfg, out_path);
      std::cout << "dataset written to " << out_path << "\n";
    } else if (train->parsed()) {
      const mcpad::TrainResult r = mcpad::run_train(cfg, data_dir, out_path);
      std::cout << "model written to " << r.model_path.string()
                << " (selected epoch " << r.selected_epoch << ", log "
                << r.log_path.string() << ")\n";
    } else if (score->parsed()) {
      mcpad::run_score(cfg, data_dir, model_path, out_path);
      std::cout << "scores written to " << out_path << "\n";
    } else if (eval->parsed()) {
      const mcpad::EvalResult r = mcpad::run_eval(cfg, data_dir, out_path);
      std::cout << r.table;
      std::cout << "report written to " << r.report_path.string() << "\n";
    }
  } catch (const mcpad::config_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mcpad::data_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const mcpad::corrupt_input_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const mcpad::metric_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
