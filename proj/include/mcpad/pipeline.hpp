#ifndef MCPAD_PIPELINE_HPP
#define MCPAD_PIPELINE_HPP

#include <filesystem>
#include <string>

#include <json.hpp>

#include "mcpad/config.hpp"

namespace mcpad {

// Command bodies behind the CLI subcommands. The CLI adds only flag
// parsing and exit-code mapping, so tests that call these functions
// exercise the same behavior end to end.

// gen: synthesize the dataset under out_dir (frames/ + manifest.csv).
void run_gen(const RunConfig &cfg, const std::filesystem::path &out_dir);

struct TrainResult {
  int selected_epoch = 0;
  std::filesystem::path model_path;
  std::filesystem::path log_path;  // CSV: epoch,train_loss,dev_loss
};

// train: fit on the train split, validate on dev, persist the model with
// minimum dev loss plus a per-epoch loss log next to it.
TrainResult run_train(const RunConfig &cfg,
                      const std::filesystem::path &data_dir,
                      const std::filesystem::path &model_out);

// score: one CSV row per manifest sample (all splits), sorted by id.
void run_score(const RunConfig &cfg, const std::filesystem::path &data_dir,
               const std::filesystem::path &model_path,
               const std::filesystem::path &out_csv);

struct EvalResult {
  nlohmann::json report;
  std::string table;  // human-readable summary
  std::filesystem::path report_path;
  std::filesystem::path epc_path;
  std::filesystem::path roc_path;
};

// eval: ISO-metric report at the dev BPCER threshold plus EPC/ROC curves.
// Writes report JSON at report_out and epc.csv / roc.csv beside it.
EvalResult run_eval(const RunConfig &cfg,
                    const std::filesystem::path &score_csv,
                    const std::filesystem::path &report_out);

}  // namespace mcpad

#endif  // MCPAD_PIPELINE_HPP
