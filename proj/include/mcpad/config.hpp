#ifndef MCPAD_CONFIG_HPP
#define MCPAD_CONFIG_HPP

#include <filesystem>
#include <string>

#include "mcpad/detector.hpp"
#include "mcpad/geometry.hpp"
#include "mcpad/loss.hpp"
#include "mcpad/preprocess.hpp"
#include "mcpad/scoring.hpp"
#include "mcpad/synthgen.hpp"

namespace mcpad {

// Whole-pipeline configuration, parsed from one JSON document with
// sections gen, preprocess, grid, loss, train, scoring, metrics. Every
// key is optional (defaults below); unknown keys are rejected so configs
// cannot silently drift.
struct RunConfig {
  GenConfig gen;
  NormConfig preprocess;
  AnchorGridConfig grid;  // image size comes from gen.image_size

  struct Loss {
    double alpha = 0.75;
    double gamma = 2.0;
    double beta = kDefaultSmoothL1Beta;
  } loss;

  struct Train {
    double lr = 1e-2;
    int epochs = 50;
    std::uint64_t seed = 7;
  } train;

  struct Scoring {
    double det_threshold = kDefaultDetectionThreshold;
    double floor = 0.0;
    AggregationRule aggregation = AggregationRule::mean;
  } scoring;

  struct Metrics {
    double target_bpcer = 0.002;
    int alpha_grid_size = 21;
  } metrics;

  FocalConfig focal() const { return {loss.alpha, loss.gamma}; }
  TrainConfig train_config() const;
};

// Strict parse; throws config_error on malformed JSON, unknown keys, type
// errors, or out-of-range values.
RunConfig parse_run_config(const std::string &json_text);
RunConfig load_run_config(const std::filesystem::path &path);

// Defaults when no --config is given.
inline RunConfig default_run_config() { return RunConfig{}; }

}  // namespace mcpad

#endif  // MCPAD_CONFIG_HPP
