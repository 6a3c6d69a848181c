#include <doctest.h>

#include "mcpad/config.hpp"

using namespace mcpad;

TEST_CASE("empty config yields the documented defaults") {
  const RunConfig cfg = parse_run_config("{}");
  CHECK(cfg.gen.image_size == 128);
  CHECK(cfg.gen.train_count == 200);
  CHECK(cfg.gen.dev_count == 100);
  CHECK(cfg.gen.eval_count == 100);
  CHECK(cfg.gen.seed == 7);
  CHECK(cfg.preprocess.sigma == 4.0);
  CHECK(cfg.grid.stride == 8.0);
  CHECK(cfg.grid.scales == std::vector<double>{48.0, 68.0, 96.0});
  CHECK(cfg.grid.ratios == std::vector<double>{1.0, 1.3});
  CHECK(cfg.loss.alpha == 0.75);
  CHECK(cfg.loss.gamma == 2.0);
  CHECK(cfg.loss.beta == doctest::Approx(1.0 / 9.0));
  CHECK(cfg.train.lr == 1e-2);
  CHECK(cfg.train.epochs == 50);
  CHECK(cfg.train.seed == 7);
  CHECK(cfg.scoring.det_threshold == 0.5);
  CHECK(cfg.scoring.floor == 0.0);
  CHECK(cfg.scoring.aggregation == AggregationRule::mean);
  CHECK(cfg.metrics.target_bpcer == 0.002);
  CHECK(cfg.metrics.alpha_grid_size == 21);
  // Grid image extent follows the generator image size.
  CHECK(cfg.grid.image_width == 128);
}

TEST_CASE("sections override defaults") {
  const RunConfig cfg = parse_run_config(R"({
    "gen": {"image_size": 64, "train_count": 10, "dev_count": 5,
            "eval_count": 5, "noise": 0.5, "seed": 3},
    "preprocess": {"sigma": 2.5},
    "grid": {"stride": 8, "scales": [12, 24], "ratios": [1.0]},
    "loss": {"alpha": 0.5, "gamma": 1.0, "beta": 0.2},
    "train": {"lr": 0.005, "epochs": 9, "seed": 11},
    "scoring": {"det_threshold": 0.4, "floor": 0.01, "aggregation": "median"},
    "metrics": {"target_bpcer": 0.01, "alpha_grid_size": 5}
  })");
  CHECK(cfg.gen.image_size == 64);
  CHECK(cfg.grid.image_width == 64);
  CHECK(cfg.preprocess.sigma == 2.5);
  CHECK(cfg.grid.scales == std::vector<double>{12.0, 24.0});
  CHECK(cfg.loss.gamma == 1.0);
  CHECK(cfg.train.epochs == 9);
  CHECK(cfg.train.seed == 11);
  CHECK(cfg.scoring.aggregation == AggregationRule::median);
  CHECK(cfg.metrics.alpha_grid_size == 5);
}

TEST_CASE("unknown keys are fatal at any level") {
  CHECK_THROWS_AS(parse_run_config(R"({"turbo": true})"), config_error);
  CHECK_THROWS_AS(parse_run_config(R"({"train": {"lr": 0.1, "momentum": 0.9}})"),
                  config_error);
  CHECK_THROWS_AS(parse_run_config(R"({"gen": {"frames": 5}})"), config_error);
}

TEST_CASE("malformed JSON and bad types are config errors") {
  CHECK_THROWS_AS(parse_run_config("{"), config_error);
  CHECK_THROWS_AS(parse_run_config("[1,2,3]"), config_error);
  CHECK_THROWS_AS(parse_run_config(R"({"train": {"epochs": "many"}})"),
                  config_error);
  CHECK_THROWS_AS(parse_run_config(R"({"grid": {"scales": []}})"), config_error);
  CHECK_THROWS_AS(parse_run_config(R"({"grid": {"scales": [1, "x"]}})"),
                  config_error);
}

TEST_CASE("out-of-range values are config errors") {
  CHECK_THROWS_AS(parse_run_config(R"({"preprocess": {"sigma": 0}})"),
                  config_error);
  CHECK_THROWS_AS(parse_run_config(R"({"loss": {"alpha": 0}})"), config_error);
  CHECK_THROWS_AS(parse_run_config(R"({"loss": {"gamma": -1}})"), config_error);
  CHECK_THROWS_AS(parse_run_config(R"({"train": {"epochs": 0}})"), config_error);
  CHECK_THROWS_AS(parse_run_config(R"({"scoring": {"det_threshold": 1.5}})"),
                  config_error);
  CHECK_THROWS_AS(parse_run_config(R"({"scoring": {"aggregation": "max"}})"),
                  config_error);
  CHECK_THROWS_AS(parse_run_config(R"({"metrics": {"alpha_grid_size": 0}})"),
                  config_error);
  CHECK_THROWS_AS(parse_run_config(R"({"gen": {"bonafide_fraction": 1.0}})"),
                  config_error);
  CHECK_THROWS_AS(parse_run_config(R"({"gen": {"noise": -0.1}})"), config_error);
}

TEST_CASE("train_config propagates into the trainer configuration") {
  const RunConfig cfg = parse_run_config(
      R"({"train": {"lr": 0.02, "epochs": 3, "seed": 5},
          "loss": {"alpha": 0.4, "gamma": 1.5, "beta": 0.3}})");
  const TrainConfig tc = cfg.train_config();
  CHECK(tc.adam.learning_rate == 0.02);
  CHECK(tc.adam.epochs == 3);
  CHECK(tc.adam.seed == 5);
  CHECK(tc.focal.alpha == 0.4);
  CHECK(tc.focal.gamma == 1.5);
  CHECK(tc.smooth_l1_beta == 0.3);
}
