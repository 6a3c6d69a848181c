#include "mcpad/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mcpad {

namespace {

using nlohmann::json;

void require_keys(const json &obj, const std::string &section,
                  const std::set<std::string> &known) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key()))
      throw config_error("config: unknown key '" +
                         (section.empty() ? it.key() : section + "." + it.key()) +
                         "'");
}

double get_number(const json &obj, const std::string &section,
                  const char *key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json &v = obj.at(key);
  if (!v.is_number())
    throw config_error("config: " + section + "." + key + " must be a number");
  return v.get<double>();
}

int get_int(const json &obj, const std::string &section, const char *key,
            int fallback) {
  if (!obj.contains(key)) return fallback;
  const json &v = obj.at(key);
  if (!v.is_number_integer())
    throw config_error("config: " + section + "." + key + " must be an integer");
  return v.get<int>();
}

std::uint64_t get_u64(const json &obj, const std::string &section,
                      const char *key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json &v = obj.at(key);
  if (!v.is_number_unsigned() && !v.is_number_integer())
    throw config_error("config: " + section + "." + key +
                       " must be a nonnegative integer");
  if (v.is_number_integer() && v.get<long long>() < 0)
    throw config_error("config: " + section + "." + key + " must be >= 0");
  return v.get<std::uint64_t>();
}

std::vector<double> get_number_list(const json &obj, const std::string &section,
                                    const char *key,
                                    std::vector<double> fallback) {
  if (!obj.contains(key)) return fallback;
  const json &v = obj.at(key);
  if (!v.is_array() || v.empty())
    throw config_error("config: " + section + "." + key +
                       " must be a non-empty array of numbers");
  std::vector<double> out;
  for (const auto &e : v) {
    if (!e.is_number())
      throw config_error("config: " + section + "." + key +
                         " must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

TrainConfig RunConfig::train_config() const {
  TrainConfig cfg;
  cfg.adam.learning_rate = train.lr;
  cfg.adam.epochs = train.epochs;
  cfg.adam.seed = train.seed;
  cfg.focal = focal();
  cfg.smooth_l1_beta = loss.beta;
  return cfg;
}

RunConfig parse_run_config(const std::string &json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw config_error(std::string("config: JSON parse error: ") + e.what());
  }
  if (!doc.is_object()) throw config_error("config: document must be an object");

  require_keys(doc, "",
               {"gen", "preprocess", "grid", "loss", "train", "scoring",
                "metrics"});

  RunConfig cfg;

  if (doc.contains("gen")) {
    const json &g = doc.at("gen");
    require_keys(g, "gen",
                 {"image_size", "train_count", "dev_count", "eval_count",
                  "bonafide_fraction", "noise", "seed"});
    cfg.gen.image_size = get_int(g, "gen", "image_size", cfg.gen.image_size);
    cfg.gen.train_count = get_int(g, "gen", "train_count", cfg.gen.train_count);
    cfg.gen.dev_count = get_int(g, "gen", "dev_count", cfg.gen.dev_count);
    cfg.gen.eval_count = get_int(g, "gen", "eval_count", cfg.gen.eval_count);
    cfg.gen.bonafide_fraction =
        get_number(g, "gen", "bonafide_fraction", cfg.gen.bonafide_fraction);
    cfg.gen.noise = get_number(g, "gen", "noise", cfg.gen.noise);
    cfg.gen.seed = get_u64(g, "gen", "seed", cfg.gen.seed);
    if (cfg.gen.image_size < 32)
      throw config_error("config: gen.image_size must be >= 32");
    if (cfg.gen.train_count <= 0 || cfg.gen.dev_count <= 0 ||
        cfg.gen.eval_count <= 0)
      throw config_error("config: gen counts must be positive");
    if (cfg.gen.bonafide_fraction <= 0.0 || cfg.gen.bonafide_fraction >= 1.0)
      throw config_error("config: gen.bonafide_fraction must be in (0,1)");
    if (cfg.gen.noise < 0.0)
      throw config_error("config: gen.noise must be >= 0");
  }

  if (doc.contains("preprocess")) {
    const json &p = doc.at("preprocess");
    require_keys(p, "preprocess", {"sigma"});
    cfg.preprocess.sigma =
        get_number(p, "preprocess", "sigma", cfg.preprocess.sigma);
    if (cfg.preprocess.sigma <= 0.0)
      throw config_error("config: preprocess.sigma must be > 0");
  }

  if (doc.contains("grid")) {
    const json &g = doc.at("grid");
    require_keys(g, "grid", {"stride", "scales", "ratios"});
    cfg.grid.stride = get_number(g, "grid", "stride", cfg.grid.stride);
    cfg.grid.scales = get_number_list(g, "grid", "scales", cfg.grid.scales);
    cfg.grid.ratios = get_number_list(g, "grid", "ratios", cfg.grid.ratios);
    if (cfg.grid.stride <= 0.0)
      throw config_error("config: grid.stride must be > 0");
    for (double s : cfg.grid.scales)
      if (s <= 0.0) throw config_error("config: grid.scales must be > 0");
    for (double r : cfg.grid.ratios)
      if (r <= 0.0) throw config_error("config: grid.ratios must be > 0");
  }

  if (doc.contains("loss")) {
    const json &l = doc.at("loss");
    require_keys(l, "loss", {"alpha", "gamma", "beta"});
    cfg.loss.alpha = get_number(l, "loss", "alpha", cfg.loss.alpha);
    cfg.loss.gamma = get_number(l, "loss", "gamma", cfg.loss.gamma);
    cfg.loss.beta = get_number(l, "loss", "beta", cfg.loss.beta);
    if (cfg.loss.alpha <= 0.0 || cfg.loss.alpha > 1.0)
      throw config_error("config: loss.alpha must be in (0,1]");
    if (cfg.loss.gamma < 0.0)
      throw config_error("config: loss.gamma must be >= 0");
    if (cfg.loss.beta <= 0.0)
      throw config_error("config: loss.beta must be > 0");
  }

  if (doc.contains("train")) {
    const json &t = doc.at("train");
    require_keys(t, "train", {"lr", "epochs", "seed"});
    cfg.train.lr = get_number(t, "train", "lr", cfg.train.lr);
    cfg.train.epochs = get_int(t, "train", "epochs", cfg.train.epochs);
    cfg.train.seed = get_u64(t, "train", "seed", cfg.train.seed);
    if (cfg.train.lr <= 0.0) throw config_error("config: train.lr must be > 0");
    if (cfg.train.epochs < 1)
      throw config_error("config: train.epochs must be >= 1");
  }

  if (doc.contains("scoring")) {
    const json &s = doc.at("scoring");
    require_keys(s, "scoring", {"det_threshold", "floor", "aggregation"});
    cfg.scoring.det_threshold =
        get_number(s, "scoring", "det_threshold", cfg.scoring.det_threshold);
    cfg.scoring.floor = get_number(s, "scoring", "floor", cfg.scoring.floor);
    if (s.contains("aggregation")) {
      const json &a = s.at("aggregation");
      if (!a.is_string())
        throw config_error("config: scoring.aggregation must be a string");
      const std::string v = a.get<std::string>();
      if (v == "mean")
        cfg.scoring.aggregation = AggregationRule::mean;
      else if (v == "median")
        cfg.scoring.aggregation = AggregationRule::median;
      else
        throw config_error("config: scoring.aggregation must be mean|median");
    }
    if (cfg.scoring.det_threshold < 0.0 || cfg.scoring.det_threshold > 1.0)
      throw config_error("config: scoring.det_threshold must be in [0,1]");
    if (cfg.scoring.floor < 0.0 || cfg.scoring.floor > 1.0)
      throw config_error("config: scoring.floor must be in [0,1]");
  }

  if (doc.contains("metrics")) {
    const json &m = doc.at("metrics");
    require_keys(m, "metrics", {"target_bpcer", "alpha_grid_size"});
    cfg.metrics.target_bpcer =
        get_number(m, "metrics", "target_bpcer", cfg.metrics.target_bpcer);
    cfg.metrics.alpha_grid_size =
        get_int(m, "metrics", "alpha_grid_size", cfg.metrics.alpha_grid_size);
    if (cfg.metrics.target_bpcer < 0.0 || cfg.metrics.target_bpcer > 1.0)
      throw config_error("config: metrics.target_bpcer must be in [0,1]");
    if (cfg.metrics.alpha_grid_size < 1)
      throw config_error("config: metrics.alpha_grid_size must be >= 1");
  }

  cfg.grid.image_width = cfg.gen.image_size;
  cfg.grid.image_height = cfg.gen.image_size;
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is) throw config_error("config: cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_run_config(ss.str());
}

}  // namespace mcpad
