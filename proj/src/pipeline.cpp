#include "mcpad/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mcpad/metrics.hpp"
#include "mcpad/scoring.hpp"

namespace mcpad {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct LoadedScene {
  ManifestRow row;
  CompositeImage composite;
};

std::vector<LoadedScene> load_split(const std::vector<ManifestRow> &manifest,
                                    Split split,
                                    const std::filesystem::path &data_dir,
                                    const NormConfig &norm) {
  std::vector<LoadedScene> out;
  for (const ManifestRow &row : manifest) {
    if (row.split != split) continue;
    const RawFrame frame = load_frame(data_dir, row.id);
    out.push_back({row, preprocess_frame(frame, norm)});
  }
  return out;
}

TrainScene to_train_scene(const LoadedScene &s) {
  TrainScene t;
  t.image = s.composite;
  t.truths.push_back({s.row.box, is_attack(s.row.cls) ? ObjectClass::non_face
                                                      : ObjectClass::bonafide});
  return t;
}

nlohmann::json split_report(std::span<const ScoredSample> samples, double tau) {
  const ScorePartition p = partition_scores(samples);
  const double a = apcer(p.attacks, tau);
  const double b = bpcer(p.bonafide, tau);
  const PerAttackReport per = per_attack_apcer(samples, tau);

  nlohmann::json j;
  j["apcer"] = a;
  j["bpcer"] = b;
  j["acer"] = acer(a, b);
  j["apcer_ap"] = per.apcer_ap;
  j["acer_ap"] = per.acer_ap;
  nlohmann::json types = nlohmann::json::object();
  for (const auto &[type, rate] : per.apcer_by_type) types[type] = rate;
  j["per_attack_apcer"] = types;
  return j;
}

void append_split_table(std::ostringstream &os, const char *name,
                        const nlohmann::json &j) {
  os << name << " set:\n";
  char line[160];
  std::snprintf(line, sizeof line,
                "  APCER %6.2f%%   BPCER %6.2f%%   ACER %6.2f%%\n",
                100.0 * j["apcer"].get<double>(),
                100.0 * j["bpcer"].get<double>(),
                100.0 * j["acer"].get<double>());
  os << line;
  for (const auto &[type, rate] : j["per_attack_apcer"].items()) {
    std::snprintf(line, sizeof line, "  %-14s APCER %6.2f%%\n", type.c_str(),
                  100.0 * rate.get<double>());
    os << line;
  }
  std::snprintf(line, sizeof line,
                "  APCER-AP %6.2f%%   ACER-AP %6.2f%%\n",
                100.0 * j["apcer_ap"].get<double>(),
                100.0 * j["acer_ap"].get<double>());
  os << line;
}

}  // namespace

void run_gen(const RunConfig &cfg, const std::filesystem::path &out_dir) {
  generate_dataset(cfg.gen, out_dir);
}

TrainResult run_train(const RunConfig &cfg,
                      const std::filesystem::path &data_dir,
                      const std::filesystem::path &model_out) {
  const std::vector<ManifestRow> manifest =
      read_manifest(data_dir / "manifest.csv");

  const std::vector<LoadedScene> train_loaded =
      load_split(manifest, Split::train, data_dir, cfg.preprocess);
  const std::vector<LoadedScene> dev_loaded =
      load_split(manifest, Split::dev, data_dir, cfg.preprocess);
  if (train_loaded.empty())
    throw data_error("train: no train split in " + data_dir.string());
  if (dev_loaded.empty())
    throw data_error("train: no dev split in " + data_dir.string());

  std::vector<TrainScene> train_set, dev_set;
  train_set.reserve(train_loaded.size());
  dev_set.reserve(dev_loaded.size());
  for (const auto &s : train_loaded) train_set.push_back(to_train_scene(s));
  for (const auto &s : dev_loaded) dev_set.push_back(to_train_scene(s));

  AnchorGridConfig grid = cfg.grid;
  grid.image_width = train_set.front().image.width;
  grid.image_height = train_set.front().image.height;

  TrainLog log;
  const DetectorModel model =
      train(train_set, dev_set, grid, cfg.train_config(), &log);

  if (model_out.has_parent_path())
    std::filesystem::create_directories(model_out.parent_path());
  save_model(model_out, model);

  TrainResult result;
  result.selected_epoch = log.selected_epoch;
  result.model_path = model_out;
  result.log_path = model_out.string() + ".log.csv";
  std::ofstream os(result.log_path, std::ios::trunc);
  if (!os) throw data_error("cannot open for writing: " + result.log_path.string());
  os << "epoch,train_loss,dev_loss\n";
  for (const EpochRecord &r : log.epochs)
    os << r.epoch << ',' << fmt17(r.train_loss) << ',' << fmt17(r.dev_loss)
       << "\n";
  return result;
}

void run_score(const RunConfig &cfg, const std::filesystem::path &data_dir,
               const std::filesystem::path &model_path,
               const std::filesystem::path &out_csv) {
  const std::vector<ManifestRow> manifest =
      read_manifest(data_dir / "manifest.csv");
  const DetectorModel model = load_model(model_path);

  std::vector<ScoredSample> samples;
  samples.reserve(manifest.size());
  for (const ManifestRow &row : manifest) {
    const RawFrame frame = load_frame(data_dir, row.id);
    const CompositeImage composite = preprocess_frame(frame, cfg.preprocess);
    const std::vector<Detection> dets =
        forward(model, composite, cfg.scoring.det_threshold);
    const PadScore score = pad_score(
        select_detection(dets, cfg.scoring.det_threshold), cfg.scoring.floor);

    ScoredSample s;
    s.id = row.id;
    s.split = row.split;
    s.label = is_attack(row.cls) ? SampleLabel::attack : SampleLabel::bonafide;
    s.attack_type = is_attack(row.cls) ? to_string(row.cls) : "";
    s.score = score.value;
    samples.push_back(std::move(s));
  }
  std::sort(samples.begin(), samples.end(),
            [](const ScoredSample &a, const ScoredSample &b) { return a.id < b.id; });

  if (out_csv.has_parent_path())
    std::filesystem::create_directories(out_csv.parent_path());
  write_score_csv(out_csv, samples);
}

EvalResult run_eval(const RunConfig &cfg,
                    const std::filesystem::path &score_csv,
                    const std::filesystem::path &report_out) {
  const std::vector<ScoredSample> all = read_score_csv(score_csv);
  std::vector<ScoredSample> dev, eval;
  for (const ScoredSample &s : all) {
    if (s.split == Split::dev) dev.push_back(s);
    if (s.split == Split::eval) eval.push_back(s);
  }
  if (dev.empty()) throw metric_error("eval: score file has no dev split");
  if (eval.empty()) throw metric_error("eval: score file has no eval split");

  const ScorePartition dev_part = partition_scores(dev);
  const double tau =
      threshold_at_bpcer(dev_part.bonafide, cfg.metrics.target_bpcer);

  nlohmann::json report;
  report["target_bpcer"] = cfg.metrics.target_bpcer;
  report["threshold"] = tau;
  report["dev"] = split_report(dev, tau);
  report["eval"] = split_report(eval, tau);

  const std::vector<double> grid = uniform_alpha_grid(cfg.metrics.alpha_grid_size);
  const std::vector<EpcPoint> epc = epc_curve(dev, eval, grid);
  const std::vector<RocPoint> roc = roc_points(eval);

  EvalResult result;
  result.report = report;
  result.report_path = report_out;
  const std::filesystem::path dir = report_out.has_parent_path()
                                        ? report_out.parent_path()
                                        : std::filesystem::path(".");
  std::filesystem::create_directories(dir);
  result.epc_path = dir / "epc.csv";
  result.roc_path = dir / "roc.csv";

  {
    std::ofstream os(report_out, std::ios::trunc);
    if (!os) throw data_error("cannot open for writing: " + report_out.string());
    os << report.dump(2) << "\n";
  }
  {
    std::ofstream os(result.epc_path, std::ios::trunc);
    if (!os) throw data_error("cannot open for writing: " + result.epc_path.string());
    os << "alpha,dev_threshold,eval_hter\n";
    for (const EpcPoint &p : epc)
      os << fmt17(p.alpha) << ',' << fmt17(p.dev_threshold) << ','
         << fmt17(p.eval_hter) << "\n";
  }
  {
    std::ofstream os(result.roc_path, std::ios::trunc);
    if (!os) throw data_error("cannot open for writing: " + result.roc_path.string());
    os << "threshold,apcer,bpcer\n";
    for (const RocPoint &p : roc)
      os << fmt17(p.threshold) << ',' << fmt17(p.apcer) << ',' << fmt17(p.bpcer)
         << "\n";
  }

  std::ostringstream table;
  table << "threshold at dev BPCER <= " << 100.0 * cfg.metrics.target_bpcer
        << "%: " << fmt17(tau) << "\n";
  append_split_table(table, "dev", report["dev"]);
  append_split_table(table, "eval", report["eval"]);
  result.table = table.str();
  return result;
}

}  // namespace mcpad
