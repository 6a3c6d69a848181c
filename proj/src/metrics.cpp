#include "mcpad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace mcpad {

const char *to_string(SampleLabel label) {
  return label == SampleLabel::bonafide ? "bonafide" : "attack";
}

const char *to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    default: return "eval";
  }
}

double apcer(std::span<const double> attack_scores, double tau) {
  if (attack_scores.empty())
    throw metric_error("APCER undefined: no attack samples");
  std::size_t accepted = 0;
  for (double s : attack_scores)
    if (s >= tau) ++accepted;
  return static_cast<double>(accepted) / static_cast<double>(attack_scores.size());
}

double bpcer(std::span<const double> bonafide_scores, double tau) {
  if (bonafide_scores.empty())
    throw metric_error("BPCER undefined: no bonafide samples");
  std::size_t rejected = 0;
  for (double s : bonafide_scores)
    if (s < tau) ++rejected;
  return static_cast<double>(rejected) /
         static_cast<double>(bonafide_scores.size());
}

namespace {

// Distinct values, ascending, with 0 prepended when absent.
std::vector<double> candidate_thresholds(std::span<const double> scores) {
  std::vector<double> c(scores.begin(), scores.end());
  c.push_back(0.0);
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

}  // namespace

double threshold_at_bpcer(std::span<const double> dev_bonafide_scores,
                          double target) {
  if (dev_bonafide_scores.empty())
    throw metric_error("threshold_at_bpcer undefined: no dev bonafide samples");
  const std::vector<double> candidates =
      candidate_thresholds(dev_bonafide_scores);
  double best = 0.0;  // tau = 0 rejects nothing, always qualifies
  for (double tau : candidates)
    if (bpcer(dev_bonafide_scores, tau) <= target) best = tau;
  return best;
}

PerAttackReport per_attack_apcer(std::span<const ScoredSample> samples,
                                 double tau) {
  std::map<std::string, std::vector<double>> by_type;
  std::vector<double> bona;
  for (const ScoredSample &s : samples) {
    if (s.label == SampleLabel::bonafide) {
      bona.push_back(s.score);
    } else {
      if (s.attack_type.empty())
        throw metric_error("per-attack APCER: attack sample '" + s.id +
                           "' has no attack_type");
      by_type[s.attack_type].push_back(s.score);
    }
  }
  if (by_type.empty())
    throw metric_error("per-attack APCER undefined: no attack samples");

  PerAttackReport r;
  r.apcer_ap = 0.0;
  for (const auto &[type, scores] : by_type) {
    const double a = apcer(scores, tau);
    r.apcer_by_type[type] = a;
    r.apcer_ap = std::max(r.apcer_ap, a);
  }
  r.bpcer = bpcer(bona, tau);
  r.acer_ap = acer(r.apcer_ap, r.bpcer);
  return r;
}

std::vector<double> uniform_alpha_grid(int n) {
  if (n < 1) throw metric_error("alpha grid needs at least one point");
  std::vector<double> grid(n);
  if (n == 1) {
    grid[0] = 0.5;
    return grid;
  }
  for (int i = 0; i < n; ++i)
    grid[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  return grid;
}

std::vector<EpcPoint> epc_curve(std::span<const ScoredSample> dev,
                                std::span<const ScoredSample> eval,
                                std::span<const double> alpha_grid) {
  const ScorePartition d = partition_scores(dev);
  const ScorePartition e = partition_scores(eval);
  if (d.attacks.empty() || d.bonafide.empty())
    throw metric_error("EPC undefined: dev split must contain both labels");
  if (e.attacks.empty() || e.bonafide.empty())
    throw metric_error("EPC undefined: eval split must contain both labels");

  std::vector<double> all_dev(d.attacks);
  all_dev.insert(all_dev.end(), d.bonafide.begin(), d.bonafide.end());
  const std::vector<double> candidates = candidate_thresholds(all_dev);

  std::vector<EpcPoint> points;
  points.reserve(alpha_grid.size());
  for (double alpha : alpha_grid) {
    double best_tau = candidates.front();
    double best_wer = std::numeric_limits<double>::infinity();
    for (double tau : candidates) {
      const double w = wer(apcer(d.attacks, tau), bpcer(d.bonafide, tau), alpha);
      if (w < best_wer) {  // strict: lowest threshold wins ties
        best_wer = w;
        best_tau = tau;
      }
    }
    points.push_back(
        {alpha, best_tau, acer(apcer(e.attacks, best_tau), bpcer(e.bonafide, best_tau))});
  }
  return points;
}

std::vector<RocPoint> roc_points(std::span<const ScoredSample> samples) {
  const ScorePartition p = partition_scores(samples);
  if (p.attacks.empty() || p.bonafide.empty())
    throw metric_error("ROC undefined: need both labels");

  std::vector<double> all(p.attacks);
  all.insert(all.end(), p.bonafide.begin(), p.bonafide.end());
  std::vector<double> candidates = candidate_thresholds(all);
  // One step past the maximum so the curve reaches APCER 0 / BPCER 1.
  candidates.push_back(std::nextafter(candidates.back(), 2.0));

  std::vector<RocPoint> points;
  points.reserve(candidates.size());
  for (double tau : candidates)
    points.push_back({tau, apcer(p.attacks, tau), bpcer(p.bonafide, tau)});
  return points;
}

ScorePartition partition_scores(std::span<const ScoredSample> samples) {
  ScorePartition p;
  for (const ScoredSample &s : samples) {
    if (s.label == SampleLabel::attack)
      p.attacks.push_back(s.score);
    else
      p.bonafide.push_back(s.score);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Score CSV

namespace {

constexpr const char *kScoreHeader = "id,split,label,attack_type,score";

std::vector<std::string> split_fields(const std::string &line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

Split parse_split(const std::string &s, int line_no) {
  if (s == "train") return Split::train;
  if (s == "dev") return Split::dev;
  if (s == "eval") return Split::eval;
  throw corrupt_input_error("score CSV line " + std::to_string(line_no) +
                            ": bad split '" + s + "'");
}

}  // namespace

std::vector<ScoredSample> read_score_csv(std::istream &is) {
  std::string line;
  if (!std::getline(is, line))
    throw corrupt_input_error("score CSV: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kScoreHeader)
    throw corrupt_input_error("score CSV: bad header '" + line + "'");

  std::vector<ScoredSample> samples;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_fields(line);
    if (f.size() != 5)
      throw corrupt_input_error("score CSV line " + std::to_string(line_no) +
                                ": expected 5 fields, got " +
                                std::to_string(f.size()));
    ScoredSample s;
    s.id = f[0];
    s.split = parse_split(f[1], line_no);
    if (f[2] == "bonafide")
      s.label = SampleLabel::bonafide;
    else if (f[2] == "attack")
      s.label = SampleLabel::attack;
    else
      throw corrupt_input_error("score CSV line " + std::to_string(line_no) +
                                ": bad label '" + f[2] + "'");
    s.attack_type = f[3];
    if (s.label == SampleLabel::attack && s.attack_type.empty())
      throw corrupt_input_error("score CSV line " + std::to_string(line_no) +
                                ": attack sample without attack_type");
    if (s.label == SampleLabel::bonafide && !s.attack_type.empty())
      throw corrupt_input_error("score CSV line " + std::to_string(line_no) +
                                ": bonafide sample with attack_type");
    try {
      std::size_t pos = 0;
      s.score = std::stod(f[4], &pos);
      if (pos != f[4].size()) throw std::invalid_argument("trailing junk");
    } catch (const std::exception &) {
      throw corrupt_input_error("score CSV line " + std::to_string(line_no) +
                                ": bad score '" + f[4] + "'");
    }
    if (!(s.score >= 0.0 && s.score <= 1.0))
      throw corrupt_input_error("score CSV line " + std::to_string(line_no) +
                                ": score out of [0,1]");
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<ScoredSample> read_score_csv(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is) throw data_error("cannot open: " + path.string());
  return read_score_csv(is);
}

void write_score_csv(std::ostream &os, std::span<const ScoredSample> samples) {
  os << kScoreHeader << "\n";
  char buf[64];
  for (const ScoredSample &s : samples) {
    std::snprintf(buf, sizeof buf, "%.17g", s.score);
    os << s.id << ',' << to_string(s.split) << ',' << to_string(s.label) << ','
       << s.attack_type << ',' << buf << "\n";
  }
}

void write_score_csv(const std::filesystem::path &path,
                     std::span<const ScoredSample> samples) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw data_error("cannot open for writing: " + path.string());
  write_score_csv(os, samples);
  if (!os) throw data_error("write failed: " + path.string());
}

}  // namespace mcpad
