#ifndef MCPAD_METRICS_HPP
#define MCPAD_METRICS_HPP

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mcpad/errors.hpp"

namespace mcpad {

enum class SampleLabel { bonafide, attack };
enum class Split { train, dev, eval };

const char *to_string(SampleLabel label);
const char *to_string(Split split);

// One scored presentation. attack_type is non-empty iff label == attack.
struct ScoredSample {
  std::string id;
  Split split = Split::eval;
  SampleLabel label = SampleLabel::bonafide;
  std::string attack_type;  // e.g. print, replay, rigid-mask
  double score = 0.0;       // in [0,1]; higher = more bonafide
};

// Fraction of attack scores accepted as bonafide (score >= tau).
// Throws metric_error on an empty attack set.
double apcer(std::span<const double> attack_scores, double tau);

// Fraction of bonafide scores rejected (score < tau).
// Throws metric_error on an empty bonafide set.
double bpcer(std::span<const double> bonafide_scores, double tau);

inline double acer(double apcer_value, double bpcer_value) {
  return (apcer_value + bpcer_value) / 2.0;
}

// Largest candidate threshold (drawn from the dev bonafide score values
// plus 0) whose BPCER stays at or below target: maximal attack rejection
// subject to the BPCER bound. tau = 0 always qualifies.
double threshold_at_bpcer(std::span<const double> dev_bonafide_scores,
                          double target);

struct PerAttackReport {
  std::map<std::string, double> apcer_by_type;
  double apcer_ap = 0.0;  // max APCER over attack types
  double bpcer = 0.0;
  double acer_ap = 0.0;  // (apcer_ap + bpcer) / 2
};

// Per-category APCER breakdown plus the worst-case summary. Every attack
// sample must carry an attack_type; both labels must be present.
PerAttackReport per_attack_apcer(std::span<const ScoredSample> samples,
                                 double tau);

// Weighted error rate: alpha*FMR + (1-alpha)*FNMR. Under the fixed score
// orientation FMR is APCER and FNMR is BPCER.
inline double wer(double fmr, double fnmr, double alpha) {
  return alpha * fmr + (1.0 - alpha) * fnmr;
}

struct EpcPoint {
  double alpha = 0.0;
  double dev_threshold = 0.0;
  double eval_hter = 0.0;
};

// For each alpha: the dev-score threshold minimizing WER on the dev split
// (lowest threshold on ties), then HTER on the eval split at that
// threshold. Candidate thresholds are the distinct dev score values plus 0.
std::vector<EpcPoint> epc_curve(std::span<const ScoredSample> dev,
                                std::span<const ScoredSample> eval,
                                std::span<const double> alpha_grid);

// n uniform points covering [0, 1] inclusive.
std::vector<double> uniform_alpha_grid(int n);

struct RocPoint {
  double threshold = 0.0;
  double apcer = 0.0;
  double bpcer = 0.0;
};

// One point per candidate threshold ({0} + distinct scores + one step past
// the maximum), sorted ascending; APCER non-increasing, BPCER
// non-decreasing. Both labels must be present.
std::vector<RocPoint> roc_points(std::span<const ScoredSample> samples);

// Convenience split of a sample set into (attack scores, bonafide scores).
struct ScorePartition {
  std::vector<double> attacks;
  std::vector<double> bonafide;
};
ScorePartition partition_scores(std::span<const ScoredSample> samples);

// ---------------------------------------------------------------------------
// Score CSV: header `id,split,label,attack_type,score`. Ingestion rejects
// attack rows without a type, bonafide rows with one, and out-of-range
// scores.

std::vector<ScoredSample> read_score_csv(std::istream &is);
std::vector<ScoredSample> read_score_csv(const std::filesystem::path &path);
void write_score_csv(std::ostream &os, std::span<const ScoredSample> samples);
void write_score_csv(const std::filesystem::path &path,
                     std::span<const ScoredSample> samples);

}  // namespace mcpad

#endif  // MCPAD_METRICS_HPP
