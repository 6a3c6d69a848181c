#ifndef MCPAD_TESTS_ORACLES_HPP
#define MCPAD_TESTS_ORACLES_HPP

// Brute-force reference implementations used as oracles. These are kept
// deliberately naive (direct counting, exhaustive scans, central
// differences) and independent of the library code paths they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace oracle {

// --- counting metrics ------------------------------------------------------

inline double apcer(const std::vector<double> &attacks, double tau) {
  std::size_t k = 0;
  for (double s : attacks)
    if (s >= tau) ++k;
  return static_cast<double>(k) / static_cast<double>(attacks.size());
}

inline double bpcer(const std::vector<double> &bonafide, double tau) {
  std::size_t k = 0;
  for (double s : bonafide)
    if (s < tau) ++k;
  return static_cast<double>(k) / static_cast<double>(bonafide.size());
}

inline std::vector<double> thresholds_from(const std::vector<double> &scores) {
  std::vector<double> c = scores;
  c.push_back(0.0);
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

// Largest candidate threshold keeping BPCER at or below target.
inline double threshold_at_bpcer(const std::vector<double> &dev_bonafide,
                                 double target) {
  double best = 0.0;
  for (double tau : thresholds_from(dev_bonafide))
    if (bpcer(dev_bonafide, tau) <= target) best = tau;
  return best;
}

// Exhaustive WER scan over dev thresholds; lowest threshold wins ties.
struct EpcPointRef {
  double threshold;
  double eval_hter;
};

inline EpcPointRef epc_point(const std::vector<double> &dev_attacks,
                             const std::vector<double> &dev_bonafide,
                             const std::vector<double> &eval_attacks,
                             const std::vector<double> &eval_bonafide,
                             double alpha) {
  std::vector<double> all = dev_attacks;
  all.insert(all.end(), dev_bonafide.begin(), dev_bonafide.end());
  double best_tau = 0.0;
  double best_wer = std::numeric_limits<double>::infinity();
  for (double tau : thresholds_from(all)) {
    const double w =
        alpha * apcer(dev_attacks, tau) + (1.0 - alpha) * bpcer(dev_bonafide, tau);
    if (w < best_wer) {
      best_wer = w;
      best_tau = tau;
    }
  }
  const double hter =
      (apcer(eval_attacks, best_tau) + bpcer(eval_bonafide, best_tau)) / 2.0;
  return {best_tau, hter};
}

// --- finite differences -----------------------------------------------------

inline double central_difference(const std::function<double(double)> &f,
                                 double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double relative_error(double got, double want) {
  const double denom = std::max({std::abs(got), std::abs(want), 1e-12});
  return std::abs(got - want) / denom;
}

// --- region statistics ------------------------------------------------------

struct RegionStats {
  double mean;
  double stddev;
};

template <typename PlaneAt>
RegionStats region_stats(PlaneAt at, int x0, int y0, int x1, int y1) {
  double sum = 0.0, sq = 0.0;
  const double n = static_cast<double>((x1 - x0) * (y1 - y0));
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) {
      const double v = at(x, y);
      sum += v;
      sq += v * v;
    }
  const double mean = sum / n;
  return {mean, std::sqrt(std::max(0.0, sq / n - mean * mean))};
}

}  // namespace oracle

#endif  // MCPAD_TESTS_ORACLES_HPP
