#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hetrinet/graph.hpp"

namespace hetrinet {

struct ScoredTriplet {
  Triplet triplet;
  double score = 0;
  bool truth = false;
};

/// One test positive ranked against its sampled negatives. rank is 1-based;
/// ties are pessimistic (tied negatives count as ranked above the positive).
struct RankedResult {
  double positive_score = 0;
  std::vector<double> negative_scores;
  int rank = 0;
};

using Scorer = std::function<double(const Triplet&)>;

RankedResult rank_from_scores(double positive_score,
                              std::vector<double> negative_scores);

RankedResult rank_positive(const Scorer& scorer, const Triplet& positive,
                           const std::vector<Triplet>& negatives);

/// Fraction of results whose positive landed in the top n.
double hit_at_n(std::span<const RankedResult> results, int n);

/// Mean of 1/log2(rank + 1) for ranks inside the cutoff; a single relevant
/// item per list makes the ideal DCG exactly 1.
double ndcg_at_n(std::span<const RankedResult> results, int n);

/// Mann-Whitney statistic; tied positive/negative scores count one half.
/// Throws when only one class is present.
double roc_auc(const std::vector<ScoredTriplet>& scored);

/// Area under the precision-recall curve by step interpolation at each
/// distinct threshold. Throws when only one class is present.
double aupr(const std::vector<ScoredTriplet>& scored);

struct ClassificationMetrics {
  double f1 = 0;
  double precision = 0;
  double recall = 0;
  /// Set when a zero denominator forced any metric to 0.
  bool degenerate = false;
};

/// score >= threshold predicts positive.
ClassificationMetrics classification_metrics(
    const std::vector<ScoredTriplet>& scored, double threshold = 0.5);

struct MetricsReport {
  double f1 = 0;
  double precision = 0;
  double recall = 0;
  double roc_auc = 0;
  double aupr = 0;
  std::map<int, double> hit_at;
  std::map<int, double> ndcg_at;
  double threshold = 0.5;
  bool degenerate_classification = false;
  int ranked_positives = 0;
  int negatives_per_positive = 0;
  int classified = 0;
};

MetricsReport compute_metrics(const std::vector<ScoredTriplet>& scored,
                              std::span<const RankedResult> ranked,
                              const std::vector<int>& cutoffs,
                              double threshold = 0.5);

std::string metrics_to_table(const MetricsReport& report);

}  // namespace hetrinet
