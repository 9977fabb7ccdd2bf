#include "hetrinet/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace hetrinet {

RankedResult rank_from_scores(double positive_score,
                              std::vector<double> negative_scores) {
  if (negative_scores.empty()) {
    throw InputError("rank_positive: no negatives supplied");
  }
  RankedResult r;
  r.positive_score = positive_score;
  int above = 0;
  for (const double s : negative_scores) {
    if (s >= positive_score) ++above;  // ties rank above the positive
  }
  r.negative_scores = std::move(negative_scores);
  r.rank = 1 + above;
  return r;
}

RankedResult rank_positive(const Scorer& scorer, const Triplet& positive,
                           const std::vector<Triplet>& negatives) {
  std::vector<double> neg_scores;
  neg_scores.reserve(negatives.size());
  for (const Triplet& t : negatives) neg_scores.push_back(scorer(t));
  return rank_from_scores(scorer(positive), std::move(neg_scores));
}

double hit_at_n(std::span<const RankedResult> results, int n) {
  if (n < 1) throw InputError("hit_at_n: n must be >= 1");
  if (results.empty()) return 0;
  std::size_t hits = 0;
  for (const RankedResult& r : results) {
    if (r.rank <= n) ++hits;
  }
  return static_cast<double>(hits) / results.size();
}

double ndcg_at_n(std::span<const RankedResult> results, int n) {
  if (n < 1) throw InputError("ndcg_at_n: n must be >= 1");
  if (results.empty()) return 0;
  double total = 0;
  for (const RankedResult& r : results) {
    if (r.rank <= n) total += 1.0 / std::log2(r.rank + 1.0);
  }
  return total / results.size();
}

namespace {

void require_both_classes(const std::vector<ScoredTriplet>& scored,
                          const char* what) {
  bool has_pos = false;
  bool has_neg = false;
  for (const ScoredTriplet& s : scored) {
    (s.truth ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) {
    throw InputError(std::string(what) + ": both classes must be present");
  }
}

}  // namespace

double roc_auc(const std::vector<ScoredTriplet>& scored) {
  require_both_classes(scored, "roc_auc");
  // Rank-sum with average ranks for ties: AUC = (R_pos - P(P+1)/2) / (P*N).
  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scored[a].score < scored[b].score;
  });
  double rank_sum_pos = 0;
  std::size_t positives = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() &&
           scored[order[j + 1]].score == scored[order[i]].score) {
      ++j;
    }
    const double avg_rank = (static_cast<double>(i + 1) + (j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (scored[order[k]].truth) {
        rank_sum_pos += avg_rank;
        ++positives;
      }
    }
    i = j + 1;
  }
  const std::size_t negatives = scored.size() - positives;
  const double u = rank_sum_pos -
                   static_cast<double>(positives) * (positives + 1) / 2.0;
  return u / (static_cast<double>(positives) * negatives);
}

double aupr(const std::vector<ScoredTriplet>& scored) {
  require_both_classes(scored, "aupr");
  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scored[a].score > scored[b].score;
  });
  std::size_t total_pos = 0;
  for (const ScoredTriplet& s : scored) total_pos += s.truth ? 1 : 0;

  double area = 0;
  double prev_recall = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    // Consume the whole tie group before emitting a curve point.
    std::size_t j = i;
    while (j + 1 < order.size() &&
           scored[order[j + 1]].score == scored[order[i]].score) {
      ++j;
    }
    for (std::size_t k = i; k <= j; ++k) {
      if (scored[order[k]].truth) {
        ++tp;
      } else {
        ++fp;
      }
    }
    const double precision = static_cast<double>(tp) / (tp + fp);
    const double recall = static_cast<double>(tp) / total_pos;
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j + 1;
  }
  return area;
}

ClassificationMetrics classification_metrics(
    const std::vector<ScoredTriplet>& scored, double threshold) {
  require_both_classes(scored, "classification_metrics");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const ScoredTriplet& s : scored) {
    const bool predicted = s.score >= threshold;
    if (predicted && s.truth) ++tp;
    if (predicted && !s.truth) ++fp;
    if (!predicted && s.truth) ++fn;
  }
  ClassificationMetrics m;
  if (tp + fp == 0) {
    m.degenerate = true;
  } else {
    m.precision = static_cast<double>(tp) / (tp + fp);
  }
  if (tp + fn == 0) {
    m.degenerate = true;
  } else {
    m.recall = static_cast<double>(tp) / (tp + fn);
  }
  if (m.precision + m.recall > 0) {
    m.f1 = 2 * m.precision * m.recall / (m.precision + m.recall);
  } else {
    m.degenerate = true;
  }
  return m;
}

MetricsReport compute_metrics(const std::vector<ScoredTriplet>& scored,
                              std::span<const RankedResult> ranked,
                              const std::vector<int>& cutoffs,
                              double threshold) {
  MetricsReport r;
  r.threshold = threshold;
  const ClassificationMetrics cm = classification_metrics(scored, threshold);
  r.f1 = cm.f1;
  r.precision = cm.precision;
  r.recall = cm.recall;
  r.degenerate_classification = cm.degenerate;
  r.roc_auc = roc_auc(scored);
  r.aupr = aupr(scored);
  for (const int n : cutoffs) {
    r.hit_at[n] = hit_at_n(ranked, n);
    r.ndcg_at[n] = ndcg_at_n(ranked, n);
  }
  r.ranked_positives = static_cast<int>(ranked.size());
  r.negatives_per_positive =
      ranked.empty() ? 0 : static_cast<int>(ranked.front().negative_scores.size());
  r.classified = static_cast<int>(scored.size());
  return r;
}

std::string metrics_to_table(const MetricsReport& report) {
  std::string out;
  char line[128];
  auto row = [&](const std::string& name, double value) {
    std::snprintf(line, sizeof(line), "%-12s %10.6f\n", name.c_str(), value);
    out += line;
  };
  out += "metric            value\n";
  row("f1", report.f1);
  row("precision", report.precision);
  row("recall", report.recall);
  row("roc_auc", report.roc_auc);
  row("aupr", report.aupr);
  for (const auto& [n, v] : report.hit_at) row("hit@" + std::to_string(n), v);
  for (const auto& [n, v] : report.ndcg_at) row("ndcg@" + std::to_string(n), v);
  if (report.degenerate_classification) {
    out += "warning: a zero denominator forced some classification metric to 0\n";
  }
  return out;
}

}  // namespace hetrinet
