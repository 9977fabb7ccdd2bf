#pragma once

#include <cstdint>
#include <vector>

#include "hetrinet/eval.hpp"
#include "hetrinet/graph.hpp"
#include "hetrinet/model.hpp"

namespace hetrinet {

struct SynthConfig {
  std::int32_t drugs = 50;
  std::int32_t targets = 60;
  std::int32_t diseases = 40;
  int latent_dim = 8;
  int positive_count = 2000;
  double noise_flip_rate = 0.05;
  int raw_feature_dim = 16;
  std::uint64_t seed = 7;
  // Extra labeled cells outside the emitted positives, for sanity checks and
  // oracle evaluation.
  int heldout_positives = 200;
  int heldout_negatives = 200;

  void validate() const;
};

/// Generated benchmark with a planted interaction rule. The propensity of a
/// cell (d, t, s) is sigmoid(<u_d,u_t> + <u_d,u_s> + <u_t * u_s, w>) over
/// per-node latent vectors; the top cells by propensity are the true
/// positives. The pairwise terms alone cannot explain the third, so models
/// restricted to pairwise signals cannot saturate the benchmark.
struct SynthDataset {
  HeteroGraph graph;
  NodeFeatures features;           // noisy linear images of the latents
  std::vector<Triplet> positives;  // emitted (noise-corrupted) positives
  std::vector<ScoredTriplet> heldout;  // disjoint from positives; truth set
  Tensor latent_drugs;
  Tensor latent_targets;
  Tensor latent_diseases;
  Tensor interaction_weights;  // w in the planted rule

  /// Planted-rule propensity from the true latents.
  double oracle_score(std::int32_t d, std::int32_t t, std::int32_t s) const;
};

SynthDataset generate(const SynthConfig& config);

}  // namespace hetrinet
