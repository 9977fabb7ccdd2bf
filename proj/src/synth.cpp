#include "hetrinet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace hetrinet {

void SynthConfig::validate() const {
  if (drugs < 1 || targets < 1 || diseases < 1) {
    throw InputError("synth: node counts must be >= 1");
  }
  if (latent_dim < 1) throw InputError("synth: latent_dim must be >= 1");
  if (raw_feature_dim < 1) {
    throw InputError("synth: raw_feature_dim must be >= 1");
  }
  const std::uint64_t cells = static_cast<std::uint64_t>(drugs) * targets *
                              static_cast<std::uint64_t>(diseases);
  if (positive_count < 1 ||
      static_cast<std::uint64_t>(positive_count) > cells) {
    throw InputError("synth: positive_count must be in [1, drugs*targets*diseases]");
  }
  if (noise_flip_rate < 0 || noise_flip_rate >= 0.5) {
    throw InputError("synth: noise_flip_rate must be in [0, 0.5)");
  }
  if (heldout_positives < 0 || heldout_negatives < 0) {
    throw InputError("synth: held-out counts must be >= 0");
  }
  if (static_cast<std::uint64_t>(positive_count) + heldout_positives +
          heldout_negatives >
      cells) {
    throw InputError("synth: positives plus held-out cells exceed the grid");
  }
}

namespace {

Tensor draw_latents(std::int32_t n, int dim, Rng& rng) {
  Tensor t(n, dim);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = static_cast<real_t>(rng.uniform(-1.0, 1.0));
  }
  return t;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// raw = latents * A + small gaussian noise, so the features determine the
// latents up to the noise floor.
Tensor project_features(const Tensor& latents, int raw_dim, Rng& rng) {
  const int latent_dim = latents.cols();
  Tensor a(latent_dim, raw_dim);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = static_cast<real_t>(rng.normal() / std::sqrt(latent_dim));
  }
  Tensor out(latents.rows(), raw_dim);
  for (int r = 0; r < latents.rows(); ++r) {
    for (int c = 0; c < raw_dim; ++c) {
      double acc = 0;
      for (int k = 0; k < latent_dim; ++k) {
        acc += static_cast<double>(latents.at(r, k)) * a.at(k, c);
      }
      out.at(r, c) = static_cast<real_t>(acc + 0.01 * rng.normal());
    }
  }
  return out;
}

}  // namespace

double SynthDataset::oracle_score(std::int32_t d, std::int32_t t,
                                  std::int32_t s) const {
  const int dim = latent_drugs.cols();
  double dt = 0, ds = 0, tsw = 0;
  for (int k = 0; k < dim; ++k) {
    const double ud = latent_drugs.at(d, k);
    const double ut = latent_targets.at(t, k);
    const double us = latent_diseases.at(s, k);
    dt += ud * ut;
    ds += ud * us;
    tsw += ut * us * static_cast<double>(interaction_weights.at(0, k));
  }
  return sigmoid(dt + ds + tsw);
}

SynthDataset generate(const SynthConfig& config) {
  config.validate();
  const Rng base(config.seed);

  SynthDataset out;
  Rng latent_rng = base.fork(0x6c6174ULL);
  out.latent_drugs = draw_latents(config.drugs, config.latent_dim, latent_rng);
  out.latent_targets =
      draw_latents(config.targets, config.latent_dim, latent_rng);
  out.latent_diseases =
      draw_latents(config.diseases, config.latent_dim, latent_rng);
  out.interaction_weights = Tensor(1, config.latent_dim);
  for (int k = 0; k < config.latent_dim; ++k) {
    out.interaction_weights.at(0, k) =
        static_cast<real_t>(latent_rng.uniform(-1.0, 1.0));
  }

  const std::uint64_t cells = static_cast<std::uint64_t>(config.drugs) *
                              config.targets *
                              static_cast<std::uint64_t>(config.diseases);
  auto cell_of = [&](std::uint64_t p) {
    Triplet t;
    t.disease = static_cast<std::int32_t>(p % config.diseases);
    p /= config.diseases;
    t.target = static_cast<std::int32_t>(p % config.targets);
    t.drug = static_cast<std::int32_t>(p / config.targets);
    return t;
  };

  std::vector<std::uint64_t> order(cells);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> propensity(cells);
  for (std::uint64_t p = 0; p < cells; ++p) {
    const Triplet t = cell_of(p);
    propensity[p] = out.oracle_score(t.drug, t.target, t.disease);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint64_t a, std::uint64_t b) {
                     if (propensity[a] != propensity[b]) {
                       return propensity[a] > propensity[b];
                     }
                     return a < b;
                   });

  const auto k_pos = static_cast<std::size_t>(config.positive_count);
  std::unordered_set<std::uint64_t> reserved;  // true positives + held-out
  for (std::size_t i = 0; i < k_pos + config.heldout_positives; ++i) {
    reserved.insert(order[i]);
  }

  // Emitted positives: the top cells, with a noise fraction swapped for
  // random cells outside the reserved set.
  Rng noise_rng = base.fork(0x6e6f6973ULL);
  std::unordered_set<std::uint64_t> emitted;
  out.positives.reserve(k_pos);
  for (std::size_t i = 0; i < k_pos; ++i) {
    std::uint64_t cell = order[i];
    if (noise_rng.bernoulli(config.noise_flip_rate)) {
      do {
        cell = noise_rng.below(cells);
      } while (reserved.contains(cell) || emitted.contains(cell));
    }
    if (!emitted.insert(cell).second) continue;
    Triplet t = cell_of(cell);
    t.label = 1;
    out.positives.push_back(t);
  }

  // Held-out labeled cells, disjoint from the emitted positives: the next
  // propensity tranche as unobserved true positives plus random negatives.
  Rng held_rng = base.fork(0x68656c64ULL);
  for (int i = 0; i < config.heldout_positives; ++i) {
    const std::uint64_t cell = order[k_pos + i];
    if (emitted.contains(cell)) continue;
    ScoredTriplet st;
    st.triplet = cell_of(cell);
    st.truth = true;
    out.heldout.push_back(st);
  }
  std::unordered_set<std::uint64_t> heldout_neg;
  std::uint64_t attempts = 0;
  while (heldout_neg.size() < static_cast<std::size_t>(config.heldout_negatives)) {
    if (++attempts > 100 * cells) {
      throw Error("synth: could not place held-out negatives; grid too full");
    }
    const std::uint64_t cell = held_rng.below(cells);
    if (reserved.contains(cell) || emitted.contains(cell) ||
        heldout_neg.contains(cell)) {
      continue;
    }
    heldout_neg.insert(cell);
    ScoredTriplet st;
    st.triplet = cell_of(cell);
    st.triplet.label = 0;
    st.truth = false;
    out.heldout.push_back(st);
  }

  Rng feat_rng = base.fork(0x66656174ULL);
  out.features.drugs =
      project_features(out.latent_drugs, config.raw_feature_dim, feat_rng);
  out.features.targets =
      project_features(out.latent_targets, config.raw_feature_dim, feat_rng);
  out.features.diseases =
      project_features(out.latent_diseases, config.raw_feature_dim, feat_rng);

  out.graph = HeteroGraph::build(
      {config.drugs, config.targets, config.diseases}, out.positives);
  return out;
}

}  // namespace hetrinet
