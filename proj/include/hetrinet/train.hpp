#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "hetrinet/graph.hpp"
#include "hetrinet/model.hpp"
#include "hetrinet/tape.hpp"

namespace hetrinet {

enum class LossMode { MarginRanking, BinaryCrossEntropy };

const char* to_string(LossMode m);
LossMode loss_mode_from_string(const std::string& s);

struct TrainConfig {
  double learning_rate = 0.005;
  int max_epochs = 2000;
  int patience = 200;
  int batch_size = 0;  // 0 = full batch
  double train_fraction = 0.8;
  double validation_fraction_of_train = 0.1;
  double margin = 1.0;
  LossMode loss_mode = LossMode::MarginRanking;
  std::uint64_t seed = 1;
  int repeats = 5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;
};

struct Split {
  std::vector<Triplet> train;
  std::vector<Triplet> validation;
  std::vector<Triplet> test;
};

/// Disjoint, exhaustive partition: test gets (1 - train_fraction), the rest
/// splits into validation (validation_fraction_of_train of it) and train.
/// Deterministic per seed.
Split split(const std::vector<Triplet>& triplets, const TrainConfig& config,
            std::uint64_t seed);

using PositiveKeySet = std::unordered_set<std::uint64_t>;

PositiveKeySet make_positive_key_set(const HeteroGraph& g,
                                     const std::vector<Triplet>& triplets);

/// Corrupts exactly one slot of `positive` with a uniform node of the same
/// kind, rejecting known positives. Throws after 100 failed attempts.
Triplet sample_negative(const Triplet& positive, const HeteroGraph& g,
                        const PositiveKeySet& positive_keys, Rng& rng);

/// Hinge ranking loss: sum over paired scores of
/// max(0, margin + neg - pos). Throws on length mismatch.
double margin_loss(const std::vector<double>& pos_scores,
                   const std::vector<double>& neg_scores, double margin);

/// Tape version over B x 1 score columns (same pairing contract).
Var margin_loss_on(Tape& t, Var pos_scores, Var neg_scores, real_t margin);

/// -sum(log pos) - sum(log(1 - neg)), scores clamped away from 0 and 1.
Var bce_loss_on(Tape& t, Var pos_scores, Var neg_scores);

struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  long step = 0;
};

/// Standard Adam with bias correction over the trainable parameters.
/// The state is created lazily on the first call.
void adam_step(const std::vector<Parameter*>& params, AdamState& state,
               double lr, double beta1, double beta2, double eps);

/// Uniform on +-sqrt(6 / (fan_in + fan_out)) with fan_in = rows,
/// fan_out = cols.
Tensor xavier_init(int rows, int cols, Rng& rng);

struct TrainReport {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  int best_epoch = -1;  // 0-based; -1 when no validation signal existed
  int epochs_run = 0;
  double wall_seconds = 0.0;
  std::string checkpoint_ref;
};

/// Full training loop: per epoch, resample neighbor pairs, draw one negative
/// per train positive, forward, loss, backward, Adam step; early-stops on
/// the validation loss and restores the best parameters.
TrainReport fit(const HeteroGraph& g, const NodeFeatures& feats,
                HeTriNetModel& model, const TrainConfig& config,
                const Split& data);

/// Convenience overload that splits the graph's positive triplets itself.
TrainReport fit(const HeteroGraph& g, const NodeFeatures& feats,
                HeTriNetModel& model, const TrainConfig& config);

}  // namespace hetrinet
