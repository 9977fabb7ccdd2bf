#include "hetrinet/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "hetrinet/kernels.hpp"

namespace hetrinet {

const char* to_string(LossMode m) {
  switch (m) {
    case LossMode::MarginRanking:
      return "margin_ranking";
    case LossMode::BinaryCrossEntropy:
      return "binary_cross_entropy";
  }
  return "?";
}

LossMode loss_mode_from_string(const std::string& s) {
  if (s == "margin_ranking") return LossMode::MarginRanking;
  if (s == "binary_cross_entropy") return LossMode::BinaryCrossEntropy;
  throw InputError("unknown loss mode '" + s +
                   "' (margin_ranking|binary_cross_entropy)");
}

void TrainConfig::validate() const {
  if (learning_rate <= 0) throw InputError("train: learning_rate must be > 0");
  if (max_epochs < 1) throw InputError("train: max_epochs must be >= 1");
  if (patience < 1 || patience > max_epochs) {
    throw InputError("train: patience must be in [1, max_epochs]");
  }
  if (batch_size < 0) throw InputError("train: batch_size must be >= 0");
  if (train_fraction <= 0 || train_fraction >= 1) {
    throw InputError("train: train_fraction must be in (0,1)");
  }
  if (validation_fraction_of_train < 0 || validation_fraction_of_train >= 1) {
    throw InputError("train: validation_fraction_of_train must be in [0,1)");
  }
  if (margin <= 0) throw InputError("train: margin must be > 0");
  if (repeats < 1) throw InputError("train: repeats must be >= 1");
}

Split split(const std::vector<Triplet>& triplets, const TrainConfig& config,
            std::uint64_t seed) {
  if (triplets.size() < 10) {
    throw InputError("split: need at least 10 triplets, got " +
                     std::to_string(triplets.size()));
  }
  const std::size_t n = triplets.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(seed, 0x73706c69ULL));  // "spli"
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(i + 1)]);
  }

  const auto train_total =
      static_cast<std::size_t>(std::floor(n * config.train_fraction));
  const auto val_count = static_cast<std::size_t>(
      std::floor(train_total * config.validation_fraction_of_train));
  const std::size_t train_count = train_total - val_count;

  Split out;
  for (std::size_t i = 0; i < n; ++i) {
    const Triplet& t = triplets[order[i]];
    if (i < train_count) {
      out.train.push_back(t);
    } else if (i < train_total) {
      out.validation.push_back(t);
    } else {
      out.test.push_back(t);
    }
  }
  return out;
}

PositiveKeySet make_positive_key_set(const HeteroGraph& g,
                                     const std::vector<Triplet>& triplets) {
  PositiveKeySet keys;
  keys.reserve(triplets.size());
  for (const Triplet& t : triplets) {
    keys.insert(g.triplet_key(t.drug, t.target, t.disease));
  }
  return keys;
}

Triplet sample_negative(const Triplet& positive, const HeteroGraph& g,
                        const PositiveKeySet& positive_keys, Rng& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    Triplet candidate = positive;
    candidate.label = 0;
    switch (rng.below(3)) {
      case 0:
        candidate.drug = static_cast<std::int32_t>(rng.below(g.dims().drugs));
        break;
      case 1:
        candidate.target =
            static_cast<std::int32_t>(rng.below(g.dims().targets));
        break;
      default:
        candidate.disease =
            static_cast<std::int32_t>(rng.below(g.dims().diseases));
        break;
    }
    const std::uint64_t key =
        g.triplet_key(candidate.drug, candidate.target, candidate.disease);
    if (!positive_keys.contains(key)) return candidate;
  }
  throw Error(
      "sample_negative: 100 attempts exhausted; corruption space is "
      "saturated with positives");
}

double margin_loss(const std::vector<double>& pos_scores,
                   const std::vector<double>& neg_scores, double margin) {
  if (pos_scores.size() != neg_scores.size()) {
    throw InputError("margin_loss: " + std::to_string(pos_scores.size()) +
                     " positives vs " + std::to_string(neg_scores.size()) +
                     " negatives");
  }
  double loss = 0;
  for (std::size_t i = 0; i < pos_scores.size(); ++i) {
    loss += std::max(0.0, margin + neg_scores[i] - pos_scores[i]);
  }
  return loss;
}

Var margin_loss_on(Tape& t, Var pos_scores, Var neg_scores, real_t margin) {
  const Tensor& p = t.value(pos_scores);
  const Tensor& n = t.value(neg_scores);
  if (!p.same_shape(n)) {
    throw InputError("margin_loss: shape " + p.shape_str() + " vs " +
                     n.shape_str());
  }
  const Var diff = t.add(neg_scores, t.scale(pos_scores, real_t{-1}));
  return t.sum_all(t.relu(t.add_const(diff, margin)));
}

Var bce_loss_on(Tape& t, Var pos_scores, Var neg_scores) {
  constexpr real_t eps = 1e-12;
  const Var pos_term = t.sum_all(t.log(t.clamp_min(pos_scores, eps)));
  const Var one_minus_neg = t.add_const(t.scale(neg_scores, real_t{-1}), 1);
  const Var neg_term = t.sum_all(t.log(t.clamp_min(one_minus_neg, eps)));
  return t.scale(t.add(pos_term, neg_term), real_t{-1});
}

void adam_step(const std::vector<Parameter*>& params, AdamState& state,
               double lr, double beta1, double beta2, double eps) {
  if (state.m.empty()) {
    for (const Parameter* p : params) {
      state.m.emplace_back(p->value.rows(), p->value.cols());
      state.v.emplace_back(p->value.rows(), p->value.cols());
    }
  }
  if (state.m.size() != params.size()) {
    throw Error("adam_step: state does not match parameter list");
  }
  ++state.step;
  const auto bc1 =
      static_cast<real_t>(1.0 - std::pow(beta1, static_cast<double>(state.step)));
  const auto bc2 =
      static_cast<real_t>(1.0 - std::pow(beta2, static_cast<double>(state.step)));
  const auto& K = kernels::active();
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter* p = params[i];
    K.adam_update(p->value.size(), p->value.data(), p->grad.data(),
                  state.m[i].data(), state.v[i].data(),
                  static_cast<real_t>(lr), static_cast<real_t>(beta1),
                  static_cast<real_t>(beta2), static_cast<real_t>(eps), bc1,
                  bc2);
  }
}

Tensor xavier_init(int rows, int cols, Rng& rng) {
  if (rows < 1 || cols < 1) throw InputError("xavier_init: dims must be >= 1");
  const double bound = std::sqrt(6.0 / (rows + cols));
  Tensor t(rows, cols);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = static_cast<real_t>(rng.uniform(-bound, bound));
  }
  return t;
}

namespace {

// Scores the given positives against their paired negatives on a fresh tape
// and returns the loss value (and optionally runs backward).
double run_epoch_loss(const HeteroGraph& g, const NodeFeatures& feats,
                      HeTriNetModel& model, const TrainConfig& cfg,
                      const std::vector<Triplet>& positives,
                      const std::vector<Triplet>& negatives,
                      const NeighborPlan& plan, bool training, Rng& dropout_rng,
                      bool backprop) {
  Tape tape;
  ParamBinding bind;
  const Var z = encode_on(tape, bind, model, g, feats, plan, training,
                          dropout_rng);
  const Var pos = decode_on(tape, bind, model, z, g, positives);
  const Var neg = decode_on(tape, bind, model, z, g, negatives);
  Var loss;
  switch (cfg.loss_mode) {
    case LossMode::MarginRanking:
      loss = margin_loss_on(tape, pos, neg, static_cast<real_t>(cfg.margin));
      break;
    case LossMode::BinaryCrossEntropy:
      loss = bce_loss_on(tape, pos, neg);
      break;
  }
  const double value = static_cast<double>(tape.value(loss)[0]);
  if (backprop) {
    tape.backward(loss);
    bind.accumulate_grads(tape);
  }
  return value;
}

std::string param_norms_summary(HeTriNetModel& model) {
  std::string out;
  int shown = 0;
  for (Parameter* p : model.all_params()) {
    double norm = 0;
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      norm += static_cast<double>(p->value[i]) * p->value[i];
    }
    out += p->name + "=" + std::to_string(std::sqrt(norm)) + " ";
    if (++shown == 8) {
      out += "...";
      break;
    }
  }
  return out;
}

}  // namespace

TrainReport fit(const HeteroGraph& g, const NodeFeatures& feats,
                HeTriNetModel& model, const TrainConfig& config,
                const Split& data) {
  config.validate();
  if (data.train.empty()) throw InputError("fit: empty training split");
  const auto started = std::chrono::steady_clock::now();

  const Rng base(config.seed);
  const PositiveKeySet positive_keys =
      make_positive_key_set(g, g.positives());

  // Validation negatives and the validation neighbor plan are fixed once so
  // the early-stopping signal is comparable across epochs.
  Rng val_rng = base.fork(0x76616cULL);  // "val"
  std::vector<Triplet> val_negatives;
  val_negatives.reserve(data.validation.size());
  for (const Triplet& t : data.validation) {
    val_negatives.push_back(sample_negative(t, g, positive_keys, val_rng));
  }
  const NeighborPlan val_plan = make_neighbor_plan(
      g, model.config.neighbor_cap, mix_seed(config.seed, 0x76706c6eULL));

  TrainReport report;
  AdamState adam;
  const std::vector<Parameter*> trainable = model.trainable_params();

  double best_val = std::numeric_limits<double>::infinity();
  int best_epoch = -1;
  int since_best = 0;
  std::vector<Tensor> best_values;

  const bool has_validation = !data.validation.empty();

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    const std::uint64_t plan_seed = mix_seed(config.seed, 0x706c616eULL + epoch);
    const NeighborPlan plan =
        make_neighbor_plan(g, model.config.neighbor_cap, plan_seed);
    Rng neg_rng = base.fork(0x6e6567ULL + epoch);
    Rng drop_rng = base.fork(0x64726f70ULL + epoch);

    std::vector<Triplet> negatives;
    negatives.reserve(data.train.size());
    for (const Triplet& t : data.train) {
      negatives.push_back(sample_negative(t, g, positive_keys, neg_rng));
    }

    double train_loss = 0;
    if (config.batch_size <= 0 ||
        config.batch_size >= static_cast<int>(data.train.size())) {
      model.zero_grads();
      train_loss = run_epoch_loss(g, feats, model, config, data.train,
                                  negatives, plan, true, drop_rng, true);
      adam_step(trainable, adam, config.learning_rate, config.adam_beta1,
                config.adam_beta2, config.adam_eps);
    } else {
      // Mini-batching over triplets; the epoch loss is the sum of batch
      // losses (scores drift within the epoch as parameters update).
      Rng shuffle_rng = base.fork(0x73687566ULL + epoch);
      std::vector<std::size_t> order(data.train.size());
      std::iota(order.begin(), order.end(), 0);
      for (std::size_t i = order.size() - 1; i > 0; --i) {
        std::swap(order[i], order[shuffle_rng.below(i + 1)]);
      }
      for (std::size_t start = 0; start < order.size();
           start += config.batch_size) {
        const std::size_t stop =
            std::min(order.size(), start + config.batch_size);
        std::vector<Triplet> bpos, bneg;
        for (std::size_t i = start; i < stop; ++i) {
          bpos.push_back(data.train[order[i]]);
          bneg.push_back(negatives[order[i]]);
        }
        model.zero_grads();
        const double batch_loss = run_epoch_loss(
            g, feats, model, config, bpos, bneg, plan, true, drop_rng, true);
        if (!std::isfinite(batch_loss)) {
          throw Error("fit: non-finite loss at epoch " + std::to_string(epoch) +
                      ", batch " + std::to_string(start / config.batch_size) +
                      "; parameter norms: " + param_norms_summary(model));
        }
        train_loss += batch_loss;
        adam_step(trainable, adam, config.learning_rate, config.adam_beta1,
                  config.adam_beta2, config.adam_eps);
      }
    }

    if (!std::isfinite(train_loss)) {
      throw Error("fit: non-finite training loss at epoch " +
                  std::to_string(epoch) + "; parameter norms: " +
                  param_norms_summary(model));
    }
    report.train_loss.push_back(train_loss);

    double stop_signal = train_loss;
    if (has_validation) {
      Rng no_drop(0);  // eval mode; never consumed
      const double val_loss =
          run_epoch_loss(g, feats, model, config, data.validation,
                         val_negatives, val_plan, false, no_drop, false);
      if (!std::isfinite(val_loss)) {
        throw Error("fit: non-finite validation loss at epoch " +
                    std::to_string(epoch));
      }
      report.val_loss.push_back(val_loss);
      stop_signal = val_loss;
    }

    if (stop_signal < best_val) {
      best_val = stop_signal;
      best_epoch = epoch;
      since_best = 0;
      best_values.clear();
      for (Parameter* p : model.all_params()) best_values.push_back(p->value);
    } else {
      ++since_best;
    }
    report.epochs_run = epoch + 1;
    if (since_best >= config.patience) break;
  }

  // Restore the best snapshot.
  if (best_epoch >= 0) {
    const auto params = model.all_params();
    for (std::size_t i = 0; i < params.size(); ++i) {
      params[i]->value = best_values[i];
    }
  }
  report.best_epoch = best_epoch;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return report;
}

TrainReport fit(const HeteroGraph& g, const NodeFeatures& feats,
                HeTriNetModel& model, const TrainConfig& config) {
  const Split data = split(g.positives(), config, config.seed);
  return fit(g, feats, model, config, data);
}

}  // namespace hetrinet
