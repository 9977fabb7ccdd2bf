#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "hetrinet/grad_check.hpp"
#include "hetrinet/synth.hpp"
#include "hetrinet/train.hpp"

using namespace hetrinet;

namespace {

std::vector<Triplet> numbered_triplets(int n) {
  std::vector<Triplet> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(Triplet{i, 0, 0, 1});
  }
  return out;
}

std::uint64_t key_of(const Triplet& t) {
  return (static_cast<std::uint64_t>(t.drug) << 42) |
         (static_cast<std::uint64_t>(t.target) << 21) |
         static_cast<std::uint64_t>(t.disease);
}

}  // namespace

TEST_CASE("split produces the documented 72/8/20 partition") {
  TrainConfig cfg;
  const Split s = split(numbered_triplets(100), cfg, 1);
  CHECK(s.train.size() == 72);
  CHECK(s.validation.size() == 8);
  CHECK(s.test.size() == 20);
}

TEST_CASE("split is deterministic and exhaustive") {
  TrainConfig cfg;
  const auto all = numbered_triplets(53);
  const Split a = split(all, cfg, 9);
  const Split b = split(all, cfg, 9);
  CHECK(a.train == b.train);
  CHECK(a.validation == b.validation);
  CHECK(a.test == b.test);

  std::set<std::uint64_t> seen;
  for (const auto* part : {&a.train, &a.validation, &a.test}) {
    for (const Triplet& t : *part) CHECK(seen.insert(key_of(t)).second);
  }
  CHECK(seen.size() == all.size());

  const Split c = split(all, cfg, 10);
  CHECK(a.train != c.train);  // different seed, different shuffle
}

TEST_CASE("split rejects tiny datasets") {
  TrainConfig cfg;
  CHECK_THROWS_AS(split(numbered_triplets(9), cfg, 1), InputError);
}

TEST_CASE("config validation rejects zero patience") {
  TrainConfig cfg;
  cfg.patience = 0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg.patience = cfg.max_epochs + 1;
  CHECK_THROWS_AS(cfg.validate(), InputError);
}

TEST_CASE("sample_negative corrupts exactly one slot") {
  const HeteroGraph g = HeteroGraph::build(
      {5, 5, 5}, {Triplet{0, 0, 0, 1}, Triplet{1, 1, 1, 1}});
  const PositiveKeySet keys = make_positive_key_set(g, g.positives());
  Rng rng(3);
  const Triplet pos{0, 0, 0, 1};
  for (int i = 0; i < 200; ++i) {
    const Triplet neg = sample_negative(pos, g, keys, rng);
    const int changed = (neg.drug != pos.drug) + (neg.target != pos.target) +
                        (neg.disease != pos.disease);
    CHECK(changed == 1);
    CHECK_FALSE(g.is_positive(neg.drug, neg.target, neg.disease));
  }
}

TEST_CASE("sample_negative fails cleanly when the space is exhausted") {
  const HeteroGraph g = HeteroGraph::build({1, 1, 1}, {Triplet{0, 0, 0, 1}});
  const PositiveKeySet keys = make_positive_key_set(g, g.positives());
  Rng rng(4);
  CHECK_THROWS_AS(sample_negative(Triplet{0, 0, 0, 1}, g, keys, rng), Error);
}

TEST_CASE("each slot is corrupted about a third of the time") {
  const HeteroGraph g = HeteroGraph::build({50, 50, 50}, {Triplet{0, 0, 0, 1}});
  const PositiveKeySet keys = make_positive_key_set(g, g.positives());
  Rng rng(5);
  const Triplet pos{0, 0, 0, 1};
  int counts[3] = {0, 0, 0};
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const Triplet neg = sample_negative(pos, g, keys, rng);
    if (neg.drug != pos.drug) ++counts[0];
    if (neg.target != pos.target) ++counts[1];
    if (neg.disease != pos.disease) ++counts[2];
  }
  // Rejected draws retry the slot choice too, so accepted corruptions are
  // uniform over the three slots.
  for (const int c : counts) {
    CHECK(std::abs(c / static_cast<double>(draws) - 1.0 / 3.0) < 0.02);
  }
}

TEST_CASE("margin loss closed forms") {
  CHECK(margin_loss({1.0}, {0.0}, 1.0) == doctest::Approx(0.0));
  CHECK(margin_loss({0.5}, {0.5}, 1.0) == doctest::Approx(1.0));
  CHECK(margin_loss({10.0}, {0.0}, 1.0) == doctest::Approx(0.0));
  CHECK(margin_loss({1.0, 0.5}, {0.0, 0.5}, 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(margin_loss({1.0}, {0.0, 0.5}, 1.0), InputError);
}

TEST_CASE("margin loss gradient is -1 per active pair and 0 when clear") {
  // Away from the hinge kink the gradient w.r.t. a positive score is -1 when
  // the pair violates the margin and 0 once it clears it.
  for (const double pos_score : {0.2, 1.8}) {
    Tape t;
    Parameter pos("pos", Tensor::column({static_cast<real_t>(pos_score)}));
    Parameter neg("neg", Tensor::column({0.5}));
    ParamBinding bind;
    const Var loss =
        margin_loss_on(t, bind.bind(t, pos), bind.bind(t, neg), 1.0);
    t.backward(loss);
    bind.accumulate_grads(t);
    const double expected = pos_score - 0.5 >= 1.0 ? 0.0 : -1.0;
    CHECK(static_cast<double>(pos.grad[0]) == doctest::Approx(expected));

    auto loss_fn = [&]() {
      return margin_loss({static_cast<double>(pos.value[0])},
                         {static_cast<double>(neg.value[0])}, 1.0);
    };
    auto grads_fn = [&]() {
      pos.zero_grad();
      neg.zero_grad();
      Tape t2;
      ParamBinding b2;
      const Var l = margin_loss_on(t2, b2.bind(t2, pos), b2.bind(t2, neg), 1.0);
      t2.backward(l);
      b2.accumulate_grads(t2);
    };
    const GradCheckReport rep =
        finite_diff_check({&pos, &neg}, loss_fn, grads_fn, 1e-5, 1e-4);
    CHECK(rep.passed);
  }
}

TEST_CASE("adam first step matches the hand unrolled update") {
  Parameter p("p", Tensor::row({1.0, -2.0}));
  p.grad = Tensor::row({0.5, -0.25});
  AdamState state;
  adam_step({&p}, state, 0.005, 0.9, 0.999, 1e-8);
  // t=1: mhat = g, vhat = g^2, step = lr * g / (|g| + eps).
  for (int i = 0; i < 2; ++i) {
    const double g = i == 0 ? 0.5 : -0.25;
    const double expected =
        (i == 0 ? 1.0 : -2.0) - 0.005 * g / (std::sqrt(g * g) + 1e-8);
    CHECK(static_cast<double>(p.value[i]) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("adam leaves parameters with zero gradient unchanged") {
  Parameter p("p", Tensor::row({3.0}));
  AdamState state;
  adam_step({&p}, state, 0.1, 0.9, 0.999, 1e-8);
  CHECK(static_cast<double>(p.value[0]) == doctest::Approx(3.0));
}

TEST_CASE("identical gradients update identically") {
  Parameter a("a", Tensor::row({1.0}));
  Parameter b("b", Tensor::row({1.0}));
  a.grad = Tensor::row({0.7});
  b.grad = Tensor::row({0.7});
  AdamState state;
  adam_step({&a, &b}, state, 0.01, 0.9, 0.999, 1e-8);
  CHECK(a.value[0] == b.value[0]);
}

TEST_CASE("xavier samples stay inside the bound, center on zero, reproduce") {
  const int rows = 60, cols = 40;
  const double bound = std::sqrt(6.0 / (rows + cols));
  Rng r1(8);
  const Tensor t = xavier_init(rows, cols, r1);
  double mean = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(std::abs(static_cast<double>(t[i])) <= bound);
    mean += static_cast<double>(t[i]);
  }
  mean /= static_cast<double>(t.size());
  const double sigma = bound / std::sqrt(3.0);
  CHECK(std::abs(mean) < 3.0 * sigma / std::sqrt(static_cast<double>(t.size())));

  Rng r2(8);
  CHECK(t == xavier_init(rows, cols, r2));
}

TEST_CASE("fit reduces the loss on a small planted dataset") {
  SynthConfig sc;
  sc.drugs = 10;
  sc.targets = 10;
  sc.diseases = 10;
  sc.positive_count = 60;
  sc.noise_flip_rate = 0.0;
  sc.heldout_positives = 0;
  sc.heldout_negatives = 0;
  sc.seed = 21;
  const SynthDataset ds = generate(sc);

  ModelConfig mc;
  mc.hidden_dim = 8;
  mc.heads = 2;
  mc.layers = 1;
  mc.dropout_rate = 0.0;
  mc.neighbor_cap = 16;
  mc.drug_input_dim = ds.features.drugs.cols();
  mc.target_input_dim = ds.features.targets.cols();
  mc.disease_input_dim = ds.features.diseases.cols();
  Rng init(99);
  HeTriNetModel model(mc, init);

  TrainConfig tc;
  tc.max_epochs = 50;
  tc.patience = 50;
  tc.repeats = 1;
  tc.seed = 5;
  const TrainReport report = fit(ds.graph, ds.features, model, tc);
  REQUIRE(report.train_loss.size() == 50);
  // Windowed minimum must decrease: the tail of training beats the head.
  const double head = *std::min_element(report.train_loss.begin(),
                                        report.train_loss.begin() + 10);
  const double tail = *std::min_element(report.train_loss.end() - 10,
                                        report.train_loss.end());
  CHECK(tail < head);
}

TEST_CASE("fit is bit-identical for a fixed seed") {
  SynthConfig sc;
  sc.drugs = 8;
  sc.targets = 8;
  sc.diseases = 8;
  sc.positive_count = 30;
  sc.heldout_positives = 0;
  sc.heldout_negatives = 0;
  sc.seed = 22;
  const SynthDataset ds = generate(sc);

  auto run = [&]() {
    ModelConfig mc;
    mc.hidden_dim = 8;
    mc.heads = 2;
    mc.layers = 2;
    mc.dropout_rate = 0.2;
    mc.neighbor_cap = 8;
    mc.drug_input_dim = ds.features.drugs.cols();
    mc.target_input_dim = ds.features.targets.cols();
    mc.disease_input_dim = ds.features.diseases.cols();
    Rng init(7);
    HeTriNetModel model(mc, init);
    TrainConfig tc;
    tc.max_epochs = 12;
    tc.patience = 12;
    tc.repeats = 1;
    tc.seed = 77;
    return fit(ds.graph, ds.features, model, tc);
  };
  const TrainReport a = run();
  const TrainReport b = run();
  CHECK(a.train_loss == b.train_loss);
  CHECK(a.val_loss == b.val_loss);
  CHECK(a.best_epoch == b.best_epoch);
}

TEST_CASE("early stopping restores the best validation checkpoint") {
  SynthConfig sc;
  sc.drugs = 10;
  sc.targets = 10;
  sc.diseases = 10;
  sc.positive_count = 50;
  sc.heldout_positives = 0;
  sc.heldout_negatives = 0;
  sc.seed = 23;
  const SynthDataset ds = generate(sc);

  ModelConfig mc;
  mc.hidden_dim = 4;
  mc.heads = 1;
  mc.layers = 1;
  mc.dropout_rate = 0.3;  // noisy training loss helps exercise the restore
  mc.neighbor_cap = 8;
  mc.drug_input_dim = ds.features.drugs.cols();
  mc.target_input_dim = ds.features.targets.cols();
  mc.disease_input_dim = ds.features.diseases.cols();
  Rng init(11);
  HeTriNetModel model(mc, init);
  TrainConfig tc;
  tc.max_epochs = 40;
  tc.patience = 10;
  tc.repeats = 1;
  tc.seed = 55;
  const TrainReport report = fit(ds.graph, ds.features, model, tc);
  REQUIRE(report.best_epoch >= 0);
  REQUIRE_FALSE(report.val_loss.empty());
  const double best = report.val_loss[report.best_epoch];
  for (const double v : report.val_loss) CHECK(best <= v + 1e-15);
  // Stopped within patience epochs of the best.
  CHECK(report.epochs_run - 1 - report.best_epoch <= tc.patience);
}

TEST_CASE("bce loss mode trains too and rejects nothing valid") {
  SynthConfig sc;
  sc.drugs = 8;
  sc.targets = 8;
  sc.diseases = 8;
  sc.positive_count = 30;
  sc.heldout_positives = 0;
  sc.heldout_negatives = 0;
  sc.seed = 24;
  const SynthDataset ds = generate(sc);
  ModelConfig mc;
  mc.hidden_dim = 4;
  mc.heads = 1;
  mc.layers = 1;
  mc.dropout_rate = 0.0;
  mc.neighbor_cap = 8;
  mc.drug_input_dim = ds.features.drugs.cols();
  mc.target_input_dim = ds.features.targets.cols();
  mc.disease_input_dim = ds.features.diseases.cols();
  Rng init(12);
  HeTriNetModel model(mc, init);
  TrainConfig tc;
  tc.max_epochs = 8;
  tc.patience = 8;
  tc.repeats = 1;
  tc.loss_mode = LossMode::BinaryCrossEntropy;
  tc.seed = 3;
  const TrainReport report = fit(ds.graph, ds.features, model, tc);
  CHECK(report.epochs_run == 8);
  for (const double l : report.train_loss) CHECK(std::isfinite(l));
}
