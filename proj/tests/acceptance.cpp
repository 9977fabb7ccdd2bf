// Acceptance suite: one binary, one pass/fail line per criterion.
// Exit status is nonzero when any gated criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "hetrinet/features.hpp"
#include "hetrinet/grad_check.hpp"
#include "hetrinet/kernels.hpp"
#include "hetrinet/pipeline.hpp"
#include "oracles.hpp"

using namespace hetrinet;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// --- criterion 1: end-to-end gradient correctness ---------------------------

Outcome gradient_correctness() {
  const auto t0 = std::chrono::steady_clock::now();

  ModelConfig cfg;
  cfg.hidden_dim = 4;
  cfg.heads = 2;
  cfg.layers = 2;
  cfg.dropout_rate = 0.0;
  cfg.neighbor_cap = 8;
  cfg.decoder_hidden_dims = {6};
  cfg.drug_input_dim = 3;
  cfg.target_input_dim = 3;
  cfg.disease_input_dim = 3;
  Rng init(41);
  HeTriNetModel model(cfg, init);
  // The fresh decoder output layer is zero by design; randomize it so the
  // loss actually depends on every parameter.
  Rng dec_rng(42);
  for (Parameter* p :
       {model.decoder.weights.back(), model.decoder.biases.back()}) {
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      p->value[i] = static_cast<real_t>(dec_rng.uniform(-0.5, 0.5));
    }
  }

  const HeteroGraph g = HeteroGraph::build({1, 1, 1}, {Triplet{0, 0, 0, 1}});
  NodeFeatures feats;
  feats.drugs = Tensor::from(1, 3, {0.4, -0.7, 1.1});
  feats.targets = Tensor::from(1, 3, {0.9, 0.2, -0.3});
  feats.diseases = Tensor::from(1, 3, {-0.5, 0.8, 0.6});
  const NeighborPlan plan = make_neighbor_plan(g, cfg.neighbor_cap, 1);
  const std::vector<Triplet> pos = {Triplet{0, 0, 0, 1}};

  auto forward = [&](Tape& t, ParamBinding& b) {
    Rng no_drop(0);
    const Var z = encode_on(t, b, model, g, feats, plan, false, no_drop);
    const Var score = decode_on(t, b, model, z, g, pos);
    // Negative log-likelihood of the single observed triplet.
    return t.scale(t.sum_all(t.log(t.clamp_min(score, 1e-12))), -1.0);
  };
  auto loss = [&]() {
    Tape t;
    ParamBinding b;
    return static_cast<double>(t.value(forward(t, b))[0]);
  };
  auto grads = [&]() {
    model.zero_grads();
    Tape t;
    ParamBinding b;
    const Var l = forward(t, b);
    t.backward(l);
    b.accumulate_grads(t);
  };
  const GradCheckReport rep =
      finite_diff_check(model.all_params(), loss, grads, 1e-5, 1e-4);
  const double elapsed = seconds_since(t0);

  Outcome out;
  out.pass = rep.passed && elapsed < 10.0;
  out.detail = "max rel err " + fmt(rep.max_rel_error) + " over " +
               std::to_string(rep.components) + " components (worst " +
               rep.worst_component + "), " + fmt(elapsed) + " s";
  return out;
}

// --- criterion 2: attention invariants --------------------------------------

Outcome attention_invariants() {
  Rng rng(1234);
  double worst_simplex = 0, worst_shift = 0, worst_perm = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int dk = 1 + static_cast<int>(rng.below(8));
    ModelConfig cfg;
    cfg.hidden_dim = dk;
    cfg.heads = 1;
    cfg.layers = 1;
    cfg.dropout_rate = 0.0;
    cfg.drug_input_dim = dk;
    cfg.target_input_dim = dk;
    cfg.disease_input_dim = dk;
    HeTriNetModel m(cfg, rng);
    for (Parameter* p : m.all_params()) {
      for (std::size_t i = 0; i < p->value.size(); ++i) {
        p->value[i] = static_cast<real_t>(rng.uniform(-1.5, 1.5));
      }
    }

    const int pairs_n = 1 + static_cast<int>(rng.below(24));
    Tensor center(1, dk);
    for (int c = 0; c < dk; ++c) {
      center[c] = static_cast<real_t>(rng.uniform(-2, 2));
    }
    std::vector<std::pair<Tensor, Tensor>> pairs;
    for (int p = 0; p < pairs_n; ++p) {
      Tensor j(1, dk), k(1, dk);
      for (int c = 0; c < dk; ++c) {
        j[c] = static_cast<real_t>(rng.uniform(-2, 2));
        k[c] = static_cast<real_t>(rng.uniform(-2, 2));
      }
      pairs.emplace_back(std::move(j), std::move(k));
    }

    const auto logits = attention_logits(center, pairs, m, 0, 0);
    const auto alpha = normalize_attention(logits);
    double sum = 0;
    for (const double a : alpha) {
      if (a < 0) return {false, "negative attention weight"};
      sum += a;
    }
    worst_simplex = std::max(worst_simplex, std::abs(sum - 1.0));

    auto shifted = logits;
    const double c = rng.uniform(-50, 50);
    for (double& v : shifted) v += c;
    const auto alpha2 = normalize_attention(shifted);
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      worst_shift = std::max(worst_shift, std::abs(alpha[i] - alpha2[i]));
    }

    // Permuting the pair list must not move the aggregated embedding.
    const Tensor base = aggregate(center, pairs, alpha, m, 0, 0);
    std::vector<std::size_t> perm(pairs.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    for (std::size_t i = perm.size() - 1; i > 0; --i) {
      std::swap(perm[i], perm[rng.below(i + 1)]);
    }
    std::vector<std::pair<Tensor, Tensor>> shuffled;
    std::vector<double> alpha_shuffled;
    for (const std::size_t i : perm) {
      shuffled.push_back(pairs[i]);
      alpha_shuffled.push_back(alpha[i]);
    }
    const Tensor permuted =
        aggregate(center, shuffled, alpha_shuffled, m, 0, 0);
    worst_perm =
        std::max(worst_perm, static_cast<double>(max_abs_diff(base, permuted)));
  }
  Outcome out;
  out.pass = worst_simplex <= 1e-9 && worst_shift <= 1e-9 && worst_perm < 1e-10;
  out.detail = "1000 centers: simplex " + fmt(worst_simplex) + ", shift " +
               fmt(worst_shift) + ", permutation " + fmt(worst_perm);
  return out;
}

// --- criterion 3: metric oracle equivalence ----------------------------------

Outcome metric_oracles() {
  Rng rng(77);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 10 + static_cast<int>(rng.below(190));
    std::vector<ScoredTriplet> scored;
    bool has_pos = false, has_neg = false;
    for (int i = 0; i < n; ++i) {
      ScoredTriplet s;
      s.truth = rng.bernoulli(0.35);
      s.score = trial % 2 == 0 ? std::round(rng.uniform() * 10.0) / 10.0
                               : rng.uniform();
      (s.truth ? has_pos : has_neg) = true;
      scored.push_back(s);
    }
    if (!has_pos) scored.front().truth = true;
    if (!has_neg) scored.back().truth = false;

    worst = std::max(worst,
                     std::abs(roc_auc(scored) - oracle::auc_by_pairs(scored)));
    worst =
        std::max(worst, std::abs(aupr(scored) - oracle::aupr_by_sweep(scored)));

    const auto c = oracle::count_confusion(scored, 0.5);
    const auto cm = classification_metrics(scored, 0.5);
    const double oprec =
        c.tp + c.fp > 0 ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
    const double orec =
        c.tp + c.fn > 0 ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
    const double of1 =
        oprec + orec > 0 ? 2 * oprec * orec / (oprec + orec) : 0.0;
    worst = std::max({worst, std::abs(cm.precision - oprec),
                      std::abs(cm.recall - orec), std::abs(cm.f1 - of1)});

    // Ranking metrics against the sort oracle.
    std::vector<RankedResult> ranked;
    std::vector<int> oracle_ranks;
    const int lists = 5 + static_cast<int>(rng.below(20));
    for (int l = 0; l < lists; ++l) {
      const double pos = std::round(rng.uniform() * 12.0) / 12.0;
      std::vector<double> negs;
      const int m = 1 + static_cast<int>(rng.below(30));
      for (int i = 0; i < m; ++i) {
        negs.push_back(std::round(rng.uniform() * 12.0) / 12.0);
      }
      oracle_ranks.push_back(oracle::rank_by_sort(pos, negs));
      ranked.push_back(rank_from_scores(pos, std::move(negs)));
    }
    for (int nn : {1, 3, 5, 10}) {
      worst = std::max(worst, std::abs(hit_at_n(ranked, nn) -
                                       oracle::hit_at(oracle_ranks, nn)));
      worst = std::max(worst, std::abs(ndcg_at_n(ranked, nn) -
                                       oracle::ndcg_at(oracle_ranks, nn)));
    }
  }

  const std::vector<ScoredTriplet> hand = {
      {{}, 0.9, true}, {{}, 0.8, false}, {{}, 0.7, true}, {{}, 0.1, false}};
  const bool hand_exact = roc_auc(hand) == 0.75;

  Outcome out;
  out.pass = worst <= 1e-12 && hand_exact;
  out.detail = "100 instances, worst deviation " + fmt(worst) +
               (hand_exact ? ", 4-point AUC exactly 0.75" : ", hand AUC WRONG");
  return out;
}

// --- criterion 4: synthetic learnability -------------------------------------

Outcome synthetic_learnability() {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path work = fs::temp_directory_path() / "hetrinet_acceptance_c4";
  fs::remove_all(work);

  RunConfig cfg;
  cfg.synth = SynthConfig{};  // 50x60x40, 2000 positives, noise 0.05, seed 7
  cfg.out_dir = (work / "data").string();
  run_synth(cfg);

  cfg.triplets_path = (work / "data" / "triplets.tsv").string();
  cfg.features_dir = (work / "data").string();
  cfg.out_dir = (work / "run").string();
  cfg.model.layers = 1;
  cfg.train.seed = 7;
  cfg.train.max_epochs = 500;
  cfg.train.patience = 150;
  cfg.train.repeats = 1;
  cfg.ranking_negatives = 100;

  // Untrained baseline: a fresh model scores everything 0.5.
  LoadedData data = load_data(cfg);
  ModelConfig mc = cfg.model;
  mc.drug_input_dim = data.features.drugs.cols();
  mc.target_input_dim = data.features.targets.cols();
  mc.disease_input_dim = data.features.diseases.cols();
  Rng fresh_rng(7);
  HeTriNetModel fresh(mc, fresh_rng);
  const std::string fresh_ckpt = (work / "fresh.json").string();
  save_checkpoint(fresh, fresh_ckpt);
  RunConfig fresh_cfg = cfg;
  fresh_cfg.out_dir = (work / "fresh_eval").string();
  const MetricsReport untrained = run_eval(fresh_cfg, fresh_ckpt);

  const TrainArtifacts artifacts = run_train(cfg);
  const MetricsReport trained = run_eval(cfg, artifacts.checkpoint_path);
  const double elapsed = seconds_since(t0);
  fs::remove_all(work);

  Outcome out;
  out.pass = trained.roc_auc >= 0.85 && trained.hit_at.at(15) >= 0.60 &&
             untrained.roc_auc <= 0.55 && elapsed < 300.0;
  out.detail = "trained auc " + fmt(trained.roc_auc) + " (need >= 0.85), hit@15 " +
               fmt(trained.hit_at.at(15)) + " (need >= 0.60); untrained auc " +
               fmt(untrained.roc_auc) + " (need <= 0.55); " + fmt(elapsed) +
               " s (need < 300)";
  return out;
}

// --- criterion 5: ablation harness -------------------------------------------

Outcome ablation_harness() {
  const fs::path work = fs::temp_directory_path() / "hetrinet_acceptance_c5";
  fs::remove_all(work);

  RunConfig cfg;
  cfg.synth.drugs = 25;
  cfg.synth.targets = 30;
  cfg.synth.diseases = 20;
  cfg.synth.positive_count = 500;
  cfg.synth.noise_flip_rate = 0.05;
  cfg.synth.seed = 7;
  cfg.synth.heldout_positives = 50;
  cfg.synth.heldout_negatives = 50;
  cfg.out_dir = (work / "data").string();
  run_synth(cfg);

  cfg.triplets_path = (work / "data" / "triplets.tsv").string();
  cfg.features_dir = (work / "data").string();
  cfg.model.hidden_dim = 32;
  cfg.model.heads = 4;
  cfg.model.layers = 1;
  cfg.model.neighbor_cap = 32;
  cfg.train.seed = 7;
  cfg.train.max_epochs = 120;
  cfg.train.patience = 120;
  cfg.train.repeats = 1;
  cfg.ranking_negatives = 50;

  cfg.out_dir = (work / "run_a").string();
  const AblationResult a = run_ablate(cfg);
  cfg.out_dir = (work / "run_b").string();
  const AblationResult b = run_ablate(cfg);

  const bool complete = a.rows.size() == 5 && b.rows.size() == 5;
  const bool deterministic = a.table == b.table;
  double best_gap = 0;
  for (std::size_t i = 1; i < a.rows.size(); ++i) {
    best_gap = std::max(best_gap,
                        a.rows[0].metrics.roc_auc - a.rows[i].metrics.roc_auc);
  }
  fs::remove_all(work);

  Outcome out;
  out.pass = complete && deterministic;
  out.detail = std::string("5 variants trained, table ") +
               (deterministic ? "identical across re-runs" : "DIVERGED") +
               "; largest full_nn auc lead " + fmt(best_gap) +
               " (reported, not gated)";
  return out;
}

// --- criterion 6: tokenizer determinism --------------------------------------

Outcome tokenizer_determinism() {
  Rng rng(2024);
  std::vector<std::string> corpus;
  const std::string alphabet = "CNOPSFclnops()[]=#@+-123456789%";
  for (int i = 0; i < 1000; ++i) {
    const int len = 8 + static_cast<int>(rng.below(56));
    std::string s;
    for (int j = 0; j < len; ++j) s += alphabet[rng.below(alphabet.size())];
    corpus.push_back(std::move(s));
  }
  const auto v1 = train_vocab(corpus, 12, 512);
  const auto v2 = train_vocab(corpus, 12, 512);
  const bool reproducible = vocab_to_string(v1) == vocab_to_string(v2);

  const auto ab = train_vocab({"ABAB", "ABAB"}, 2, 8);
  const bool ab_ok =
      ab.contains("AB") && ab.frequencies[ab.index.at("AB")] == 4;
  const auto xy = train_vocab({"XY"}, 3, 8);
  const bool xy_ok = xy.tokens == std::vector<std::string>{"X", "Y"};
  const auto aa = train_vocab({"AAAA"}, 2, 3);
  const bool aa_ok =
      aa.contains("AA") && aa.frequencies[aa.index.at("AA")] == 2;

  Outcome out;
  out.pass = reproducible && ab_ok && xy_ok && aa_ok;
  out.detail = std::string(reproducible ? "byte-identical across runs"
                                        : "NOT reproducible") +
               "; hand fixtures " +
               ((ab_ok && xy_ok && aa_ok) ? "match" : "FAIL") + " (" +
               std::to_string(v1.size()) + " tokens, " +
               std::to_string(v1.merges.size()) + " merges)";
  return out;
}

// --- criterion 8: pipeline determinism ---------------------------------------

Outcome pipeline_determinism() {
  auto one_run = [](const fs::path& work) {
    RunConfig cfg;
    cfg.synth.drugs = 20;
    cfg.synth.targets = 24;
    cfg.synth.diseases = 16;
    cfg.synth.positive_count = 400;
    cfg.synth.noise_flip_rate = 0.05;
    cfg.synth.seed = 7;
    cfg.out_dir = (work / "data").string();
    run_synth(cfg);
    cfg.triplets_path = (work / "data" / "triplets.tsv").string();
    cfg.features_dir = (work / "data").string();
    cfg.model.hidden_dim = 32;
    cfg.model.heads = 4;
    cfg.model.layers = 2;
    cfg.train.seed = 11;
    cfg.train.max_epochs = 40;
    cfg.train.patience = 40;
    cfg.train.repeats = 1;
    cfg.ranking_negatives = 50;
    cfg.out_dir = (work / "run").string();
    const TrainArtifacts artifacts = run_train(cfg);
    run_eval(cfg, artifacts.checkpoint_path);
    return read_text_file((work / "run" / "metrics.json").string());
  };
  const fs::path w1 = fs::temp_directory_path() / "hetrinet_acceptance_c8a";
  const fs::path w2 = fs::temp_directory_path() / "hetrinet_acceptance_c8b";
  fs::remove_all(w1);
  fs::remove_all(w2);
  const std::string m1 = one_run(w1);
  const std::string m2 = one_run(w2);
  fs::remove_all(w1);
  fs::remove_all(w2);

  Outcome out;
  out.pass = !m1.empty() && m1 == m2;
  out.detail = out.pass ? "metric JSON byte-identical across two full runs"
                        : "metric JSON differs between runs";
  return out;
}

}  // namespace

int main() {
  std::printf("kernel variant: %s\n\n", kernels::active_name().c_str());

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "gradient correctness (finite differences, 3-node toy)",
       gradient_correctness},
      {2, "attention invariants (simplex, shift, permutation)",
       attention_invariants},
      {3, "metric oracle equivalence", metric_oracles},
      {4, "synthetic learnability (planted rule)", synthetic_learnability},
      {5, "ablation harness (5 variants, deterministic table)",
       ablation_harness},
      {6, "tokenizer determinism", tokenizer_determinism},
      {8, "pipeline determinism (synth -> train -> eval twice)",
       pipeline_determinism},
  };

  bool all_pass = true;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %d: %s -- %s\n", o.pass ? "PASS" : "FAIL",
                c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && o.pass;
  }
  std::printf(
      "[SKIP] criterion 7: reported-table reproduction needs licensed "
      "DrugBank/CTD exports; the ingest format is documented in the README\n");
  std::printf("\n%s\n", all_pass ? "ALL ACCEPTANCE CRITERIA PASSED"
                                 : "ACCEPTANCE FAILURES PRESENT");
  return all_pass ? 0 : 1;
}
