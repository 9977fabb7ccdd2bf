#include "hetrinet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "hetrinet/features.hpp"

namespace hetrinet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kInitStream = 0x696e6974ULL;      // "init"
constexpr std::uint64_t kEvalPlanStream = 0x65706c6eULL;  // "epln"
constexpr std::uint64_t kRankNegStream = 0x726e6567ULL;   // "rneg"
constexpr std::uint64_t kClsNegStream = 0x636e6567ULL;    // "cneg"

}  // namespace

void RunConfig::validate() const {
  if (cutoffs.empty()) throw InputError("config: cutoffs must not be empty");
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    if (cutoffs[i] < 1) throw InputError("config: cutoffs must be positive");
    if (i > 0 && cutoffs[i] <= cutoffs[i - 1]) {
      throw InputError("config: cutoffs must be strictly increasing");
    }
  }
  if (ranking_negatives < 1) {
    throw InputError("config: ranking_negatives must be >= 1");
  }
  if (threshold <= 0 || threshold >= 1) {
    throw InputError("config: threshold must be in (0,1)");
  }
  if (vocab_max < 1) throw InputError("config: vocab_max must be >= 1");
  if (vocab_min_frequency < 0) {
    throw InputError("config: vocab_min_frequency must be >= 0");
  }
  train.validate();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path + " for writing");
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  return content;
}

namespace {

json train_config_to_json(const TrainConfig& cfg) {
  json j;
  j["learning_rate"] = cfg.learning_rate;
  j["max_epochs"] = cfg.max_epochs;
  j["patience"] = cfg.patience;
  j["batch_size"] = cfg.batch_size;
  j["train_fraction"] = cfg.train_fraction;
  j["validation_fraction_of_train"] = cfg.validation_fraction_of_train;
  j["margin"] = cfg.margin;
  j["loss_mode"] = to_string(cfg.loss_mode);
  j["seed"] = cfg.seed;
  j["repeats"] = cfg.repeats;
  j["adam_beta1"] = cfg.adam_beta1;
  j["adam_beta2"] = cfg.adam_beta2;
  j["adam_eps"] = cfg.adam_eps;
  return j;
}

json synth_config_to_json(const SynthConfig& cfg) {
  json j;
  j["drugs"] = cfg.drugs;
  j["targets"] = cfg.targets;
  j["diseases"] = cfg.diseases;
  j["latent_dim"] = cfg.latent_dim;
  j["positive_count"] = cfg.positive_count;
  j["noise_flip_rate"] = cfg.noise_flip_rate;
  j["raw_feature_dim"] = cfg.raw_feature_dim;
  j["seed"] = cfg.seed;
  j["heldout_positives"] = cfg.heldout_positives;
  j["heldout_negatives"] = cfg.heldout_negatives;
  return j;
}

}  // namespace

json run_config_to_json(const RunConfig& cfg) {
  json j;
  j["schema"] = "hetrinet.run_config";
  j["version"] = 1;
  j["model"] = model_config_to_json(cfg.model);
  j["train"] = train_config_to_json(cfg.train);
  j["synth"] = synth_config_to_json(cfg.synth);
  j["triplets_path"] = cfg.triplets_path;
  j["drug_smiles_path"] = cfg.drug_smiles_path;
  j["target_seqs_path"] = cfg.target_seqs_path;
  j["features_dir"] = cfg.features_dir;
  j["out_dir"] = cfg.out_dir;
  j["cutoffs"] = cfg.cutoffs;
  j["ranking_negatives"] = cfg.ranking_negatives;
  j["threshold"] = cfg.threshold;
  j["vocab_max"] = cfg.vocab_max;
  j["vocab_min_frequency"] = cfg.vocab_min_frequency;
  return j;
}

json train_report_to_json(const TrainReport& report) {
  json j;
  j["schema"] = "hetrinet.train_report";
  j["version"] = 1;
  j["best_epoch"] = report.best_epoch;
  j["epochs_run"] = report.epochs_run;
  j["wall_seconds"] = report.wall_seconds;
  j["train_loss"] = report.train_loss;
  j["val_loss"] = report.val_loss;
  j["checkpoint"] = report.checkpoint_ref;
  return j;
}

json metrics_to_json(const MetricsReport& report) {
  json j;
  j["schema"] = "hetrinet.metrics";
  j["version"] = 1;
  j["threshold"] = report.threshold;
  j["f1"] = report.f1;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["roc_auc"] = report.roc_auc;
  j["aupr"] = report.aupr;
  json hit = json::object();
  for (const auto& [n, v] : report.hit_at) hit[std::to_string(n)] = v;
  json ndcg = json::object();
  for (const auto& [n, v] : report.ndcg_at) ndcg[std::to_string(n)] = v;
  j["hit_at"] = std::move(hit);
  j["ndcg_at"] = std::move(ndcg);
  j["degenerate_classification"] = report.degenerate_classification;
  j["ranked_positives"] = report.ranked_positives;
  j["negatives_per_positive"] = report.negatives_per_positive;
  j["classified"] = report.classified;
  return j;
}

LoadedData load_data(const RunConfig& cfg) {
  if (cfg.triplets_path.empty()) {
    throw InputError("load_data: no triplet file configured");
  }
  LoadedData out;
  out.bundle = ingest(cfg.triplets_path, cfg.drug_smiles_path,
                      cfg.target_seqs_path);

  if (!cfg.features_dir.empty()) {
    attach_numeric_features(out.bundle, cfg.features_dir + "/features_drugs.tsv",
                            cfg.features_dir + "/features_targets.tsv",
                            cfg.features_dir + "/features_diseases.tsv");
    out.features.drugs = out.bundle.drug_features;
    out.features.targets = out.bundle.target_features;
    out.features.diseases = out.bundle.disease_features;
    return out;
  }

  // Substructure featurization: learned vocabularies per modality, one-hot
  // diseases.
  auto corpus_of = [](const std::vector<std::string>& payloads) {
    std::vector<std::string> corpus;
    for (const std::string& s : payloads) {
      if (!s.empty()) corpus.push_back(s);
    }
    return corpus;
  };
  auto derive_min_freq = [&](std::size_t corpus_size) -> std::int64_t {
    if (cfg.vocab_min_frequency > 0) return cfg.vocab_min_frequency;
    return std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(0.01 * corpus_size)));
  };
  auto featurize = [&](const std::vector<std::string>& payloads,
                       const char* kind) {
    const std::vector<std::string> corpus = corpus_of(payloads);
    if (corpus.empty()) {
      throw InputError(std::string("load_data: no ") + kind +
                       " payloads; supply the table or numeric features");
    }
    const SubstructureVocab vocab =
        train_vocab(corpus, derive_min_freq(corpus.size()), cfg.vocab_max);
    Tensor feats(static_cast<int>(payloads.size()), vocab.size());
    for (std::size_t r = 0; r < payloads.size(); ++r) {
      if (payloads[r].empty()) continue;  // zero row for missing payloads
      const FeatureVector fv = encode(payloads[r], vocab);
      for (int c = 0; c < vocab.size(); ++c) {
        feats.at(static_cast<int>(r), c) = fv.values[c];
      }
    }
    return feats;
  };
  out.features.drugs = featurize(out.bundle.drug_smiles, "drug SMILES");
  out.features.targets = featurize(out.bundle.target_seqs, "target sequence");
  out.features.diseases =
      Tensor::identity(static_cast<int>(out.bundle.disease_ids.size()));
  return out;
}

namespace {

std::vector<double> score_triplets(HeTriNetModel& model, const HeteroGraph& g,
                                   const Tensor& embeddings,
                                   const std::vector<Triplet>& batch) {
  std::vector<double> out;
  out.reserve(batch.size());
  constexpr std::size_t kChunk = 8192;
  for (std::size_t start = 0; start < batch.size(); start += kChunk) {
    const std::size_t stop = std::min(batch.size(), start + kChunk);
    const std::vector<Triplet> chunk(batch.begin() + start,
                                     batch.begin() + stop);
    Tape t;
    ParamBinding bind;
    const Var e = t.leaf(embeddings);
    const Var s = decode_on(t, bind, model, e, g, chunk);
    const Tensor& scores = t.value(s);
    for (std::size_t i = 0; i < scores.size(); ++i) {
      out.push_back(static_cast<double>(scores[i]));
    }
  }
  return out;
}

/// Shared evaluation protocol: each test positive is ranked against
/// `ranking_negatives` one-slot corruptions, and classification metrics use
/// 1:1 sampled negatives. All sampling excludes every known positive.
MetricsReport evaluate_model(HeTriNetModel& model, const HeteroGraph& g,
                             const NodeFeatures& feats,
                             const std::vector<Triplet>& all_positives,
                             const std::vector<Triplet>& test,
                             const RunConfig& cfg) {
  if (test.empty()) throw InputError("eval: empty test split");
  const PositiveKeySet keys = make_positive_key_set(g, all_positives);

  const NeighborPlan plan = make_neighbor_plan(
      g, model.config.neighbor_cap, mix_seed(cfg.train.seed, kEvalPlanStream));
  Tensor embeddings;
  {
    Tape t;
    ParamBinding bind;
    Rng no_drop(0);
    const Var z = encode_on(t, bind, model, g, feats, plan, false, no_drop);
    embeddings = t.value(z);
  }

  // Ranking protocol.
  Rng rank_rng(mix_seed(cfg.train.seed, kRankNegStream));
  std::vector<Triplet> candidates;
  candidates.reserve(test.size() * (1 + cfg.ranking_negatives));
  for (const Triplet& pos : test) {
    candidates.push_back(pos);
    for (int i = 0; i < cfg.ranking_negatives; ++i) {
      candidates.push_back(sample_negative(pos, g, keys, rank_rng));
    }
  }
  const std::vector<double> cand_scores =
      score_triplets(model, g, embeddings, candidates);
  std::vector<RankedResult> ranked;
  ranked.reserve(test.size());
  std::size_t c = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const double pos_score = cand_scores[c++];
    std::vector<double> negs(cand_scores.begin() + c,
                             cand_scores.begin() + c + cfg.ranking_negatives);
    c += cfg.ranking_negatives;
    ranked.push_back(rank_from_scores(pos_score, std::move(negs)));
  }

  // Classification protocol: 1:1 negatives.
  Rng cls_rng(mix_seed(cfg.train.seed, kClsNegStream));
  std::vector<Triplet> cls_negatives;
  cls_negatives.reserve(test.size());
  for (const Triplet& pos : test) {
    cls_negatives.push_back(sample_negative(pos, g, keys, cls_rng));
  }
  const std::vector<double> pos_scores =
      score_triplets(model, g, embeddings, test);
  const std::vector<double> neg_scores =
      score_triplets(model, g, embeddings, cls_negatives);
  std::vector<ScoredTriplet> scored;
  scored.reserve(2 * test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    scored.push_back({test[i], pos_scores[i], true});
    scored.push_back({cls_negatives[i], neg_scores[i], false});
  }

  return compute_metrics(scored, ranked, cfg.cutoffs, cfg.threshold);
}

struct PreparedRun {
  LoadedData data;
  Split parts;
  HeteroGraph graph;
};

PreparedRun prepare(const RunConfig& cfg) {
  PreparedRun run;
  run.data = load_data(cfg);
  const std::vector<Triplet> positives = run.data.bundle.positives();
  run.parts = split(positives, cfg.train, cfg.train.seed);
  // The graph carries train and validation edges only; test triplets stay
  // unseen until evaluation.
  std::vector<Triplet> edge_triplets = run.parts.train;
  edge_triplets.insert(edge_triplets.end(), run.parts.validation.begin(),
                       run.parts.validation.end());
  run.graph = HeteroGraph::build(run.data.bundle.dims(), edge_triplets);
  return run;
}

ModelConfig config_with_dims(const RunConfig& cfg, const NodeFeatures& feats) {
  ModelConfig mc = cfg.model;
  mc.drug_input_dim = feats.drugs.cols();
  mc.target_input_dim = feats.targets.cols();
  mc.disease_input_dim = feats.diseases.cols();
  return mc;
}

void check_checkpoint_compatible(const HeTriNetModel& model,
                                 const NodeFeatures& feats) {
  auto mismatch = [](const char* field, int have, int want) {
    throw InputError(std::string("checkpoint/config mismatch: ") + field +
                     " is " + std::to_string(want) +
                     " in the checkpoint but the data provides " +
                     std::to_string(have));
  };
  if (feats.drugs.cols() != model.config.drug_input_dim) {
    mismatch("drug_input_dim", feats.drugs.cols(), model.config.drug_input_dim);
  }
  if (feats.targets.cols() != model.config.target_input_dim) {
    mismatch("target_input_dim", feats.targets.cols(),
             model.config.target_input_dim);
  }
  if (feats.diseases.cols() != model.config.disease_input_dim) {
    mismatch("disease_input_dim", feats.diseases.cols(),
             model.config.disease_input_dim);
  }
}

json summarize_metric(const std::vector<double>& values) {
  double mean = 0;
  for (const double v : values) mean += v;
  mean /= values.size();
  double var = 0;
  for (const double v : values) var += (v - mean) * (v - mean);
  const double stddev =
      values.size() > 1 ? std::sqrt(var / (values.size() - 1)) : 0.0;
  json j;
  j["mean"] = mean;
  j["std"] = stddev;
  return j;
}

}  // namespace

TrainArtifacts run_train(const RunConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.out_dir);

  if (cfg.train.repeats > 1) {
    // Repeat protocol: seeds base..base+r-1, one run per subdirectory, then
    // a mean/stddev summary over the per-run metrics.
    std::vector<MetricsReport> reports;
    TrainArtifacts last;
    for (int r = 0; r < cfg.train.repeats; ++r) {
      RunConfig sub = cfg;
      sub.train.repeats = 1;
      sub.train.seed = cfg.train.seed + static_cast<std::uint64_t>(r);
      sub.out_dir = cfg.out_dir + "/run_" + std::to_string(r);
      last = run_train(sub);
      reports.push_back(run_eval(sub, last.checkpoint_path));
    }
    json summary;
    summary["schema"] = "hetrinet.metrics_summary";
    summary["version"] = 1;
    summary["repeats"] = cfg.train.repeats;
    summary["base_seed"] = cfg.train.seed;
    auto collect = [&](auto getter) {
      std::vector<double> vals;
      for (const MetricsReport& m : reports) vals.push_back(getter(m));
      return summarize_metric(vals);
    };
    summary["f1"] = collect([](const MetricsReport& m) { return m.f1; });
    summary["precision"] =
        collect([](const MetricsReport& m) { return m.precision; });
    summary["recall"] = collect([](const MetricsReport& m) { return m.recall; });
    summary["roc_auc"] =
        collect([](const MetricsReport& m) { return m.roc_auc; });
    summary["aupr"] = collect([](const MetricsReport& m) { return m.aupr; });
    json hit = json::object();
    json ndcg = json::object();
    for (const int n : cfg.cutoffs) {
      hit[std::to_string(n)] =
          collect([n](const MetricsReport& m) { return m.hit_at.at(n); });
      ndcg[std::to_string(n)] =
          collect([n](const MetricsReport& m) { return m.ndcg_at.at(n); });
    }
    summary["hit_at"] = std::move(hit);
    summary["ndcg_at"] = std::move(ndcg);
    write_text_file(cfg.out_dir + "/metrics_summary.json", summary.dump(2) + "\n");
    write_text_file(cfg.out_dir + "/config.json",
                    run_config_to_json(cfg).dump(2) + "\n");
    return last;
  }

  PreparedRun run = prepare(cfg);
  Rng init_rng(mix_seed(cfg.train.seed, kInitStream));
  HeTriNetModel model(config_with_dims(cfg, run.data.features), init_rng);

  TrainReport report =
      fit(run.graph, run.data.features, model, cfg.train, run.parts);

  TrainArtifacts artifacts;
  artifacts.out_dir = cfg.out_dir;
  artifacts.checkpoint_path = cfg.out_dir + "/checkpoint.json";
  report.checkpoint_ref = artifacts.checkpoint_path;
  artifacts.report = report;

  RunConfig snapshot = cfg;
  snapshot.model = model.config;  // includes resolved input dims
  write_text_file(cfg.out_dir + "/config.json",
                  run_config_to_json(snapshot).dump(2) + "\n");
  save_checkpoint(model, artifacts.checkpoint_path);
  write_text_file(cfg.out_dir + "/train_report.json",
                  train_report_to_json(report).dump(2) + "\n");
  return artifacts;
}

MetricsReport run_eval(const RunConfig& cfg, const std::string& checkpoint) {
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  PreparedRun run = prepare(cfg);
  HeTriNetModel model = load_checkpoint(checkpoint);
  check_checkpoint_compatible(model, run.data.features);

  const MetricsReport report =
      evaluate_model(model, run.graph, run.data.features,
                     run.data.bundle.positives(), run.parts.test, cfg);
  write_text_file(cfg.out_dir + "/metrics.json",
                  metrics_to_json(report).dump(2) + "\n");
  write_text_file(cfg.out_dir + "/metrics.txt", metrics_to_table(report));
  return report;
}

std::vector<ScoredTriplet> run_predict(const RunConfig& cfg,
                                       const std::string& checkpoint,
                                       const std::string& queries_tsv) {
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  LoadedData data = load_data(cfg);
  HeTriNetModel model = load_checkpoint(checkpoint);
  check_checkpoint_compatible(model, data.features);

  // Prediction uses every known positive edge.
  const HeteroGraph graph =
      HeteroGraph::build(data.bundle.dims(), data.bundle.positives());

  std::vector<Triplet> queries;
  std::vector<bool> truths;
  {
    std::ifstream in(queries_tsv);
    if (!in) throw InputError("cannot open " + queries_tsv);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      std::vector<std::string> cols;
      std::size_t start = 0;
      while (true) {
        const std::size_t pos = line.find('\t', start);
        if (pos == std::string::npos) {
          cols.push_back(line.substr(start));
          break;
        }
        cols.push_back(line.substr(start, pos - start));
        start = pos + 1;
      }
      if (cols.size() != 3 && cols.size() != 4) {
        throw InputError(queries_tsv + ":" + std::to_string(line_no) +
                         ": expected 3 or 4 columns");
      }
      auto resolve = [&](const std::unordered_map<std::string, std::int32_t>& idx,
                         const std::string& id, const char* kind) {
        const auto it = idx.find(id);
        if (it == idx.end()) {
          throw InputError(queries_tsv + ":" + std::to_string(line_no) +
                           ": unknown " + kind + " id '" + id + "'");
        }
        return it->second;
      };
      Triplet t;
      t.drug = resolve(data.bundle.drug_index, cols[0], "drug");
      t.target = resolve(data.bundle.target_index, cols[1], "target");
      t.disease = resolve(data.bundle.disease_index, cols[2], "disease");
      queries.push_back(t);
      truths.push_back(cols.size() == 4 && cols[3] == "1");
    }
  }
  if (queries.empty()) throw InputError("predict: no query triplets");

  const NeighborPlan plan = make_neighbor_plan(
      graph, model.config.neighbor_cap, mix_seed(cfg.train.seed, kEvalPlanStream));
  Tensor embeddings;
  {
    Tape t;
    ParamBinding bind;
    Rng no_drop(0);
    const Var z =
        encode_on(t, bind, model, graph, data.features, plan, false, no_drop);
    embeddings = t.value(z);
  }
  const std::vector<double> scores =
      score_triplets(model, graph, embeddings, queries);

  std::vector<ScoredTriplet> out;
  std::string tsv = "# drug\ttarget\tdisease\tscore\n";
  for (std::size_t i = 0; i < queries.size(); ++i) {
    out.push_back({queries[i], scores[i], truths[i]});
    tsv += data.bundle.drug_ids[queries[i].drug] + "\t" +
           data.bundle.target_ids[queries[i].target] + "\t" +
           data.bundle.disease_ids[queries[i].disease] + "\t" +
           std::to_string(scores[i]) + "\n";
  }
  write_text_file(cfg.out_dir + "/predictions.tsv", tsv);
  return out;
}

AblationResult run_ablate(const RunConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  PreparedRun run = prepare(cfg);

  constexpr PairMessageMode kModes[] = {
      PairMessageMode::FullNN, PairMessageMode::Sum, PairMessageMode::Concat,
      PairMessageMode::ElemProd, PairMessageMode::Trans};

  AblationResult result;
  for (const PairMessageMode mode : kModes) {
    RunConfig sub = cfg;
    sub.model.pair_message_mode = mode;
    sub.train.repeats = 1;
    Rng init_rng(mix_seed(cfg.train.seed, kInitStream));
    HeTriNetModel model(config_with_dims(sub, run.data.features), init_rng);
    fit(run.graph, run.data.features, model, sub.train, run.parts);
    const MetricsReport metrics =
        evaluate_model(model, run.graph, run.data.features,
                       run.data.bundle.positives(), run.parts.test, sub);
    result.rows.push_back({mode, metrics});
  }

  const MetricsReport& full = result.rows.front().metrics;
  const int top_n = cfg.cutoffs.back();
  std::string table;
  char line[256];
  std::snprintf(line, sizeof(line), "%-10s %8s %8s %8s %8s %8s %10s %10s\n",
                "mode", "f1", "roc_auc", "aupr",
                ("hit@" + std::to_string(top_n)).c_str(),
                ("ndcg@" + std::to_string(top_n)).c_str(), "d_f1", "d_auc");
  table += line;
  for (const AblationRow& row : result.rows) {
    const MetricsReport& m = row.metrics;
    std::snprintf(line, sizeof(line),
                  "%-10s %8.4f %8.4f %8.4f %8.4f %8.4f %+10.4f %+10.4f\n",
                  to_string(row.mode), m.f1, m.roc_auc, m.aupr,
                  m.hit_at.at(top_n), m.ndcg_at.at(top_n), m.f1 - full.f1,
                  m.roc_auc - full.roc_auc);
    table += line;
  }
  result.table = table;

  json j;
  j["schema"] = "hetrinet.ablation";
  j["version"] = 1;
  json rows = json::array();
  for (const AblationRow& row : result.rows) {
    json r;
    r["mode"] = to_string(row.mode);
    r["metrics"] = metrics_to_json(row.metrics);
    r["f1_gap_vs_full_nn"] = row.metrics.f1 - full.f1;
    r["roc_auc_gap_vs_full_nn"] = row.metrics.roc_auc - full.roc_auc;
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  write_text_file(cfg.out_dir + "/ablation.json", j.dump(2) + "\n");
  write_text_file(cfg.out_dir + "/ablation.txt", table);
  return result;
}

SynthDataset run_synth(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  SynthDataset ds = generate(cfg.synth);

  std::vector<std::string> drug_ids, target_ids, disease_ids;
  for (std::int32_t i = 0; i < cfg.synth.drugs; ++i) {
    drug_ids.push_back("D" + std::to_string(i));
  }
  for (std::int32_t i = 0; i < cfg.synth.targets; ++i) {
    target_ids.push_back("T" + std::to_string(i));
  }
  for (std::int32_t i = 0; i < cfg.synth.diseases; ++i) {
    disease_ids.push_back("S" + std::to_string(i));
  }

  write_triplets_tsv(cfg.out_dir + "/triplets.tsv", drug_ids, target_ids,
                     disease_ids, ds.positives);
  std::vector<Triplet> heldout_rows;
  for (const ScoredTriplet& st : ds.heldout) {
    Triplet t = st.triplet;
    t.label = st.truth ? 1 : 0;
    heldout_rows.push_back(t);
  }
  write_triplets_tsv(cfg.out_dir + "/heldout.tsv", drug_ids, target_ids,
                     disease_ids, heldout_rows);
  write_features_tsv(cfg.out_dir + "/features_drugs.tsv", drug_ids,
                     ds.features.drugs);
  write_features_tsv(cfg.out_dir + "/features_targets.tsv", target_ids,
                     ds.features.targets);
  write_features_tsv(cfg.out_dir + "/features_diseases.tsv", disease_ids,
                     ds.features.diseases);
  write_text_file(cfg.out_dir + "/synth_config.json",
                  synth_config_to_json(cfg.synth).dump(2) + "\n");
  return ds;
}

}  // namespace hetrinet
