#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "hetrinet/dataset.hpp"
#include "hetrinet/eval.hpp"
#include "hetrinet/model.hpp"
#include "hetrinet/synth.hpp"
#include "hetrinet/train.hpp"

namespace hetrinet {

/// Everything a pipeline invocation needs: model/train/synth settings, data
/// locations and evaluation parameters. Serialized verbatim into every run's
/// config snapshot so the run can be reproduced from the artifact alone.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  SynthConfig synth;

  std::string triplets_path;
  std::string drug_smiles_path;    // ESPF featurizer path
  std::string target_seqs_path;    // ESPF featurizer path
  std::string features_dir;        // numeric feature path (synth layout)

  std::string out_dir = "out";
  std::vector<int> cutoffs = {1, 3, 5, 10, 15};
  int ranking_negatives = 100;
  double threshold = 0.5;

  std::int64_t vocab_max = 2048;
  std::int64_t vocab_min_frequency = 0;  // 0: derive as 1% of the corpus

  void validate() const;
};

nlohmann::json run_config_to_json(const RunConfig& cfg);

/// Dataset plus assembled node features, ready for the model.
struct LoadedData {
  DatasetBundle bundle;
  NodeFeatures features;
};

LoadedData load_data(const RunConfig& cfg);

struct TrainArtifacts {
  TrainReport report;
  std::string checkpoint_path;
  std::string out_dir;
};

/// Splits the positives, builds the graph from the train and validation
/// shares only (test triplets stay out of the edge set), trains, and writes
/// config snapshot, train report and checkpoint under out_dir.
/// With train.repeats > 1, trains seeds base..base+repeats-1 in run_<i>/
/// subdirectories, evaluates each, and writes a mean/stddev summary.
TrainArtifacts run_train(const RunConfig& cfg);

/// Re-derives the split from the config seed, loads the checkpoint, scores
/// the test positives under the ranking protocol (ranking_negatives sampled
/// negatives per positive) and 1:1 sampled negatives for classification.
MetricsReport run_eval(const RunConfig& cfg, const std::string& checkpoint);

/// Scores query triplets (TSV rows resolved against the dataset registries)
/// with a frozen checkpoint; the graph uses every known positive edge.
std::vector<ScoredTriplet> run_predict(const RunConfig& cfg,
                                       const std::string& checkpoint,
                                       const std::string& queries_tsv);

struct AblationRow {
  PairMessageMode mode;
  MetricsReport metrics;
};

struct AblationResult {
  std::vector<AblationRow> rows;
  std::string table;  // aligned-column text, FullNN gap included
};

/// Trains and evaluates every pair-message mode with shared seeds and data.
AblationResult run_ablate(const RunConfig& cfg);

/// Generates the planted-rule dataset and writes triplets.tsv,
/// features_{drugs,targets,diseases}.tsv and heldout.tsv under out_dir.
SynthDataset run_synth(const RunConfig& cfg);

// JSON serializers for artifacts (schema-versioned, deterministic key order).
nlohmann::json train_report_to_json(const TrainReport& report);
nlohmann::json metrics_to_json(const MetricsReport& report);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace hetrinet
