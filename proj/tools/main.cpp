// hetrinet command line: dataset ingestion, featurization, training,
// evaluation, prediction, ablation and synthetic benchmark generation.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "hetrinet/dataset.hpp"
#include "hetrinet/features.hpp"
#include "hetrinet/kernels.hpp"
#include "hetrinet/pipeline.hpp"

namespace {

using namespace hetrinet;

struct CliOptions {
  RunConfig run;
  std::string activation = "relu";
  std::string pair_mode = "full_nn";
  std::string loss_mode = "margin_ranking";
  std::string kernels = "auto";
  std::string checkpoint;
  std::string queries;
  std::string corpus;        // featurize input
  std::string vocab_out;     // featurize output
  std::string encoded_out;   // featurize optional encoding output
};

void add_data_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--triplets", opt.run.triplets_path,
                  "Triplet TSV: drug<TAB>target<TAB>disease<TAB>label");
  cmd->add_option("--drug-smiles", opt.run.drug_smiles_path,
                  "Drug table TSV: drug<TAB>SMILES");
  cmd->add_option("--target-seqs", opt.run.target_seqs_path,
                  "Target table TSV: target<TAB>sequence");
  cmd->add_option("--features-dir", opt.run.features_dir,
                  "Directory with features_{drugs,targets,diseases}.tsv "
                  "(numeric feature path, as written by `synth`)");
}

void add_model_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--hidden-dim", opt.run.model.hidden_dim, "Embedding size d");
  cmd->add_option("--heads", opt.run.model.heads, "Attention heads K");
  cmd->add_option("--layers", opt.run.model.layers, "Message passing layers L");
  cmd->add_option("--leaky-slope", opt.run.model.leaky_slope,
                  "LeakyReLU slope");
  cmd->add_option("--dropout", opt.run.model.dropout_rate, "Dropout rate");
  cmd->add_option("--activation", opt.activation, "relu|elu|leaky_relu");
  cmd->add_option("--pair-mode", opt.pair_mode,
                  "full_nn|sum|concat|elem_prod|trans");
  cmd->add_option("--decoder-dims", opt.run.model.decoder_hidden_dims,
                  "Decoder hidden layer sizes");
  cmd->add_option("--neighbor-cap", opt.run.model.neighbor_cap,
                  "Max neighbor pairs per center per epoch");
}

void add_train_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--lr", opt.run.train.learning_rate, "Adam learning rate");
  cmd->add_option("--epochs", opt.run.train.max_epochs, "Epoch budget");
  cmd->add_option("--patience", opt.run.train.patience,
                  "Early stopping patience (epochs)");
  cmd->add_option("--batch-size", opt.run.train.batch_size,
                  "Mini-batch size over triplets (0 = full batch)");
  cmd->add_option("--train-frac", opt.run.train.train_fraction,
                  "Train share of the data");
  cmd->add_option("--val-frac", opt.run.train.validation_fraction_of_train,
                  "Validation share of the train split");
  cmd->add_option("--margin", opt.run.train.margin, "Ranking margin");
  cmd->add_option("--loss", opt.loss_mode,
                  "margin_ranking|binary_cross_entropy");
  cmd->add_option("--seed", opt.run.train.seed, "Base seed");
  cmd->add_option("--repeats", opt.run.train.repeats,
                  "Independent runs with seeds seed..seed+n-1");
}

void add_eval_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--cutoffs", opt.run.cutoffs,
                  "n values for hit@n and NDCG@n (ascending)");
  cmd->add_option("--negatives", opt.run.ranking_negatives,
                  "Sampled negatives per test positive");
  cmd->add_option("--threshold", opt.run.threshold,
                  "Classification threshold");
}

void add_out_flag(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--out", opt.run.out_dir, "Output directory")
      ->envname("HETRINET_OUT");
}

void resolve_enums(CliOptions& opt) {
  opt.run.model.activation = activation_from_string(opt.activation);
  opt.run.model.pair_message_mode = pair_message_mode_from_string(opt.pair_mode);
  opt.run.train.loss_mode = loss_mode_from_string(opt.loss_mode);
}

int do_ingest(CliOptions& opt) {
  const DatasetBundle bundle =
      ingest(opt.run.triplets_path, opt.run.drug_smiles_path,
             opt.run.target_seqs_path);
  std::printf("drugs      %zu\n", bundle.drug_ids.size());
  std::printf("targets    %zu\n", bundle.target_ids.size());
  std::printf("diseases   %zu\n", bundle.disease_ids.size());
  std::printf("triplets   %zu\n", bundle.triplets.size());
  std::printf("positives  %zu\n", bundle.positives().size());
  if (bundle.duplicate_rows > 0) {
    std::printf("warning: dropped %d duplicate triplet rows\n",
                bundle.duplicate_rows);
  }
  return 0;
}

int do_featurize(CliOptions& opt) {
  std::vector<std::string> ids, payloads;
  {
    std::ifstream in(opt.corpus);
    if (!in) throw InputError("cannot open " + opt.corpus);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      const auto pos = line.find('\t');
      if (pos == std::string::npos) {
        throw InputError(opt.corpus + ":" + std::to_string(line_no) +
                         ": expected id<TAB>sequence");
      }
      ids.push_back(line.substr(0, pos));
      payloads.push_back(line.substr(pos + 1));
    }
  }
  std::int64_t min_freq = opt.run.vocab_min_frequency;
  if (min_freq == 0) {
    min_freq = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(0.01 * payloads.size())));
  }
  const SubstructureVocab vocab =
      train_vocab(payloads, min_freq, opt.run.vocab_max);
  save_vocab(vocab, opt.vocab_out);
  std::printf("vocabulary: %d tokens, %zu merges -> %s\n", vocab.size(),
              vocab.merges.size(), opt.vocab_out.c_str());
  if (!opt.encoded_out.empty()) {
    Tensor feats(static_cast<int>(ids.size()), vocab.size());
    int unknown_total = 0;
    for (std::size_t r = 0; r < payloads.size(); ++r) {
      EncodeStats stats;
      const FeatureVector fv = encode(payloads[r], vocab, &stats);
      unknown_total += stats.unknown_chars;
      for (int c = 0; c < vocab.size(); ++c) {
        feats.at(static_cast<int>(r), c) = fv.values[c];
      }
    }
    write_features_tsv(opt.encoded_out, ids, feats);
    std::printf("encoded %zu sequences -> %s (%d unknown characters)\n",
                ids.size(), opt.encoded_out.c_str(), unknown_total);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hetrinet: heterogeneous graph triplet attention network"};
  app.set_config("--config", "", "Key-value config file; flags override");
  app.require_subcommand(1);

  CliOptions opt;
  app.add_option("--kernels", opt.kernels,
                 "Numeric kernel variant: auto|scalar|avx2");

  CLI::App* synth = app.add_subcommand("synth", "Generate a planted-rule dataset");
  synth->add_option("--drugs", opt.run.synth.drugs, "Drug count");
  synth->add_option("--targets", opt.run.synth.targets, "Target count");
  synth->add_option("--diseases", opt.run.synth.diseases, "Disease count");
  synth->add_option("--latent-dim", opt.run.synth.latent_dim, "Latent size");
  synth->add_option("--positives", opt.run.synth.positive_count,
                    "Positive triplet count");
  synth->add_option("--noise", opt.run.synth.noise_flip_rate,
                    "Label flip rate");
  synth->add_option("--feature-dim", opt.run.synth.raw_feature_dim,
                    "Raw feature dimension");
  synth->add_option("--synth-seed", opt.run.synth.seed, "Generator seed");
  synth->add_option("--heldout-pos", opt.run.synth.heldout_positives,
                    "Held-out true positives");
  synth->add_option("--heldout-neg", opt.run.synth.heldout_negatives,
                    "Held-out negatives");
  add_out_flag(synth, opt);

  CLI::App* train = app.add_subcommand("train", "Train a model");
  add_data_flags(train, opt);
  add_model_flags(train, opt);
  add_train_flags(train, opt);
  add_eval_flags(train, opt);
  add_out_flag(train, opt);

  CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  add_data_flags(eval, opt);
  add_train_flags(eval, opt);
  add_eval_flags(eval, opt);
  add_out_flag(eval, opt);
  eval->add_option("--checkpoint", opt.checkpoint, "Checkpoint path")
      ->required();

  CLI::App* predict = app.add_subcommand("predict", "Score query triplets");
  add_data_flags(predict, opt);
  add_train_flags(predict, opt);
  add_out_flag(predict, opt);
  predict->add_option("--checkpoint", opt.checkpoint, "Checkpoint path")
      ->required();
  predict->add_option("--queries", opt.queries,
                      "Query TSV: drug<TAB>target<TAB>disease[<TAB>label]")
      ->required();

  CLI::App* ablate = app.add_subcommand(
      "ablate", "Train and compare all pair-message variants");
  add_data_flags(ablate, opt);
  add_model_flags(ablate, opt);
  add_train_flags(ablate, opt);
  add_eval_flags(ablate, opt);
  add_out_flag(ablate, opt);

  CLI::App* ingest_cmd =
      app.add_subcommand("ingest", "Validate and summarize a dataset");
  add_data_flags(ingest_cmd, opt);

  CLI::App* featurize =
      app.add_subcommand("featurize", "Learn a substructure vocabulary");
  featurize->add_option("--input", opt.corpus, "TSV: id<TAB>sequence")
      ->required();
  featurize->add_option("--vocab-out", opt.vocab_out, "Vocabulary file")
      ->required();
  featurize->add_option("--encode-out", opt.encoded_out,
                        "Optional multi-hot feature TSV");
  featurize->add_option("--min-frequency", opt.run.vocab_min_frequency,
                        "Merge threshold (0: 1% of the corpus)");
  featurize->add_option("--max-vocab", opt.run.vocab_max, "Vocabulary cap");

  CLI11_PARSE(app, argc, argv);

  try {
    kernels::select(opt.kernels);
    resolve_enums(opt);
    if (app.got_subcommand(synth)) {
      const SynthDataset ds = run_synth(opt.run);
      std::printf("wrote %zu positives and %zu held-out rows to %s\n",
                  ds.positives.size(), ds.heldout.size(),
                  opt.run.out_dir.c_str());
    } else if (app.got_subcommand(train)) {
      const TrainArtifacts artifacts = run_train(opt.run);
      std::printf("trained %d epochs (best %d), checkpoint %s\n",
                  artifacts.report.epochs_run, artifacts.report.best_epoch,
                  artifacts.checkpoint_path.c_str());
    } else if (app.got_subcommand(eval)) {
      const MetricsReport report = run_eval(opt.run, opt.checkpoint);
      std::fputs(metrics_to_table(report).c_str(), stdout);
    } else if (app.got_subcommand(predict)) {
      const auto scored = run_predict(opt.run, opt.checkpoint, opt.queries);
      std::printf("scored %zu query triplets -> %s/predictions.tsv\n",
                  scored.size(), opt.run.out_dir.c_str());
    } else if (app.got_subcommand(ablate)) {
      const AblationResult result = run_ablate(opt.run);
      std::fputs(result.table.c_str(), stdout);
    } else if (app.got_subcommand(ingest_cmd)) {
      return do_ingest(opt);
    } else if (app.got_subcommand(featurize)) {
      return do_featurize(opt);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
