#pragma once

#include <json.hpp>

#include <deque>
#include <string>
#include <vector>

#include "hetrinet/graph.hpp"
#include "hetrinet/tape.hpp"
#include "hetrinet/tensor.hpp"

namespace hetrinet {

enum class Activation { ReLU, ELU, LeakyReLU };
enum class PairMessageMode { FullNN, Sum, Concat, ElemProd, Trans };

const char* to_string(Activation a);
const char* to_string(PairMessageMode m);
Activation activation_from_string(const std::string& s);
PairMessageMode pair_message_mode_from_string(const std::string& s);

struct ModelConfig {
  int hidden_dim = 64;  // d; each head works in d / heads
  int heads = 4;        // K
  int layers = 2;       // L
  double leaky_slope = 0.2;
  double dropout_rate = 0.2;
  Activation activation = Activation::ReLU;
  PairMessageMode pair_message_mode = PairMessageMode::FullNN;
  std::vector<int> decoder_hidden_dims = {128, 32};
  int neighbor_cap = 64;
  // Raw feature dimensions per node type; set from the featurizer output.
  int drug_input_dim = 0;
  int target_input_dim = 0;
  int disease_input_dim = 0;

  int head_dim() const { return hidden_dim / heads; }
  void validate() const;
};

/// Per-head trainable pieces: the attention scorer (single hidden layer,
/// 3*(d/K) -> d/K -> 1), the pair-message net (2*(d/K) -> d/K) and the
/// scalar gate applied to the aggregated neighbor message. Which message
/// parameters exist depends on the pair-message mode.
struct HeadParams {
  Parameter* att_w1 = nullptr;
  Parameter* att_b1 = nullptr;
  Parameter* att_w2 = nullptr;
  Parameter* att_b2 = nullptr;
  Parameter* msg_w = nullptr;  // FullNN / Trans (trained), Concat (frozen)
  Parameter* msg_b = nullptr;  // FullNN / Trans only
  Parameter* gate = nullptr;
};

struct LayerParams {
  std::vector<HeadParams> heads;
  // Final layer only: heads are averaged to d/K and re-expanded to d.
  Parameter* out_w = nullptr;
  Parameter* out_b = nullptr;
};

struct DecoderParams {
  std::vector<Parameter*> weights;
  std::vector<Parameter*> biases;
};

/// All trainable state of the triplet-attention network: type projections,
/// L x K attention heads, and the scoring MLP over concatenated embeddings.
class HeTriNetModel {
 public:
  /// Builds and initializes parameters: Xavier-uniform weights, zero biases,
  /// gates at 1. The decoder's output layer starts at zero so a fresh model
  /// scores every triplet at exactly 0.5.
  HeTriNetModel(ModelConfig config, Rng& rng);

  /// Allocates the parameter layout without initialization (checkpoint load).
  static HeTriNetModel uninitialized(ModelConfig config);

  // Parameter pointers reference the internal store; moving is fine (deque
  // elements stay put) but copying would leave them dangling.
  HeTriNetModel(const HeTriNetModel&) = delete;
  HeTriNetModel& operator=(const HeTriNetModel&) = delete;
  HeTriNetModel(HeTriNetModel&&) = default;
  HeTriNetModel& operator=(HeTriNetModel&&) = default;

  ModelConfig config;
  Parameter* proj_drug = nullptr;
  Parameter* proj_target = nullptr;
  Parameter* proj_disease = nullptr;
  std::vector<LayerParams> layers;
  DecoderParams decoder;

  std::vector<Parameter*> all_params();
  std::vector<Parameter*> trainable_params();
  Parameter* find_param(const std::string& name);
  std::size_t param_count() const;
  void zero_grads();

 private:
  HeTriNetModel() = default;
  void allocate();
  Parameter* make(const std::string& name, int rows, int cols,
                  bool trainable = true);

  std::deque<Parameter> store_;
};

/// Raw feature rows for every node, one matrix per type.
struct NodeFeatures {
  Tensor drugs;
  Tensor targets;
  Tensor diseases;
};

/// Per-node neighbor pair lists in global node indices; one entry per node
/// in global order. Rebuilt (resampled) once per epoch.
struct NeighborPlan {
  std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> pairs;
};

NeighborPlan make_neighbor_plan(const HeteroGraph& g, std::int64_t cap,
                                std::uint64_t seed);

// --- tape-level building blocks -------------------------------------------

Var apply_activation(Tape& t, Var x, Activation act, real_t leaky_slope);

Var project_on(Tape& t, ParamBinding& bind, HeTriNetModel& m, NodeType type,
               Var raw);

/// Triplet attention logits for one center: rows of (center, j, k) slices are
/// scored by the head's feedforward net with the outer LeakyReLU. Returns a
/// P x 1 column.
Var attention_logits_on(Tape& t, ParamBinding& bind, HeTriNetModel& m,
                        const HeadParams& head, Var center_rows, Var j_rows,
                        Var k_rows);

/// P x (d/K) pair messages in the configured mode.
Var pair_message_on(Tape& t, ParamBinding& bind, HeTriNetModel& m,
                    const HeadParams& head, Var j_rows, Var k_rows);

/// z = act(center + gate * (alpha_row x messages)); alpha_row is 1 x P.
Var aggregate_on(Tape& t, ParamBinding& bind, HeTriNetModel& m,
                 const HeadParams& head, Var center_row, Var alpha_row,
                 Var messages);

/// Full encoder pass: project, then L rounds of per-head triplet message
/// passing. Returns the N x d embedding matrix var.
Var encode_on(Tape& t, ParamBinding& bind, HeTriNetModel& m,
              const HeteroGraph& g, const NodeFeatures& feats,
              const NeighborPlan& plan, bool training, Rng& rng);

/// Batched decoder: gathers (drug, target, disease) embedding rows for each
/// triplet, concatenates them, and runs the MLP with terminal sigmoid.
/// Returns a B x 1 column of scores in (0, 1).
Var decode_on(Tape& t, ParamBinding& bind, HeTriNetModel& m, Var embeddings,
              const HeteroGraph& g, const std::vector<Triplet>& batch);

// --- plain (non-tape) wrappers --------------------------------------------

Tensor project(const Tensor& raw, NodeType type, HeTriNetModel& m);

std::vector<double> attention_logits(
    const Tensor& center, const std::vector<std::pair<Tensor, Tensor>>& pairs,
    HeTriNetModel& m, int layer, int head);

/// Softmax over one center's logits.
std::vector<double> normalize_attention(const std::vector<double>& logits);

Tensor pair_message(const Tensor& j, const Tensor& k, HeTriNetModel& m,
                    int layer, int head);

Tensor aggregate(const Tensor& center,
                 const std::vector<std::pair<Tensor, Tensor>>& pairs,
                 const std::vector<double>& alpha, HeTriNetModel& m, int layer,
                 int head);

/// Head combination: hidden layers concatenate in head order; the final
/// layer averages heads and re-expands to d through the layer's linear map.
Tensor multi_head_concat(const std::vector<Tensor>& per_head, HeTriNetModel& m,
                         int layer);

/// Embeddings for every node (eval of the encoder). Neighbor pairs are
/// sampled with config.neighbor_cap using a seed drawn from `rng`.
Tensor encode(const HeteroGraph& g, const NodeFeatures& feats, HeTriNetModel& m,
              bool training, Rng& rng);

double decode(const Tensor& z_drug, const Tensor& z_target,
              const Tensor& z_disease, HeTriNetModel& m);

// --- checkpoint io ----------------------------------------------------------

nlohmann::json model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);

void save_checkpoint(HeTriNetModel& m, const std::string& path);
HeTriNetModel load_checkpoint(const std::string& path);

}  // namespace hetrinet
