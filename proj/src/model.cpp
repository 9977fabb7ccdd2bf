#include "hetrinet/model.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>

#include "hetrinet/train.hpp"

namespace hetrinet {

using nlohmann::json;

const char* to_string(Activation a) {
  switch (a) {
    case Activation::ReLU:
      return "relu";
    case Activation::ELU:
      return "elu";
    case Activation::LeakyReLU:
      return "leaky_relu";
  }
  return "?";
}

const char* to_string(PairMessageMode m) {
  switch (m) {
    case PairMessageMode::FullNN:
      return "full_nn";
    case PairMessageMode::Sum:
      return "sum";
    case PairMessageMode::Concat:
      return "concat";
    case PairMessageMode::ElemProd:
      return "elem_prod";
    case PairMessageMode::Trans:
      return "trans";
  }
  return "?";
}

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::ReLU;
  if (s == "elu") return Activation::ELU;
  if (s == "leaky_relu") return Activation::LeakyReLU;
  throw InputError("unknown activation '" + s + "' (relu|elu|leaky_relu)");
}

PairMessageMode pair_message_mode_from_string(const std::string& s) {
  if (s == "full_nn") return PairMessageMode::FullNN;
  if (s == "sum") return PairMessageMode::Sum;
  if (s == "concat") return PairMessageMode::Concat;
  if (s == "elem_prod") return PairMessageMode::ElemProd;
  if (s == "trans") return PairMessageMode::Trans;
  throw InputError("unknown pair message mode '" + s +
                   "' (full_nn|sum|concat|elem_prod|trans)");
}

void ModelConfig::validate() const {
  if (hidden_dim < 1) throw InputError("model: hidden_dim must be >= 1");
  if (heads < 1) throw InputError("model: heads must be >= 1");
  if (hidden_dim % heads != 0) {
    throw InputError("model: hidden_dim " + std::to_string(hidden_dim) +
                     " not divisible by heads " + std::to_string(heads));
  }
  if (layers < 1) throw InputError("model: layers must be >= 1");
  if (dropout_rate < 0 || dropout_rate >= 1) {
    throw InputError("model: dropout_rate must be in [0,1)");
  }
  if (leaky_slope <= 0 || leaky_slope >= 1) {
    throw InputError("model: leaky_slope must be in (0,1)");
  }
  if (drug_input_dim < 1 || target_input_dim < 1 || disease_input_dim < 1) {
    throw InputError("model: input dimensions must be set (>= 1)");
  }
  for (const int h : decoder_hidden_dims) {
    if (h < 1) throw InputError("model: decoder hidden dims must be >= 1");
  }
}

Parameter* HeTriNetModel::make(const std::string& name, int rows, int cols,
                               bool trainable) {
  store_.emplace_back(name, Tensor(rows, cols), trainable);
  return &store_.back();
}

void HeTriNetModel::allocate() {
  config.validate();
  const int d = config.hidden_dim;
  const int dk = config.head_dim();

  proj_drug = make("proj.drug", config.drug_input_dim, d);
  proj_target = make("proj.target", config.target_input_dim, d);
  proj_disease = make("proj.disease", config.disease_input_dim, d);

  layers.resize(config.layers);
  for (int l = 0; l < config.layers; ++l) {
    const std::string lp = "l" + std::to_string(l) + ".";
    layers[l].heads.resize(config.heads);
    for (int h = 0; h < config.heads; ++h) {
      const std::string hp = lp + "h" + std::to_string(h) + ".";
      HeadParams& head = layers[l].heads[h];
      head.att_w1 = make(hp + "att.w1", 3 * dk, dk);
      head.att_b1 = make(hp + "att.b1", 1, dk);
      head.att_w2 = make(hp + "att.w2", dk, 1);
      head.att_b2 = make(hp + "att.b2", 1, 1);
      switch (config.pair_message_mode) {
        case PairMessageMode::FullNN:
        case PairMessageMode::Trans:
          head.msg_w = make(hp + "msg.w", 2 * dk, dk);
          head.msg_b = make(hp + "msg.b", 1, dk);
          break;
        case PairMessageMode::Concat:
          head.msg_w = make(hp + "msg.w", 2 * dk, dk, /*trainable=*/false);
          break;
        case PairMessageMode::Sum:
        case PairMessageMode::ElemProd:
          break;
      }
      head.gate = make(hp + "gate", 1, 1);
    }
    if (l + 1 == config.layers) {
      layers[l].out_w = make(lp + "out.w", dk, d);
      layers[l].out_b = make(lp + "out.b", 1, d);
    }
  }

  int in_dim = 3 * d;
  for (std::size_t i = 0; i < config.decoder_hidden_dims.size(); ++i) {
    const int out_dim = config.decoder_hidden_dims[i];
    decoder.weights.push_back(
        make("dec." + std::to_string(i) + ".w", in_dim, out_dim));
    decoder.biases.push_back(
        make("dec." + std::to_string(i) + ".b", 1, out_dim));
    in_dim = out_dim;
  }
  const std::string last = "dec." + std::to_string(config.decoder_hidden_dims.size());
  decoder.weights.push_back(make(last + ".w", in_dim, 1));
  decoder.biases.push_back(make(last + ".b", 1, 1));
}

HeTriNetModel::HeTriNetModel(ModelConfig cfg, Rng& rng) {
  config = std::move(cfg);
  allocate();

  for (Parameter& p : store_) {
    const bool is_bias = p.value.rows() == 1 && p.name.ends_with(".b");
    const bool is_gate = p.name.ends_with(".gate");
    const bool is_att_bias =
        p.name.ends_with(".att.b1") || p.name.ends_with(".att.b2");
    const bool is_msg_bias = p.name.ends_with(".msg.b");
    if (is_gate) {
      p.value[0] = 1;
    } else if (is_bias || is_att_bias || is_msg_bias) {
      // biases start at zero
    } else {
      p.value = xavier_init(p.value.rows(), p.value.cols(), rng);
    }
  }
  // A fresh decoder output layer stays at zero so untrained scores are 0.5
  // and the margin loss starts from a symmetric state.
  decoder.weights.back()->value.zero();
  decoder.biases.back()->value.zero();
}

HeTriNetModel HeTriNetModel::uninitialized(ModelConfig cfg) {
  HeTriNetModel m;
  m.config = std::move(cfg);
  m.allocate();
  return m;
}

std::vector<Parameter*> HeTriNetModel::all_params() {
  std::vector<Parameter*> out;
  out.reserve(store_.size());
  for (Parameter& p : store_) out.push_back(&p);
  return out;
}

std::vector<Parameter*> HeTriNetModel::trainable_params() {
  std::vector<Parameter*> out;
  for (Parameter& p : store_) {
    if (p.trainable) out.push_back(&p);
  }
  return out;
}

Parameter* HeTriNetModel::find_param(const std::string& name) {
  for (Parameter& p : store_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::size_t HeTriNetModel::param_count() const {
  std::size_t n = 0;
  for (const Parameter& p : store_) n += p.value.size();
  return n;
}

void HeTriNetModel::zero_grads() {
  for (Parameter& p : store_) p.zero_grad();
}

NeighborPlan make_neighbor_plan(const HeteroGraph& g, std::int64_t cap,
                                std::uint64_t seed) {
  NeighborPlan plan;
  const std::int32_t n = g.node_count();
  plan.pairs.resize(n);
  for (std::int32_t i = 0; i < n; ++i) {
    const NodeId center = g.node_at(i);
    const NeighborPairSet set =
        g.neighbor_pairs(center, cap, mix_seed(seed, static_cast<std::uint64_t>(i)));
    auto& out = plan.pairs[i];
    out.reserve(set.pairs.size());
    for (const auto& [a, b] : set.pairs) {
      out.emplace_back(g.global_index(a), g.global_index(b));
    }
  }
  return plan;
}

Var apply_activation(Tape& t, Var x, Activation act, real_t leaky_slope) {
  switch (act) {
    case Activation::ReLU:
      return t.relu(x);
    case Activation::ELU:
      return t.elu(x);
    case Activation::LeakyReLU:
      return t.leaky_relu(x, leaky_slope);
  }
  throw Error("unknown activation");
}

Var project_on(Tape& t, ParamBinding& bind, HeTriNetModel& m, NodeType type,
               Var raw) {
  Parameter* proj = type == NodeType::Drug      ? m.proj_drug
                    : type == NodeType::Target  ? m.proj_target
                                                : m.proj_disease;
  return t.matmul(raw, bind.bind(t, *proj));
}

Var attention_logits_on(Tape& t, ParamBinding& bind, HeTriNetModel& m,
                        const HeadParams& head, Var center_rows, Var j_rows,
                        Var k_rows) {
  const auto slope = static_cast<real_t>(m.config.leaky_slope);
  const Var x = t.concat_cols({center_rows, j_rows, k_rows});
  const Var hidden = apply_activation(
      t, t.add_row(t.matmul(x, bind.bind(t, *head.att_w1)), bind.bind(t, *head.att_b1)),
      m.config.activation, slope);
  const Var logits =
      t.add_row(t.matmul(hidden, bind.bind(t, *head.att_w2)), bind.bind(t, *head.att_b2));
  return t.leaky_relu(logits, slope);
}

Var pair_message_on(Tape& t, ParamBinding& bind, HeTriNetModel& m,
                    const HeadParams& head, Var j_rows, Var k_rows) {
  switch (m.config.pair_message_mode) {
    case PairMessageMode::FullNN: {
      const Var x = t.concat_cols({j_rows, k_rows});
      const Var affine =
          t.add_row(t.matmul(x, bind.bind(t, *head.msg_w)), bind.bind(t, *head.msg_b));
      return apply_activation(t, affine, m.config.activation,
                              static_cast<real_t>(m.config.leaky_slope));
    }
    case PairMessageMode::Trans: {
      const Var x = t.concat_cols({j_rows, k_rows});
      return t.add_row(t.matmul(x, bind.bind(t, *head.msg_w)),
                       bind.bind(t, *head.msg_b));
    }
    case PairMessageMode::Concat: {
      const Var x = t.concat_cols({j_rows, k_rows});
      return t.matmul(x, bind.bind(t, *head.msg_w));
    }
    case PairMessageMode::Sum:
      return t.add(j_rows, k_rows);
    case PairMessageMode::ElemProd:
      return t.elem_prod(j_rows, k_rows);
  }
  throw Error("unknown pair message mode");
}

Var aggregate_on(Tape& t, ParamBinding& bind, HeTriNetModel& m,
                 const HeadParams& head, Var center_row, Var alpha_row,
                 Var messages) {
  const Var weighted = t.matmul(alpha_row, messages);
  const Var gated = t.mul_scalar(weighted, bind.bind(t, *head.gate));
  return apply_activation(t, t.add(center_row, gated), m.config.activation,
                          static_cast<real_t>(m.config.leaky_slope));
}

namespace {

void check_features(const HeteroGraph& g, const NodeFeatures& feats,
                    const ModelConfig& cfg) {
  auto check = [](const char* kind, const Tensor& f, std::int32_t nodes,
                  int dim) {
    if (f.rows() != nodes) {
      throw InputError(std::string("encode: ") + kind + " features have " +
                       std::to_string(f.rows()) + " rows but the graph has " +
                       std::to_string(nodes) + " nodes");
    }
    if (nodes > 0 && f.cols() != dim) {
      throw InputError(std::string("encode: ") + kind + " feature dim " +
                       std::to_string(f.cols()) + " != configured " +
                       std::to_string(dim));
    }
  };
  check("drug", feats.drugs, g.dims().drugs, cfg.drug_input_dim);
  check("target", feats.targets, g.dims().targets, cfg.target_input_dim);
  check("disease", feats.diseases, g.dims().diseases, cfg.disease_input_dim);
}

Var decoder_forward(Tape& t, ParamBinding& bind, HeTriNetModel& m, Var x) {
  const auto slope = static_cast<real_t>(m.config.leaky_slope);
  const std::size_t n_layers = m.config.decoder_hidden_dims.size();
  for (std::size_t i = 0; i < n_layers; ++i) {
    x = t.add_row(t.matmul(x, bind.bind(t, *m.decoder.weights[i])),
                  bind.bind(t, *m.decoder.biases[i]));
    x = apply_activation(t, x, m.config.activation, slope);
  }
  const Var logits =
      t.add_row(t.matmul(x, bind.bind(t, *m.decoder.weights.back())),
                bind.bind(t, *m.decoder.biases.back()));
  return t.sigmoid(logits);
}

}  // namespace

Var encode_on(Tape& t, ParamBinding& bind, HeTriNetModel& m,
              const HeteroGraph& g, const NodeFeatures& feats,
              const NeighborPlan& plan, bool training, Rng& rng) {
  check_features(g, feats, m.config);
  if (plan.pairs.size() != static_cast<std::size_t>(g.node_count())) {
    throw InputError("encode: neighbor plan covers " +
                     std::to_string(plan.pairs.size()) + " nodes, graph has " +
                     std::to_string(g.node_count()));
  }
  const ModelConfig& cfg = m.config;
  const int K = cfg.heads;
  const int dk = cfg.head_dim();
  const auto act = cfg.activation;
  const auto slope = static_cast<real_t>(cfg.leaky_slope);
  const std::int32_t n = g.node_count();

  const Var zd = project_on(t, bind, m, NodeType::Drug, t.leaf(feats.drugs));
  const Var zt = project_on(t, bind, m, NodeType::Target, t.leaf(feats.targets));
  const Var zs = project_on(t, bind, m, NodeType::Disease, t.leaf(feats.diseases));
  Var z = t.concat_rows({zd, zt, zs});

  for (int l = 0; l < cfg.layers; ++l) {
    const LayerParams& lp = m.layers[l];
    const bool final_layer = (l + 1 == cfg.layers);
    const Var zin =
        t.dropout(z, static_cast<real_t>(cfg.dropout_rate), training, rng);

    std::vector<Var> head_slices(K);
    for (int h = 0; h < K; ++h) {
      head_slices[h] = t.slice_cols(zin, h * dk, (h + 1) * dk);
    }

    std::vector<Var> rows;
    rows.reserve(n);
    std::vector<Var> head_out(K);
    for (std::int32_t i = 0; i < n; ++i) {
      const auto& prs = plan.pairs[i];
      for (int h = 0; h < K; ++h) {
        const HeadParams& head = lp.heads[h];
        const Var zh = head_slices[h];
        const Var zc = t.gather_rows(zh, {i});
        if (prs.empty()) {
          // No neighbor pairs: the aggregation reduces to act(center).
          head_out[h] = apply_activation(t, zc, act, slope);
          continue;
        }
        std::vector<int> ci(prs.size(), i), ji, ki;
        ji.reserve(prs.size());
        ki.reserve(prs.size());
        for (const auto& [j, k] : prs) {
          ji.push_back(j);
          ki.push_back(k);
        }
        const Var gc = t.gather_rows(zh, std::move(ci));
        const Var gj = t.gather_rows(zh, std::move(ji));
        const Var gk = t.gather_rows(zh, std::move(ki));
        const Var logits = attention_logits_on(t, bind, m, head, gc, gj, gk);
        const Var alpha = t.softmax_rows(t.transpose(logits));
        const Var msgs = pair_message_on(t, bind, m, head, gj, gk);
        head_out[h] = aggregate_on(t, bind, m, head, zc, alpha, msgs);
      }
      if (!final_layer) {
        rows.push_back(t.concat_cols(head_out));
      } else {
        Var sum = head_out[0];
        for (int h = 1; h < K; ++h) sum = t.add(sum, head_out[h]);
        const Var avg = t.scale(sum, real_t{1} / static_cast<real_t>(K));
        rows.push_back(t.add(t.matmul(avg, bind.bind(t, *m.layers[l].out_w)),
                             bind.bind(t, *m.layers[l].out_b)));
      }
    }
    z = t.concat_rows(rows);
  }
  return z;
}

Var decode_on(Tape& t, ParamBinding& bind, HeTriNetModel& m, Var embeddings,
              const HeteroGraph& g, const std::vector<Triplet>& batch) {
  if (batch.empty()) throw InputError("decode: empty batch");
  std::vector<int> di, ti, si;
  di.reserve(batch.size());
  ti.reserve(batch.size());
  si.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Triplet& tr = batch[i];
    if (tr.drug < 0 || tr.drug >= g.dims().drugs || tr.target < 0 ||
        tr.target >= g.dims().targets || tr.disease < 0 ||
        tr.disease >= g.dims().diseases) {
      throw InputError("decode: triplet " + std::to_string(i) +
                       " references a node outside the graph");
    }
    di.push_back(g.global_index({NodeType::Drug, tr.drug}));
    ti.push_back(g.global_index({NodeType::Target, tr.target}));
    si.push_back(g.global_index({NodeType::Disease, tr.disease}));
  }
  const Var zd = t.gather_rows(embeddings, std::move(di));
  const Var zt = t.gather_rows(embeddings, std::move(ti));
  const Var zs = t.gather_rows(embeddings, std::move(si));
  const Var x = t.concat_cols({zd, zt, zs});
  return decoder_forward(t, bind, m, x);
}

Tensor project(const Tensor& raw, NodeType type, HeTriNetModel& m) {
  Tape t;
  ParamBinding bind;
  const Var out = project_on(t, bind, m, type, t.leaf(raw));
  return t.value(out);
}

namespace {

// Stacks 1 x d tensors into a P x d leaf block on the tape.
Var stack_leaves(Tape& t, const std::vector<Tensor>& rows) {
  std::vector<Var> vars;
  vars.reserve(rows.size());
  for (const Tensor& r : rows) vars.push_back(t.leaf(r));
  return t.concat_rows(vars);
}

}  // namespace

std::vector<double> attention_logits(
    const Tensor& center, const std::vector<std::pair<Tensor, Tensor>>& pairs,
    HeTriNetModel& m, int layer, int head) {
  if (pairs.empty()) return {};
  Tape t;
  ParamBinding bind;
  const Var c = t.leaf(center);
  const Var center_rows =
      t.gather_rows(c, std::vector<int>(pairs.size(), 0));
  std::vector<Tensor> js, ks;
  for (const auto& [j, k] : pairs) {
    js.push_back(j);
    ks.push_back(k);
  }
  const Var logits =
      attention_logits_on(t, bind, m, m.layers.at(layer).heads.at(head),
                          center_rows, stack_leaves(t, js), stack_leaves(t, ks));
  const Tensor& v = t.value(logits);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<double>(v[i]);
  return out;
}

std::vector<double> normalize_attention(const std::vector<double>& logits) {
  if (logits.empty()) throw Error("normalize_attention: empty input");
  Tape t;
  std::vector<real_t> vals(logits.begin(), logits.end());
  const Var row = t.leaf(Tensor(1, static_cast<int>(vals.size()), vals));
  const Tensor& v = t.value(t.softmax_rows(row));
  return std::vector<double>(v.values().begin(), v.values().end());
}

Tensor pair_message(const Tensor& j, const Tensor& k, HeTriNetModel& m,
                    int layer, int head) {
  Tape t;
  ParamBinding bind;
  const Var out = pair_message_on(t, bind, m, m.layers.at(layer).heads.at(head),
                                  t.leaf(j), t.leaf(k));
  return t.value(out);
}

Tensor aggregate(const Tensor& center,
                 const std::vector<std::pair<Tensor, Tensor>>& pairs,
                 const std::vector<double>& alpha, HeTriNetModel& m, int layer,
                 int head) {
  if (pairs.size() != alpha.size()) {
    throw InputError("aggregate: " + std::to_string(alpha.size()) +
                     " weights for " + std::to_string(pairs.size()) + " pairs");
  }
  Tape t;
  ParamBinding bind;
  const HeadParams& hp = m.layers.at(layer).heads.at(head);
  const Var c = t.leaf(center);
  if (pairs.empty()) {
    return t.value(apply_activation(t, c, m.config.activation,
                                    static_cast<real_t>(m.config.leaky_slope)));
  }
  std::vector<Tensor> js, ks;
  for (const auto& [j, k] : pairs) {
    js.push_back(j);
    ks.push_back(k);
  }
  const Var msgs = pair_message_on(t, bind, m, hp, stack_leaves(t, js),
                                   stack_leaves(t, ks));
  std::vector<real_t> avals(alpha.begin(), alpha.end());
  const Var arow = t.leaf(Tensor(1, static_cast<int>(avals.size()), avals));
  return t.value(aggregate_on(t, bind, m, hp, c, arow, msgs));
}

Tensor multi_head_concat(const std::vector<Tensor>& per_head, HeTriNetModel& m,
                         int layer) {
  if (static_cast<int>(per_head.size()) != m.config.heads) {
    throw InputError("multi_head_concat: expected " +
                     std::to_string(m.config.heads) + " heads, got " +
                     std::to_string(per_head.size()));
  }
  Tape t;
  ParamBinding bind;
  std::vector<Var> vars;
  for (const Tensor& h : per_head) vars.push_back(t.leaf(h));
  const bool final_layer = (layer + 1 == m.config.layers);
  if (!final_layer) {
    return t.value(t.concat_cols(vars));
  }
  Var sum = vars[0];
  for (std::size_t h = 1; h < vars.size(); ++h) sum = t.add(sum, vars[h]);
  const Var avg = t.scale(sum, real_t{1} / static_cast<real_t>(m.config.heads));
  return t.value(t.add(t.matmul(avg, bind.bind(t, *m.layers.at(layer).out_w)),
                       bind.bind(t, *m.layers.at(layer).out_b)));
}

Tensor encode(const HeteroGraph& g, const NodeFeatures& feats, HeTriNetModel& m,
              bool training, Rng& rng) {
  const NeighborPlan plan =
      make_neighbor_plan(g, m.config.neighbor_cap, rng.next());
  Tape t;
  ParamBinding bind;
  const Var z = encode_on(t, bind, m, g, feats, plan, training, rng);
  return t.value(z);
}

double decode(const Tensor& z_drug, const Tensor& z_target,
              const Tensor& z_disease, HeTriNetModel& m) {
  Tape t;
  ParamBinding bind;
  const Var x =
      t.concat_cols({t.leaf(z_drug), t.leaf(z_target), t.leaf(z_disease)});
  const Var score = decoder_forward(t, bind, m, x);
  return static_cast<double>(t.value(score)[0]);
}

// --- checkpoint io ----------------------------------------------------------

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes little-endian storage");

constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const unsigned char* data, std::size_t len) {
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  for (std::size_t i = 0; i < len; i += 3) {
    const unsigned b0 = data[i];
    const unsigned b1 = i + 1 < len ? data[i + 1] : 0;
    const unsigned b2 = i + 2 < len ? data[i + 2] : 0;
    out.push_back(kB64Alphabet[b0 >> 2]);
    out.push_back(kB64Alphabet[((b0 & 0x3) << 4) | (b1 >> 4)]);
    out.push_back(i + 1 < len ? kB64Alphabet[((b1 & 0xf) << 2) | (b2 >> 6)]
                              : '=');
    out.push_back(i + 2 < len ? kB64Alphabet[b2 & 0x3f] : '=');
  }
  return out;
}

std::vector<unsigned char> base64_decode(const std::string& in) {
  auto value_of = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    if (c == '=') return -1;
    throw InputError("checkpoint: invalid base64 character");
  };
  if (in.size() % 4 != 0) throw InputError("checkpoint: truncated base64");
  std::vector<unsigned char> out;
  out.reserve(in.size() / 4 * 3);
  for (std::size_t i = 0; i < in.size(); i += 4) {
    const int v0 = value_of(in[i]);
    const int v1 = value_of(in[i + 1]);
    const int v2 = value_of(in[i + 2]);
    const int v3 = value_of(in[i + 3]);
    if (v0 < 0 || v1 < 0) throw InputError("checkpoint: malformed base64");
    out.push_back(static_cast<unsigned char>((v0 << 2) | (v1 >> 4)));
    if (v2 >= 0) out.push_back(static_cast<unsigned char>(((v1 & 0xf) << 4) | (v2 >> 2)));
    if (v3 >= 0) {
      if (v2 < 0) throw InputError("checkpoint: malformed base64");
      out.push_back(static_cast<unsigned char>(((v2 & 0x3) << 6) | v3));
    }
  }
  return out;
}

}  // namespace

json model_config_to_json(const ModelConfig& cfg) {
  json j;
  j["hidden_dim"] = cfg.hidden_dim;
  j["heads"] = cfg.heads;
  j["layers"] = cfg.layers;
  j["leaky_slope"] = cfg.leaky_slope;
  j["dropout_rate"] = cfg.dropout_rate;
  j["activation"] = to_string(cfg.activation);
  j["pair_message_mode"] = to_string(cfg.pair_message_mode);
  j["decoder_hidden_dims"] = cfg.decoder_hidden_dims;
  j["neighbor_cap"] = cfg.neighbor_cap;
  j["drug_input_dim"] = cfg.drug_input_dim;
  j["target_input_dim"] = cfg.target_input_dim;
  j["disease_input_dim"] = cfg.disease_input_dim;
  return j;
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig cfg;
  cfg.hidden_dim = j.at("hidden_dim").get<int>();
  cfg.heads = j.at("heads").get<int>();
  cfg.layers = j.at("layers").get<int>();
  cfg.leaky_slope = j.at("leaky_slope").get<double>();
  cfg.dropout_rate = j.at("dropout_rate").get<double>();
  cfg.activation = activation_from_string(j.at("activation").get<std::string>());
  cfg.pair_message_mode =
      pair_message_mode_from_string(j.at("pair_message_mode").get<std::string>());
  cfg.decoder_hidden_dims = j.at("decoder_hidden_dims").get<std::vector<int>>();
  cfg.neighbor_cap = j.at("neighbor_cap").get<int>();
  cfg.drug_input_dim = j.at("drug_input_dim").get<int>();
  cfg.target_input_dim = j.at("target_input_dim").get<int>();
  cfg.disease_input_dim = j.at("disease_input_dim").get<int>();
  return cfg;
}

void save_checkpoint(HeTriNetModel& m, const std::string& path) {
  json j;
  j["schema"] = "hetrinet.checkpoint";
  j["version"] = 1;
  j["precision"] = sizeof(real_t) == 8 ? "f64" : "f32";
  j["config"] = model_config_to_json(m.config);
  json params = json::array();
  for (Parameter* p : m.all_params()) {
    json entry;
    entry["name"] = p->name;
    entry["rows"] = p->value.rows();
    entry["cols"] = p->value.cols();
    entry["trainable"] = p->trainable;
    entry["data"] = base64_encode(
        reinterpret_cast<const unsigned char*>(p->value.data()),
        p->value.size() * sizeof(real_t));
    params.push_back(std::move(entry));
  }
  j["params"] = std::move(params);
  std::ofstream out(path);
  if (!out) throw InputError("save_checkpoint: cannot open " + path);
  out << j.dump(2) << "\n";
}

HeTriNetModel load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("load_checkpoint: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("load_checkpoint: " + path + ": " + e.what());
  }
  if (j.value("schema", "") != "hetrinet.checkpoint" || j.value("version", 0) != 1) {
    throw InputError("load_checkpoint: " + path +
                     ": not a version-1 checkpoint");
  }
  const std::string precision = j.value("precision", "f64");
  const std::string expect = sizeof(real_t) == 8 ? "f64" : "f32";
  if (precision != expect) {
    throw InputError("load_checkpoint: checkpoint precision " + precision +
                     " does not match build precision " + expect);
  }
  HeTriNetModel m = HeTriNetModel::uninitialized(model_config_from_json(j.at("config")));

  std::size_t filled = 0;
  for (const json& entry : j.at("params")) {
    const std::string name = entry.at("name").get<std::string>();
    Parameter* p = m.find_param(name);
    if (p == nullptr) {
      throw InputError("load_checkpoint: parameter '" + name +
                       "' does not exist under the stored config");
    }
    const int rows = entry.at("rows").get<int>();
    const int cols = entry.at("cols").get<int>();
    if (rows != p->value.rows() || cols != p->value.cols()) {
      throw InputError("load_checkpoint: parameter '" + name + "' has shape " +
                       std::to_string(rows) + "x" + std::to_string(cols) +
                       " but the config requires " + p->value.shape_str());
    }
    const std::vector<unsigned char> bytes =
        base64_decode(entry.at("data").get<std::string>());
    if (bytes.size() != p->value.size() * sizeof(real_t)) {
      throw InputError("load_checkpoint: parameter '" + name +
                       "' payload size mismatch");
    }
    std::memcpy(p->value.data(), bytes.data(), bytes.size());
    ++filled;
  }
  if (filled != m.all_params().size()) {
    throw InputError("load_checkpoint: checkpoint holds " +
                     std::to_string(filled) + " parameters, model needs " +
                     std::to_string(m.all_params().size()));
  }
  return m;
}

}  // namespace hetrinet
