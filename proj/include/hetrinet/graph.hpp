#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hetrinet/common.hpp"

namespace hetrinet {

enum class NodeType : std::uint8_t { Drug = 0, Target = 1, Disease = 2 };

constexpr std::array<NodeType, 3> kNodeTypes = {
    NodeType::Drug, NodeType::Target, NodeType::Disease};

const char* to_string(NodeType t);

/// Typed node handle; index is dense per kind.
struct NodeId {
  NodeType kind = NodeType::Drug;
  std::int32_t index = 0;

  friend bool operator==(const NodeId&, const NodeId&) = default;
};

/// One (drug, target, disease) triple. label 1 marks an observed interaction.
struct Triplet {
  std::int32_t drug = 0;
  std::int32_t target = 0;
  std::int32_t disease = 0;
  std::int8_t label = 1;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

struct GraphDims {
  std::int32_t drugs = 0;
  std::int32_t targets = 0;
  std::int32_t diseases = 0;
};

using Edge = std::pair<std::int32_t, std::int32_t>;

/// For a center node, the neighboring pairs of the other two types. Pair
/// members follow the node-type order excluding the center's kind:
/// drug center -> (target, disease); target center -> (drug, disease);
/// disease center -> (drug, target).
struct NeighborPairSet {
  NodeId center;
  std::vector<std::pair<NodeId, NodeId>> pairs;
};

/// Immutable three-type graph over drugs, targets and diseases with
/// drug-target and drug-disease edges plus the positive triplet list.
/// Edges are undirected and deduplicated; adjacency lists are sorted.
class HeteroGraph {
 public:
  static HeteroGraph build(GraphDims dims, const std::vector<Triplet>& positives,
                           const std::vector<Edge>& extra_dt_edges = {},
                           const std::vector<Edge>& extra_ds_edges = {});

  const GraphDims& dims() const { return dims_; }
  std::int32_t count(NodeType t) const;
  std::int32_t node_count() const {
    return dims_.drugs + dims_.targets + dims_.diseases;
  }

  /// Dense index over all nodes: drugs, then targets, then diseases.
  std::int32_t global_index(NodeId id) const;
  NodeId node_at(std::int32_t global) const;

  const std::vector<Edge>& dt_edges() const { return e_dt_; }
  const std::vector<Edge>& ds_edges() const { return e_ds_; }
  const std::vector<Triplet>& positives() const { return positives_; }

  std::span<const std::int32_t> targets_of(std::int32_t drug) const;
  std::span<const std::int32_t> diseases_of(std::int32_t drug) const;
  std::span<const std::int32_t> drugs_of_target(std::int32_t target) const;
  std::span<const std::int32_t> drugs_of_disease(std::int32_t disease) const;

  bool is_positive(std::int32_t d, std::int32_t t, std::int32_t s) const {
    return positive_keys_.contains(triplet_key(d, t, s));
  }

  /// Number of wedge pairs the center would enumerate without a cap.
  std::uint64_t pair_space_size(NodeId center) const;

  /// Wedge rule pair enumeration. If the full set exceeds `cap`, samples
  /// `cap` pairs uniformly without replacement, deterministically in `seed`.
  NeighborPairSet neighbor_pairs(NodeId center, std::int64_t cap,
                                 std::uint64_t seed) const;

  std::uint64_t triplet_key(std::int32_t d, std::int32_t t,
                            std::int32_t s) const {
    return (static_cast<std::uint64_t>(d) * dims_.targets + t) *
               static_cast<std::uint64_t>(dims_.diseases) +
           s;
  }

 private:
  void validate_node(NodeType kind, std::int32_t index,
                     const std::string& where) const;

  GraphDims dims_;
  std::vector<Triplet> positives_;
  std::vector<Edge> e_dt_;
  std::vector<Edge> e_ds_;
  std::vector<std::vector<std::int32_t>> adj_dt_;  // drug -> targets
  std::vector<std::vector<std::int32_t>> adj_ds_;  // drug -> diseases
  std::vector<std::vector<std::int32_t>> adj_td_;  // target -> drugs
  std::vector<std::vector<std::int32_t>> adj_sd_;  // disease -> drugs
  std::unordered_set<std::uint64_t> positive_keys_;
};

/// Free-function spelling of HeteroGraph::neighbor_pairs.
inline NeighborPairSet neighbor_pairs(const HeteroGraph& g, NodeId center,
                                      std::int64_t cap, std::uint64_t seed) {
  return g.neighbor_pairs(center, cap, seed);
}

}  // namespace hetrinet
