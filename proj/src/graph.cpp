#include "hetrinet/graph.hpp"

#include <algorithm>
#include <string>

namespace hetrinet {

const char* to_string(NodeType t) {
  switch (t) {
    case NodeType::Drug:
      return "drug";
    case NodeType::Target:
      return "target";
    case NodeType::Disease:
      return "disease";
  }
  return "?";
}

std::int32_t HeteroGraph::count(NodeType t) const {
  switch (t) {
    case NodeType::Drug:
      return dims_.drugs;
    case NodeType::Target:
      return dims_.targets;
    case NodeType::Disease:
      return dims_.diseases;
  }
  return 0;
}

std::int32_t HeteroGraph::global_index(NodeId id) const {
  switch (id.kind) {
    case NodeType::Drug:
      return id.index;
    case NodeType::Target:
      return dims_.drugs + id.index;
    case NodeType::Disease:
      return dims_.drugs + dims_.targets + id.index;
  }
  return -1;
}

NodeId HeteroGraph::node_at(std::int32_t global) const {
  if (global < dims_.drugs) return {NodeType::Drug, global};
  global -= dims_.drugs;
  if (global < dims_.targets) return {NodeType::Target, global};
  return {NodeType::Disease, global - dims_.targets};
}

void HeteroGraph::validate_node(NodeType kind, std::int32_t index,
                                const std::string& where) const {
  if (index < 0 || index >= count(kind)) {
    throw InputError(where + ": " + to_string(kind) + " index " +
                     std::to_string(index) + " out of range [0, " +
                     std::to_string(count(kind)) + ")");
  }
}

HeteroGraph HeteroGraph::build(GraphDims dims,
                               const std::vector<Triplet>& positives,
                               const std::vector<Edge>& extra_dt_edges,
                               const std::vector<Edge>& extra_ds_edges) {
  if (dims.drugs < 0 || dims.targets < 0 || dims.diseases < 0) {
    throw InputError("build_graph: negative node count");
  }
  HeteroGraph g;
  g.dims_ = dims;
  g.positives_ = positives;

  auto check = [&](NodeType kind, std::int32_t index, const char* what,
                   std::size_t row) {
    if (index < 0 || index >= g.count(kind)) {
      throw InputError(std::string("build_graph: ") + what + " row " +
                       std::to_string(row) + ": " + to_string(kind) +
                       " index " + std::to_string(index) + " out of range [0, " +
                       std::to_string(g.count(kind)) + ")");
    }
  };

  std::vector<Edge> dt = extra_dt_edges;
  std::vector<Edge> ds = extra_ds_edges;
  for (std::size_t i = 0; i < extra_dt_edges.size(); ++i) {
    check(NodeType::Drug, extra_dt_edges[i].first, "drug-target edge", i);
    check(NodeType::Target, extra_dt_edges[i].second, "drug-target edge", i);
  }
  for (std::size_t i = 0; i < extra_ds_edges.size(); ++i) {
    check(NodeType::Drug, extra_ds_edges[i].first, "drug-disease edge", i);
    check(NodeType::Disease, extra_ds_edges[i].second, "drug-disease edge", i);
  }
  for (std::size_t i = 0; i < positives.size(); ++i) {
    const Triplet& t = positives[i];
    check(NodeType::Drug, t.drug, "triplet", i);
    check(NodeType::Target, t.target, "triplet", i);
    check(NodeType::Disease, t.disease, "triplet", i);
    dt.emplace_back(t.drug, t.target);
    ds.emplace_back(t.drug, t.disease);
  }

  auto dedup = [](std::vector<Edge>& edges) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  };
  dedup(dt);
  dedup(ds);
  g.e_dt_ = std::move(dt);
  g.e_ds_ = std::move(ds);

  g.adj_dt_.assign(dims.drugs, {});
  g.adj_ds_.assign(dims.drugs, {});
  g.adj_td_.assign(dims.targets, {});
  g.adj_sd_.assign(dims.diseases, {});
  for (const auto& [d, t] : g.e_dt_) {
    g.adj_dt_[d].push_back(t);
    g.adj_td_[t].push_back(d);
  }
  for (const auto& [d, s] : g.e_ds_) {
    g.adj_ds_[d].push_back(s);
    g.adj_sd_[s].push_back(d);
  }
  // Edge lists are sorted, so per-drug lists come out sorted already; the
  // reverse lists need an explicit pass.
  for (auto& v : g.adj_td_) std::sort(v.begin(), v.end());
  for (auto& v : g.adj_sd_) std::sort(v.begin(), v.end());

  for (const Triplet& t : positives) {
    g.positive_keys_.insert(g.triplet_key(t.drug, t.target, t.disease));
  }
  return g;
}

std::span<const std::int32_t> HeteroGraph::targets_of(std::int32_t drug) const {
  validate_node(NodeType::Drug, drug, "targets_of");
  return adj_dt_[drug];
}

std::span<const std::int32_t> HeteroGraph::diseases_of(std::int32_t drug) const {
  validate_node(NodeType::Drug, drug, "diseases_of");
  return adj_ds_[drug];
}

std::span<const std::int32_t> HeteroGraph::drugs_of_target(
    std::int32_t target) const {
  validate_node(NodeType::Target, target, "drugs_of_target");
  return adj_td_[target];
}

std::span<const std::int32_t> HeteroGraph::drugs_of_disease(
    std::int32_t disease) const {
  validate_node(NodeType::Disease, disease, "drugs_of_disease");
  return adj_sd_[disease];
}

std::uint64_t HeteroGraph::pair_space_size(NodeId center) const {
  validate_node(center.kind, center.index, "pair_space_size");
  std::uint64_t total = 0;
  switch (center.kind) {
    case NodeType::Drug:
      total = static_cast<std::uint64_t>(adj_dt_[center.index].size()) *
              adj_ds_[center.index].size();
      break;
    case NodeType::Target:
      for (const std::int32_t d : adj_td_[center.index]) {
        total += adj_ds_[d].size();
      }
      break;
    case NodeType::Disease:
      for (const std::int32_t d : adj_sd_[center.index]) {
        total += adj_dt_[d].size();
      }
      break;
  }
  return total;
}

NeighborPairSet HeteroGraph::neighbor_pairs(NodeId center, std::int64_t cap,
                                            std::uint64_t seed) const {
  validate_node(center.kind, center.index, "neighbor_pairs");
  if (cap <= 0) throw InputError("neighbor_pairs: cap must be positive");

  NeighborPairSet out;
  out.center = center;
  const std::uint64_t total = pair_space_size(center);
  if (total == 0) return out;

  // The pair space is addressed by a linear index so a capped sample never
  // materializes the full cross product.
  auto pair_at = [&](std::uint64_t p) -> std::pair<NodeId, NodeId> {
    switch (center.kind) {
      case NodeType::Drug: {
        const auto& ts = adj_dt_[center.index];
        const auto& ss = adj_ds_[center.index];
        return {{NodeType::Target, ts[p / ss.size()]},
                {NodeType::Disease, ss[p % ss.size()]}};
      }
      case NodeType::Target: {
        for (const std::int32_t d : adj_td_[center.index]) {
          const auto& ss = adj_ds_[d];
          if (p < ss.size()) return {{NodeType::Drug, d}, {NodeType::Disease, ss[p]}};
          p -= ss.size();
        }
        break;
      }
      case NodeType::Disease: {
        for (const std::int32_t d : adj_sd_[center.index]) {
          const auto& ts = adj_dt_[d];
          if (p < ts.size()) return {{NodeType::Drug, d}, {NodeType::Target, ts[p]}};
          p -= ts.size();
        }
        break;
      }
    }
    throw Error("neighbor_pairs: linear index out of range");
  };

  std::vector<std::uint64_t> chosen;
  if (total <= static_cast<std::uint64_t>(cap)) {
    chosen.resize(total);
    for (std::uint64_t i = 0; i < total; ++i) chosen[i] = i;
  } else {
    // Floyd's sampling: cap distinct indices, deterministic in the seed.
    Rng rng(seed);
    std::unordered_set<std::uint64_t> picked;
    for (std::uint64_t j = total - cap; j < total; ++j) {
      const std::uint64_t r = rng.below(j + 1);
      if (!picked.insert(r).second) picked.insert(j);
    }
    chosen.assign(picked.begin(), picked.end());
    std::sort(chosen.begin(), chosen.end());
  }

  out.pairs.reserve(chosen.size());
  for (const std::uint64_t p : chosen) out.pairs.push_back(pair_at(p));
  return out;
}

}  // namespace hetrinet
