#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "hetrinet/graph.hpp"
#include "hetrinet/model.hpp"

namespace hetrinet {

/// Resolved dataset: external string ids mapped to dense indices per kind
/// (first-seen order), the triplet table, and the raw payloads.
struct DatasetBundle {
  std::vector<std::string> drug_ids;
  std::vector<std::string> target_ids;
  std::vector<std::string> disease_ids;
  std::unordered_map<std::string, std::int32_t> drug_index;
  std::unordered_map<std::string, std::int32_t> target_index;
  std::unordered_map<std::string, std::int32_t> disease_index;

  std::vector<Triplet> triplets;  // deduplicated, labels kept

  std::vector<std::string> drug_smiles;    // parallel to drug_ids, may be ""
  std::vector<std::string> target_seqs;    // parallel to target_ids, may be ""

  Tensor drug_features;     // numeric feature path; empty when unused
  Tensor target_features;
  Tensor disease_features;
  bool has_numeric_features = false;

  int duplicate_rows = 0;

  GraphDims dims() const {
    return {static_cast<std::int32_t>(drug_ids.size()),
            static_cast<std::int32_t>(target_ids.size()),
            static_cast<std::int32_t>(disease_ids.size())};
  }
  std::vector<Triplet> positives() const;
};

/// Reads the triplet table `drug<TAB>target<TAB>disease<TAB>label` plus
/// optional drug SMILES (`drug<TAB>smiles`) and target sequence
/// (`target<TAB>sequence`) tables. Lines starting with '#' and blank lines
/// are ignored; duplicate (drug, target, disease) rows are dropped with a
/// count. Malformed rows raise InputError with file, line and column.
DatasetBundle ingest(const std::string& triplet_tsv,
                     const std::string& drug_tsv = "",
                     const std::string& target_tsv = "");

/// Attaches numeric feature tables (`id<TAB>v0<TAB>v1...`) to a bundle.
/// Every node of the kind must have a row; rows must share one width.
void attach_numeric_features(DatasetBundle& bundle,
                             const std::string& drug_features_tsv,
                             const std::string& target_features_tsv,
                             const std::string& disease_features_tsv);

void write_triplets_tsv(const std::string& path,
                        const std::vector<std::string>& drug_ids,
                        const std::vector<std::string>& target_ids,
                        const std::vector<std::string>& disease_ids,
                        const std::vector<Triplet>& triplets);

void write_features_tsv(const std::string& path,
                        const std::vector<std::string>& ids,
                        const Tensor& features);

}  // namespace hetrinet
