#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hetrinet/common.hpp"
#include "hetrinet/tensor.hpp"

namespace hetrinet {

/// Frequent-substructure vocabulary learned from a string corpus by
/// iterative pair merging. Token order defines the feature bit layout.
struct SubstructureVocab {
  std::vector<std::string> tokens;        // bit index == position
  std::vector<std::int64_t> frequencies;  // corpus frequency at learn time
  std::vector<std::pair<std::string, std::string>> merges;  // learned order
  std::int64_t min_frequency = 1;
  std::int64_t max_vocab = 0;
  std::unordered_map<std::string, int> index;

  int size() const { return static_cast<int>(tokens.size()); }
  bool contains(const std::string& token) const {
    return index.contains(token);
  }
};

struct FeatureVector {
  std::vector<real_t> values;
  int dim() const { return static_cast<int>(values.size()); }
};

struct EncodeStats {
  int unknown_chars = 0;
};

/// Learns a vocabulary: start from single characters, repeatedly merge the
/// most frequent adjacent token pair with count >= min_frequency until no
/// pair qualifies or max_vocab tokens exist. Pair occurrences are counted
/// left-to-right without overlap; ties go to the lexicographically smallest
/// merged token.
SubstructureVocab train_vocab(const std::vector<std::string>& corpus,
                              std::int64_t min_frequency,
                              std::int64_t max_vocab);

/// Segments a sequence by replaying the merge rules in learned order and
/// returns the multi-hot vector over the vocabulary (token counts instead of
/// presence bits when `counts` is set). Characters outside the vocabulary
/// set no bit, act as segment boundaries and are tallied in `stats`.
FeatureVector encode(std::string_view sequence, const SubstructureVocab& vocab,
                     EncodeStats* stats = nullptr, bool counts = false);

/// Token ids of the greedy segmentation (exposed for tests).
std::vector<int> segment(std::string_view sequence,
                         const SubstructureVocab& vocab,
                         EncodeStats* stats = nullptr);

FeatureVector one_hot(int index, int dimension);

void save_vocab(const SubstructureVocab& vocab, std::ostream& out);
void save_vocab(const SubstructureVocab& vocab, const std::string& path);
SubstructureVocab load_vocab(std::istream& in);
SubstructureVocab load_vocab(const std::string& path);
std::string vocab_to_string(const SubstructureVocab& vocab);

}  // namespace hetrinet
