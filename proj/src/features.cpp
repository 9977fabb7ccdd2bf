#include "hetrinet/features.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace hetrinet {

namespace {

struct PairHash {
  std::size_t operator()(const std::pair<int, int>& p) const {
    return std::hash<std::uint64_t>{}(
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.first)) << 32) |
        static_cast<std::uint32_t>(p.second));
  }
};

// Counts adjacent token pairs left-to-right. Only a pair of identical tokens
// can overlap with itself, so runs of one token contribute floor(run/2).
void count_pairs(const std::vector<int>& tokens,
                 std::unordered_map<std::pair<int, int>, std::int64_t, PairHash>&
                     counts) {
  std::size_t i = 0;
  while (i + 1 < tokens.size()) {
    if (tokens[i] == tokens[i + 1]) {
      std::size_t j = i;
      while (j + 1 < tokens.size() && tokens[j + 1] == tokens[i]) ++j;
      const std::size_t run = j - i + 1;
      counts[{tokens[i], tokens[i]}] += static_cast<std::int64_t>(run / 2);
      i = j;
    } else {
      counts[{tokens[i], tokens[i + 1]}] += 1;
      ++i;
    }
  }
}

// Greedy left-to-right replacement of (a, b) by merged; returns how many
// replacements were made.
std::int64_t apply_merge(std::vector<int>& tokens, int a, int b, int merged) {
  std::int64_t replaced = 0;
  std::size_t w = 0;
  for (std::size_t r = 0; r < tokens.size();) {
    if (r + 1 < tokens.size() && tokens[r] == a && tokens[r + 1] == b) {
      tokens[w++] = merged;
      r += 2;
      ++replaced;
    } else {
      tokens[w++] = tokens[r++];
    }
  }
  tokens.resize(w);
  return replaced;
}

}  // namespace

SubstructureVocab train_vocab(const std::vector<std::string>& corpus,
                              std::int64_t min_frequency,
                              std::int64_t max_vocab) {
  if (corpus.empty()) throw InputError("train_vocab: empty corpus");
  if (min_frequency < 1) {
    throw InputError("train_vocab: min_frequency must be >= 1");
  }
  if (max_vocab < 1) throw InputError("train_vocab: max_vocab must be >= 1");

  SubstructureVocab vocab;
  vocab.min_frequency = min_frequency;
  vocab.max_vocab = max_vocab;

  auto add_token = [&](std::string token, std::int64_t freq) -> int {
    const int id = vocab.size();
    vocab.index.emplace(token, id);
    vocab.tokens.push_back(std::move(token));
    vocab.frequencies.push_back(freq);
    return id;
  };

  // Base alphabet in first-seen order; single characters are always kept.
  std::vector<std::vector<int>> sequences;
  sequences.reserve(corpus.size());
  for (const std::string& s : corpus) {
    std::vector<int> ids;
    ids.reserve(s.size());
    for (const char c : s) {
      const std::string tok(1, c);
      auto it = vocab.index.find(tok);
      int id;
      if (it == vocab.index.end()) {
        id = add_token(tok, 0);
      } else {
        id = it->second;
      }
      ++vocab.frequencies[id];
      ids.push_back(id);
    }
    sequences.push_back(std::move(ids));
  }

  while (vocab.size() < max_vocab) {
    std::unordered_map<std::pair<int, int>, std::int64_t, PairHash> counts;
    for (const auto& seq : sequences) count_pairs(seq, counts);

    // Best pair: highest count, ties by merged token then by the pair
    // itself, so the result is independent of map iteration order.
    bool found = false;
    std::pair<int, int> best{};
    std::string best_merged;
    std::int64_t best_count = 0;
    for (const auto& [pair, count] : counts) {
      if (count < min_frequency) continue;
      std::string merged = vocab.tokens[pair.first] + vocab.tokens[pair.second];
      const bool better =
          !found || count > best_count ||
          (count == best_count &&
           (merged < best_merged ||
            (merged == best_merged &&
             std::tie(vocab.tokens[pair.first], vocab.tokens[pair.second]) <
                 std::tie(vocab.tokens[best.first], vocab.tokens[best.second]))));
      if (better) {
        found = true;
        best = pair;
        best_merged = std::move(merged);
        best_count = count;
      }
    }
    if (!found) break;

    // A merged spelling can already exist via a different split; reuse it.
    int merged_id;
    auto it = vocab.index.find(best_merged);
    if (it != vocab.index.end()) {
      merged_id = it->second;
    } else {
      merged_id = add_token(best_merged, 0);
    }
    std::int64_t replaced = 0;
    for (auto& seq : sequences) {
      replaced += apply_merge(seq, best.first, best.second, merged_id);
    }
    vocab.frequencies[merged_id] += replaced;
    vocab.merges.emplace_back(vocab.tokens[best.first],
                              vocab.tokens[best.second]);
  }
  return vocab;
}

std::vector<int> segment(std::string_view sequence,
                         const SubstructureVocab& vocab, EncodeStats* stats) {
  if (sequence.empty()) throw InputError("encode: empty sequence");

  // Unknown characters set no bit and break adjacency, so merges never
  // bridge across them.
  std::vector<std::vector<int>> runs;
  std::vector<int> current;
  int unknown = 0;
  for (const char c : sequence) {
    auto it = vocab.index.find(std::string(1, c));
    if (it == vocab.index.end()) {
      ++unknown;
      if (!current.empty()) runs.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(it->second);
    }
  }
  if (!current.empty()) runs.push_back(std::move(current));
  if (stats != nullptr) stats->unknown_chars = unknown;

  std::vector<int> out;
  for (auto& run : runs) {
    for (const auto& [left, right] : vocab.merges) {
      const int a = vocab.index.at(left);
      const int b = vocab.index.at(right);
      const int merged = vocab.index.at(left + right);
      apply_merge(run, a, b, merged);
    }
    out.insert(out.end(), run.begin(), run.end());
  }
  return out;
}

FeatureVector encode(std::string_view sequence, const SubstructureVocab& vocab,
                     EncodeStats* stats, bool counts) {
  const std::vector<int> ids = segment(sequence, vocab, stats);
  FeatureVector fv;
  fv.values.assign(vocab.tokens.size(), real_t{0});
  for (const int id : ids) {
    if (counts) {
      fv.values[id] += real_t{1};
    } else {
      fv.values[id] = real_t{1};
    }
  }
  return fv;
}

FeatureVector one_hot(int index, int dimension) {
  if (dimension < 1) throw InputError("one_hot: dimension must be >= 1");
  if (index < 0 || index >= dimension) {
    throw InputError("one_hot: index " + std::to_string(index) +
                     " out of range [0, " + std::to_string(dimension) + ")");
  }
  FeatureVector fv;
  fv.values.assign(dimension, real_t{0});
  fv.values[index] = real_t{1};
  return fv;
}

void save_vocab(const SubstructureVocab& vocab, std::ostream& out) {
  out << "espf-vocab\t1\n";
  out << "min_frequency\t" << vocab.min_frequency << "\n";
  out << "max_vocab\t" << vocab.max_vocab << "\n";
  out << "tokens\t" << vocab.tokens.size() << "\n";
  for (std::size_t i = 0; i < vocab.tokens.size(); ++i) {
    out << vocab.tokens[i] << "\t" << vocab.frequencies[i] << "\n";
  }
  out << "merges\t" << vocab.merges.size() << "\n";
  for (const auto& [left, right] : vocab.merges) {
    out << left << "\t" << right << "\n";
  }
}

void save_vocab(const SubstructureVocab& vocab, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("save_vocab: cannot open " + path);
  save_vocab(vocab, out);
}

namespace {

std::pair<std::string, std::string> split_tab(const std::string& line,
                                              const char* what) {
  const auto pos = line.find('\t');
  if (pos == std::string::npos) {
    throw InputError(std::string("load_vocab: malformed ") + what +
                     " line: " + line);
  }
  return {line.substr(0, pos), line.substr(pos + 1)};
}

}  // namespace

SubstructureVocab load_vocab(std::istream& in) {
  SubstructureVocab vocab;
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) {
      throw InputError(std::string("load_vocab: unexpected end of file in ") +
                       what);
    }
    return line;
  };

  auto [magic, version] = split_tab(next_line("header"), "header");
  if (magic != "espf-vocab" || version != "1") {
    throw InputError("load_vocab: unrecognized header '" + line + "'");
  }
  vocab.min_frequency =
      std::stoll(split_tab(next_line("min_frequency"), "min_frequency").second);
  vocab.max_vocab =
      std::stoll(split_tab(next_line("max_vocab"), "max_vocab").second);
  const std::int64_t n_tokens =
      std::stoll(split_tab(next_line("tokens"), "tokens").second);
  for (std::int64_t i = 0; i < n_tokens; ++i) {
    auto [tok, freq] = split_tab(next_line("token"), "token");
    vocab.index.emplace(tok, vocab.size());
    vocab.tokens.push_back(tok);
    vocab.frequencies.push_back(std::stoll(freq));
  }
  const std::int64_t n_merges =
      std::stoll(split_tab(next_line("merges"), "merges").second);
  for (std::int64_t i = 0; i < n_merges; ++i) {
    auto [left, right] = split_tab(next_line("merge"), "merge");
    if (!vocab.contains(left) || !vocab.contains(right) ||
        !vocab.contains(left + right)) {
      throw InputError("load_vocab: merge references unknown token: " + line);
    }
    vocab.merges.emplace_back(left, right);
  }
  return vocab;
}

SubstructureVocab load_vocab(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("load_vocab: cannot open " + path);
  return load_vocab(in);
}

std::string vocab_to_string(const SubstructureVocab& vocab) {
  std::ostringstream oss;
  save_vocab(vocab, oss);
  return oss.str();
}

}  // namespace hetrinet
