#include "hetrinet/dataset.hpp"

#include <charconv>
#include <fstream>
#include <unordered_set>

namespace hetrinet {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

[[noreturn]] void malformed(const std::string& file, int line_no, int column,
                            const std::string& what) {
  throw InputError(file + ":" + std::to_string(line_no) + ": column " +
                   std::to_string(column) + ": " + what);
}

// Calls fn(line_no, columns) for every data line.
template <typename Fn>
void for_each_row(const std::string& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    fn(line_no, split_tabs(line));
  }
}

std::int32_t intern(const std::string& id,
                    std::unordered_map<std::string, std::int32_t>& index,
                    std::vector<std::string>& ids) {
  auto it = index.find(id);
  if (it != index.end()) return it->second;
  const auto dense = static_cast<std::int32_t>(ids.size());
  index.emplace(id, dense);
  ids.push_back(id);
  return dense;
}

double parse_double(const std::string& file, int line_no, int column,
                    const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    malformed(file, line_no, column, "expected a number, got '" + text + "'");
  }
}

}  // namespace

std::vector<Triplet> DatasetBundle::positives() const {
  std::vector<Triplet> out;
  for (const Triplet& t : triplets) {
    if (t.label == 1) out.push_back(t);
  }
  return out;
}

DatasetBundle ingest(const std::string& triplet_tsv,
                     const std::string& drug_tsv,
                     const std::string& target_tsv) {
  DatasetBundle b;
  std::unordered_set<std::uint64_t> seen;

  for_each_row(triplet_tsv, [&](int line_no, const std::vector<std::string>& cols) {
    if (cols.size() != 4) {
      malformed(triplet_tsv, line_no, static_cast<int>(cols.size()),
                "expected 4 columns (drug, target, disease, label), got " +
                    std::to_string(cols.size()));
    }
    Triplet t;
    t.drug = intern(cols[0], b.drug_index, b.drug_ids);
    t.target = intern(cols[1], b.target_index, b.target_ids);
    t.disease = intern(cols[2], b.disease_index, b.disease_ids);
    if (cols[3] == "1") {
      t.label = 1;
    } else if (cols[3] == "0") {
      t.label = 0;
    } else {
      malformed(triplet_tsv, line_no, 4,
                "label must be 0 or 1, got '" + cols[3] + "'");
    }
    // Dedup on (drug, target, disease); first row wins. The packed key is
    // collision-free for up to 2^21 nodes per kind.
    if (t.drug >= (1 << 21) || t.target >= (1 << 21) || t.disease >= (1 << 21)) {
      malformed(triplet_tsv, line_no, 1, "more than 2^21 distinct ids per kind");
    }
    const std::uint64_t key = (static_cast<std::uint64_t>(t.drug) << 42) |
                              (static_cast<std::uint64_t>(t.target) << 21) |
                              static_cast<std::uint64_t>(t.disease);
    if (!seen.insert(key).second) {
      ++b.duplicate_rows;
      return;
    }
    b.triplets.push_back(t);
  });

  b.drug_smiles.assign(b.drug_ids.size(), "");
  if (!drug_tsv.empty()) {
    for_each_row(drug_tsv, [&](int line_no, const std::vector<std::string>& cols) {
      if (cols.size() != 2) {
        malformed(drug_tsv, line_no, static_cast<int>(cols.size()),
                  "expected 2 columns (drug, smiles)");
      }
      const std::int32_t d = intern(cols[0], b.drug_index, b.drug_ids);
      if (d >= static_cast<std::int32_t>(b.drug_smiles.size())) {
        b.drug_smiles.resize(d + 1, "");
      }
      b.drug_smiles[d] = cols[1];
    });
  }

  b.target_seqs.assign(b.target_ids.size(), "");
  if (!target_tsv.empty()) {
    for_each_row(target_tsv, [&](int line_no, const std::vector<std::string>& cols) {
      if (cols.size() != 2) {
        malformed(target_tsv, line_no, static_cast<int>(cols.size()),
                  "expected 2 columns (target, sequence)");
      }
      const std::int32_t t = intern(cols[0], b.target_index, b.target_ids);
      if (t >= static_cast<std::int32_t>(b.target_seqs.size())) {
        b.target_seqs.resize(t + 1, "");
      }
      b.target_seqs[t] = cols[1];
    });
  }
  return b;
}

namespace {

// Nodes may legitimately appear only in a feature table (isolated nodes), so
// unknown ids are interned rather than rejected.
Tensor load_feature_table(const std::string& path,
                          std::unordered_map<std::string, std::int32_t>& index,
                          std::vector<std::string>& ids, const char* kind) {
  std::vector<std::vector<real_t>> rows;
  int width = -1;
  for_each_row(path, [&](int line_no, const std::vector<std::string>& cols) {
    if (cols.size() < 2) {
      malformed(path, line_no, static_cast<int>(cols.size()),
                "expected id plus at least one value");
    }
    const std::int32_t dense = intern(cols[0], index, ids);
    std::vector<real_t> values;
    values.reserve(cols.size() - 1);
    for (std::size_t c = 1; c < cols.size(); ++c) {
      values.push_back(static_cast<real_t>(
          parse_double(path, line_no, static_cast<int>(c + 1), cols[c])));
    }
    if (width < 0) {
      width = static_cast<int>(values.size());
    } else if (width != static_cast<int>(values.size())) {
      malformed(path, line_no, static_cast<int>(cols.size()),
                "row width " + std::to_string(values.size()) +
                    " differs from earlier rows (" + std::to_string(width) + ")");
    }
    if (rows.size() <= static_cast<std::size_t>(dense)) rows.resize(dense + 1);
    rows[dense] = std::move(values);
  });
  if (width < 0) throw InputError(path + ": no feature rows");
  rows.resize(ids.size());
  Tensor out(static_cast<int>(ids.size()), width);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    if (rows[r].empty()) {
      throw InputError(path + ": missing features for " + std::string(kind) +
                       " '" + ids[r] + "'");
    }
    for (int c = 0; c < width; ++c) out.at(static_cast<int>(r), c) = rows[r][c];
  }
  return out;
}

}  // namespace

void attach_numeric_features(DatasetBundle& bundle,
                             const std::string& drug_features_tsv,
                             const std::string& target_features_tsv,
                             const std::string& disease_features_tsv) {
  bundle.drug_features = load_feature_table(drug_features_tsv,
                                            bundle.drug_index, bundle.drug_ids,
                                            "drug");
  bundle.target_features = load_feature_table(
      target_features_tsv, bundle.target_index, bundle.target_ids, "target");
  bundle.disease_features =
      load_feature_table(disease_features_tsv, bundle.disease_index,
                         bundle.disease_ids, "disease");
  bundle.has_numeric_features = true;
}

void write_triplets_tsv(const std::string& path,
                        const std::vector<std::string>& drug_ids,
                        const std::vector<std::string>& target_ids,
                        const std::vector<std::string>& disease_ids,
                        const std::vector<Triplet>& triplets) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path + " for writing");
  out << "# drug\ttarget\tdisease\tlabel\n";
  for (const Triplet& t : triplets) {
    out << drug_ids.at(t.drug) << "\t" << target_ids.at(t.target) << "\t"
        << disease_ids.at(t.disease) << "\t" << static_cast<int>(t.label)
        << "\n";
  }
}

void write_features_tsv(const std::string& path,
                        const std::vector<std::string>& ids,
                        const Tensor& features) {
  if (features.rows() != static_cast<int>(ids.size())) {
    throw InputError("write_features_tsv: " + std::to_string(ids.size()) +
                     " ids vs " + std::to_string(features.rows()) + " rows");
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path + " for writing");
  out.precision(17);
  for (int r = 0; r < features.rows(); ++r) {
    out << ids[r];
    for (int c = 0; c < features.cols(); ++c) {
      out << "\t" << static_cast<double>(features.at(r, c));
    }
    out << "\n";
  }
}

}  // namespace hetrinet
