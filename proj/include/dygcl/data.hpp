#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dygcl/graph.hpp"
#include "dygcl/rng.hpp"

namespace dygcl {

struct Dataset {
  std::vector<DynamicGraphSample> samples;
};

// Rows indexed by vocabulary id; samples select their SemanticFeatures rows
// through node_vocab_ids.
struct FeatureTable {
  Mat vectors;
};

SemanticFeatures features_for(const FeatureTable& table, const DynamicGraphSample& s);

// One day's worth of tokenized documents.
struct CorpusDay {
  std::string date;
  std::vector<std::vector<std::string>> docs;
};

struct Vocabulary {
  std::unordered_map<std::string, int> index;
  std::vector<std::string> tokens;

  int add(const std::string& token);        // existing index if known
  int lookup(const std::string& token) const;  // -1 when missing
  int size() const { return static_cast<int>(tokens.size()); }
};

enum class MissingToken { kSkip, kError };

struct IngestOptions {
  int window = 5;
  bool weighted = false;  // weights = co-occurrence multiplicities
  MissingToken missing = MissingToken::kSkip;
};

// Union node set over all days; day t gets edge (u, v) iff the tokens
// co-occur within any length-w sliding window of any document that day.
// The label stays 0; callers attach it.
DynamicGraphSample ingest_corpus(const std::vector<CorpusDay>& days, const IngestOptions& opts,
                                 const Vocabulary& vocab);

struct EmbeddingTable {
  Vocabulary vocab;
  Mat vectors;
};

// Plain text, one token per line: `token v1 v2 ... vd`.
EmbeddingTable load_embeddings(const std::string& path, int dim);
void write_embeddings(const EmbeddingTable& table, const std::string& path);

// Feature rows for `vocab`: the embedding row when the token is covered,
// otherwise seeded uniform(-0.1, 0.1). Without a table every row is random.
FeatureTable resolve_features(const Vocabulary& vocab, const std::optional<EmbeddingTable>& table,
                              int dim, std::uint64_t seed);

// Planted-precursor generator: negatives are per-snapshot random graphs;
// positives additionally densify a fixed node subset late in the window.
struct SyntheticSpec {
  int num_nodes = 30;
  int num_steps = 5;
  int feature_dim = 16;
  double edge_prob = 0.05;
  int motif_size = 6;
  std::vector<int> growth;  // motif edges added per snapshot; empty = default ramp
  double positive_fraction = 0.5;
  int num_samples = 200;
  std::uint64_t seed = 1;

  void validate() const;
  // Zero for the first half of the window, then a ramp that completes the
  // clique on the final snapshot.
  static std::vector<int> default_growth(int num_steps, int motif_size);
};

struct SyntheticData {
  Dataset dataset;
  FeatureTable features;
  std::vector<int> motif_nodes;
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

// Line-delimited records; read(write(x)) == x and re-serialization is
// byte-identical.
void write_dataset(const Dataset& data, const std::string& path);
Dataset read_dataset(const std::string& path);
std::string dataset_to_string(const Dataset& data);
Dataset dataset_from_string(const std::string& text);

// Labeled multi-day text windows, one JSON record per line.
struct LabeledCorpus {
  std::string id;
  int label = 0;
  std::vector<CorpusDay> days;
};

std::vector<LabeledCorpus> corpus_from_string(const std::string& text);
std::vector<LabeledCorpus> read_corpus(const std::string& path);

// Feature rows for a dataset whose vocab ids index embedding-file lines;
// ids beyond the table (or all of them, without a table) get seeded
// uniform(-0.1, 0.1) rows.
FeatureTable features_for_dataset(const Dataset& data, const std::optional<EmbeddingTable>& table,
                                  int dim, std::uint64_t seed);

}  // namespace dygcl
