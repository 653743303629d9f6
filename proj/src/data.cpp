#include "dygcl/data.hpp"

#include <algorithm>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>

#include "dygcl/util.hpp"

namespace dygcl {

using nlohmann::json;

SemanticFeatures features_for(const FeatureTable& table, const DynamicGraphSample& s) {
  SemanticFeatures out;
  out.h_sem.resize(s.num_nodes, table.vectors.cols());
  for (int i = 0; i < s.num_nodes; ++i) {
    const int vid = s.node_vocab_ids[static_cast<std::size_t>(i)];
    if (vid < 0 || vid >= table.vectors.rows())
      throw ValidationError("vocab id " + std::to_string(vid) + " outside feature table (" +
                            std::to_string(table.vectors.rows()) + " rows)");
    out.h_sem.row(i) = table.vectors.row(vid);
  }
  return out;
}

int Vocabulary::add(const std::string& token) {
  auto it = index.find(token);
  if (it != index.end()) return it->second;
  const int id = size();
  index.emplace(token, id);
  tokens.push_back(token);
  return id;
}

int Vocabulary::lookup(const std::string& token) const {
  auto it = index.find(token);
  return it == index.end() ? -1 : it->second;
}

DynamicGraphSample ingest_corpus(const std::vector<CorpusDay>& days, const IngestOptions& opts,
                                 const Vocabulary& vocab) {
  if (opts.window < 2) throw ConfigError("co-occurrence window must be at least 2");
  if (days.empty()) throw ValidationError("need at least one day");

  // Union node set over the whole window, ordered by vocab id.
  std::set<int> vocab_ids;
  for (const auto& day : days)
    for (const auto& doc : day.docs)
      for (const auto& token : doc) {
        const int vid = vocab.lookup(token);
        if (vid < 0) {
          if (opts.missing == MissingToken::kError)
            throw ValidationError("token not in vocabulary: " + token);
          continue;
        }
        vocab_ids.insert(vid);
      }

  DynamicGraphSample out;
  out.node_vocab_ids.assign(vocab_ids.begin(), vocab_ids.end());
  out.num_nodes = static_cast<int>(out.node_vocab_ids.size());
  if (out.num_nodes == 0) throw ValidationError("no in-vocabulary tokens in the window");

  std::unordered_map<int, int> node_of;
  for (int i = 0; i < out.num_nodes; ++i) node_of[out.node_vocab_ids[static_cast<std::size_t>(i)]] = i;

  for (const auto& day : days) {
    std::map<std::pair<int, int>, double> counts;
    for (const auto& doc : day.docs) {
      std::vector<int> ids;
      ids.reserve(doc.size());
      for (const auto& token : doc) {
        const int vid = vocab.lookup(token);
        if (vid >= 0) ids.push_back(node_of.at(vid));
        // skipped tokens also drop out of the position sequence
      }
      for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size() && j < i + static_cast<std::size_t>(opts.window);
             ++j) {
          if (ids[i] == ids[j]) continue;
          auto key = std::minmax(ids[i], ids[j]);
          counts[{key.first, key.second}] += 1.0;
        }
    }
    std::vector<std::pair<int, int>> pairs;
    std::vector<double> weights;
    for (const auto& [key, count] : counts) {
      pairs.push_back(key);
      weights.push_back(opts.weighted ? count : 1.0);
    }
    out.snapshots.push_back(make_adjacency(out.num_nodes, pairs, weights));
  }
  return out;
}

EmbeddingTable load_embeddings(const std::string& path, int dim) {
  if (dim < 1) throw ConfigError("embedding dim must be positive");
  EmbeddingTable table;
  const auto lines = read_lines(path);
  std::vector<std::vector<double>> rows;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (trim(lines[ln]).empty()) continue;
    std::istringstream ss(lines[ln]);
    std::string token;
    ss >> token;
    std::vector<double> values;
    double v;
    while (ss >> v) values.push_back(v);
    if (static_cast<int>(values.size()) != dim)
      throw ParseError(path + ":" + std::to_string(ln + 1) + ": expected " + std::to_string(dim) +
                       " values for token '" + token + "', got " +
                       std::to_string(values.size()));
    if (table.vocab.lookup(token) >= 0)
      throw ParseError(path + ":" + std::to_string(ln + 1) + ": duplicate token '" + token + "'");
    table.vocab.add(token);
    rows.push_back(std::move(values));
  }
  table.vectors.resize(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < dim; ++j) table.vectors(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  return table;
}

void write_embeddings(const EmbeddingTable& table, const std::string& path) {
  std::string out;
  for (int i = 0; i < table.vocab.size(); ++i) {
    out += table.vocab.tokens[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < table.vectors.cols(); ++j) {
      out += ' ';
      out += format_g17(table.vectors(i, j));
    }
    out += '\n';
  }
  atomic_write_file(path, out);
}

FeatureTable resolve_features(const Vocabulary& vocab, const std::optional<EmbeddingTable>& table,
                              int dim, std::uint64_t seed) {
  if (table && table->vectors.cols() != dim)
    throw ConfigError("embedding table dim " + std::to_string(table->vectors.cols()) +
                      " does not match requested dim " + std::to_string(dim));
  Rng rng(seed);
  FeatureTable out;
  out.vectors.resize(vocab.size(), dim);
  for (int i = 0; i < vocab.size(); ++i) {
    const int row = table ? table->vocab.lookup(vocab.tokens[static_cast<std::size_t>(i)]) : -1;
    if (row >= 0) {
      out.vectors.row(i) = table->vectors.row(row);
    } else {
      for (int j = 0; j < dim; ++j) out.vectors(i, j) = rng.uniform(-0.1, 0.1);
    }
  }
  return out;
}

void SyntheticSpec::validate() const {
  if (num_nodes < 1) throw ConfigError("synthetic: need at least one node");
  if (num_steps < 1) throw ConfigError("synthetic: need at least one snapshot");
  if (feature_dim < 1) throw ConfigError("synthetic: feature dim must be positive");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0))
    throw ConfigError("synthetic: edge probability must be in [0, 1]");
  if (motif_size > num_nodes) throw ConfigError("motif larger than graph");
  if (motif_size < 2) throw ConfigError("synthetic: motif needs at least two nodes");
  if (!(positive_fraction >= 0.0 && positive_fraction <= 1.0))
    throw ConfigError("synthetic: positive fraction must be in [0, 1]");
  if (num_samples < 1) throw ConfigError("synthetic: need at least one sample");
  if (!growth.empty() && static_cast<int>(growth.size()) != num_steps)
    throw ConfigError("synthetic: growth schedule length must equal the snapshot count");
  for (int g : growth)
    if (g < 0) throw ConfigError("synthetic: growth entries must be non-negative");
}

std::vector<int> SyntheticSpec::default_growth(int num_steps, int motif_size) {
  const int total = motif_size * (motif_size - 1) / 2;
  std::vector<int> growth(static_cast<std::size_t>(num_steps), 0);
  const int ramp_len = std::max(1, num_steps / 2);
  const int start = num_steps - ramp_len;
  int assigned = 0;
  for (int t = start; t < num_steps; ++t) {
    const int target = total * (t - start + 1) / ramp_len;
    growth[static_cast<std::size_t>(t)] = target - assigned;
    assigned = target;
  }
  return growth;
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::vector<int> growth = spec.growth.empty()
                                ? SyntheticSpec::default_growth(spec.num_steps, spec.motif_size)
                                : spec.growth;

  Rng rng(spec.seed);
  const int n = spec.num_nodes;

  // One dataset-wide motif subset, marked in the shared features so both
  // classes look identical until the structure ramps.
  std::vector<int> all_nodes(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all_nodes[static_cast<std::size_t>(i)] = i;
  rng.shuffle(all_nodes);
  std::vector<int> motif(all_nodes.begin(), all_nodes.begin() + spec.motif_size);
  std::sort(motif.begin(), motif.end());

  SyntheticData out;
  out.motif_nodes = motif;
  out.features.vectors.resize(n, spec.feature_dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < spec.feature_dim; ++j) out.features.vectors(i, j) = rng.uniform(-0.1, 0.1);
  for (int m : motif) out.features.vectors.row(m).array() += 0.5;

  std::vector<std::pair<int, int>> motif_pairs;
  for (std::size_t a = 0; a < motif.size(); ++a)
    for (std::size_t b = a + 1; b < motif.size(); ++b)
      motif_pairs.emplace_back(motif[a], motif[b]);

  const int n_pos = static_cast<int>(std::lround(spec.positive_fraction * spec.num_samples));
  std::vector<int> labels(static_cast<std::size_t>(spec.num_samples), 0);
  for (int i = 0; i < n_pos; ++i) labels[static_cast<std::size_t>(i)] = 1;
  rng.shuffle(labels);

  for (int s = 0; s < spec.num_samples; ++s) {
    DynamicGraphSample sample;
    sample.sample_id = "s" + std::to_string(s);
    sample.num_nodes = n;
    sample.label = labels[static_cast<std::size_t>(s)];
    for (int i = 0; i < n; ++i) sample.node_vocab_ids.push_back(i);

    std::vector<std::pair<int, int>> planted = motif_pairs;
    rng.shuffle(planted);

    int planted_count = 0;
    for (int t = 0; t < spec.num_steps; ++t) {
      std::set<std::pair<int, int>> edges;
      for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
          if (rng.uniform() < spec.edge_prob) edges.insert({u, v});

      if (sample.label == 1) {
        planted_count = std::min<int>(planted_count + growth[static_cast<std::size_t>(t)],
                                      static_cast<int>(planted.size()));
        for (int e = 0; e < planted_count; ++e) {
          auto [u, v] = planted[static_cast<std::size_t>(e)];
          edges.insert({std::min(u, v), std::max(u, v)});
        }
      }
      sample.snapshots.push_back(
          make_adjacency(n, std::vector<std::pair<int, int>>(edges.begin(), edges.end())));
    }
    out.dataset.samples.push_back(std::move(sample));
  }
  return out;
}

namespace {

json sample_to_json(const DynamicGraphSample& s) {
  json rec;
  rec["id"] = s.sample_id;
  rec["label"] = s.label;
  rec["num_nodes"] = s.num_nodes;
  rec["node_ids"] = s.node_vocab_ids;
  json snaps = json::array();
  for (const auto& snap : s.snapshots) {
    json edges = json::array();
    for (const auto& e : snap.edges) {
      if (e.w == 1.0)
        edges.push_back(json::array({e.u, e.v}));
      else
        edges.push_back(json::array({e.u, e.v, e.w}));
    }
    snaps.push_back(std::move(edges));
  }
  rec["snapshots"] = std::move(snaps);
  return rec;
}

DynamicGraphSample sample_from_json(const json& rec, std::size_t line_no) {
  const auto fail = [line_no](const std::string& what) -> ParseError {
    return ParseError("line " + std::to_string(line_no) + ": " + what);
  };
  try {
    DynamicGraphSample s;
    if (!rec.contains("id")) throw fail("missing field 'id'");
    if (!rec.contains("label")) throw fail("missing field 'label'");
    if (!rec.contains("num_nodes")) throw fail("missing field 'num_nodes'");
    if (!rec.contains("node_ids")) throw fail("missing field 'node_ids'");
    if (!rec.contains("snapshots")) throw fail("missing field 'snapshots'");
    s.sample_id = rec.at("id").get<std::string>();
    s.label = rec.at("label").get<int>();
    s.num_nodes = rec.at("num_nodes").get<int>();
    s.node_vocab_ids = rec.at("node_ids").get<std::vector<int>>();
    for (const auto& snap : rec.at("snapshots")) {
      std::vector<std::pair<int, int>> pairs;
      std::vector<double> weights;
      for (const auto& e : snap) {
        if (!e.is_array() || e.size() < 2 || e.size() > 3)
          throw fail("field 'snapshots': edge must be [u, v] or [u, v, w]");
        pairs.emplace_back(e[0].get<int>(), e[1].get<int>());
        weights.push_back(e.size() == 3 ? e[2].get<double>() : 1.0);
      }
      s.snapshots.push_back(make_adjacency(s.num_nodes, pairs, weights));
    }
    return s;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw fail(e.what());
  }
}

}  // namespace

std::string dataset_to_string(const Dataset& data) {
  std::string out;
  for (const auto& s : data.samples) {
    out += sample_to_json(s).dump();
    out += '\n';
  }
  return out;
}

Dataset dataset_from_string(const std::string& text) {
  Dataset data;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded())
      throw ParseError("line " + std::to_string(line_no) + ": invalid record");
    data.samples.push_back(sample_from_json(rec, line_no));
  }
  return data;
}

void write_dataset(const Dataset& data, const std::string& path) {
  atomic_write_file(path, dataset_to_string(data));
}

Dataset read_dataset(const std::string& path) { return dataset_from_string(read_file(path)); }

std::vector<LabeledCorpus> corpus_from_string(const std::string& text) {
  std::vector<LabeledCorpus> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded())
      throw ParseError("corpus line " + std::to_string(line_no) + ": invalid record");
    try {
      LabeledCorpus sample;
      sample.id = rec.at("id").get<std::string>();
      sample.label = rec.at("label").get<int>();
      for (const auto& day : rec.at("days")) {
        CorpusDay d;
        d.date = day.value("date", "");
        for (const auto& doc : day.at("docs"))
          d.docs.push_back(doc.get<std::vector<std::string>>());
        sample.days.push_back(std::move(d));
      }
      out.push_back(std::move(sample));
    } catch (const std::exception& e) {
      throw ParseError("corpus line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<LabeledCorpus> read_corpus(const std::string& path) {
  return corpus_from_string(read_file(path));
}

FeatureTable features_for_dataset(const Dataset& data, const std::optional<EmbeddingTable>& table,
                                  int dim, std::uint64_t seed) {
  if (table && table->vectors.cols() != dim)
    throw ConfigError("embedding table dim " + std::to_string(table->vectors.cols()) +
                      " does not match requested dim " + std::to_string(dim));
  int max_id = -1;
  for (const auto& s : data.samples)
    for (int vid : s.node_vocab_ids) max_id = std::max(max_id, vid);
  const Eigen::Index table_rows = table ? table->vectors.rows() : 0;
  const Eigen::Index rows = std::max<Eigen::Index>(max_id + 1, table_rows);

  Rng rng(seed);
  FeatureTable out;
  out.vectors.resize(rows, dim);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (i < table_rows) {
      out.vectors.row(i) = table->vectors.row(i);
    } else {
      for (int j = 0; j < dim; ++j) out.vectors(i, j) = rng.uniform(-0.1, 0.1);
    }
  }
  return out;
}

}  // namespace dygcl
