#include "dygcl/run_config.hpp"

#include <cstdlib>

#include "dygcl/util.hpp"

namespace dygcl {

namespace {

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + value + "'");
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a seed, got '" + value + "'");
  }
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  for (const auto& part : split(value, ','))
    if (!trim(part).empty()) out.push_back(parse_int(key, trim(part)));
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& key, const std::string& value) {
  std::vector<std::uint64_t> out;
  for (const auto& part : split(value, ','))
    if (!trim(part).empty()) out.push_back(parse_u64(key, trim(part)));
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

}  // namespace

void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  // model
  if (key == "embed-dim") cfg.model.embed_dim = parse_int(key, value);
  else if (key == "hidden") cfg.model.hidden = parse_int(key, value);
  else if (key == "global-width") cfg.model.global_width = parse_int(key, value);
  else if (key == "pool-blocks") cfg.model.pool_blocks = parse_int(key, value);
  else if (key == "pool-ratio") cfg.model.pool_ratio = parse_double(key, value);
  else if (key == "rnn") cfg.model.rnn_kind = value;
  else if (key == "loss-alpha") cfg.model.loss_weight = parse_double(key, value);
  else if (key == "use-contrastive") cfg.model.use_contrastive = parse_bool(key, value);
  else if (key == "lr") cfg.model.learning_rate = parse_double(key, value);
  else if (key == "weight-decay") cfg.model.weight_decay = parse_double(key, value);
  else if (key == "dropout") cfg.model.dropout = parse_double(key, value);
  else if (key == "mlp-hidden") cfg.model.mlp_hidden = parse_int(key, value);
  else if (key == "gcn-act") cfg.model.gcn_activation = value;
  else if (key == "score-act") cfg.model.score_activation = value;
  else if (key == "share-local-weights") cfg.model.share_local_weights = parse_bool(key, value);
  else if (key == "batch-size") cfg.model.batch_size = parse_int(key, value);
  else if (key == "max-epochs") cfg.model.max_epochs = parse_int(key, value);
  else if (key == "patience") cfg.model.patience = parse_int(key, value);
  else if (key == "seeds") {
    cfg.model.seeds = parse_u64_list(key, value);
    cfg.seeds_set = true;
  }
  else if (key == "historic-days") cfg.model.historic_days = parse_int(key, value);
  else if (key == "lead-days") cfg.model.lead_days = parse_int(key, value);
  // synthetic generation
  else if (key == "n") cfg.synth.num_nodes = parse_int(key, value);
  else if (key == "t") cfg.synth.num_steps = parse_int(key, value);
  else if (key == "d") cfg.synth.feature_dim = parse_int(key, value);
  else if (key == "samples") cfg.synth.num_samples = parse_int(key, value);
  else if (key == "p") cfg.synth.edge_prob = parse_double(key, value);
  else if (key == "m") cfg.synth.motif_size = parse_int(key, value);
  else if (key == "growth") {
    cfg.synth.growth.clear();
    for (int g : parse_int_list(key, value)) cfg.synth.growth.push_back(g);
  }
  else if (key == "positive-fraction") cfg.synth.positive_fraction = parse_double(key, value);
  else if (key == "seed") {
    cfg.synth.seed = parse_u64(key, value);
    cfg.seed_set = true;
  }
  // corpus ingestion
  else if (key == "window") cfg.ingest.window = parse_int(key, value);
  else if (key == "weighted") cfg.ingest.weighted = parse_bool(key, value);
  else if (key == "missing-token") {
    if (value == "skip") cfg.ingest.missing = MissingToken::kSkip;
    else if (value == "error") cfg.ingest.missing = MissingToken::kError;
    else throw ConfigError("key 'missing-token': expected skip or error, got '" + value + "'");
  }
  // paths and subcommand options
  else if (key == "dataset") cfg.dataset_path = value;
  else if (key == "embeddings") cfg.embeddings_path = value;
  else if (key == "corpus") cfg.corpus_path = value;
  else if (key == "model") cfg.model_path = value;
  else if (key == "out-dir") cfg.out_dir = value;
  else if (key == "split") cfg.split = value;
  else if (key == "axis") cfg.sweep_axis = value;
  else if (key == "values") cfg.sweep_values = parse_int_list(key, value);
  else if (key == "sample-id") cfg.sample_id = value;
  else throw ConfigError("unknown config key: " + key);
}

KeyValues parse_config_file_text(const std::string& text) {
  KeyValues out;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected `key = value`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    out.emplace_back(key, value);
  }
  return out;
}

KeyValues parse_config_file(const std::string& path) {
  return parse_config_file_text(read_file(path));
}

RunConfig make_run_config(RunConfig base, const KeyValues& file_kv, const KeyValues& flag_kv,
                          const char* env_seed) {
  for (const auto& [key, value] : file_kv) apply_config_key(base, key, value);
  for (const auto& [key, value] : flag_kv) apply_config_key(base, key, value);

  if (!base.seed_set && !base.seeds_set && env_seed != nullptr) {
    base.synth.seed = parse_u64("DYGCL_SEED", env_seed);
    base.model.seeds = {base.synth.seed};
    return base;
  }
  // A single --seed also drives training when no seed list was given.
  if (base.seed_set && !base.seeds_set) base.model.seeds = {base.synth.seed};
  return base;
}

std::vector<std::string> known_config_keys() {
  return {"embed-dim", "hidden", "global-width", "pool-blocks", "pool-ratio", "rnn",
          "loss-alpha", "use-contrastive", "lr", "weight-decay", "dropout", "mlp-hidden",
          "gcn-act", "score-act", "share-local-weights", "batch-size", "max-epochs", "patience",
          "seeds", "historic-days", "lead-days", "n", "t", "d", "samples", "p", "m", "growth",
          "positive-fraction", "seed", "window", "weighted", "missing-token", "dataset",
          "embeddings", "corpus", "model", "out-dir", "split", "axis", "values", "sample-id"};
}

}  // namespace dygcl
