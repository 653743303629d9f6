#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dygcl/data.hpp"
#include "dygcl/model.hpp"

namespace dygcl {

// Everything a subcommand can be told, from three layers with fixed
// precedence: built-in default < config file < command-line flag. The
// DYGCL_SEED environment variable fills in the seed only when neither layer
// set one.
struct RunConfig {
  ModelConfig model;
  SyntheticSpec synth;
  IngestOptions ingest;

  std::string dataset_path;
  std::string embeddings_path;
  std::string corpus_path;
  std::string model_path;
  std::string out_dir = ".";
  std::string split = "test";
  std::string sweep_axis = "historic_days";
  std::vector<int> sweep_values;
  std::string sample_id;

  bool seed_set = false;   // --seed or config `seed`
  bool seeds_set = false;  // --seeds or config `seeds`
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Applies one key; throws ConfigError on unknown keys or unparsable values.
void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value);

// `key = value` lines, '#' comments, blank lines ignored.
KeyValues parse_config_file_text(const std::string& text);
KeyValues parse_config_file(const std::string& path);

// Layered merge on top of `base`, then the env fallback.
RunConfig make_run_config(RunConfig base, const KeyValues& file_kv, const KeyValues& flag_kv,
                          const char* env_seed);

// All keys the registry accepts, for --help.
std::vector<std::string> known_config_keys();

}  // namespace dygcl
