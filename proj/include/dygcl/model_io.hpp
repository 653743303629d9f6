#pragma once

#include <map>
#include <string>

#include "dygcl/model.hpp"

namespace dygcl {

// Self-describing text container: meta key-values, then one block per
// tensor (name, shape, row-major values at 17 significant digits). Both
// sections are written in lexicographic order so re-serialization is
// byte-identical.
struct ModelFile {
  std::map<std::string, std::string> meta;
  std::map<std::string, Mat> tensors;
};

std::string model_to_string(const ModelFile& file);
ModelFile model_from_string(const std::string& text);

void save_model(const ModelFile& file, const std::string& path);
ModelFile load_model(const std::string& path);

// Meta captures everything needed to rebuild the architecture.
ModelFile pack_model(const DyGclModel& model, std::uint64_t seed);

struct UnpackedModel {
  ModelConfig config;
  int feature_dim = 0;
  int num_steps = 0;
  std::uint64_t seed = 0;
};

UnpackedModel unpack_meta(const ModelFile& file);

// Rebuilds the model and restores every tensor, validating names and shapes.
DyGclModel model_from_file(const ModelFile& file);

}  // namespace dygcl
