#include "dygcl/model_io.hpp"

#include <sstream>

#include "dygcl/util.hpp"

namespace dygcl {

namespace {

constexpr const char* kMagic = "dygcl-model 1";

ParseError bad_line(std::size_t line_no, const std::string& what) {
  return ParseError("model file line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::string model_to_string(const ModelFile& file) {
  std::string out = kMagic;
  out += '\n';
  for (const auto& [key, value] : file.meta) {
    out += "meta ";
    out += key;
    out += ' ';
    out += value;
    out += '\n';
  }
  for (const auto& [name, mat] : file.tensors) {
    out += "tensor ";
    out += name;
    out += ' ';
    out += std::to_string(mat.rows());
    out += ' ';
    out += std::to_string(mat.cols());
    out += '\n';
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
      for (Eigen::Index j = 0; j < mat.cols(); ++j) {
        if (j > 0) out += ' ';
        out += format_g17(mat(i, j));
      }
      out += '\n';
    }
  }
  return out;
}

ModelFile model_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line) || line != kMagic)
    throw ParseError("model file: missing '" + std::string(kMagic) + "' header");
  ++line_no;

  ModelFile file;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "meta") {
      std::string key, value;
      ss >> key >> value;
      if (key.empty() || value.empty()) throw bad_line(line_no, "malformed meta entry");
      file.meta[key] = value;
    } else if (tag == "tensor") {
      std::string name;
      Eigen::Index rows = -1, cols = -1;
      ss >> name >> rows >> cols;
      if (name.empty() || rows < 0 || cols < 0)
        throw bad_line(line_no, "malformed tensor header");
      Mat mat(rows, cols);
      for (Eigen::Index i = 0; i < rows; ++i) {
        if (!std::getline(in, line)) throw bad_line(line_no, "truncated tensor " + name);
        ++line_no;
        std::istringstream row(line);
        for (Eigen::Index j = 0; j < cols; ++j)
          if (!(row >> mat(i, j)))
            throw bad_line(line_no, "tensor " + name + ": expected " + std::to_string(cols) +
                                        " values");
      }
      if (file.tensors.count(name)) throw bad_line(line_no, "duplicate tensor " + name);
      file.tensors[name] = std::move(mat);
    } else {
      throw bad_line(line_no, "unknown record '" + tag + "'");
    }
  }
  return file;
}

void save_model(const ModelFile& file, const std::string& path) {
  atomic_write_file(path, model_to_string(file));
}

ModelFile load_model(const std::string& path) { return model_from_string(read_file(path)); }

ModelFile pack_model(const DyGclModel& model, std::uint64_t seed) {
  const ModelConfig& cfg = model.config();
  ModelFile file;
  file.meta["kind"] = "dygcl";
  file.meta["embed_dim"] = std::to_string(cfg.embed_dim);
  file.meta["hidden"] = std::to_string(cfg.hidden);
  file.meta["global_width"] = std::to_string(cfg.global_width);
  file.meta["pool_blocks"] = std::to_string(cfg.pool_blocks);
  file.meta["pool_ratio"] = format_g17(cfg.pool_ratio);
  file.meta["rnn"] = cfg.rnn_kind;
  file.meta["loss_alpha"] = format_g17(cfg.loss_weight);
  file.meta["use_contrastive"] = cfg.use_contrastive ? "1" : "0";
  file.meta["mlp_hidden"] = std::to_string(cfg.mlp_hidden);
  file.meta["gcn_act"] = cfg.gcn_activation;
  file.meta["score_act"] = cfg.score_activation;
  file.meta["share_local_weights"] = cfg.share_local_weights ? "1" : "0";
  file.meta["dropout"] = format_g17(cfg.dropout);
  file.meta["feature_dim"] = std::to_string(model.feature_dim());
  file.meta["num_steps"] = std::to_string(model.num_steps());
  file.meta["seed"] = std::to_string(seed);
  for (const auto& name : model.params().names()) file.tensors[name] = model.params().value(name);
  return file;
}

namespace {

std::string need(const ModelFile& file, const std::string& key) {
  auto it = file.meta.find(key);
  if (it == file.meta.end()) throw ParseError("model file: missing meta key '" + key + "'");
  return it->second;
}

}  // namespace

UnpackedModel unpack_meta(const ModelFile& file) {
  if (need(file, "kind") != "dygcl")
    throw ParseError("model file: unsupported kind '" + need(file, "kind") + "'");
  UnpackedModel out;
  out.config.embed_dim = std::stoi(need(file, "embed_dim"));
  out.config.hidden = std::stoi(need(file, "hidden"));
  out.config.global_width = std::stoi(need(file, "global_width"));
  out.config.pool_blocks = std::stoi(need(file, "pool_blocks"));
  out.config.pool_ratio = std::stod(need(file, "pool_ratio"));
  out.config.rnn_kind = need(file, "rnn");
  out.config.loss_weight = std::stod(need(file, "loss_alpha"));
  out.config.use_contrastive = need(file, "use_contrastive") == "1";
  out.config.mlp_hidden = std::stoi(need(file, "mlp_hidden"));
  out.config.gcn_activation = need(file, "gcn_act");
  out.config.score_activation = need(file, "score_act");
  out.config.share_local_weights = need(file, "share_local_weights") == "1";
  out.config.dropout = std::stod(need(file, "dropout"));
  out.feature_dim = std::stoi(need(file, "feature_dim"));
  out.num_steps = std::stoi(need(file, "num_steps"));
  out.seed = std::stoull(need(file, "seed"));
  return out;
}

DyGclModel model_from_file(const ModelFile& file) {
  UnpackedModel meta = unpack_meta(file);
  DyGclModel model(meta.config, meta.feature_dim, meta.num_steps, meta.seed);

  const auto names = model.params().names();
  if (names.size() != file.tensors.size())
    throw ParseError("model file: expected " + std::to_string(names.size()) + " tensors, found " +
                     std::to_string(file.tensors.size()));
  for (const auto& name : names) {
    auto it = file.tensors.find(name);
    if (it == file.tensors.end()) throw ParseError("model file: missing tensor " + name);
    Mat& dst = model.params().value(name);
    if (it->second.rows() != dst.rows() || it->second.cols() != dst.cols())
      throw ParseError("model file: tensor " + name + " has wrong shape");
    dst = it->second;
  }
  return model;
}

}  // namespace dygcl
