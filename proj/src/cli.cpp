#include "dygcl/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "dygcl/grad_check.hpp"
#include "dygcl/model_io.hpp"
#include "dygcl/run_config.hpp"
#include "dygcl/trainer.hpp"
#include "dygcl/util.hpp"

namespace dygcl {

namespace {

using nlohmann::json;

const char* kUsage =
    "usage: dygcl <subcommand> [--key value ...] [--config FILE]\n"
    "\n"
    "subcommands:\n"
    "  generate       write a planted-precursor synthetic dataset\n"
    "  ingest         build a dataset from a tokenized corpus\n"
    "  train          train a model, write model/history/metrics files\n"
    "  eval           recompute metrics for a saved model on a split\n"
    "  gradcheck      finite-difference check of the full loss gradient\n"
    "  sweep          retrain across historic-day or lead-day values\n"
    "  export-pooled  dump per-snapshot pooled subgraphs for one sample\n"
    "\n"
    "Flags override config-file keys, which override defaults. The DYGCL_SEED\n"
    "environment variable supplies the seed when none is given. Outputs land\n"
    "under --out-dir.\n";

struct ParsedArgs {
  std::string subcommand;
  KeyValues flags;
  std::string config_path;
  bool help = false;
};

ParsedArgs parse_args(int argc, const char* const* argv) {
  ParsedArgs out;
  if (argc < 2) throw ConfigError("missing subcommand");
  out.subcommand = argv[1];
  if (out.subcommand == "--help" || out.subcommand == "-h" || out.subcommand == "help") {
    out.help = true;
    return out;
  }
  for (int i = 2; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--help" || arg == "-h") {
      out.help = true;
      continue;
    }
    if (arg.rfind("--", 0) != 0) throw ConfigError("expected --key, got '" + arg + "'");
    arg = arg.substr(2);
    std::string key, value;
    const auto eq = arg.find('=');
    if (eq != std::string::npos) {
      key = arg.substr(0, eq);
      value = arg.substr(eq + 1);
    } else {
      key = arg;
      if (i + 1 >= argc) throw ConfigError("flag --" + key + " needs a value");
      value = argv[++i];
    }
    if (key == "config")
      out.config_path = value;
    else
      out.flags.emplace_back(key, value);
  }
  return out;
}

RunConfig build_config(const ParsedArgs& args, RunConfig base) {
  KeyValues file_kv;
  if (!args.config_path.empty()) file_kv = parse_config_file(args.config_path);
  return make_run_config(std::move(base), file_kv, args.flags, std::getenv("DYGCL_SEED"));
}

std::filesystem::path out_path(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return std::filesystem::path(cfg.out_dir) / name;
}

std::string metrics_to_text(const Metrics& m) {
  std::string out;
  out += "accuracy " + format_g17(m.accuracy) + "\n";
  out += "precision " + format_g17(m.precision) + "\n";
  out += "recall " + format_g17(m.recall) + "\n";
  out += "f1 " + format_g17(m.f1) + "\n";
  out += "tp " + std::to_string(m.tp) + "\n";
  out += "fp " + std::to_string(m.fp) + "\n";
  out += "fn " + std::to_string(m.fn) + "\n";
  out += "tn " + std::to_string(m.tn) + "\n";
  out += "precision_defined " + std::to_string(m.precision_defined ? 1 : 0) + "\n";
  out += "recall_defined " + std::to_string(m.recall_defined ? 1 : 0) + "\n";
  out += "f1_defined " + std::to_string(m.f1_defined ? 1 : 0) + "\n";
  return out;
}

std::string history_to_csv(const TrainHistory& history) {
  std::string out = "epoch,train_loss,val_loss,val_acc\n";
  for (std::size_t i = 0; i < history.epochs.size(); ++i) {
    const auto& e = history.epochs[i];
    out += std::to_string(i) + "," + format_g17(e.train_loss) + "," + format_g17(e.val_loss) +
           "," + format_g17(e.val_metrics.accuracy) + "\n";
  }
  return out;
}

struct LoadedData {
  Dataset dataset;
  FeatureTable features;
};

LoadedData load_dataset_and_features(const RunConfig& cfg, int dim, std::uint64_t seed) {
  if (cfg.dataset_path.empty()) throw ConfigError("--dataset is required");
  LoadedData out;
  out.dataset = read_dataset(cfg.dataset_path);
  if (out.dataset.samples.empty()) throw ValidationError("dataset is empty");
  std::optional<EmbeddingTable> table;
  if (!cfg.embeddings_path.empty()) table = load_embeddings(cfg.embeddings_path, dim);
  out.features = features_for_dataset(out.dataset, table, dim, seed);
  return out;
}

Dataset apply_window_options(const Dataset& data, const ModelConfig& cfg) {
  Dataset out = data;
  if (cfg.lead_days > 1) out = apply_lead(out, cfg.lead_days);
  if (cfg.historic_days > 0) out = truncate_history(out, cfg.historic_days);
  return out;
}

int cmd_generate(const RunConfig& cfg) {
  SyntheticData data = generate_synthetic(cfg.synth);

  write_dataset(data.dataset, out_path(cfg, "dataset.jsonl").string());

  EmbeddingTable table;
  for (int i = 0; i < cfg.synth.num_nodes; ++i) table.vocab.add(std::to_string(i));
  table.vectors = data.features.vectors;
  write_embeddings(table, out_path(cfg, "embeddings.txt").string());

  json manifest;
  manifest["seed"] = cfg.synth.seed;
  manifest["num_nodes"] = cfg.synth.num_nodes;
  manifest["num_steps"] = cfg.synth.num_steps;
  manifest["feature_dim"] = cfg.synth.feature_dim;
  manifest["edge_prob"] = cfg.synth.edge_prob;
  manifest["motif_size"] = cfg.synth.motif_size;
  manifest["growth"] = cfg.synth.growth.empty()
                           ? SyntheticSpec::default_growth(cfg.synth.num_steps,
                                                           cfg.synth.motif_size)
                           : cfg.synth.growth;
  manifest["positive_fraction"] = cfg.synth.positive_fraction;
  manifest["num_samples"] = cfg.synth.num_samples;
  manifest["motif_nodes"] = data.motif_nodes;
  atomic_write_file(out_path(cfg, "manifest.json").string(), manifest.dump(2) + "\n");

  std::cout << "wrote " << data.dataset.samples.size() << " samples to "
            << out_path(cfg, "dataset.jsonl").string() << "\n";
  return 0;
}

int cmd_ingest(const RunConfig& cfg) {
  if (cfg.corpus_path.empty()) throw ConfigError("--corpus is required");
  const auto corpus = read_corpus(cfg.corpus_path);
  if (corpus.empty()) throw ValidationError("corpus is empty");

  Vocabulary vocab;
  std::optional<EmbeddingTable> table;
  if (!cfg.embeddings_path.empty()) {
    table = load_embeddings(cfg.embeddings_path, cfg.model.embed_dim);
    vocab = table->vocab;
  } else {
    for (const auto& sample : corpus)
      for (const auto& day : sample.days)
        for (const auto& doc : day.docs)
          for (const auto& token : doc) vocab.add(token);
  }

  Dataset dataset;
  for (const auto& sample : corpus) {
    DynamicGraphSample s = ingest_corpus(sample.days, cfg.ingest, vocab);
    s.sample_id = sample.id;
    s.label = sample.label;
    dataset.samples.push_back(std::move(s));
  }
  write_dataset(dataset, out_path(cfg, "dataset.jsonl").string());

  if (!table) {
    EmbeddingTable fresh;
    fresh.vocab = vocab;
    fresh.vectors =
        resolve_features(vocab, std::nullopt, cfg.model.embed_dim, cfg.synth.seed).vectors;
    write_embeddings(fresh, out_path(cfg, "embeddings.txt").string());
  }

  std::cout << "ingested " << dataset.samples.size() << " samples (vocab " << vocab.size()
            << ") to " << out_path(cfg, "dataset.jsonl").string() << "\n";
  return 0;
}

int cmd_train(const RunConfig& cfg) {
  const std::uint64_t seed = cfg.model.seeds.front();
  LoadedData loaded = load_dataset_and_features(cfg, cfg.model.embed_dim, seed);
  Dataset data = apply_window_options(loaded.dataset, cfg.model);

  const int num_steps = static_cast<int>(data.samples.front().snapshots.size());
  DyGclModel model(cfg.model, cfg.model.embed_dim, num_steps, seed);
  SplitIndices splits = split_dataset(static_cast<int>(data.samples.size()), seed);

  TrainHistory history;
  try {
    history = train(model, data, splits, loaded.features, cfg.model, seed);
  } catch (const NumericError& e) {
    // train() restored the best parameters before rethrowing.
    save_model(pack_model(model, seed), out_path(cfg, "model.txt").string());
    std::cerr << "training diverged: " << e.what() << "\n"
              << "last-good checkpoint kept at " << out_path(cfg, "model.txt").string() << "\n";
    return 1;
  }

  save_model(pack_model(model, seed), out_path(cfg, "model.txt").string());
  atomic_write_file(out_path(cfg, "history.csv").string(), history_to_csv(history));
  Metrics test = evaluate(model, data, splits.test, loaded.features);
  atomic_write_file(out_path(cfg, "metrics.txt").string(), metrics_to_text(test));

  std::cout << "trained " << history.epochs.size() << " epochs (best "
            << history.best_epoch << "), test accuracy " << test.accuracy << "\n";
  return 0;
}

int cmd_eval(const RunConfig& cfg) {
  if (cfg.model_path.empty()) throw ConfigError("--model is required");
  ModelFile file = load_model(cfg.model_path);
  UnpackedModel meta = unpack_meta(file);
  DyGclModel model = model_from_file(file);

  RunConfig data_cfg = cfg;
  data_cfg.model.embed_dim = meta.feature_dim;
  LoadedData loaded = load_dataset_and_features(data_cfg, meta.feature_dim, meta.seed);
  Dataset data = apply_window_options(loaded.dataset, cfg.model);

  SplitIndices splits = split_dataset(static_cast<int>(data.samples.size()), meta.seed);
  std::vector<int> subset;
  if (cfg.split == "train") subset = splits.train;
  else if (cfg.split == "val") subset = splits.val;
  else if (cfg.split == "test") subset = splits.test;
  else if (cfg.split == "all") {
    for (int i = 0; i < static_cast<int>(data.samples.size()); ++i) subset.push_back(i);
  } else {
    throw ConfigError("--split must be train, val, test or all");
  }

  Metrics m = evaluate(model, data, subset, loaded.features);
  atomic_write_file(out_path(cfg, "eval_metrics.txt").string(), metrics_to_text(m));
  std::cout << metrics_to_text(m);
  return 0;
}

int cmd_gradcheck(const RunConfig& cfg) {
  SyntheticData data = generate_synthetic(cfg.synth);
  const DynamicGraphSample& sample = data.dataset.samples.front();
  const Mat h_sem = features_for(data.features, sample).h_sem;

  ModelConfig probe = cfg.model;
  probe.dropout = 0.0;  // the probed function must be deterministic
  DyGclModel model(probe, cfg.synth.feature_dim,
                   static_cast<int>(sample.snapshots.size()), cfg.synth.seed);

  // Probe at a generic parameter point. The zero-bias init can sit on an
  // ill-conditioned configuration (near-zero view embeddings), where finite
  // differences are meaningless.
  Rng point(cfg.synth.seed + 1);
  for (const auto& name : model.params().names()) {
    Mat& v = model.params().value(name);
    for (Eigen::Index i = 0; i < v.rows(); ++i)
      for (Eigen::Index j = 0; j < v.cols(); ++j) v(i, j) = point.uniform(-0.5, 0.5);
  }

  auto f = [&](Tape& tape, ParamStore&) {
    return model.sample_loss(tape, sample, h_sem, nullptr, false, nullptr);
  };
  GradCheckReport report = grad_check(f, model.params(), 1e-5);

  const auto module_of = [](const std::string& name) {
    return name.substr(0, name.find('.'));
  };
  std::map<std::string, double> per_module;
  for (const auto& [name, err] : report.per_param)
    per_module[module_of(name)] = std::max(per_module[module_of(name)], err);

  std::string text;
  for (const auto& [module, err] : per_module)
    text += "module " + module + " max_rel_err " + format_g17(err) + "\n";
  text += "overall max_rel_err " + format_g17(report.max_rel_err) + " (worst " +
          report.worst_param + ")\n";
  const bool ok = report.max_rel_err < 1e-4;
  text += ok ? "PASS\n" : "FAIL\n";

  atomic_write_file(out_path(cfg, "gradcheck.txt").string(), text);
  std::cout << text;
  return ok ? 0 : 1;
}

int cmd_sweep(const RunConfig& cfg) {
  if (cfg.sweep_values.empty()) throw ConfigError("--values is required");
  const std::uint64_t seed = cfg.model.seeds.front();
  LoadedData loaded = load_dataset_and_features(cfg, cfg.model.embed_dim, seed);

  const SweepAxis axis = sweep_axis_from_string(cfg.sweep_axis);
  const auto rows = sensitivity_sweep(loaded.dataset, loaded.features, cfg.model, axis,
                                      cfg.sweep_values);

  std::string csv = "value,precision,recall,f1,accuracy\n";
  for (const auto& row : rows)
    csv += std::to_string(row.value) + "," + format_g17(row.mean.precision) + "," +
           format_g17(row.mean.recall) + "," + format_g17(row.mean.f1) + "," +
           format_g17(row.mean.accuracy) + "\n";
  atomic_write_file(out_path(cfg, "sweep.csv").string(), csv);
  std::cout << csv;
  return 0;
}

int cmd_export_pooled(const RunConfig& cfg) {
  if (cfg.model_path.empty()) throw ConfigError("--model is required");
  if (cfg.sample_id.empty()) throw ConfigError("--sample-id is required");
  ModelFile file = load_model(cfg.model_path);
  UnpackedModel meta = unpack_meta(file);
  DyGclModel model = model_from_file(file);

  RunConfig data_cfg = cfg;
  LoadedData loaded = load_dataset_and_features(data_cfg, meta.feature_dim, meta.seed);
  Dataset data = apply_window_options(loaded.dataset, cfg.model);

  const DynamicGraphSample* sample = nullptr;
  for (const auto& s : data.samples)
    if (s.sample_id == cfg.sample_id) sample = &s;
  if (!sample) throw ValidationError("sample not found: " + cfg.sample_id);

  Tape tape;
  auto forward = model.forward(tape, *sample, features_for(loaded.features, *sample).h_sem,
                               nullptr, false);

  for (const auto& trace : forward.traces) {
    std::string text = "# sample " + sample->sample_id + " snapshot " +
                       std::to_string(trace.snapshot + 1) + " block " +
                       std::to_string(trace.block + 1) + " nodes " +
                       std::to_string(trace.original_idx.size()) + "\n";
    for (std::size_t i = 0; i < trace.original_idx.size(); ++i)
      text += "node " + std::to_string(trace.original_idx[i]) + " " +
              format_g17(trace.scores[i]) + "\n";
    for (const auto& e : trace.coarse.edges)
      text += "edge " + std::to_string(trace.original_idx[static_cast<std::size_t>(e.u)]) + " " +
              std::to_string(trace.original_idx[static_cast<std::size_t>(e.v)]) + "\n";
    const std::string name = "sample_" + sample->sample_id + "_t" +
                             std::to_string(trace.snapshot + 1) + "_block" +
                             std::to_string(trace.block + 1) + ".edges";
    atomic_write_file(out_path(cfg, name).string(), text);
  }
  std::cout << "wrote " << forward.traces.size() << " pooled-graph files to " << cfg.out_dir
            << "\n";
  return 0;
}

RunConfig gradcheck_defaults() {
  RunConfig base;
  base.model.embed_dim = 5;
  base.model.hidden = 4;
  base.model.global_width = 4;
  base.model.mlp_hidden = 4;
  base.model.pool_blocks = 2;
  base.model.pool_ratio = 0.5;
  base.synth.num_nodes = 6;
  base.synth.num_steps = 3;
  base.synth.feature_dim = 5;
  base.synth.motif_size = 3;
  base.synth.edge_prob = 0.4;
  base.synth.num_samples = 1;
  base.synth.positive_fraction = 1.0;
  return base;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  try {
    ParsedArgs args = parse_args(argc, argv);
    if (args.help && args.subcommand.empty() == false &&
        (args.subcommand == "--help" || args.subcommand == "-h" || args.subcommand == "help")) {
      std::cout << kUsage;
      return 0;
    }
    if (args.help) {
      std::cout << kUsage;
      return 0;
    }

    if (args.subcommand == "generate") return cmd_generate(build_config(args, RunConfig{}));
    if (args.subcommand == "ingest") return cmd_ingest(build_config(args, RunConfig{}));
    if (args.subcommand == "train") return cmd_train(build_config(args, RunConfig{}));
    if (args.subcommand == "eval") return cmd_eval(build_config(args, RunConfig{}));
    if (args.subcommand == "gradcheck")
      return cmd_gradcheck(build_config(args, gradcheck_defaults()));
    if (args.subcommand == "sweep") return cmd_sweep(build_config(args, RunConfig{}));
    if (args.subcommand == "export-pooled")
      return cmd_export_pooled(build_config(args, RunConfig{}));
    throw ConfigError("unknown subcommand: " + args.subcommand);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << kUsage;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace dygcl
