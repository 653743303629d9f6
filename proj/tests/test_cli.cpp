#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "dygcl/util.hpp"

namespace fs = std::filesystem;

namespace {

const char* cli = DYGCL_CLI_PATH;

int run(const std::string& args) {
  const std::string cmd = std::string(cli) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("dygcl_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string tiny_train_flags(const fs::path& data_dir, const fs::path& out_dir) {
  return "--dataset " + (data_dir / "dataset.jsonl").string() + " --embeddings " +
         (data_dir / "embeddings.txt").string() + " --out-dir " + out_dir.string() +
         " --embed-dim 6 --hidden 4 --global-width 4 --mlp-hidden 4 --batch-size 8"
         " --max-epochs 2 --seed 1";
}

}  // namespace

TEST_CASE("generate writes the dataset, embeddings and manifest; reruns are identical") {
  auto dir = fresh_dir("generate");
  const std::string flags = "generate --n 16 --t 3 --d 6 --m 4 --samples 200 --seed 7 --out-dir ";
  REQUIRE(run(flags + dir.string()) == 0);

  const auto lines = dygcl::read_lines((dir / "dataset.jsonl").string());
  CHECK(lines.size() == 200);
  CHECK(fs::exists(dir / "embeddings.txt"));
  CHECK(fs::exists(dir / "manifest.json"));

  auto dir2 = fresh_dir("generate2");
  REQUIRE(run(flags + dir2.string()) == 0);
  CHECK(dygcl::read_file((dir / "dataset.jsonl").string()) ==
        dygcl::read_file((dir2 / "dataset.jsonl").string()));
  CHECK(dygcl::read_file((dir / "embeddings.txt").string()) ==
        dygcl::read_file((dir2 / "embeddings.txt").string()));
}

TEST_CASE("generate rejects an infeasible spec with exit code 2") {
  auto dir = fresh_dir("generate_bad");
  CHECK(run("generate --m 40 --n 30 --out-dir " + dir.string()) == 2);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run("no-such-subcommand") == 2);
  CHECK(run("train") == 2);                       // missing --dataset
  CHECK(run("train --no-such-flag 1") == 2);      // unknown key
  CHECK(run("generate --badkey 3") == 2);
}

TEST_CASE("train emits model, history and metrics files, reproducibly") {
  auto data_dir = fresh_dir("train_data");
  REQUIRE(run("generate --n 12 --t 3 --d 6 --m 4 --samples 40 --seed 5 --out-dir " +
              data_dir.string()) == 0);

  auto out1 = fresh_dir("train_out1");
  REQUIRE(run("train " + tiny_train_flags(data_dir, out1)) == 0);
  CHECK(fs::exists(out1 / "model.txt"));
  CHECK(fs::exists(out1 / "history.csv"));
  CHECK(fs::exists(out1 / "metrics.txt"));

  auto out2 = fresh_dir("train_out2");
  REQUIRE(run("train " + tiny_train_flags(data_dir, out2)) == 0);
  CHECK(dygcl::read_file((out1 / "history.csv").string()) ==
        dygcl::read_file((out2 / "history.csv").string()));
  CHECK(dygcl::read_file((out1 / "model.txt").string()) ==
        dygcl::read_file((out2 / "model.txt").string()));

  // loss-alpha 1.0 matches the supervised-only switch bitwise
  auto out3 = fresh_dir("train_out3");
  auto out4 = fresh_dir("train_out4");
  REQUIRE(run("train " + tiny_train_flags(data_dir, out3) + " --loss-alpha 1.0") == 0);
  REQUIRE(run("train " + tiny_train_flags(data_dir, out4) + " --use-contrastive false") == 0);
  CHECK(dygcl::read_file((out3 / "history.csv").string()) ==
        dygcl::read_file((out4 / "history.csv").string()));

  // eval on the stored model reproduces the stored test metrics
  auto eval_dir = fresh_dir("eval_out");
  REQUIRE(run("eval --model " + (out1 / "model.txt").string() + " --dataset " +
              (data_dir / "dataset.jsonl").string() + " --embeddings " +
              (data_dir / "embeddings.txt").string() + " --split test --out-dir " +
              eval_dir.string()) == 0);
  CHECK(dygcl::read_file((eval_dir / "eval_metrics.txt").string()) ==
        dygcl::read_file((out1 / "metrics.txt").string()));
}

TEST_CASE("gradcheck reports a small max relative error and exits 0") {
  auto dir = fresh_dir("gradcheck");
  REQUIRE(run("gradcheck --out-dir " + dir.string()) == 0);
  const std::string report = dygcl::read_file((dir / "gradcheck.txt").string());
  CHECK(report.find("module local max_rel_err") != std::string::npos);
  CHECK(report.find("module global max_rel_err") != std::string::npos);
  CHECK(report.find("module head max_rel_err") != std::string::npos);
  CHECK(report.find("PASS") != std::string::npos);
}

TEST_CASE("export-pooled writes per-snapshot, per-block edge files with ceil(rho N) nodes") {
  auto data_dir = fresh_dir("pool_data");
  REQUIRE(run("generate --n 8 --t 2 --d 6 --m 3 --samples 40 --seed 3 --out-dir " +
              data_dir.string()) == 0);
  auto train_dir = fresh_dir("pool_train");
  REQUIRE(run("train " + tiny_train_flags(data_dir, train_dir)) == 0);

  auto out = fresh_dir("pool_out");
  REQUIRE(run("export-pooled --model " + (train_dir / "model.txt").string() + " --dataset " +
              (data_dir / "dataset.jsonl").string() + " --embeddings " +
              (data_dir / "embeddings.txt").string() + " --sample-id s0 --out-dir " +
              out.string()) == 0);

  for (int t = 1; t <= 2; ++t) {
    const auto block1 = out / ("sample_s0_t" + std::to_string(t) + "_block1.edges");
    const auto block2 = out / ("sample_s0_t" + std::to_string(t) + "_block2.edges");
    REQUIRE(fs::exists(block1));
    REQUIRE(fs::exists(block2));
    int nodes1 = 0, nodes2 = 0;
    for (const auto& line : dygcl::read_lines(block1.string()))
      if (line.rfind("node ", 0) == 0) ++nodes1;
    for (const auto& line : dygcl::read_lines(block2.string()))
      if (line.rfind("node ", 0) == 0) ++nodes2;
    CHECK(nodes1 == 4);  // ceil(0.5 * 8)
    CHECK(nodes2 == 2);  // ceil(0.5 * 4)
  }

  CHECK(run("export-pooled --model " + (train_dir / "model.txt").string() + " --dataset " +
            (data_dir / "dataset.jsonl").string() + " --sample-id nope --out-dir " +
            out.string()) == 1);
}

TEST_CASE("sweep writes one row per value") {
  auto data_dir = fresh_dir("sweep_data");
  REQUIRE(run("generate --n 12 --t 3 --d 6 --m 4 --samples 40 --seed 5 --out-dir " +
              data_dir.string()) == 0);
  auto out = fresh_dir("sweep_out");
  REQUIRE(run("sweep --axis historic_days --values 2,3 " + tiny_train_flags(data_dir, out)) ==
          0);
  const auto lines = dygcl::read_lines((out / "sweep.csv").string());
  REQUIRE(lines.size() == 3);  // header + 2 rows
  CHECK(lines[0] == "value,precision,recall,f1,accuracy");
  CHECK(lines[1].rfind("2,", 0) == 0);
  CHECK(lines[2].rfind("3,", 0) == 0);
}

TEST_CASE("DYGCL_SEED provides the seed when no flag or config key does") {
  auto dir1 = fresh_dir("env_seed1");
  auto dir2 = fresh_dir("env_seed2");
  const std::string base = std::string(cli) + " generate --n 10 --m 3 --t 2 --d 4 --samples 20";
  REQUIRE(WEXITSTATUS(std::system(
              (("DYGCL_SEED=9 " + base + " --out-dir " + dir1.string()) + " >/dev/null 2>&1")
                  .c_str())) == 0);
  REQUIRE(WEXITSTATUS(std::system(
              ((base + " --seed 9 --out-dir " + dir2.string()) + " >/dev/null 2>&1").c_str())) ==
          0);
  CHECK(dygcl::read_file((dir1 / "dataset.jsonl").string()) ==
        dygcl::read_file((dir2 / "dataset.jsonl").string()));
}

TEST_CASE("config file keys apply beneath flags") {
  auto data_dir = fresh_dir("cfg_data");
  REQUIRE(run("generate --n 10 --m 3 --t 2 --d 4 --samples 20 --seed 2 --out-dir " +
              data_dir.string()) == 0);

  auto cfg_path = data_dir / "run.cfg";
  dygcl::atomic_write_file(cfg_path.string(),
                           "n = 99\n"      // overridden by the flag below
                           "samples = 20\n"
                           "t = 2\n"
                           "d = 4\n"
                           "m = 3\n"
                           "seed = 2\n");
  auto out = fresh_dir("cfg_out");
  REQUIRE(run("generate --config " + cfg_path.string() + " --n 10 --out-dir " + out.string()) ==
          0);
  CHECK(dygcl::read_file((out / "dataset.jsonl").string()) ==
        dygcl::read_file((data_dir / "dataset.jsonl").string()));

  dygcl::atomic_write_file(cfg_path.string(), "unknown-key = 1\n");
  CHECK(run("generate --config " + cfg_path.string() + " --out-dir " + out.string()) == 2);
}
