// tests/test_cli.cc

// Copyright 2026  pdspeech authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <fcntl.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "pdspeech/checkpoint.h"
#include "pdspeech/cli.h"
#include "pdspeech/config.h"
#include "pdspeech/synth.h"
#include "test_util.h"

using namespace pdspeech;
using pdspeech::testing::read_file;
using pdspeech::testing::TempDir;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "pdspeech");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  return cli_main(static_cast<int>(args.size()), argv.data());
}

// Runs the CLI with stdout redirected into a file.
std::string run_stdout(const fs::path& capture, std::vector<std::string> args, int* rc) {
  std::fflush(stdout);
  const int saved = ::dup(STDOUT_FILENO);
  const int fd = ::open(capture.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  REQUIRE(saved >= 0);
  REQUIRE(fd >= 0);
  ::dup2(fd, STDOUT_FILENO);
  ::close(fd);
  *rc = run(std::move(args));
  std::fflush(stdout);
  ::dup2(saved, STDOUT_FILENO);
  ::close(saved);
  return read_file(capture);
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  os << text;
}

SynthSpec tiny_spec() {
  SynthSpec s = default_synth_spec();
  s.languages.resize(2);
  for (auto& l : s.languages) l.pd_speakers = l.hc_speakers = 4;
  s.utterances_per_speaker = 2;
  s.duration_min_s = 1.0;
  s.duration_max_s = 1.2;
  return s;
}

PipelineConfig tiny_config() {
  PipelineConfig c;
  c.cnn.epochs = 1;
  c.cnn.finetune_epochs = 1;
  c.cnn.batch_size = 32;
  c.cv.folds = 2;
  c.seed = 3;
  return c;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}) == kExitUsage);
  CHECK(run({"--bogus"}) == kExitUsage);
  CHECK(run({"train"}) == kExitUsage);  // --manifest is required
  CHECK(run({"train", "--manifest", "/no/such/file.csv"}) == kExitUsage);
  CHECK(run({"evaluate", "--manifest", "/no/such/file.csv", "--protocol", "sideways"}) == kExitUsage);
  CHECK(run({"--workers", "-1"}) == kExitUsage);
}

TEST_CASE("help exits with 0") {
  CHECK(run({"--help"}) == kExitOk);
  CHECK(run({"train", "--help"}) == kExitOk);
}

TEST_CASE("dump-config round trips through --config") {
  TempDir dir("cli_cfg");
  write(dir.path() / "c.json", dump_config(tiny_config()));
  int rc = -1;
  const std::string text =
      run_stdout(dir.path() / "out.txt", {"--config", (dir.path() / "c.json").string(), "--dump-config"}, &rc);
  CHECK(rc == kExitOk);
  CHECK(parse_config(text) == tiny_config());
  const std::string seeded = run_stdout(
      dir.path() / "out2.txt", {"--config", (dir.path() / "c.json").string(), "--seed", "99", "--dump-config"}, &rc);
  CHECK(parse_config(seeded).seed == 99);
  write(dir.path() / "bad.json", R"({"nope": 1})");
  CHECK(run({"--config", (dir.path() / "bad.json").string(), "--dump-config"}) == kExitFailure);
}

TEST_CASE("the full tool chain runs on a tiny corpus") {
  TempDir dir("cli_chain");
  const fs::path root = dir.path();
  write(root / "spec.json", nlohmann::json(tiny_spec()).dump(2));
  write(root / "cfg.json", dump_config(tiny_config()));
  const std::string cfg = (root / "cfg.json").string();
  const fs::path corpus = root / "corpus";
  REQUIRE(run({"--config", cfg, "--out", corpus.string(), "synth", "--spec", (root / "spec.json").string()}) ==
          kExitOk);
  const std::string manifest = (corpus / "manifest.csv").string();
  REQUIRE(fs::exists(manifest));
  CHECK(fs::exists(corpus / "planted_boundaries.csv"));

  CHECK(run({"--config", cfg, "--out", (root / "seg").string(), "segment", "--manifest", manifest, "--wav"}) ==
        kExitOk);
  const auto segs = nlohmann::json::parse(read_file(root / "seg" / "segments.json"));
  REQUIRE(segs.is_array());
  CHECK(segs.size() > 10);
  CHECK(fs::exists(root / "seg" / segs[0].at("wav").get<std::string>()));

  CHECK(run({"--config", cfg, "--out", (root / "feat").string(), "features", "--manifest", manifest}) == kExitOk);
  const std::string csv = read_file(root / "feat" / "features_es.csv");
  CHECK(csv.rfind("speaker_id,task,label,f000,", 0) == 0);
  CHECK(csv.find(",f231\n") != std::string::npos);

  CHECK(run({"--config", cfg, "--out", (root / "svm").string(), "train", "--manifest", manifest, "--model",
             "baseline-svm", "--language", "es"}) == kExitOk);
  CHECK(nlohmann::json::parse(read_file(root / "svm" / "svm.json")).at("mean").size() == 232);

  CHECK(run({"--config", cfg, "--out", (root / "cnn").string(), "train", "--manifest", manifest, "--model", "cnn",
             "--language", "es"}) == kExitOk);
  const fs::path base = root / "cnn" / "model.pdxf";
  CHECK(read_checkpoint(base).provenance.base_language == "es");
  CHECK(fs::exists(root / "cnn" / "train_log.jsonl"));
  CHECK(run({"--config", cfg, "--out", (root / "x").string(), "train", "--manifest", manifest, "--model", "cnn",
             "--language", "xx"}) == kExitUsage);

  CHECK(run({"--config", cfg, "--out", (root / "ft").string(), "finetune", "--base", base.string(), "--target",
             manifest, "--language", "de"}) == kExitOk);
  const PdCnn ft = read_checkpoint(root / "ft" / "model.pdxf");
  CHECK(ft.provenance.target_language == "de");
  CHECK(run({"--config", cfg, "--out", (root / "ft2").string(), "finetune", "--base", base.string(), "--target",
             base.string(), "--language", "de"}) == kExitUsage);

  CHECK(run({"--config", cfg, "--out", (root / "ev").string(), "evaluate", "--manifest", manifest, "--model",
             "baseline-svm", "--protocol", "individual", "--target-language", "de"}) == kExitOk);
  const auto rep = nlohmann::json::parse(read_file(root / "ev" / "report.json"));
  CHECK(rep.at(0).at("model") == "baseline-svm");
  CHECK(fs::exists(root / "ev" / "report.md"));
  CHECK(read_file(root / "ev" / "roc.csv").rfind("fpr,tpr,threshold\n", 0) == 0);

  CHECK(run({"--config", cfg, "--out", (root / "tr").string(), "evaluate", "--manifest", manifest, "--model", "cnn",
             "--protocol", "transfer", "--base-language", "es", "--target-language", "de", "--base-model",
             base.string()}) == kExitOk);
  CHECK(nlohmann::json::parse(read_file(root / "tr" / "report.json")).at(0).at("base_language") == "es");

  CHECK(run({"--config", cfg, "--out", (root / "mx").string(), "experiment-matrix", "--corpus-manifest",
             manifest}) == kExitOk);
  for (const char* f : {"individual.json", "individual.md", "transfer.json", "transfer.md", "checkpoints/es.pdxf",
                        "checkpoints/de.pdxf", "roc/individual_es_cnn.csv", "roc/individual_de_baseline-svm.csv",
                        "roc/transfer_es_de_cnn.csv", "roc/transfer_de_es_cnn.csv"}) {
    CAPTURE(f);
    CHECK(fs::exists(root / "mx" / f));
  }
  CHECK(nlohmann::json::parse(read_file(root / "mx" / "individual.json")).size() == 4);
  CHECK(nlohmann::json::parse(read_file(root / "mx" / "transfer.json")).size() == 2);

  CHECK(run({"report", (root / "mx" / "individual.json").string(), (root / "mx" / "transfer.json").string(), "--md",
             (root / "table.md").string()}) == kExitOk);
  const std::string md = read_file(root / "table.md");
  CHECK(md.find("| Language | Model |") < md.find("| Base lang. | Target lang. |"));
}
