// src/cli.cc

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

#include "pdspeech/cli.h"

#include <omp.h>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pdspeech/basefeat.h"
#include "pdspeech/checkpoint.h"
#include "pdspeech/config.h"
#include "pdspeech/eval.h"
#include "pdspeech/segment.h"
#include "pdspeech/svm.h"
#include "pdspeech/synth.h"

namespace fs = std::filesystem;

namespace pdspeech {

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out = "out";
  bool dump_config = false;
};

PipelineConfig resolve_config(const Globals& g) {
  PipelineConfig cfg = g.config.empty() ? PipelineConfig{} : load_config(g.config);
  if (g.seed) cfg.seed = *g.seed;
  if (g.workers) cfg.workers = *g.workers;
  cfg.validate();
  if (cfg.workers > 0) omp_set_num_threads(cfg.workers);
  return cfg;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  os << text;
  if (!os) throw IoError("write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// Path as it appears relative to base when it lives below it.
std::string display_path(const fs::path& p, const fs::path& base) {
  const fs::path rel = p.lexically_relative(base);
  if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
  return p.generic_string();
}

std::vector<UtteranceRecord> load_corpus_manifest(const std::string& path, const char* flag) {
  if (path.empty()) throw UsageError(std::string(flag) + " is required");
  try {
    return load_manifest(path);
  } catch (const ManifestError& e) {
    throw UsageError(std::string(flag) + " " + path + " is not a corpus manifest: " + e.what());
  }
}

std::vector<UtteranceRecord> select_language(const std::vector<UtteranceRecord>& records,
                                             const std::string& language) {
  std::set<std::string> langs;
  for (const auto& r : records) langs.insert(r.speaker.language);
  if (language.empty()) {
    if (langs.size() > 1) throw UsageError("manifest holds several languages; pick one with --language");
    return records;
  }
  if (!langs.count(language)) throw UsageError("language " + language + " is not in the manifest");
  std::vector<UtteranceRecord> out;
  for (const auto& r : records) {
    if (r.speaker.language == language) out.push_back(r);
  }
  return out;
}

std::string training_log_text(const std::vector<EpochLog>& log) {
  std::ostringstream os;
  write_training_log(os, log);
  return os.str();
}

void write_report_files(const fs::path& dir, const std::string& stem, const std::vector<EvalReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(report_json(r));
  write_text(dir / (stem + ".json"), arr.dump(2) + "\n");
  write_text(dir / (stem + ".md"), markdown_table(reports));
}

std::string roc_name(const EvalReport& r) {
  if (r.protocol == "transfer") return "transfer_" + r.base_language + "_" + r.target_language + "_" + r.model + ".csv";
  return "individual_" + r.target_language + "_" + r.model + ".csv";
}

// ---- subcommands --------------------------------------------------------

int run_synth(const Globals& g, const std::string& spec_path) {
  const PipelineConfig cfg = resolve_config(g);
  const SynthSpec spec = spec_path.empty() ? default_synth_spec() : load_synth_spec(spec_path);
  const SynthResult r = synth_corpus(spec, cfg.seed, g.out);
  std::printf("%s: %zu utterances\n", r.manifest.string().c_str(), r.records.size());
  return kExitOk;
}

int run_segment(const Globals& g, const std::string& manifest, bool wavs) {
  const PipelineConfig cfg = resolve_config(g);
  const auto records = load_corpus_manifest(manifest, "--manifest");
  std::vector<ExtractResult> results(records.size());
  std::vector<std::exception_ptr> errors(records.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < static_cast<long>(records.size()); ++i) {
    try {
      results[i] = segment_clip(load_audio(records[i]), cfg.voicing, cfg.segment);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  const fs::path out(g.out);
  const fs::path base = fs::path(manifest).parent_path();
  ensure_dir(out);
  nlohmann::json index = nlohmann::json::array();
  std::size_t total = 0, skipped = 0;
  char name[64];
  for (std::size_t i = 0; i < records.size(); ++i) {
    skipped += results[i].skipped;
    for (std::size_t k = 0; k < results[i].segments.size(); ++k) {
      const auto& s = results[i].segments[k];
      nlohmann::json e = {{"clip", display_path(records[i].path, base)},
                          {"boundary_sample", s.boundary_sample},
                          {"kind", to_string(s.kind)}};
      if (wavs) {
        std::snprintf(name, sizeof(name), "c%05zu_s%03zu.wav", i, k);
        const fs::path rel = fs::path("segments") / records[i].speaker.language / name;
        ensure_dir((out / rel).parent_path());
        write_wav(out / rel, s.samples, kPipelineSampleRate);
        e["wav"] = rel.generic_string();
      }
      index.push_back(std::move(e));
      ++total;
    }
  }
  write_text(out / "segments.json", index.dump(2) + "\n");
  std::printf("%zu segments from %zu clips (%zu boundaries too close to a clip edge)\n", total, records.size(),
              skipped);
  return kExitOk;
}

int run_features(const Globals& g, const std::string& manifest) {
  const PipelineConfig cfg = resolve_config(g);
  const auto records = load_corpus_manifest(manifest, "--manifest");
  std::vector<std::vector<double>> feats(records.size());
  std::vector<std::exception_ptr> errors(records.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < static_cast<long>(records.size()); ++i) {
    try {
      const ExtractResult seg = segment_clip(load_audio(records[i]), cfg.voicing, cfg.segment);
      if (!seg.segments.empty()) feats[i] = utterance_features(seg.segments, cfg.mfcc).vector;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::string header = "speaker_id,task,label";
  char buf[40];
  for (std::size_t d = 0; d < kBaselineDim; ++d) {
    std::snprintf(buf, sizeof(buf), ",f%03zu", d);
    header += buf;
  }
  std::map<std::string, std::string> csv;
  std::size_t empty = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& text = csv[records[i].speaker.language];
    if (text.empty()) text = header + "\n";
    if (feats[i].empty()) {
      ++empty;
      continue;
    }
    text += records[i].speaker.speaker_id + "," + records[i].task + "," + to_string(records[i].speaker.label);
    for (double v : feats[i]) {
      std::snprintf(buf, sizeof(buf), ",%.17g", v);
      text += buf;
    }
    text += "\n";
  }
  for (const auto& [lang, text] : csv) write_text(fs::path(g.out) / ("features_" + lang + ".csv"), text);
  if (empty) std::fprintf(stderr, "pdspeech: %zu utterances had no transitions and were left out\n", empty);
  return kExitOk;
}

int run_train(const Globals& g, const std::string& manifest, const std::string& model, const std::string& language) {
  const PipelineConfig cfg = resolve_config(g);
  const ModelKind kind = parse_model_kind(model);
  const auto records = select_language(load_corpus_manifest(manifest, "--manifest"), language);
  const auto corpora = prepare_corpora(records, cfg);
  const PreparedCorpus& corpus = corpora.front();
  const fs::path out(g.out);
  if (kind == ModelKind::Cnn) {
    std::vector<EpochLog> log;
    const PdCnn m = train_full_corpus(corpus, cfg, cfg.seed, &log);
    ensure_dir(out);
    write_checkpoint(out / "model.pdxf", m);
    write_text(out / "train_log.jsonl", training_log_text(log));
    std::printf("%s\n", (out / "model.pdxf").string().c_str());
  } else {
    std::vector<std::vector<double>> x;
    std::vector<Label> y;
    for (const auto& u : corpus.utterances) {
      if (u.baseline.empty()) continue;
      x.push_back(u.baseline);
      y.push_back(u.record.speaker.label);
    }
    const SvmModel m = train_svm(x, y, cfg.svm);
    write_text(out / "svm.json", nlohmann::json(m).dump() + "\n");
    std::printf("%s\n", (out / "svm.json").string().c_str());
  }
  return kExitOk;
}

int run_finetune(const Globals& g, const std::string& base_path, const std::string& target,
                 const std::string& language) {
  if (base_path.empty()) throw UsageError("--base is required");
  const auto records = select_language(load_corpus_manifest(target, "--target"), language);
  const PipelineConfig cfg = resolve_config(g);
  const PdCnn base = read_checkpoint(base_path, cfg.cnn);
  const auto corpora = prepare_corpora(records, cfg);
  std::vector<LabeledSpectrogram> data;
  for (const auto& u : corpora.front().utterances) {
    for (const auto& m : u.mels) data.push_back({m, u.record.speaker.label});
  }
  TrainResult r = finetune(base, data, cfg.cnn, cfg.seed);
  r.model.provenance.target_language = corpora.front().language;
  const fs::path out(g.out);
  ensure_dir(out);
  write_checkpoint(out / "model.pdxf", r.model);
  write_text(out / "train_log.jsonl", training_log_text(r.log));
  std::printf("%s\n", (out / "model.pdxf").string().c_str());
  return kExitOk;
}

int run_evaluate(const Globals& g, const std::string& manifest, const std::string& model,
                 const std::string& protocol, const std::string& target, const std::string& base_lang,
                 const std::string& base_model) {
  const PipelineConfig cfg = resolve_config(g);
  const auto records = load_corpus_manifest(manifest, "--manifest");
  Protocol p;
  p.target = target;
  if (protocol == "transfer") {
    p.kind = Protocol::Kind::Transfer;
    p.base = base_lang;
    if (p.base.empty()) throw UsageError("--base-language is required for the transfer protocol");
  } else if (protocol != "individual") {
    throw UsageError("--protocol must be individual or transfer");
  }
  const auto corpora = prepare_corpora(records, cfg);
  if (p.target.empty()) {
    if (corpora.size() > 1) throw UsageError("manifest holds several languages; pick one with --target-language");
    p.target = corpora.front().language;
  }
  std::optional<PdCnn> base;
  if (!base_model.empty()) {
    if (p.kind != Protocol::Kind::Transfer) throw UsageError("--base-model only applies to the transfer protocol");
    base = read_checkpoint(base_model, cfg.cnn);
  }
  const EvalReport r = run_experiment(corpora, p, parse_model_kind(model), cfg, cfg.seed, base ? &*base : nullptr);
  const fs::path out(g.out);
  write_report_files(out, "report", {r});
  write_roc_csv(out / "roc.csv", r.roc);
  std::fputs(markdown_table({r}).c_str(), stdout);
  return kExitOk;
}

int run_matrix(const Globals& g, const std::string& manifest, const std::vector<std::string>& models) {
  const PipelineConfig cfg = resolve_config(g);
  const auto records = load_corpus_manifest(manifest, "--corpus-manifest");
  std::vector<ModelKind> kinds;
  for (const auto& m : models) kinds.push_back(parse_model_kind(m));
  const auto corpora = prepare_corpora(records, cfg);
  const fs::path out(g.out);
  ensure_dir(out / "roc");
  ensure_dir(out / "checkpoints");

  std::vector<EvalReport> individual;
  for (const auto& c : corpora) {
    for (ModelKind k : kinds) {
      Protocol p;
      p.target = c.language;
      individual.push_back(run_experiment(corpora, p, k, cfg, cfg.seed));
      std::fprintf(stderr, "individual %s %s done\n", c.language.c_str(), to_string(k).c_str());
    }
  }

  std::map<std::string, PdCnn> bases;
  for (const auto& c : corpora) {
    PdCnn m = train_full_corpus(c, cfg, derive_seed(cfg.seed, "base:" + c.language));
    write_checkpoint(out / "checkpoints" / (c.language + ".pdxf"), m);
    bases.emplace(c.language, std::move(m));
  }

  std::vector<EvalReport> transfer;
  for (const auto& b : corpora) {
    for (const auto& t : corpora) {
      if (b.language == t.language) continue;
      Protocol p;
      p.kind = Protocol::Kind::Transfer;
      p.base = b.language;
      p.target = t.language;
      transfer.push_back(run_experiment(corpora, p, ModelKind::Cnn, cfg, cfg.seed, &bases.at(b.language)));
      std::fprintf(stderr, "transfer %s -> %s done\n", b.language.c_str(), t.language.c_str());
    }
  }

  write_report_files(out, "individual", individual);
  write_report_files(out, "transfer", transfer);
  for (const auto& r : individual) write_roc_csv(out / "roc" / roc_name(r), r.roc);
  for (const auto& r : transfer) write_roc_csv(out / "roc" / roc_name(r), r.roc);
  std::fputs(markdown_table(individual).c_str(), stdout);
  if (!transfer.empty()) std::fputs(("\n" + markdown_table(transfer)).c_str(), stdout);
  return kExitOk;
}

int run_report(const std::vector<std::string>& inputs, const std::string& md_out) {
  std::vector<EvalReport> individual, transfer;
  for (const auto& in : inputs) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_text(in));
    } catch (const nlohmann::json::exception& e) {
      throw IoError(in + ": " + e.what());
    }
    std::vector<nlohmann::json> items;
    if (j.is_array()) {
      for (const auto& x : j) items.push_back(x);
    } else {
      items.push_back(j);
    }
    for (const auto& x : items) {
      EvalReport r = report_from_json(x);
      (r.protocol == "transfer" ? transfer : individual).push_back(std::move(r));
    }
  }
  std::string text = markdown_table(individual);
  if (!transfer.empty()) text += (text.empty() ? "" : "\n") + markdown_table(transfer);
  if (md_out.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    write_text(md_out, text);
  }
  return kExitOk;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Parkinson's disease detection from voiced/unvoiced speech transitions", "pdspeech"};
  app.fallthrough();
  app.require_subcommand(0, 1);
  Globals g;
  app.add_option("--config", g.config, "pipeline config JSON")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "experiment seed (overrides the config)");
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--workers", g.workers, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  app.add_flag("--dump-config", g.dump_config, "print the effective config and exit");

  std::string spec_path, manifest, model = "cnn", language, base, target, protocol = "individual", base_lang,
                                    base_model, md_out;
  std::vector<std::string> models = {"baseline-svm", "cnn"}, inputs;
  bool wavs = false;

  auto* synth = app.add_subcommand("synth", "write a synthetic multi-language corpus");
  synth->add_option("--spec", spec_path, "synthesis spec JSON (default: built-in three languages)")
      ->check(CLI::ExistingFile);

  auto* segment = app.add_subcommand("segment", "find voicing transitions and write a segment index");
  segment->add_option("--manifest", manifest, "corpus manifest CSV")->required()->check(CLI::ExistingFile);
  segment->add_flag("--wav", wavs, "also write each segment as a WAV file");

  auto* features = app.add_subcommand("features", "write baseline feature CSVs, one per language");
  features->add_option("--manifest", manifest, "corpus manifest CSV")->required()->check(CLI::ExistingFile);

  auto* train = app.add_subcommand("train", "train a model on one language");
  train->add_option("--manifest", manifest, "corpus manifest CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--model", model, "cnn or baseline-svm")
      ->check(CLI::IsMember({"cnn", "baseline-svm", "svm"}))
      ->capture_default_str();
  train->add_option("--language", language, "language to train on");

  auto* ft = app.add_subcommand("finetune", "fine-tune a CNN checkpoint on a target corpus");
  ft->add_option("--base", base, "base checkpoint (.pdxf)")->required()->check(CLI::ExistingFile);
  ft->add_option("--target", target, "target corpus manifest CSV")->required()->check(CLI::ExistingFile);
  ft->add_option("--language", language, "target language");

  auto* evaluate = app.add_subcommand("evaluate", "cross-validate one model on one language");
  evaluate->add_option("--manifest", manifest, "corpus manifest CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--model", model, "cnn or baseline-svm")
      ->check(CLI::IsMember({"cnn", "baseline-svm", "svm"}))
      ->capture_default_str();
  evaluate->add_option("--protocol", protocol, "individual or transfer")
      ->check(CLI::IsMember({"individual", "transfer"}))
      ->capture_default_str();
  evaluate->add_option("--target-language", target, "language to test on");
  evaluate->add_option("--base-language", base_lang, "transfer base language");
  evaluate->add_option("--base-model", base_model, "transfer base checkpoint; trained when absent")
      ->check(CLI::ExistingFile);

  auto* matrix = app.add_subcommand("experiment-matrix", "every individual and transfer experiment");
  matrix->add_option("--corpus-manifest", manifest, "corpus manifest CSV")->required()->check(CLI::ExistingFile);
  matrix->add_option("--models", models, "models for the individual runs")
      ->check(CLI::IsMember({"cnn", "baseline-svm", "svm"}))
      ->capture_default_str();

  auto* report = app.add_subcommand("report", "render report JSON files as Markdown tables");
  report->add_option("inputs", inputs, "report JSON files")->required()->check(CLI::ExistingFile);
  report->add_option("--md", md_out, "write the table here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (g.dump_config) {
      std::fputs(dump_config(resolve_config(g)).c_str(), stdout);
      return kExitOk;
    }
    if (app.get_subcommands().empty()) {
      std::fputs(app.help().c_str(), stderr);
      return kExitUsage;
    }
    if (*synth) return run_synth(g, spec_path);
    if (*segment) return run_segment(g, manifest, wavs);
    if (*features) return run_features(g, manifest);
    if (*train) return run_train(g, manifest, model, language);
    if (*ft) return run_finetune(g, base, target, language);
    if (*evaluate) return run_evaluate(g, manifest, model, protocol, target, base_lang, base_model);
    if (*matrix) return run_matrix(g, manifest, models);
    if (*report) return run_report(inputs, md_out);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "pdspeech: usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (auto& c : msg) {
      if (c == '\n') c = ' ';
    }
    std::fprintf(stderr, "pdspeech: error: %s\n", msg.c_str());
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace pdspeech
