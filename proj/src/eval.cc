// src/eval.cc

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

#include "pdspeech/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <set>

#include "pdspeech/basefeat.h"
#include "pdspeech/segment.h"
#include "pdspeech/svm.h"

namespace pdspeech {

PreparedUtterance prepare_utterance(const AudioClip& clip, const PipelineConfig& cfg) {
  PreparedUtterance u;
  u.record = clip.source;
  const ExtractResult seg = segment_clip(clip, cfg.voicing, cfg.segment);
  u.segments_skipped = seg.skipped;
  const MatrixD fb = mel_filterbank(cfg.spectrogram);
  for (const auto& s : seg.segments) u.mels.push_back(mel_spectrogram(s.samples, cfg.spectrogram, fb).values);
  if (!seg.segments.empty()) u.baseline = utterance_features(seg.segments, cfg.mfcc).vector;
  return u;
}

std::vector<PreparedCorpus> prepare_corpora(const std::vector<UtteranceRecord>& records,
                                            const PipelineConfig& cfg) {
  std::vector<PreparedUtterance> prepared(records.size());
  std::vector<std::exception_ptr> errors(records.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < static_cast<long>(records.size()); ++i) {
    try {
      prepared[i] = prepare_utterance(load_audio(records[i]), cfg);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::map<std::string, PreparedCorpus> by_lang;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& c = by_lang[records[i].speaker.language];
    c.language = records[i].speaker.language;
    c.segments_skipped += prepared[i].segments_skipped;
    c.utterances.push_back(std::move(prepared[i]));
  }
  std::vector<PreparedCorpus> out;
  for (auto& [lang, c] : by_lang) out.push_back(std::move(c));
  return out;
}

int FoldPlan::fold(const std::string& speaker_id) const {
  const auto it = fold_of.find(speaker_id);
  if (it == fold_of.end()) throw Error("speaker " + speaker_id + " is not in the fold plan");
  return it->second;
}

std::vector<std::string> FoldPlan::speakers_in(int f) const {
  std::vector<std::string> out;
  for (const auto& [id, g] : fold_of) {
    if (g == f) out.push_back(id);
  }
  return out;
}

FoldPlan make_folds(const std::vector<SpeakerMeta>& speakers, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("make_folds: k must be >= 2");
  std::vector<std::string> pd, hc;
  std::set<std::string> seen;
  for (const auto& s : speakers) {
    if (!seen.insert(s.speaker_id).second) continue;
    (s.label == Label::PD ? pd : hc).push_back(s.speaker_id);
  }
  const auto kk = static_cast<std::size_t>(k);
  if (pd.size() < kk || hc.size() < kk) {
    throw Error("make_folds: need at least " + std::to_string(k) + " speakers per class, have " +
                std::to_string(pd.size()) + " PD and " + std::to_string(hc.size()) + " HC");
  }
  // Input order must not matter, only the seed.
  std::sort(pd.begin(), pd.end());
  std::sort(hc.begin(), hc.end());
  Rng rng(seed);
  rng.shuffle(pd.begin(), pd.end());
  rng.shuffle(hc.begin(), hc.end());
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  for (std::size_t i = 0; i < pd.size(); ++i) plan.fold_of[pd[i]] = static_cast<int>(i % kk);
  const std::size_t offset = pd.size() % kk;
  for (std::size_t i = 0; i < hc.size(); ++i) plan.fold_of[hc[i]] = static_cast<int>((offset + i) % kk);
  return plan;
}

void check_speaker_disjoint(const std::vector<std::string>& train, const std::vector<std::string>& test) {
  const std::set<std::string> train_set(train.begin(), train.end());
  for (const auto& s : test) {
    if (train_set.count(s)) throw SpeakerLeakError("speaker " + s + " is in both train and test");
  }
}

Vote majority_vote(const std::vector<TaskDecision>& decisions) {
  if (decisions.empty()) throw Error("majority_vote: no task decisions");
  std::size_t pd = 0;
  double sum = 0.0;
  for (const auto& d : decisions) {
    if (d.label == Label::PD) ++pd;
    sum += d.posterior;
  }
  const std::size_t hc = decisions.size() - pd;
  Vote v;
  v.score = sum / static_cast<double>(decisions.size());
  if (pd != hc) {
    v.label = pd > hc ? Label::PD : Label::HC;
  } else {
    v.label = v.score >= 0.5 ? Label::PD : Label::HC;
  }
  return v;
}

Metrics confusion_metrics(const Confusion& c) {
  Metrics m;
  m.counts = c;
  const auto ratio = [](long a, long b) { return b > 0 ? 100.0 * static_cast<double>(a) / static_cast<double>(b) : 0.0; };
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.sensitivity = ratio(c.tp, c.tp + c.fn);
  m.specificity = ratio(c.tn, c.tn + c.fp);
  const double d1 = static_cast<double>(c.tp + c.fp), d2 = static_cast<double>(c.tp + c.fn);
  const double d3 = static_cast<double>(c.tn + c.fp), d4 = static_cast<double>(c.tn + c.fn);
  if (d1 > 0 && d2 > 0 && d3 > 0 && d4 > 0) {
    const double num = static_cast<double>(c.tp) * static_cast<double>(c.tn) -
                       static_cast<double>(c.fp) * static_cast<double>(c.fn);
    m.mcc = num / std::sqrt(d1 * d2 * d3 * d4);
  }
  return m;
}

Metrics confusion_metrics(const std::vector<SpeakerDecision>& decisions) {
  Confusion c;
  for (const auto& d : decisions) {
    if (d.truth == Label::PD) {
      (d.label == Label::PD ? c.tp : c.fn) += 1;
    } else {
      (d.label == Label::HC ? c.tn : c.fp) += 1;
    }
  }
  return confusion_metrics(c);
}

Roc roc_auc(const std::vector<std::pair<double, Label>>& scores) {
  long pos = 0, neg = 0;
  for (const auto& [s, l] : scores) {
    if (!std::isfinite(s)) throw Error("roc_auc: non-finite score");
    (l == Label::PD ? pos : neg) += 1;
  }
  if (pos == 0 || neg == 0) throw Error("roc_auc: both classes must be present");
  auto sorted = scores;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  Roc roc;
  roc.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  long tp = 0, fp = 0;
  double area = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    const double thr = sorted[i].first;
    const long tp0 = tp, fp0 = fp;
    for (; i < sorted.size() && sorted[i].first == thr; ++i) (sorted[i].second == Label::PD ? tp : fp) += 1;
    // Trapezoid in count units; normalized once at the end.
    area += static_cast<double>(fp - fp0) * static_cast<double>(tp + tp0) / 2.0;
    roc.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                          static_cast<double>(tp) / static_cast<double>(pos), thr});
  }
  roc.auc = area / (static_cast<double>(pos) * static_cast<double>(neg));
  return roc;
}

std::string to_string(ModelKind k) { return k == ModelKind::Cnn ? "cnn" : "baseline-svm"; }

ModelKind parse_model_kind(const std::string& s) {
  if (s == "cnn") return ModelKind::Cnn;
  if (s == "baseline-svm" || s == "svm") return ModelKind::BaselineSvm;
  throw ConfigError("unknown model kind: " + s);
}

const PreparedCorpus& find_corpus(const std::vector<PreparedCorpus>& corpora, const std::string& language) {
  for (const auto& c : corpora) {
    if (c.language == language) return c;
  }
  throw Error("no corpus for language '" + language + "'");
}

namespace {

std::vector<LabeledSpectrogram> labeled_segments(const std::vector<const PreparedUtterance*>& utts) {
  std::vector<LabeledSpectrogram> data;
  for (const auto* u : utts) {
    for (const auto& m : u->mels) data.push_back({m, u->record.speaker.label});
  }
  return data;
}

MeanStd mean_std(const std::vector<double>& v) {
  MeanStd r;
  if (v.empty()) return r;
  for (double x : v) r.mean += x;
  r.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return r;
}

struct FoldOutput {
  FoldResult result;
  std::vector<SpeakerDecision> decisions;
  std::size_t skipped = 0;
};

FoldOutput run_fold(const PreparedCorpus& target, const FoldPlan& plan, int f, ModelKind kind,
                    const PipelineConfig& cfg, std::uint64_t fold_seed, const PdCnn* base) {
  std::vector<const PreparedUtterance*> train, test;
  std::set<std::string> train_ids, test_ids;
  for (const auto& u : target.utterances) {
    const std::string& id = u.record.speaker.speaker_id;
    if (plan.fold(id) == f) {
      test.push_back(&u);
      test_ids.insert(id);
    } else {
      train.push_back(&u);
      train_ids.insert(id);
    }
  }
  FoldOutput out;
  out.result.fold = f;
  out.result.train_speakers.assign(train_ids.begin(), train_ids.end());
  out.result.test_speakers.assign(test_ids.begin(), test_ids.end());
  check_speaker_disjoint(out.result.train_speakers, out.result.test_speakers);

  // Posterior per usable test utterance.
  std::vector<std::optional<double>> post(test.size());
  if (kind == ModelKind::Cnn) {
    const auto data = labeled_segments(train);
    const PdCnn model =
        base ? finetune(*base, data, cfg.cnn, fold_seed).model : train_cnn(data, cfg.cnn, fold_seed).model;
    for (std::size_t i = 0; i < test.size(); ++i) {
      if (!test[i]->mels.empty()) post[i] = cnn_predict(model, test[i]->mels);
    }
  } else {
    std::vector<std::vector<double>> x;
    std::vector<Label> y;
    for (const auto* u : train) {
      if (u->baseline.empty()) continue;
      x.push_back(u->baseline);
      y.push_back(u->record.speaker.label);
    }
    const SvmModel model = train_svm(x, y, cfg.svm);
    for (std::size_t i = 0; i < test.size(); ++i) {
      if (!test[i]->baseline.empty()) post[i] = svm_posterior(svm_predict(model, test[i]->baseline).score);
    }
  }

  for (const auto& id : out.result.test_speakers) {
    std::map<std::string, std::vector<double>> by_task;
    Label truth = Label::HC;
    for (std::size_t i = 0; i < test.size(); ++i) {
      if (test[i]->record.speaker.speaker_id != id) continue;
      truth = test[i]->record.speaker.label;
      if (post[i]) by_task[test[i]->record.task].push_back(*post[i]);
    }
    if (by_task.empty()) {
      ++out.skipped;
      continue;
    }
    SpeakerDecision d;
    d.speaker_id = id;
    d.truth = truth;
    for (const auto& [task, ps] : by_task) {
      double s = 0.0;
      for (double p : ps) s += p;
      s /= static_cast<double>(ps.size());
      d.tasks.push_back({task, s >= 0.5 ? Label::PD : Label::HC, s});
    }
    const Vote v = majority_vote(d.tasks);
    d.label = v.label;
    d.score = v.score;
    out.decisions.push_back(std::move(d));
  }
  out.result.metrics = confusion_metrics(out.decisions);
  return out;
}

}  // namespace

PdCnn train_full_corpus(const PreparedCorpus& corpus, const PipelineConfig& cfg, std::uint64_t seed,
                        std::vector<EpochLog>* log) {
  std::vector<const PreparedUtterance*> all;
  for (const auto& u : corpus.utterances) all.push_back(&u);
  TrainResult r = train_cnn(labeled_segments(all), cfg.cnn, seed);
  r.model.provenance.base_language = corpus.language;
  if (log) *log = r.log;
  return std::move(r.model);
}

EvalReport run_experiment(const std::vector<PreparedCorpus>& corpora, const Protocol& protocol, ModelKind kind,
                          const PipelineConfig& cfg, std::uint64_t seed, const PdCnn* base_model) {
  cfg.validate();
  const bool transfer = protocol.kind == Protocol::Kind::Transfer;
  if (transfer) {
    if (protocol.base == protocol.target) throw ConfigError("transfer protocol needs different base and target");
    if (kind != ModelKind::Cnn) throw ConfigError("transfer protocol is only defined for the CNN");
  }
  const PreparedCorpus& target = find_corpus(corpora, protocol.target);

  std::optional<PdCnn> trained_base;
  if (transfer && !base_model) {
    trained_base = train_full_corpus(find_corpus(corpora, protocol.base), cfg, derive_seed(seed, "base:" + protocol.base));
    base_model = &*trained_base;
  }

  std::vector<UtteranceRecord> records;
  for (const auto& u : target.utterances) records.push_back(u.record);
  const FoldPlan plan = make_folds(speakers_of(records), cfg.cv.folds, derive_seed(seed, "folds:" + target.language));

  const int k = cfg.cv.folds;
  std::vector<FoldOutput> outputs(static_cast<std::size_t>(k));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(k));
#pragma omp parallel for schedule(dynamic, 1)
  for (int f = 0; f < k; ++f) {
    try {
      outputs[f] = run_fold(target, plan, f, kind, cfg, derive_seed(seed, "fold:" + std::to_string(f)),
                            transfer ? base_model : nullptr);
    } catch (...) {
      errors[f] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  EvalReport r;
  r.protocol = transfer ? "transfer" : "individual";
  r.base_language = transfer ? protocol.base : "";
  r.target_language = protocol.target;
  r.model = to_string(kind);
  r.seed = seed;
  r.folds = k;
  std::vector<double> acc, sen, spe;
  for (auto& o : outputs) {
    acc.push_back(o.result.metrics.accuracy);
    sen.push_back(o.result.metrics.sensitivity);
    spe.push_back(o.result.metrics.specificity);
    r.skipped_speakers += o.skipped;
    r.decisions.insert(r.decisions.end(), o.decisions.begin(), o.decisions.end());
    r.fold_results.push_back(std::move(o.result));
  }
  r.accuracy = mean_std(acc);
  r.sensitivity = mean_std(sen);
  r.specificity = mean_std(spe);
  r.pooled = confusion_metrics(r.decisions);
  std::vector<std::pair<double, Label>> scores;
  bool pd = false, hc = false;
  for (const auto& d : r.decisions) {
    scores.push_back({d.score, d.truth});
    (d.truth == Label::PD ? pd : hc) = true;
  }
  if (pd && hc) {
    const Roc roc = roc_auc(scores);
    r.roc = roc.points;
    r.auc = roc.auc;
  }
  return r;
}

namespace {

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

double number_from(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::quiet_NaN();
}

nlohmann::json metrics_json(const Metrics& m) {
  return {{"tp", m.counts.tp},           {"tn", m.counts.tn},
          {"fp", m.counts.fp},           {"fn", m.counts.fn},
          {"accuracy", m.accuracy},      {"sensitivity", m.sensitivity},
          {"specificity", m.specificity}, {"mcc", m.mcc}};
}

Metrics metrics_from(const nlohmann::json& j) {
  Metrics m;
  m.counts = {j.at("tp").get<long>(), j.at("tn").get<long>(), j.at("fp").get<long>(), j.at("fn").get<long>()};
  m.accuracy = j.at("accuracy").get<double>();
  m.sensitivity = j.at("sensitivity").get<double>();
  m.specificity = j.at("specificity").get<double>();
  m.mcc = j.at("mcc").get<double>();
  return m;
}

}  // namespace

nlohmann::json report_json(const EvalReport& r) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : r.fold_results) {
    folds.push_back({{"fold", f.fold},
                     {"metrics", metrics_json(f.metrics)},
                     {"train_speakers", f.train_speakers},
                     {"test_speakers", f.test_speakers}});
  }
  nlohmann::json decisions = nlohmann::json::array();
  for (const auto& d : r.decisions) {
    nlohmann::json tasks = nlohmann::json::array();
    for (const auto& t : d.tasks) {
      tasks.push_back({{"task", t.task}, {"label", to_string(t.label)}, {"posterior", t.posterior}});
    }
    decisions.push_back({{"speaker_id", d.speaker_id},
                         {"truth", to_string(d.truth)},
                         {"label", to_string(d.label)},
                         {"score", d.score},
                         {"tasks", tasks}});
  }
  nlohmann::json roc = nlohmann::json::array();
  for (const auto& p : r.roc) roc.push_back({{"fpr", p.fpr}, {"tpr", p.tpr}, {"threshold", number(p.threshold)}});
  const auto ms = [](const MeanStd& m) { return nlohmann::json{{"mean", m.mean}, {"std", m.std}}; };
  return {{"protocol", r.protocol},
          {"base_language", r.base_language},
          {"target_language", r.target_language},
          {"model", r.model},
          {"seed", r.seed},
          {"folds", r.folds},
          {"accuracy", ms(r.accuracy)},
          {"sensitivity", ms(r.sensitivity)},
          {"specificity", ms(r.specificity)},
          {"mcc", r.pooled.mcc},
          {"auc", r.auc},
          {"pooled", metrics_json(r.pooled)},
          {"skipped_speakers", r.skipped_speakers},
          {"fold_results", folds},
          {"decisions", decisions},
          {"roc", roc}};
}

EvalReport report_from_json(const nlohmann::json& j) {
  EvalReport r;
  try {
    r.protocol = j.at("protocol").get<std::string>();
    r.base_language = j.at("base_language").get<std::string>();
    r.target_language = j.at("target_language").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.folds = j.at("folds").get<int>();
    const auto ms = [](const nlohmann::json& m) { return MeanStd{m.at("mean").get<double>(), m.at("std").get<double>()}; };
    r.accuracy = ms(j.at("accuracy"));
    r.sensitivity = ms(j.at("sensitivity"));
    r.specificity = ms(j.at("specificity"));
    r.pooled = metrics_from(j.at("pooled"));
    r.auc = j.at("auc").get<double>();
    r.skipped_speakers = j.at("skipped_speakers").get<std::size_t>();
    for (const auto& f : j.at("fold_results")) {
      r.fold_results.push_back({f.at("fold").get<int>(), metrics_from(f.at("metrics")),
                                f.at("train_speakers").get<std::vector<std::string>>(),
                                f.at("test_speakers").get<std::vector<std::string>>()});
    }
    for (const auto& d : j.at("decisions")) {
      SpeakerDecision s;
      s.speaker_id = d.at("speaker_id").get<std::string>();
      s.truth = parse_label(d.at("truth").get<std::string>());
      s.label = parse_label(d.at("label").get<std::string>());
      s.score = d.at("score").get<double>();
      for (const auto& t : d.at("tasks")) {
        s.tasks.push_back({t.at("task").get<std::string>(), parse_label(t.at("label").get<std::string>()),
                           t.at("posterior").get<double>()});
      }
      r.decisions.push_back(std::move(s));
    }
    for (const auto& p : j.at("roc")) {
      r.roc.push_back({p.at("fpr").get<double>(), p.at("tpr").get<double>(), number_from(p.at("threshold"))});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed report: ") + e.what());
  }
  return r;
}

namespace {

std::string pct(const MeanStd& m) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.1f (%.1f)", m.mean, m.std);
  return buf;
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string markdown_table(const std::vector<EvalReport>& reports) {
  std::string out;
  std::string current;
  for (const auto& r : reports) {
    if (r.protocol != current) {
      if (!out.empty()) out += "\n";
      current = r.protocol;
      if (current == "transfer") {
        out += "| Base lang. | Target lang. | Acc (%) | Sen (%) | Spe (%) | MCC | AUC |\n";
      } else {
        out += "| Language | Model | Acc (%) | Sen (%) | Spe (%) | MCC | AUC |\n";
      }
      out += "|---|---|---|---|---|---|---|\n";
    }
    const std::string first = current == "transfer" ? r.base_language : r.target_language;
    const std::string second = current == "transfer" ? r.target_language : r.model;
    out += "| " + first + " | " + second + " | " + pct(r.accuracy) + " | " + pct(r.sensitivity) + " | " +
           pct(r.specificity) + " | " + fixed2(r.pooled.mcc) + " | " + fixed2(r.auc) + " |\n";
  }
  return out;
}

void write_roc_csv(const std::filesystem::path& path, const std::vector<RocPoint>& roc) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  os << "fpr,tpr,threshold\n";
  char buf[96];
  for (const auto& p : roc) {
    if (std::isfinite(p.threshold)) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", p.fpr, p.tpr, p.threshold);
    } else {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,inf\n", p.fpr, p.tpr);
    }
    os << buf;
  }
}

}  // namespace pdspeech
