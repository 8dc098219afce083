// tests/test_eval.cc

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

#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "pdspeech/eval.h"
#include "oracles.h"
#include "synth_util.h"
#include "test_util.h"

using namespace pdspeech;
using pdspeech::testing::mann_whitney;
using pdspeech::testing::synth_prepared;
using pdspeech::testing::variant;

namespace {

std::vector<SpeakerMeta> census(int pd, int hc) {
  std::vector<SpeakerMeta> s;
  for (int i = 0; i < pd; ++i) s.push_back({"pd" + std::to_string(i), Label::PD, "es", Sex::M, 60, {}, {}});
  for (int i = 0; i < hc; ++i) s.push_back({"hc" + std::to_string(i), Label::HC, "es", Sex::F, 60, {}, {}});
  return s;
}

TaskDecision td(Label l, double p) { return {"t", l, p}; }

SynthSpec small_spec() {
  SynthSpec s = default_synth_spec();
  s.utterances_per_speaker = 3;
  s.duration_min_s = 1.5;
  s.duration_max_s = 2.0;
  return s;
}

}  // namespace

// ---- folds ----

TEST_CASE("50 PD + 50 HC split into 10 folds of 5 + 5") {
  const auto speakers = census(50, 50);
  const FoldPlan plan = make_folds(speakers, 10, 3);
  CHECK(plan.fold_of.size() == 100);
  for (int f = 0; f < 10; ++f) {
    const auto ids = plan.speakers_in(f);
    CHECK(std::count_if(ids.begin(), ids.end(), [](const auto& s) { return s.rfind("pd", 0) == 0; }) == 5);
    CHECK(std::count_if(ids.begin(), ids.end(), [](const auto& s) { return s.rfind("hc", 0) == 0; }) == 5);
  }
  CHECK(make_folds(speakers, 10, 3) == plan);
  CHECK_FALSE(make_folds(speakers, 10, 4) == plan);
}

TEST_CASE("uneven classes still give a stratified partition") {
  const auto speakers = census(23, 17);
  const FoldPlan plan = make_folds(speakers, 10, 1);
  std::set<std::string> seen;
  std::vector<int> pd(10), total(10);
  for (int f = 0; f < 10; ++f) {
    for (const auto& s : plan.speakers_in(f)) {
      CHECK(seen.insert(s).second);
      pd[f] += s[0] == 'p';
      ++total[f];
    }
  }
  CHECK(seen.size() == 40);
  CHECK(*std::max_element(pd.begin(), pd.end()) - *std::min_element(pd.begin(), pd.end()) <= 1);
  CHECK(*std::max_element(total.begin(), total.end()) - *std::min_element(total.begin(), total.end()) <= 1);
  CHECK_THROWS_AS(make_folds(census(9, 20), 10, 1), Error);
  CHECK_THROWS_AS(plan.fold("nobody"), Error);
}

TEST_CASE("injected speaker overlap is caught") {
  CHECK_NOTHROW(check_speaker_disjoint({"a", "b"}, {"c"}));
  CHECK_THROWS_AS(check_speaker_disjoint({"a", "b", "c"}, {"d", "b"}), SpeakerLeakError);
}

// ---- voting and metrics ----

TEST_CASE("majority vote") {
  CHECK(majority_vote({td(Label::PD, 0.9), td(Label::PD, 0.8), td(Label::HC, 0.1)}).label == Label::PD);
  const Vote tie = majority_vote({td(Label::PD, 0.9), td(Label::HC, 0.45)});
  CHECK(tie.label == Label::PD);
  CHECK(tie.score == doctest::Approx(0.675));
  CHECK(majority_vote({td(Label::PD, 0.6), td(Label::HC, 0.3)}).label == Label::HC);
  CHECK(majority_vote({td(Label::HC, 0.2)}).label == Label::HC);
  CHECK_THROWS_AS(majority_vote({}), Error);
}

TEST_CASE("confusion metrics") {
  const Metrics m = confusion_metrics(Confusion{45, 40, 10, 5});
  CHECK(m.accuracy == doctest::Approx(85.0));
  CHECK(m.sensitivity == doctest::Approx(90.0));
  CHECK(m.specificity == doctest::Approx(80.0));
  // (45*40 - 10*5) / sqrt(55 * 50 * 50 * 45)
  CHECK(std::abs(m.mcc - 1750.0 / std::sqrt(55.0 * 50 * 50 * 45)) < 1e-15);
  CHECK(std::abs(m.mcc - 0.7035) <= 0.0005);

  const Metrics perfect = confusion_metrics(Confusion{30, 20, 0, 0});
  CHECK(perfect.accuracy == 100.0);
  CHECK(perfect.mcc == 1.0);
  const Metrics all_pd = confusion_metrics(Confusion{25, 0, 25, 0});
  CHECK(all_pd.sensitivity == 100.0);
  CHECK(all_pd.specificity == 0.0);
  CHECK(all_pd.mcc == 0.0);
}

TEST_CASE("metric identities on random confusions") {
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const Confusion c{static_cast<long>(rng.below(50)) + 1, static_cast<long>(rng.below(50)) + 1,
                      static_cast<long>(rng.below(50)), static_cast<long>(rng.below(50))};
    const Metrics m = confusion_metrics(c);
    const double P = c.tp + c.fn, N = c.tn + c.fp;
    CHECK(m.accuracy == doctest::Approx((m.sensitivity * P + m.specificity * N) / (P + N)));
    // Swapping classes together with predictions.
    const Metrics s = confusion_metrics(Confusion{c.tn, c.tp, c.fn, c.fp});
    CHECK(s.mcc == doctest::Approx(m.mcc).epsilon(1e-12));
    CHECK(m.mcc >= -1.0);
    CHECK(m.mcc <= 1.0);
  }
}

TEST_CASE("speaker decisions feed the confusion counts") {
  std::vector<SpeakerDecision> d(4);
  d[0].truth = Label::PD, d[0].label = Label::PD;
  d[1].truth = Label::PD, d[1].label = Label::HC;
  d[2].truth = Label::HC, d[2].label = Label::HC;
  d[3].truth = Label::HC, d[3].label = Label::PD;
  const Metrics m = confusion_metrics(d);
  CHECK(m.counts.tp == 1);
  CHECK(m.counts.fn == 1);
  CHECK(m.counts.tn == 1);
  CHECK(m.counts.fp == 1);
}

// ---- roc ----

TEST_CASE("roc and auc") {
  const Roc perfect = roc_auc({{0.9, Label::PD}, {0.8, Label::PD}, {0.3, Label::HC}, {0.1, Label::HC}});
  CHECK(perfect.auc == 1.0);
  CHECK(perfect.points.front().fpr == 0.0);
  CHECK(perfect.points.back().fpr == 1.0);
  CHECK(perfect.points.back().tpr == 1.0);
  const Roc ties = roc_auc({{0.5, Label::PD}, {0.5, Label::HC}, {0.5, Label::PD}, {0.5, Label::HC}});
  CHECK(ties.auc == 0.5);
  CHECK(ties.points.size() == 2);
  CHECK_THROWS_AS(roc_auc({{0.2, Label::PD}, {0.3, Label::PD}}), Error);
  CHECK_THROWS_AS(roc_auc({{std::nan(""), Label::PD}, {0.3, Label::HC}}), Error);
}

TEST_CASE("auc equals the Mann-Whitney statistic") {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<double, Label>> s;
    const std::size_t n = 5 + rng.below(60);
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse scores so ties are common.
      const double v = std::round(rng.uniform() * 20.0) / 20.0;
      s.push_back({v, i < 2 ? (i == 0 ? Label::PD : Label::HC) : (rng.uniform() < 0.5 ? Label::PD : Label::HC)});
    }
    const Roc r = roc_auc(s);
    CHECK(std::abs(r.auc - mann_whitney(s)) <= 1e-12);
    for (std::size_t k = 1; k < r.points.size(); ++k) {
      CHECK(r.points[k].fpr >= r.points[k - 1].fpr);
      CHECK(r.points[k].tpr >= r.points[k - 1].tpr);
    }
    auto flipped = s;
    for (auto& [v, l] : flipped) v = 1.0 - v, l = l == Label::PD ? Label::HC : Label::PD;
    CHECK(std::abs(roc_auc(flipped).auc - r.auc) <= 1e-12);
  }
}

TEST_CASE("roc csv") {
  pdspeech::testing::TempDir dir("roc");
  const Roc r = roc_auc({{0.9, Label::PD}, {0.4, Label::HC}});
  write_roc_csv(dir.path() / "roc.csv", r.points);
  const std::string text = pdspeech::testing::read_file(dir.path() / "roc.csv");
  CHECK(text.rfind("fpr,tpr,threshold\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + static_cast<long>(r.points.size()));
  CHECK(text.find("inf") != std::string::npos);
}

// ---- experiments ----

TEST_CASE("individual protocol separates a strong-contrast corpus") {
  PipelineConfig cfg;
  const SynthSpec spec = small_spec();
  const std::vector<PreparedCorpus> corpora = {synth_prepared(spec, variant(spec.languages[0], "es", 15), 4, cfg)};
  const EvalReport r = run_experiment(corpora, {Protocol::Kind::Individual, "", "es"}, ModelKind::BaselineSvm, cfg, 9);
  CHECK(r.accuracy.mean >= 80.0);
  CHECK(r.folds == 10);
  CHECK(r.fold_results.size() == 10);
  CHECK(r.decisions.size() + r.skipped_speakers == 30);
  std::set<std::string> tested;
  for (const auto& f : r.fold_results) {
    CHECK_NOTHROW(check_speaker_disjoint(f.train_speakers, f.test_speakers));
    for (const auto& s : f.test_speakers) CHECK(tested.insert(s).second);
    CHECK(f.train_speakers.size() + f.test_speakers.size() == 30);
  }
  CHECK(tested.size() == 30);
  for (double v : {r.accuracy.mean, r.sensitivity.mean, r.specificity.mean}) {
    CHECK(v >= 0.0);
    CHECK(v <= 100.0);
  }
  CHECK(r.auc >= 0.0);
  CHECK(r.auc <= 1.0);

  SUBCASE("bit reproducible") {
    const EvalReport again =
        run_experiment(corpora, {Protocol::Kind::Individual, "", "es"}, ModelKind::BaselineSvm, cfg, 9);
    CHECK(report_json(again).dump() == report_json(r).dump());
  }
  SUBCASE("json round trip") {
    const EvalReport back = report_from_json(nlohmann::json::parse(report_json(r).dump()));
    CHECK(report_json(back).dump() == report_json(r).dump());
  }
  SUBCASE("markdown table") {
    const std::string md = markdown_table({r});
    CHECK(md.find("| Language | Model | Acc (%) | Sen (%) | Spe (%) | MCC |") != std::string::npos);
    CHECK(md.find("| es | baseline-svm |") != std::string::npos);
  }
  SUBCASE("protocol errors") {
    CHECK_THROWS_AS(run_experiment(corpora, {Protocol::Kind::Transfer, "es", "es"}, ModelKind::Cnn, cfg, 1),
                    ConfigError);
    CHECK_THROWS_AS(run_experiment(corpora, {Protocol::Kind::Individual, "", "xx"}, ModelKind::Cnn, cfg, 1), Error);
  }
}

TEST_CASE("zero-epoch transfer from a same-distribution base matches the individual protocol") {
  PipelineConfig cfg;
  cfg.cv.folds = 5;
  cfg.cnn.epochs = 8;
  cfg.cnn.batch_size = 32;
  cfg.cnn.finetune_epochs = 0;
  const SynthSpec spec = small_spec();
  std::vector<double> diffs;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const std::vector<PreparedCorpus> corpora = {
        // The base sees as many speakers as one individual-protocol training split.
        synth_prepared(spec, variant(spec.languages[0], "a", 12), 10 + seed, cfg),
        synth_prepared(spec, variant(spec.languages[0], "b", 15), 20 + seed, cfg)};
    const EvalReport ind = run_experiment(corpora, {Protocol::Kind::Individual, "", "b"}, ModelKind::Cnn, cfg, seed);
    const EvalReport tr = run_experiment(corpora, {Protocol::Kind::Transfer, "a", "b"}, ModelKind::Cnn, cfg, seed);
    CHECK(tr.base_language == "a");
    CHECK(tr.protocol == "transfer");
    diffs.push_back(tr.accuracy.mean - ind.accuracy.mean);
    MESSAGE("seed ", seed, ": individual ", ind.accuracy.mean, " transfer ", tr.accuracy.mean);
  }
  std::sort(diffs.begin(), diffs.end());
  CHECK(std::abs(diffs[1]) <= 5.0);
}

TEST_CASE("transfer markdown uses base and target columns") {
  EvalReport r;
  r.protocol = "transfer";
  r.base_language = "es";
  r.target_language = "de";
  r.model = "cnn";
  r.accuracy = {81.26, 4.5};
  const std::string md = markdown_table({r});
  CHECK(md.find("| Base lang. | Target lang. | Acc (%) | Sen (%) | Spe (%) | MCC |") != std::string::npos);
  CHECK(md.find("| es | de | 81.3 (4.5) |") != std::string::npos);
}

TEST_CASE("model kind names") {
  CHECK(parse_model_kind("cnn") == ModelKind::Cnn);
  CHECK(parse_model_kind("baseline-svm") == ModelKind::BaselineSvm);
  CHECK(to_string(ModelKind::BaselineSvm) == "baseline-svm");
  CHECK_THROWS_AS(parse_model_kind("gmm"), ConfigError);
}
