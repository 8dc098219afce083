// tests/acceptance.cc

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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <fcntl.h>
#include <unistd.h>

#include "json.hpp"
#include "oracles.h"
#include "pdspeech/basefeat.h"
#include "pdspeech/cli.h"
#include "pdspeech/cnn.h"
#include "pdspeech/config.h"
#include "pdspeech/eval.h"
#include "pdspeech/nn/kernels.h"
#include "pdspeech/nn/network.h"
#include "pdspeech/segment.h"
#include "pdspeech/svm.h"
#include "pdspeech/synth.h"
#include "synth_util.h"
#include "test_util.h"

using namespace pdspeech;
namespace fs = std::filesystem;
namespace t = pdspeech::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c, d);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---- 1 ----

Outcome shape_fidelity() {
  const SynthSpec spec = default_synth_spec();
  const SpeakerVoice v = make_speaker(spec, spec.languages[0], Label::PD, 0, 1);
  const SynthClip sc = synth_clip(spec, spec.languages[0], v, 0, 1);
  const ExtractResult r = segment_clip(AudioClip{sc.samples, kPipelineSampleRate, sc.record}, VoicingConfig{}, SegmentConfig{});
  if (r.segments.empty()) return {false, "no segments"};
  for (const auto& s : r.segments) {
    if (s.samples.size() != 2560) return {false, "segment length " + std::to_string(s.samples.size())};
    const auto m = mel_spectrogram(s.samples, SpectrogramConfig{});
    if (m.values.rows() != 80 || m.values.cols() != 41) return {false, "mel shape mismatch"};
  }

  using V = std::vector<std::size_t>;
  const std::vector<std::pair<V, V>> table = {
      {{1, 80, 41}, {4, 80, 41}}, {{4, 80, 41}, {4, 40, 20}},  {{4, 40, 20}, {8, 40, 20}}, {{8, 40, 20}, {8, 20, 10}},
      {{8, 20, 10}, {16, 20, 10}}, {{16, 20, 10}, {16, 10, 5}}, {{16, 10, 5}, {32, 10, 5}}, {{32, 10, 5}, {32, 5, 2}},
      {{320}, {128}},              {{128}, {64}},               {{64}, {2}}};
  PdCnn m{CnnConfig{}};
  m.net.init(1);
  const auto& layers = m.net.layers();
  const auto& shapes = m.net.output_shapes();
  std::vector<std::pair<V, V>> got;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto k = layers[l].kind;
    if (k != nn::LayerKind::Conv2d && k != nn::LayerKind::MaxPool2d && k != nn::LayerKind::Dense) continue;
    V in = l == 0 ? m.net.input_shape() : shapes[l - 1];
    if (k == nn::LayerKind::Dense && in.size() > 1) in = {nn::shape_size(in)};
    got.push_back({in, shapes[l]});
  }
  if (got != table) return {false, "layer shape chain differs"};
  const auto p = m.probabilities(mel_spectrogram(r.segments[0].samples, SpectrogramConfig{}).values);
  if (p.size() != 2 || std::abs(p[0] + p[1] - 1.0) > 1e-6) return {false, "output is not two probabilities"};
  return {true, std::to_string(r.segments.size()) + " segments at 80x41; 11 layer rows match; " +
                    std::to_string(m.net.parameter_count()) + " parameters"};
}

// ---- 2 ----

double rel_err(double a, double b, double floor) { return std::abs(a - b) / std::max({floor, std::abs(a), std::abs(b)}); }

double fd_worst(nn::Network<double>& net, const std::vector<double>& x, std::uint64_t seed, Rng& rng, bool xent,
                std::size_t checks) {
  const auto tr = net.forward(x, nn::Mode::Train, seed);
  std::vector<double> c(tr.logits.size());
  for (auto& v : c) v = rng.uniform(-1, 1);
  const std::size_t target = rng.below(tr.logits.size());
  auto loss = [&](const std::vector<double>& logits) {
    if (xent) return nn::softmax_xent<double>(logits, target).loss;
    return std::inner_product(logits.begin(), logits.end(), c.begin(), 0.0);
  };
  const std::vector<double> g_logits = xent ? nn::softmax_xent<double>(tr.logits, target).grad : c;
  std::vector<double> grads(net.parameter_count(), 0.0);
  net.backward(tr, g_logits, grads);
  auto& p = net.params();
  double worst = 0.0;
  for (std::size_t k = 0; k < checks; ++k) {
    const std::size_t i = checks >= p.size() ? k % p.size() : rng.below(p.size());
    const double keep = p[i], h = 1e-6;
    p[i] = keep + h;
    const double up = loss(net.forward(x, nn::Mode::Train, seed, false).logits);
    p[i] = keep - h;
    const double down = loss(net.forward(x, nn::Mode::Train, seed, false).logits);
    p[i] = keep;
    worst = std::max(worst, rel_err(grads[i], (up - down) / (2 * h), xent ? 1e-5 : 1e-7));
  }
  return worst;
}

Outcome gradient_correctness() {
  using nn::LayerKind;
  const std::vector<std::pair<std::string, std::vector<nn::LayerSpec>>> stacks = {
      {"conv", {{LayerKind::Conv2d, 2, 3, 0.0}}},
      {"relu", {{LayerKind::Conv2d, 2, 3, 0.0}, {LayerKind::Relu, 0, 0, 0.0}}},
      {"maxpool", {{LayerKind::Conv2d, 2, 3, 0.0}, {LayerKind::MaxPool2d, 0, 0, 0.0}}},
      {"dropout", {{LayerKind::Conv2d, 2, 3, 0.0}, {LayerKind::Dropout, 0, 0, 0.4}}},
      {"dense", {{LayerKind::Conv2d, 2, 1, 0.0}, {LayerKind::Dense, 30, 4, 0.0}}},
      {"softmax", {{LayerKind::Conv2d, 2, 1, 0.0}, {LayerKind::Dense, 30, 3, 0.0}, {LayerKind::Softmax, 0, 0, 0.0}}},
  };
  Rng rng(2);
  double worst = 0.0;
  int instances = 0;
  std::string worst_name;
  for (const auto& [name, layers] : stacks) {
    for (int inst = 0; inst < 20; ++inst, ++instances) {
      nn::Network<double> net(layers, {2, 6, 5});
      net.init(derive_seed(inst, name));
      for (auto& v : net.params()) v += 0.05 * rng.uniform(-1, 1);
      std::vector<double> x(60);
      for (auto& v : x) v = rng.uniform(-1, 1);
      const double w = fd_worst(net, x, 100 + inst, rng, name == "softmax", 200);
      if (w > worst) worst = w, worst_name = name;
    }
  }
  for (int inst = 0; inst < 20; ++inst, ++instances) {
    nn::Network<double> net(cnn_layers(CnnConfig{}), {1, 80, 41});
    net.init(inst);
    for (auto& v : net.params()) v += 0.01 * rng.uniform(-1, 1);
    std::vector<double> x(80 * 41);
    for (auto& v : x) v = rng.uniform(-1, 1);
    const double w = fd_worst(net, x, inst, rng, true, 25);
    if (w > worst) worst = w, worst_name = "full network";
  }
  return {worst <= 1e-4, fmt("%.0f instances over 6 layer types and the full network; worst relative error %.2e",
                             instances, worst) + " (" + worst_name + ")"};
}

// ---- 3 ----

Outcome dsp_oracles() {
  Rng rng(3);
  double mfcc_err = 0.0;
  for (int k = 0; k < 3; ++k) {
    const auto x = t::random_vector(2560, rng, -0.8, 0.8);
    const MatrixD got = mfcc(x, MfccConfig{}), want = t::mfcc_oracle(x, MfccConfig{});
    if (got.rows() != want.rows() || got.cols() != want.cols()) return {false, "mfcc shape"};
    for (std::size_t i = 0; i < got.data().size(); ++i) mfcc_err = std::max(mfcc_err, std::abs(got.data()[i] - want.data()[i]));
  }

  double conv_err = 0.0, dense_err = 0.0;
  for (const nn::ConvDims d : {nn::ConvDims{1, 4, 9, 7}, nn::ConvDims{3, 5, 6, 6}}) {
    const auto in = t::random_vector(d.in_c * d.plane(), rng), w = t::random_vector(d.weight_count(), rng),
               b = t::random_vector(d.out_c, rng);
    std::vector<double> o1(d.out_c * d.plane()), o2(o1.size());
    nn::serial::conv2d_forward(d, in.data(), w.data(), b.data(), o1.data());
    nn::parallel::conv2d_forward(d, in.data(), w.data(), b.data(), o2.data());
    const auto want = t::conv_oracle(d, in, w, b);
    for (std::size_t i = 0; i < want.size(); ++i) {
      conv_err = std::max({conv_err, std::abs(o1[i] - want[i]), std::abs(o2[i] - want[i])});
    }
  }
  {
    const std::size_t n_in = 320, n_out = 128;
    const auto x = t::random_vector(n_in, rng), w = t::random_vector(n_in * n_out, rng), b = t::random_vector(n_out, rng);
    std::vector<double> o(n_out);
    nn::parallel::dense_forward(n_in, n_out, x.data(), w.data(), b.data(), o.data());
    for (std::size_t m = 0; m < n_out; ++m) {
      double acc = b[m];
      for (std::size_t n = 0; n < n_in; ++n) acc += w[m * n_in + n] * x[n];
      dense_err = std::max(dense_err, std::abs(acc - o[m]));
    }
  }

  double auc_err = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::pair<double, Label>> s = {{rng.uniform(), Label::PD}, {rng.uniform(), Label::HC}};
    const std::size_t n = 10 + rng.below(80);
    for (std::size_t i = 0; i < n; ++i) {
      s.push_back({std::round(rng.uniform() * 25.0) / 25.0, rng.uniform() < 0.5 ? Label::PD : Label::HC});
    }
    auc_err = std::max(auc_err, std::abs(roc_auc(s).auc - t::mann_whitney(s)));
  }
  const bool ok = mfcc_err <= 1e-9 && conv_err <= 1e-10 && dense_err <= 1e-10 && auc_err <= 1e-12;
  return {ok, fmt("mfcc %.1e, conv %.1e, dense %.1e, auc %.1e", mfcc_err, conv_err, dense_err, auc_err)};
}

// ---- 4 ----

Outcome feature_dimensionality() {
  const SynthSpec spec = default_synth_spec();
  const PipelineConfig cfg;
  std::size_t n = 0, bad = 0;
  for (const auto& lang : spec.languages) {
    SynthSpec s = spec;
    s.utterances_per_speaker = 2;
    s.duration_min_s = 2.0;
    s.duration_max_s = 3.0;
    const PreparedCorpus c = t::synth_prepared(s, t::variant(lang, lang.name, 5), 4, cfg);
    for (const auto& u : c.utterances) {
      ++n;
      if (u.baseline.size() != 232) ++bad;
    }
  }
  if (descriptor_names().size() != 232) return {false, "descriptor name count"};
  return {bad == 0, std::to_string(n - bad) + "/" + std::to_string(n) + " utterances give 232 = 58 x 4 values"};
}

// ---- 5 ----

Outcome segmentation_recall() {
  const SynthSpec spec = default_synth_spec();
  std::size_t planted = 0, hit = 0;
  for (const auto& lang : spec.languages) {
    for (Label l : {Label::PD, Label::HC}) {
      for (int i = 0; i < 5; ++i) {
        const SpeakerVoice v = make_speaker(spec, lang, l, i, 5);
        for (int u = 0; u < 2; ++u) {
          const SynthClip sc = synth_clip(spec, lang, v, u, 5);
          const auto found = find_boundaries(voicing(sc.samples), SegmentConfig{}.min_run);
          for (const auto& p : sc.boundaries) {
            ++planted;
            for (const auto& f : found) {
              if (f.kind == p.kind && std::abs(static_cast<long>(f.sample) - static_cast<long>(p.sample)) <= 160) {
                ++hit;
                break;
              }
            }
          }
        }
      }
    }
  }
  const double recall = 100.0 * hit / planted;

  const VoicingTrack saw = voicing(t::sawtooth(150.0, 16000, 16000));
  std::size_t saw_voiced = 0;
  for (std::size_t i = 3; i + 3 < saw.flags.size(); ++i) saw_voiced += saw.flags[i];
  const bool saw_ok = saw_voiced == saw.flags.size() - 6;
  const VoicingTrack noise = voicing(t::white_noise(16000, 123));
  const double unvoiced = 100.0 * std::count(noise.flags.begin(), noise.flags.end(), false) / noise.flags.size();
  return {recall >= 90.0 && saw_ok && unvoiced >= 95.0,
          fmt("recall %.1f%% of %.0f planted boundaries within 10 ms; sawtooth voiced %.0f%%; noise unvoiced %.1f%%",
              recall, planted, 100.0 * saw_voiced / (saw.flags.size() - 6), unvoiced)};
}

// ---- 6 ----

Outcome svm_correctness() {
  Rng rng(6);
  std::vector<std::vector<double>> x;
  std::vector<Label> y;
  for (int i = 0; i < 100; ++i) {
    const Label l = i % 2 ? Label::PD : Label::HC;
    x.push_back({(l == Label::PD ? 2.0 : -2.0) + 0.5 * rng.normal(), 0.5 * rng.normal()});
    y.push_back(l);
  }
  auto accuracy = [](const SvmModel& m, const auto& xs, const auto& ys) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) ok += svm_predict(m, xs[i]).label == ys[i];
    return 100.0 * ok / xs.size();
  };
  SvmConfig blob_cfg;
  blob_cfg.gamma = 0.5;
  SvmTrainInfo info;
  const SvmModel blobs = train_svm(x, y, blob_cfg, &info);
  const double blob_acc = accuracy(blobs, x, y);
  // KKT: y f(x) >= 1 at alpha = 0, = 1 when free, <= 1 at C.
  double kkt = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double m = (y[i] == Label::PD ? 1.0 : -1.0) * svm_predict(blobs, x[i]).score;
    const double a = info.alpha[i];
    if (a <= 0.0) kkt = std::max(kkt, 1.0 - m);
    else if (a >= blob_cfg.C) kkt = std::max(kkt, m - 1.0);
    else kkt = std::max(kkt, std::abs(m - 1.0));
  }

  const std::vector<std::vector<double>> xx = {{-1, -1}, {1, 1}, {-1, 1}, {1, -1}};
  const std::vector<Label> xy = {Label::PD, Label::PD, Label::HC, Label::HC};
  SvmConfig xor_cfg;
  xor_cfg.gamma = 1.0;
  const double xor_acc = accuracy(train_svm(xx, xy, xor_cfg), xx, xy);

  std::vector<std::vector<double>> px;
  std::vector<Label> py;
  for (int i = 0; i < 80; ++i) {
    const Label l = i % 2 ? Label::PD : Label::HC;
    std::vector<double> v(232);
    for (auto& e : v) e = rng.normal() + (l == Label::PD ? 0.3 : -0.3);
    px.push_back(v);
    py.push_back(l);
  }
  const double pipe_acc = accuracy(train_svm(px, py, SvmConfig{}), px, py);
  return {blob_acc == 100.0 && xor_acc == 100.0 && pipe_acc == 100.0 && kkt <= 1e-3,
          fmt("blobs %.0f%%, xor %.0f%%, 232-d at C=10 gamma=1e-4 %.0f%%; worst KKT violation %.1e", blob_acc,
              xor_acc, pipe_acc, kkt)};
}

// ---- 7 ----

Outcome metric_formulas() {
  const Metrics m = confusion_metrics(Confusion{45, 40, 10, 5});
  const Metrics all_pd = confusion_metrics(Confusion{50, 0, 50, 0});
  const bool ok = std::abs(m.mcc - 0.7035) <= 0.0005 && all_pd.mcc == 0.0 && std::abs(m.accuracy - 85.0) < 1e-12 &&
                  std::abs(m.sensitivity - 90.0) < 1e-12 && std::abs(m.specificity - 80.0) < 1e-12;
  return {ok, fmt("MCC %.4f; Acc %.1f Sen %.1f Spe %.1f", m.mcc, m.accuracy, m.sensitivity, m.specificity) +
                  fmt("; all-PD MCC %.1f", all_pd.mcc)};
}

// ---- 8 ----

struct HeldOut {
  double accuracy = 0.0;
  double gap = 0.0;  // |sensitivity - specificity|
};

HeldOut score_speakers(const PdCnn& m, const std::vector<const PreparedUtterance*>& test) {
  std::map<std::string, SpeakerDecision> by_speaker;
  std::map<std::string, std::map<std::string, std::vector<double>>> posts;
  for (const auto* u : test) {
    auto& d = by_speaker[u->record.speaker.speaker_id];
    d.speaker_id = u->record.speaker.speaker_id;
    d.truth = u->record.speaker.label;
    if (!u->mels.empty()) posts[d.speaker_id][u->record.task].push_back(cnn_predict(m, u->mels));
  }
  std::vector<SpeakerDecision> decisions;
  for (auto& [id, d] : by_speaker) {
    for (const auto& [task, ps] : posts[id]) {
      const double s = std::accumulate(ps.begin(), ps.end(), 0.0) / ps.size();
      d.tasks.push_back({task, s >= 0.5 ? Label::PD : Label::HC, s});
    }
    if (d.tasks.empty()) d.tasks.push_back({"none", Label::HC, 0.0});
    const Vote v = majority_vote(d.tasks);
    d.label = v.label;
    d.score = v.score;
    decisions.push_back(d);
  }
  const Metrics mt = confusion_metrics(decisions);
  return {mt.accuracy, std::abs(mt.sensitivity - mt.specificity)};
}

Outcome transfer_analog() {
  PipelineConfig cfg;
  SynthSpec spec = default_synth_spec();  // three domains: es (strong), de, cs
  spec.utterances_per_speaker = 3;
  spec.duration_min_s = 2.0;
  spec.duration_max_s = 3.0;
  const int seeds = 10;
  std::vector<double> acc_s, acc_f, gap_s, gap_f;
  for (int sd = 0; sd < seeds; ++sd) {
    const PreparedCorpus base = t::synth_prepared(spec, t::variant(spec.languages[0], "es", 20), 100 + sd, cfg);
    const PreparedCorpus target = t::synth_prepared(spec, t::variant(spec.languages[1], "de", 30), 200 + sd, cfg);
    // Speakers 0..9 of each class train, 10..29 are held out.
    std::vector<LabeledSpectrogram> base_data, train;
    std::vector<const PreparedUtterance*> test;
    for (const auto& u : base.utterances)
      for (const auto& m : u.mels) base_data.push_back({m, u.record.speaker.label});
    for (const auto& u : target.utterances) {
      const std::string& id = u.record.speaker.speaker_id;
      const int index = std::stoi(id.substr(id.size() - 3));
      if (index < 10) {
        for (const auto& m : u.mels) train.push_back({m, u.record.speaker.label});
      } else {
        test.push_back(&u);
      }
    }
    CnnConfig base_cfg = cfg.cnn;
    base_cfg.epochs = 10;
    CnnConfig tgt_cfg = cfg.cnn;
    tgt_cfg.epochs = 20;
    tgt_cfg.finetune_epochs = 20;
    const PdCnn base_model = train_cnn(base_data, base_cfg, derive_seed(sd, "base")).model;
    const HeldOut scratch = score_speakers(train_cnn(train, tgt_cfg, derive_seed(sd, "scratch")).model, test);
    const HeldOut tuned = score_speakers(finetune(base_model, train, tgt_cfg, derive_seed(sd, "finetune")).model, test);
    acc_s.push_back(scratch.accuracy);
    acc_f.push_back(tuned.accuracy);
    gap_s.push_back(scratch.gap);
    gap_f.push_back(tuned.gap);
    std::fprintf(stderr, "  transfer seed %d: scratch %.1f%% (gap %.1f), fine-tuned %.1f%% (gap %.1f)\n", sd,
                 scratch.accuracy, scratch.gap, tuned.accuracy, tuned.gap);
  }
  const double ms = median(acc_s), mf = median(acc_f), gs = median(gap_s), gf = median(gap_f);
  return {mf >= ms && gf <= gs,
          fmt("median accuracy fine-tuned %.1f%% vs scratch %.1f%%; median Sen/Spe gap %.1f vs %.1f", mf, ms, gf, gs) +
              " over " + std::to_string(seeds) + " seeds"};
}

// ---- 9 ----

// Runs the CLI with stdout discarded so only the criterion lines are printed.
int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "pdspeech");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  std::fflush(stdout);
  const int saved = ::dup(STDOUT_FILENO);
  const int null = ::open("/dev/null", O_WRONLY);
  ::dup2(null, STDOUT_FILENO);
  ::close(null);
  const int rc = cli_main(static_cast<int>(args.size()), argv.data());
  std::fflush(stdout);
  ::dup2(saved, STDOUT_FILENO);
  ::close(saved);
  return rc;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = t::read_file(e.path());
  }
  return files;
}

Outcome determinism() {
  t::TempDir dir("acceptance_matrix");
  SynthSpec spec = default_synth_spec();
  for (auto& l : spec.languages) l.pd_speakers = l.hc_speakers = 4;
  spec.utterances_per_speaker = 2;
  spec.duration_min_s = 1.0;
  spec.duration_max_s = 1.5;
  PipelineConfig cfg;
  cfg.cnn.epochs = 2;
  cfg.cnn.finetune_epochs = 2;
  cfg.cnn.batch_size = 32;
  cfg.cv.folds = 2;
  {
    std::ofstream(dir.path() / "spec.json") << nlohmann::json(spec).dump(2);
    std::ofstream(dir.path() / "cfg.json") << dump_config(cfg);
  }
  const std::string c = (dir.path() / "cfg.json").string();
  if (run_cli({"--config", c, "--out", (dir.path() / "corpus").string(), "synth", "--spec",
               (dir.path() / "spec.json").string()}) != kExitOk) {
    return {false, "synth failed"};
  }
  const std::string manifest = (dir.path() / "corpus" / "manifest.csv").string();
  for (const char* run : {"run1", "run2"}) {
    if (run_cli({"--config", c, "--seed", "42", "--out", (dir.path() / run).string(), "experiment-matrix",
                 "--corpus-manifest", manifest}) != kExitOk) {
      return {false, std::string(run) + " failed"};
    }
  }
  const auto a = snapshot(dir.path() / "run1"), b = snapshot(dir.path() / "run2");
  std::size_t bytes = 0;
  for (const auto& [k, v] : a) bytes += v.size();
  return {!a.empty() && a == b, std::to_string(a.size()) + " output files (" + std::to_string(bytes) +
                                    " bytes) identical across two seeded runs"};
}

// ---- 10 ----

Outcome cv_hygiene() {
  bool caught = false;
  try {
    check_speaker_disjoint({"es_PD000", "es_HC001", "es_PD002"}, {"es_HC003", "es_PD002"});
  } catch (const SpeakerLeakError&) {
    caught = true;
  }
  PipelineConfig cfg;
  SynthSpec spec = default_synth_spec();
  spec.utterances_per_speaker = 2;
  spec.duration_min_s = 1.0;
  spec.duration_max_s = 1.5;
  const std::vector<PreparedCorpus> corpora = {t::synth_prepared(spec, t::variant(spec.languages[0], "es", 12), 7, cfg)};
  const EvalReport r = run_experiment(corpora, {Protocol::Kind::Individual, "", "es"}, ModelKind::BaselineSvm, cfg, 3);
  std::size_t overlaps = 0;
  std::set<std::string> tested;
  for (const auto& f : r.fold_results) {
    const std::set<std::string> train(f.train_speakers.begin(), f.train_speakers.end());
    for (const auto& s : f.test_speakers) {
      overlaps += train.count(s);
      tested.insert(s);
    }
  }
  return {caught && overlaps == 0 && tested.size() == 24,
          std::string(caught ? "injected overlap raised SpeakerLeakError" : "injected overlap NOT caught") + "; " +
              std::to_string(r.fold_results.size()) + " folds, " + std::to_string(overlaps) +
              " train/test overlaps, each of " + std::to_string(tested.size()) + " speakers tested once"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"shape fidelity", shape_fidelity},
      {"gradient correctness", gradient_correctness},
      {"dsp and metric oracles", dsp_oracles},
      {"feature dimensionality", feature_dimensionality},
      {"segmentation recall and voicing", segmentation_recall},
      {"svm correctness", svm_correctness},
      {"metric formulas", metric_formulas},
      {"desk-scale transfer", transfer_analog},
      {"determinism", determinism},
      {"cv hygiene", cv_hygiene},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %2zu %-33s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(),
                sec);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
