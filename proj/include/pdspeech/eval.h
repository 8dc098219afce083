// include/pdspeech/eval.h

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

#ifndef PDSPEECH_EVAL_H_
#define PDSPEECH_EVAL_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pdspeech/cnn.h"
#include "pdspeech/config.h"
#include "pdspeech/corpus.h"

namespace pdspeech {

// ---- Corpus preparation -------------------------------------------------

struct PreparedUtterance {
  UtteranceRecord record;
  std::vector<MatrixD> mels;     // one log-Mel spectrogram per transition segment
  std::vector<double> baseline;  // 232 functionals; empty when no transitions were found
  std::size_t segments_skipped = 0;
};

struct PreparedCorpus {
  std::string language;
  std::vector<PreparedUtterance> utterances;
  std::size_t segments_skipped = 0;  // boundaries too close to a clip edge
};

PreparedUtterance prepare_utterance(const AudioClip& clip, const PipelineConfig& cfg);

// Loads, segments and featurizes every record, in parallel over utterances.
// Records are grouped by speaker language, languages in sorted order.
std::vector<PreparedCorpus> prepare_corpora(const std::vector<UtteranceRecord>& records,
                                            const PipelineConfig& cfg);

// ---- Folds --------------------------------------------------------------

struct FoldPlan {
  int k = 10;
  std::uint64_t seed = 0;
  std::map<std::string, int> fold_of;  // speaker_id -> fold

  int fold(const std::string& speaker_id) const;
  std::vector<std::string> speakers_in(int f) const;
  bool operator==(const FoldPlan&) const = default;
};

// Stratified, speaker-disjoint k-fold split. Each class is shuffled with the
// seed and dealt round-robin; HC dealing continues where PD stopped so fold
// sizes differ by at most one.
FoldPlan make_folds(const std::vector<SpeakerMeta>& speakers, int k, std::uint64_t seed);

class SpeakerLeakError : public Error {
 public:
  using Error::Error;
};

// Throws SpeakerLeakError naming the first speaker present in both lists.
void check_speaker_disjoint(const std::vector<std::string>& train, const std::vector<std::string>& test);

// ---- Decisions and metrics ---------------------------------------------

struct TaskDecision {
  std::string task;
  Label label = Label::HC;
  double posterior = 0.0;  // P(PD)
};

struct Vote {
  Label label = Label::HC;
  double score = 0.0;  // mean posterior
};

// Majority of task labels; ties go to PD when the mean posterior is >= 0.5.
Vote majority_vote(const std::vector<TaskDecision>& decisions);

struct SpeakerDecision {
  std::string speaker_id;
  Label truth = Label::HC;
  std::vector<TaskDecision> tasks;
  Label label = Label::HC;
  double score = 0.0;
};

struct Confusion {
  long tp = 0, tn = 0, fp = 0, fn = 0;
  long total() const { return tp + tn + fp + fn; }
};

struct Metrics {
  Confusion counts;
  double accuracy = 0.0;     // percent
  double sensitivity = 0.0;  // percent
  double specificity = 0.0;  // percent
  double mcc = 0.0;
};

Metrics confusion_metrics(const Confusion& c);
Metrics confusion_metrics(const std::vector<SpeakerDecision>& decisions);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

struct Roc {
  std::vector<RocPoint> points;  // from (0,0) to (1,1)
  double auc = 0.0;
};

// Scores are P(PD); PD is the positive class.
Roc roc_auc(const std::vector<std::pair<double, Label>>& scores);

// ---- Experiments --------------------------------------------------------

enum class ModelKind { BaselineSvm, Cnn };
std::string to_string(ModelKind k);
ModelKind parse_model_kind(const std::string& s);

struct Protocol {
  enum class Kind { Individual, Transfer };
  Kind kind = Kind::Individual;
  std::string base;    // transfer only
  std::string target;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation across folds
};

struct FoldResult {
  int fold = 0;
  Metrics metrics;
  std::vector<std::string> train_speakers;
  std::vector<std::string> test_speakers;
};

struct EvalReport {
  std::string protocol;  // "individual" or "transfer"
  std::string base_language;
  std::string target_language;
  std::string model;     // "baseline-svm" or "cnn"
  std::uint64_t seed = 0;
  int folds = 0;
  std::vector<FoldResult> fold_results;
  MeanStd accuracy, sensitivity, specificity;
  Metrics pooled;  // over all speaker decisions; MCC is reported from here
  double auc = 0.0;
  std::vector<RocPoint> roc;
  std::vector<SpeakerDecision> decisions;
  std::size_t skipped_speakers = 0;  // no usable utterance in their test fold
};

// Individual: train on k-1 folds of the target corpus, test on the rest.
// Transfer: fine-tune base_model (trained on the full base corpus when not
// given) on k-1 target folds. Folds run in parallel with per-fold seeds.
EvalReport run_experiment(const std::vector<PreparedCorpus>& corpora, const Protocol& protocol, ModelKind kind,
                          const PipelineConfig& cfg, std::uint64_t seed, const PdCnn* base_model = nullptr);

// Trains a CNN on every segment of a corpus; the base for transfer runs.
PdCnn train_full_corpus(const PreparedCorpus& corpus, const PipelineConfig& cfg, std::uint64_t seed,
                        std::vector<EpochLog>* log = nullptr);

const PreparedCorpus& find_corpus(const std::vector<PreparedCorpus>& corpora, const std::string& language);

nlohmann::json report_json(const EvalReport& r);
EvalReport report_from_json(const nlohmann::json& j);

// Individual reports render with Language/Model columns, transfer reports
// with Base lang./Target lang. columns. Rates as "mean (std)" with one
// decimal.
std::string markdown_table(const std::vector<EvalReport>& reports);

void write_roc_csv(const std::filesystem::path& path, const std::vector<RocPoint>& roc);

}  // namespace pdspeech

#endif  // PDSPEECH_EVAL_H_
