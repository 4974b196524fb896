#ifndef CONVOSCORE_METRICS_HPP
#define CONVOSCORE_METRICS_HPP

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "convoscore/timeline.hpp"

namespace convoscore {

// Duration bookkeeping shared by DER, TEER and sTEER. `confusion` holds
// whichever confusion flavour the producing metric defines.
struct MetricReport {
  double missed = 0.0;
  double false_alarm = 0.0;
  double confusion = 0.0;
  double total = 0.0;

  double rate() const { return (missed + false_alarm + confusion) / total; }
};

// How instants with several concurrent reference speakers are counted.
// kMulti scores each concurrent speaker separately; kSingle collapses both
// sides to at most one stream per instant.
enum class OverlapMode { kMulti, kSingle };

// What the false-alarm rate is normalized by.
enum class FarDenominator { kSpeech, kNonspeech };

struct VadScore {
  double missed = 0.0;        // reference speech the hypothesis misses
  double false_alarm = 0.0;   // hypothesis speech outside the reference
  double ref_speech = 0.0;
  double ref_nonspeech = 0.0;
  double far = 0.0;
  double msr = 0.0;
};

// Speech/non-speech agreement over `extent`. MSR divides missed speech by
// the reference speech duration. FAR divides false-alarm duration by the
// reference speech duration as well; pass kNonspeech for the conventional
// non-speech denominator.
VadScore far_msr(const Timeline& ref_speech, const Timeline& hyp_speech,
                 const TimeSpan& extent,
                 FarDenominator denominator = FarDenominator::kSpeech);

// Partial bijection from reference speaker labels to hypothesis speaker
// labels. Only pairs with positive overlap are kept.
struct SpeakerMapping {
  std::map<std::string, std::string> ref_to_hyp;
  double total_overlap = 0.0;
};

// The label pairing that maximizes total reference/hypothesis overlap
// duration, found by optimal assignment on the pairwise overlap matrix.
SpeakerMapping optimal_mapping(const Annotation& ref, const Annotation& hyp);
// Same, but overlaps are measured only inside `mask`.
SpeakerMapping optimal_mapping(const Annotation& ref, const Annotation& hyp,
                               const Timeline& mask);

// Diarisation error rate. Inside the scoring mask, each instant compares the
// concurrent reference speakers against the optimally mapped hypothesis
// speakers; confusion is matched speaker-time attributed to the wrong
// identity.
MetricReport der(const Annotation& ref, const Annotation& hyp, double collar,
                 OverlapMode overlap = OverlapMode::kMulti);

// Time-weighted emotion error rate. Confusion is the masked duration where
// both sides say speech but no hypothesis stream carries the reference
// emotion (counted with multiplicity under kMulti: concurrent emotions match
// as multisets, independent of speaker attribution). Every reference segment
// must carry an emotion; hypothesis segments without one never match.
MetricReport teer(const Annotation& ref, const Annotation& hyp, double collar,
                  OverlapMode overlap = OverlapMode::kMulti);

// Speaker-attributed TEER. Confusion is the masked duration where, under the
// same optimal speaker mapping DER uses, either the mapped speaker or its
// emotion is wrong.
MetricReport steer(const Annotation& ref, const Annotation& hyp, double collar,
                   OverlapMode overlap = OverlapMode::kMulti);

struct WerReport {
  std::int64_t substitutions = 0;
  std::int64_t deletions = 0;
  std::int64_t insertions = 0;
  std::int64_t ref_words = 0;

  std::int64_t edits() const { return substitutions + deletions + insertions; }
  double rate() const { return static_cast<double>(edits()) / ref_words; }
};

// Lowercases, strips punctuation except apostrophes, collapses whitespace,
// and splits into words.
std::vector<std::string> normalize_words(const std::string& text);

// Minimal-edit-distance alignment with unit costs.
WerReport wer(const std::vector<std::string>& ref_words,
              const std::vector<std::string>& hyp_words);

// Each speaker's words concatenated in segment start order, already
// normalized. Segments without a transcript contribute nothing.
std::map<std::string, std::vector<std::string>> words_by_speaker(
    const Annotation& annotation);

// Concatenated minimum-permutation WER: the total edit distance minimized
// over speaker bijections (sides padded with empty streams), divided by the
// total reference word count.
WerReport cpwer(
    const std::map<std::string, std::vector<std::string>>& ref_by_speaker,
    const std::map<std::string, std::vector<std::string>>& hyp_by_speaker);

// One labelled utterance for classification scoring; `id` must identify the
// utterance uniquely within its list.
struct LabelledUtterance {
  std::string id;
  EmotionLabel label;
};

struct EmotionEval {
  // Rows are reference labels, columns hypothesis labels.
  std::array<std::array<std::int64_t, kNumEmotions>, kNumEmotions> confusion{};
  std::array<std::array<double, kNumEmotions>, kNumEmotions>
      confusion_normalized{};
  std::int64_t total = 0;
  std::int64_t correct = 0;
  double accuracy = 0.0;
  // Accuracy over references labelled happy, sad, angry or neutral; 0 when
  // no reference falls in those classes.
  double accuracy_4way = 0.0;
};

// Utterance-level classification accuracy plus the 6-way confusion matrix.
// The two lists must carry exactly the same id set.
EmotionEval emotion_accuracy(const std::vector<LabelledUtterance>& ref_utts,
                             const std::vector<LabelledUtterance>& hyp_utts);

// Flattens an annotation into labelled utterances with ids built from the
// recording id and microsecond-rounded segment times. Throws when a segment
// lacks an emotion label.
std::vector<LabelledUtterance> emotion_utterances(const Annotation& annotation);

}  // namespace convoscore

#endif  // CONVOSCORE_METRICS_HPP
