#ifndef CONVOSCORE_SIMULATE_HPP
#define CONVOSCORE_SIMULATE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "convoscore/clustering.hpp"
#include "convoscore/timeline.hpp"
#include "convoscore/vad.hpp"

namespace convoscore {

// Recipe for one synthetic dialogue. All boundaries land on the 20 ms frame
// grid and on whole microseconds, so ideal posteriors reconstruct the speech
// timeline exactly and fixtures serialize losslessly.
struct SynthSpec {
  std::string recording_id = "synth";
  int num_speakers = 2;
  double dialogue_length = 60.0;
  double mean_utterance = 2.0;
  double min_utterance = 0.6;
  double mean_gap = 0.5;
  double overlap_prob = 0.0;   // chance a turn starts before the previous ends
  double max_overlap = 0.5;    // seconds
  double jitter_sigma = 0.0;   // boundary noise, clamped to 2 sigma
  double emotion_confusion_prob = 0.0;
  double speaker_swap_prob = 0.0;
  double word_sub_prob = 0.0;
  double word_ins_prob = 0.0;
  double word_del_prob = 0.0;
  double posterior_flip_prob = 0.0;
  int embedding_dim = 16;
  double embedding_noise = 0.05;
  std::uint64_t seed = 0;
};

// Exact error durations planted into the hypothesis, tracked during
// corruption. `exact` is true when the construction guarantees the scoring
// code must reproduce these numbers at collar 0 (requires overlap_prob 0);
// otherwise the fields are best-effort.
struct InjectedErrors {
  bool exact = false;
  double missed = 0.0;
  double false_alarm = 0.0;
  double conf_der = 0.0;
  double conf_teer = 0.0;
  double conf_steer = 0.0;
  double total = 0.0;
};

struct SynthResult {
  Annotation reference;
  Annotation hypothesis;
  std::vector<FramePosteriorTrack> posteriors;
  std::vector<EmbeddingWindow> embeddings;
  // Dominant reference speaker of each embedding window.
  std::vector<std::string> embedding_speakers;
  InjectedErrors injected;

  SynthResult(Annotation ref, Annotation hyp)
      : reference(std::move(ref)), hypothesis(std::move(hyp)) {}
};

// Builds a reference dialogue, a corrupted hypothesis, ideal frame
// posteriors over 3 s / 1 s sliding windows, and planted per-speaker
// embedding clusters. Bit-deterministic for a fixed spec.
SynthResult generate(const SynthSpec& spec);

}  // namespace convoscore

#endif  // CONVOSCORE_SIMULATE_HPP
