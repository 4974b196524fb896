#ifndef CONVOSCORE_VAD_HPP
#define CONVOSCORE_VAD_HPP

#include <vector>

#include "convoscore/timeline.hpp"

namespace convoscore {

// Frame-level speech posteriors covering one sliding window of a dialogue.
// Frame i covers [window_span.start + i*frame_period, ... + (i+1)*frame_period).
struct FramePosteriorTrack {
  FramePosteriorTrack(TimeSpan window_span, double frame_period,
                      std::vector<double> probs);

  TimeSpan window_span;
  double frame_period;
  std::vector<double> probs;
};

// label[i] = speech iff probs[i] >= threshold. A probability exactly equal to
// the threshold counts as speech.
std::vector<bool> threshold_posteriors(const FramePosteriorTrack& track,
                                       double threshold);

// Per-window merge outcome: which part of the window survives into the
// dialogue-level decision.
struct WindowedDecision {
  TimeSpan window_span;
  TimeSpan kept_span;
  std::vector<bool> frame_labels;
};

// Plans the kept span of every window. Interior windows keep their middle
// hop-length portion; the first window additionally keeps its leading context
// and the last window its trailing remainder, so the kept spans tile the
// dialogue extent exactly. A single window keeps everything.
std::vector<WindowedDecision> window_decisions(
    const std::vector<FramePosteriorTrack>& tracks, double window_length,
    double hop, double threshold);

// Assembles the speech timeline of a dialogue from overlapping windowed
// posterior tracks.
Timeline merge_windows(const std::vector<FramePosteriorTrack>& tracks,
                       double window_length = 3.0, double hop = 1.0,
                       double threshold = 0.5);

enum class GapPolicy { kFillGapsFirst, kDropIslandsFirst };

// Removes speech/non-speech regions strictly shorter than min_duration.
// Under kFillGapsFirst, internal non-speech gaps are filled before short
// speech islands are deleted; kDropIslandsFirst reverses the two passes.
Timeline postprocess(const Timeline& speech, double min_duration = 0.25,
                     GapPolicy policy = GapPolicy::kFillGapsFirst);

}  // namespace convoscore

#endif
