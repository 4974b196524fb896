#include "convoscore/vad.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "convoscore/errors.hpp"

namespace convoscore {

namespace {
constexpr double kTimeEps = 1e-9;
}

FramePosteriorTrack::FramePosteriorTrack(TimeSpan span, double period,
                                         std::vector<double> probs_in)
    : window_span(span), frame_period(period), probs(std::move(probs_in)) {
  if (!(frame_period > 0.0) || !std::isfinite(frame_period))
    throw InputError("FramePosteriorTrack: frame_period must be positive");
  if (probs.empty())
    throw InputError("FramePosteriorTrack: no frames");
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!std::isfinite(probs[i]) || probs[i] < 0.0 || probs[i] > 1.0)
      throw InputError("FramePosteriorTrack: probability out of [0,1] at frame " +
                       std::to_string(i));
  }
  double covered = static_cast<double>(probs.size()) * frame_period;
  if (std::abs(covered - window_span.duration()) > frame_period + kTimeEps)
    throw InputError(
        "FramePosteriorTrack: frame count does not match window span");
}

std::vector<bool> threshold_posteriors(const FramePosteriorTrack& track,
                                       double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw InputError("threshold_posteriors: threshold must be in (0,1)");
  std::vector<bool> labels(track.probs.size());
  for (std::size_t i = 0; i < track.probs.size(); ++i) {
    if (!std::isfinite(track.probs[i]))
      throw InputError("threshold_posteriors: non-finite probability at frame " +
                       std::to_string(i));
    labels[i] = track.probs[i] >= threshold;
  }
  return labels;
}

std::vector<WindowedDecision> window_decisions(
    const std::vector<FramePosteriorTrack>& tracks, double window_length,
    double hop, double threshold) {
  std::vector<WindowedDecision> out;
  if (tracks.empty()) return out;
  if (!(hop > 0.0) || !(window_length > hop))
    throw InputError("window_decisions: need window_length > hop > 0");

  for (std::size_t i = 0; i + 1 < tracks.size(); ++i) {
    double delta = tracks[i + 1].window_span.start - tracks[i].window_span.start;
    if (std::abs(delta - hop) > kTimeEps)
      throw InputError("window_decisions: window " + std::to_string(i + 1) +
                       " does not start one hop after its predecessor");
  }

  const double dialogue_start = tracks.front().window_span.start;
  const double dialogue_end = tracks.back().window_span.end;
  const double lead = (window_length - hop) / 2.0;

  // Kept-span boundaries are built once so the spans tile by construction;
  // the containment check below is the tiling assertion.
  std::vector<double> bounds(tracks.size() + 1);
  bounds.front() = dialogue_start;
  bounds.back() = dialogue_end;
  for (std::size_t i = 1; i < tracks.size(); ++i)
    bounds[i] = tracks[i].window_span.start + lead;

  out.reserve(tracks.size());
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    if (!(bounds[i] < bounds[i + 1]) ||
        bounds[i] < tracks[i].window_span.start - kTimeEps ||
        bounds[i + 1] > tracks[i].window_span.end + kTimeEps)
      throw InternalError("window_decisions: kept spans do not tile the extent");
    out.push_back(WindowedDecision{tracks[i].window_span,
                                   TimeSpan(bounds[i], bounds[i + 1]),
                                   threshold_posteriors(tracks[i], threshold)});
  }
  return out;
}

Timeline merge_windows(const std::vector<FramePosteriorTrack>& tracks,
                       double window_length, double hop, double threshold) {
  std::vector<WindowedDecision> decisions =
      window_decisions(tracks, window_length, hop, threshold);
  std::vector<TimeSpan> spans;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    const WindowedDecision& d = decisions[i];
    const double s = d.window_span.start;
    const double fp = tracks[i].frame_period;
    std::size_t j = 0;
    while (j < d.frame_labels.size()) {
      if (!d.frame_labels[j]) {
        ++j;
        continue;
      }
      std::size_t k = j;
      while (k < d.frame_labels.size() && d.frame_labels[k]) ++k;
      double lo = std::max(s + static_cast<double>(j) * fp, d.kept_span.start);
      double hi = std::min(s + static_cast<double>(k) * fp, d.kept_span.end);
      if (lo < hi) spans.emplace_back(lo, hi);
      j = k;
    }
  }
  return Timeline(std::move(spans));
}

namespace {

std::vector<TimeSpan> fill_gaps(std::vector<TimeSpan> spans, double min_dur) {
  std::vector<TimeSpan> out;
  for (const TimeSpan& s : spans) {
    if (!out.empty() && s.start - out.back().end < min_dur) {
      out.back().end = s.end;
    } else {
      out.push_back(s);
    }
  }
  return out;
}

std::vector<TimeSpan> drop_islands(std::vector<TimeSpan> spans, double min_dur) {
  std::vector<TimeSpan> out;
  for (const TimeSpan& s : spans)
    if (!(s.duration() < min_dur)) out.push_back(s);
  return out;
}

}  // namespace

Timeline postprocess(const Timeline& speech, double min_duration,
                     GapPolicy policy) {
  if (!(min_duration >= 0.0))
    throw InputError("postprocess: min_duration must be non-negative");
  std::vector<TimeSpan> spans = speech.spans();
  if (policy == GapPolicy::kFillGapsFirst) {
    spans = drop_islands(fill_gaps(std::move(spans), min_duration), min_duration);
  } else {
    spans = fill_gaps(drop_islands(std::move(spans), min_duration), min_duration);
  }
  return Timeline(std::move(spans));
}

}  // namespace convoscore
