#include "convoscore/timeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "convoscore/errors.hpp"

namespace convoscore {

namespace {

std::string span_text(double start, double end) {
  std::ostringstream os;
  os << "[" << start << ", " << end << ")";
  return os.str();
}

}  // namespace

TimeSpan::TimeSpan(double start_s, double end_s) : start(start_s), end(end_s) {
  if (!std::isfinite(start) || !std::isfinite(end))
    throw InputError("TimeSpan: non-finite boundary in " +
                     span_text(start, end));
  if (start < 0.0)
    throw InputError("TimeSpan: negative start in " + span_text(start, end));
  if (!(start < end))
    throw InputError("TimeSpan: start must precede end, got " +
                     span_text(start, end));
}

bool operator==(const TimeSpan& a, const TimeSpan& b) {
  return a.start == b.start && a.end == b.end;
}

Timeline::Timeline(std::vector<TimeSpan> spans) {
  std::sort(spans.begin(), spans.end(), [](const TimeSpan& a, const TimeSpan& b) {
    return a.start != b.start ? a.start < b.start : a.end < b.end;
  });
  for (const TimeSpan& s : spans) {
    if (!spans_.empty() && s.start <= spans_.back().end) {
      spans_.back().end = std::max(spans_.back().end, s.end);
    } else {
      spans_.push_back(s);
    }
  }
}

double Timeline::total_duration() const {
  double total = 0.0;
  for (const TimeSpan& s : spans_) total += s.duration();
  return total;
}

bool Timeline::contains(double t) const {
  auto it = std::upper_bound(
      spans_.begin(), spans_.end(), t,
      [](double v, const TimeSpan& s) { return v < s.start; });
  return it != spans_.begin() && t < std::prev(it)->end;
}

std::optional<TimeSpan> Timeline::extent() const {
  if (spans_.empty()) return std::nullopt;
  return TimeSpan(spans_.front().start, spans_.back().end);
}

bool operator==(const Timeline& a, const Timeline& b) {
  return a.spans() == b.spans();
}

Timeline timeline_union(const Timeline& a, const Timeline& b) {
  std::vector<TimeSpan> all = a.spans();
  all.insert(all.end(), b.spans().begin(), b.spans().end());
  return Timeline(std::move(all));
}

Timeline timeline_intersect(const Timeline& a, const Timeline& b) {
  std::vector<TimeSpan> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const TimeSpan& x = a.spans()[i];
    const TimeSpan& y = b.spans()[j];
    double lo = std::max(x.start, y.start);
    double hi = std::min(x.end, y.end);
    if (lo < hi) out.emplace_back(lo, hi);
    if (x.end < y.end) {
      ++i;
    } else {
      ++j;
    }
  }
  return Timeline(std::move(out));
}

Timeline timeline_subtract(const Timeline& a, const Timeline& b) {
  std::vector<TimeSpan> out;
  std::size_t j = 0;
  for (const TimeSpan& x : a.spans()) {
    double cursor = x.start;
    while (j < b.size() && b.spans()[j].end <= cursor) ++j;
    std::size_t k = j;
    while (k < b.size() && b.spans()[k].start < x.end) {
      const TimeSpan& y = b.spans()[k];
      if (y.start > cursor) out.emplace_back(cursor, y.start);
      cursor = std::max(cursor, y.end);
      if (cursor >= x.end) break;
      ++k;
    }
    if (cursor < x.end) out.emplace_back(cursor, x.end);
  }
  return Timeline(std::move(out));
}

const char* to_string(EmotionLabel label) {
  switch (label) {
    case EmotionLabel::kHappy: return "happy";
    case EmotionLabel::kSad: return "sad";
    case EmotionLabel::kAngry: return "angry";
    case EmotionLabel::kNeutral: return "neutral";
    case EmotionLabel::kOther: return "other";
    case EmotionLabel::kNma: return "NMA";
  }
  return "?";
}

std::optional<EmotionLabel> emotion_from_string(const std::string& name) {
  if (name == "happy") return EmotionLabel::kHappy;
  if (name == "sad") return EmotionLabel::kSad;
  if (name == "angry") return EmotionLabel::kAngry;
  if (name == "neutral") return EmotionLabel::kNeutral;
  if (name == "other") return EmotionLabel::kOther;
  if (name == "NMA") return EmotionLabel::kNma;
  return std::nullopt;
}

RichSegment::RichSegment(TimeSpan span_in, std::string speaker_in,
                         std::optional<EmotionLabel> emotion_in,
                         std::optional<std::string> words_in)
    : span(span_in),
      speaker(std::move(speaker_in)),
      emotion(emotion_in),
      words(std::move(words_in)) {
  if (speaker.empty()) throw InputError("RichSegment: empty speaker label");
}

Annotation::Annotation(std::string recording_id,
                       std::vector<RichSegment> segments)
    : recording_id_(std::move(recording_id)), segments_(std::move(segments)) {
  std::sort(segments_.begin(), segments_.end(),
            [](const RichSegment& a, const RichSegment& b) {
              if (a.span.start != b.span.start) return a.span.start < b.span.start;
              if (a.span.end != b.span.end) return a.span.end < b.span.end;
              return a.speaker < b.speaker;
            });
  // Same-speaker segments must not overlap (touching is fine).
  std::map<std::string, double> last_end;
  for (const RichSegment& seg : segments_) {
    auto [it, inserted] = last_end.try_emplace(seg.speaker, seg.span.end);
    if (!inserted) {
      if (seg.span.start < it->second)
        throw InputError("Annotation " + recording_id_ + ": speaker " +
                         seg.speaker + " has overlapping segments");
      it->second = std::max(it->second, seg.span.end);
    }
  }
}

std::vector<std::string> Annotation::speakers() const {
  std::set<std::string> names;
  for (const RichSegment& seg : segments_) names.insert(seg.speaker);
  return std::vector<std::string>(names.begin(), names.end());
}

Timeline Annotation::speaker_timeline(const std::string& speaker) const {
  std::vector<TimeSpan> spans;
  for (const RichSegment& seg : segments_)
    if (seg.speaker == speaker) spans.push_back(seg.span);
  return Timeline(std::move(spans));
}

Timeline Annotation::speech() const {
  std::vector<TimeSpan> spans;
  spans.reserve(segments_.size());
  for (const RichSegment& seg : segments_) spans.push_back(seg.span);
  return Timeline(std::move(spans));
}

double Annotation::max_end() const {
  double m = 0.0;
  for (const RichSegment& seg : segments_) m = std::max(m, seg.span.end);
  return m;
}

Timeline scoring_mask(const Annotation& reference, double collar,
                      const TimeSpan& extent) {
  if (!(collar >= 0.0) || !std::isfinite(collar))
    throw InputError("scoring_mask: collar must be non-negative");
  for (const RichSegment& seg : reference.segments()) {
    if (seg.span.start < extent.start || seg.span.end > extent.end)
      throw InputError("scoring_mask: extent does not cover segment of " +
                       seg.speaker);
  }
  Timeline full(std::vector<TimeSpan>{extent});
  if (collar == 0.0) return full;
  std::vector<TimeSpan> zones;
  for (const RichSegment& seg : reference.segments()) {
    for (double b : {seg.span.start, seg.span.end}) {
      double lo = std::max(0.0, b - collar);
      double hi = b + collar;
      if (lo < hi) zones.emplace_back(lo, hi);
    }
  }
  return timeline_subtract(full, Timeline(std::move(zones)));
}

}  // namespace convoscore
