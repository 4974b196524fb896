#ifndef CONVOSCORE_TIMELINE_HPP
#define CONVOSCORE_TIMELINE_HPP

#include <optional>
#include <string>
#include <vector>

namespace convoscore {

// Half-open time interval [start, end) in seconds. Zero-length spans are
// rejected at construction: they carry no scoreable duration.
struct TimeSpan {
  TimeSpan(double start, double end);

  double duration() const { return end - start; }
  bool contains(double t) const { return start <= t && t < end; }

  double start;
  double end;
};

bool operator==(const TimeSpan& a, const TimeSpan& b);

// Ordered list of pairwise-disjoint, non-touching spans. Construction
// normalizes arbitrary input: spans are sorted and overlapping or touching
// spans are merged.
class Timeline {
 public:
  Timeline() = default;
  explicit Timeline(std::vector<TimeSpan> spans);

  const std::vector<TimeSpan>& spans() const { return spans_; }
  bool empty() const { return spans_.empty(); }
  std::size_t size() const { return spans_.size(); }
  double total_duration() const;
  bool contains(double t) const;
  // Smallest single span covering the whole timeline; nullopt when empty.
  std::optional<TimeSpan> extent() const;

 private:
  std::vector<TimeSpan> spans_;
};

bool operator==(const Timeline& a, const Timeline& b);

Timeline timeline_union(const Timeline& a, const Timeline& b);
Timeline timeline_intersect(const Timeline& a, const Timeline& b);
Timeline timeline_subtract(const Timeline& a, const Timeline& b);

// The closed six-way emotion label set.
enum class EmotionLabel { kHappy, kSad, kAngry, kNeutral, kOther, kNma };

inline constexpr int kNumEmotions = 6;

const char* to_string(EmotionLabel label);
std::optional<EmotionLabel> emotion_from_string(const std::string& name);

// One utterance: a span carrying a speaker label and, when the producing
// system supplies them, an emotion label and a transcript.
struct RichSegment {
  RichSegment(TimeSpan span, std::string speaker,
              std::optional<EmotionLabel> emotion = std::nullopt,
              std::optional<std::string> words = std::nullopt);

  TimeSpan span;
  std::string speaker;
  std::optional<EmotionLabel> emotion;
  std::optional<std::string> words;
};

// All segments of one recording, sorted by start time. Segments of the same
// speaker must be pairwise disjoint; different speakers may overlap.
class Annotation {
 public:
  explicit Annotation(std::string recording_id,
                      std::vector<RichSegment> segments = {});

  const std::string& recording_id() const { return recording_id_; }
  const std::vector<RichSegment>& segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }

  // Distinct speaker labels, sorted.
  std::vector<std::string> speakers() const;
  Timeline speaker_timeline(const std::string& speaker) const;
  // Union of all segment spans regardless of speaker.
  Timeline speech() const;
  double max_end() const;  // 0 when empty

 private:
  std::string recording_id_;
  std::vector<RichSegment> segments_;
};

// The portion of `extent` that survives after removing a forgiveness collar
// (boundary - collar, boundary + collar) around every reference segment
// boundary. Duration metrics are evaluated only inside this mask. A collar of
// 0 returns the full extent.
Timeline scoring_mask(const Annotation& reference, double collar,
                      const TimeSpan& extent);

}  // namespace convoscore

#endif
