#include "convoscore/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "convoscore/errors.hpp"
#include "convoscore/io.hpp"
#include "convoscore/rng.hpp"

namespace convoscore {

namespace {

constexpr double kFrame = 0.02;

// Nearest 20 ms frame boundary, normalized to whole microseconds.
double snap(double seconds) {
  return round_us(std::round(seconds / kFrame) * kFrame);
}

const char* const kVocab[] = {"the", "a",    "and",  "to",  "of",
                              "in",  "it",   "is",   "was", "for",
                              "on",  "that", "with", "you", "they",
                              "we",  "not",  "but",  "so",  "well"};
constexpr int kVocabSize = 20;

int vocab_index(const std::string& word) {
  for (int i = 0; i < kVocabSize; ++i)
    if (word == kVocab[i]) return i;
  return 0;
}

std::string speaker_letter(int index) {
  return std::string(1, static_cast<char>('A' + index));
}

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (const std::string& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

double exp_sample(SplitMix64& rng) {
  return -std::log(1.0 - rng.next_double());
}

struct Draft {
  double ref_start = 0.0, ref_end = 0.0;
  int ref_speaker = 0;
  int emotion = 0;
  std::vector<std::string> words;

  bool dropped = false;
  double hyp_start = 0.0, hyp_end = 0.0;
  int hyp_speaker = 0;
  bool swapped = false;
  int hyp_emotion = 0;
  bool emotion_changed = false;
  std::vector<std::string> hyp_words;
};

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0))
    throw InputError(std::string(name) + " must be in [0, 1]");
}

void validate(const SynthSpec& spec) {
  if (spec.recording_id.empty() ||
      spec.recording_id.find_first_of(" \t\r\n") != std::string::npos)
    throw InputError("recording_id must be non-empty without whitespace");
  if (spec.num_speakers < 1 || spec.num_speakers > 8)
    throw InputError("num_speakers must be between 1 and 8");
  if (spec.min_utterance < 0.26)
    throw InputError("min_utterance must be at least 0.26 s so voice-activity "
                     "post-processing keeps every utterance");
  if (spec.mean_utterance < spec.min_utterance)
    throw InputError("mean_utterance must be at least min_utterance");
  if (spec.dialogue_length < spec.min_utterance + 0.6)
    throw InputError("dialogue_length too short for a single utterance");
  if (spec.mean_gap < 0.0) throw InputError("mean_gap must be non-negative");
  if (spec.max_overlap < 0.0)
    throw InputError("max_overlap must be non-negative");
  if (spec.jitter_sigma < 0.0)
    throw InputError("jitter_sigma must be non-negative");
  if (spec.embedding_noise < 0.0)
    throw InputError("embedding_noise must be non-negative");
  if (spec.embedding_dim < spec.num_speakers || spec.embedding_dim < 1)
    throw InputError("embedding_dim must be at least num_speakers");
  check_probability(spec.overlap_prob, "overlap_prob");
  check_probability(spec.emotion_confusion_prob, "emotion_confusion_prob");
  check_probability(spec.speaker_swap_prob, "speaker_swap_prob");
  check_probability(spec.word_sub_prob, "word_sub_prob");
  check_probability(spec.word_ins_prob, "word_ins_prob");
  check_probability(spec.word_del_prob, "word_del_prob");
  check_probability(spec.posterior_flip_prob, "posterior_flip_prob");
}

std::vector<Draft> build_reference(const SynthSpec& spec, SplitMix64& rng) {
  const double min_len = std::max(snap(spec.min_utterance), 0.26);
  const double limit = spec.dialogue_length - kFrame;

  std::vector<Draft> drafts;
  std::vector<double> last_end(spec.num_speakers, 0.0);
  double frontier = 0.0, frontier_start = 0.0;
  int frontier_speaker = -1;
  int prev_speaker = -1;

  auto sample_gap = [&] {
    return std::max(snap(spec.mean_gap * exp_sample(rng)), 0.28);
  };
  auto sample_len = [&] {
    double raw = spec.min_utterance +
                 (spec.mean_utterance - spec.min_utterance) * exp_sample(rng);
    raw = std::min(raw, spec.mean_utterance * 3.0);
    return std::max(snap(raw), min_len);
  };
  auto pick_speaker = [&] {
    if (spec.num_speakers == 1) return 0;
    if (prev_speaker < 0)
      return static_cast<int>(rng.next_below(spec.num_speakers));
    int idx = static_cast<int>(rng.next_below(spec.num_speakers - 1));
    if (idx >= prev_speaker) ++idx;
    return idx;
  };

  while (true) {
    const int speaker = pick_speaker();
    const double len = sample_len();

    double start = -1.0;
    if (!drafts.empty() && spec.num_speakers >= 2 && spec.overlap_prob > 0.0 &&
        rng.next_double() < spec.overlap_prob && speaker != frontier_speaker) {
      double upper = std::min({spec.max_overlap,
                               frontier - frontier_start - kFrame,
                               len - kFrame, frontier - last_end[speaker]});
      const auto steps =
          static_cast<long long>(std::floor(upper / kFrame + 1e-9));
      if (steps >= 1) {
        double o = round_us(
            kFrame * static_cast<double>(
                         1 + static_cast<long long>(rng.next_below(
                                 static_cast<std::uint64_t>(steps)))));
        start = round_us(frontier - o);
      }
    }
    if (start < 0.0) start = round_us(frontier + sample_gap());

    if (start + len > limit) {
      if (!drafts.empty()) break;
      start = 0.28;  // a dialogue always holds at least one minimal utterance
    }
    const double use_len = drafts.empty() && start + len > limit ? min_len : len;

    Draft d;
    d.ref_start = start;
    d.ref_end = round_us(start + use_len);
    d.ref_speaker = speaker;
    d.emotion = static_cast<int>(rng.next_below(6));
    const auto word_count =
        std::max<long long>(1, std::llround(use_len / 0.4));
    for (long long w = 0; w < word_count; ++w)
      d.words.push_back(kVocab[rng.next_below(kVocabSize)]);
    drafts.push_back(std::move(d));

    last_end[speaker] = drafts.back().ref_end;
    frontier = drafts.back().ref_end;
    frontier_start = drafts.back().ref_start;
    frontier_speaker = speaker;
    prev_speaker = speaker;
  }
  return drafts;
}

void corrupt(const SynthSpec& spec, SplitMix64& rng, std::vector<Draft>& drafts,
             bool* any_fallback) {
  const double sigma = spec.jitter_sigma;
  const std::size_t n = drafts.size();

  for (std::size_t i = 0; i < n; ++i) {
    Draft& d = drafts[i];
    const double len = d.ref_end - d.ref_start;
    const double gap_prev =
        d.ref_start - (i > 0 ? drafts[i - 1].ref_end : 0.0);
    const double gap_next =
        i + 1 < n ? drafts[i + 1].ref_start - d.ref_end : 1e9;

    d.hyp_start = d.ref_start;
    d.hyp_end = d.ref_end;
    if (sigma > 0.0) {
      double bound_start = std::min(2.0 * sigma, 0.4 * len);
      if (gap_prev > 0.0) bound_start = std::min(bound_start, 0.45 * gap_prev);
      double bound_end = std::min(2.0 * sigma, 0.4 * len);
      if (gap_next > 0.0) bound_end = std::min(bound_end, 0.45 * gap_next);
      const double ds =
          std::clamp(rng.normal() * sigma, -bound_start, bound_start);
      const double de = std::clamp(rng.normal() * sigma, -bound_end, bound_end);
      d.hyp_start = round_us(std::max(0.0, d.ref_start + ds));
      d.hyp_end = round_us(d.ref_end + de);
    }

    d.hyp_speaker = d.ref_speaker;
    if (spec.num_speakers >= 2 &&
        rng.next_double() < spec.speaker_swap_prob) {
      int other = static_cast<int>(rng.next_below(spec.num_speakers - 1));
      if (other >= d.ref_speaker) ++other;
      d.hyp_speaker = other;
      d.swapped = true;
    }

    d.hyp_emotion = d.emotion;
    if (rng.next_double() < spec.emotion_confusion_prob) {
      d.hyp_emotion =
          (d.emotion + 1 + static_cast<int>(rng.next_below(5))) % 6;
      d.emotion_changed = true;
    }

    d.hyp_words.clear();
    for (const std::string& word : d.words) {
      if (rng.next_double() < spec.word_del_prob) {
        // dropped
      } else if (rng.next_double() < spec.word_sub_prob) {
        int idx = (vocab_index(word) + 1 +
                   static_cast<int>(rng.next_below(kVocabSize - 1))) %
                  kVocabSize;
        d.hyp_words.push_back(kVocab[idx]);
      } else {
        d.hyp_words.push_back(word);
      }
      if (rng.next_double() < spec.word_ins_prob)
        d.hyp_words.push_back(kVocab[rng.next_below(kVocabSize)]);
    }
  }

  // Enforce per-stream disjointness. A clash can only arise when reference
  // turns overlap; resolve by clamping, reverting the swap, or dropping.
  std::vector<double> hyp_last_end(spec.num_speakers, -1.0);
  for (Draft& d : drafts) {
    int s = d.hyp_speaker;
    if (d.hyp_start < hyp_last_end[s]) {
      *any_fallback = true;
      if (hyp_last_end[s] + 1e-6 < d.hyp_end) {
        d.hyp_start = hyp_last_end[s];
      } else if (d.swapped) {
        d.hyp_speaker = s = d.ref_speaker;
        d.swapped = false;
        if (d.hyp_start < hyp_last_end[s]) {
          if (hyp_last_end[s] + 1e-6 < d.hyp_end)
            d.hyp_start = hyp_last_end[s];
          else
            d.dropped = true;
        }
      } else {
        d.dropped = true;
      }
    }
    if (!d.dropped) hyp_last_end[s] = std::max(hyp_last_end[s], d.hyp_end);
  }
}

// The planted speaker pairing must stay the unique best assignment, or the
// injected confusion durations would not match what scoring attributes.
// Reverts swaps (newest first) until the identity pairing strictly beats
// every alternative that moves a speaking reference stream.
void enforce_identity_mapping(const SynthSpec& spec,
                              std::vector<Draft>& drafts) {
  const int n = spec.num_speakers;
  std::vector<char> ref_present(n, 0);
  for (const Draft& d : drafts) ref_present[d.ref_speaker] = 1;

  auto identity_dominates = [&] {
    std::vector<std::vector<double>> overlap(n, std::vector<double>(n, 0.0));
    for (const Draft& a : drafts) {
      for (const Draft& b : drafts) {
        if (b.dropped) continue;
        const double lo = std::max(a.ref_start, b.hyp_start);
        const double hi = std::min(a.ref_end, b.hyp_end);
        if (hi > lo) overlap[a.ref_speaker][b.hyp_speaker] += hi - lo;
      }
    }
    double v_id = 0.0;
    for (int r = 0; r < n; ++r) v_id += overlap[r][r];

    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    while (std::next_permutation(p.begin(), p.end())) {
      bool moves_speaking_stream = false;
      for (int r = 0; r < n; ++r)
        if (p[r] != r && ref_present[r]) moves_speaking_stream = true;
      if (!moves_speaking_stream) continue;
      double v = 0.0;
      for (int r = 0; r < n; ++r) v += overlap[r][p[r]];
      if (v >= v_id - 1e-9) return false;
    }
    return true;
  };

  while (!identity_dominates()) {
    auto it = std::find_if(drafts.rbegin(), drafts.rend(),
                           [](const Draft& d) { return d.swapped; });
    if (it == drafts.rend()) break;
    it->hyp_speaker = it->ref_speaker;
    it->swapped = false;
  }
}

}  // namespace

SynthResult generate(const SynthSpec& spec) {
  validate(spec);
  SplitMix64 rng(spec.seed);

  std::vector<Draft> drafts = build_reference(spec, rng);
  bool any_fallback = false;
  corrupt(spec, rng, drafts, &any_fallback);
  if (spec.overlap_prob == 0.0) enforce_identity_mapping(spec, drafts);

  // Cosmetic global relabeling of hypothesis speakers.
  std::vector<int> label_perm(spec.num_speakers);
  std::iota(label_perm.begin(), label_perm.end(), 0);
  for (int i = spec.num_speakers - 1; i > 0; --i)
    std::swap(label_perm[i],
              label_perm[rng.next_below(static_cast<std::uint64_t>(i) + 1)]);

  std::vector<RichSegment> ref_segs, hyp_segs;
  for (const Draft& d : drafts) {
    ref_segs.emplace_back(TimeSpan(d.ref_start, d.ref_end),
                          speaker_letter(d.ref_speaker),
                          static_cast<EmotionLabel>(d.emotion),
                          join_words(d.words));
    if (!d.dropped)
      hyp_segs.emplace_back(
          TimeSpan(d.hyp_start, d.hyp_end),
          "sys" + std::to_string(label_perm[d.hyp_speaker]),
          static_cast<EmotionLabel>(d.hyp_emotion), join_words(d.hyp_words));
  }

  SynthResult result(Annotation(spec.recording_id, std::move(ref_segs)),
                     Annotation(spec.recording_id, std::move(hyp_segs)));

  InjectedErrors& inj = result.injected;
  inj.exact = spec.overlap_prob == 0.0 && !any_fallback;
  for (const Draft& d : drafts) {
    const double ref_len = d.ref_end - d.ref_start;
    inj.total += ref_len;
    if (d.dropped) {
      inj.missed += ref_len;
      continue;
    }
    inj.missed += std::max(0.0, d.hyp_start - d.ref_start) +
                  std::max(0.0, d.ref_end - d.hyp_end);
    inj.false_alarm += std::max(0.0, d.ref_start - d.hyp_start) +
                       std::max(0.0, d.hyp_end - d.ref_end);
    const double ov = std::min(d.ref_end, d.hyp_end) -
                      std::max(d.ref_start, d.hyp_start);
    if (ov > 0.0) {
      if (d.swapped) inj.conf_der += ov;
      if (d.emotion_changed) inj.conf_teer += ov;
      if (d.swapped || d.emotion_changed) inj.conf_steer += ov;
    }
  }

  const Timeline speech = result.reference.speech();

  const int num_windows = std::max(
      1, static_cast<int>(std::ceil(spec.dialogue_length - 1e-9)) - 2);
  constexpr int kFramesPerWindow = 150;  // 3 s at 20 ms
  for (int k = 0; k < num_windows; ++k) {
    const double start = static_cast<double>(k);
    std::vector<double> probs(kFramesPerWindow);
    for (int f = 0; f < kFramesPerWindow; ++f) {
      const double mid = start + (f + 0.5) * kFrame;
      double p = speech.contains(mid) ? 1.0 : 0.0;
      if (spec.posterior_flip_prob > 0.0 &&
          rng.next_double() < spec.posterior_flip_prob)
        p = 1.0 - p;
      probs[f] = p;
    }
    result.posteriors.emplace_back(TimeSpan(start, start + 3.0), kFrame,
                                   std::move(probs));
  }

  std::vector<Timeline> speaker_timelines;
  speaker_timelines.reserve(spec.num_speakers);
  for (int k = 0; k < spec.num_speakers; ++k)
    speaker_timelines.push_back(
        result.reference.speaker_timeline(speaker_letter(k)));

  for (const TimeSpan& window : make_windows(speech, 1.0, 0.5)) {
    int best = 0;
    double best_overlap = -1.0;
    for (int k = 0; k < spec.num_speakers; ++k) {
      const double ov =
          timeline_intersect(speaker_timelines[k], Timeline({window}))
              .total_duration();
      if (ov > best_overlap + 1e-12) {
        best_overlap = ov;
        best = k;
      }
    }
    std::vector<double> vec(spec.embedding_dim);
    for (int dim = 0; dim < spec.embedding_dim; ++dim)
      vec[dim] =
          (dim == best ? 1.0 : 0.0) + spec.embedding_noise * rng.normal();
    result.embeddings.emplace_back(window, std::move(vec));
    result.embedding_speakers.push_back(speaker_letter(best));
  }

  return result;
}

}  // namespace convoscore
