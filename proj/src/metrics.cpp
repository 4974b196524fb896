#include "convoscore/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "convoscore/assignment.hpp"
#include "convoscore/errors.hpp"

namespace convoscore {

namespace {

// A mask-clipped slice of one segment, with labels resolved to dense indices.
// emotion is -1 when the segment carries none.
struct Piece {
  double start;
  double end;
  int speaker;
  int emotion;
};

enum class ConfMode { kSpeaker, kEmotion, kSpeakerEmotion };

std::map<std::string, int> index_speakers(const Annotation& a) {
  std::map<std::string, int> index;
  for (const std::string& name : a.speakers())
    index.emplace(name, static_cast<int>(index.size()));
  return index;
}

std::vector<Piece> clip_to_mask(const Annotation& a, const Timeline& mask,
                                const std::map<std::string, int>& speaker_index) {
  std::vector<Piece> pieces;
  const std::vector<TimeSpan>& spans = mask.spans();
  std::size_t cursor = 0;
  for (const RichSegment& seg : a.segments()) {
    while (cursor < spans.size() && spans[cursor].end <= seg.span.start)
      ++cursor;
    for (std::size_t j = cursor;
         j < spans.size() && spans[j].start < seg.span.end; ++j) {
      double lo = std::max(seg.span.start, spans[j].start);
      double hi = std::min(seg.span.end, spans[j].end);
      if (hi > lo)
        pieces.push_back({lo, hi, speaker_index.at(seg.speaker),
                          seg.emotion ? static_cast<int>(*seg.emotion) : -1});
    }
  }
  return pieces;
}

double overlap_duration(const std::vector<std::pair<double, double>>& a,
                        const std::vector<std::pair<double, double>>& b) {
  double total = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    double lo = std::max(a[i].first, b[j].first);
    double hi = std::min(a[i].second, b[j].second);
    if (hi > lo) total += hi - lo;
    if (a[i].second < b[j].second)
      ++i;
    else
      ++j;
  }
  return total;
}

std::vector<std::vector<double>> overlap_matrix(
    const std::vector<Piece>& ref_pieces, int num_ref,
    const std::vector<Piece>& hyp_pieces, int num_hyp) {
  std::vector<std::vector<std::pair<double, double>>> ref_by(num_ref);
  std::vector<std::vector<std::pair<double, double>>> hyp_by(num_hyp);
  for (const Piece& p : ref_pieces) ref_by[p.speaker].emplace_back(p.start, p.end);
  for (const Piece& p : hyp_pieces) hyp_by[p.speaker].emplace_back(p.start, p.end);

  std::vector<std::vector<double>> overlap(num_ref,
                                           std::vector<double>(num_hyp, 0.0));
  for (int r = 0; r < num_ref; ++r)
    for (int h = 0; h < num_hyp; ++h)
      overlap[r][h] = overlap_duration(ref_by[r], hyp_by[h]);
  return overlap;
}

// Best ref-speaker -> hyp-speaker pairing by total overlap; pairs without
// positive overlap are left unmapped.
std::vector<int> mapping_from_overlap(
    const std::vector<std::vector<double>>& overlap) {
  const int num_ref = static_cast<int>(overlap.size());
  if (num_ref == 0) return {};
  if (overlap[0].empty()) return std::vector<int>(num_ref, -1);
  std::vector<int> assign = solve_assignment_max(overlap);
  for (int r = 0; r < num_ref; ++r)
    if (assign[r] >= 0 && overlap[r][assign[r]] <= 0.0) assign[r] = -1;
  return assign;
}

MetricReport sweep(const std::vector<Piece>& ref_pieces,
                   const std::vector<Piece>& hyp_pieces, int num_hyp,
                   const std::vector<int>& ref_to_hyp, ConfMode mode,
                   OverlapMode overlap) {
  std::vector<double> bounds;
  bounds.reserve(2 * (ref_pieces.size() + hyp_pieces.size()));
  for (const Piece& p : ref_pieces) {
    bounds.push_back(p.start);
    bounds.push_back(p.end);
  }
  for (const Piece& p : hyp_pieces) {
    bounds.push_back(p.start);
    bounds.push_back(p.end);
  }
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

  MetricReport report;
  std::vector<const Piece*> active_ref;
  std::vector<int> hyp_emotion(num_hyp, -2);  // -2 marks an inactive speaker
  std::array<int, kNumEmotions> ref_counts{};
  std::array<int, kNumEmotions> hyp_counts{};

  for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
    const double t0 = bounds[b];
    const double t1 = bounds[b + 1];
    const double dt = t1 - t0;

    active_ref.clear();
    ref_counts.fill(0);
    hyp_counts.fill(0);
    std::fill(hyp_emotion.begin(), hyp_emotion.end(), -2);
    int nref = 0, nhyp = 0;
    for (const Piece& p : ref_pieces) {
      if (p.start <= t0 && p.end >= t1) {
        ++nref;
        active_ref.push_back(&p);
        if (p.emotion >= 0) ++ref_counts[p.emotion];
      }
    }
    for (const Piece& p : hyp_pieces) {
      if (p.start <= t0 && p.end >= t1) {
        ++nhyp;
        hyp_emotion[p.speaker] = p.emotion;
        if (p.emotion >= 0) ++hyp_counts[p.emotion];
      }
    }

    int cref = nref, chyp = nhyp;
    if (overlap == OverlapMode::kSingle) {
      cref = std::min(nref, 1);
      chyp = std::min(nhyp, 1);
    }
    if (cref > chyp) report.missed += (cref - chyp) * dt;
    if (chyp > cref) report.false_alarm += (chyp - cref) * dt;
    report.total += cref * dt;

    const int matched = std::min(cref, chyp);
    int correct = 0;
    if (matched > 0) {
      switch (mode) {
        case ConfMode::kSpeaker:
          for (const Piece* r : active_ref) {
            int h = ref_to_hyp[r->speaker];
            if (h >= 0 && hyp_emotion[h] != -2) ++correct;
          }
          break;
        case ConfMode::kEmotion:
          for (int e = 0; e < kNumEmotions; ++e)
            correct += std::min(ref_counts[e], hyp_counts[e]);
          break;
        case ConfMode::kSpeakerEmotion:
          for (const Piece* r : active_ref) {
            int h = ref_to_hyp[r->speaker];
            if (h >= 0 && hyp_emotion[h] != -2 && hyp_emotion[h] == r->emotion)
              ++correct;
          }
          break;
      }
      if (correct > matched) correct = matched;
    } else {
      correct = 0;
    }
    report.confusion += (matched - correct) * dt;
  }
  return report;
}

void require_reference_emotions(const Annotation& ref) {
  for (const RichSegment& seg : ref.segments())
    if (!seg.emotion)
      throw InputError("recording " + ref.recording_id() +
                       ": reference segment at " +
                       std::to_string(seg.span.start) +
                       " lacks an emotion label");
}

MetricReport duration_metric(const Annotation& ref, const Annotation& hyp,
                             double collar, ConfMode mode,
                             OverlapMode overlap) {
  if (ref.empty())
    throw InputError("recording " + ref.recording_id() +
                     ": reference has no speech to score");
  const double end = std::max(ref.max_end(), hyp.max_end());
  Timeline mask = scoring_mask(ref, collar, TimeSpan(0.0, end));

  std::map<std::string, int> ref_index = index_speakers(ref);
  std::map<std::string, int> hyp_index = index_speakers(hyp);
  std::vector<Piece> ref_pieces = clip_to_mask(ref, mask, ref_index);
  std::vector<Piece> hyp_pieces = clip_to_mask(hyp, mask, hyp_index);

  std::vector<int> mapping(ref_index.size(), -1);
  if (mode != ConfMode::kEmotion)
    mapping = mapping_from_overlap(
        overlap_matrix(ref_pieces, static_cast<int>(ref_index.size()),
                       hyp_pieces, static_cast<int>(hyp_index.size())));

  MetricReport report =
      sweep(ref_pieces, hyp_pieces, static_cast<int>(hyp_index.size()),
            mapping, mode, overlap);
  if (!(report.total > 0.0))
    throw InputError("recording " + ref.recording_id() +
                     ": scoring mask leaves no reference speech");
  return report;
}

// Edit-distance alignment without the empty-reference guard, for internal
// reuse by cpwer where empty streams are legitimate.
WerReport align_words(const std::vector<std::string>& ref,
                      const std::vector<std::string>& hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      int sub = d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      int del = d[i - 1][j] + 1;
      int ins = d[i][j - 1] + 1;
      d[i][j] = std::min({sub, del, ins});
    }
  }

  WerReport report;
  report.ref_words = static_cast<std::int64_t>(n);
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] &&
        d[i][j] == d[i - 1][j - 1]) {
      --i;
      --j;
    } else if (i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + 1) {
      ++report.substitutions;
      --i;
      --j;
    } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      ++report.deletions;
      --i;
    } else {
      ++report.insertions;
      --j;
    }
  }
  return report;
}

}  // namespace

VadScore far_msr(const Timeline& ref_speech, const Timeline& hyp_speech,
                 const TimeSpan& extent, FarDenominator denominator) {
  Timeline domain({extent});
  if (!timeline_subtract(ref_speech, domain).empty() ||
      !timeline_subtract(hyp_speech, domain).empty())
    throw InputError("speech timelines extend beyond the scoring extent");

  VadScore score;
  score.ref_speech = ref_speech.total_duration();
  if (score.ref_speech <= 0.0)
    throw InputError("reference speech is empty; miss rate is undefined");
  score.ref_nonspeech =
      timeline_subtract(domain, ref_speech).total_duration();
  score.missed = timeline_subtract(ref_speech, hyp_speech).total_duration();
  score.false_alarm =
      timeline_subtract(hyp_speech, ref_speech).total_duration();
  score.msr = score.missed / score.ref_speech;
  const double denom = denominator == FarDenominator::kSpeech
                           ? score.ref_speech
                           : score.ref_nonspeech;
  score.far = denom > 0.0 ? score.false_alarm / denom : 0.0;
  return score;
}

SpeakerMapping optimal_mapping(const Annotation& ref, const Annotation& hyp) {
  const double end = std::max(ref.max_end(), hyp.max_end());
  if (end <= 0.0) return {};
  return optimal_mapping(ref, hyp, Timeline({TimeSpan(0.0, end)}));
}

SpeakerMapping optimal_mapping(const Annotation& ref, const Annotation& hyp,
                               const Timeline& mask) {
  std::map<std::string, int> ref_index = index_speakers(ref);
  std::map<std::string, int> hyp_index = index_speakers(hyp);
  std::vector<Piece> ref_pieces = clip_to_mask(ref, mask, ref_index);
  std::vector<Piece> hyp_pieces = clip_to_mask(hyp, mask, hyp_index);
  std::vector<std::vector<double>> overlap =
      overlap_matrix(ref_pieces, static_cast<int>(ref_index.size()),
                     hyp_pieces, static_cast<int>(hyp_index.size()));
  std::vector<int> assign = mapping_from_overlap(overlap);

  std::vector<std::string> ref_names(ref_index.size());
  for (const auto& [name, idx] : ref_index) ref_names[idx] = name;
  std::vector<std::string> hyp_names(hyp_index.size());
  for (const auto& [name, idx] : hyp_index) hyp_names[idx] = name;

  SpeakerMapping mapping;
  for (std::size_t r = 0; r < assign.size(); ++r) {
    if (assign[r] < 0) continue;
    mapping.ref_to_hyp[ref_names[r]] = hyp_names[assign[r]];
    mapping.total_overlap += overlap[r][assign[r]];
  }
  return mapping;
}

MetricReport der(const Annotation& ref, const Annotation& hyp, double collar,
                 OverlapMode overlap) {
  return duration_metric(ref, hyp, collar, ConfMode::kSpeaker, overlap);
}

MetricReport teer(const Annotation& ref, const Annotation& hyp, double collar,
                  OverlapMode overlap) {
  require_reference_emotions(ref);
  return duration_metric(ref, hyp, collar, ConfMode::kEmotion, overlap);
}

MetricReport steer(const Annotation& ref, const Annotation& hyp, double collar,
                   OverlapMode overlap) {
  require_reference_emotions(ref);
  return duration_metric(ref, hyp, collar, ConfMode::kSpeakerEmotion, overlap);
}

std::vector<std::string> normalize_words(const std::string& text) {
  std::vector<std::string> words;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '\'') {
      current += static_cast<char>(std::tolower(c));
    } else if (std::isspace(c)) {
      if (!current.empty()) {
        words.push_back(std::move(current));
        current.clear();
      }
    }
    // remaining punctuation is dropped
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

WerReport wer(const std::vector<std::string>& ref_words,
              const std::vector<std::string>& hyp_words) {
  if (ref_words.empty())
    throw InputError("reference word sequence is empty; WER is undefined");
  return align_words(ref_words, hyp_words);
}

std::map<std::string, std::vector<std::string>> words_by_speaker(
    const Annotation& annotation) {
  std::map<std::string, std::vector<std::string>> result;
  for (const std::string& speaker : annotation.speakers()) result[speaker];
  for (const RichSegment& seg : annotation.segments()) {
    if (!seg.words) continue;
    std::vector<std::string> words = normalize_words(*seg.words);
    auto& stream = result[seg.speaker];
    stream.insert(stream.end(), std::make_move_iterator(words.begin()),
                  std::make_move_iterator(words.end()));
  }
  return result;
}

WerReport cpwer(
    const std::map<std::string, std::vector<std::string>>& ref_by_speaker,
    const std::map<std::string, std::vector<std::string>>& hyp_by_speaker) {
  std::vector<const std::vector<std::string>*> refs;
  std::vector<const std::vector<std::string>*> hyps;
  for (const auto& [name, words] : ref_by_speaker) refs.push_back(&words);
  for (const auto& [name, words] : hyp_by_speaker) hyps.push_back(&words);

  std::int64_t total_ref_words = 0;
  for (const auto* words : refs) total_ref_words += words->size();
  if (total_ref_words == 0)
    throw InputError("no reference words; cpWER is undefined");

  const std::vector<std::string> empty_stream;
  const std::size_t n = std::max(refs.size(), hyps.size());
  while (refs.size() < n) refs.push_back(&empty_stream);
  while (hyps.size() < n) hyps.push_back(&empty_stream);

  std::vector<std::vector<WerReport>> pair_reports(n, std::vector<WerReport>(n));
  std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      pair_reports[i][j] = align_words(*refs[i], *hyps[j]);
      cost[i][j] = static_cast<double>(pair_reports[i][j].edits());
    }
  }

  std::vector<int> assign = solve_assignment_min(cost);
  WerReport report;
  for (std::size_t i = 0; i < n; ++i) {
    const WerReport& pair = pair_reports[i][assign[i]];
    report.substitutions += pair.substitutions;
    report.deletions += pair.deletions;
    report.insertions += pair.insertions;
  }
  report.ref_words = total_ref_words;
  return report;
}

EmotionEval emotion_accuracy(const std::vector<LabelledUtterance>& ref_utts,
                             const std::vector<LabelledUtterance>& hyp_utts) {
  std::map<std::string, EmotionLabel> hyp_by_id;
  for (const LabelledUtterance& utt : hyp_utts)
    if (!hyp_by_id.emplace(utt.id, utt.label).second)
      throw InputError("duplicate hypothesis utterance id " + utt.id);

  EmotionEval eval;
  std::map<std::string, bool> seen_ref;
  for (const LabelledUtterance& utt : ref_utts) {
    if (!seen_ref.emplace(utt.id, true).second)
      throw InputError("duplicate reference utterance id " + utt.id);
    auto it = hyp_by_id.find(utt.id);
    if (it == hyp_by_id.end())
      throw InputError("utterance " + utt.id + " missing from the hypothesis");
    const int r = static_cast<int>(utt.label);
    const int h = static_cast<int>(it->second);
    ++eval.confusion[r][h];
    ++eval.total;
    if (r == h) ++eval.correct;
  }
  if (hyp_by_id.size() != ref_utts.size())
    throw InputError("hypothesis contains utterance ids absent from the reference");
  if (eval.total == 0) throw InputError("no utterances to score");

  eval.accuracy = static_cast<double>(eval.correct) / eval.total;

  std::int64_t total4 = 0, correct4 = 0;
  for (int r = 0; r < 4; ++r) {  // happy, sad, angry, neutral
    for (int h = 0; h < kNumEmotions; ++h) total4 += eval.confusion[r][h];
    correct4 += eval.confusion[r][r];
  }
  eval.accuracy_4way =
      total4 > 0 ? static_cast<double>(correct4) / total4 : 0.0;

  for (int r = 0; r < kNumEmotions; ++r) {
    std::int64_t row = 0;
    for (int h = 0; h < kNumEmotions; ++h) row += eval.confusion[r][h];
    for (int h = 0; h < kNumEmotions; ++h)
      eval.confusion_normalized[r][h] =
          row > 0 ? static_cast<double>(eval.confusion[r][h]) / row : 0.0;
  }
  return eval;
}

std::vector<LabelledUtterance> emotion_utterances(const Annotation& annotation) {
  std::vector<LabelledUtterance> utts;
  utts.reserve(annotation.segments().size());
  for (const RichSegment& seg : annotation.segments()) {
    if (!seg.emotion)
      throw InputError("recording " + annotation.recording_id() +
                       ": segment at " + std::to_string(seg.span.start) +
                       " lacks an emotion label");
    std::string id = annotation.recording_id() + ":" + seg.speaker + ":" +
                     std::to_string(std::llround(seg.span.start * 1e6)) + "-" +
                     std::to_string(std::llround(seg.span.end * 1e6));
    utts.push_back({std::move(id), *seg.emotion});
  }
  return utts;
}

}  // namespace convoscore
