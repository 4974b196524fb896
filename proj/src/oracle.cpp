#include "convoscore/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "convoscore/errors.hpp"

namespace convoscore {

namespace {

std::vector<std::string> sorted_speakers(const Annotation& a) {
  std::vector<std::string> names;
  for (const RichSegment& seg : a.segments()) names.push_back(seg.speaker);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

int speaker_slot(const std::vector<std::string>& names,
                 const std::string& name) {
  return static_cast<int>(
      std::lower_bound(names.begin(), names.end(), name) - names.begin());
}

}  // namespace

OracleScores frame_grid_oracle(const Annotation& ref, const Annotation& hyp,
                               double collar, double grid) {
  if (!(grid > 0.0) || grid > 0.01 + 1e-12)
    throw InputError("oracle grid must be positive and at most 0.01 s");
  if (collar < 0.0) throw InputError("collar must be non-negative");
  if (ref.segments().empty())
    throw InputError("oracle needs a non-empty reference");
  for (const RichSegment& seg : ref.segments())
    if (!seg.emotion)
      throw InputError("oracle reference segment at " +
                       std::to_string(seg.span.start) +
                       " lacks an emotion label");

  const std::vector<std::string> ref_names = sorted_speakers(ref);
  const std::vector<std::string> hyp_names = sorted_speakers(hyp);
  const int num_ref = static_cast<int>(ref_names.size());
  const int num_hyp = static_cast<int>(hyp_names.size());
  if (num_ref > 4 || num_hyp > 4)
    throw InputError("frame-grid oracle handles at most 4 speakers per side");

  double end = 0.0;
  for (const RichSegment& seg : ref.segments())
    end = std::max(end, seg.span.end);
  for (const RichSegment& seg : hyp.segments())
    end = std::max(end, seg.span.end);

  std::vector<double> boundaries;
  if (collar > 0.0) {
    for (const RichSegment& seg : ref.segments()) {
      boundaries.push_back(seg.span.start);
      boundaries.push_back(seg.span.end);
    }
  }

  const std::int64_t num_cells =
      static_cast<std::int64_t>(std::ceil(end / grid - 1e-9));

  // Per-cell activity, sampled at the cell center. Emotion -1 means the
  // active segment carries no label; slots without an active segment hold -2.
  std::vector<std::uint8_t> ref_mask(num_cells, 0), hyp_mask(num_cells, 0);
  std::vector<std::uint8_t> masked(num_cells, 0);
  std::vector<std::array<std::int8_t, 4>> ref_emo(num_cells);
  std::vector<std::array<std::int8_t, 4>> hyp_emo(num_cells);

  std::int64_t cells_in_extent = 0;
  for (std::int64_t c = 0; c < num_cells; ++c) {
    const double t = (static_cast<double>(c) + 0.5) * grid;
    if (t >= end) break;
    ++cells_in_extent;
    ref_emo[c].fill(-2);
    hyp_emo[c].fill(-2);
    for (const RichSegment& seg : ref.segments()) {
      if (seg.span.start <= t && t < seg.span.end) {
        const int slot = speaker_slot(ref_names, seg.speaker);
        ref_mask[c] |= static_cast<std::uint8_t>(1 << slot);
        ref_emo[c][slot] = static_cast<std::int8_t>(static_cast<int>(*seg.emotion));
      }
    }
    for (const RichSegment& seg : hyp.segments()) {
      if (seg.span.start <= t && t < seg.span.end) {
        const int slot = speaker_slot(hyp_names, seg.speaker);
        hyp_mask[c] |= static_cast<std::uint8_t>(1 << slot);
        hyp_emo[c][slot] =
            seg.emotion ? static_cast<std::int8_t>(static_cast<int>(*seg.emotion))
                        : std::int8_t{-1};
      }
    }
    for (double b : boundaries) {
      if (b - collar <= t && t < b + collar) {
        masked[c] = 1;
        break;
      }
    }
  }

  // Speech/non-speech agreement ignores the collar.
  std::int64_t speech_ref = 0, speech_missed = 0, speech_fa = 0;
  for (std::int64_t c = 0; c < cells_in_extent; ++c) {
    const bool r = ref_mask[c] != 0;
    const bool h = hyp_mask[c] != 0;
    if (r) ++speech_ref;
    if (r && !h) ++speech_missed;
    if (h && !r) ++speech_fa;
  }
  if (speech_ref == 0)
    throw InputError("reference speech is shorter than the oracle grid");

  // Exhaustive speaker assignment: pad both sides to a common size and try
  // every permutation; the best one maximizes correctly attributed frames.
  const int m = std::max(num_ref, num_hyp);
  std::vector<int> perm(std::max(m, 1));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best_perm = perm;
  std::int64_t best_correct = -1;
  do {
    std::int64_t correct = 0;
    for (std::int64_t c = 0; c < cells_in_extent; ++c) {
      if (masked[c]) continue;
      const std::uint8_t rm = ref_mask[c];
      const std::uint8_t hm = hyp_mask[c];
      if (!rm || !hm) continue;
      for (int r = 0; r < num_ref; ++r)
        if ((rm >> r & 1) && perm[r] < num_hyp && (hm >> perm[r] & 1))
          ++correct;
    }
    if (correct > best_correct) {
      best_correct = correct;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::int64_t ms = 0, fa = 0, total = 0;
  std::int64_t conf_der = 0, conf_teer = 0, conf_steer = 0;
  for (std::int64_t c = 0; c < cells_in_extent; ++c) {
    if (masked[c]) continue;
    const std::uint8_t rm = ref_mask[c];
    const std::uint8_t hm = hyp_mask[c];
    int nref = 0, nhyp = 0;
    for (int r = 0; r < num_ref; ++r) nref += rm >> r & 1;
    for (int h = 0; h < num_hyp; ++h) nhyp += hm >> h & 1;
    if (nref > nhyp) ms += nref - nhyp;
    if (nhyp > nref) fa += nhyp - nref;
    total += nref;

    const int matched = std::min(nref, nhyp);
    if (matched == 0) {
      continue;
    }

    int correct_spk = 0, correct_spk_emo = 0;
    for (int r = 0; r < num_ref; ++r) {
      if (!(rm >> r & 1)) continue;
      const int h = best_perm[r];
      if (h < num_hyp && (hm >> h & 1)) {
        ++correct_spk;
        if (hyp_emo[c][h] == ref_emo[c][r]) ++correct_spk_emo;
      }
    }

    std::array<int, kNumEmotions> rc{}, hc{};
    for (int r = 0; r < num_ref; ++r)
      if ((rm >> r & 1) && ref_emo[c][r] >= 0) ++rc[ref_emo[c][r]];
    for (int h = 0; h < num_hyp; ++h)
      if ((hm >> h & 1) && hyp_emo[c][h] >= 0) ++hc[hyp_emo[c][h]];
    int correct_emo = 0;
    for (int e = 0; e < kNumEmotions; ++e)
      correct_emo += std::min(rc[e], hc[e]);

    conf_der += matched - std::min(correct_spk, matched);
    conf_teer += matched - std::min(correct_emo, matched);
    conf_steer += matched - std::min(correct_spk_emo, matched);
  }
  if (total == 0)
    throw InputError("oracle mask leaves no reference speech");

  OracleScores scores;
  auto as_report = [&](std::int64_t conf) {
    MetricReport r;
    r.missed = static_cast<double>(ms) * grid;
    r.false_alarm = static_cast<double>(fa) * grid;
    r.confusion = static_cast<double>(conf) * grid;
    r.total = static_cast<double>(total) * grid;
    return r;
  };
  scores.der = as_report(conf_der);
  scores.teer = as_report(conf_teer);
  scores.steer = as_report(conf_steer);
  scores.msr = static_cast<double>(speech_missed) / speech_ref;
  scores.far = static_cast<double>(speech_fa) / speech_ref;
  const std::int64_t nonspeech = cells_in_extent - speech_ref;
  scores.far_nonspeech =
      nonspeech > 0 ? static_cast<double>(speech_fa) / nonspeech : 0.0;
  return scores;
}

}  // namespace convoscore
