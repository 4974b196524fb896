// Acceptance harness: one [PASS]/[FAIL] line per shipping criterion.
// Exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "convoscore/clustering.hpp"
#include "convoscore/io.hpp"
#include "convoscore/metrics.hpp"
#include "convoscore/oracle.hpp"
#include "convoscore/rng.hpp"
#include "convoscore/simulate.hpp"
#include "convoscore/vad.hpp"

using namespace convoscore;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s%s%s%s\n", ok ? "PASS" : "FAIL", id, name,
              detail.empty() ? "" : " (", detail.c_str(),
              detail.empty() ? "" : ")");
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

SynthSpec corrupted_spec(std::uint64_t seed, double overlap) {
  SynthSpec spec;
  spec.recording_id = "acc";
  spec.num_speakers = 2 + static_cast<int>(seed % 3);
  spec.dialogue_length = 30.0 + 10.0 * static_cast<double>(seed % 3);
  spec.overlap_prob = overlap;
  spec.max_overlap = 0.5;
  spec.jitter_sigma = 0.08;
  spec.emotion_confusion_prob = 0.25;
  spec.speaker_swap_prob = 0.2;
  spec.word_sub_prob = 0.08;
  spec.word_del_prob = 0.04;
  spec.word_ins_prob = 0.04;
  spec.seed = seed;
  return spec;
}

// --- criterion 1: production metrics agree with the frame-grid oracle ------

bool grid_close(double produced, double oracle, double tolerance) {
  return std::abs(produced - oracle) <= tolerance;
}

bool criterion_agreement(std::string* detail) {
  const double grid = 0.01;
  const double start = now_seconds();
  double worst = 0.0;
  int dialogues = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    SynthResult r = generate(corrupted_spec(seed, 0.35));
    const Annotation& ref = r.reference;
    const Annotation& hyp = r.hypothesis;
    const double nref = static_cast<double>(ref.segments().size());
    const double nhyp = static_cast<double>(hyp.segments().size());
    ++dialogues;

    for (double collar : {0.0, 0.25}) {
      const double boundaries =
          2.0 * (nref + nhyp) + (collar > 0.0 ? 4.0 * nref : 0.0);
      const double tol = 2.0 * grid * boundaries;
      MetricReport d = der(ref, hyp, collar);
      MetricReport t = teer(ref, hyp, collar);
      MetricReport s = steer(ref, hyp, collar);
      OracleScores o = frame_grid_oracle(ref, hyp, collar, grid);
      const struct {
        const MetricReport* fast;
        const MetricReport* slow;
      } pairs[] = {{&d, &o.der}, {&t, &o.teer}, {&s, &o.steer}};
      for (const auto& [fast, slow] : pairs) {
        if (!grid_close(fast->missed, slow->missed, tol) ||
            !grid_close(fast->false_alarm, slow->false_alarm, tol) ||
            !grid_close(fast->confusion, slow->confusion, tol) ||
            !grid_close(fast->total, slow->total, tol) ||
            !grid_close(fast->rate(), slow->rate(), tol / fast->total)) {
          *detail = "seed " + std::to_string(seed) + " collar " + fmt(collar) +
                    " disagrees with the oracle beyond " + fmt(tol) + " s";
          return false;
        }
        worst = std::max(worst, std::abs(fast->rate() - slow->rate()));
      }
      if (collar == 0.0) {
        const TimeSpan extent(0.0, std::max(ref.max_end(), hyp.max_end()));
        VadScore v = far_msr(ref.speech(), hyp.speech(), extent);
        OracleScores o0 = frame_grid_oracle(ref, hyp, 0.0, grid);
        const double vtol =
            2.0 * grid * 2.0 * (nref + nhyp) / std::max(1.0, v.ref_speech);
        if (!grid_close(v.far, o0.far, vtol) ||
            !grid_close(v.msr, o0.msr, vtol)) {
          *detail = "seed " + std::to_string(seed) +
                    " FAR/MSR disagree with the oracle";
          return false;
        }
      }
    }
  }
  const double elapsed = now_seconds() - start;
  *detail = std::to_string(dialogues) + " dialogues, max rate gap " +
            fmt(worst) + ", " + fmt(elapsed) + " s";
  return elapsed < 30.0;
}

// --- criterion 2: planted corruption reproduced to the microsecond ---------

bool criterion_injected(std::string* detail) {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    SynthSpec spec;
    spec.recording_id = "inj";
    spec.num_speakers = 2 + static_cast<int>(seed % 3);
    spec.dialogue_length = 40.0;
    spec.overlap_prob = 0.0;
    spec.jitter_sigma = 0.06;
    spec.emotion_confusion_prob = 0.3;
    spec.speaker_swap_prob = 0.25;
    spec.seed = seed;
    SynthResult r = generate(spec);
    if (!r.injected.exact) {
      *detail = "seed " + std::to_string(seed) +
                " did not produce an exact fixture";
      return false;
    }
    MetricReport d = der(r.reference, r.hypothesis, 0.0);
    MetricReport t = teer(r.reference, r.hypothesis, 0.0);
    MetricReport s = steer(r.reference, r.hypothesis, 0.0);
    const double gaps[] = {std::abs(d.missed - r.injected.missed),
                           std::abs(d.false_alarm - r.injected.false_alarm),
                           std::abs(d.confusion - r.injected.conf_der),
                           std::abs(t.confusion - r.injected.conf_teer),
                           std::abs(s.confusion - r.injected.conf_steer),
                           std::abs(d.total - r.injected.total)};
    for (double gap : gaps) worst = std::max(worst, gap);
    if (worst > 1e-6) {
      *detail = "seed " + std::to_string(seed) + " off by " + fmt(worst) +
                " s (limit 1e-6)";
      return false;
    }
  }
  *detail = "50 fixtures, worst gap " + fmt(worst) + " s";
  return true;
}

// --- criterion 3: shared sweep invariants -----------------------------------

bool criterion_invariants(std::string* detail) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    SynthResult r = generate(corrupted_spec(seed, seed % 2 ? 0.4 : 0.0));
    for (double collar : {0.0, 0.25}) {
      MetricReport d = der(r.reference, r.hypothesis, collar);
      MetricReport t = teer(r.reference, r.hypothesis, collar);
      MetricReport s = steer(r.reference, r.hypothesis, collar);
      if (d.missed != t.missed || t.missed != s.missed ||
          d.false_alarm != t.false_alarm || t.false_alarm != s.false_alarm ||
          d.total != t.total || t.total != s.total) {
        *detail = "seed " + std::to_string(seed) +
                  ": MS/FA/TOTAL not bitwise identical across metrics";
        return false;
      }
      if (s.rate() < t.rate()) {
        *detail = "seed " + std::to_string(seed) + ": sTEER " + fmt(s.rate()) +
                  " < TEER " + fmt(t.rate());
        return false;
      }
    }
  }
  *detail = "50 dialogues x 2 collars";
  return true;
}

// --- criterion 4: invariance under hypothesis relabeling --------------------

Annotation relabel(const Annotation& a, SplitMix64* rng) {
  std::vector<std::string> speakers = a.speakers();
  std::vector<std::string> fresh;
  for (std::size_t i = 0; i < speakers.size(); ++i)
    fresh.push_back("relabel" + std::to_string(i));
  for (std::size_t i = fresh.size(); i > 1; --i)
    std::swap(fresh[i - 1], fresh[rng->next_below(i)]);
  std::map<std::string, std::string> names;
  for (std::size_t i = 0; i < speakers.size(); ++i) names[speakers[i]] = fresh[i];
  std::vector<RichSegment> segments;
  for (const RichSegment& seg : a.segments())
    segments.emplace_back(seg.span, names.at(seg.speaker), seg.emotion,
                          seg.words);
  return Annotation(a.recording_id(), std::move(segments));
}

bool criterion_relabeling(std::string* detail) {
  SplitMix64 rng(2024);
  int trials = 0;
  for (std::uint64_t seed = 101; seed <= 110; ++seed) {
    SynthResult r = generate(corrupted_spec(seed, 0.3));
    MetricReport d0 = der(r.reference, r.hypothesis, 0.25);
    MetricReport s0 = steer(r.reference, r.hypothesis, 0.25);
    WerReport w0 = cpwer(words_by_speaker(r.reference),
                         words_by_speaker(r.hypothesis));
    for (int trial = 0; trial < 5; ++trial) {
      Annotation renamed = relabel(r.hypothesis, &rng);
      MetricReport d1 = der(r.reference, renamed, 0.25);
      MetricReport s1 = steer(r.reference, renamed, 0.25);
      WerReport w1 = cpwer(words_by_speaker(r.reference),
                           words_by_speaker(renamed));
      ++trials;
      if (std::abs(d0.rate() - d1.rate()) > 1e-12 ||
          std::abs(s0.rate() - s1.rate()) > 1e-12 ||
          std::abs(w0.rate() - w1.rate()) > 1e-12) {
        *detail = "seed " + std::to_string(seed) + " trial " +
                  std::to_string(trial) + " shifted under relabeling";
        return false;
      }
    }
  }
  *detail = std::to_string(trials) + " relabeling trials";
  return true;
}

// --- criterion 5: the collar forgives sub-collar jitter ---------------------

bool criterion_collar(std::string* detail) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    SynthSpec spec;
    spec.recording_id = "jit";
    spec.num_speakers = 2 + static_cast<int>(seed % 3);
    spec.dialogue_length = 40.0;
    spec.jitter_sigma = 0.1;  // clamped to 0.2, safely under the collar
    spec.seed = seed;
    SynthResult r = generate(spec);
    MetricReport d = der(r.reference, r.hypothesis, 0.25);
    MetricReport t = teer(r.reference, r.hypothesis, 0.25);
    MetricReport s = steer(r.reference, r.hypothesis, 0.25);
    if (d.rate() != 0.0 || t.rate() != 0.0 || s.rate() != 0.0) {
      *detail = "seed " + std::to_string(seed) + " der " + fmt(d.rate()) +
                " teer " + fmt(t.rate()) + " steer " + fmt(s.rate());
      return false;
    }
  }
  *detail = "30 jittered dialogues, every rate exactly 0";
  return true;
}

// --- criterion 6: cpWER equals the brute-force permutation minimum ----------

std::int64_t brute_cpwer_edits(
    const std::map<std::string, std::vector<std::string>>& ref,
    const std::map<std::string, std::vector<std::string>>& hyp) {
  std::vector<std::vector<std::string>> ref_streams, hyp_streams;
  for (const auto& [name, words] : ref) ref_streams.push_back(words);
  for (const auto& [name, words] : hyp) hyp_streams.push_back(words);
  const std::size_t k = std::max(ref_streams.size(), hyp_streams.size());
  ref_streams.resize(k);
  hyp_streams.resize(k);
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::int64_t best = -1;
  do {
    std::int64_t edits = 0;
    for (std::size_t i = 0; i < k; ++i) {
      const std::vector<std::string>& r = ref_streams[i];
      const std::vector<std::string>& h = hyp_streams[order[i]];
      if (r.empty()) {
        edits += static_cast<std::int64_t>(h.size());
      } else {
        edits += wer(r, h).edits();
      }
    }
    if (best < 0 || edits < best) best = edits;
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

bool criterion_cpwer(std::string* detail) {
  SplitMix64 rng(77);
  const char* vocab[] = {"a", "b", "c", "d"};
  for (int instance = 0; instance < 100; ++instance) {
    std::map<std::string, std::vector<std::string>> ref, hyp;
    const std::uint64_t nref = 1 + rng.next_below(4);
    const std::uint64_t nhyp = 1 + rng.next_below(4);
    std::int64_t ref_words = 0;
    for (std::uint64_t i = 0; i < nref; ++i) {
      std::vector<std::string> words;
      for (std::uint64_t w = rng.next_below(9); w > 0; --w)
        words.push_back(vocab[rng.next_below(4)]);
      ref_words += static_cast<std::int64_t>(words.size());
      ref[std::string(1, ('A' + static_cast<char>(i)))] = words;
    }
    if (ref_words == 0) ref["A"] = {"a"};
    for (std::uint64_t i = 0; i < nhyp; ++i) {
      std::vector<std::string> words;
      for (std::uint64_t w = rng.next_below(9); w > 0; --w)
        words.push_back(vocab[rng.next_below(4)]);
      hyp[std::string(1, ('A' + static_cast<char>(i)))] = words;
    }

    WerReport best = cpwer(ref, hyp);
    if (best.edits() != brute_cpwer_edits(ref, hyp)) {
      *detail = "instance " + std::to_string(instance) +
                ": assignment minimum differs from brute force";
      return false;
    }
    // Pairing streams by equal label is one admissible assignment, so the
    // optimum can never exceed it.
    std::int64_t identity = 0;
    std::set<std::string> names;
    for (const auto& [name, words] : ref) names.insert(name);
    for (const auto& [name, words] : hyp) names.insert(name);
    for (const std::string& name : names) {
      const auto r = ref.find(name);
      const auto h = hyp.find(name);
      const std::vector<std::string> empty;
      const std::vector<std::string>& rw = r == ref.end() ? empty : r->second;
      const std::vector<std::string>& hw = h == hyp.end() ? empty : h->second;
      if (rw.empty()) {
        identity += static_cast<std::int64_t>(hw.size());
      } else {
        identity += wer(rw, hw).edits();
      }
    }
    if (best.edits() > identity) {
      *detail = "instance " + std::to_string(instance) +
                ": optimum exceeds the identity assignment";
      return false;
    }
  }
  *detail = "100 randomized stream sets";
  return true;
}

// --- criterion 7: post-processing guarantees --------------------------------

bool criterion_postprocess(std::string* detail) {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::uint64_t count = 1 + rng.next_below(40);
    std::vector<FramePosteriorTrack> tracks;
    for (std::uint64_t k = 0; k < count; ++k) {
      std::vector<double> probs(150);
      for (double& p : probs) p = rng.next_double();
      tracks.emplace_back(TimeSpan(static_cast<double>(k),
                                   static_cast<double>(k) + 3.0),
                          0.02, std::move(probs));
    }
    const double threshold = 0.1 + 0.8 * rng.next_double();

    // Kept spans tile the dialogue extent exactly.
    std::vector<WindowedDecision> plan =
        window_decisions(tracks, 3.0, 1.0, threshold);
    if (plan.front().kept_span.start != tracks.front().window_span.start ||
        plan.back().kept_span.end != tracks.back().window_span.end) {
      *detail = "trial " + std::to_string(trial) +
                ": kept spans do not reach the extent edges";
      return false;
    }
    for (std::size_t i = 1; i < plan.size(); ++i) {
      if (plan[i - 1].kept_span.end != plan[i].kept_span.start) {
        *detail = "trial " + std::to_string(trial) +
                  ": kept spans do not tile exactly";
        return false;
      }
    }

    Timeline merged = merge_windows(tracks, 3.0, 1.0, threshold);
    for (GapPolicy policy :
         {GapPolicy::kFillGapsFirst, GapPolicy::kDropIslandsFirst}) {
      Timeline clean = postprocess(merged, 0.25, policy);
      for (const TimeSpan& span : clean.spans()) {
        if (span.duration() < 0.25 - 1e-12) {
          *detail = "trial " + std::to_string(trial) + ": region " +
                    fmt(span.duration()) + " s survived";
          return false;
        }
      }
      for (std::size_t i = 1; i < clean.spans().size(); ++i) {
        const double gap =
            clean.spans()[i].start - clean.spans()[i - 1].end;
        if (gap < 0.25 - 1e-12) {
          *detail = "trial " + std::to_string(trial) + ": gap " + fmt(gap) +
                    " s survived";
          return false;
        }
      }
      if (!(postprocess(clean, 0.25, policy) == clean)) {
        *detail = "trial " + std::to_string(trial) + ": not idempotent";
        return false;
      }
    }
  }
  *detail = "1000 randomized posterior stacks, both gap policies";
  return true;
}

// --- criterion 8: planted two-cluster recovery -------------------------------

bool criterion_clustering(std::string* detail) {
  const int dim = 12;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    SplitMix64 rng(seed);
    const std::uint64_t n = 20 + rng.next_below(11);
    const std::uint64_t first = 2 + rng.next_below(n - 3);
    std::vector<EmbeddingWindow> windows;
    std::vector<int> planted;
    for (std::uint64_t i = 0; i < n; ++i) {
      const int cluster = i < first ? 0 : 1;
      planted.push_back(cluster);
      // Unit axis plus noise confined to the shared orthogonal complement
      // and capped at norm 0.2: intra-cluster cosine is then at least
      // (1 - 0.04) / (1 + 0.04) > 0.92 and inter at most 0.04.
      std::vector<double> vec(dim, 0.0);
      vec[cluster] = 1.0;
      double norm2 = 0.0;
      for (int d = 2; d < dim; ++d) {
        vec[d] = 0.05 * rng.normal();
        norm2 += vec[d] * vec[d];
      }
      if (norm2 > 0.2 * 0.2) {
        const double scale = 0.2 / std::sqrt(norm2);
        for (int d = 2; d < dim; ++d) vec[d] *= scale;
      }
      windows.emplace_back(TimeSpan(static_cast<double>(i),
                                    static_cast<double>(i) + 1.0),
                           std::move(vec));
    }

    // Verify the planted geometry really is a wide-margin 2-cluster problem.
    auto cosine = [&](const std::vector<double>& a,
                      const std::vector<double>& b) {
      double dot = 0.0, na = 0.0, nb = 0.0;
      for (int d = 0; d < dim; ++d) {
        dot += a[d] * b[d];
        na += a[d] * a[d];
        nb += b[d] * b[d];
      }
      return dot / std::sqrt(na * nb);
    };
    for (std::size_t i = 0; i < windows.size(); ++i) {
      for (std::size_t j = i + 1; j < windows.size(); ++j) {
        const double c = cosine(windows[i].vec, windows[j].vec);
        if (planted[i] == planted[j] ? c < 0.9 : c > 0.1) {
          *detail = "seed " + std::to_string(seed) +
                    ": planted geometry out of margin";
          return false;
        }
      }
    }

    Eigen::MatrixXd affinity = cosine_affinity(windows);
    std::vector<int> labels = spectral_cluster(affinity, 8, seed);
    if (labels != spectral_cluster(affinity, 8, seed)) {
      *detail = "seed " + std::to_string(seed) + ": not deterministic";
      return false;
    }
    if (std::set<int>(labels.begin(), labels.end()).size() != 2) {
      *detail = "seed " + std::to_string(seed) + ": eigengap chose " +
                std::to_string(
                    std::set<int>(labels.begin(), labels.end()).size()) +
                " clusters";
      return false;
    }
    for (std::uint64_t i = 0; i < n; ++i) {
      if (labels[i] != planted[i]) {  // first window is cluster 0 by relabeling
        *detail = "seed " + std::to_string(seed) + ": wrong partition";
        return false;
      }
    }
  }
  *detail = "100 planted problems recovered bit-identically";
  return true;
}

// --- criterion 9: WER alignment equals exhaustive enumeration ---------------

struct AlignProblem {
  const char* ref;
  int nref;
  const char* hyp;
  int nhyp;
  int best;
};

void enumerate_alignments(AlignProblem* p, int i, int j, int edits) {
  if (edits >= p->best) return;  // cannot beat the incumbent
  if (i == p->nref) {
    p->best = std::min(p->best, edits + (p->nhyp - j));
    return;
  }
  if (j == p->nhyp) {
    p->best = std::min(p->best, edits + (p->nref - i));
    return;
  }
  enumerate_alignments(p, i + 1, j + 1,
                       edits + (p->ref[i] == p->hyp[j] ? 0 : 1));
  enumerate_alignments(p, i + 1, j, edits + 1);
  enumerate_alignments(p, i, j + 1, edits + 1);
}

int exhaustive_edits(const std::string& ref, const std::string& hyp) {
  AlignProblem p{ref.c_str(), static_cast<int>(ref.size()), hyp.c_str(),
                 static_cast<int>(hyp.size()), 0};
  // Seed the incumbent with the plain diagonal alignment.
  const int diag = std::min(p.nref, p.nhyp);
  int bound = std::abs(p.nref - p.nhyp);
  for (int i = 0; i < diag; ++i) bound += ref[i] == hyp[i] ? 0 : 1;
  p.best = bound;
  enumerate_alignments(&p, 0, 0, 0);
  return p.best;
}

bool criterion_wer(std::string* detail) {
  std::vector<std::string> strings{""};
  for (int len = 1; len <= 6; ++len) {
    std::vector<std::string> grown;
    for (const std::string& s : strings) {
      if (s.size() + 1 == static_cast<std::size_t>(len)) {
        for (char c : {'x', 'y', 'z'}) grown.push_back(s + c);
      }
    }
    strings.insert(strings.end(), grown.begin(), grown.end());
  }
  std::vector<std::vector<std::string>> as_words(strings.size());
  for (std::size_t i = 0; i < strings.size(); ++i)
    for (char c : strings[i]) as_words[i].push_back(std::string(1, c));

  const double start = now_seconds();
  long long pairs = 0;
  for (std::size_t i = 0; i < strings.size(); ++i) {
    for (std::size_t j = 0; j < strings.size(); ++j) {
      if (as_words[i].empty()) continue;  // WER requires a non-empty reference
      ++pairs;
      const std::int64_t fast = wer(as_words[i], as_words[j]).edits();
      const int slow = exhaustive_edits(strings[i], strings[j]);
      if (fast != slow) {
        *detail = "'" + strings[i] + "' vs '" + strings[j] + "': DP " +
                  std::to_string(fast) + " enumeration " +
                  std::to_string(slow);
        return false;
      }
    }
  }
  *detail = std::to_string(pairs) + " string pairs, " +
            fmt(now_seconds() - start) + " s";
  return true;
}

// --- criterion 10: end-to-end smoke through the command line ----------------

int run_cli(const std::string& args, const std::string& log) {
  const std::string command =
      std::string(CONVOSCORE_BIN_PATH) + " " + args + " > " + log + " 2>&1";
  const int raw = std::system(command.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

bool all_rates_zero(const std::string& report_path,
                    const std::vector<std::string>& rate_keys,
                    std::string* detail) {
  std::istringstream stream(read_file(report_path));
  std::string line;
  while (std::getline(stream, line)) {
    if (line.empty()) continue;
    nlohmann::json record = nlohmann::json::parse(line);
    for (const std::string& key : rate_keys) {
      if (record.at(key).get<double>() != 0.0) {
        *detail = report_path + ": " + key + " = " +
                  record.at(key).dump() + " on " +
                  record.at("recording_id").get<std::string>();
        return false;
      }
    }
  }
  return true;
}

bool criterion_smoke(std::string* detail) {
  const double start = now_seconds();
  const fs::path dir = "acceptance_scratch";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto at = [&](const std::string& leaf) { return (dir / leaf).string(); };

  write_file(at("spec.json"),
             "{\n"
             "  \"recording_id\": \"smoke\",\n"
             "  \"num_speakers\": 3,\n"
             "  \"dialogue_length\": 600.0,\n"
             "  \"seed\": 12\n"
             "}\n");
  const std::string log = at("cli.log");
  if (run_cli("simulate --spec " + at("spec.json") + " --out " + at("out"),
              log) != 0) {
    *detail = "simulate failed: " + read_file(log);
    return false;
  }
  if (run_cli("vad-merge --posteriors " + at("out/posteriors.csv") +
                  " --recording-id smoke --out " + at("speech.rttm"),
              log) != 0) {
    *detail = "vad-merge failed: " + read_file(log);
    return false;
  }
  if (run_cli("score --metric vad --ref " + at("out/ref.jsonl") + " --hyp " +
                  at("speech.rttm") + " --report " + at("vad.jsonl"),
              log) != 0) {
    *detail = "score vad failed: " + read_file(log);
    return false;
  }
  if (!all_rates_zero(at("vad.jsonl"), {"FAR", "MSR"}, detail)) return false;

  for (const std::string metric : {"der", "teer", "steer", "cpwer"}) {
    if (run_cli("score --metric " + metric + " --ref " + at("out/ref.jsonl") +
                    " --hyp " + at("out/hyp.jsonl") + " --report " +
                    at(metric + ".jsonl"),
                log) != 0) {
      *detail = "score " + metric + " failed: " + read_file(log);
      return false;
    }
    if (!all_rates_zero(at(metric + ".jsonl"), {"rate"}, detail)) return false;
  }
  if (run_cli("score --metric joint --ref " + at("out/ref.jsonl") + " --hyp " +
                  at("out/hyp.jsonl") + " --report " + at("joint.jsonl"),
              log) != 0) {
    *detail = "score joint failed: " + read_file(log);
    return false;
  }
  if (!all_rates_zero(at("joint.jsonl"), {"cpwer", "steer", "teer"}, detail))
    return false;

  const double elapsed = now_seconds() - start;
  fs::remove_all(dir);
  *detail = "10-minute dialogue, full chain in " + fmt(elapsed) + " s";
  return elapsed < 5.0;
}

}  // namespace

int main() {
  std::string detail;

  detail.clear();
  report(1, "duration metrics agree with the frame-grid oracle",
         criterion_agreement(&detail), detail);

  detail.clear();
  report(2, "planted corruption is reproduced to the microsecond",
         criterion_injected(&detail), detail);

  detail.clear();
  report(3, "MS/FA shared across metrics and sTEER >= TEER",
         criterion_invariants(&detail), detail);

  detail.clear();
  report(4, "scores invariant under hypothesis relabeling",
         criterion_relabeling(&detail), detail);

  detail.clear();
  report(5, "0.25 s collar forgives sub-collar jitter exactly",
         criterion_collar(&detail), detail);

  detail.clear();
  report(6, "cpWER equals the brute-force permutation minimum",
         criterion_cpwer(&detail), detail);

  detail.clear();
  report(7, "VAD post-processing floors, tiling and idempotence",
         criterion_postprocess(&detail), detail);

  detail.clear();
  report(8, "planted two-cluster problems recovered deterministically",
         criterion_clustering(&detail), detail);

  detail.clear();
  report(9, "WER alignment equals exhaustive enumeration",
         criterion_wer(&detail), detail);

  detail.clear();
  report(10, "end-to-end zero-error smoke under five seconds",
         criterion_smoke(&detail), detail);

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all 10 criteria passed\n");
  return 0;
}
