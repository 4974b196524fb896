#include <vector>

#include "convoscore/errors.hpp"
#include "convoscore/rng.hpp"
#include "convoscore/vad.hpp"
#include "doctest.h"

using namespace convoscore;

namespace {

FramePosteriorTrack track_at(double start, std::vector<double> probs,
                             double window = 3.0, double period = 0.02) {
  return FramePosteriorTrack(TimeSpan(start, start + window), period,
                             std::move(probs));
}

std::vector<FramePosteriorTrack> constant_tracks(int count, double value) {
  std::vector<FramePosteriorTrack> tracks;
  for (int k = 0; k < count; ++k)
    tracks.push_back(track_at(k, std::vector<double>(150, value)));
  return tracks;
}

}  // namespace

TEST_CASE("posterior tracks validate their frames") {
  CHECK_THROWS_AS(track_at(0.0, {}), InputError);
  CHECK_THROWS_AS(track_at(0.0, {0.5, 1.5}), InputError);
  CHECK_THROWS_AS(track_at(0.0, {0.5, -0.1}), InputError);
  // 150 frames of 20 ms fit a 3 s window; 10 frames do not.
  CHECK_THROWS_AS(track_at(0.0, std::vector<double>(10, 0.5)), InputError);
  CHECK_NOTHROW(track_at(0.0, std::vector<double>(150, 0.5)));
}

TEST_CASE("thresholding counts an exact hit as speech") {
  FramePosteriorTrack t = track_at(0.0, {0.49, 0.5, 0.51, 0.0, 1.0},
                                   0.1, 0.02);
  std::vector<bool> labels = threshold_posteriors(t, 0.5);
  CHECK(labels == std::vector<bool>{false, true, true, false, true});
  CHECK_THROWS_AS(threshold_posteriors(t, 0.0), InputError);
  CHECK_THROWS_AS(threshold_posteriors(t, 1.0), InputError);
}

TEST_CASE("kept spans give interior windows their middle hop") {
  std::vector<FramePosteriorTrack> tracks = constant_tracks(3, 1.0);
  std::vector<WindowedDecision> decisions =
      window_decisions(tracks, 3.0, 1.0, 0.5);
  REQUIRE(decisions.size() == 3);
  CHECK(decisions[0].kept_span == TimeSpan(0.0, 2.0));
  CHECK(decisions[1].kept_span == TimeSpan(2.0, 3.0));
  CHECK(decisions[2].kept_span == TimeSpan(3.0, 5.0));

  // A lone window keeps everything.
  std::vector<FramePosteriorTrack> one = constant_tracks(1, 1.0);
  std::vector<WindowedDecision> lone = window_decisions(one, 3.0, 1.0, 0.5);
  REQUIRE(lone.size() == 1);
  CHECK(lone[0].kept_span == TimeSpan(0.0, 3.0));

  std::vector<FramePosteriorTrack> skewed;
  skewed.push_back(track_at(0.0, std::vector<double>(150, 1.0)));
  skewed.push_back(track_at(2.5, std::vector<double>(150, 1.0)));
  CHECK_THROWS_AS(window_decisions(skewed, 3.0, 1.0, 0.5), InputError);
}

TEST_CASE("merging windows reconstructs a planted speech pattern") {
  // Speech on [0.5, 4.1): frame f of window k covers k + [0.02f, 0.02f+0.02).
  auto planted = [](double k) {
    std::vector<double> probs(150);
    for (int f = 0; f < 150; ++f) {
      double mid = k + (f + 0.5) * 0.02;
      probs[f] = (mid > 0.5 && mid < 4.1) ? 1.0 : 0.0;
    }
    return probs;
  };
  std::vector<FramePosteriorTrack> tracks;
  for (int k = 0; k < 3; ++k) tracks.push_back(track_at(k, planted(k)));

  Timeline speech = merge_windows(tracks, 3.0, 1.0, 0.5);
  REQUIRE(speech.size() == 1);
  CHECK(speech.spans()[0].start == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(speech.spans()[0].end == doctest::Approx(4.1).epsilon(1e-12));

  // Windows disagreeing outside their kept span change nothing: corrupt
  // window 0 beyond t = 2, where window 1 owns the decision.
  std::vector<double> corrupted = planted(0.0);
  for (int f = 110; f < 150; ++f) corrupted[f] = 0.0;
  std::vector<FramePosteriorTrack> tracks2;
  tracks2.push_back(track_at(0, corrupted));
  tracks2.push_back(track_at(1, planted(1)));
  tracks2.push_back(track_at(2, planted(2)));
  CHECK(merge_windows(tracks2, 3.0, 1.0, 0.5) == speech);
}

TEST_CASE("postprocess fills short gaps and drops short islands") {
  Timeline noisy({{0.0, 1.0}, {1.1, 2.0}, {3.0, 3.1}, {5.0, 6.0}});

  Timeline filled = postprocess(noisy, 0.25, GapPolicy::kFillGapsFirst);
  REQUIRE(filled.size() == 2);
  CHECK(filled.spans()[0] == TimeSpan(0.0, 2.0));  // 0.1 s gap filled
  CHECK(filled.spans()[1] == TimeSpan(5.0, 6.0));  // 0.1 s island dropped

  // Policy order matters when a short island sits near a long region.
  Timeline chain({{0.0, 1.0}, {1.1, 1.2}, {1.3, 2.3}});
  Timeline fill_first = postprocess(chain, 0.25, GapPolicy::kFillGapsFirst);
  REQUIRE(fill_first.size() == 1);
  CHECK(fill_first.spans()[0] == TimeSpan(0.0, 2.3));
  // Dropping first loses the island, and the widened 0.3 s gap then stays.
  Timeline drop_first = postprocess(chain, 0.25, GapPolicy::kDropIslandsFirst);
  REQUIRE(drop_first.size() == 2);
  CHECK(drop_first.spans()[0] == TimeSpan(0.0, 1.0));
  CHECK(drop_first.spans()[1] == TimeSpan(1.3, 2.3));

  Timeline islands({{0.0, 0.1}, {0.2, 0.3}});
  CHECK(postprocess(islands, 0.25, GapPolicy::kDropIslandsFirst).empty());
  // Filling first welds the islands into something long enough to survive.
  Timeline welded = postprocess(islands, 0.25, GapPolicy::kFillGapsFirst);
  REQUIRE(welded.size() == 1);
  CHECK(welded.spans()[0] == TimeSpan(0.0, 0.3));

  // Boundary cases: a region or gap of exactly min_duration survives.
  Timeline exact({{0.0, 0.25}, {0.5, 1.0}});
  CHECK(postprocess(exact, 0.25, GapPolicy::kFillGapsFirst) == exact);
  CHECK(postprocess(Timeline(), 0.25, GapPolicy::kFillGapsFirst).empty());
  CHECK_THROWS_AS(postprocess(exact, -1.0, GapPolicy::kFillGapsFirst),
                  InputError);
}

TEST_CASE("postprocess output obeys its own floor and is idempotent") {
  SplitMix64 rng(33);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<TimeSpan> spans;
    double t = rng.uniform(0.0, 0.4);
    int n = 1 + static_cast<int>(rng.next_below(12));
    for (int i = 0; i < n; ++i) {
      double len = rng.uniform(0.01, 0.8);
      spans.emplace_back(t, t + len);
      t += len + rng.uniform(0.01, 0.8);
    }
    GapPolicy policy = trial % 2 == 0 ? GapPolicy::kFillGapsFirst
                                      : GapPolicy::kDropIslandsFirst;
    Timeline cleaned = postprocess(Timeline(spans), 0.25, policy);
    for (std::size_t i = 0; i < cleaned.size(); ++i) {
      CHECK(cleaned.spans()[i].duration() >= 0.25 - 1e-12);
      if (i > 0)
        CHECK(cleaned.spans()[i].start - cleaned.spans()[i - 1].end >=
              0.25 - 1e-12);
    }
    CHECK(postprocess(cleaned, 0.25, policy) == cleaned);
  }
}
