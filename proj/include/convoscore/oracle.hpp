#ifndef CONVOSCORE_ORACLE_HPP
#define CONVOSCORE_ORACLE_HPP

#include "convoscore/metrics.hpp"
#include "convoscore/timeline.hpp"

namespace convoscore {

struct OracleScores {
  MetricReport der;
  MetricReport teer;
  MetricReport steer;
  double far = 0.0;            // false alarm over reference speech
  double far_nonspeech = 0.0;  // false alarm over reference non-speech
  double msr = 0.0;
};

// Brute-force recomputation of every duration metric on a quantized time
// grid: time is sampled at cell centers, the speaker mapping is found by
// exhaustive search over all bijections, and every count is a plain frame
// tally. Deliberately shares none of the interval algebra or assignment
// machinery the production metrics use, so agreement between the two is
// meaningful evidence.
//
// Requires grid <= 0.01 s, at most 4 speakers per side, and emotion labels
// on every reference segment.
OracleScores frame_grid_oracle(const Annotation& ref, const Annotation& hyp,
                               double collar, double grid = 0.01);

}  // namespace convoscore

#endif  // CONVOSCORE_ORACLE_HPP
