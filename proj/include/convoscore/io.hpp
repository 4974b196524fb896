#ifndef CONVOSCORE_IO_HPP
#define CONVOSCORE_IO_HPP

#include <string>
#include <vector>

#include "convoscore/clustering.hpp"
#include "convoscore/timeline.hpp"
#include "convoscore/vad.hpp"

namespace convoscore {

// All times cross file boundaries at microsecond resolution: parsers round
// to 1 us, writers print 6 decimals, so write -> parse is lossless.
double round_us(double seconds);
std::string format_seconds(double seconds);

// RTTM speaker records: one
//   SPEAKER <recording> <channel> <onset> <duration> <NA> <NA> <label> <NA> <NA>
// line per segment. Parsing groups lines by recording id (result sorted by
// id); blank lines and ";;" comments are skipped.
std::vector<Annotation> parse_rttm(const std::string& text);
std::string write_rttm(const std::vector<Annotation>& annotations);

// Rich segment records: one JSON object per line with fields recording_id,
// start, end, speaker and optional emotion / words. The writer emits
// canonical lines (fixed field order, 6-decimal times).
std::vector<Annotation> parse_rich(const std::string& text);
std::string write_rich(const std::vector<Annotation>& annotations);

// Frame posterior windows: one "start,frame_period,p0,p1,..." line per
// window. Lines starting with '#' are skipped.
std::vector<FramePosteriorTrack> parse_posteriors(const std::string& text);
std::string write_posteriors(const std::vector<FramePosteriorTrack>& tracks);

// Embedding windows: one "start,end,v0,...,v{d-1}" line per window. All
// lines must share one dimension and window starts must strictly increase.
std::vector<EmbeddingWindow> parse_embeddings(const std::string& text);
std::string write_embeddings(const std::vector<EmbeddingWindow>& windows);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace convoscore

#endif  // CONVOSCORE_IO_HPP
