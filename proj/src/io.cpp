#include "convoscore/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "convoscore/errors.hpp"

namespace convoscore {

namespace {

using nlohmann::json;

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream stream(text);
  while (std::getline(stream, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t") == std::string::npos;
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.push_back("");
  return fields;
}

double parse_number(const std::string& field, const std::string& where,
                    int column) {
  const char* begin = field.c_str();
  char* end = nullptr;
  double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(value))
    throw InputError(where + ": bad number '" + field + "' (column " +
                     std::to_string(column) + ")");
  return value;
}

void check_token(const std::string& token, const char* what) {
  if (token.empty())
    throw InputError(std::string("cannot write an empty ") + what);
  if (token.find_first_of(" \t\r\n") != std::string::npos)
    throw InputError(std::string("cannot write ") + what + " '" + token +
                     "' containing whitespace");
}

std::string format_value(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::vector<Annotation> group_segments(
    std::map<std::string, std::vector<RichSegment>> by_recording) {
  std::vector<Annotation> annotations;
  annotations.reserve(by_recording.size());
  for (auto& [recording_id, segments] : by_recording)
    annotations.emplace_back(recording_id, std::move(segments));
  return annotations;
}

}  // namespace

double round_us(double seconds) { return std::round(seconds * 1e6) / 1e6; }

std::string format_seconds(double seconds) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", seconds);
  return buf;
}

std::vector<Annotation> parse_rttm(const std::string& text) {
  std::map<std::string, std::vector<RichSegment>> by_recording;
  const std::vector<std::string> lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (is_blank(line) || line.rfind(";;", 0) == 0) continue;
    const std::string where = "rttm line " + std::to_string(i + 1);

    std::vector<std::string> fields;
    std::istringstream stream(line);
    std::string field;
    while (stream >> field) fields.push_back(field);
    if (fields.size() != 10)
      throw InputError(where + ": expected 10 fields, got " +
                       std::to_string(fields.size()));
    if (fields[0] != "SPEAKER")
      throw InputError(where + ": expected a SPEAKER record, got '" +
                       fields[0] + "'");

    double onset = round_us(parse_number(fields[3], where, 4));
    double duration = round_us(parse_number(fields[4], where, 5));
    if (onset < 0.0)
      throw InputError(where + ": negative onset");
    if (duration <= 0.0)
      throw InputError(where + ": duration must be positive");

    by_recording[fields[1]].emplace_back(TimeSpan(onset, onset + duration),
                                         fields[7]);
  }
  return group_segments(std::move(by_recording));
}

std::string write_rttm(const std::vector<Annotation>& annotations) {
  std::string out;
  for (const Annotation& a : annotations) {
    check_token(a.recording_id(), "recording id");
    for (const RichSegment& seg : a.segments()) {
      check_token(seg.speaker, "speaker label");
      out += "SPEAKER " + a.recording_id() + " 1 " +
             format_seconds(seg.span.start) + " " +
             format_seconds(seg.span.duration()) + " <NA> <NA> " +
             seg.speaker + " <NA> <NA>\n";
    }
  }
  return out;
}

std::vector<Annotation> parse_rich(const std::string& text) {
  std::map<std::string, std::vector<RichSegment>> by_recording;
  const std::vector<std::string> lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (is_blank(line)) continue;
    const std::string where = "rich line " + std::to_string(i + 1);

    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw InputError(where + ": " + e.what());
    }
    if (!record.is_object())
      throw InputError(where + ": expected a JSON object");

    static const char* const known[] = {"recording_id", "start", "end",
                                        "speaker", "emotion", "words"};
    for (const auto& [key, value] : record.items()) {
      bool ok = false;
      for (const char* k : known) ok = ok || key == k;
      if (!ok) throw InputError(where + ": unknown field '" + key + "'");
    }
    for (const char* required : {"recording_id", "start", "end", "speaker"})
      if (!record.contains(required))
        throw InputError(where + ": missing field '" + required + "'");
    if (!record["recording_id"].is_string() || !record["speaker"].is_string())
      throw InputError(where + ": recording_id and speaker must be strings");
    if (!record["start"].is_number() || !record["end"].is_number())
      throw InputError(where + ": start and end must be numbers");

    double start = round_us(record["start"].get<double>());
    double end = round_us(record["end"].get<double>());
    if (start < 0.0) throw InputError(where + ": negative start");
    if (end <= start) throw InputError(where + ": end must exceed start");

    std::optional<EmotionLabel> emotion;
    if (record.contains("emotion")) {
      if (!record["emotion"].is_string())
        throw InputError(where + ": emotion must be a string");
      emotion = emotion_from_string(record["emotion"].get<std::string>());
      if (!emotion)
        throw InputError(where + ": unknown emotion '" +
                         record["emotion"].get<std::string>() + "'");
    }
    std::optional<std::string> words;
    if (record.contains("words")) {
      if (!record["words"].is_string())
        throw InputError(where + ": words must be a string");
      words = record["words"].get<std::string>();
    }
    std::string speaker = record["speaker"].get<std::string>();
    if (speaker.empty()) throw InputError(where + ": empty speaker label");

    by_recording[record["recording_id"].get<std::string>()].emplace_back(
        TimeSpan(start, end), std::move(speaker), emotion, std::move(words));
  }
  return group_segments(std::move(by_recording));
}

std::string write_rich(const std::vector<Annotation>& annotations) {
  std::string out;
  for (const Annotation& a : annotations) {
    for (const RichSegment& seg : a.segments()) {
      out += "{\"recording_id\":" + json(a.recording_id()).dump() +
             ",\"start\":" + format_seconds(seg.span.start) +
             ",\"end\":" + format_seconds(seg.span.end) +
             ",\"speaker\":" + json(seg.speaker).dump();
      if (seg.emotion)
        out += std::string(",\"emotion\":\"") + to_string(*seg.emotion) + "\"";
      if (seg.words) out += ",\"words\":" + json(*seg.words).dump();
      out += "}\n";
    }
  }
  return out;
}

std::vector<FramePosteriorTrack> parse_posteriors(const std::string& text) {
  std::vector<FramePosteriorTrack> tracks;
  double prev_start = -1.0;
  const std::vector<std::string> lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (is_blank(line) || line[0] == '#') continue;
    const std::string where = "posteriors line " + std::to_string(i + 1);

    std::vector<std::string> fields = split_fields(line, ',');
    if (fields.size() < 3)
      throw InputError(where + ": expected start,frame_period and at least "
                       "one probability");

    double start = round_us(parse_number(fields[0], where, 1));
    double period = round_us(parse_number(fields[1], where, 2));
    if (start < 0.0) throw InputError(where + ": negative start");
    if (period <= 0.0)
      throw InputError(where + ": frame period must be positive");
    if (start <= prev_start)
      throw InputError(where + ": window starts must increase");
    prev_start = start;

    std::vector<double> probs;
    probs.reserve(fields.size() - 2);
    for (std::size_t f = 2; f < fields.size(); ++f) {
      double p = parse_number(fields[f], where, static_cast<int>(f + 1));
      if (p < 0.0 || p > 1.0)
        throw InputError(where + ": probability " + fields[f] +
                         " out of range (column " + std::to_string(f + 1) +
                         ")");
      probs.push_back(p);
    }
    double end = start + static_cast<double>(probs.size()) * period;
    tracks.emplace_back(TimeSpan(start, end), period, std::move(probs));
  }
  return tracks;
}

std::string write_posteriors(const std::vector<FramePosteriorTrack>& tracks) {
  std::string out;
  for (const FramePosteriorTrack& track : tracks) {
    out += format_seconds(track.window_span.start) + "," +
           format_seconds(track.frame_period);
    for (double p : track.probs) out += "," + format_value(p);
    out += "\n";
  }
  return out;
}

std::vector<EmbeddingWindow> parse_embeddings(const std::string& text) {
  std::vector<EmbeddingWindow> windows;
  std::size_t dim = 0;
  double prev_start = -1.0;
  const std::vector<std::string> lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (is_blank(line) || line[0] == '#') continue;
    const std::string where = "embeddings line " + std::to_string(i + 1);

    std::vector<std::string> fields = split_fields(line, ',');
    if (fields.size() < 3)
      throw InputError(where +
                       ": expected start,end and at least one component");

    double start = round_us(parse_number(fields[0], where, 1));
    double end = round_us(parse_number(fields[1], where, 2));
    if (start < 0.0) throw InputError(where + ": negative start");
    if (end <= start) throw InputError(where + ": end must exceed start");
    if (start <= prev_start)
      throw InputError(where + ": window starts must increase");
    prev_start = start;

    std::vector<double> vec;
    vec.reserve(fields.size() - 2);
    for (std::size_t f = 2; f < fields.size(); ++f)
      vec.push_back(parse_number(fields[f], where, static_cast<int>(f + 1)));
    if (dim == 0) {
      dim = vec.size();
    } else if (vec.size() != dim) {
      throw InputError(where + ": expected " + std::to_string(dim) +
                       " components, got " + std::to_string(vec.size()));
    }
    windows.emplace_back(TimeSpan(start, end), std::move(vec));
  }
  return windows;
}

std::string write_embeddings(const std::vector<EmbeddingWindow>& windows) {
  std::string out;
  for (const EmbeddingWindow& w : windows) {
    out += format_seconds(w.span.start) + "," + format_seconds(w.span.end);
    for (double v : w.vec) out += "," + format_value(v);
    out += "\n";
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream stream(path, std::ios::binary);
  if (!stream) throw InputError("cannot read file: " + path);
  std::ostringstream content;
  content << stream.rdbuf();
  return content.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream stream(path, std::ios::binary);
  if (!stream) throw InputError("cannot write file: " + path);
  stream << content;
  if (!stream) throw InputError("cannot write file: " + path);
}

}  // namespace convoscore
