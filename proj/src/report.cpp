#include "convoscore/report.hpp"

#include <algorithm>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "convoscore/io.hpp"

namespace convoscore {

namespace {

std::string quote(const std::string& s) { return nlohmann::json(s).dump(); }

std::string format_rate(double rate) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9f", rate);
  return buf;
}

std::string format_percent(double rate) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", rate * 100.0);
  return buf;
}

template <typename Row>
int id_width(const std::vector<Row>& rows) {
  std::size_t width = 9;  // fits "recording" and "TOTAL"
  for (const Row& row : rows) width = std::max(width, row.recording_id.size());
  return static_cast<int>(width);
}

std::string pad(const std::string& s, int width) {
  std::string out = s;
  while (static_cast<int>(out.size()) < width) out += ' ';
  return out;
}

std::string rpad(const std::string& s, int width) {
  std::string out;
  while (static_cast<int>(out.size() + s.size()) < width) out += ' ';
  return out + s;
}

MetricReport sum_reports(const std::vector<DurationRow>& rows) {
  MetricReport total;
  for (const DurationRow& row : rows) {
    total.missed += row.report.missed;
    total.false_alarm += row.report.false_alarm;
    total.confusion += row.report.confusion;
    total.total += row.report.total;
  }
  return total;
}

VadScore sum_scores(const std::vector<VadRow>& rows,
                    FarDenominator denominator) {
  VadScore total;
  for (const VadRow& row : rows) {
    total.missed += row.score.missed;
    total.false_alarm += row.score.false_alarm;
    total.ref_speech += row.score.ref_speech;
    total.ref_nonspeech += row.score.ref_nonspeech;
  }
  total.msr = total.ref_speech > 0.0 ? total.missed / total.ref_speech : 0.0;
  const double denom = denominator == FarDenominator::kSpeech
                           ? total.ref_speech
                           : total.ref_nonspeech;
  total.far = denom > 0.0 ? total.false_alarm / denom : 0.0;
  return total;
}

WerReport sum_wer(const std::vector<WerRow>& rows) {
  WerReport total;
  for (const WerRow& row : rows) {
    total.substitutions += row.report.substitutions;
    total.deletions += row.report.deletions;
    total.insertions += row.report.insertions;
    total.ref_words += row.report.ref_words;
  }
  return total;
}

EmotionEval sum_evals(const std::vector<AccRow>& rows) {
  EmotionEval total;
  for (const AccRow& row : rows) {
    for (int r = 0; r < kNumEmotions; ++r)
      for (int h = 0; h < kNumEmotions; ++h)
        total.confusion[r][h] += row.eval.confusion[r][h];
    total.total += row.eval.total;
    total.correct += row.eval.correct;
  }
  total.accuracy =
      total.total > 0 ? static_cast<double>(total.correct) / total.total : 0.0;
  std::int64_t total4 = 0, correct4 = 0;
  for (int r = 0; r < 4; ++r) {
    for (int h = 0; h < kNumEmotions; ++h) total4 += total.confusion[r][h];
    correct4 += total.confusion[r][r];
  }
  total.accuracy_4way =
      total4 > 0 ? static_cast<double>(correct4) / total4 : 0.0;
  for (int r = 0; r < kNumEmotions; ++r) {
    std::int64_t row_sum = 0;
    for (int h = 0; h < kNumEmotions; ++h) row_sum += total.confusion[r][h];
    for (int h = 0; h < kNumEmotions; ++h)
      total.confusion_normalized[r][h] =
          row_sum > 0 ? static_cast<double>(total.confusion[r][h]) / row_sum
                      : 0.0;
  }
  return total;
}

std::string duration_line(const std::string& id, const MetricReport& r,
                          int width) {
  return pad(id, width) + rpad(format_seconds(r.missed), 13) +
         rpad(format_seconds(r.false_alarm), 13) +
         rpad(format_seconds(r.confusion), 13) +
         rpad(format_seconds(r.total), 13) + rpad(format_percent(r.rate()), 9) +
         "\n";
}

std::string duration_record(const std::string& metric, const std::string& id,
                            const MetricReport& r) {
  return "{\"metric\":" + quote(metric) + ",\"recording_id\":" + quote(id) +
         ",\"MS\":" + format_seconds(r.missed) +
         ",\"FA\":" + format_seconds(r.false_alarm) +
         ",\"CONF\":" + format_seconds(r.confusion) +
         ",\"TOTAL\":" + format_seconds(r.total) +
         ",\"rate\":" + format_rate(r.rate()) + "}\n";
}

const char* kEmotionNames[kNumEmotions] = {"happy", "sad",   "angry",
                                           "neutral", "other", "NMA"};

std::string confusion_table(const EmotionEval& eval) {
  std::string out = "confusion (rows = reference):\n";
  out += pad("", 9);
  for (int h = 0; h < kNumEmotions; ++h) out += rpad(kEmotionNames[h], 9);
  out += "\n";
  for (int r = 0; r < kNumEmotions; ++r) {
    out += pad(kEmotionNames[r], 9);
    for (int h = 0; h < kNumEmotions; ++h)
      out += rpad(std::to_string(eval.confusion[r][h]), 9);
    out += "\n";
  }
  out += "row-normalized:\n";
  out += pad("", 9);
  for (int h = 0; h < kNumEmotions; ++h) out += rpad(kEmotionNames[h], 9);
  out += "\n";
  for (int r = 0; r < kNumEmotions; ++r) {
    out += pad(kEmotionNames[r], 9);
    for (int h = 0; h < kNumEmotions; ++h) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%.3f", eval.confusion_normalized[r][h]);
      out += rpad(buf, 9);
    }
    out += "\n";
  }
  return out;
}

}  // namespace

std::string human_duration_report(const std::string& title,
                                  const std::vector<DurationRow>& rows) {
  const int width = id_width(rows);
  std::string out = "# " + title + "\n";
  out += pad("recording", width) + rpad("MS", 13) + rpad("FA", 13) +
         rpad("CONF", 13) + rpad("TOTAL", 13) + rpad("rate%", 9) + "\n";
  for (const DurationRow& row : rows)
    out += duration_line(row.recording_id, row.report, width);
  out += duration_line("TOTAL", sum_reports(rows), width);
  return out;
}

std::string machine_duration_report(const std::string& metric,
                                    const std::vector<DurationRow>& rows) {
  std::string out;
  for (const DurationRow& row : rows)
    out += duration_record(metric, row.recording_id, row.report);
  out += duration_record(metric, "TOTAL", sum_reports(rows));
  return out;
}

std::string human_vad_report(const std::string& title,
                             const std::vector<VadRow>& rows,
                             FarDenominator denominator) {
  const int width = id_width(rows);
  std::string out = "# " + title + "\n";
  out += pad("recording", width) + rpad("missed", 13) + rpad("false_alarm", 13) +
         rpad("ref_speech", 13) + rpad("FAR%", 9) + rpad("MSR%", 9) + "\n";
  auto line = [&](const std::string& id, const VadScore& s) {
    return pad(id, width) + rpad(format_seconds(s.missed), 13) +
           rpad(format_seconds(s.false_alarm), 13) +
           rpad(format_seconds(s.ref_speech), 13) +
           rpad(format_percent(s.far), 9) + rpad(format_percent(s.msr), 9) +
           "\n";
  };
  for (const VadRow& row : rows) out += line(row.recording_id, row.score);
  out += line("TOTAL", sum_scores(rows, denominator));
  return out;
}

std::string machine_vad_report(const std::vector<VadRow>& rows,
                               FarDenominator denominator) {
  auto record = [](const std::string& id, const VadScore& s) {
    return "{\"metric\":\"vad\",\"recording_id\":" + quote(id) +
           ",\"MS\":" + format_seconds(s.missed) +
           ",\"FA\":" + format_seconds(s.false_alarm) +
           ",\"ref_speech\":" + format_seconds(s.ref_speech) +
           ",\"ref_nonspeech\":" + format_seconds(s.ref_nonspeech) +
           ",\"FAR\":" + format_rate(s.far) +
           ",\"MSR\":" + format_rate(s.msr) + "}\n";
  };
  std::string out;
  for (const VadRow& row : rows) out += record(row.recording_id, row.score);
  out += record("TOTAL", sum_scores(rows, denominator));
  return out;
}

std::string human_wer_report(const std::string& title,
                             const std::vector<WerRow>& rows) {
  const int width = id_width(rows);
  std::string out = "# " + title + "\n";
  out += pad("recording", width) + rpad("S", 8) + rpad("D", 8) + rpad("I", 8) +
         rpad("ref_words", 11) + rpad("rate%", 9) + "\n";
  auto line = [&](const std::string& id, const WerReport& r) {
    return pad(id, width) + rpad(std::to_string(r.substitutions), 8) +
           rpad(std::to_string(r.deletions), 8) +
           rpad(std::to_string(r.insertions), 8) +
           rpad(std::to_string(r.ref_words), 11) +
           rpad(format_percent(r.rate()), 9) + "\n";
  };
  for (const WerRow& row : rows) out += line(row.recording_id, row.report);
  out += line("TOTAL", sum_wer(rows));
  return out;
}

std::string machine_wer_report(const std::string& metric,
                               const std::vector<WerRow>& rows) {
  auto record = [&](const std::string& id, const WerReport& r) {
    return "{\"metric\":" + quote(metric) + ",\"recording_id\":" + quote(id) +
           ",\"substitutions\":" + std::to_string(r.substitutions) +
           ",\"deletions\":" + std::to_string(r.deletions) +
           ",\"insertions\":" + std::to_string(r.insertions) +
           ",\"ref_words\":" + std::to_string(r.ref_words) +
           ",\"rate\":" + format_rate(r.rate()) + "}\n";
  };
  std::string out;
  for (const WerRow& row : rows) out += record(row.recording_id, row.report);
  out += record("TOTAL", sum_wer(rows));
  return out;
}

std::string human_acc_report(const std::string& title,
                             const std::vector<AccRow>& rows) {
  const int width = id_width(rows);
  std::string out = "# " + title + "\n";
  out += pad("recording", width) + rpad("utts", 8) + rpad("correct", 9) +
         rpad("acc%", 9) + rpad("acc4%", 9) + "\n";
  auto line = [&](const std::string& id, const EmotionEval& e) {
    return pad(id, width) + rpad(std::to_string(e.total), 8) +
           rpad(std::to_string(e.correct), 9) +
           rpad(format_percent(e.accuracy), 9) +
           rpad(format_percent(e.accuracy_4way), 9) + "\n";
  };
  for (const AccRow& row : rows) out += line(row.recording_id, row.eval);
  EmotionEval total = sum_evals(rows);
  out += line("TOTAL", total);
  out += confusion_table(total);
  return out;
}

std::string machine_acc_report(const std::vector<AccRow>& rows) {
  auto record = [](const std::string& id, const EmotionEval& e) {
    return "{\"metric\":\"acc\",\"recording_id\":" + quote(id) +
           ",\"total\":" + std::to_string(e.total) +
           ",\"correct\":" + std::to_string(e.correct) +
           ",\"accuracy\":" + format_rate(e.accuracy) +
           ",\"accuracy_4way\":" + format_rate(e.accuracy_4way);
  };
  std::string out;
  for (const AccRow& row : rows)
    out += record(row.recording_id, row.eval) + "}\n";

  EmotionEval total = sum_evals(rows);
  out += record("TOTAL", total) + ",\"confusion\":[";
  for (int r = 0; r < kNumEmotions; ++r) {
    out += r == 0 ? "[" : ",[";
    for (int h = 0; h < kNumEmotions; ++h) {
      if (h > 0) out += ",";
      out += std::to_string(total.confusion[r][h]);
    }
    out += "]";
  }
  out += "],\"confusion_normalized\":[";
  for (int r = 0; r < kNumEmotions; ++r) {
    out += r == 0 ? "[" : ",[";
    for (int h = 0; h < kNumEmotions; ++h) {
      if (h > 0) out += ",";
      out += format_rate(total.confusion_normalized[r][h]);
    }
    out += "]";
  }
  out += "]}\n";
  return out;
}

std::string human_joint_report(const std::string& title,
                               const std::vector<JointRow>& rows) {
  const int width = id_width(rows);
  std::string out = "# " + title + "\n";
  out += pad("recording", width) + rpad("cpWER%", 9) + rpad("sTEER%", 9) +
         rpad("TEER%", 9) + "\n";
  auto line = [&](const std::string& id, const WerReport& w,
                  const MetricReport& s, const MetricReport& t) {
    return pad(id, width) + rpad(format_percent(w.rate()), 9) +
           rpad(format_percent(s.rate()), 9) +
           rpad(format_percent(t.rate()), 9) + "\n";
  };
  for (const JointRow& row : rows)
    out += line(row.recording_id, row.cpwer, row.steer, row.teer);

  std::vector<WerRow> wer_rows;
  std::vector<DurationRow> steer_rows, teer_rows;
  for (const JointRow& row : rows) {
    wer_rows.push_back({row.recording_id, row.cpwer});
    steer_rows.push_back({row.recording_id, row.steer});
    teer_rows.push_back({row.recording_id, row.teer});
  }
  out += line("TOTAL", sum_wer(wer_rows), sum_reports(steer_rows),
              sum_reports(teer_rows));
  return out;
}

std::string machine_joint_report(const std::vector<JointRow>& rows) {
  auto record = [](const std::string& id, const WerReport& w,
                   const MetricReport& s, const MetricReport& t) {
    return "{\"metric\":\"joint\",\"recording_id\":" + quote(id) +
           ",\"cpwer\":" + format_rate(w.rate()) +
           ",\"steer\":" + format_rate(s.rate()) +
           ",\"teer\":" + format_rate(t.rate()) + "}\n";
  };
  std::string out;
  for (const JointRow& row : rows)
    out += record(row.recording_id, row.cpwer, row.steer, row.teer);

  std::vector<WerRow> wer_rows;
  std::vector<DurationRow> steer_rows, teer_rows;
  for (const JointRow& row : rows) {
    wer_rows.push_back({row.recording_id, row.cpwer});
    steer_rows.push_back({row.recording_id, row.steer});
    teer_rows.push_back({row.recording_id, row.teer});
  }
  out += record("TOTAL", sum_wer(wer_rows), sum_reports(steer_rows),
                sum_reports(teer_rows));
  return out;
}

}  // namespace convoscore
