#ifndef CONVOSCORE_REPORT_HPP
#define CONVOSCORE_REPORT_HPP

#include <string>
#include <vector>

#include "convoscore/metrics.hpp"

namespace convoscore {

// Per-recording result rows. Report builders append a TOTAL row that
// micro-averages: components are summed across recordings and the rate is
// taken once over the sums. Callers pass rows sorted by recording id.

struct DurationRow {
  std::string recording_id;
  MetricReport report;
};

struct VadRow {
  std::string recording_id;
  VadScore score;
};

struct WerRow {
  std::string recording_id;
  WerReport report;
};

struct AccRow {
  std::string recording_id;
  EmotionEval eval;
};

struct JointRow {
  std::string recording_id;
  WerReport cpwer;
  MetricReport steer;
  MetricReport teer;
};

// Human reports are aligned text tables headed by `title`. Machine reports
// are one JSON object per line; duration records carry exactly the fields
// recording_id, MS, FA, CONF, TOTAL, rate (plus the metric name).

std::string human_duration_report(const std::string& title,
                                  const std::vector<DurationRow>& rows);
std::string machine_duration_report(const std::string& metric,
                                    const std::vector<DurationRow>& rows);

std::string human_vad_report(const std::string& title,
                             const std::vector<VadRow>& rows,
                             FarDenominator denominator);
std::string machine_vad_report(const std::vector<VadRow>& rows,
                               FarDenominator denominator);

std::string human_wer_report(const std::string& title,
                             const std::vector<WerRow>& rows);
std::string machine_wer_report(const std::string& metric,
                               const std::vector<WerRow>& rows);

std::string human_acc_report(const std::string& title,
                             const std::vector<AccRow>& rows);
std::string machine_acc_report(const std::vector<AccRow>& rows);

std::string human_joint_report(const std::string& title,
                               const std::vector<JointRow>& rows);
std::string machine_joint_report(const std::vector<JointRow>& rows);

}  // namespace convoscore

#endif  // CONVOSCORE_REPORT_HPP
