#pragma once

// Uniformly sampled closed-loop records and their CSV round-trip. Values
// are written with full precision so a re-read reproduces the run bitwise.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace maglev {

/// One sample of everything the harness knows at time t. Estimates are the
/// values the controller saw at this sample; u = u_C + s always.
struct Record {
  double t = 0.0;
  double x1 = 0.0, x2 = 0.0, x3 = 0.0;  ///< true plant state
  double y = 0.0;                       ///< measured output (noise included)
  double i = 0.0;                       ///< true coil current
  double u = 0.0;                       ///< applied input u_C + s
  double u_C = 0.0;                     ///< controller output after saturation
  double s = 0.0;                       ///< probing component
  double y_v_hat = 0.0;                 ///< virtual-output estimate
  double x1_hat = 0.0, x2_hat = 0.0, x3_hat = 0.0;
  double R_hat = 0.0;
  double theta2_hat = 0.0;
  double Y = 0.0;       ///< virtual-output regression signal
  double q_star = 0.0;  ///< active position reference
  double pe = 0.0;      ///< trailing excitation integral of i^2
};

inline constexpr std::size_t kRecordFields = 18;

[[nodiscard]] const std::array<std::string, kRecordFields>& record_columns();

[[nodiscard]] std::array<double, kRecordFields> record_values(
    const Record& r);
[[nodiscard]] Record record_from_values(
    const std::array<double, kRecordFields>& v);

struct TrajectoryLog {
  std::vector<Record> records;
  double sample_step = 0.0;  ///< time between consecutive records

  [[nodiscard]] bool empty() const { return records.empty(); }
  [[nodiscard]] std::size_t size() const { return records.size(); }
  [[nodiscard]] const Record& back() const { return records.back(); }
};

/// Writes the log as CSV with a header row; throws on I/O failure.
void export_csv(const TrajectoryLog& log, const std::string& path);

/// Reads a CSV produced by export_csv; validates the header.
[[nodiscard]] TrajectoryLog import_csv(const std::string& path);

}  // namespace maglev
