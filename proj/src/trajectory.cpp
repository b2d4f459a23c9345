#include "maglev/trajectory.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace maglev {

const std::array<std::string, kRecordFields>& record_columns() {
  static const std::array<std::string, kRecordFields> cols = {
      "t",     "x1",     "x2",     "x3",     "y",          "i",
      "u",     "u_C",    "s",      "y_v_hat", "x1_hat",    "x2_hat",
      "x3_hat", "R_hat", "theta2_hat", "Y",  "q_star",     "pe"};
  return cols;
}

std::array<double, kRecordFields> record_values(const Record& r) {
  return {r.t,      r.x1,    r.x2,     r.x3,         r.y, r.i,
          r.u,      r.u_C,   r.s,      r.y_v_hat,    r.x1_hat, r.x2_hat,
          r.x3_hat, r.R_hat, r.theta2_hat, r.Y,      r.q_star, r.pe};
}

Record record_from_values(const std::array<double, kRecordFields>& v) {
  Record r;
  r.t = v[0];
  r.x1 = v[1];
  r.x2 = v[2];
  r.x3 = v[3];
  r.y = v[4];
  r.i = v[5];
  r.u = v[6];
  r.u_C = v[7];
  r.s = v[8];
  r.y_v_hat = v[9];
  r.x1_hat = v[10];
  r.x2_hat = v[11];
  r.x3_hat = v[12];
  r.R_hat = v[13];
  r.theta2_hat = v[14];
  r.Y = v[15];
  r.q_star = v[16];
  r.pe = v[17];
  return r;
}

void export_csv(const TrajectoryLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);

  const auto& cols = record_columns();
  for (std::size_t c = 0; c < cols.size(); ++c)
    out << (c ? "," : "") << cols[c];
  out << "\n";

  char buf[32];
  for (const Record& r : log.records) {
    const auto vals = record_values(r);
    for (std::size_t c = 0; c < vals.size(); ++c) {
      // %.17g keeps every double exactly recoverable
      std::snprintf(buf, sizeof buf, "%.17g", vals[c]);
      if (c) out << ',';
      out << buf;
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

TrajectoryLog import_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ": empty file");
  {
    std::stringstream header(line);
    std::string name;
    const auto& cols = record_columns();
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (!std::getline(header, name, ','))
        throw std::runtime_error(path + ": truncated header");
      if (name != cols[c])
        throw std::runtime_error(path + ": unexpected column '" + name +
                                 "', wanted '" + cols[c] + "'");
    }
  }

  TrajectoryLog log;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::array<double, kRecordFields> vals{};
    const char* p = line.c_str();
    for (std::size_t c = 0; c < vals.size(); ++c) {
      char* end = nullptr;
      errno = 0;
      vals[c] = std::strtod(p, &end);
      if (end == p || errno != 0)
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": bad number in column " +
                                 std::to_string(c + 1));
      p = end;
      if (c + 1 < vals.size()) {
        if (*p != ',')
          throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                   ": expected ',' after column " +
                                   std::to_string(c + 1));
        ++p;
      }
    }
    log.records.push_back(record_from_values(vals));
  }
  if (log.records.size() >= 2)
    log.sample_step = log.records[1].t - log.records[0].t;
  return log;
}

}  // namespace maglev
