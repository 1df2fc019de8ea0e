#include "ransim/mobility_trace.h"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "ransim/bearer_switching.h"

namespace ransim {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

} // namespace

MobilityTrace parse_mobility_trace(const std::string& text, const std::string& origin) {
  std::istringstream stream(text);
  std::string line;
  if (!std::getline(stream, line)) {
    fail(ErrorCode::ColumnMismatch, origin + ": empty trace");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header = split_csv(line);
  static const char* fixed[] = {"time_us", "ue_id", "x_km", "y_km"};
  if (header.size() < 5) {
    fail(ErrorCode::ColumnMismatch, origin + ": header needs at least one rsrp column");
  }
  for (std::size_t i = 0; i < 4; ++i) {
    if (header[i] != fixed[i]) {
      fail(ErrorCode::ColumnMismatch,
           origin + ": column " + std::to_string(i + 1) + " must be " + fixed[i]);
    }
  }

  MobilityTrace trace;
  for (std::size_t i = 4; i < header.size(); ++i) {
    const std::string& col = header[i];
    const std::string prefix = "rsrp_dbm_";
    if (col.rfind(prefix, 0) != 0) {
      fail(ErrorCode::ColumnMismatch, origin + ": column " + col +
                                          " must be rsrp_dbm_<cellid>");
    }
    try {
      trace.cell_ids.push_back(std::stoi(col.substr(prefix.size())));
    } catch (const std::exception&) {
      fail(ErrorCode::ColumnMismatch, origin + ": bad cell id in column " + col);
    }
  }

  std::map<int, Usec> last_time;
  int line_number = 1;
  while (std::getline(stream, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells = split_csv(line);
    if (cells.size() != header.size()) {
      fail(ErrorCode::ColumnMismatch,
           origin + " line " + std::to_string(line_number) + ": expected " +
               std::to_string(header.size()) + " columns, got " +
               std::to_string(cells.size()));
    }
    Waypoint wp;
    try {
      wp.time_us = std::stoll(cells[0]);
      wp.ue_id = std::stoi(cells[1]);
      wp.x_km = std::stod(cells[2]);
      wp.y_km = std::stod(cells[3]);
      for (std::size_t i = 0; i < trace.cell_ids.size(); ++i) {
        wp.rsrp_dbm[trace.cell_ids[i]] = std::stod(cells[4 + i]);
      }
    } catch (const std::exception&) {
      fail(ErrorCode::ColumnMismatch,
           origin + " line " + std::to_string(line_number) + ": unparsable value");
    }
    auto [it, inserted] = last_time.emplace(wp.ue_id, wp.time_us);
    if (!inserted) {
      if (wp.time_us < it->second) {
        fail(ErrorCode::NonMonotoneTime,
             origin + " line " + std::to_string(line_number) + ": ue " +
                 std::to_string(wp.ue_id) + " goes back in time");
      }
      it->second = wp.time_us;
    }
    for (const auto& [cell, rsrp] : wp.rsrp_dbm) {
      if (!std::isfinite(rsrp) || rsrp < kRsrpMinDbm || rsrp > kRsrpMaxDbm) {
        fail(ErrorCode::InvalidValue,
             origin + " line " + std::to_string(line_number) + ": rsrp " +
                 std::to_string(rsrp) + " outside reporting range");
      }
    }
    trace.waypoints.push_back(std::move(wp));
  }
  return trace;
}

MobilityTrace load_mobility_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorCode::IoFailure, "cannot open trace " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_mobility_trace(buffer.str(), path);
}

} // namespace ransim
