#ifndef RANSIM_MOBILITY_TRACE_H
#define RANSIM_MOBILITY_TRACE_H

#include <map>
#include <string>
#include <vector>

#include "ransim/types.h"

namespace ransim {

struct Waypoint {
  Usec time_us = 0;
  int ue_id = 0;
  double x_km = 0.0;
  double y_km = 0.0;
  std::map<int, double> rsrp_dbm; // per cell id
};

struct MobilityTrace {
  std::vector<int> cell_ids; // column order
  std::vector<Waypoint> waypoints;
};

// CSV columns: time_us,ue_id,x_km,y_km then one rsrp_dbm_<cellid> per cell.
// The header is checked verbatim. Times must be non-decreasing per UE
// (NonMonotoneTime) and RSRP values must sit in the reporting range.
MobilityTrace load_mobility_trace(const std::string& path);
MobilityTrace parse_mobility_trace(const std::string& text, const std::string& origin);

} // namespace ransim

#endif // RANSIM_MOBILITY_TRACE_H
