#ifndef RANSIM_SFN_SCHEDULER_H
#define RANSIM_SFN_SCHEDULER_H

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ransim/rbma.h"
#include "ransim/topology.h"
#include "ransim/types.h"

namespace ransim {

enum class OwnerKind { Service, Unicast, Empty };

const char* to_string(OwnerKind kind);

struct FrameAllocation {
  int slot = 0;
  int prb_start = 0;
  int prb_end = 0; // inclusive
  OwnerKind owner = OwnerKind::Empty;
  int service_id = 0;               // OwnerKind::Service only
  std::uint64_t content_hash = 0;   // broadcast allocations only
};

struct Frame {
  int cell_id = 0;
  std::int64_t frame_number = 0;
  int slots_per_frame = 0;
  int bandwidth_prbs = 0;
  std::vector<FrameAllocation> allocations;
};

struct TransmissionEvent {
  int cell_id = 0;
  Usec time_us = 0;
  int slot = 0;
  int prb_start = 0;
  int prb_end = 0;
  std::uint64_t content_hash = 0;
  bool muted = false;
};

struct ServicePlacement {
  int service_id = 0;
  std::vector<int> slots;
  PrbRanges prbs;
  std::uint64_t content_hash = 0;
};

// Per-slot unicast PRB demand, filled greedily after broadcast.
struct UnicastDemand {
  int prbs_per_slot = 0;
};

// Builds one cell's frame: admitted services own exactly their allocations,
// unicast takes what is left, the rest stays empty. AllocationConflict means
// the admission bookkeeping fed us overlapping allocations (a bug, not an
// input problem).
Frame build_frame(const Topology& t, int cell_id, std::int64_t frame_number,
                  const std::vector<ServicePlacement>& services,
                  const UnicastDemand& unicast);

struct AlignmentResult {
  bool aligned = true;
  std::vector<std::string> details; // offending cells, one line each
  std::vector<int> muted_cells;
};

// SFN alignment over one period: every non-muted member cell must radiate the
// same (time, slot, prb range, content) tuple set. Muted cells are excluded
// and recorded.
AlignmentResult check_sfn_alignment(const std::vector<TransmissionEvent>& events,
                                    const Rbma& rbma, Usec tolerance_us = 0);

struct CellUtilization {
  int cell_id = 0;
  double broadcast_fraction = 0.0;
  double unicast_fraction = 0.0;
  double empty_fraction = 0.0;
};

struct MultiplexReport {
  std::vector<CellUtilization> cells;
  // rbma -> cell -> TDM slot set, mirroring the shared-frame illustration.
  std::map<int, std::map<int, std::vector<int>>> rbma_slots;
};

MultiplexReport multiplex_report(const RbmaRegistry& rbmas,
                                 const std::vector<Frame>& frames);

// Frame dump: one line per allocation, stable field order, for golden tests.
std::string dump_frame(const Frame& frame);

} // namespace ransim

#endif // RANSIM_SFN_SCHEDULER_H
