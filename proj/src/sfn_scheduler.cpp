#include "ransim/sfn_scheduler.h"

#include <algorithm>
#include <array>
#include <set>
#include <sstream>

namespace ransim {

const char* to_string(OwnerKind kind) {
  switch (kind) {
    case OwnerKind::Service: return "service";
    case OwnerKind::Unicast: return "unicast";
    case OwnerKind::Empty: return "empty";
  }
  return "?";
}

Frame build_frame(const Topology& t, int cell_id, std::int64_t frame_number,
                  const std::vector<ServicePlacement>& services,
                  const UnicastDemand& unicast) {
  const Cell& cell = t.cell(cell_id);
  Frame frame;
  frame.cell_id = cell_id;
  frame.frame_number = frame_number;
  frame.slots_per_frame = t.slots_per_frame(cell.numerology_mu);
  frame.bandwidth_prbs = cell.bandwidth_prbs;

  // occupancy[slot][prb]: service index + 1, or 0 when free
  std::vector<std::vector<int>> occupancy(
      static_cast<std::size_t>(frame.slots_per_frame),
      std::vector<int>(static_cast<std::size_t>(cell.bandwidth_prbs), 0));

  for (std::size_t si = 0; si < services.size(); ++si) {
    const ServicePlacement& placement = services[si];
    for (int slot : placement.slots) {
      if (slot < 0 || slot >= frame.slots_per_frame) {
        fail(ErrorCode::RuntimeInvariantViolation,
             "service " + std::to_string(placement.service_id) + " slot " +
                 std::to_string(slot) + " outside frame");
      }
      for (const auto& [lo, hi] : placement.prbs.ranges) {
        if (lo < 0 || hi >= cell.bandwidth_prbs) {
          fail(ErrorCode::RuntimeInvariantViolation,
               "service " + std::to_string(placement.service_id) +
                   " prbs outside carrier");
        }
        for (int p = lo; p <= hi; ++p) {
          int& slot_prb = occupancy[static_cast<std::size_t>(slot)]
                                   [static_cast<std::size_t>(p)];
          if (slot_prb != 0) {
            // AllocationConflict: two owners on one grid element.
            fail(ErrorCode::RuntimeInvariantViolation,
                 "allocation conflict at slot " + std::to_string(slot) + " prb " +
                     std::to_string(p) + " on cell " + std::to_string(cell_id));
          }
          slot_prb = static_cast<int>(si) + 1;
        }
        FrameAllocation alloc;
        alloc.slot = slot;
        alloc.prb_start = lo;
        alloc.prb_end = hi;
        alloc.owner = OwnerKind::Service;
        alloc.service_id = placement.service_id;
        alloc.content_hash = placement.content_hash;
        frame.allocations.push_back(alloc);
      }
    }
  }

  // Unicast fills greedily from the low PRBs of each slot, then Empty.
  for (int slot = 0; slot < frame.slots_per_frame; ++slot) {
    int wanted = unicast.prbs_per_slot;
    auto& row = occupancy[static_cast<std::size_t>(slot)];
    int run_start = -1;
    OwnerKind run_kind = OwnerKind::Empty;
    auto flush = [&](int end_prb) {
      if (run_start < 0) return;
      FrameAllocation alloc;
      alloc.slot = slot;
      alloc.prb_start = run_start;
      alloc.prb_end = end_prb;
      alloc.owner = run_kind;
      frame.allocations.push_back(alloc);
      run_start = -1;
    };
    for (int p = 0; p < cell.bandwidth_prbs; ++p) {
      if (row[static_cast<std::size_t>(p)] != 0) {
        flush(p - 1);
        continue;
      }
      OwnerKind kind = OwnerKind::Empty;
      if (wanted > 0) {
        kind = OwnerKind::Unicast;
        --wanted;
      }
      if (run_start < 0) {
        run_start = p;
        run_kind = kind;
      } else if (kind != run_kind) {
        flush(p - 1);
        run_start = p;
        run_kind = kind;
      }
    }
    flush(cell.bandwidth_prbs - 1);
  }

  std::sort(frame.allocations.begin(), frame.allocations.end(),
            [](const FrameAllocation& a, const FrameAllocation& b) {
              if (a.slot != b.slot) return a.slot < b.slot;
              return a.prb_start < b.prb_start;
            });
  return frame;
}

AlignmentResult check_sfn_alignment(const std::vector<TransmissionEvent>& events,
                                    const Rbma& rbma, Usec tolerance_us) {
  AlignmentResult result;
  if (rbma.mode != RbmaMode::Sfn) {
    fail(ErrorCode::InvalidValue,
         "alignment check applies to SFN areas, rbma " + std::to_string(rbma.id) +
             " is " + to_string(rbma.mode));
  }

  std::set<int> member_cells;
  for (const MemberCell& m : rbma.members) member_cells.insert(m.cell_id);

  // (slot, prbs, hash) -> emission times per cell
  using Key = std::tuple<int, int, int, std::uint64_t>;
  std::map<int, std::vector<std::pair<Key, Usec>>> per_cell;
  std::set<int> muted;
  for (const TransmissionEvent& e : events) {
    if (!member_cells.count(e.cell_id)) continue;
    if (e.muted) {
      muted.insert(e.cell_id);
      continue;
    }
    per_cell[e.cell_id].emplace_back(Key{e.slot, e.prb_start, e.prb_end, e.content_hash},
                                     e.time_us);
  }
  result.muted_cells.assign(muted.begin(), muted.end());

  const std::vector<std::pair<Key, Usec>>* reference = nullptr;
  int reference_cell = 0;
  for (auto& [cell, list] : per_cell) {
    std::sort(list.begin(), list.end());
    if (reference == nullptr) {
      reference = &list;
      reference_cell = cell;
      continue;
    }
    bool same = list.size() == reference->size();
    if (same) {
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (list[i].first != (*reference)[i].first) {
          same = false;
          break;
        }
        Usec dt = list[i].second - (*reference)[i].second;
        if (dt < -tolerance_us || dt > tolerance_us) {
          same = false;
          break;
        }
      }
    }
    if (!same) {
      result.aligned = false;
      result.details.push_back("cell " + std::to_string(cell) +
                               " diverges from cell " + std::to_string(reference_cell));
    }
  }
  return result;
}

MultiplexReport multiplex_report(const RbmaRegistry& rbmas,
                                 const std::vector<Frame>& frames) {
  MultiplexReport report;
  std::map<int, std::array<std::int64_t, 3>> counts; // cell -> {bcast, ucast, empty}
  std::map<int, std::int64_t> grid_total;

  for (const Frame& frame : frames) {
    auto& c = counts[frame.cell_id];
    for (const FrameAllocation& a : frame.allocations) {
      std::int64_t cells_covered = a.prb_end - a.prb_start + 1;
      switch (a.owner) {
        case OwnerKind::Service: c[0] += cells_covered; break;
        case OwnerKind::Unicast: c[1] += cells_covered; break;
        case OwnerKind::Empty: c[2] += cells_covered; break;
      }
    }
    grid_total[frame.cell_id] +=
        static_cast<std::int64_t>(frame.slots_per_frame) * frame.bandwidth_prbs;
  }

  for (const auto& [cell_id, c] : counts) {
    CellUtilization u;
    u.cell_id = cell_id;
    double total = static_cast<double>(grid_total[cell_id]);
    if (total > 0) {
      u.broadcast_fraction = static_cast<double>(c[0]) / total;
      u.unicast_fraction = static_cast<double>(c[1]) / total;
      u.empty_fraction = static_cast<double>(c[2]) / total;
    }
    report.cells.push_back(u);
  }

  for (const auto& [rbma_id, rbma] : rbmas.all()) {
    for (const auto& [cell_id, window] : rbma.windows) {
      report.rbma_slots[rbma_id][cell_id] = window.slots;
    }
  }
  return report;
}

std::string dump_frame(const Frame& frame) {
  std::ostringstream os;
  os << "frame cell=" << frame.cell_id << " number=" << frame.frame_number
     << " slots=" << frame.slots_per_frame << " prbs=" << frame.bandwidth_prbs << "\n";
  for (const FrameAllocation& a : frame.allocations) {
    os << "  slot=" << a.slot << " prb=" << a.prb_start << "-" << a.prb_end
       << " owner=" << to_string(a.owner);
    if (a.owner == OwnerKind::Service) {
      os << " service=" << a.service_id << " hash=" << a.content_hash;
    }
    os << "\n";
  }
  return os.str();
}

} // namespace ransim
