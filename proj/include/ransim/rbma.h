#ifndef RANSIM_RBMA_H
#define RANSIM_RBMA_H

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ransim/topology.h"
#include "ransim/types.h"

namespace ransim {

enum class RbmaMode { SingleCell, Sfn, Composite };

const char* to_string(RbmaMode mode);

// Time slots (within the 10 ms frame, periodic) times a PRB range reserved
// on one cell for broadcast/multicast use.
struct ResourceWindow {
  std::vector<int> slots; // sorted, unique slot indices within the frame
  int prb_start = 0;
  int prb_end = 0; // inclusive

  int width_prbs() const { return prb_end - prb_start + 1; }
  bool covers_slot(int slot) const;
  bool slots_intersect(const ResourceWindow& other) const;
  bool prbs_intersect(const ResourceWindow& other) const {
    return prb_start <= other.prb_end && other.prb_start <= prb_end;
  }
};

struct MemberCell {
  int cell_id = 0;
  int carrier = 0;
};

struct Rbma {
  int id = 0;
  RbmaMode mode = RbmaMode::SingleCell;
  std::vector<MemberCell> members;              // empty for Composite
  std::map<int, ResourceWindow> windows;        // cell_id -> reserved window
  std::vector<int> constituents;                // Composite only, one level deep
  std::string slice_tag;                        // opaque pass-through
  bool sync_required = false;                   // true iff mode == Sfn
};

struct RbmaSpec {
  int id = 0;
  RbmaMode mode = RbmaMode::SingleCell;
  std::vector<int> cells;
  ResourceWindow window;      // applied to every member cell
  std::vector<int> constituents;
  std::string slice_tag;
};

struct ServiceConfig {
  int service_id = 0;
  int rbma_id = 0;
  int mcs_index = 0; // 0..28
  int required_prbs = 0; // per slot of the reserved window
  int data_rate_kbps = 0;
  int priority = 0;
};

// Contiguous PRB ranges, lowest-first. An allocation may span several ranges
// when the window is fragmented; the admission criterion is free capacity,
// not contiguity.
struct PrbRanges {
  std::vector<std::pair<int, int>> ranges; // inclusive

  int total() const;
  std::string str() const;
};

struct Allocation {
  int service_id = 0;
  int rbma_id = 0;
  std::map<int, PrbRanges> per_cell; // cell_id -> assigned PRBs
};

struct AdmissionResult {
  bool admitted = false;
  Allocation allocation;   // valid iff admitted
  std::string reason;      // first violating cell iff rejected
};

struct TransmissionPoint {
  int du_id = 0;
  int cell_id = 0;

  bool operator<(const TransmissionPoint& o) const {
    if (du_id != o.du_id) return du_id < o.du_id;
    return cell_id < o.cell_id;
  }
  bool operator==(const TransmissionPoint& o) const = default;
};

struct CellReuseAssignment {
  int cell_id = 0;
  int partition = 0;       // 0..2
  std::vector<int> slots;  // slots of the cell's frame owned by the partition
};

struct RbmaCoverageReport {
  int rbma_id = 0;
  RbmaMode mode = RbmaMode::SingleCell;
  int cell_count = 0;
  std::vector<int> carriers;
  // Reserved capacity per cell: window width x slot count, in PRB-slots.
  std::map<int, int> reserved_capacity;
  std::map<int, int> free_capacity;
  std::vector<int> admitted_services;
  // TDM frame layout per cell: rbma_id -> slots, for every RBMA that owns a
  // window on the cell (mirrors the shared-frame illustration).
  std::map<int, std::map<int, std::vector<int>>> tdm_layout; // cell -> rbma -> slots
};

// Registry of areas and admitted services. Single writer: the event loop.
class RbmaRegistry {
public:
  explicit RbmaRegistry(const Topology& topology) : topology_(&topology) {}

  const Rbma& create_rbma(const RbmaSpec& spec);

  bool contains(int rbma_id) const { return rbmas_.count(rbma_id) > 0; }
  const Rbma& get(int rbma_id) const;
  const std::map<int, Rbma>& all() const { return rbmas_; }

  // Full transmission-point set, composites expanded, duplicates removed,
  // sorted by (du, cell).
  std::vector<TransmissionPoint> resolve_rbma(int rbma_id) const;

  // Convenience: the sorted cell ids behind resolve_rbma.
  std::vector<int> resolve_cells(int rbma_id) const;

  AdmissionResult admit_service(const ServiceConfig& service);
  Allocation release_service(int service_id);

  const std::map<int, ServiceConfig>& admitted_services() const { return services_; }
  const std::map<int, Allocation>& allocations() const { return allocations_; }
  std::vector<int> services_of_rbma(int rbma_id) const;

  RbmaCoverageReport coverage_report(int rbma_id) const;

  // Asserts the per-(cell, slot) safety invariant: admitted PRBs never exceed
  // the reserved window. Throws RuntimeInvariantViolation on breach.
  void check_admission_safety() const;

  const Topology& topology() const { return *topology_; }

private:
  struct WindowRef {
    int rbma_id;
    const ResourceWindow* window;
  };

  std::vector<WindowRef> windows_on_cell(int cell_id) const;
  // Windows a service on `rbma_id` occupies, per concrete cell.
  std::map<int, const ResourceWindow*> service_windows(int rbma_id) const;

  const Topology* topology_;
  std::map<int, Rbma> rbmas_;
  std::map<int, ServiceConfig> services_;
  std::map<int, Allocation> allocations_;
};

// Orthogonal reuse-3 partitioning for single-cell areas: interfering cells
// (within interference_radius_km) must land in different partitions.
// Deterministic greedy with backtracking, cells ordered by degree then id.
// NotThreeColorable if the interference graph needs more than 3 colors.
std::vector<CellReuseAssignment> plan_reuse3(const Topology& t,
                                             const RbmaRegistry& registry,
                                             const std::vector<int>& rbma_ids,
                                             double interference_radius_km);

} // namespace ransim

#endif // RANSIM_RBMA_H
