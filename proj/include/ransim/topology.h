#ifndef RANSIM_TOPOLOGY_H
#define RANSIM_TOPOLOGY_H

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ransim/types.h"

namespace ransim {

// Signalling limits of the CU/DU split: at most 512 cells under one gNB-DU
// and at most 2^36 - 1 uniquely identified gNB-DUs under one gNB-CU.
constexpr std::uint64_t kMaxCellsPerDu = 512;
constexpr std::uint64_t kMaxDusPerCu = (1ULL << 36) - 1;

enum class PowerClass { HPHT, LowPower };

struct Cell {
  int cell_id = 0;
  double x_km = 0.0;
  double y_km = 0.0;
  int carrier = 0; // DL frequency channel identifier
  int bandwidth_prbs = 0;
  int numerology_mu = 0;
  PowerClass power_class = PowerClass::HPHT;
};

struct GnbDu {
  int du_id = 0;
  std::vector<int> served_cells;
  Usec clock_offset_us = 0; // relative to the common time reference
  // Symbolic cell count for boundary checks; defaults to served_cells.size().
  std::optional<std::uint64_t> declared_cell_count;

  std::uint64_t effective_cell_count() const {
    return declared_cell_count.value_or(served_cells.size());
  }
};

struct CuRoles {
  bool cp = false;
  bool up = false;
  bool mc = false;
};

struct GnbCu {
  int cu_id = 0;
  CuRoles roles;
  std::vector<int> child_dus;
  // Symbolic DU count for boundary checks; never materialized.
  std::optional<std::uint64_t> declared_du_count;

  std::uint64_t effective_du_count() const {
    return declared_du_count.value_or(child_dus.size());
  }
};

enum class InterfaceKind { N2, N3, M1Ng, XnC, XnU, F1C, F1U, F1M, E1, Uu };

const char* to_string(InterfaceKind kind);
std::optional<InterfaceKind> parse_interface_kind(const std::string& text);

enum class NodeKind { Cu, Du, Amf, Upf, Xuf, Ue };

const char* to_string(NodeKind kind);

struct NodeRef {
  NodeKind kind = NodeKind::Cu;
  // kAnyUe on a Uu endpoint makes the link apply to every UE under that DU.
  std::int64_t id = 0;

  static constexpr std::int64_t kAnyUe = -1;

  bool operator==(const NodeRef& other) const = default;
  bool operator<(const NodeRef& other) const {
    if (kind != other.kind) return kind < other.kind;
    return id < other.id;
  }

  std::string str() const;
};

struct Link {
  NodeRef a;
  NodeRef b;
  InterfaceKind kind = InterfaceKind::F1C;
  Usec latency_us = 0; // one-way
  Usec jitter_us = 0;  // uniform bound, 0 = deterministic
};

struct NumerologyEntry {
  int mu = 0;
  Usec slot_duration_us = 0;
  double max_isd_km = 0.0;
};

// Slot duration implied by a numerology index: 1 ms subframes subdivided by
// 2^mu for mu >= 0; 2^|mu| ms slots for negative mu.
Usec default_slot_duration_us(int mu);

struct Topology {
  std::map<int, Cell> cells;
  std::map<int, GnbDu> dus;
  std::map<int, GnbCu> cus;
  std::vector<Link> links;
  std::map<int, NumerologyEntry> numerologies;

  const Cell& cell(int cell_id) const;
  const GnbDu& du(int du_id) const;
  const GnbCu& cu(int cu_id) const;

  // Parent lookups; nullopt for orphans.
  std::optional<int> du_of_cell(int cell_id) const;
  std::optional<int> cu_of_du(int du_id) const;

  // Undirected link lookup for (a, b, kind). A Uu link declared against
  // NodeRef::kAnyUe matches any concrete UE id.
  const Link* find_link(const NodeRef& a, const NodeRef& b, InterfaceKind kind) const;

  const NumerologyEntry& numerology(int mu) const;
  int slots_per_frame(int mu) const;

  double cell_distance_km(int cell_a, int cell_b) const;
};

// Default table: mu=0 covers the Rel-15 grid (1.41 km max ISD); the extended
// negative numerology entry stretches the grid to 120 km inter-site distance.
std::map<int, NumerologyEntry> default_numerology_table();

struct TopologyConfig {
  std::vector<Cell> cells;
  std::vector<GnbDu> dus;
  std::vector<GnbCu> cus;
  std::vector<Link> links;
  std::vector<NumerologyEntry> extra_numerologies;
};

struct LoadIssue {
  ErrorCode code;
  std::string detail;
};

struct LoadResult {
  std::optional<Topology> topology; // set iff issues is empty
  std::vector<LoadIssue> issues;

  bool ok() const { return issues.empty(); }
};

// Validates the whole configuration and returns either a usable Topology or
// the full list of violations (all of them, not just the first).
LoadResult load_topology(const TopologyConfig& config);

struct DimensionCheck {
  std::string constraint;
  bool pass = false;
  std::string detail;
};

struct DimensionReport {
  std::vector<DimensionCheck> checks;

  bool all_pass() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }
};

DimensionReport validate_dimensions(const Topology& t);

// Maximum inter-site distance supported by a numerology. UnsupportedNumerology
// if mu has no table entry.
double max_isd_for_numerology(const Topology& t, int mu);

// Cells within radius_km of cell_id (excluding itself), sorted by distance
// then id. UnknownCell if cell_id does not exist.
std::vector<int> neighbor_cells(const Topology& t, int cell_id, double radius_km);

} // namespace ransim

#endif // RANSIM_TOPOLOGY_H
