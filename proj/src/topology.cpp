#include "ransim/topology.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace ransim {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::LimitExceeded: return "LimitExceeded";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::UnsupportedNumerology: return "UnsupportedNumerology";
    case ErrorCode::UnknownCell: return "UnknownCell";
    case ErrorCode::IsdViolation: return "IsdViolation";
    case ErrorCode::CarrierMismatch: return "CarrierMismatch";
    case ErrorCode::OverlappingReservation: return "OverlappingReservation";
    case ErrorCode::UnknownRbma: return "UnknownRbma";
    case ErrorCode::CyclicComposite: return "CyclicComposite";
    case ErrorCode::UnknownService: return "UnknownService";
    case ErrorCode::NotThreeColorable: return "NotThreeColorable";
    case ErrorCode::UnreachableParticipant: return "UnreachableParticipant";
    case ErrorCode::SequenceMismatch: return "SequenceMismatch";
    case ErrorCode::InvalidRlcMode: return "InvalidRlcMode";
    case ErrorCode::EmptyUeSet: return "EmptyUeSet";
    case ErrorCode::UndecidedUe: return "UndecidedUe";
    case ErrorCode::RomUeHasNoContext: return "RomUeHasNoContext";
    case ErrorCode::PreconditionNotMet: return "PreconditionNotMet";
    case ErrorCode::UnknownUe: return "UnknownUe";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::NoSuchLink: return "NoSuchLink";
    case ErrorCode::ColumnMismatch: return "ColumnMismatch";
    case ErrorCode::NonMonotoneTime: return "NonMonotoneTime";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::RuntimeInvariantViolation: return "RuntimeInvariantViolation";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "UnknownError";
}

const char* to_string(InterfaceKind kind) {
  switch (kind) {
    case InterfaceKind::N2: return "n2";
    case InterfaceKind::N3: return "n3";
    case InterfaceKind::M1Ng: return "m1ng";
    case InterfaceKind::XnC: return "xnc";
    case InterfaceKind::XnU: return "xnu";
    case InterfaceKind::F1C: return "f1c";
    case InterfaceKind::F1U: return "f1u";
    case InterfaceKind::F1M: return "f1m";
    case InterfaceKind::E1: return "e1";
    case InterfaceKind::Uu: return "uu";
  }
  return "?";
}

std::optional<InterfaceKind> parse_interface_kind(const std::string& text) {
  static const std::map<std::string, InterfaceKind> table = {
      {"n2", InterfaceKind::N2},   {"n3", InterfaceKind::N3},
      {"m1ng", InterfaceKind::M1Ng}, {"xnc", InterfaceKind::XnC},
      {"xnu", InterfaceKind::XnU}, {"f1c", InterfaceKind::F1C},
      {"f1u", InterfaceKind::F1U}, {"f1m", InterfaceKind::F1M},
      {"e1", InterfaceKind::E1},   {"uu", InterfaceKind::Uu},
  };
  auto it = table.find(text);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Cu: return "cu";
    case NodeKind::Du: return "du";
    case NodeKind::Amf: return "amf";
    case NodeKind::Upf: return "upf";
    case NodeKind::Xuf: return "xuf";
    case NodeKind::Ue: return "ue";
  }
  return "?";
}

std::string NodeRef::str() const {
  std::ostringstream os;
  os << to_string(kind) << ":";
  if (kind == NodeKind::Ue && id == kAnyUe) {
    os << "*";
  } else {
    os << id;
  }
  return os.str();
}

Usec default_slot_duration_us(int mu) {
  if (mu >= 0) {
    return kUsecPerMs / (Usec(1) << mu);
  }
  return kUsecPerMs * (Usec(1) << (-mu));
}

std::map<int, NumerologyEntry> default_numerology_table() {
  std::map<int, NumerologyEntry> table;
  table[0] = NumerologyEntry{0, default_slot_duration_us(0), 1.41};
  table[-2] = NumerologyEntry{-2, default_slot_duration_us(-2), 120.0};
  return table;
}

const Cell& Topology::cell(int cell_id) const {
  auto it = cells.find(cell_id);
  if (it == cells.end()) fail(ErrorCode::UnknownCell, "cell " + std::to_string(cell_id));
  return it->second;
}

const GnbDu& Topology::du(int du_id) const {
  auto it = dus.find(du_id);
  if (it == dus.end()) fail(ErrorCode::DanglingReference, "du " + std::to_string(du_id));
  return it->second;
}

const GnbCu& Topology::cu(int cu_id) const {
  auto it = cus.find(cu_id);
  if (it == cus.end()) fail(ErrorCode::DanglingReference, "cu " + std::to_string(cu_id));
  return it->second;
}

std::optional<int> Topology::du_of_cell(int cell_id) const {
  for (const auto& [id, d] : dus) {
    if (std::find(d.served_cells.begin(), d.served_cells.end(), cell_id) !=
        d.served_cells.end()) {
      return id;
    }
  }
  return std::nullopt;
}

std::optional<int> Topology::cu_of_du(int du_id) const {
  for (const auto& [id, c] : cus) {
    if (std::find(c.child_dus.begin(), c.child_dus.end(), du_id) != c.child_dus.end()) {
      return id;
    }
  }
  return std::nullopt;
}

namespace {

bool endpoint_matches(const NodeRef& declared, const NodeRef& wanted) {
  if (declared.kind != wanted.kind) return false;
  if (declared.kind == NodeKind::Ue &&
      (declared.id == NodeRef::kAnyUe || wanted.id == NodeRef::kAnyUe)) {
    return true;
  }
  return declared.id == wanted.id;
}

} // namespace

const Link* Topology::find_link(const NodeRef& a, const NodeRef& b,
                                InterfaceKind kind) const {
  for (const auto& link : links) {
    if (link.kind != kind) continue;
    if ((endpoint_matches(link.a, a) && endpoint_matches(link.b, b)) ||
        (endpoint_matches(link.a, b) && endpoint_matches(link.b, a))) {
      return &link;
    }
  }
  return nullptr;
}

const NumerologyEntry& Topology::numerology(int mu) const {
  auto it = numerologies.find(mu);
  if (it == numerologies.end()) {
    fail(ErrorCode::UnsupportedNumerology, "mu=" + std::to_string(mu));
  }
  return it->second;
}

int Topology::slots_per_frame(int mu) const {
  const NumerologyEntry& entry = numerology(mu);
  // Negative numerologies do not divide the 10 ms frame evenly; the trailing
  // remainder stays unscheduled.
  return static_cast<int>(kFrameDurationUs / entry.slot_duration_us);
}

double Topology::cell_distance_km(int cell_a, int cell_b) const {
  const Cell& a = cell(cell_a);
  const Cell& b = cell(cell_b);
  double dx = a.x_km - b.x_km;
  double dy = a.y_km - b.y_km;
  return std::sqrt(dx * dx + dy * dy);
}

namespace {

struct Loader {
  std::vector<LoadIssue> issues;

  void add(ErrorCode code, const std::string& detail) {
    issues.push_back(LoadIssue{code, detail});
  }
};

// Endpoint kinds legal for each interface, order-insensitive.
bool link_kinds_legal(InterfaceKind kind, NodeKind a, NodeKind b) {
  auto is = [&](NodeKind x, NodeKind y) {
    return (a == x && b == y) || (a == y && b == x);
  };
  switch (kind) {
    case InterfaceKind::N2: return is(NodeKind::Cu, NodeKind::Amf);
    case InterfaceKind::N3: return is(NodeKind::Cu, NodeKind::Upf);
    case InterfaceKind::M1Ng: return is(NodeKind::Cu, NodeKind::Xuf);
    case InterfaceKind::XnC:
    case InterfaceKind::XnU:
    case InterfaceKind::E1: return a == NodeKind::Cu && b == NodeKind::Cu;
    case InterfaceKind::F1C:
    case InterfaceKind::F1U:
    case InterfaceKind::F1M: return is(NodeKind::Cu, NodeKind::Du);
    case InterfaceKind::Uu: return is(NodeKind::Du, NodeKind::Ue);
  }
  return false;
}

} // namespace

LoadResult load_topology(const TopologyConfig& config) {
  Loader loader;
  Topology t;
  t.numerologies = default_numerology_table();

  for (const auto& entry : config.extra_numerologies) {
    if (entry.mu < -2) {
      loader.add(ErrorCode::InvalidValue,
                 "numerology mu=" + std::to_string(entry.mu) + " below -2");
      continue;
    }
    NumerologyEntry row = entry;
    if (row.slot_duration_us <= 0) {
      row.slot_duration_us = default_slot_duration_us(row.mu);
    }
    if (row.slot_duration_us > kFrameDurationUs) {
      loader.add(ErrorCode::InvalidValue,
                 "numerology mu=" + std::to_string(entry.mu) + " slot exceeds frame");
      continue;
    }
    t.numerologies[row.mu] = row;
  }

  for (const auto& cell : config.cells) {
    if (t.cells.count(cell.cell_id)) {
      loader.add(ErrorCode::DuplicateId, "cell " + std::to_string(cell.cell_id));
      continue;
    }
    if (cell.bandwidth_prbs <= 0) {
      loader.add(ErrorCode::InvalidValue,
                 "cell " + std::to_string(cell.cell_id) + " bandwidth_prbs must be > 0");
    }
    if (cell.numerology_mu < -2) {
      loader.add(ErrorCode::InvalidValue,
                 "cell " + std::to_string(cell.cell_id) + " numerology below -2");
    } else if (!t.numerologies.count(cell.numerology_mu)) {
      loader.add(ErrorCode::UnsupportedNumerology,
                 "cell " + std::to_string(cell.cell_id) + " mu=" +
                     std::to_string(cell.numerology_mu));
    }
    t.cells[cell.cell_id] = cell;
  }

  std::map<int, int> cell_owner; // cell_id -> du_id
  for (const auto& du : config.dus) {
    if (t.dus.count(du.du_id)) {
      loader.add(ErrorCode::DuplicateId, "du " + std::to_string(du.du_id));
      continue;
    }
    for (int cell_id : du.served_cells) {
      if (!t.cells.count(cell_id)) {
        loader.add(ErrorCode::DanglingReference,
                   "du " + std::to_string(du.du_id) + " serves unknown cell " +
                       std::to_string(cell_id));
      }
      auto [it, inserted] = cell_owner.emplace(cell_id, du.du_id);
      if (!inserted) {
        loader.add(ErrorCode::DuplicateId,
                   "cell " + std::to_string(cell_id) + " served by du " +
                       std::to_string(it->second) + " and du " + std::to_string(du.du_id));
      }
    }
    if (du.effective_cell_count() > kMaxCellsPerDu) {
      loader.add(ErrorCode::LimitExceeded,
                 "du " + std::to_string(du.du_id) + " serves " +
                     std::to_string(du.effective_cell_count()) + " cells (max " +
                     std::to_string(kMaxCellsPerDu) + ")");
    }
    t.dus[du.du_id] = du;
  }

  std::map<int, int> du_owner; // du_id -> cu_id
  for (const auto& cu : config.cus) {
    if (t.cus.count(cu.cu_id)) {
      loader.add(ErrorCode::DuplicateId, "cu " + std::to_string(cu.cu_id));
      continue;
    }
    for (int du_id : cu.child_dus) {
      if (!t.dus.count(du_id)) {
        loader.add(ErrorCode::DanglingReference,
                   "cu " + std::to_string(cu.cu_id) + " references unknown du " +
                       std::to_string(du_id));
      }
      auto [it, inserted] = du_owner.emplace(du_id, cu.cu_id);
      if (!inserted) {
        loader.add(ErrorCode::DuplicateId,
                   "du " + std::to_string(du_id) + " claimed by cu " +
                       std::to_string(it->second) + " and cu " + std::to_string(cu.cu_id));
      }
    }
    if (cu.effective_du_count() > kMaxDusPerCu) {
      loader.add(ErrorCode::LimitExceeded,
                 "cu " + std::to_string(cu.cu_id) + " declares " +
                     std::to_string(cu.effective_du_count()) + " dus (max " +
                     std::to_string(kMaxDusPerCu) + ")");
    }
    t.cus[cu.cu_id] = cu;
  }

  auto node_exists = [&](const NodeRef& n) {
    switch (n.kind) {
      case NodeKind::Cu: return t.cus.count(static_cast<int>(n.id)) > 0;
      case NodeKind::Du: return t.dus.count(static_cast<int>(n.id)) > 0;
      // Core functions and UEs are not topology objects; any id is addressable.
      case NodeKind::Amf:
      case NodeKind::Upf:
      case NodeKind::Xuf:
      case NodeKind::Ue: return true;
    }
    return false;
  };

  for (const auto& link : config.links) {
    std::string label = link.a.str() + "--" + link.b.str() + " (" +
                        std::string(to_string(link.kind)) + ")";
    if (link.latency_us < 0 || link.jitter_us < 0) {
      loader.add(ErrorCode::InvalidValue, "link " + label + " negative latency/jitter");
      continue;
    }
    if (!link_kinds_legal(link.kind, link.a.kind, link.b.kind)) {
      loader.add(ErrorCode::InvalidValue,
                 "link " + label + " interface kind illegal for endpoint kinds");
      continue;
    }
    if (!node_exists(link.a) || !node_exists(link.b)) {
      loader.add(ErrorCode::DanglingReference, "link " + label + " endpoint unknown");
      continue;
    }
    if (link.kind == InterfaceKind::F1M) {
      const GnbCu* cu_end = nullptr;
      for (const NodeRef* n : {&link.a, &link.b}) {
        if (n->kind == NodeKind::Cu) cu_end = &t.cus.at(static_cast<int>(n->id));
      }
      if (cu_end != nullptr && !cu_end->roles.mc) {
        loader.add(ErrorCode::InvalidValue,
                   "link " + label + " requires the CU to hold the MC role");
        continue;
      }
    }
    t.links.push_back(link);
  }

  LoadResult result;
  result.issues = std::move(loader.issues);
  if (result.issues.empty()) {
    result.topology = std::move(t);
  }
  return result;
}

DimensionReport validate_dimensions(const Topology& t) {
  DimensionReport report;
  auto add = [&](const std::string& name, bool pass, const std::string& detail) {
    report.checks.push_back(DimensionCheck{name, pass, detail});
  };

  {
    bool pass = true;
    std::string detail;
    for (const auto& [id, du] : t.dus) {
      if (du.effective_cell_count() > kMaxCellsPerDu) {
        pass = false;
        detail = "du " + std::to_string(id) + ": " +
                 std::to_string(du.effective_cell_count()) + " cells";
        break;
      }
    }
    add("du_cell_limit_512", pass, detail);
  }

  {
    bool pass = true;
    std::string detail;
    for (const auto& [id, cu] : t.cus) {
      if (cu.effective_du_count() > kMaxDusPerCu) {
        pass = false;
        detail = "cu " + std::to_string(id) + ": " +
                 std::to_string(cu.effective_du_count()) + " dus";
        break;
      }
    }
    add("cu_du_limit_2pow36_minus_1", pass, detail);
  }

  {
    bool pass = true;
    std::string detail;
    std::set<int> seen;
    for (const auto& [id, du] : t.dus) {
      for (int cell_id : du.served_cells) {
        if (!seen.insert(cell_id).second) {
          pass = false;
          detail = "cell " + std::to_string(cell_id) + " served twice";
        }
      }
    }
    add("served_cells_disjoint", pass, detail);
  }

  {
    bool pass = true;
    std::string detail;
    for (const auto& [id, cell] : t.cells) {
      if (cell.bandwidth_prbs <= 0) {
        pass = false;
        detail = "cell " + std::to_string(id);
        break;
      }
    }
    add("cell_bandwidth_positive", pass, detail);
  }

  {
    bool pass = true;
    std::string detail;
    for (const auto& [id, cell] : t.cells) {
      if (!t.numerologies.count(cell.numerology_mu)) {
        pass = false;
        detail = "cell " + std::to_string(id) + " mu=" +
                 std::to_string(cell.numerology_mu);
        break;
      }
    }
    add("cell_numerology_supported", pass, detail);
  }

  {
    bool pass = true;
    std::string detail;
    for (const auto& link : t.links) {
      if (link.latency_us < 0 || link.jitter_us < 0) {
        pass = false;
        detail = "link " + link.a.str() + "--" + link.b.str();
        break;
      }
    }
    add("link_latency_nonnegative", pass, detail);
  }

  return report;
}

double max_isd_for_numerology(const Topology& t, int mu) {
  return t.numerology(mu).max_isd_km;
}

std::vector<int> neighbor_cells(const Topology& t, int cell_id, double radius_km) {
  if (!t.cells.count(cell_id)) {
    fail(ErrorCode::UnknownCell, "cell " + std::to_string(cell_id));
  }
  if (radius_km <= 0) {
    fail(ErrorCode::InvalidValue, "radius_km must be > 0");
  }
  const Cell& origin = t.cells.at(cell_id);
  std::vector<std::pair<double, int>> hits;
  for (const auto& [id, cell] : t.cells) {
    if (id == cell_id) continue;
    double dx = cell.x_km - origin.x_km;
    double dy = cell.y_km - origin.y_km;
    double d2 = dx * dx + dy * dy;
    if (d2 <= radius_km * radius_km) {
      hits.emplace_back(d2, id);
    }
  }
  std::sort(hits.begin(), hits.end());
  std::vector<int> out;
  out.reserve(hits.size());
  for (const auto& [d2, id] : hits) out.push_back(id);
  return out;
}

} // namespace ransim
