#include "ransim/rbma.h"

#include <algorithm>
#include <set>
#include <sstream>

namespace ransim {

const char* to_string(RbmaMode mode) {
  switch (mode) {
    case RbmaMode::SingleCell: return "single_cell";
    case RbmaMode::Sfn: return "sfn";
    case RbmaMode::Composite: return "composite";
  }
  return "?";
}

bool ResourceWindow::covers_slot(int slot) const {
  return std::binary_search(slots.begin(), slots.end(), slot);
}

bool ResourceWindow::slots_intersect(const ResourceWindow& other) const {
  for (int s : slots) {
    if (other.covers_slot(s)) return true;
  }
  return false;
}

int PrbRanges::total() const {
  int n = 0;
  for (const auto& [lo, hi] : ranges) n += hi - lo + 1;
  return n;
}

std::string PrbRanges::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (i > 0) os << "+";
    os << "[" << ranges[i].first << "," << ranges[i].second << "]";
  }
  return os.str();
}

const Rbma& RbmaRegistry::get(int rbma_id) const {
  auto it = rbmas_.find(rbma_id);
  if (it == rbmas_.end()) fail(ErrorCode::UnknownRbma, "rbma " + std::to_string(rbma_id));
  return it->second;
}

const Rbma& RbmaRegistry::create_rbma(const RbmaSpec& spec) {
  if (rbmas_.count(spec.id)) {
    fail(ErrorCode::DuplicateId, "rbma " + std::to_string(spec.id));
  }

  Rbma rbma;
  rbma.id = spec.id;
  rbma.mode = spec.mode;
  rbma.slice_tag = spec.slice_tag;
  rbma.sync_required = (spec.mode == RbmaMode::Sfn);

  if (spec.mode == RbmaMode::Composite) {
    if (spec.constituents.empty()) {
      fail(ErrorCode::InvalidValue, "composite rbma " + std::to_string(spec.id) +
                                        " has no constituents");
    }
    for (int cid : spec.constituents) {
      if (cid == spec.id) {
        fail(ErrorCode::CyclicComposite, "rbma " + std::to_string(spec.id) +
                                             " references itself");
      }
      const Rbma& constituent = get(cid); // UnknownRbma if unregistered
      // One nesting level only: a composite may not contain composites.
      if (constituent.mode == RbmaMode::Composite) {
        fail(ErrorCode::CyclicComposite,
             "rbma " + std::to_string(spec.id) + " nests composite " +
                 std::to_string(cid));
      }
    }
    rbma.constituents = spec.constituents;
    rbmas_[rbma.id] = rbma;
    return rbmas_.at(rbma.id);
  }

  if (spec.cells.empty()) {
    fail(ErrorCode::InvalidValue, "rbma " + std::to_string(spec.id) + " has no cells");
  }
  if (spec.mode == RbmaMode::SingleCell && spec.cells.size() != 1) {
    fail(ErrorCode::InvalidValue, "single-cell rbma " + std::to_string(spec.id) +
                                      " lists " + std::to_string(spec.cells.size()) +
                                      " cells");
  }

  const ResourceWindow& window = spec.window;
  if (window.slots.empty() || window.prb_start < 0 || window.prb_start > window.prb_end) {
    fail(ErrorCode::InvalidValue, "rbma " + std::to_string(spec.id) + " window malformed");
  }

  for (int cell_id : spec.cells) {
    const Cell& cell = topology_->cell(cell_id); // UnknownCell if missing
    // A participating cell needs a transmission point wired to the control
    // plane. A DU without a parent CU models an unsplit standalone gNB.
    auto du = topology_->du_of_cell(cell_id);
    if (!du) {
      fail(ErrorCode::DanglingReference,
           "rbma " + std::to_string(spec.id) + ": cell " + std::to_string(cell_id) +
               " has no serving du");
    }
    auto parent = topology_->cu_of_du(*du);
    if (parent && topology_->find_link(NodeRef{NodeKind::Cu, *parent},
                                       NodeRef{NodeKind::Du, *du},
                                       InterfaceKind::F1C) == nullptr) {
      fail(ErrorCode::DanglingReference,
           "rbma " + std::to_string(spec.id) + ": du " + std::to_string(*du) +
               " has no F1-C link to cu " + std::to_string(*parent));
    }
    if (window.prb_end >= cell.bandwidth_prbs) {
      fail(ErrorCode::InvalidValue,
           "rbma " + std::to_string(spec.id) + " window exceeds bandwidth of cell " +
               std::to_string(cell_id));
    }
    int slots_per_frame = topology_->slots_per_frame(cell.numerology_mu);
    for (int s : window.slots) {
      if (s < 0 || s >= slots_per_frame) {
        fail(ErrorCode::InvalidValue,
             "rbma " + std::to_string(spec.id) + " slot " + std::to_string(s) +
                 " outside frame of cell " + std::to_string(cell_id));
      }
    }
    for (const WindowRef& other : windows_on_cell(cell_id)) {
      if (window.slots_intersect(*other.window) && window.prbs_intersect(*other.window)) {
        fail(ErrorCode::OverlappingReservation,
             "rbma " + std::to_string(spec.id) + " overlaps rbma " +
                 std::to_string(other.rbma_id) + " on cell " + std::to_string(cell_id));
      }
    }
    rbma.members.push_back(MemberCell{cell_id, cell.carrier});
    rbma.windows[cell_id] = window;
  }

  if (spec.mode == RbmaMode::Sfn) {
    const Cell& first = topology_->cell(spec.cells.front());
    for (int cell_id : spec.cells) {
      const Cell& cell = topology_->cell(cell_id);
      if (cell.carrier != first.carrier) {
        fail(ErrorCode::CarrierMismatch,
             "sfn rbma " + std::to_string(spec.id) + ": cell " +
                 std::to_string(cell_id) + " carrier " + std::to_string(cell.carrier) +
                 " != " + std::to_string(first.carrier));
      }
      if (cell.numerology_mu != first.numerology_mu) {
        fail(ErrorCode::CarrierMismatch,
             "sfn rbma " + std::to_string(spec.id) + ": cell " +
                 std::to_string(cell_id) + " numerology differs");
      }
    }
    double max_isd = max_isd_for_numerology(*topology_, first.numerology_mu);
    for (std::size_t i = 0; i < spec.cells.size(); ++i) {
      for (std::size_t j = i + 1; j < spec.cells.size(); ++j) {
        // squared distances keep the exact-boundary case exact
        const Cell& a = topology_->cell(spec.cells[i]);
        const Cell& b = topology_->cell(spec.cells[j]);
        double dx = a.x_km - b.x_km;
        double dy = a.y_km - b.y_km;
        if (dx * dx + dy * dy > max_isd * max_isd) {
          std::ostringstream os;
          os << "sfn rbma " << spec.id << ": cells " << spec.cells[i] << " and "
             << spec.cells[j] << " are " << topology_->cell_distance_km(spec.cells[i], spec.cells[j])
             << " km apart (max " << max_isd << " km at mu=" << first.numerology_mu << ")";
          fail(ErrorCode::IsdViolation, os.str());
        }
      }
    }
  }

  rbmas_[rbma.id] = rbma;
  return rbmas_.at(rbma.id);
}

std::vector<TransmissionPoint> RbmaRegistry::resolve_rbma(int rbma_id) const {
  const Rbma& rbma = get(rbma_id);
  std::set<TransmissionPoint> points;
  auto add_members = [&](const Rbma& r) {
    for (const MemberCell& m : r.members) {
      auto du = topology_->du_of_cell(m.cell_id);
      if (!du) {
        fail(ErrorCode::DanglingReference,
             "cell " + std::to_string(m.cell_id) + " has no serving du");
      }
      points.insert(TransmissionPoint{*du, m.cell_id});
    }
  };
  if (rbma.mode == RbmaMode::Composite) {
    for (int cid : rbma.constituents) {
      add_members(get(cid));
    }
  } else {
    add_members(rbma);
  }
  return std::vector<TransmissionPoint>(points.begin(), points.end());
}

std::vector<int> RbmaRegistry::resolve_cells(int rbma_id) const {
  std::vector<int> cells;
  for (const TransmissionPoint& p : resolve_rbma(rbma_id)) {
    cells.push_back(p.cell_id);
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

std::vector<RbmaRegistry::WindowRef> RbmaRegistry::windows_on_cell(int cell_id) const {
  std::vector<WindowRef> out;
  for (const auto& [id, rbma] : rbmas_) {
    auto it = rbma.windows.find(cell_id);
    if (it != rbma.windows.end()) {
      out.push_back(WindowRef{id, &it->second});
    }
  }
  return out;
}

std::map<int, const ResourceWindow*> RbmaRegistry::service_windows(int rbma_id) const {
  const Rbma& rbma = get(rbma_id);
  std::map<int, const ResourceWindow*> out;
  if (rbma.mode == RbmaMode::Composite) {
    for (int cid : rbma.constituents) {
      for (const auto& [cell_id, window] : get(cid).windows) {
        out.emplace(cell_id, &window);
      }
    }
  } else {
    for (const auto& [cell_id, window] : rbma.windows) {
      out.emplace(cell_id, &window);
    }
  }
  return out;
}

AdmissionResult RbmaRegistry::admit_service(const ServiceConfig& service) {
  if (!rbmas_.count(service.rbma_id)) {
    fail(ErrorCode::UnknownRbma, "rbma " + std::to_string(service.rbma_id));
  }
  if (services_.count(service.service_id)) {
    fail(ErrorCode::DuplicateId, "service " + std::to_string(service.service_id));
  }
  if (service.required_prbs <= 0) {
    fail(ErrorCode::InvalidValue, "service " + std::to_string(service.service_id) +
                                      " required_prbs must be > 0");
  }
  if (service.mcs_index < 0 || service.mcs_index > 28) {
    fail(ErrorCode::InvalidValue, "service " + std::to_string(service.service_id) +
                                      " mcs_index out of range");
  }

  auto windows = service_windows(service.rbma_id);

  AdmissionResult result;
  Allocation allocation;
  allocation.service_id = service.service_id;
  allocation.rbma_id = service.rbma_id;

  for (const auto& [cell_id, window] : windows) {
    // PRBs of this window already taken by live services of the same RBMA
    // tree. Windows of distinct RBMAs never overlap, so only services sharing
    // this window compete here.
    std::vector<bool> taken(static_cast<std::size_t>(window->width_prbs()), false);
    for (const auto& [sid, alloc] : allocations_) {
      const ServiceConfig& other = services_.at(sid);
      auto other_windows = service_windows(other.rbma_id);
      auto wit = other_windows.find(cell_id);
      if (wit == other_windows.end() || wit->second != window) continue;
      auto ait = alloc.per_cell.find(cell_id);
      if (ait == alloc.per_cell.end()) continue;
      for (const auto& [lo, hi] : ait->second.ranges) {
        for (int p = lo; p <= hi; ++p) {
          taken[static_cast<std::size_t>(p - window->prb_start)] = true;
        }
      }
    }

    // First-fit from the low-PRB end of the window.
    PrbRanges assigned;
    int need = service.required_prbs;
    int run_start = -1;
    for (int p = window->prb_start; p <= window->prb_end && need > 0; ++p) {
      if (!taken[static_cast<std::size_t>(p - window->prb_start)]) {
        if (run_start < 0) run_start = p;
        --need;
        if (need == 0) {
          assigned.ranges.emplace_back(run_start, p);
        }
      } else if (run_start >= 0) {
        assigned.ranges.emplace_back(run_start, p - 1);
        run_start = -1;
      }
    }
    if (need > 0) {
      result.admitted = false;
      result.reason = "cell " + std::to_string(cell_id) + ": " +
                      std::to_string(service.required_prbs) + " PRBs requested, " +
                      std::to_string(service.required_prbs - need) + " free in window";
      return result;
    }
    allocation.per_cell[cell_id] = assigned;
  }

  services_[service.service_id] = service;
  allocations_[service.service_id] = allocation;
  check_admission_safety();

  result.admitted = true;
  result.allocation = allocation;
  return result;
}

Allocation RbmaRegistry::release_service(int service_id) {
  auto it = allocations_.find(service_id);
  if (it == allocations_.end()) {
    fail(ErrorCode::UnknownService, "service " + std::to_string(service_id));
  }
  Allocation freed = it->second;
  allocations_.erase(it);
  services_.erase(service_id);
  check_admission_safety();
  return freed;
}

std::vector<int> RbmaRegistry::services_of_rbma(int rbma_id) const {
  std::vector<int> out;
  for (const auto& [sid, s] : services_) {
    if (s.rbma_id == rbma_id) out.push_back(sid);
  }
  return out;
}

void RbmaRegistry::check_admission_safety() const {
  // Sum of admitted PRBs inside each (cell, slot) must stay within the
  // reserved window of the owning RBMA.
  for (const auto& [rbma_id, rbma] : rbmas_) {
    for (const auto& [cell_id, window] : rbma.windows) {
      for (int slot : window.slots) {
        int used = 0;
        for (const auto& [sid, alloc] : allocations_) {
          auto sw = service_windows(services_.at(sid).rbma_id);
          auto wit = sw.find(cell_id);
          if (wit == sw.end() || wit->second != &window) continue;
          if (!window.covers_slot(slot)) continue;
          auto ait = alloc.per_cell.find(cell_id);
          if (ait != alloc.per_cell.end()) used += ait->second.total();
        }
        if (used > window.width_prbs()) {
          fail(ErrorCode::RuntimeInvariantViolation,
               "cell " + std::to_string(cell_id) + " slot " + std::to_string(slot) +
                   ": " + std::to_string(used) + " PRBs admitted into a window of " +
                   std::to_string(window.width_prbs()));
        }
      }
    }
  }
}

RbmaCoverageReport RbmaRegistry::coverage_report(int rbma_id) const {
  const Rbma& rbma = get(rbma_id);
  RbmaCoverageReport report;
  report.rbma_id = rbma_id;
  report.mode = rbma.mode;

  auto windows = service_windows(rbma_id);
  std::set<int> carriers;
  for (const auto& [cell_id, window] : windows) {
    carriers.insert(topology_->cell(cell_id).carrier);
    int capacity = window->width_prbs() * static_cast<int>(window->slots.size());
    report.reserved_capacity[cell_id] = capacity;
    int used_per_slot = 0;
    for (const auto& [sid, s] : services_) {
      auto sw = service_windows(s.rbma_id);
      auto wit = sw.find(cell_id);
      if (wit == sw.end() || wit->second != window) continue;
      used_per_slot += s.required_prbs;
    }
    report.free_capacity[cell_id] =
        capacity - used_per_slot * static_cast<int>(window->slots.size());
  }
  report.cell_count = static_cast<int>(windows.size());
  report.carriers.assign(carriers.begin(), carriers.end());
  report.admitted_services = services_of_rbma(rbma_id);
  if (rbma.mode == RbmaMode::Composite) {
    for (int cid : rbma.constituents) {
      for (int sid : services_of_rbma(cid)) report.admitted_services.push_back(sid);
    }
    std::sort(report.admitted_services.begin(), report.admitted_services.end());
  }

  // Shared-frame TDM layout: every window on each member cell, from any RBMA.
  for (const auto& [cell_id, window] : windows) {
    std::map<int, std::vector<int>> layout;
    for (const WindowRef& ref : windows_on_cell(cell_id)) {
      layout[ref.rbma_id] = ref.window->slots;
    }
    report.tdm_layout[cell_id] = std::move(layout);
  }
  return report;
}

std::vector<CellReuseAssignment> plan_reuse3(const Topology& t,
                                             const RbmaRegistry& registry,
                                             const std::vector<int>& rbma_ids,
                                             double interference_radius_km) {
  std::vector<int> cells;
  for (int rid : rbma_ids) {
    const Rbma& rbma = registry.get(rid);
    if (rbma.mode != RbmaMode::SingleCell) {
      fail(ErrorCode::InvalidValue,
           "plan_reuse3: rbma " + std::to_string(rid) + " is not single-cell");
    }
    cells.push_back(rbma.members.front().cell_id);
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

  // Interference graph from the neighbor relation within the given radius.
  std::map<int, std::set<int>> adjacency;
  for (int c : cells) adjacency[c] = {};
  for (int c : cells) {
    for (int n : neighbor_cells(t, c, interference_radius_km)) {
      if (adjacency.count(n)) {
        adjacency[c].insert(n);
        adjacency[n].insert(c);
      }
    }
  }

  std::vector<int> order(cells);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    std::size_t da = adjacency[a].size();
    std::size_t db = adjacency[b].size();
    if (da != db) return da > db;
    return a < b;
  });

  std::map<int, int> color;
  // Backtracking over colors {0,1,2} in the fixed order.
  std::vector<int> stack;
  std::size_t idx = 0;
  std::map<int, int> attempt; // next color to try per position
  while (idx < order.size()) {
    int cell = order[idx];
    int start = attempt.count(cell) ? attempt[cell] : 0;
    int chosen = -1;
    for (int c = start; c < 3; ++c) {
      bool clash = false;
      for (int n : adjacency[cell]) {
        auto it = color.find(n);
        if (it != color.end() && it->second == c) {
          clash = true;
          break;
        }
      }
      if (!clash) {
        chosen = c;
        break;
      }
    }
    if (chosen >= 0) {
      color[cell] = chosen;
      attempt[cell] = chosen + 1;
      stack.push_back(cell);
      ++idx;
    } else {
      attempt.erase(cell);
      if (stack.empty()) {
        fail(ErrorCode::NotThreeColorable,
             "interference graph needs more than 3 partitions");
      }
      int prev = stack.back();
      stack.pop_back();
      color.erase(prev);
      --idx;
    }
  }

  std::vector<CellReuseAssignment> result;
  for (int c : cells) {
    CellReuseAssignment a;
    a.cell_id = c;
    a.partition = color[c];
    int slots_per_frame = t.slots_per_frame(t.cell(c).numerology_mu);
    for (int s = 0; s < slots_per_frame; ++s) {
      if (s % 3 == a.partition) a.slots.push_back(s);
    }
    result.push_back(std::move(a));
  }
  return result;
}

} // namespace ransim
