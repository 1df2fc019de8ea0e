#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ransim/rbma.h"

using namespace ransim;

namespace {

Cell make_cell(int id, double x, double y, int carrier = 100, int prbs = 50,
               int mu = 0) {
  Cell c;
  c.cell_id = id;
  c.x_km = x;
  c.y_km = y;
  c.carrier = carrier;
  c.bandwidth_prbs = prbs;
  c.numerology_mu = mu;
  return c;
}

Topology grid_topology() {
  TopologyConfig config;
  config.cells = {make_cell(1, 0.0, 0.0), make_cell(2, 0.5, 0.0), make_cell(3, 1.0, 0.0),
                  make_cell(4, 0.0, 50.0), make_cell(5, 120.0, 0.0, 100, 50, -2),
                  make_cell(6, 0.0, 0.0, 100, 50, -2), make_cell(7, 0.0, 5.0, 200)};
  config.dus = {GnbDu{1, {1, 2}, 0, {}}, GnbDu{2, {3, 4}, 0, {}},
                GnbDu{3, {5, 6}, 0, {}}, GnbDu{4, {7}, 0, {}}};
  GnbCu cu;
  cu.cu_id = 1;
  cu.roles = CuRoles{true, true, true};
  cu.child_dus = {1, 2, 3, 4};
  config.cus = {cu};
  for (int du = 1; du <= 4; ++du) {
    config.links.push_back(Link{NodeRef{NodeKind::Cu, 1}, NodeRef{NodeKind::Du, du},
                                InterfaceKind::F1C, 1000, 0});
  }
  LoadResult result = load_topology(config);
  REQUIRE(result.ok());
  return std::move(*result.topology);
}

ResourceWindow window(std::vector<int> slots, int lo, int hi) {
  ResourceWindow w;
  w.slots = std::move(slots);
  w.prb_start = lo;
  w.prb_end = hi;
  return w;
}

RbmaSpec spec(int id, RbmaMode mode, std::vector<int> cells, ResourceWindow w) {
  RbmaSpec s;
  s.id = id;
  s.mode = mode;
  s.cells = std::move(cells);
  s.window = std::move(w);
  return s;
}

ServiceConfig service(int id, int rbma, int prbs, int mcs = 10) {
  ServiceConfig s;
  s.service_id = id;
  s.rbma_id = rbma;
  s.mcs_index = mcs;
  s.required_prbs = prbs;
  s.data_rate_kbps = 100;
  return s;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const SimError& e) {
    return e.code();
  }
  FAIL("expected a SimError");
  return ErrorCode::InvalidValue;
}

} // namespace

TEST_CASE("single cell rbma with a full-carrier window") {
  Topology t = grid_topology();
  RbmaRegistry registry(t);
  std::vector<int> all_slots;
  for (int s = 0; s < 10; ++s) all_slots.push_back(s);
  const Rbma& rbma = registry.create_rbma(
      spec(1, RbmaMode::SingleCell, {1}, window(all_slots, 0, 49)));
  CHECK(rbma.mode == RbmaMode::SingleCell);
  CHECK(rbma.members.size() == 1);
  CHECK(rbma.sync_required == false);
}

TEST_CASE("sfn rbma obeys carrier and isd rules") {
  Topology t = grid_topology();
  RbmaRegistry registry(t);

  SUBCASE("3 co-carrier cells within 1 km accepted at mu=0") {
    const Rbma& rbma =
        registry.create_rbma(spec(1, RbmaMode::Sfn, {1, 2, 3}, window({0, 1}, 0, 19)));
    CHECK(rbma.sync_required);
    CHECK(rbma.members.size() == 3);
  }
  SUBCASE("cells 50 km apart rejected at mu=0") {
    CHECK(code_of([&] {
            registry.create_rbma(spec(1, RbmaMode::Sfn, {1, 4}, window({0}, 0, 19)));
          }) == ErrorCode::IsdViolation);
  }
  SUBCASE("120 km accepted under the extended numerology") {
    const Rbma& rbma =
        registry.create_rbma(spec(1, RbmaMode::Sfn, {5, 6}, window({0}, 0, 19)));
    CHECK(rbma.members.size() == 2);
  }
  SUBCASE("carrier mismatch rejected") {
    CHECK(code_of([&] {
            registry.create_rbma(spec(1, RbmaMode::Sfn, {1, 7}, window({0}, 0, 19)));
          }) == ErrorCode::CarrierMismatch);
  }
}

TEST_CASE("windows of distinct rbmas must not overlap on a cell") {
  Topology t = grid_topology();
  RbmaRegistry registry(t);
  registry.create_rbma(spec(1, RbmaMode::SingleCell, {1}, window({0, 1}, 0, 19)));

  SUBCASE("same slots, overlapping prbs") {
    CHECK(code_of([&] {
            registry.create_rbma(spec(2, RbmaMode::SingleCell, {1}, window({1}, 10, 29)));
          }) == ErrorCode::OverlappingReservation);
  }
  SUBCASE("same prbs, disjoint slots is fine (TDM)") {
    registry.create_rbma(spec(2, RbmaMode::SingleCell, {1}, window({2, 3}, 0, 19)));
  }
  SUBCASE("same slots, disjoint prbs is fine (FDM)") {
    registry.create_rbma(spec(2, RbmaMode::SingleCell, {1}, window({0, 1}, 20, 39)));
  }
}

TEST_CASE("resolve_rbma expands composites") {
  Topology t = grid_topology();
  RbmaRegistry registry(t);
  registry.create_rbma(spec(1, RbmaMode::Sfn, {1, 2, 3}, window({0}, 0, 19)));
  registry.create_rbma(spec(2, RbmaMode::SingleCell, {7}, window({0}, 0, 19)));

  RbmaSpec composite;
  composite.id = 3;
  composite.mode = RbmaMode::Composite;
  composite.constituents = {1, 2};
  registry.create_rbma(composite);

  SUBCASE("single cell resolves to one pair") {
    std::vector<TransmissionPoint> points = registry.resolve_rbma(2);
    REQUIRE(points.size() == 1);
    CHECK(points[0].du_id == 4);
    CHECK(points[0].cell_id == 7);
  }
  SUBCASE("composite of sfn(3)+single(1) resolves to 4 cells") {
    CHECK(registry.resolve_cells(3) == std::vector<int>{1, 2, 3, 7});
  }
  SUBCASE("unknown rbma") {
    CHECK(code_of([&] { registry.resolve_rbma(99); }) == ErrorCode::UnknownRbma);
  }
  SUBCASE("self reference raises CyclicComposite") {
    RbmaSpec cyclic;
    cyclic.id = 9;
    cyclic.mode = RbmaMode::Composite;
    cyclic.constituents = {9};
    CHECK(code_of([&] { registry.create_rbma(cyclic); }) == ErrorCode::CyclicComposite);
  }
  SUBCASE("composites nest one level only") {
    RbmaSpec nested;
    nested.id = 9;
    nested.mode = RbmaMode::Composite;
    nested.constituents = {3};
    CHECK(code_of([&] { registry.create_rbma(nested); }) == ErrorCode::CyclicComposite);
  }
}

TEST_CASE("admission first-fit and rejection") {
  Topology t = grid_topology();
  RbmaRegistry registry(t);
  registry.create_rbma(spec(1, RbmaMode::SingleCell, {1}, window({0, 1}, 0, 19)));

  SUBCASE("10 of 20 admitted at [0,9]") {
    AdmissionResult r = registry.admit_service(service(10, 1, 10));
    REQUIRE(r.admitted);
    CHECK(r.allocation.per_cell.at(1).ranges ==
          std::vector<std::pair<int, int>>{{0, 9}});
  }
  SUBCASE("third service of 5 rejected after 10 + 8") {
    REQUIRE(registry.admit_service(service(10, 1, 10)).admitted);
    REQUIRE(registry.admit_service(service(11, 1, 8)).admitted);
    AdmissionResult r = registry.admit_service(service(12, 1, 5));
    CHECK_FALSE(r.admitted);
    CHECK(r.reason.find("cell 1") != std::string::npos);
  }
  SUBCASE("unknown rbma") {
    CHECK(code_of([&] { registry.admit_service(service(10, 99, 1)); }) ==
          ErrorCode::UnknownRbma);
  }
}

TEST_CASE("release restores capacity and re-admission is identical") {
  Topology t = grid_topology();
  RbmaRegistry registry(t);
  registry.create_rbma(spec(1, RbmaMode::SingleCell, {1}, window({0}, 0, 19)));

  AdmissionResult first = registry.admit_service(service(10, 1, 12));
  REQUIRE(first.admitted);
  registry.release_service(10);
  AdmissionResult second = registry.admit_service(service(10, 1, 12));
  REQUIRE(second.admitted);
  CHECK(first.allocation.per_cell.at(1).ranges == second.allocation.per_cell.at(1).ranges);

  SUBCASE("release unknown id") {
    CHECK(code_of([&] { registry.release_service(77); }) == ErrorCode::UnknownService);
  }
  SUBCASE("release A then admit a sibling of the same size") {
    REQUIRE(registry.admit_service(service(11, 1, 8)).admitted);
    registry.release_service(10);
    CHECK(registry.admit_service(service(12, 1, 12)).admitted);
  }
}

TEST_CASE("admission verdicts match the exhaustive packing oracle") {
  // Random admit/release sequences over up to 8 services and a composite
  // spanning 5 cells; the oracle tracks per-(cell, slot) sums independently.
  Topology t = grid_topology();
  Rng rng(99);

  for (int trial = 0; trial < 200; ++trial) {
    RbmaRegistry registry(t);
    int width = 8 + static_cast<int>(rng.next_bounded(16)); // 8..24 prbs
    registry.create_rbma(spec(1, RbmaMode::Sfn, {1, 2, 3}, window({0, 1}, 0, width - 1)));
    registry.create_rbma(spec(2, RbmaMode::SingleCell, {7}, window({0}, 0, width - 1)));
    RbmaSpec composite;
    composite.id = 3;
    composite.mode = RbmaMode::Composite;
    composite.constituents = {1, 2};
    registry.create_rbma(composite);

    std::map<int, int> oracle_live; // service -> prbs (all on rbma 3)
    int next_id = 1;
    for (int step = 0; step < 12; ++step) {
      bool do_admit = oracle_live.empty() || rng.next_bounded(2) == 0;
      if (do_admit && next_id <= 8) {
        int need = 1 + static_cast<int>(rng.next_bounded(10));
        AdmissionResult result = registry.admit_service(service(next_id, 3, need));
        int used = 0;
        for (auto& [sid, prbs] : oracle_live) used += prbs;
        bool oracle_admits = used + need <= width;
        INFO("trial " << trial << " step " << step << " need " << need << " used "
                      << used << " width " << width);
        CHECK(result.admitted == oracle_admits);
        if (result.admitted) {
          oracle_live[next_id] = need;
          // every allocation stays inside the window on every cell
          for (const auto& [cell, ranges] : result.allocation.per_cell) {
            CHECK(ranges.total() == need);
            for (auto& [lo, hi] : ranges.ranges) {
              CHECK(lo >= 0);
              CHECK(hi < width);
            }
          }
        }
        ++next_id;
      } else if (!oracle_live.empty()) {
        auto it = oracle_live.begin();
        std::advance(it, static_cast<long>(rng.next_bounded(oracle_live.size() - 1)));
        registry.release_service(it->first);
        oracle_live.erase(it);
      }
      registry.check_admission_safety();
    }
  }
}

TEST_CASE("admit/release order independence on disjoint services") {
  Topology t = grid_topology();
  RbmaRegistry a(t), b(t);
  for (RbmaRegistry* r : {&a, &b}) {
    r->create_rbma(spec(1, RbmaMode::SingleCell, {1}, window({0}, 0, 29)));
  }
  // admit A,B in a; B,A in b; both fit -> identical verdicts
  REQUIRE(a.admit_service(service(1, 1, 10)).admitted);
  REQUIRE(a.admit_service(service(2, 1, 12)).admitted);
  REQUIRE(b.admit_service(service(2, 1, 12)).admitted);
  REQUIRE(b.admit_service(service(1, 1, 10)).admitted);
  // capacity identical afterwards
  CHECK_FALSE(a.admit_service(service(3, 1, 9)).admitted);
  CHECK_FALSE(b.admit_service(service(3, 1, 9)).admitted);
  CHECK(a.admit_service(service(4, 1, 8)).admitted);
  CHECK(b.admit_service(service(4, 1, 8)).admitted);
}

TEST_CASE("a full-carrier broadcast reservation is accepted") {
  Topology t = grid_topology();
  RbmaRegistry registry(t);
  std::vector<int> all_slots;
  for (int s = 0; s < 10; ++s) all_slots.push_back(s);
  // all prbs, all slots: 100% of downlink for broadcast
  const Rbma& rbma = registry.create_rbma(
      spec(1, RbmaMode::SingleCell, {1}, window(all_slots, 0, 49)));
  CHECK(rbma.windows.at(1).width_prbs() == 50);
  AdmissionResult r = registry.admit_service(service(10, 1, 50));
  CHECK(r.admitted);
}

TEST_CASE("coverage report bookkeeping") {
  Topology t = grid_topology();
  RbmaRegistry registry(t);
  registry.create_rbma(spec(1, RbmaMode::SingleCell, {1}, window({0, 1}, 0, 19)));

  SUBCASE("empty rbma has full capacity free") {
    RbmaCoverageReport report = registry.coverage_report(1);
    CHECK(report.admitted_services.empty());
    CHECK(report.reserved_capacity.at(1) == 40); // 20 prbs x 2 slots
    CHECK(report.free_capacity.at(1) == 40);
  }
  SUBCASE("capacity decrements by required_prbs x slot count") {
    REQUIRE(registry.admit_service(service(10, 1, 7)).admitted);
    RbmaCoverageReport report = registry.coverage_report(1);
    CHECK(report.admitted_services == std::vector<int>{10});
    CHECK(report.reserved_capacity.at(1) - report.free_capacity.at(1) == 7 * 2);
  }
  SUBCASE("shared cell appears under multiple rbma ids with disjoint slots") {
    registry.create_rbma(spec(2, RbmaMode::SingleCell, {1}, window({2, 3}, 0, 19)));
    registry.create_rbma(spec(3, RbmaMode::SingleCell, {1}, window({4}, 0, 19)));
    RbmaCoverageReport report = registry.coverage_report(1);
    const auto& layout = report.tdm_layout.at(1);
    REQUIRE(layout.size() == 3);
    std::set<int> seen;
    for (const auto& [rid, slots] : layout) {
      for (int s : slots) {
        CHECK(seen.insert(s).second); // disjoint TDM slots
      }
    }
  }
}

TEST_CASE("reuse-3 planning") {
  // 7-cell hex: center 1, ring 2..7 at unit distance.
  TopologyConfig config;
  config.cells.push_back(make_cell(1, 0, 0));
  for (int k = 0; k < 6; ++k) {
    double angle = k * 3.14159265358979323846 / 3.0;
    config.cells.push_back(make_cell(2 + k, std::cos(angle), std::sin(angle)));
  }
  GnbDu du;
  du.du_id = 1;
  for (int i = 1; i <= 7; ++i) du.served_cells.push_back(i);
  config.dus = {du};
  LoadResult loaded = load_topology(config);
  REQUIRE(loaded.ok());
  Topology t = std::move(*loaded.topology);

  RbmaRegistry registry(t);
  std::vector<int> ids;
  for (int i = 1; i <= 7; ++i) {
    registry.create_rbma(spec(i, RbmaMode::SingleCell, {i}, window({0}, 0, 9)));
    ids.push_back(i);
  }

  SUBCASE("hex grid gets a valid 3-coloring") {
    std::vector<CellReuseAssignment> plan = plan_reuse3(t, registry, ids, 1.1);
    REQUIRE(plan.size() == 7);
    std::map<int, int> partition;
    for (const auto& a : plan) {
      CHECK(a.partition >= 0);
      CHECK(a.partition <= 2);
      partition[a.cell_id] = a.partition;
    }
    for (const auto& a : plan) {
      for (int n : neighbor_cells(t, a.cell_id, 1.1)) {
        CHECK(partition.at(a.cell_id) != partition.at(n));
      }
      // partitions own disjoint slot sets
      for (int s : a.slots) CHECK(s % 3 == a.partition);
    }
  }
  SUBCASE("planning is deterministic") {
    std::vector<CellReuseAssignment> p1 = plan_reuse3(t, registry, ids, 1.1);
    std::vector<CellReuseAssignment> p2 = plan_reuse3(t, registry, ids, 1.1);
    REQUIRE(p1.size() == p2.size());
    for (std::size_t i = 0; i < p1.size(); ++i) {
      CHECK(p1[i].cell_id == p2[i].cell_id);
      CHECK(p1[i].partition == p2[i].partition);
    }
  }
  SUBCASE("isolated cells may share partition 0") {
    std::vector<CellReuseAssignment> plan = plan_reuse3(t, registry, ids, 0.1);
    for (const auto& a : plan) CHECK(a.partition == 0);
  }
}

TEST_CASE("k4 interference graph is not three-colorable") {
  TopologyConfig config;
  config.cells = {make_cell(1, 0, 0), make_cell(2, 0.1, 0), make_cell(3, 0, 0.1),
                  make_cell(4, 0.1, 0.1)};
  config.dus = {GnbDu{1, {1, 2, 3, 4}, 0, {}}}; // standalone gNB
  LoadResult loaded = load_topology(config);
  Topology t = std::move(*loaded.topology);
  RbmaRegistry registry(t);
  std::vector<int> ids;
  for (int i = 1; i <= 4; ++i) {
    registry.create_rbma(spec(i, RbmaMode::SingleCell, {i}, window({0}, 0, 9)));
    ids.push_back(i);
  }
  CHECK(code_of([&] { plan_reuse3(t, registry, ids, 1.0); }) ==
        ErrorCode::NotThreeColorable);
}
