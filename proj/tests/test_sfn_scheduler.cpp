#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "ransim/sfn_scheduler.h"

using namespace ransim;

namespace {

Topology three_cell_topology() {
  TopologyConfig config;
  for (int i = 1; i <= 3; ++i) {
    Cell c;
    c.cell_id = i;
    c.x_km = 0.3 * i;
    c.carrier = 100;
    c.bandwidth_prbs = 20;
    config.cells.push_back(c);
    config.dus.push_back(GnbDu{i, {i}, 0, {}});
  }
  GnbCu cu;
  cu.cu_id = 1;
  cu.roles = CuRoles{true, true, true};
  cu.child_dus = {1, 2, 3};
  config.cus = {cu};
  for (int du = 1; du <= 3; ++du) {
    config.links.push_back(Link{NodeRef{NodeKind::Cu, 1}, NodeRef{NodeKind::Du, du},
                                InterfaceKind::F1C, 1000, 0});
  }
  LoadResult result = load_topology(config);
  REQUIRE(result.ok());
  return std::move(*result.topology);
}

ServicePlacement place(int service, std::vector<int> slots,
                       std::vector<std::pair<int, int>> ranges,
                       std::uint64_t hash = 0xabc) {
  ServicePlacement p;
  p.service_id = service;
  p.slots = std::move(slots);
  p.prbs.ranges = std::move(ranges);
  p.content_hash = hash;
  return p;
}

TransmissionEvent event(int cell, Usec time, int slot, int lo, int hi,
                        std::uint64_t hash, bool muted = false) {
  TransmissionEvent e;
  e.cell_id = cell;
  e.time_us = time;
  e.slot = slot;
  e.prb_start = lo;
  e.prb_end = hi;
  e.content_hash = hash;
  e.muted = muted;
  return e;
}

Rbma sfn_rbma() {
  Rbma rbma;
  rbma.id = 1;
  rbma.mode = RbmaMode::Sfn;
  rbma.members = {MemberCell{1, 100}, MemberCell{2, 100}, MemberCell{3, 100}};
  rbma.sync_required = true;
  return rbma;
}

} // namespace

TEST_CASE("build_frame composition") {
  Topology t = three_cell_topology();

  SUBCASE("no services, no unicast: one empty run per slot") {
    Frame frame = build_frame(t, 1, 0, {}, UnicastDemand{0});
    CHECK(frame.slots_per_frame == 10);
    REQUIRE(frame.allocations.size() == 10);
    for (const FrameAllocation& a : frame.allocations) {
      CHECK(a.owner == OwnerKind::Empty);
      CHECK(a.prb_start == 0);
      CHECK(a.prb_end == 19);
    }
  }
  SUBCASE("one service on slots {0,4} yields exactly two service allocations") {
    Frame frame = build_frame(t, 1, 0, {place(7, {0, 4}, {{0, 9}})}, UnicastDemand{0});
    int service_allocs = 0;
    for (const FrameAllocation& a : frame.allocations) {
      if (a.owner == OwnerKind::Service) {
        ++service_allocs;
        CHECK(a.service_id == 7);
        CHECK(a.prb_end - a.prb_start + 1 == 10);
      }
    }
    CHECK(service_allocs == 2);
  }
  SUBCASE("100% broadcast reservation leaves no room for unicast") {
    std::vector<int> all_slots;
    for (int s = 0; s < 10; ++s) all_slots.push_back(s);
    Frame frame =
        build_frame(t, 1, 0, {place(7, all_slots, {{0, 19}})}, UnicastDemand{5});
    for (const FrameAllocation& a : frame.allocations) {
      CHECK(a.owner == OwnerKind::Service);
    }
  }
  SUBCASE("unicast fills after broadcast, then empty") {
    Frame frame = build_frame(t, 1, 0, {place(7, {0}, {{0, 9}})}, UnicastDemand{4});
    std::map<int, std::map<OwnerKind, int>> per_slot;
    for (const FrameAllocation& a : frame.allocations) {
      per_slot[a.slot][a.owner] += a.prb_end - a.prb_start + 1;
    }
    CHECK(per_slot[0][OwnerKind::Service] == 10);
    CHECK(per_slot[0][OwnerKind::Unicast] == 4);
    CHECK(per_slot[0][OwnerKind::Empty] == 6);
    CHECK(per_slot[1][OwnerKind::Unicast] == 4);
    CHECK(per_slot[1][OwnerKind::Empty] == 16);
  }
  SUBCASE("overlapping placements are an internal failure") {
    CHECK_THROWS_AS(build_frame(t, 1, 0,
                                {place(7, {0}, {{0, 9}}), place(8, {0}, {{5, 12}})},
                                UnicastDemand{0}),
                    SimError);
  }
}

TEST_CASE("grid exclusivity holds on every built frame") {
  Topology t = three_cell_topology();
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    // random non-overlapping placements via disjoint prb strips
    std::vector<ServicePlacement> placements;
    int lo = 0;
    int sid = 1;
    while (lo < 18 && placements.size() < 4) {
      int width = 1 + static_cast<int>(rng.next_bounded(5));
      int hi = std::min(19, lo + width - 1);
      std::vector<int> slots;
      for (int s = 0; s < 10; ++s) {
        if (rng.next_bounded(1) == 0) slots.push_back(s);
      }
      if (slots.empty()) slots.push_back(0);
      placements.push_back(place(sid++, slots, {{lo, hi}}));
      lo = hi + 2;
    }
    Frame frame = build_frame(t, 1, trial, placements,
                              UnicastDemand{static_cast<int>(rng.next_bounded(8))});
    std::set<std::pair<int, int>> seen;
    for (const FrameAllocation& a : frame.allocations) {
      for (int p = a.prb_start; p <= a.prb_end; ++p) {
        CHECK(seen.emplace(a.slot, p).second);
      }
    }
    // the grid is fully covered: slots x prbs cells all owned
    CHECK(seen.size() == static_cast<std::size_t>(10 * 20));
  }
}

TEST_CASE("sfn alignment verdicts") {
  Rbma rbma = sfn_rbma();

  SUBCASE("three cells, identical tuples -> aligned") {
    std::vector<TransmissionEvent> events = {event(1, 40'000, 0, 0, 9, 0xbeef),
                                             event(2, 40'000, 0, 0, 9, 0xbeef),
                                             event(3, 40'000, 0, 0, 9, 0xbeef)};
    AlignmentResult result = check_sfn_alignment(events, rbma);
    CHECK(result.aligned);
    CHECK(result.muted_cells.empty());
  }
  SUBCASE("a 5 us offset at zero tolerance names the cell") {
    std::vector<TransmissionEvent> events = {event(1, 40'000, 0, 0, 9, 0xbeef),
                                             event(2, 40'005, 0, 0, 9, 0xbeef),
                                             event(3, 40'000, 0, 0, 9, 0xbeef)};
    AlignmentResult result = check_sfn_alignment(events, rbma);
    CHECK_FALSE(result.aligned);
    REQUIRE_FALSE(result.details.empty());
    CHECK(result.details.front().find("cell 2") != std::string::npos);
  }
  SUBCASE("the same offset passes with tolerance 5") {
    std::vector<TransmissionEvent> events = {event(1, 40'000, 0, 0, 9, 0xbeef),
                                             event(2, 40'005, 0, 0, 9, 0xbeef)};
    CHECK(check_sfn_alignment(events, rbma, 5).aligned);
  }
  SUBCASE("content divergence is misalignment") {
    std::vector<TransmissionEvent> events = {event(1, 40'000, 0, 0, 9, 0xbeef),
                                             event(2, 40'000, 0, 0, 9, 0xf00d)};
    CHECK_FALSE(check_sfn_alignment(events, rbma).aligned);
  }
  SUBCASE("a muted cell is excluded and recorded") {
    std::vector<TransmissionEvent> events = {event(1, 40'000, 0, 0, 9, 0xbeef),
                                             event(2, 40'000, 0, 0, 9, 0xbeef),
                                             event(3, 40'000, 0, 0, 0, 0, true)};
    AlignmentResult result = check_sfn_alignment(events, rbma);
    CHECK(result.aligned);
    CHECK(result.muted_cells == std::vector<int>{3});
  }
  SUBCASE("only sfn areas can be checked") {
    Rbma single;
    single.id = 2;
    single.mode = RbmaMode::SingleCell;
    CHECK_THROWS_AS(check_sfn_alignment({}, single), SimError);
  }
}

TEST_CASE("multiplex report fractions partition the grid") {
  Topology t = three_cell_topology();
  RbmaRegistry registry(t);
  RbmaSpec spec;
  spec.id = 1;
  spec.mode = RbmaMode::SingleCell;
  spec.cells = {1};
  spec.window.slots = {0, 1, 2};
  spec.window.prb_start = 0;
  spec.window.prb_end = 9;
  registry.create_rbma(spec);

  SUBCASE("all-empty frames give a 0/0/1 split") {
    std::vector<Frame> frames = {build_frame(t, 1, 0, {}, UnicastDemand{0})};
    MultiplexReport report = multiplex_report(registry, frames);
    REQUIRE(report.cells.size() == 1);
    CHECK(report.cells[0].broadcast_fraction == doctest::Approx(0.0));
    CHECK(report.cells[0].unicast_fraction == doctest::Approx(0.0));
    CHECK(report.cells[0].empty_fraction == doctest::Approx(1.0));
  }
  SUBCASE("fractions always sum to one") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<ServicePlacement> placements = {
          place(1, {0, 1}, {{0, static_cast<int>(rng.next_bounded(9))}})};
      std::vector<Frame> frames = {
          build_frame(t, 1, 0, placements,
                      UnicastDemand{static_cast<int>(rng.next_bounded(10))}),
          build_frame(t, 2, 0, {}, UnicastDemand{3})};
      MultiplexReport report = multiplex_report(registry, frames);
      for (const CellUtilization& u : report.cells) {
        CHECK(u.broadcast_fraction + u.unicast_fraction + u.empty_fraction ==
              doctest::Approx(1.0));
      }
    }
  }
  SUBCASE("tdm slot map mirrors the reserved windows") {
    MultiplexReport report = multiplex_report(registry, {});
    REQUIRE(report.rbma_slots.count(1));
    CHECK(report.rbma_slots.at(1).at(1) == std::vector<int>{0, 1, 2});
  }
}

TEST_CASE("frame dump is stable") {
  Topology t = three_cell_topology();
  Frame frame = build_frame(t, 1, 3, {place(7, {0}, {{0, 4}}, 0x123)}, UnicastDemand{2});
  std::string dump = dump_frame(frame);
  CHECK(dump.find("frame cell=1 number=3 slots=10 prbs=20") != std::string::npos);
  CHECK(dump.find("slot=0 prb=0-4 owner=service service=7") != std::string::npos);
  CHECK(dump_frame(frame) == dump);
}
