#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "ransim/ran_sync.h"

using namespace ransim;

namespace {

Topology sync_topology(Usec f1m_latency = 2000, Usec f1u_latency = 3000) {
  TopologyConfig config;
  for (int i = 1; i <= 3; ++i) {
    Cell c;
    c.cell_id = i;
    c.x_km = 0.1 * i;
    c.carrier = 100;
    c.bandwidth_prbs = 50;
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
    config.links.push_back(Link{NodeRef{NodeKind::Cu, 1}, NodeRef{NodeKind::Du, du},
                                InterfaceKind::F1M, f1m_latency + 500 * (du - 1), 0});
    config.links.push_back(Link{NodeRef{NodeKind::Cu, 1}, NodeRef{NodeKind::Du, du},
                                InterfaceKind::F1U, f1u_latency + 1000 * (du - 1), 0});
  }
  LoadResult result = load_topology(config);
  REQUIRE(result.ok());
  return std::move(*result.topology);
}

SyncParams params_40ms(Usec epoch = 0, std::uint32_t sequence = 1) {
  SyncParams p;
  p.sync_period_ms = 40;
  p.sync_sequence = sequence;
  p.epoch_us = epoch;
  return p;
}

SyncPdu make_pdu(std::uint64_t pn, Usec tta, std::uint64_t elapsed, std::size_t len,
                 std::uint32_t sequence = 1) {
  SyncPdu pdu;
  pdu.sync_sequence = sequence;
  pdu.packet_number = pn;
  pdu.tta_us = tta;
  pdu.elapsed_octets = elapsed;
  pdu.payload.assign(len, static_cast<std::uint8_t>(pn & 0xff));
  return pdu;
}

} // namespace

TEST_CASE("wire format golden vector") {
  SyncPdu pdu;
  pdu.sync_sequence = 0x01020304;
  pdu.packet_number = 0x1112131415161718ULL;
  pdu.tta_us = 0x2122232425262728LL;
  pdu.elapsed_octets = 0x3132333435363738ULL;
  pdu.payload = {0xde, 0xad, 0xbe, 0xef};

  std::vector<std::uint8_t> wire = serialize_sync_pdu(pdu);
  const std::vector<std::uint8_t> expected = {
      0x01, 0x02, 0x03, 0x04,                         // sequence
      0x11, 0x12, 0x13, 0x14, 0x15, 0x16, 0x17, 0x18, // packet number
      0x21, 0x22, 0x23, 0x24, 0x25, 0x26, 0x27, 0x28, // tta
      0x31, 0x32, 0x33, 0x34, 0x35, 0x36, 0x37, 0x38, // elapsed octets
      0x00, 0x00, 0x00, 0x04,                         // payload length
      0xde, 0xad, 0xbe, 0xef};
  CHECK(wire == expected);

  SyncPdu back = parse_sync_pdu(wire);
  CHECK(back.sync_sequence == pdu.sync_sequence);
  CHECK(back.packet_number == pdu.packet_number);
  CHECK(back.tta_us == pdu.tta_us);
  CHECK(back.elapsed_octets == pdu.elapsed_octets);
  CHECK(back.payload == pdu.payload);
}

TEST_CASE("wire round trip over random pdus") {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    SyncPdu pdu;
    pdu.sync_sequence = static_cast<std::uint32_t>(rng.next());
    pdu.packet_number = rng.next();
    pdu.tta_us = static_cast<Usec>(rng.next_bounded(1'000'000'000));
    pdu.elapsed_octets = rng.next_bounded(1'000'000);
    pdu.payload.resize(rng.next_bounded(64));
    for (auto& b : pdu.payload) b = static_cast<std::uint8_t>(rng.next());
    SyncPdu back = parse_sync_pdu(serialize_sync_pdu(pdu));
    CHECK(back.packet_number == pdu.packet_number);
    CHECK(back.payload == pdu.payload);
    CHECK(back.elapsed_octets == pdu.elapsed_octets);
  }
  SUBCASE("truncated wire rejected") {
    CHECK_THROWS_AS(parse_sync_pdu(std::vector<std::uint8_t>(10, 0)), SimError);
  }
}

TEST_CASE("negotiation distributes one parameter set") {
  Topology t = sync_topology();
  NegotiationOutcome outcome = negotiate_sync_params(t, 1, {1, 2, 3}, SyncProposal{}, 0);
  CHECK(outcome.params.sync_period_ms == 40);
  CHECK(outcome.control_latency_us.size() == 3);
  // identical (period, sequence, epoch) for every participant by construction
  CHECK(outcome.params.sync_sequence == 1);

  SUBCASE("epoch covers the slowest participant") {
    // F1-M latencies are 2000/2500/3000 us
    CHECK(outcome.max_control_latency_us == 3000);
    CHECK(outcome.params.epoch_us == 3000);
  }
  SUBCASE("epoch >= now + max latency with 5 ms links") {
    Topology slow = sync_topology(5000);
    NegotiationOutcome o = negotiate_sync_params(slow, 1, {1, 2, 3}, SyncProposal{}, 1000);
    Usec max_latency = 0;
    for (const auto& [du, latency] : o.control_latency_us) {
      max_latency = std::max(max_latency, latency);
    }
    CHECK(max_latency == 6000);
    CHECK(o.params.epoch_us >= 1000 + max_latency);
  }
}

TEST_CASE("negotiation rejects unreachable participants") {
  TopologyConfig config;
  Cell c;
  c.cell_id = 1;
  c.bandwidth_prbs = 10;
  config.cells = {c};
  config.dus = {GnbDu{1, {1}, 0, {}}};
  GnbCu cu;
  cu.cu_id = 1;
  cu.roles = CuRoles{true, true, true};
  cu.child_dus = {1};
  config.cus = {cu};
  // deliberately no F1-M link
  LoadResult loaded = load_topology(config);
  Topology t = std::move(*loaded.topology);
  CHECK_THROWS_AS(negotiate_sync_params(t, 1, {1}, SyncProposal{}, 0), SimError);
  try {
    negotiate_sync_params(t, 1, {1}, SyncProposal{}, 0);
  } catch (const SimError& e) {
    CHECK(e.code() == ErrorCode::UnreachableParticipant);
  }
}

TEST_CASE("encapsulation keeps prefix sums and boundaries") {
  SUBCASE("elapsed octets are the prefix sum") {
    SyncMaster master(params_40ms(), 10'000);
    std::vector<SyncPdu> pdus =
        master.encapsulate({std::vector<std::uint8_t>(100), std::vector<std::uint8_t>(200),
                            std::vector<std::uint8_t>(50)},
                           0);
    REQUIRE(pdus.size() == 3);
    CHECK(pdus[0].elapsed_octets == 0);
    CHECK(pdus[1].elapsed_octets == 100);
    CHECK(pdus[2].elapsed_octets == 300);
    CHECK(pdus[0].packet_number == 1);
    CHECK(pdus[2].packet_number == 3);
  }
  SUBCASE("empty stream gives no pdus") {
    SyncMaster master(params_40ms(), 10'000);
    CHECK(master.encapsulate({}, 0).empty());
  }
  SUBCASE("period 40 ms, now 35 ms, headroom 10 ms -> first tta 80 ms") {
    SyncMaster master(params_40ms(), 10'000);
    std::vector<SyncPdu> pdus = master.encapsulate({std::vector<std::uint8_t>(1)}, 35'000);
    REQUIRE(pdus.size() == 1);
    CHECK(pdus[0].tta_us == 80'000);
  }
  SUBCASE("boundary is strictly after now + headroom") {
    SyncParams p = params_40ms();
    CHECK(next_boundary_after(p, 0) == 40'000);
    CHECK(next_boundary_after(p, 39'999) == 40'000);
    CHECK(next_boundary_after(p, 40'000) == 80'000);
    CHECK(next_boundary_after(p, -5'000) == 0); // before epoch
  }
  SUBCASE("tta is always period aligned") {
    Rng rng(3);
    SyncParams p = params_40ms(12'345);
    SyncMaster master(p, 7'000);
    for (int i = 0; i < 100; ++i) {
      Usec now = static_cast<Usec>(rng.next_bounded(10'000'000));
      std::vector<SyncPdu> pdus = master.encapsulate({std::vector<std::uint8_t>(1)}, now);
      CHECK((pdus[0].tta_us - p.epoch_us) % p.period_us() == 0);
      CHECK(pdus[0].tta_us > now + 7'000);
    }
  }
}

TEST_CASE("receiver buffers on time and mutes late arrivals") {
  SyncReceiverState receiver(1, params_40ms());

  SUBCASE("on-time pdu buffered, not muted") {
    receiver.ingest_pdu(make_pdu(1, 40'000, 0, 10), 30'000);
    CHECK(receiver.buffered() == 1);
    CHECK(receiver.mute_periods().empty());
  }
  SUBCASE("arrival one microsecond late mutes the period") {
    auto muted = receiver.ingest_pdu(make_pdu(1, 40'000, 0, 10), 40'001);
    REQUIRE(muted.has_value());
    CHECK(*muted == 1); // period index of tta 40ms with epoch 0
    CHECK(receiver.period_muted(1));
    CHECK(receiver.buffered() == 0);
  }
  SUBCASE("sequence mismatch") {
    CHECK_THROWS_AS(receiver.ingest_pdu(make_pdu(1, 40'000, 0, 10, 9), 0), SimError);
  }
  SUBCASE("duplicate transfers are ignored, the first copy decides") {
    receiver.ingest_pdu(make_pdu(1, 40'000, 0, 10), 30'000);
    auto muted = receiver.ingest_pdu(make_pdu(1, 40'000, 0, 10), 40'005); // late copy
    CHECK_FALSE(muted.has_value());
    CHECK(receiver.received_octets() == 10);
    CHECK(receiver.emit_due(40'000).size() == 1);
  }
  SUBCASE("reordered on-time arrivals all buffer; emission sorts by packet number") {
    receiver.ingest_pdu(make_pdu(3, 40'000, 30, 10), 1000);
    receiver.ingest_pdu(make_pdu(1, 40'000, 0, 10), 2000);
    receiver.ingest_pdu(make_pdu(2, 40'000, 10, 20), 3000);
    CHECK(receiver.buffered() == 3);
    std::vector<DuEmission> out = receiver.emit_due(40'000);
    REQUIRE(out.size() == 3);
    CHECK(out[0].packet_number == 1);
    CHECK(out[1].packet_number == 2);
    CHECK(out[2].packet_number == 3);
  }
}

TEST_CASE("emission timing and exactly-once") {
  SUBCASE("nothing due -> empty") {
    SyncReceiverState receiver(1, params_40ms());
    CHECK(receiver.emit_due(1'000'000).empty());
  }
  SUBCASE("two dus with zero offsets emit identical (time, hash) pairs") {
    SyncReceiverState a(1, params_40ms(), 0), b(2, params_40ms(), 0);
    SyncPdu pdu = make_pdu(1, 40'000, 0, 32);
    a.ingest_pdu(pdu, 1000);
    b.ingest_pdu(pdu, 2000);
    auto ea = a.emit_due(40'000);
    auto eb = b.emit_due(40'000);
    REQUIRE(ea.size() == 1);
    REQUIRE(eb.size() == 1);
    CHECK(ea[0].air_time_us == eb[0].air_time_us);
    CHECK(ea[0].content_hash == eb[0].content_hash);
  }
  SUBCASE("clock offset shifts the air time additively") {
    SyncReceiverState skewed(3, params_40ms(), 3);
    skewed.ingest_pdu(make_pdu(1, 40'000, 0, 8), 100);
    auto out = skewed.emit_due(40'000);
    REQUIRE(out.size() == 1);
    CHECK(out[0].air_time_us == 40'003);
  }
  SUBCASE("no pdu is emitted twice") {
    SyncReceiverState receiver(1, params_40ms());
    receiver.ingest_pdu(make_pdu(1, 40'000, 0, 8), 100);
    CHECK(receiver.emit_due(40'000).size() == 1);
    CHECK(receiver.emit_due(40'000).empty());
    CHECK(receiver.emit_due(80'000).empty());
  }
}

TEST_CASE("loss detection arithmetic and muting") {
  SUBCASE("contiguous packet numbers report nothing") {
    SyncReceiverState receiver(1, params_40ms());
    receiver.ingest_pdu(make_pdu(1, 40'000, 0, 10), 100);
    receiver.ingest_pdu(make_pdu(2, 40'000, 10, 10), 200);
    CHECK(receiver.detect_loss(40'000).gaps.empty());
  }
  SUBCASE("gap octets follow the elapsed delta; same period mutes") {
    // chunks of 100, 200, 50: pdu2 (200 octets) lost, all in period 1
    SyncReceiverState receiver(1, params_40ms());
    receiver.ingest_pdu(make_pdu(1, 40'000, 0, 100), 100);
    receiver.ingest_pdu(make_pdu(3, 40'000, 300, 50), 300);
    GapReport report = receiver.detect_loss(40'000);
    REQUIRE(report.gaps.size() == 1);
    CHECK(report.gaps[0].first_missing == 2);
    CHECK(report.gaps[0].last_missing == 2);
    CHECK(report.gaps[0].missing_octets == 200);
    CHECK(report.gaps[0].muted_periods == std::vector<std::int64_t>{1});
    CHECK(receiver.period_muted(1));
    // the muted period never emits
    CHECK(receiver.emit_due(40'000).empty());
  }
  SUBCASE("gap across a period boundary leaves the next period usable") {
    SyncReceiverState receiver(1, params_40ms());
    receiver.ingest_pdu(make_pdu(1, 40'000, 0, 100), 100);
    // pdu2 carried period 1 content and is missing; pdu3 sits in period 2
    receiver.ingest_pdu(make_pdu(3, 80'000, 300, 50), 41'000);
    GapReport report = receiver.detect_loss(80'000);
    REQUIRE(report.gaps.size() == 1);
    CHECK(report.gaps[0].missing_octets == 200);
    CHECK(receiver.period_muted(1));
    CHECK_FALSE(receiver.period_muted(2));
    std::vector<DuEmission> out = receiver.emit_due(80'000);
    REQUIRE(out.size() == 1); // pdu3's period emits
    CHECK(out[0].packet_number == 3);
  }
  SUBCASE("a period that already radiated is not retro-muted") {
    SyncReceiverState receiver(1, params_40ms());
    receiver.ingest_pdu(make_pdu(1, 40'000, 0, 100), 100);
    REQUIRE(receiver.emit_due(40'000).size() == 1); // period 1 radiates
    // pdu2 (period 2) lost; pdu3 (period 3) arrives
    receiver.ingest_pdu(make_pdu(3, 120'000, 300, 50), 90'000);
    receiver.detect_loss(95'000);
    CHECK_FALSE(receiver.period_muted(1));
    CHECK(receiver.period_muted(2));
    CHECK_FALSE(receiver.period_muted(3));
  }
  SUBCASE("future periods are not muted before their air time") {
    SyncReceiverState receiver(1, params_40ms());
    receiver.ingest_pdu(make_pdu(1, 40'000, 0, 100), 100);
    receiver.ingest_pdu(make_pdu(3, 40'000, 300, 50), 200);
    GapReport early = receiver.detect_loss(10'000); // before tta
    REQUIRE(early.gaps.size() == 1);
    CHECK(early.gaps[0].muted_periods.empty());
    CHECK_FALSE(receiver.period_muted(1));
    // once due, the mute lands
    receiver.detect_loss(40'000);
    CHECK(receiver.period_muted(1));
  }
}

TEST_CASE("elapsed octets reconstruction identity") {
  // sum of gap spans + received octets == elapsed(last) + len(last)
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    SyncParams p = params_40ms();
    SyncMaster master(p, 5'000);
    std::vector<SyncPdu> all;
    Usec now = 0;
    for (int i = 0; i < 12; ++i) {
      auto pdus = master.encapsulate(
          {std::vector<std::uint8_t>(1 + rng.next_bounded(99))}, now);
      all.insert(all.end(), pdus.begin(), pdus.end());
      now += 40'000;
    }
    SyncReceiverState receiver(1, p);
    // drop a random interior subset, keep first and last
    std::set<std::uint64_t> dropped;
    for (std::size_t i = 1; i + 1 < all.size(); ++i) {
      if (rng.next_bounded(3) == 0) dropped.insert(all[i].packet_number);
    }
    std::uint64_t received_octets = 0;
    for (const SyncPdu& pdu : all) {
      if (dropped.count(pdu.packet_number)) continue;
      receiver.ingest_pdu(pdu, pdu.tta_us - 1000);
      received_octets += pdu.payload.size();
    }
    GapReport report = receiver.detect_loss(now + 100'000);
    std::uint64_t gap_octets = 0;
    for (const Gap& gap : report.gaps) gap_octets += gap.missing_octets;
    const SyncPdu& last = all.back();
    CHECK(gap_octets + received_octets == last.elapsed_octets + last.payload.size());
  }
}

TEST_CASE("bounded latency suffices: no loss, no mutes") {
  // Randomized one-way latencies <= L with headroom L: every pdu arrives by
  // its tta, nothing ever mutes. Constructive check over many draws.
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    Usec max_latency = 1000 + static_cast<Usec>(rng.next_bounded(20'000));
    SyncParams p = params_40ms();
    SyncMaster master(p, max_latency);
    std::vector<SyncReceiverState> receivers;
    std::vector<Usec> latencies;
    for (int du = 1; du <= 3; ++du) {
      receivers.emplace_back(du, p);
      latencies.push_back(static_cast<Usec>(rng.next_bounded(max_latency)));
    }
    Usec now = 0;
    for (int chunk = 0; chunk < 25; ++chunk) {
      auto pdus = master.encapsulate({std::vector<std::uint8_t>(64)}, now);
      for (std::size_t d = 0; d < receivers.size(); ++d) {
        for (const SyncPdu& pdu : pdus) {
          Usec arrival = now + latencies[d];
          CHECK(arrival <= pdu.tta_us);
          receivers[d].ingest_pdu(pdu, arrival);
        }
      }
      now += 13'000 + static_cast<Usec>(rng.next_bounded(40'000));
    }
    for (auto& receiver : receivers) {
      receiver.detect_loss(now + 1'000'000);
      receiver.emit_due(now + 1'000'000);
      CHECK(receiver.mute_periods().empty());
      CHECK(receiver.buffered() == 0);
    }
  }
}

TEST_CASE("sfn alignment property: identical emissions across receivers") {
  // Every period: the multiset of (time, hash) over non-muted receivers is a
  // single repeated element.
  SyncParams p = params_40ms();
  SyncMaster master(p, 5'000);
  std::vector<SyncReceiverState> receivers;
  for (int du = 1; du <= 3; ++du) receivers.emplace_back(du, p);

  std::map<std::int64_t, std::set<std::pair<Usec, std::uint64_t>>> per_period;
  Usec now = 0;
  for (int chunk = 0; chunk < 30; ++chunk) {
    auto pdus = master.encapsulate({std::vector<std::uint8_t>(32, std::uint8_t(chunk))},
                                   now);
    for (auto& receiver : receivers) {
      for (const SyncPdu& pdu : pdus) receiver.ingest_pdu(pdu, now + 2'000);
    }
    now += 40'000;
  }
  for (auto& receiver : receivers) {
    for (const DuEmission& em : receiver.emit_due(now + 1'000'000)) {
      per_period[em.period].insert({em.air_time_us, em.content_hash});
    }
  }
  CHECK_FALSE(per_period.empty());
  for (const auto& [period, tuples] : per_period) {
    CHECK(tuples.size() == 1); // all three receivers agree exactly
  }
}

TEST_CASE("loss at one receiver leaves the others emitting") {
  SyncParams p = params_40ms();
  SyncMaster master(p, 5'000);
  SyncReceiverState healthy(1, p), lossy(2, p);
  Usec now = 0;
  std::vector<SyncPdu> stream;
  for (int chunk = 0; chunk < 3; ++chunk) {
    auto pdus = master.encapsulate({std::vector<std::uint8_t>(16)}, now);
    stream.insert(stream.end(), pdus.begin(), pdus.end());
    now += 40'000;
  }
  for (const SyncPdu& pdu : stream) {
    healthy.ingest_pdu(pdu, pdu.tta_us - 1000);
    if (pdu.packet_number != 2) lossy.ingest_pdu(pdu, pdu.tta_us - 1000);
  }
  healthy.detect_loss(now + 100'000);
  lossy.detect_loss(now + 100'000);
  CHECK(healthy.mute_periods().empty());
  CHECK(healthy.emit_due(now + 100'000).size() == 3);
  CHECK_FALSE(lossy.mute_periods().empty());
}
