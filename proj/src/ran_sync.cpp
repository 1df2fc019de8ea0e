#include "ransim/ran_sync.h"

#include <algorithm>

namespace ransim {

namespace {

void put_be(std::vector<std::uint8_t>& out, std::uint64_t value, int octets) {
  for (int i = octets - 1; i >= 0; --i) {
    out.push_back(static_cast<std::uint8_t>((value >> (8 * i)) & 0xff));
  }
}

std::uint64_t get_be(const std::vector<std::uint8_t>& in, std::size_t& pos, int octets) {
  std::uint64_t value = 0;
  for (int i = 0; i < octets; ++i) {
    value = (value << 8) | in[pos++];
  }
  return value;
}

} // namespace

std::vector<std::uint8_t> serialize_sync_pdu(const SyncPdu& pdu) {
  std::vector<std::uint8_t> wire;
  wire.reserve(32 + pdu.payload.size());
  put_be(wire, pdu.sync_sequence, 4);
  put_be(wire, pdu.packet_number, 8);
  put_be(wire, static_cast<std::uint64_t>(pdu.tta_us), 8);
  put_be(wire, pdu.elapsed_octets, 8);
  put_be(wire, pdu.payload.size(), 4);
  wire.insert(wire.end(), pdu.payload.begin(), pdu.payload.end());
  return wire;
}

SyncPdu parse_sync_pdu(const std::vector<std::uint8_t>& wire) {
  if (wire.size() < 32) {
    fail(ErrorCode::InvalidValue, "sync pdu shorter than fixed header");
  }
  std::size_t pos = 0;
  SyncPdu pdu;
  pdu.sync_sequence = static_cast<std::uint32_t>(get_be(wire, pos, 4));
  pdu.packet_number = get_be(wire, pos, 8);
  pdu.tta_us = static_cast<Usec>(get_be(wire, pos, 8));
  pdu.elapsed_octets = get_be(wire, pos, 8);
  std::uint64_t len = get_be(wire, pos, 4);
  if (wire.size() - pos != len) {
    fail(ErrorCode::InvalidValue, "sync pdu payload length mismatch");
  }
  pdu.payload.assign(wire.begin() + static_cast<std::ptrdiff_t>(pos), wire.end());
  return pdu;
}

namespace {

// One-way latency from master CU to a DU over the given control/user plane
// pair, relaying over Xn when the DU hangs off another CU. nullopt when no
// path exists.
std::optional<Usec> path_latency(const Topology& t, int master_cu, int du_id,
                                 InterfaceKind direct_kind, InterfaceKind relay_kind) {
  NodeRef master{NodeKind::Cu, master_cu};
  NodeRef du{NodeKind::Du, du_id};
  if (const Link* direct = t.find_link(master, du, direct_kind)) {
    return direct->latency_us;
  }
  auto parent = t.cu_of_du(du_id);
  if (!parent || *parent == master_cu) {
    return std::nullopt;
  }
  NodeRef parent_ref{NodeKind::Cu, *parent};
  const Link* xn = t.find_link(master, parent_ref, relay_kind);
  const Link* last_hop = t.find_link(parent_ref, du, direct_kind);
  if (xn == nullptr || last_hop == nullptr) {
    return std::nullopt;
  }
  return xn->latency_us + last_hop->latency_us;
}

} // namespace

NegotiationOutcome negotiate_sync_params(const Topology& t, int master_cu_id,
                                         const std::vector<int>& participant_dus,
                                         const SyncProposal& proposal, Usec now_us) {
  const GnbCu& master = t.cu(master_cu_id);
  if (!master.roles.mc) {
    fail(ErrorCode::InvalidValue,
         "cu " + std::to_string(master_cu_id) + " lacks the MC role");
  }
  if (proposal.sync_period_ms <= 0) {
    fail(ErrorCode::InvalidValue, "sync period must be positive");
  }

  NegotiationOutcome out;
  for (int du_id : participant_dus) {
    t.du(du_id);
    auto control =
        path_latency(t, master_cu_id, du_id, InterfaceKind::F1M, InterfaceKind::XnC);
    if (!control) {
      fail(ErrorCode::UnreachableParticipant,
           "du " + std::to_string(du_id) + " has no F1-M path from cu " +
               std::to_string(master_cu_id));
    }
    auto data =
        path_latency(t, master_cu_id, du_id, InterfaceKind::F1U, InterfaceKind::XnU);
    if (!data) {
      fail(ErrorCode::UnreachableParticipant,
           "du " + std::to_string(du_id) + " has no F1-U path from cu " +
               std::to_string(master_cu_id));
    }
    out.control_latency_us[du_id] = *control;
    out.data_latency_us[du_id] = *data;
    out.max_control_latency_us = std::max(out.max_control_latency_us, *control);
    out.max_data_latency_us = std::max(out.max_data_latency_us, *data);
  }

  out.params.sync_period_ms = proposal.sync_period_ms;
  out.params.sync_sequence = proposal.sync_sequence;
  out.params.epoch_us = now_us + out.max_control_latency_us;
  return out;
}

Usec next_boundary_after(const SyncParams& params, Usec t_us) {
  Usec period = params.period_us();
  if (t_us < params.epoch_us) {
    return params.epoch_us;
  }
  Usec k = (t_us - params.epoch_us) / period + 1;
  return params.epoch_us + k * period;
}

std::int64_t period_of(const SyncParams& params, Usec tta_us) {
  return (tta_us - params.epoch_us) / params.period_us();
}

std::vector<SyncPdu> SyncMaster::encapsulate(
    const std::vector<std::vector<std::uint8_t>>& chunks, Usec now_us) {
  std::vector<SyncPdu> pdus;
  if (chunks.empty()) {
    return pdus;
  }
  Usec tta = next_boundary_after(params_, now_us + headroom_us_);
  pdus.reserve(chunks.size());
  for (const auto& chunk : chunks) {
    SyncPdu pdu;
    pdu.sync_sequence = params_.sync_sequence;
    pdu.packet_number = next_packet_number_++;
    pdu.tta_us = tta;
    pdu.elapsed_octets = total_octets_;
    pdu.payload = chunk;
    total_octets_ += chunk.size();
    pdus.push_back(std::move(pdu));
  }
  return pdus;
}

std::optional<std::int64_t> SyncReceiverState::ingest_pdu(const SyncPdu& pdu,
                                                          Usec arrival_us) {
  if (pdu.sync_sequence != params_.sync_sequence) {
    fail(ErrorCode::SequenceMismatch,
         "pdu sequence " + std::to_string(pdu.sync_sequence) + " != " +
             std::to_string(params_.sync_sequence));
  }
  if (received_.count(pdu.packet_number)) {
    return std::nullopt; // duplicate transfer, first copy decides
  }
  ReceivedInfo info;
  info.tta_us = pdu.tta_us;
  info.elapsed_octets = pdu.elapsed_octets;
  info.length = static_cast<std::uint32_t>(pdu.payload.size());
  received_[pdu.packet_number] = info;
  received_octets_ += pdu.payload.size();

  std::optional<std::int64_t> muted_now;
  if (arrival_us > pdu.tta_us) {
    // Arrived after air time: the period already radiated (or should have)
    // without this content, so the whole period is unusable here.
    std::int64_t period = period_of(params_, pdu.tta_us);
    if (!mute_periods_.count(period)) muted_now = period;
    mute(period);
  } else {
    buffer_[pdu.packet_number] = pdu;
  }

  while (received_.count(next_expected_)) {
    ++next_expected_;
  }
  return muted_now;
}

GapReport SyncReceiverState::detect_loss(Usec now_us) {
  GapReport report;
  if (received_.empty()) {
    return report;
  }
  std::int64_t due_period = now_us >= params_.epoch_us ? period_of(params_, now_us) : -1;

  auto close_gap = [&](std::uint64_t first_missing, std::uint64_t last_missing,
                       const ReceivedInfo* prev, const ReceivedInfo& next) {
    Gap gap;
    gap.first_missing = first_missing;
    gap.last_missing = last_missing;
    std::uint64_t have_before = prev ? prev->elapsed_octets + prev->length : 0;
    gap.missing_octets = next.elapsed_octets - have_before;

    std::int64_t next_period = period_of(params_, next.tta_us);
    std::int64_t prev_period = prev ? period_of(params_, prev->tta_us) : next_period;
    std::int64_t lo = prev_period;
    std::int64_t hi = (prev_period == next_period) ? next_period : next_period - 1;
    for (std::int64_t p = lo; p <= hi; ++p) {
      // A period is final once its air time has been reached; earlier than
      // that the missing pdus may still arrive in time. A period whose
      // content already radiated is past muting.
      if (p <= due_period && !mute_periods_.count(p) && !emitted_periods_.count(p)) {
        gap.muted_periods.push_back(p);
        mute(p);
      }
    }
    report.gaps.push_back(std::move(gap));
  };

  std::uint64_t expected = next_expected_;
  const ReceivedInfo* prev = nullptr;
  if (expected > 1) {
    prev = &received_.at(expected - 1);
  }
  for (auto it = received_.lower_bound(expected); it != received_.end(); ++it) {
    if (it->first > expected) {
      close_gap(expected, it->first - 1, prev, it->second);
    }
    expected = it->first + 1;
    prev = &it->second;
  }
  return report;
}

std::vector<DuEmission> SyncReceiverState::emit_due(Usec now_us) {
  std::vector<DuEmission> out;
  for (auto it = buffer_.begin(); it != buffer_.end();) {
    const SyncPdu& pdu = it->second;
    if (pdu.tta_us > now_us) {
      ++it;
      continue;
    }
    std::int64_t period = period_of(params_, pdu.tta_us);
    if (mute_periods_.count(period)) {
      ++dropped_muted_;
      it = buffer_.erase(it);
      continue;
    }
    DuEmission emission;
    emission.du_id = du_id_;
    emission.packet_number = pdu.packet_number;
    emission.period = period;
    emission.air_time_us = pdu.tta_us + clock_offset_us_;
    emission.content_hash = pdu.content_hash();
    emission.payload_octets = static_cast<std::uint32_t>(pdu.payload.size());
    out.push_back(emission);
    emitted_periods_.insert(period);
    it = buffer_.erase(it);
  }
  std::sort(out.begin(), out.end(), [](const DuEmission& a, const DuEmission& b) {
    return a.packet_number < b.packet_number;
  });
  return out;
}

} // namespace ransim
