#ifndef RANSIM_RAN_SYNC_H
#define RANSIM_RAN_SYNC_H

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "ransim/topology.h"
#include "ransim/types.h"

namespace ransim {

struct SyncParams {
  Usec sync_period_ms = 0;
  std::uint32_t sync_sequence = 0;
  Usec epoch_us = 0; // common-time-reference origin of period 0

  Usec period_us() const { return sync_period_ms * kUsecPerMs; }
};

// Encapsulation unit. Every field is needed to reproduce the over-the-air
// schedule at each DU: tta_us says when, packet_number orders, elapsed_octets
// sizes what went before.
struct SyncPdu {
  std::uint32_t sync_sequence = 0;
  std::uint64_t packet_number = 0; // strictly increasing per sequence, from 1
  Usec tta_us = 0;                 // absolute Time-to-Air, period-aligned
  std::uint64_t elapsed_octets = 0; // payload octets of all prior pdus
  std::vector<std::uint8_t> payload;

  std::uint64_t content_hash() const { return fnv1a(payload.data(), payload.size()); }
};

// Fixed wire form, big-endian: sequence(4) packet_number(8) tta_us(8)
// elapsed_octets(8) payload_length(4) payload.
std::vector<std::uint8_t> serialize_sync_pdu(const SyncPdu& pdu);
SyncPdu parse_sync_pdu(const std::vector<std::uint8_t>& wire);

struct SyncProposal {
  Usec sync_period_ms = 40;
  std::uint32_t sync_sequence = 1;
};

struct NegotiationOutcome {
  SyncParams params;
  // One-way latency from the master to each participant DU.
  std::map<int, Usec> control_latency_us; // F1-M, relayed over Xn-C if needed
  std::map<int, Usec> data_latency_us;    // F1-U, relayed over Xn-U if needed
  Usec max_control_latency_us = 0;
  Usec max_data_latency_us = 0;
};

// SFN setup: the master CU (must hold the MC role) fixes period, sequence and
// epoch for all participants. epoch >= now + max one-way control latency, so
// no participant learns the parameters after period 0 has started.
// UnreachableParticipant if a DU has no F1-M (or Xn-relayed) path.
NegotiationOutcome negotiate_sync_params(const Topology& t, int master_cu_id,
                                         const std::vector<int>& participant_dus,
                                         const SyncProposal& proposal, Usec now_us);

// Sender side: constant encapsulation of the multicast byte stream.
class SyncMaster {
public:
  SyncMaster(const SyncParams& params, Usec tta_headroom_us)
      : params_(params), headroom_us_(tta_headroom_us) {}

  // Each chunk becomes one pdu stamped with the first period boundary
  // strictly after now + headroom. Chunks of one call share the boundary.
  std::vector<SyncPdu> encapsulate(const std::vector<std::vector<std::uint8_t>>& chunks,
                                   Usec now_us);

  const SyncParams& params() const { return params_; }
  Usec headroom_us() const { return headroom_us_; }
  std::uint64_t next_packet_number() const { return next_packet_number_; }

private:
  SyncParams params_;
  Usec headroom_us_;
  std::uint64_t next_packet_number_ = 1;
  std::uint64_t total_octets_ = 0;
};

Usec next_boundary_after(const SyncParams& params, Usec t_us);
std::int64_t period_of(const SyncParams& params, Usec tta_us);

struct DuEmission {
  int du_id = 0;
  std::uint64_t packet_number = 0;
  std::int64_t period = 0;
  Usec air_time_us = 0; // tta + DU clock offset
  std::uint64_t content_hash = 0;
  std::uint32_t payload_octets = 0;
};

struct Gap {
  std::uint64_t first_missing = 0;
  std::uint64_t last_missing = 0;
  std::uint64_t missing_octets = 0;
  std::vector<std::int64_t> muted_periods; // periods newly muted by this gap
};

struct GapReport {
  std::vector<Gap> gaps; // all currently open gaps, ascending
};

// Receiver side: one per DU, no state shared between receivers.
class SyncReceiverState {
public:
  SyncReceiverState() = default;
  SyncReceiverState(int du_id, const SyncParams& params, Usec clock_offset_us = 0)
      : du_id_(du_id), params_(params), clock_offset_us_(clock_offset_us) {}

  // Buffers on-time pdus; a pdu arriving after its own tta mutes its period
  // (the DU cannot transmit content it received after air time) and the
  // muted period index comes back. SequenceMismatch if the pdu belongs to a
  // different sync sequence.
  std::optional<std::int64_t> ingest_pdu(const SyncPdu& pdu, Usec arrival_us);

  // Reports every open packet-number gap and mutes the periods the missing
  // pdus may belong to. A gap between pdus of one period mutes exactly that
  // period; a gap spanning a period boundary mutes [period(prev),
  // period(next)). A period is only muted once its air time has passed
  // (earlier the pdus may still arrive) and never after it already emitted.
  GapReport detect_loss(Usec now_us);

  // Emits, exactly once, every buffered pdu with tta <= now whose period is
  // not muted. Buffered pdus of muted periods are dropped unsent.
  std::vector<DuEmission> emit_due(Usec now_us);

  int du_id() const { return du_id_; }
  const SyncParams& params() const { return params_; }
  std::uint64_t next_expected() const { return next_expected_; }
  const std::set<std::int64_t>& mute_periods() const { return mute_periods_; }
  bool period_muted(std::int64_t period) const { return mute_periods_.count(period) > 0; }
  bool period_emitted(std::int64_t period) const { return emitted_periods_.count(period) > 0; }
  std::uint64_t received_octets() const { return received_octets_; }
  std::size_t buffered() const { return buffer_.size(); }
  std::uint64_t dropped_muted() const { return dropped_muted_; }

private:
  struct ReceivedInfo {
    Usec tta_us = 0;
    std::uint64_t elapsed_octets = 0;
    std::uint32_t length = 0;
  };

  void mute(std::int64_t period) { mute_periods_.insert(period); }

  int du_id_ = 0;
  SyncParams params_;
  Usec clock_offset_us_ = 0;
  std::map<std::uint64_t, SyncPdu> buffer_;       // pending, keyed by packet number
  std::map<std::uint64_t, ReceivedInfo> received_; // everything seen, incl. late
  std::uint64_t next_expected_ = 1;
  std::set<std::int64_t> mute_periods_;
  std::set<std::int64_t> emitted_periods_;
  std::uint64_t received_octets_ = 0;
  std::uint64_t dropped_muted_ = 0;
};

} // namespace ransim

#endif // RANSIM_RAN_SYNC_H
