#ifndef RANSIM_BEARER_SWITCHING_H
#define RANSIM_BEARER_SWITCHING_H

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "ransim/types.h"

namespace ransim {

struct MeasurementReport {
  int ue_id = 0;
  int cell_id = 0;
  double ss_rsrp_dbm = 0.0;
  std::optional<double> csi_rsrp_dbm;
  std::optional<double> ss_rsrq_db;
  std::optional<double> csi_rsrq_db;
  Usec timestamp_us = 0;
};

// Plausible reporting range; scenario policies may widen it.
constexpr double kRsrpMinDbm = -156.0;
constexpr double kRsrpMaxDbm = -31.0;

enum class RlcMode { UM, AM, TM };

const char* to_string(RlcMode mode);

struct RlcConfig {
  RlcMode mode = RlcMode::UM;
  int sn_field_length_bits = 12; // 6, 12 or 18
  int reassembly_timer_ms = 50;
};

struct XrbConfig {
  int xrb_id = 0;
  double rsrp_threshold_dbm = -110.0;
  int min_multicast_ues = 1;
  RlcConfig unicast_rlc;
  RlcConfig multicast_rlc;
  int dtch_logical_channel_id = 0;
  int xtch_logical_channel_id = 0;
  Usec report_staleness_us = 200 * kUsecPerMs;
};

enum class ChannelKind { Dtch, Xtch };

const char* to_string(ChannelKind kind);

// PRB cost of delivering the reference payload at a given MCS. Monotone
// non-increasing in the index: a better MCS never needs more PRBs.
struct PrbCostModel {
  std::vector<int> cost_per_mcs; // index 0..28

  static PrbCostModel shipped();

  int cost(int mcs_index) const;
  // UE-side MCS from the reported RSRP: 3 dB per index above -120 dBm,
  // clamped to [0, 28]. Missing report -> most robust MCS (0).
  int mcs_from_rsrp(std::optional<double> rsrp_dbm) const;
};

struct SwitchingDecision {
  std::map<int, ChannelKind> assignment; // every interested UE
  int estimated_prb_cost_unicast = 0;    // unicast alternative for the Xtch set
  int estimated_prb_cost_multicast = 0;  // one copy at the worst Xtch UE's MCS
  double gain = 1.0;                     // unicast / multicast, 1.0 when no Xtch

  std::vector<int> ues_on(ChannelKind kind) const;
};

// XRB entities instantiated at the DU. Unicast transport always exists;
// multicast is added once and reused.
struct RlcEntity {
  ChannelKind kind = ChannelKind::Dtch;
  int logical_channel_id = 0;
  RlcConfig config;
};

class XrbSwitch {
public:
  // Sets up (or re-validates) the RLC entity pair for an XRB. Re-configuring
  // the same xrb_id is idempotent: no duplicate XTCH entity is created.
  // InvalidRlcMode if AM is requested on the multicast leg.
  const XrbConfig& configure_xrb(const XrbConfig& config);

  bool configured(int xrb_id) const { return configs_.count(xrb_id) > 0; }
  const XrbConfig& config(int xrb_id) const;
  const std::vector<RlcEntity>& entities(int xrb_id) const;

private:
  std::map<int, XrbConfig> configs_;
  std::map<int, std::vector<RlcEntity>> entities_;
};

// Chooses, per interested UE, unicast (DTCH) or multicast (XTCH) transport.
//   1. no report, or one older than the staleness bound -> Xtch candidate;
//   2. fresh report below the RSRP threshold -> Dtch, at/above -> candidate;
//   3. fewer candidates than min_multicast_ues -> everyone goes Dtch.
// The result minimizes total PRB cost under those constraints, multicast
// being one shared copy at the worst member's MCS. EmptyUeSet if no UEs.
SwitchingDecision decide_channels(const std::vector<int>& interested_ues,
                                  const std::map<int, MeasurementReport>& latest_reports,
                                  const XrbConfig& config, Usec now_us,
                                  const PrbCostModel& cost_model = PrbCostModel::shipped());

struct PdcpPdu {
  std::uint32_t sequence_number = 0;
  std::vector<std::uint8_t> payload;
};

struct RoutedCopy {
  ChannelKind channel = ChannelKind::Dtch;
  int logical_channel_id = 0;
  std::vector<int> target_ues; // all Xtch UEs for the shared XTCH copy
  PdcpPdu pdu;
};

// One shared XTCH copy if anyone listens multicast, one DTCH copy per
// unicast UE, plus optional extra DTCH copies to Xtch UEs for reliability
// duplication. UndecidedUe if a target has no assignment.
std::vector<RoutedCopy> route_pdu(const PdcpPdu& pdu, const SwitchingDecision& decision,
                                  const XrbConfig& config,
                                  const std::set<int>& duplicate_to_dtch = {});

enum class DedupVerdict { Deliver, Discard };

// Per-UE PDCP sequence-number window. First occurrence inside the window
// delivers, repeats discard, regardless of which channel carried the copy.
class PdcpDedupState {
public:
  explicit PdcpDedupState(std::uint32_t window_size = 4096) : window_size_(window_size) {}

  DedupVerdict receive(int ue_id, std::uint32_t sequence_number);

private:
  struct UeWindow {
    std::uint32_t highest = 0;
    bool any = false;
    std::set<std::uint32_t> seen;
  };

  std::uint32_t window_size_;
  std::map<int, UeWindow> windows_;
};

} // namespace ransim

#endif // RANSIM_BEARER_SWITCHING_H
