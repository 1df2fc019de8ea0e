#include "ransim/bearer_switching.h"

#include <algorithm>
#include <cmath>

namespace ransim {

const char* to_string(RlcMode mode) {
  switch (mode) {
    case RlcMode::UM: return "um";
    case RlcMode::AM: return "am";
    case RlcMode::TM: return "tm";
  }
  return "?";
}

const char* to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::Dtch: return "dtch";
    case ChannelKind::Xtch: return "xtch";
  }
  return "?";
}

PrbCostModel PrbCostModel::shipped() {
  PrbCostModel model;
  model.cost_per_mcs.resize(29);
  for (int m = 0; m <= 28; ++m) {
    model.cost_per_mcs[static_cast<std::size_t>(m)] = (60 + m + 1) / (m + 2); // ceil
  }
  return model;
}

int PrbCostModel::cost(int mcs_index) const {
  if (mcs_index < 0 || mcs_index >= static_cast<int>(cost_per_mcs.size())) {
    fail(ErrorCode::InvalidValue, "mcs index " + std::to_string(mcs_index));
  }
  return cost_per_mcs[static_cast<std::size_t>(mcs_index)];
}

int PrbCostModel::mcs_from_rsrp(std::optional<double> rsrp_dbm) const {
  if (!rsrp_dbm) {
    return 0;
  }
  int mcs = static_cast<int>(std::floor((*rsrp_dbm + 120.0) / 3.0));
  return std::clamp(mcs, 0, 28);
}

std::vector<int> SwitchingDecision::ues_on(ChannelKind kind) const {
  std::vector<int> out;
  for (const auto& [ue, assigned] : assignment) {
    if (assigned == kind) out.push_back(ue);
  }
  return out;
}

const XrbConfig& XrbSwitch::configure_xrb(const XrbConfig& config) {
  if (config.multicast_rlc.mode == RlcMode::AM) {
    // No uplink feedback path on a multicast channel.
    fail(ErrorCode::InvalidRlcMode, "xtch cannot run acknowledged mode");
  }
  if (config.dtch_logical_channel_id == config.xtch_logical_channel_id) {
    fail(ErrorCode::InvalidValue, "dtch and xtch logical channel ids must differ");
  }
  if (config.min_multicast_ues < 1) {
    fail(ErrorCode::InvalidValue, "min_multicast_ues must be >= 1");
  }

  auto it = entities_.find(config.xrb_id);
  if (it == entities_.end()) {
    std::vector<RlcEntity> pair;
    pair.push_back(RlcEntity{ChannelKind::Dtch, config.dtch_logical_channel_id,
                             config.unicast_rlc});
    pair.push_back(RlcEntity{ChannelKind::Xtch, config.xtch_logical_channel_id,
                             config.multicast_rlc});
    entities_[config.xrb_id] = std::move(pair);
  }
  // Multicast transport already configured: keep the existing entities.
  configs_[config.xrb_id] = config;
  return configs_.at(config.xrb_id);
}

const XrbConfig& XrbSwitch::config(int xrb_id) const {
  auto it = configs_.find(xrb_id);
  if (it == configs_.end()) {
    fail(ErrorCode::InvalidValue, "xrb " + std::to_string(xrb_id) + " not configured");
  }
  return it->second;
}

const std::vector<RlcEntity>& XrbSwitch::entities(int xrb_id) const {
  auto it = entities_.find(xrb_id);
  if (it == entities_.end()) {
    fail(ErrorCode::InvalidValue, "xrb " + std::to_string(xrb_id) + " not configured");
  }
  return it->second;
}

SwitchingDecision decide_channels(const std::vector<int>& interested_ues,
                                  const std::map<int, MeasurementReport>& latest_reports,
                                  const XrbConfig& config, Usec now_us,
                                  const PrbCostModel& cost_model) {
  if (interested_ues.empty()) {
    fail(ErrorCode::EmptyUeSet, "decide_channels needs at least one UE");
  }

  SwitchingDecision decision;
  std::vector<int> candidates;
  std::map<int, int> ue_mcs;

  for (int ue : interested_ues) {
    auto it = latest_reports.find(ue);
    bool fresh = it != latest_reports.end() &&
                 now_us - it->second.timestamp_us <= config.report_staleness_us;
    if (!fresh) {
      // No usable measurement: route through multicast transport.
      candidates.push_back(ue);
      ue_mcs[ue] = cost_model.mcs_from_rsrp(std::nullopt);
      continue;
    }
    double rsrp = it->second.ss_rsrp_dbm;
    ue_mcs[ue] = cost_model.mcs_from_rsrp(rsrp);
    if (rsrp < config.rsrp_threshold_dbm) {
      decision.assignment[ue] = ChannelKind::Dtch;
    } else {
      candidates.push_back(ue);
    }
  }

  bool multicast_on = static_cast<int>(candidates.size()) >= config.min_multicast_ues;
  for (int ue : candidates) {
    decision.assignment[ue] = multicast_on ? ChannelKind::Xtch : ChannelKind::Dtch;
  }

  int worst_mcs = 28;
  int unicast_sum = 0;
  bool any_xtch = false;
  for (const auto& [ue, assigned] : decision.assignment) {
    if (assigned == ChannelKind::Xtch) {
      any_xtch = true;
      worst_mcs = std::min(worst_mcs, ue_mcs.at(ue));
      unicast_sum += cost_model.cost(ue_mcs.at(ue));
    }
  }
  if (any_xtch) {
    decision.estimated_prb_cost_unicast = unicast_sum;
    decision.estimated_prb_cost_multicast = cost_model.cost(worst_mcs);
    decision.gain = static_cast<double>(decision.estimated_prb_cost_unicast) /
                    static_cast<double>(decision.estimated_prb_cost_multicast);
  }
  return decision;
}

std::vector<RoutedCopy> route_pdu(const PdcpPdu& pdu, const SwitchingDecision& decision,
                                  const XrbConfig& config,
                                  const std::set<int>& duplicate_to_dtch) {
  std::vector<RoutedCopy> copies;
  std::vector<int> xtch_ues = decision.ues_on(ChannelKind::Xtch);
  if (!xtch_ues.empty()) {
    RoutedCopy shared;
    shared.channel = ChannelKind::Xtch;
    shared.logical_channel_id = config.xtch_logical_channel_id;
    shared.target_ues = xtch_ues;
    shared.pdu = pdu;
    copies.push_back(std::move(shared));
  }
  for (const auto& [ue, assigned] : decision.assignment) {
    if (assigned == ChannelKind::Dtch) {
      RoutedCopy copy;
      copy.channel = ChannelKind::Dtch;
      copy.logical_channel_id = config.dtch_logical_channel_id;
      copy.target_ues = {ue};
      copy.pdu = pdu;
      copies.push_back(std::move(copy));
    }
  }
  for (int ue : duplicate_to_dtch) {
    auto it = decision.assignment.find(ue);
    if (it == decision.assignment.end()) {
      fail(ErrorCode::UndecidedUe, "ue " + std::to_string(ue) + " has no assignment");
    }
    if (it->second != ChannelKind::Xtch) {
      continue; // already receiving a dedicated copy
    }
    RoutedCopy copy;
    copy.channel = ChannelKind::Dtch;
    copy.logical_channel_id = config.dtch_logical_channel_id;
    copy.target_ues = {ue};
    copy.pdu = pdu;
    copies.push_back(std::move(copy));
  }
  return copies;
}

DedupVerdict PdcpDedupState::receive(int ue_id, std::uint32_t sequence_number) {
  UeWindow& w = windows_[ue_id];
  if (!w.any) {
    w.any = true;
    w.highest = sequence_number;
    w.seen.insert(sequence_number);
    return DedupVerdict::Deliver;
  }
  if (sequence_number > w.highest) {
    w.highest = sequence_number;
    w.seen.insert(sequence_number);
    // Window advanced: forget everything below the new low edge.
    std::uint32_t low =
        w.highest >= window_size_ ? w.highest - window_size_ + 1 : 0;
    w.seen.erase(w.seen.begin(), w.seen.lower_bound(low));
    return DedupVerdict::Deliver;
  }
  std::uint32_t low = w.highest >= window_size_ ? w.highest - window_size_ + 1 : 0;
  if (sequence_number < low) {
    // Below the window: indistinguishable from a new wraparound transmission.
    return DedupVerdict::Deliver;
  }
  if (w.seen.insert(sequence_number).second) {
    return DedupVerdict::Deliver;
  }
  return DedupVerdict::Discard;
}

} // namespace ransim
