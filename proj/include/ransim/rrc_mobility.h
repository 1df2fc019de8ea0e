#ifndef RANSIM_RRC_MOBILITY_H
#define RANSIM_RRC_MOBILITY_H

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ransim/rbma.h"
#include "ransim/topology.h"
#include "ransim/types.h"

namespace ransim {

enum class RrcState { Connected, Inactive, Idle };
enum class UeCapability { Normal, ReceiveOnly };
enum class CmState { CmConnected, CmIdle };

const char* to_string(RrcState state);
const char* to_string(UeCapability capability);

enum class ActivityKind { UnicastData, MulticastInterest };

const char* to_string(ActivityKind kind);

struct UeContext {
  int ue_id = 0;
  RrcState rrc_state = RrcState::Idle;
  UeCapability capability = UeCapability::Normal;
  int serving_cell = 0;
  std::optional<int> anchor_gnb;          // CU id of the last serving gNB
  std::optional<int> rbma_id;             // valid in Inactive
  std::optional<std::uint32_t> g_rnti;    // valid in Inactive
  CmState cm_state = CmState::CmIdle;
  Usec last_unicast_activity_us = 0;
  // Scenario 1: a Connected UE takes its multicast over unicast bearers.
  bool multicast_over_unicast = false;
};

struct InactivityPolicy {
  Usec inactivity_timeout_us = 10'000'000;   // Connected -> Inactive
  Usec idle_release_timeout_us = 60'000'000; // -> Idle

  void validate() const {
    if (inactivity_timeout_us <= 0 || idle_release_timeout_us <= 0 ||
        inactivity_timeout_us >= idle_release_timeout_us) {
      fail(ErrorCode::InvalidValue,
           "inactivity timeout must be positive and below the idle-release timeout");
    }
  }
};

struct ReselectOutcome {
  bool update_required = false; // false: 2(a), silent; true: 2(b), RBMA update
  int new_cell = 0;
  std::optional<int> assigned_rbma; // filled by the network side on update
};

struct ResumeOutcome {
  Usec resume_latency_us = 0;
};

// Receive-only devices: the network holds no context at all. This record
// exists only on the harness side for coverage accounting.
struct RomUe {
  int ue_id = 0;
  int camped_cell = 0;
};

// Per-UE RRC state machines plus the ROM ghost table. Mutated only by the
// event loop; reads are safe anywhere.
class UeRegistry {
public:
  explicit UeRegistry(InactivityPolicy policy = {}) : policy_(policy) {
    policy_.validate();
  }

  const InactivityPolicy& policy() const { return policy_; }

  UeContext& add_ue(int ue_id, int serving_cell, RrcState initial = RrcState::Idle);
  void add_rom_ue(int ue_id, int camped_cell);

  bool is_rom(int ue_id) const { return rom_ues_.count(ue_id) > 0; }
  void rom_camp(int ue_id, int cell_id) { rom_ues_.at(ue_id).camped_cell = cell_id; }
  bool has_context(int ue_id) const { return contexts_.count(ue_id) > 0; }
  UeContext& context(int ue_id);
  const UeContext& context(int ue_id) const;
  const std::map<int, UeContext>& contexts() const { return contexts_; }
  const std::map<int, RomUe>& rom_ues() const { return rom_ues_; }

  // Unicast data resumes Idle/Inactive UEs to Connected and refreshes the
  // activity clock; multicast interest on a Connected UE is served over
  // unicast bearers. RomUeHasNoContext for receive-only devices.
  UeContext& report_activity(int ue_id, ActivityKind kind, Usec now_us);

  // Connected -> Inactive once the inactivity timeout has expired. Stores the
  // PTM group identity (G-RNTI) and the RBMA the UE may roam in; CM state
  // stays connected, anchor is the last serving gNB.
  UeContext& suspend_to_inactive(const Topology& t, int ue_id, int rbma_id,
                                 std::uint32_t g_rnti, Usec now_us);

  // Inactive reselection. Inside the stored RBMA: purely local, zero uplink
  // messages. Outside: an RBMA update is required before further multicast
  // delivery; the caller (network side) assigns the covering RBMA.
  ReselectOutcome cell_reselect(const Topology& t, const RbmaRegistry& rbmas,
                                int ue_id, int new_cell, Usec now_us);

  // Applies the network's answer to a 2(b) update.
  UeContext& apply_rbma_update(int ue_id, int new_rbma, std::uint32_t g_rnti);

  // -> Idle once the idle-release timeout has expired: connection to the core
  // is released, RAN context dropped. The UE keeps receiving SFN broadcast.
  UeContext& release_to_idle(int ue_id, Usec now_us);

  // Inactive -> Connected using the stored context: a control round trip to
  // the anchor gNB only, strictly cheaper than a full Idle -> Connected setup.
  ResumeOutcome resume_to_connected(const Topology& t, int ue_id, Usec now_us);

private:
  InactivityPolicy policy_;
  std::map<int, UeContext> contexts_;
  std::map<int, RomUe> rom_ues_;
};

struct LatencyModel {
  Usec processing_us = 0;

  // Control-plane setup, Idle -> Connected: Uu and N2 round trips.
  Usec idle_setup_latency_us(const Topology& t, int serving_cell) const;
  // Stored-context resume, Inactive -> Connected: Uu round trip to the anchor,
  // plus an Xn-C round trip when the anchor is not the serving gNB.
  Usec resume_latency_us(const Topology& t, int serving_cell,
                         std::optional<int> anchor_cu) const;
  // User-plane path: N3 + F1-U + Uu down to the UE.
  Usec user_plane_latency_us(const Topology& t, int serving_cell) const;
};

} // namespace ransim

#endif // RANSIM_RRC_MOBILITY_H
