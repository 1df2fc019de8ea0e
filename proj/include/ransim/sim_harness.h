#ifndef RANSIM_SIM_HARNESS_H
#define RANSIM_SIM_HARNESS_H

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ransim/bearer_switching.h"
#include "ransim/mobility_trace.h"
#include "ransim/ran_sync.h"
#include "ransim/rbma.h"
#include "ransim/rrc_mobility.h"
#include "ransim/scenario.h"
#include "ransim/sfn_scheduler.h"
#include "ransim/topology.h"
#include "ransim/types.h"

namespace ransim {

// ---------------------------------------------------------------------------
// Interface messages

struct SyncSetupRequest {
  int rbma_id = 0;
  int du_id = 0;
  SyncParams params;
};

struct SyncSetupResponse {
  int rbma_id = 0;
  int du_id = 0;
};

struct SyncPduTransfer {
  int rbma_id = 0;
  int service_id = 0;
  int final_du = 0; // relayed over Xn-U when not directly attached
  Usec ingest_us = 0;
  SyncPdu pdu;
};

struct RbmaSetup {
  int rbma_id = 0;
  int target_cu = 0;
};

struct RbmaUpdateRequest {
  int ue_id = 0;
  int new_cell = 0;
};

struct RbmaUpdateConfig {
  int ue_id = 0;
  int rbma_id = 0;
  std::uint32_t g_rnti = 0;
  int new_cell = 0;
};

struct RrcSuspend {
  int ue_id = 0;
  int rbma_id = 0;
  std::uint32_t g_rnti = 0;
};

struct RrcResume {
  int ue_id = 0;
};

struct PduSessionModification {
  int ue_id = 0;
  int rbma_id = 0;
  bool response = false;
};

struct MulticastUserData {
  int rbma_id = 0;
  int service_id = 0;
  int chunk_index = 0;
  Usec ingest_us = 0;
  std::vector<std::uint8_t> chunk;
};

using MessageBody =
    std::variant<SyncSetupRequest, SyncSetupResponse, SyncPduTransfer, RbmaSetup,
                 RbmaUpdateRequest, RbmaUpdateConfig, RrcSuspend, RrcResume,
                 PduSessionModification, MulticastUserData>;

struct InterfaceMessage {
  InterfaceKind interface_kind = InterfaceKind::F1C;
  NodeRef source;
  NodeRef destination;
  MessageBody body;
};

// Type guard: a body kind may only travel on its interfaces (user data never
// on N2, signalling never on user-plane tunnels, ...). Throws
// RuntimeInvariantViolation on a mismatch.
InterfaceMessage make_message(InterfaceKind kind, NodeRef source, NodeRef destination,
                              MessageBody body);

// ---------------------------------------------------------------------------
// Events

enum class EventKind {
  MessageDelivery,
  TrafficArrival,
  Timer,
  MeasurementReport,
  MobilityStep,
  ServiceRequest,
};

const char* to_string(EventKind kind);

struct TrafficPayload {
  int service_id = 0;
  int chunk_index = 0;
  int chunk_octets = 0;
};

struct TimerPayload {
  enum class Kind {
    EmitDue,
    InactivityCheck,
    IdleReleaseCheck,
    UeAirDelivery,
    UeActivity,
    UeInterest,
  };
  Kind kind = Kind::EmitDue;
  int rbma_id = 0;
  int du_id = 0;
  std::int64_t period = 0;
  int ue_id = 0;
  Usec stamp_us = 0; // activity stamp the check was armed against
  ActivityKind activity_kind = ActivityKind::UnicastData;
  // UeAirDelivery
  int service_id = 0;
  std::uint64_t sequence_number = 0;
  ChannelKind channel = ChannelKind::Xtch;
  bool unicast_drb = false; // scenario-1 path, bypasses the XRB switch
  Usec ingest_us = 0;
};

struct MeasurementPayload {
  MeasurementReport report;
};

struct MobilityPayload {
  Waypoint waypoint;
};

struct ServicePayload {
  enum class Op { Admit, Release };
  Op op = Op::Admit;
  ServiceConfig config;
  int service_id = 0;
};

struct Event {
  Usec time_us = 0;
  std::uint64_t seq = 0; // tie-break counter, unique
  EventKind kind = EventKind::Timer;
  std::variant<InterfaceMessage, TrafficPayload, TimerPayload, MeasurementPayload,
               MobilityPayload, ServicePayload>
      payload;
};

// Pops in (time_us, seq) order; seq is assigned at push, so insertion order
// breaks ties deterministically.
class EventQueue {
public:
  void push(Usec time_us, EventKind kind, decltype(Event::payload) payload);
  bool empty() const { return heap_.empty(); }
  Event pop();
  std::size_t size() const { return heap_.size(); }

private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time_us != b.time_us) return a.time_us > b.time_us;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

// ---------------------------------------------------------------------------
// X-cast tunnels: one active tunnel per (rbma, DU).

struct XcastTunnel {
  int tunnel_id = 0;
  int rbma_id = 0;
  int du_id = 0;
};

class XcastTunnelRegistry {
public:
  const XcastTunnel& open(int rbma_id, int du_id);
  std::size_t count() const { return tunnels_.size(); }

private:
  std::map<std::pair<int, int>, XcastTunnel> tunnels_;
  int next_id_ = 1;
};

// ---------------------------------------------------------------------------
// Metrics

struct LatencyStats {
  std::vector<Usec> samples;

  void add(Usec v) { samples.push_back(v); }
  bool empty() const { return samples.empty(); }
  Usec min() const;
  Usec max() const;
  double mean() const;
};

struct Metrics {
  std::int64_t events_processed = 0;
  std::int64_t messages_sent = 0;
  std::int64_t messages_delivered = 0;

  std::map<int, std::int64_t> uplink_msgs_per_ue;
  std::int64_t rbma_update_exchanges = 0;
  std::int64_t outstanding_updates = 0; // still pending when the run ended
  std::int64_t silent_reselections = 0;
  std::int64_t suspends = 0;
  std::int64_t suppressed_suspends = 0;

  std::int64_t pdus_sent = 0;
  std::int64_t pdus_injected_lost = 0;
  std::int64_t pdus_late = 0;
  std::int64_t emissions = 0;
  std::set<std::pair<int, std::int64_t>> muted_du_periods;

  std::int64_t periods_checked = 0;
  std::int64_t periods_aligned = 0;
  std::int64_t periods_misaligned = 0;
  std::vector<std::string> misalignment_details;

  std::int64_t switching_evaluations = 0;
  std::map<int, std::int64_t> deliveries_per_ue; // exactly-once deliveries
  std::int64_t dedup_discards = 0;
  std::int64_t suppressed_during_update = 0;

  std::int64_t services_admitted = 0;
  std::int64_t services_rejected = 0;
  std::vector<std::string> admission_log;

  LatencyStats cp_setup;
  LatencyStats rrc_resume;
  LatencyStats user_plane;

  int rom_ues_total = 0;
  int rom_ues_covered = 0;
  int idle_ues_covered = 0;

  std::size_t tunnels_opened = 0;

  // one rendered line per area, from rbma coverage reports at end of run
  std::vector<std::string> rbma_reports;
  // orthogonal partition per single-cell transmitter, when two or more exist
  std::vector<std::string> reuse3_plan;
};

struct RequirementRow {
  std::string requirement;
  bool pass = false;
  std::string note;
};

// The architectural requirement checklist evaluated over a finished run.
std::vector<RequirementRow> requirement_table(const Metrics& metrics);

struct LatencyReport {
  LatencyStats cp_setup;
  LatencyStats user_plane;
  LatencyStats rrc_resume;
  Usec cp_target_us = 15 * kUsecPerMs;
  Usec up_target_us = 2 * kUsecPerMs;

  bool cp_on_target() const;
  bool up_on_target() const;
  bool resume_faster_than_setup() const;
};

// InsufficientSamples unless the run contained at least one Idle->Connected
// setup and one user-plane delivery.
LatencyReport latency_report(const Metrics& metrics);

// ---------------------------------------------------------------------------
// Runner

struct RunOptions {
  std::uint64_t seed = 0;
  bool seed_explicit = false;
  std::string trace_dir; // directory scenario-relative paths resolve against
};

struct RunArtifacts {
  std::string summary_text;
  std::string metrics_json;
  std::string emission_log;
  std::string decision_log;
  std::string transition_log;
  Metrics metrics;
};

// Deterministic: identical (scenario, seed) pairs produce byte-identical
// artifacts. Throws SimError; RuntimeInvariantViolation means a module
// invariant broke mid-run.
RunArtifacts run_scenario(const Scenario& scenario, const RunOptions& options);

// Everything run_scenario checks before the first event: topology, areas,
// cross references, trace columns. Throws on the first problem.
void validate_scenario(const Scenario& scenario, const RunOptions& options);

void write_artifacts(const RunArtifacts& artifacts, const std::string& out_dir);

std::string render_summary(const Metrics& metrics, const std::string& scenario_name);

} // namespace ransim

#endif // RANSIM_SIM_HARNESS_H
