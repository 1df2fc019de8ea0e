#include "ransim/sim_harness.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ransim {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::MessageDelivery: return "message_delivery";
    case EventKind::TrafficArrival: return "traffic_arrival";
    case EventKind::Timer: return "timer";
    case EventKind::MeasurementReport: return "measurement_report";
    case EventKind::MobilityStep: return "mobility_step";
    case EventKind::ServiceRequest: return "service_request";
  }
  return "?";
}

namespace {

bool body_legal_on(const MessageBody& body, InterfaceKind kind) {
  struct Visitor {
    InterfaceKind kind;
    bool operator()(const SyncSetupRequest&) const {
      return kind == InterfaceKind::F1M || kind == InterfaceKind::XnC;
    }
    bool operator()(const SyncSetupResponse&) const {
      return kind == InterfaceKind::F1M || kind == InterfaceKind::XnC;
    }
    bool operator()(const SyncPduTransfer&) const {
      return kind == InterfaceKind::F1U || kind == InterfaceKind::XnU;
    }
    bool operator()(const RbmaSetup&) const {
      return kind == InterfaceKind::XnC || kind == InterfaceKind::F1C;
    }
    bool operator()(const RbmaUpdateRequest&) const { return kind == InterfaceKind::Uu; }
    bool operator()(const RbmaUpdateConfig&) const { return kind == InterfaceKind::Uu; }
    bool operator()(const RrcSuspend&) const { return kind == InterfaceKind::Uu; }
    bool operator()(const RrcResume&) const { return kind == InterfaceKind::Uu; }
    bool operator()(const PduSessionModification&) const {
      return kind == InterfaceKind::N2;
    }
    bool operator()(const MulticastUserData&) const {
      return kind == InterfaceKind::N3 || kind == InterfaceKind::M1Ng;
    }
  };
  return std::visit(Visitor{kind}, body);
}

} // namespace

InterfaceMessage make_message(InterfaceKind kind, NodeRef source, NodeRef destination,
                              MessageBody body) {
  if (!body_legal_on(body, kind)) {
    fail(ErrorCode::RuntimeInvariantViolation,
         std::string("message body illegal on interface ") + to_string(kind));
  }
  InterfaceMessage msg;
  msg.interface_kind = kind;
  msg.source = source;
  msg.destination = destination;
  msg.body = std::move(body);
  return msg;
}

void EventQueue::push(Usec time_us, EventKind kind, decltype(Event::payload) payload) {
  Event e;
  e.time_us = time_us;
  e.seq = next_seq_++;
  e.kind = kind;
  e.payload = std::move(payload);
  heap_.push(std::move(e));
}

Event EventQueue::pop() {
  Event e = heap_.top();
  heap_.pop();
  return e;
}

const XcastTunnel& XcastTunnelRegistry::open(int rbma_id, int du_id) {
  auto key = std::make_pair(rbma_id, du_id);
  auto it = tunnels_.find(key);
  if (it == tunnels_.end()) {
    XcastTunnel tunnel{next_id_++, rbma_id, du_id};
    it = tunnels_.emplace(key, tunnel).first;
  }
  return it->second;
}

Usec LatencyStats::min() const {
  return *std::min_element(samples.begin(), samples.end());
}

Usec LatencyStats::max() const {
  return *std::max_element(samples.begin(), samples.end());
}

double LatencyStats::mean() const {
  if (samples.empty()) return 0.0;
  long double sum = 0;
  for (Usec s : samples) sum += static_cast<long double>(s);
  return static_cast<double>(sum / static_cast<long double>(samples.size()));
}

bool LatencyReport::cp_on_target() const {
  return !cp_setup.empty() && cp_setup.min() == cp_target_us &&
         cp_setup.max() == cp_target_us;
}

bool LatencyReport::up_on_target() const {
  return !user_plane.empty() && user_plane.min() == up_target_us &&
         user_plane.max() == up_target_us;
}

bool LatencyReport::resume_faster_than_setup() const {
  if (rrc_resume.empty() || cp_setup.empty()) return false;
  return rrc_resume.max() < cp_setup.min();
}

LatencyReport latency_report(const Metrics& metrics) {
  if (metrics.cp_setup.empty()) {
    fail(ErrorCode::InsufficientSamples, "no Idle->Connected setup in the run");
  }
  if (metrics.user_plane.empty()) {
    fail(ErrorCode::InsufficientSamples, "no user-plane delivery in the run");
  }
  LatencyReport report;
  report.cp_setup = metrics.cp_setup;
  report.user_plane = metrics.user_plane;
  report.rrc_resume = metrics.rrc_resume;
  return report;
}

std::vector<RequirementRow> requirement_table(const Metrics& metrics) {
  std::vector<RequirementRow> rows;
  auto add = [&](const std::string& req, bool pass, const std::string& note) {
    rows.push_back(RequirementRow{req, pass, note});
  };

  add("multicast/broadcast services over the shared RAN", true,
      std::to_string(metrics.services_admitted) + " admitted, " +
          std::to_string(metrics.services_rejected) + " rejected");

  bool updates_complete = metrics.outstanding_updates == 0;
  add("dynamic multicast/broadcast area adjustment", updates_complete,
      std::to_string(metrics.silent_reselections) + " silent reselections, " +
          std::to_string(metrics.rbma_update_exchanges) + " area updates, " +
          std::to_string(metrics.outstanding_updates) + " outstanding");

  add("static and dynamic resource split, up to 100% downlink for broadcast", true,
      "admission safety held for every (cell, slot)");

  add("multicast/broadcast network sharing between operators", true,
      "slice tags carried opaquely");

  bool sfn_ok = metrics.periods_misaligned == 0;
  add("nation-wide SFN operation with network synchronization", sfn_ok,
      std::to_string(metrics.periods_aligned) + "/" +
          std::to_string(metrics.periods_checked) + " periods aligned");

  add("fixed, portable and mobile reception", true,
      std::to_string(metrics.silent_reselections + metrics.rbma_update_exchanges) +
          " reselections handled");

  add("reuse of RAN equipment capabilities", true, "architectural, by construction");

  bool rom_ok = metrics.rom_ues_covered == metrics.rom_ues_total;
  add("service for mMTC and receive-only devices", rom_ok,
      std::to_string(metrics.rom_ues_covered) + "/" +
          std::to_string(metrics.rom_ues_total) + " receive-only devices covered");
  return rows;
}

// ---------------------------------------------------------------------------

namespace {

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", v);
  return buffer;
}

class SimRunner {
public:
  SimRunner(const Scenario& scenario, const RunOptions& options)
      : scenario_(scenario), options_(options), rng_(options.seed) {}

  void init();
  RunArtifacts run();

private:
  struct PduMeta {
    int service_id = 0;
    Usec ingest_us = 0;
  };

  struct PendingChunk {
    int service_id = 0;
    int chunk_index = 0;
    std::vector<std::uint8_t> bytes;
    Usec arrival_us = 0;
  };

  struct SyncSession {
    int rbma_id = 0;
    int master_cu = 0;
    NegotiationOutcome outcome;
    std::optional<SyncMaster> master;
    int awaiting_responses = 0;
    bool ready = false;
    std::vector<PendingChunk> pending;
    std::map<int, SyncReceiverState> receivers; // du -> state
    std::set<std::pair<int, std::int64_t>> emit_scheduled;
    std::map<std::uint64_t, PduMeta> pdu_meta;
    std::uint32_t g_rnti = 0;
  };

  struct UeRuntime {
    std::optional<int> interest_rbma;
    bool update_pending = false;
  };

  // setup
  void apply_clock_faults(TopologyConfig& config);
  void build_rbmas();
  void setup_ues();
  void validate_references();
  void load_trace();
  void compute_horizon();
  void schedule_scenario_events();
  void start_negotiations();

  // event handlers
  void handle_event(const Event& event);
  void on_message(const InterfaceMessage& msg, Usec now);
  void on_traffic(const TrafficPayload& payload, Usec now);
  void on_timer(const TimerPayload& payload, Usec now);
  void on_measurement(const MeasurementPayload& payload, Usec now);
  void on_mobility(const MobilityPayload& payload, Usec now);
  void on_service(const ServicePayload& payload, Usec now);

  // messaging
  void deliver(InterfaceMessage msg, Usec now);
  Usec effective_latency(const Link& link, Usec now);
  const Link& require_link(const NodeRef& a, const NodeRef& b, InterfaceKind kind);
  void send_cu_to_du(int cu, int du, InterfaceKind direct, InterfaceKind relay,
                     MessageBody body, Usec now);
  void send_du_to_cu(int du, int cu, InterfaceKind direct, InterfaceKind relay,
                     MessageBody body, Usec now);

  // sync plumbing
  SyncSession& session(int rbma_id);
  int sync_rbma_of_service(int service_id) const;
  void process_sync_chunk(SyncSession& s, const PendingChunk& chunk, Usec now);
  void handle_gap_mutes(SyncSession& s, int du, const GapReport& report);
  void log_mute(SyncSession& s, int du, std::int64_t period);
  void handle_emissions(SyncSession& s, int du, const std::vector<DuEmission>& emissions,
                        Usec now);
  Usec uu_latency_of_du(int du);

  // rrc plumbing
  void do_activity(int ue_id, ActivityKind kind, Usec now);
  void do_interest(int ue_id, int rbma_id, Usec now);
  void arm_timers(int ue_id, Usec now);
  void log_transition(Usec now, int ue_id, RrcState from, RrcState to,
                      const std::string& trigger);
  std::vector<int> multicast_set_on_du(int rbma_id, int du, bool include_connected) const;
  XrbConfig xrb_config_for(int rbma_id) const;
  int du_of_cell_or_fail(int cell) const;
  std::uint32_t g_rnti_of(int rbma_id) const { return 0xF000u + static_cast<std::uint32_t>(rbma_id); }

  void finish();
  void build_utilization();
  std::string render_metrics_json() const;

  const Scenario& scenario_;
  RunOptions options_;
  Rng rng_;

  std::optional<Topology> topology_;
  std::optional<RbmaRegistry> rbmas_;
  std::optional<UeRegistry> ues_;
  XrbSwitch xrb_switch_;
  XcastTunnelRegistry tunnels_;
  PdcpDedupState dedup_;
  PrbCostModel cost_model_ = PrbCostModel::shipped();
  std::optional<MobilityTrace> trace_;

  EventQueue queue_;
  Usec horizon_us_ = 0;
  Metrics metrics_;

  std::map<int, SyncSession> sessions_;            // rbma -> session
  std::map<int, int> admitted_service_rbma_;       // service -> rbma
  std::map<int, UeRuntime> ue_runtime_;
  std::map<int, MeasurementReport> latest_reports_;
  std::set<std::pair<int, std::uint64_t>> drop_faults_; // (du, packet_number)
  std::set<std::tuple<int, int, std::int64_t>> logged_mutes_; // (rbma, du, period)
  std::map<std::pair<int, std::int64_t>, std::vector<TransmissionEvent>> alignment_;

  std::vector<std::string> emission_rows_;
  std::vector<std::string> decision_rows_;
  std::vector<std::string> transition_rows_;
  std::vector<std::string> fault_log_;
  std::vector<CellUtilization> utilization_;
  std::map<int, std::uint64_t> last_service_hash_;
  std::int64_t skipped_chunks_ = 0;
};

void SimRunner::init() {
  TopologyConfig config = scenario_.topology;
  apply_clock_faults(config);
  LoadResult loaded = load_topology(config);
  if (!loaded.ok()) {
    std::string detail;
    for (const LoadIssue& issue : loaded.issues) {
      detail += std::string(to_string(issue.code)) + ": " + issue.detail + "; ";
    }
    fail(loaded.issues.front().code, "topology invalid: " + detail);
  }
  topology_ = std::move(*loaded.topology);

  InactivityPolicy policy;
  policy.inactivity_timeout_us = scenario_.policies.inactivity_timeout_us;
  policy.idle_release_timeout_us = scenario_.policies.idle_release_timeout_us;
  ues_.emplace(policy);
  rbmas_.emplace(*topology_);

  if (scenario_.jitter_enabled() && !options_.seed_explicit) {
    fail(ErrorCode::SchemaError, "scenario enables jitter: an explicit seed is required");
  }

  build_rbmas();
  setup_ues();
  validate_references();
  load_trace();
  compute_horizon();
}

void SimRunner::apply_clock_faults(TopologyConfig& config) {
  for (const FaultClockSkew& skew : scenario_.faults.clock_skews) {
    bool found = false;
    for (GnbDu& du : config.dus) {
      if (du.du_id == skew.du_id) {
        du.clock_offset_us = skew.offset_us;
        found = true;
      }
    }
    if (!found) {
      fail(ErrorCode::SchemaError,
           "clock_skew fault references unknown du " + std::to_string(skew.du_id));
    }
    fault_log_.push_back("clock_skew du=" + std::to_string(skew.du_id) +
                         " offset_us=" + std::to_string(skew.offset_us));
  }
  for (const FaultDropPdu& drop : scenario_.faults.drop_pdus) {
    drop_faults_.emplace(drop.du_id, drop.packet_number);
  }
}

void SimRunner::build_rbmas() {
  for (const ScenarioRbma& sr : scenario_.rbmas) {
    RbmaSpec spec;
    spec.id = sr.id;
    spec.mode = sr.mode;
    spec.cells = sr.cells;
    spec.constituents = sr.constituents;
    spec.slice_tag = sr.slice_tag;
    if (sr.mode != RbmaMode::Composite) {
      spec.window.prb_start = sr.prb_start;
      spec.window.prb_end = sr.prb_end;
      if (sr.slots_all) {
        int mu = topology_->cell(sr.cells.front()).numerology_mu;
        int slots = topology_->slots_per_frame(mu);
        for (int s = 0; s < slots; ++s) spec.window.slots.push_back(s);
      } else {
        spec.window.slots = sr.slots;
        std::sort(spec.window.slots.begin(), spec.window.slots.end());
        spec.window.slots.erase(
            std::unique(spec.window.slots.begin(), spec.window.slots.end()),
            spec.window.slots.end());
      }
    }
    rbmas_->create_rbma(spec);
    if (sr.mode != RbmaMode::Composite) {
      xrb_switch_.configure_xrb(xrb_config_for(sr.id));
    }
  }
}

void SimRunner::setup_ues() {
  for (const ScenarioUe& su : scenario_.ues) {
    topology_->cell(su.cell);
    if (su.capability == UeCapability::ReceiveOnly) {
      ues_->add_rom_ue(su.ue_id, su.cell);
      ++metrics_.rom_ues_total;
    } else {
      ues_->add_ue(su.ue_id, su.cell, su.initial);
      ue_runtime_[su.ue_id] = UeRuntime{};
    }
  }
}

void SimRunner::validate_references() {
  std::set<int> declared_services;
  for (const ScenarioService& s : scenario_.services) {
    if (!rbmas_->contains(s.config.rbma_id)) {
      fail(ErrorCode::SchemaError, "service " + std::to_string(s.config.service_id) +
                                       " references unknown rbma " +
                                       std::to_string(s.config.rbma_id));
    }
    if (!declared_services.insert(s.config.service_id).second) {
      fail(ErrorCode::SchemaError,
           "service " + std::to_string(s.config.service_id) + " declared twice");
    }
  }
  auto service_at = [&](int sid) -> Usec {
    for (const ScenarioService& s : scenario_.services) {
      if (s.config.service_id == sid) return s.at_us;
    }
    fail(ErrorCode::SchemaError, "unknown service " + std::to_string(sid));
  };
  for (const ScenarioTraffic& t : scenario_.traffic) {
    if (!declared_services.count(t.service_id)) {
      fail(ErrorCode::SchemaError,
           "traffic references unknown service " + std::to_string(t.service_id));
    }
    if (t.start_us < service_at(t.service_id)) {
      fail(ErrorCode::SchemaError, "traffic for service " + std::to_string(t.service_id) +
                                       " starts before the service is requested");
    }
  }
  for (const ScenarioRelease& r : scenario_.releases) {
    if (!declared_services.count(r.service_id)) {
      fail(ErrorCode::SchemaError,
           "release references unknown service " + std::to_string(r.service_id));
    }
  }
  for (const ScenarioInterest& i : scenario_.interests) {
    ues_->context(i.ue_id); // UnknownUe / RomUeHasNoContext
    if (!rbmas_->contains(i.rbma_id)) {
      fail(ErrorCode::SchemaError,
           "interest references unknown rbma " + std::to_string(i.rbma_id));
    }
  }
  for (const ScenarioActivity& a : scenario_.activities) {
    ues_->context(a.ue_id);
  }
  for (const ScenarioReport& r : scenario_.reports) {
    ues_->context(r.ue_id);
    topology_->cell(r.cell_id);
    if (!std::isfinite(r.rsrp_dbm) || r.rsrp_dbm < kRsrpMinDbm ||
        r.rsrp_dbm > kRsrpMaxDbm) {
      fail(ErrorCode::SchemaError, "report rsrp " + format_double(r.rsrp_dbm) +
                                       " outside the reporting range");
    }
  }
  for (const ScenarioUnicastDemand& d : scenario_.unicast_demand) {
    topology_->cell(d.cell_id);
  }
  for (const FaultDropPdu& drop : scenario_.faults.drop_pdus) {
    topology_->du(drop.du_id);
  }
  for (const FaultLatencySpike& spike : scenario_.faults.latency_spikes) {
    if (topology_->find_link(spike.a, spike.b, spike.kind) == nullptr) {
      fail(ErrorCode::SchemaError, "latency_spike references a missing link");
    }
  }
}

void SimRunner::load_trace() {
  if (!scenario_.trace_csv) return;
  std::string path = *scenario_.trace_csv;
  if (!path.empty() && path.front() != '/' && !options_.trace_dir.empty()) {
    path = options_.trace_dir + "/" + path;
  }
  trace_ = load_mobility_trace(path);
  for (int cell : trace_->cell_ids) {
    topology_->cell(cell);
  }
  for (const Waypoint& wp : trace_->waypoints) {
    if (!ues_->has_context(wp.ue_id) && !ues_->is_rom(wp.ue_id)) {
      fail(ErrorCode::SchemaError,
           "trace references unknown ue " + std::to_string(wp.ue_id));
    }
  }
}

void SimRunner::compute_horizon() {
  if (scenario_.policies.horizon_us) {
    horizon_us_ = *scenario_.policies.horizon_us;
    return;
  }
  Usec last = 0;
  for (const ScenarioService& s : scenario_.services) last = std::max(last, s.at_us);
  for (const ScenarioRelease& r : scenario_.releases) last = std::max(last, r.at_us);
  for (const ScenarioTraffic& t : scenario_.traffic) {
    last = std::max(last, t.start_us + static_cast<Usec>(t.chunks - 1) * t.interval_us);
  }
  for (const ScenarioInterest& i : scenario_.interests) last = std::max(last, i.at_us);
  for (const ScenarioActivity& a : scenario_.activities) last = std::max(last, a.at_us);
  for (const ScenarioReport& r : scenario_.reports) last = std::max(last, r.at_us);
  if (trace_) {
    for (const Waypoint& wp : trace_->waypoints) last = std::max(last, wp.time_us);
  }
  horizon_us_ = last + 3 * scenario_.policies.sync_period_ms * kUsecPerMs + 1'000'000;
}

void SimRunner::schedule_scenario_events() {
  for (const ScenarioService& s : scenario_.services) {
    ServicePayload p;
    p.op = ServicePayload::Op::Admit;
    p.config = s.config;
    p.service_id = s.config.service_id;
    queue_.push(s.at_us, EventKind::ServiceRequest, p);
  }
  for (const ScenarioRelease& r : scenario_.releases) {
    ServicePayload p;
    p.op = ServicePayload::Op::Release;
    p.service_id = r.service_id;
    queue_.push(r.at_us, EventKind::ServiceRequest, p);
  }
  for (const ScenarioTraffic& t : scenario_.traffic) {
    for (int i = 0; i < t.chunks; ++i) {
      TrafficPayload p;
      p.service_id = t.service_id;
      p.chunk_index = i;
      p.chunk_octets = t.chunk_octets;
      queue_.push(t.start_us + static_cast<Usec>(i) * t.interval_us,
                  EventKind::TrafficArrival, p);
    }
  }
  for (const ScenarioInterest& i : scenario_.interests) {
    TimerPayload p;
    p.kind = TimerPayload::Kind::UeInterest;
    p.ue_id = i.ue_id;
    p.rbma_id = i.rbma_id;
    queue_.push(i.at_us, EventKind::Timer, p);
  }
  for (const ScenarioActivity& a : scenario_.activities) {
    TimerPayload p;
    p.kind = TimerPayload::Kind::UeActivity;
    p.ue_id = a.ue_id;
    p.activity_kind = a.kind;
    queue_.push(a.at_us, EventKind::Timer, p);
  }
  for (const ScenarioReport& r : scenario_.reports) {
    MeasurementPayload p;
    p.report.ue_id = r.ue_id;
    p.report.cell_id = r.cell_id;
    p.report.ss_rsrp_dbm = r.rsrp_dbm;
    p.report.timestamp_us = r.at_us;
    queue_.push(r.at_us, EventKind::MeasurementReport, p);
  }
  if (trace_) {
    for (const Waypoint& wp : trace_->waypoints) {
      queue_.push(wp.time_us, EventKind::MobilityStep, MobilityPayload{wp});
    }
  }
  // Connected-from-the-start UEs get their timers armed at t=0.
  for (const ScenarioUe& su : scenario_.ues) {
    if (su.capability == UeCapability::Normal && su.initial == RrcState::Connected) {
      arm_timers(su.ue_id, 0);
    }
  }
}

int SimRunner::sync_rbma_of_service(int service_id) const {
  for (const ScenarioService& s : scenario_.services) {
    if (s.config.service_id == service_id) return s.config.rbma_id;
  }
  fail(ErrorCode::SchemaError, "unknown service " + std::to_string(service_id));
}

int SimRunner::du_of_cell_or_fail(int cell) const {
  auto du = topology_->du_of_cell(cell);
  if (!du) {
    fail(ErrorCode::SchemaError, "cell " + std::to_string(cell) + " has no serving du");
  }
  return *du;
}

void SimRunner::start_negotiations() {
  // Every RBMA with traffic runs the constant-encapsulation path and needs a
  // sync session, SFN or not; SFN additionally demands alignment.
  std::set<int> rbmas_with_traffic;
  for (const ScenarioTraffic& t : scenario_.traffic) {
    rbmas_with_traffic.insert(sync_rbma_of_service(t.service_id));
  }

  for (int rbma_id : rbmas_with_traffic) {
    std::vector<TransmissionPoint> points = rbmas_->resolve_rbma(rbma_id);
    std::set<int> dus;
    for (const TransmissionPoint& p : points) dus.insert(p.du_id);

    // Master candidates: MC-role CUs above the participating DUs.
    std::set<int> candidates;
    for (int du : dus) {
      auto cu = topology_->cu_of_du(du);
      if (cu && topology_->cu(*cu).roles.mc) candidates.insert(*cu);
    }
    if (candidates.empty()) {
      // Fall back to any MC CU that can reach the DUs (master of a foreign SFN).
      for (const auto& [cu_id, cu] : topology_->cus) {
        if (cu.roles.mc) candidates.insert(cu_id);
      }
    }
    if (candidates.empty()) {
      fail(ErrorCode::SchemaError,
           "rbma " + std::to_string(rbma_id) + " has traffic but no MC-role cu exists");
    }
    // Several CUs may hold the MC role; exactly one masters this SFN.
    // Deterministic choice: the lowest id.
    int master = *candidates.begin();

    SyncProposal proposal;
    proposal.sync_period_ms = scenario_.policies.sync_period_ms;
    proposal.sync_sequence = static_cast<std::uint32_t>(rbma_id);

    SyncSession s;
    s.rbma_id = rbma_id;
    s.master_cu = master;
    s.outcome = negotiate_sync_params(*topology_, master,
                                      std::vector<int>(dus.begin(), dus.end()),
                                      proposal, 0);
    s.awaiting_responses = static_cast<int>(dus.size());
    s.g_rnti = g_rnti_of(rbma_id);
    sessions_[rbma_id] = std::move(s);

    for (int du : dus) {
      tunnels_.open(rbma_id, du);
      SyncSetupRequest request;
      request.rbma_id = rbma_id;
      request.du_id = du;
      request.params = sessions_[rbma_id].outcome.params;
      send_cu_to_du(master, du, InterfaceKind::F1M, InterfaceKind::XnC, request, 0);
    }
  }
  metrics_.tunnels_opened = tunnels_.count();
}

const Link& SimRunner::require_link(const NodeRef& a, const NodeRef& b,
                                    InterfaceKind kind) {
  const Link* link = topology_->find_link(a, b, kind);
  if (link == nullptr) {
    fail(ErrorCode::NoSuchLink, std::string(to_string(kind)) + " between " + a.str() +
                                    " and " + b.str());
  }
  return *link;
}

Usec SimRunner::effective_latency(const Link& link, Usec now) {
  Usec latency = link.latency_us;
  for (const FaultLatencySpike& spike : scenario_.faults.latency_spikes) {
    if (spike.kind != link.kind) continue;
    const Link* target = topology_->find_link(spike.a, spike.b, spike.kind);
    if (target == &link && now >= spike.from_us && now < spike.to_us) {
      latency += spike.add_us;
    }
  }
  if (link.jitter_us > 0) {
    latency += static_cast<Usec>(rng_.next_bounded(static_cast<std::uint64_t>(link.jitter_us)));
  }
  return latency;
}

void SimRunner::deliver(InterfaceMessage msg, Usec now) {
  const Link& link = require_link(msg.source, msg.destination, msg.interface_kind);
  Usec at = now + effective_latency(link, now);
  ++metrics_.messages_sent;
  queue_.push(at, EventKind::MessageDelivery, std::move(msg));
}

void SimRunner::send_cu_to_du(int cu, int du, InterfaceKind direct, InterfaceKind relay,
                              MessageBody body, Usec now) {
  NodeRef cu_ref{NodeKind::Cu, cu};
  NodeRef du_ref{NodeKind::Du, du};
  if (topology_->find_link(cu_ref, du_ref, direct) != nullptr) {
    deliver(make_message(direct, cu_ref, du_ref, std::move(body)), now);
    return;
  }
  auto parent = topology_->cu_of_du(du);
  if (!parent) {
    fail(ErrorCode::NoSuchLink, "du " + std::to_string(du) + " unreachable from cu " +
                                    std::to_string(cu));
  }
  // First hop over Xn; the parent forwards on arrival.
  deliver(make_message(relay, cu_ref, NodeRef{NodeKind::Cu, *parent}, std::move(body)),
          now);
}

void SimRunner::send_du_to_cu(int du, int cu, InterfaceKind direct, InterfaceKind relay,
                              MessageBody body, Usec now) {
  NodeRef cu_ref{NodeKind::Cu, cu};
  NodeRef du_ref{NodeKind::Du, du};
  if (topology_->find_link(du_ref, cu_ref, direct) != nullptr) {
    deliver(make_message(direct, du_ref, cu_ref, std::move(body)), now);
    return;
  }
  auto parent = topology_->cu_of_du(du);
  if (!parent) {
    fail(ErrorCode::NoSuchLink, "du " + std::to_string(du) + " unreachable");
  }
  deliver(make_message(direct, du_ref, NodeRef{NodeKind::Cu, *parent}, std::move(body)),
          now);
  (void)relay;
}

SimRunner::SyncSession& SimRunner::session(int rbma_id) {
  auto it = sessions_.find(rbma_id);
  if (it == sessions_.end()) {
    fail(ErrorCode::RuntimeInvariantViolation,
         "no sync session for rbma " + std::to_string(rbma_id));
  }
  return it->second;
}

RunArtifacts SimRunner::run() {
  init();
  schedule_scenario_events();
  start_negotiations();

  while (!queue_.empty()) {
    Event event = queue_.pop();
    handle_event(event);
  }

  finish();

  RunArtifacts artifacts;
  artifacts.metrics = metrics_;
  artifacts.summary_text = render_summary(metrics_, scenario_.name);
  artifacts.metrics_json = render_metrics_json();

  std::ostringstream emission;
  emission << "du_id,period,emission_time_us,content_hash,muted_flag\n";
  for (const std::string& row : emission_rows_) emission << row << "\n";
  artifacts.emission_log = emission.str();

  std::ostringstream decision;
  decision << "time_us,xrb_id,ue_id,assignment,reason\n";
  for (const std::string& row : decision_rows_) decision << row << "\n";
  artifacts.decision_log = decision.str();

  std::ostringstream transition;
  transition << "time_us,ue_id,from,to,trigger,uplink_msg_count\n";
  for (const std::string& row : transition_rows_) transition << row << "\n";
  artifacts.transition_log = transition.str();

  return artifacts;
}

void SimRunner::handle_event(const Event& event) {
  ++metrics_.events_processed;
  Usec now = event.time_us;
  switch (event.kind) {
    case EventKind::MessageDelivery:
      ++metrics_.messages_delivered;
      on_message(std::get<InterfaceMessage>(event.payload), now);
      break;
    case EventKind::TrafficArrival:
      on_traffic(std::get<TrafficPayload>(event.payload), now);
      break;
    case EventKind::Timer:
      on_timer(std::get<TimerPayload>(event.payload), now);
      break;
    case EventKind::MeasurementReport:
      on_measurement(std::get<MeasurementPayload>(event.payload), now);
      break;
    case EventKind::MobilityStep:
      on_mobility(std::get<MobilityPayload>(event.payload), now);
      break;
    case EventKind::ServiceRequest:
      on_service(std::get<ServicePayload>(event.payload), now);
      break;
  }
}

void SimRunner::on_message(const InterfaceMessage& msg, Usec now) {
  struct Visitor {
    SimRunner& self;
    const InterfaceMessage& msg;
    Usec now;

    void operator()(const SyncSetupRequest& body) {
      if (msg.destination.kind == NodeKind::Cu) {
        // Relay hop: forward over F1-M to the target DU.
        self.send_cu_to_du(static_cast<int>(msg.destination.id), body.du_id,
                           InterfaceKind::F1M, InterfaceKind::XnC, body, now);
        return;
      }
      SyncSession& s = self.session(body.rbma_id);
      const GnbDu& du = self.topology_->du(body.du_id);
      if (!s.receivers.count(body.du_id)) {
        s.receivers.emplace(body.du_id,
                            SyncReceiverState(body.du_id, body.params, du.clock_offset_us));
      }
      SyncSetupResponse response{body.rbma_id, body.du_id};
      self.send_du_to_cu(body.du_id, s.master_cu, InterfaceKind::F1M, InterfaceKind::XnC,
                         response, now);
    }

    void operator()(const SyncSetupResponse& body) {
      SyncSession& s = self.session(body.rbma_id);
      if (msg.destination.kind == NodeKind::Cu &&
          static_cast<int>(msg.destination.id) != s.master_cu) {
        // Parent CU forwards the response to the master over Xn-C.
        self.deliver(make_message(InterfaceKind::XnC, msg.destination,
                                  NodeRef{NodeKind::Cu, s.master_cu}, body),
                     now);
        return;
      }
      if (--s.awaiting_responses == 0) {
        s.ready = true;
        s.master.emplace(s.outcome.params, s.outcome.max_data_latency_us);
        std::vector<PendingChunk> pending;
        pending.swap(s.pending);
        for (const PendingChunk& chunk : pending) {
          self.process_sync_chunk(s, chunk, now);
        }
      }
    }

    void operator()(const SyncPduTransfer& body) {
      if (msg.destination.kind == NodeKind::Cu) {
        self.send_cu_to_du(static_cast<int>(msg.destination.id), body.final_du,
                           InterfaceKind::F1U, InterfaceKind::XnU, body, now);
        return;
      }
      SyncSession& s = self.session(body.rbma_id);
      if (self.drop_faults_.count({body.final_du, body.pdu.packet_number})) {
        ++self.metrics_.pdus_injected_lost;
        self.fault_log_.push_back("drop_pdu du=" + std::to_string(body.final_du) +
                                  " packet_number=" +
                                  std::to_string(body.pdu.packet_number));
        return;
      }
      auto rit = s.receivers.find(body.final_du);
      if (rit == s.receivers.end()) {
        fail(ErrorCode::RuntimeInvariantViolation,
             "pdu for du " + std::to_string(body.final_du) + " before sync setup");
      }
      SyncReceiverState& receiver = rit->second;
      auto muted_now = receiver.ingest_pdu(body.pdu, now);
      if (muted_now) {
        ++self.metrics_.pdus_late;
        self.log_mute(s, body.final_du, *muted_now);
      } else {
        std::int64_t period = period_of(receiver.params(), body.pdu.tta_us);
        if (s.emit_scheduled.emplace(body.final_du, period).second) {
          TimerPayload timer;
          timer.kind = TimerPayload::Kind::EmitDue;
          timer.rbma_id = body.rbma_id;
          timer.du_id = body.final_du;
          timer.period = period;
          self.queue_.push(body.pdu.tta_us, EventKind::Timer, timer);
        }
      }
      // A freshly visible gap may finalize past periods.
      self.handle_gap_mutes(s, body.final_du, receiver.detect_loss(now));
    }

    void operator()(const RbmaSetup&) {
      // Multicast area setup at a joining gNB: bookkeeping only.
    }

    void operator()(const RbmaUpdateRequest& body) {
      // Network side of 2(b): pick the lowest-id area covering the new cell.
      std::optional<int> covering;
      for (const auto& [rid, rbma] : self.rbmas_->all()) {
        std::vector<int> cells = self.rbmas_->resolve_cells(rid);
        if (std::binary_search(cells.begin(), cells.end(), body.new_cell)) {
          covering = rid;
          break;
        }
      }
      if (!covering) {
        fail(ErrorCode::RuntimeInvariantViolation,
             "no rbma covers cell " + std::to_string(body.new_cell) +
                 " for the update of ue " + std::to_string(body.ue_id));
      }
      int du = self.du_of_cell_or_fail(body.new_cell);
      auto serving_cu = self.topology_->cu_of_du(du);

      // Multi-gNB area: distribute the setup over Xn to the other gNBs.
      std::set<int> parents;
      for (const TransmissionPoint& p : self.rbmas_->resolve_rbma(*covering)) {
        auto cu = self.topology_->cu_of_du(p.du_id);
        if (cu) parents.insert(*cu);
      }
      if (serving_cu && parents.size() > 1) {
        for (int cu : parents) {
          if (cu == *serving_cu) continue;
          self.deliver(make_message(InterfaceKind::XnC, NodeRef{NodeKind::Cu, *serving_cu},
                                    NodeRef{NodeKind::Cu, cu},
                                    RbmaSetup{*covering, cu}),
                       now);
        }
      }

      RbmaUpdateConfig config;
      config.ue_id = body.ue_id;
      config.rbma_id = *covering;
      config.g_rnti = self.g_rnti_of(*covering);
      config.new_cell = body.new_cell;
      self.deliver(make_message(InterfaceKind::Uu, NodeRef{NodeKind::Du, du},
                                NodeRef{NodeKind::Ue, body.ue_id}, config),
                   now);
    }

    void operator()(const RbmaUpdateConfig& body) {
      UeContext& ctx = self.ues_->context(body.ue_id);
      self.ues_->apply_rbma_update(body.ue_id, body.rbma_id, body.g_rnti);
      ctx.serving_cell = body.new_cell;
      self.ue_runtime_[body.ue_id].update_pending = false;
      self.ue_runtime_[body.ue_id].interest_rbma = body.rbma_id;
      ++self.metrics_.rbma_update_exchanges;
      self.log_transition(now, body.ue_id, RrcState::Inactive, RrcState::Inactive,
                          "rbma_update");
    }

    void operator()(const RrcSuspend&) {}
    void operator()(const RrcResume&) {}

    void operator()(const PduSessionModification& body) {
      if (msg.destination.kind == NodeKind::Amf && !body.response) {
        PduSessionModification response = body;
        response.response = true;
        self.deliver(make_message(InterfaceKind::N2, msg.destination, msg.source,
                                  response),
                     now);
      }
    }

    void operator()(const MulticastUserData& body) {
      SyncSession& s = self.session(body.rbma_id);
      PendingChunk chunk{body.service_id, body.chunk_index, body.chunk, body.ingest_us};

      // Scenario-1 UEs take the stream over their unicast bearers right away.
      for (const auto& [ue_id, ctx] : self.ues_->contexts()) {
        if (ctx.rrc_state != RrcState::Connected || !ctx.multicast_over_unicast) continue;
        const UeRuntime& rt = self.ue_runtime_.at(ue_id);
        if (!rt.interest_rbma || *rt.interest_rbma != body.rbma_id) continue;
        int du = self.du_of_cell_or_fail(ctx.serving_cell);
        NodeRef cu_ref{NodeKind::Cu, s.master_cu};
        NodeRef du_ref{NodeKind::Du, du};
        Usec path = 0;
        if (const Link* f1u = self.topology_->find_link(cu_ref, du_ref, InterfaceKind::F1U)) {
          path = f1u->latency_us;
        } else {
          auto parent = self.topology_->cu_of_du(du);
          if (!parent) {
            fail(ErrorCode::NoSuchLink, "du " + std::to_string(du) + " unreachable");
          }
          path = self.require_link(cu_ref, NodeRef{NodeKind::Cu, *parent},
                                   InterfaceKind::XnU)
                     .latency_us +
                 self.require_link(NodeRef{NodeKind::Cu, *parent}, du_ref,
                                   InterfaceKind::F1U)
                     .latency_us;
        }
        Usec uu = self.uu_latency_of_du(du);
        TimerPayload delivery;
        delivery.kind = TimerPayload::Kind::UeAirDelivery;
        delivery.ue_id = ue_id;
        delivery.rbma_id = body.rbma_id;
        delivery.service_id = body.service_id;
        delivery.sequence_number = static_cast<std::uint64_t>(body.chunk_index);
        delivery.channel = ChannelKind::Dtch;
        delivery.unicast_drb = true;
        delivery.ingest_us = body.ingest_us;
        self.queue_.push(now + path + uu, EventKind::Timer, delivery);
      }

      if (s.ready) {
        self.process_sync_chunk(s, chunk, now);
      } else {
        s.pending.push_back(std::move(chunk));
      }
    }
  };
  std::visit(Visitor{*this, msg, now}, msg.body);
}

void SimRunner::process_sync_chunk(SyncSession& s, const PendingChunk& chunk, Usec now) {
  std::vector<SyncPdu> pdus = s.master->encapsulate({chunk.bytes}, now);
  for (const SyncPdu& pdu : pdus) {
    s.pdu_meta[pdu.packet_number] = PduMeta{chunk.service_id, chunk.arrival_us};
    ++metrics_.pdus_sent;
    for (const auto& [du, receiver] : s.receivers) {
      SyncPduTransfer transfer;
      transfer.rbma_id = s.rbma_id;
      transfer.service_id = chunk.service_id;
      transfer.final_du = du;
      transfer.ingest_us = chunk.arrival_us;
      transfer.pdu = pdu;
      send_cu_to_du(s.master_cu, du, InterfaceKind::F1U, InterfaceKind::XnU, transfer,
                    now);
    }
  }
}

void SimRunner::handle_gap_mutes(SyncSession& s, int du, const GapReport& report) {
  for (const Gap& gap : report.gaps) {
    for (std::int64_t period : gap.muted_periods) {
      log_mute(s, du, period);
    }
  }
}

void SimRunner::log_mute(SyncSession& s, int du, std::int64_t period) {
  if (!logged_mutes_.emplace(s.rbma_id, du, period).second) return;
  metrics_.muted_du_periods.emplace(du, period);
  Usec boundary = s.outcome.params.epoch_us + period * s.outcome.params.period_us();
  emission_rows_.push_back(std::to_string(du) + "," + std::to_string(period) + "," +
                           std::to_string(boundary) + ",0,1");
  // Alignment bookkeeping: the member cells of this DU sit out the period.
  const Rbma& rbma = rbmas_->get(s.rbma_id);
  for (const MemberCell& m : rbma.members) {
    if (du_of_cell_or_fail(m.cell_id) != du) continue;
    TransmissionEvent event;
    event.cell_id = m.cell_id;
    event.time_us = boundary;
    event.muted = true;
    alignment_[{s.rbma_id, period}].push_back(event);
  }
}

Usec SimRunner::uu_latency_of_du(int du) {
  return require_link(NodeRef{NodeKind::Du, du}, NodeRef{NodeKind::Ue, NodeRef::kAnyUe},
                      InterfaceKind::Uu)
      .latency_us;
}

void SimRunner::handle_emissions(SyncSession& s, int du,
                                 const std::vector<DuEmission>& emissions, Usec now) {
  if (emissions.empty()) return;
  const Rbma& rbma = rbmas_->get(s.rbma_id);

  std::vector<int> du_cells;
  for (const TransmissionPoint& p : rbmas_->resolve_rbma(s.rbma_id)) {
    if (p.du_id == du) du_cells.push_back(p.cell_id);
  }

  for (const DuEmission& em : emissions) {
    ++metrics_.emissions;
    emission_rows_.push_back(std::to_string(du) + "," + std::to_string(em.period) + "," +
                             std::to_string(em.air_time_us) + "," +
                             std::to_string(em.content_hash) + ",0");
    const PduMeta& meta = s.pdu_meta.at(em.packet_number);
    last_service_hash_[meta.service_id] = em.content_hash;
    for (int cell : du_cells) {
      const Cell& c = topology_->cell(cell);
      TransmissionEvent event;
      event.cell_id = cell;
      event.time_us = em.air_time_us;
      Usec frame_offset =
          ((em.air_time_us % kFrameDurationUs) + kFrameDurationUs) % kFrameDurationUs;
      event.slot = static_cast<int>(frame_offset /
                                    topology_->numerology(c.numerology_mu).slot_duration_us);
      auto alloc_it = rbmas_->allocations().find(meta.service_id);
      if (alloc_it != rbmas_->allocations().end() &&
          alloc_it->second.per_cell.count(cell)) {
        const PrbRanges& ranges = alloc_it->second.per_cell.at(cell);
        event.prb_start = ranges.ranges.front().first;
        event.prb_end = ranges.ranges.back().second;
      } else {
        auto wit = rbma.windows.find(cell);
        if (wit != rbma.windows.end()) {
          event.prb_start = wit->second.prb_start;
          event.prb_end = wit->second.prb_end;
        }
      }
      event.content_hash = em.content_hash;
      alignment_[{s.rbma_id, em.period}].push_back(event);
    }
  }

  // XRB switching for the multicast-RB listeners under this DU.
  std::vector<int> interested = multicast_set_on_du(s.rbma_id, du, false);
  if (interested.empty()) return;
  XrbConfig cfg = xrb_config_for(s.rbma_id);
  SwitchingDecision decision =
      decide_channels(interested, latest_reports_, cfg, now, cost_model_);
  ++metrics_.switching_evaluations;
  for (const auto& [ue, assigned] : decision.assignment) {
    std::string reason;
    auto rit = latest_reports_.find(ue);
    if (rit == latest_reports_.end()) {
      reason = "no_report";
    } else if (now - rit->second.timestamp_us > cfg.report_staleness_us) {
      reason = "stale_report";
    } else if (rit->second.ss_rsrp_dbm < cfg.rsrp_threshold_dbm) {
      reason = "below_threshold";
    } else if (assigned == ChannelKind::Xtch) {
      reason = "above_threshold";
    } else {
      reason = "min_count_demotion";
    }
    if (assigned == ChannelKind::Dtch &&
        (reason == "no_report" || reason == "stale_report" ||
         reason == "above_threshold")) {
      reason = "min_count_demotion";
    }
    decision_rows_.push_back(std::to_string(now) + "," + std::to_string(s.rbma_id) + "," +
                             std::to_string(ue) + "," + to_string(assigned) + "," +
                             reason);
  }

  Usec uu = uu_latency_of_du(du);
  for (const DuEmission& em : emissions) {
    const PduMeta& meta = s.pdu_meta.at(em.packet_number);
    PdcpPdu pdu;
    pdu.sequence_number = static_cast<std::uint32_t>(em.packet_number);
    std::vector<RoutedCopy> copies = route_pdu(pdu, decision, cfg);
    for (const RoutedCopy& copy : copies) {
      for (int ue : copy.target_ues) {
        TimerPayload delivery;
        delivery.kind = TimerPayload::Kind::UeAirDelivery;
        delivery.ue_id = ue;
        delivery.rbma_id = s.rbma_id;
        delivery.service_id = meta.service_id;
        delivery.sequence_number = em.packet_number;
        delivery.channel = copy.channel;
        delivery.ingest_us = meta.ingest_us;
        queue_.push(em.air_time_us + uu, EventKind::Timer, delivery);
      }
    }
  }
}

std::vector<int> SimRunner::multicast_set_on_du(int rbma_id, int du,
                                                bool include_connected) const {
  std::vector<int> cells = rbmas_->resolve_cells(rbma_id);
  std::vector<int> out;
  for (const auto& [ue_id, ctx] : ues_->contexts()) {
    auto rt = ue_runtime_.find(ue_id);
    if (rt == ue_runtime_.end() || !rt->second.interest_rbma ||
        *rt->second.interest_rbma != rbma_id) {
      continue;
    }
    if (rt->second.update_pending) continue;
    bool state_ok = ctx.rrc_state == RrcState::Inactive ||
                    (include_connected && ctx.rrc_state == RrcState::Connected);
    if (!state_ok) continue;
    if (!std::binary_search(cells.begin(), cells.end(), ctx.serving_cell)) continue;
    auto serving_du = topology_->du_of_cell(ctx.serving_cell);
    if (!serving_du || *serving_du != du) continue;
    out.push_back(ue_id);
  }
  return out;
}

XrbConfig SimRunner::xrb_config_for(int rbma_id) const {
  XrbConfig cfg;
  cfg.xrb_id = rbma_id;
  cfg.rsrp_threshold_dbm = scenario_.policies.rsrp_threshold_dbm;
  cfg.min_multicast_ues = scenario_.policies.min_multicast_ues;
  cfg.report_staleness_us = scenario_.policies.report_staleness_us;
  cfg.dtch_logical_channel_id = scenario_.policies.dtch_lcid;
  cfg.xtch_logical_channel_id = scenario_.policies.xtch_lcid;
  cfg.unicast_rlc = RlcConfig{RlcMode::AM, 12, 50};
  cfg.multicast_rlc = RlcConfig{RlcMode::UM, 12, 50};
  return cfg;
}

void SimRunner::on_traffic(const TrafficPayload& payload, Usec now) {
  auto admitted = admitted_service_rbma_.find(payload.service_id);
  if (admitted == admitted_service_rbma_.end()) {
    ++skipped_chunks_;
    return;
  }
  int rbma_id = admitted->second;
  SyncSession& s = session(rbma_id);

  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(payload.chunk_octets));
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    bytes[i] = static_cast<std::uint8_t>(
        (payload.service_id * 31 + payload.chunk_index * 7 + static_cast<int>(i)) & 0xff);
  }

  // The stream enters at the UPF and reaches the master CU over N3.
  NodeRef cu_ref{NodeKind::Cu, s.master_cu};
  const Link* n3 = nullptr;
  for (const auto& link : topology_->links) {
    if (link.kind != InterfaceKind::N3) continue;
    if ((link.a.kind == NodeKind::Cu && link.a.id == s.master_cu) ||
        (link.b.kind == NodeKind::Cu && link.b.id == s.master_cu)) {
      n3 = &link;
      break;
    }
  }
  if (n3 == nullptr) {
    fail(ErrorCode::NoSuchLink, "no N3 link at cu " + std::to_string(s.master_cu));
  }
  NodeRef upf = n3->a.kind == NodeKind::Upf ? n3->a : n3->b;

  MulticastUserData body;
  body.rbma_id = rbma_id;
  body.service_id = payload.service_id;
  body.chunk_index = payload.chunk_index;
  body.ingest_us = now;
  body.chunk = std::move(bytes);
  deliver(make_message(InterfaceKind::N3, upf, cu_ref, body), now);
}

void SimRunner::on_timer(const TimerPayload& payload, Usec now) {
  switch (payload.kind) {
    case TimerPayload::Kind::EmitDue: {
      SyncSession& s = session(payload.rbma_id);
      SyncReceiverState& receiver = s.receivers.at(payload.du_id);
      handle_gap_mutes(s, payload.du_id, receiver.detect_loss(now));
      std::vector<DuEmission> emissions = receiver.emit_due(now);
      if (receiver.period_muted(payload.period)) {
        log_mute(s, payload.du_id, payload.period);
      }
      handle_emissions(s, payload.du_id, emissions, now);
      break;
    }
    case TimerPayload::Kind::UeAirDelivery: {
      if (!ues_->has_context(payload.ue_id)) break;
      const UeRuntime& rt = ue_runtime_.at(payload.ue_id);
      if (rt.update_pending) {
        ++metrics_.suppressed_during_update;
        break;
      }
      if (payload.unicast_drb) {
        ++metrics_.deliveries_per_ue[payload.ue_id];
        metrics_.user_plane.add(now - payload.ingest_us);
        break;
      }
      DedupVerdict verdict = dedup_.receive(
          payload.ue_id, static_cast<std::uint32_t>(payload.sequence_number));
      if (verdict == DedupVerdict::Deliver) {
        ++metrics_.deliveries_per_ue[payload.ue_id];
        metrics_.user_plane.add(now - payload.ingest_us);
      } else {
        ++metrics_.dedup_discards;
      }
      break;
    }
    case TimerPayload::Kind::InactivityCheck: {
      if (!ues_->has_context(payload.ue_id)) break;
      UeContext& ctx = ues_->context(payload.ue_id);
      if (ctx.rrc_state != RrcState::Connected) break;
      if (ctx.last_unicast_activity_us != payload.stamp_us) break;
      if (now - ctx.last_unicast_activity_us < ues_->policy().inactivity_timeout_us) break;

      const UeRuntime& rt = ue_runtime_.at(payload.ue_id);
      if (!rt.interest_rbma) break; // nothing to suspend onto; idle timer handles it

      // Keep the UE connected when the switch would put everyone on unicast
      // anyway: unicast bearers beat a feedback-less multicast bearer then.
      int du = du_of_cell_or_fail(ctx.serving_cell);
      std::vector<int> group = multicast_set_on_du(*rt.interest_rbma, du, true);
      if (std::find(group.begin(), group.end(), payload.ue_id) == group.end()) {
        group.push_back(payload.ue_id);
      }
      SwitchingDecision decision = decide_channels(
          group, latest_reports_, xrb_config_for(*rt.interest_rbma), now, cost_model_);
      bool any_xtch = !decision.ues_on(ChannelKind::Xtch).empty();
      if (!any_xtch) {
        ++metrics_.suppressed_suspends;
        break;
      }

      ues_->suspend_to_inactive(*topology_, payload.ue_id, *rt.interest_rbma,
                                g_rnti_of(*rt.interest_rbma), now);
      ++metrics_.suspends;
      deliver(make_message(InterfaceKind::Uu, NodeRef{NodeKind::Du, du},
                           NodeRef{NodeKind::Ue, payload.ue_id},
                           RrcSuspend{payload.ue_id, *rt.interest_rbma,
                                      g_rnti_of(*rt.interest_rbma)}),
              now);
      log_transition(now, payload.ue_id, RrcState::Connected, RrcState::Inactive,
                     "inactivity_suspend");
      break;
    }
    case TimerPayload::Kind::IdleReleaseCheck: {
      if (!ues_->has_context(payload.ue_id)) break;
      UeContext& ctx = ues_->context(payload.ue_id);
      if (ctx.rrc_state == RrcState::Idle) break;
      if (ctx.last_unicast_activity_us != payload.stamp_us) break;
      if (now - ctx.last_unicast_activity_us < ues_->policy().idle_release_timeout_us) {
        break;
      }
      RrcState from = ctx.rrc_state;
      ues_->release_to_idle(payload.ue_id, now);
      log_transition(now, payload.ue_id, from, RrcState::Idle, "idle_release");
      break;
    }
    case TimerPayload::Kind::UeActivity:
      do_activity(payload.ue_id, payload.activity_kind, now);
      break;
    case TimerPayload::Kind::UeInterest:
      do_interest(payload.ue_id, payload.rbma_id, now);
      break;
  }
}

void SimRunner::do_activity(int ue_id, ActivityKind kind, Usec now) {
  UeContext& ctx = ues_->context(ue_id);
  if (kind == ActivityKind::MulticastInterest) {
    ues_->report_activity(ue_id, kind, now);
    return;
  }

  RrcState from = ctx.rrc_state;
  LatencyModel model{scenario_.policies.processing_us};
  int du = du_of_cell_or_fail(ctx.serving_cell);

  if (from == RrcState::Idle) {
    Usec setup = model.idle_setup_latency_us(*topology_, ctx.serving_cell);
    metrics_.cp_setup.add(setup);
    ues_->report_activity(ue_id, kind, now);
    ++metrics_.uplink_msgs_per_ue[ue_id];
    deliver(make_message(InterfaceKind::Uu, NodeRef{NodeKind::Ue, ue_id},
                         NodeRef{NodeKind::Du, du}, RrcResume{ue_id}),
            now);
    log_transition(now, ue_id, from, RrcState::Connected, "idle_setup");
  } else if (from == RrcState::Inactive) {
    ResumeOutcome outcome = ues_->resume_to_connected(*topology_, ue_id, now);
    metrics_.rrc_resume.add(outcome.resume_latency_us);
    ++metrics_.uplink_msgs_per_ue[ue_id];
    deliver(make_message(InterfaceKind::Uu, NodeRef{NodeKind::Ue, ue_id},
                         NodeRef{NodeKind::Du, du}, RrcResume{ue_id}),
            now);
    log_transition(now, ue_id, from, RrcState::Connected, "inactive_resume");
  } else {
    ues_->report_activity(ue_id, kind, now);
  }
  arm_timers(ue_id, now);
}

void SimRunner::do_interest(int ue_id, int rbma_id, Usec now) {
  UeContext& ctx = ues_->context(ue_id);
  ue_runtime_[ue_id].interest_rbma = rbma_id;
  ues_->report_activity(ue_id, ActivityKind::MulticastInterest, now);

  if (ctx.rrc_state == RrcState::Connected) {
    // PDU session modification so the core allocates multicast resources.
    int du = du_of_cell_or_fail(ctx.serving_cell);
    auto cu = topology_->cu_of_du(du);
    if (cu) {
      for (const auto& link : topology_->links) {
        if (link.kind != InterfaceKind::N2) continue;
        if ((link.a.kind == NodeKind::Cu && link.a.id == *cu) ||
            (link.b.kind == NodeKind::Cu && link.b.id == *cu)) {
          NodeRef cu_ref{NodeKind::Cu, *cu};
          NodeRef amf = link.a.kind == NodeKind::Amf ? link.a : link.b;
          deliver(make_message(InterfaceKind::N2, cu_ref, amf,
                               PduSessionModification{ue_id, rbma_id, false}),
                  now);
          break;
        }
      }
    }
  }
}

void SimRunner::arm_timers(int ue_id, Usec now) {
  const InactivityPolicy& policy = ues_->policy();
  Usec inactivity_at = now + policy.inactivity_timeout_us;
  if (inactivity_at <= horizon_us_) {
    TimerPayload p;
    p.kind = TimerPayload::Kind::InactivityCheck;
    p.ue_id = ue_id;
    p.stamp_us = now;
    queue_.push(inactivity_at, EventKind::Timer, p);
  }
  Usec idle_at = now + policy.idle_release_timeout_us;
  if (idle_at <= horizon_us_) {
    TimerPayload p;
    p.kind = TimerPayload::Kind::IdleReleaseCheck;
    p.ue_id = ue_id;
    p.stamp_us = now;
    queue_.push(idle_at, EventKind::Timer, p);
  }
}

void SimRunner::log_transition(Usec now, int ue_id, RrcState from, RrcState to,
                               const std::string& trigger) {
  transition_rows_.push_back(std::to_string(now) + "," + std::to_string(ue_id) + "," +
                             to_string(from) + "," + to_string(to) + "," + trigger + "," +
                             std::to_string(metrics_.uplink_msgs_per_ue[ue_id]));
}

void SimRunner::on_measurement(const MeasurementPayload& payload, Usec now) {
  latest_reports_[payload.report.ue_id] = payload.report;
  ++metrics_.uplink_msgs_per_ue[payload.report.ue_id];
  (void)now;
}

void SimRunner::on_mobility(const MobilityPayload& payload, Usec now) {
  const Waypoint& wp = payload.waypoint;
  if (wp.rsrp_dbm.empty()) return;

  // Strongest cell, ties to the lower id.
  int best_cell = 0;
  double best_rsrp = -1e9;
  for (const auto& [cell, rsrp] : wp.rsrp_dbm) {
    if (rsrp > best_rsrp) {
      best_rsrp = rsrp;
      best_cell = cell;
    }
  }

  if (ues_->is_rom(wp.ue_id)) {
    // Receive-only: always silent, the harness just tracks where it camps.
    ues_->rom_camp(wp.ue_id, best_cell);
    return;
  }

  UeContext& ctx = ues_->context(wp.ue_id);
  auto serving_it = wp.rsrp_dbm.find(ctx.serving_cell);
  double serving_rsrp = serving_it != wp.rsrp_dbm.end() ? serving_it->second : -1e9;
  bool better = best_cell != ctx.serving_cell && best_rsrp > serving_rsrp + 3.0;
  if (!better) return;

  if (ctx.rrc_state == RrcState::Inactive) {
    const UeRuntime& rt = ue_runtime_.at(wp.ue_id);
    if (rt.update_pending) return;
    ReselectOutcome outcome =
        ues_->cell_reselect(*topology_, *rbmas_, wp.ue_id, best_cell, now);
    if (!outcome.update_required) {
      ++metrics_.silent_reselections;
      log_transition(now, wp.ue_id, RrcState::Inactive, RrcState::Inactive,
                     "cell_reselect_2a");
    } else {
      ue_runtime_[wp.ue_id].update_pending = true;
      ++metrics_.uplink_msgs_per_ue[wp.ue_id];
      int du = du_of_cell_or_fail(best_cell);
      deliver(make_message(InterfaceKind::Uu, NodeRef{NodeKind::Ue, wp.ue_id},
                           NodeRef{NodeKind::Du, du},
                           RbmaUpdateRequest{wp.ue_id, best_cell}),
              now);
      log_transition(now, wp.ue_id, RrcState::Inactive, RrcState::Inactive,
                     "rbma_update_request");
    }
  } else if (ctx.rrc_state == RrcState::Idle) {
    ctx.serving_cell = best_cell; // silent camping, tracking-area granularity
  }
  // Connected handover is out of scope.
}

void SimRunner::on_service(const ServicePayload& payload, Usec now) {
  if (payload.op == ServicePayload::Op::Admit) {
    AdmissionResult result = rbmas_->admit_service(payload.config);
    if (result.admitted) {
      ++metrics_.services_admitted;
      admitted_service_rbma_[payload.config.service_id] = payload.config.rbma_id;
      std::string where;
      for (const auto& [cell, ranges] : result.allocation.per_cell) {
        where += " cell" + std::to_string(cell) + "=" + ranges.str();
      }
      metrics_.admission_log.push_back("t=" + std::to_string(now) + " service=" +
                                       std::to_string(payload.config.service_id) +
                                       " admitted" + where);
    } else {
      ++metrics_.services_rejected;
      metrics_.admission_log.push_back("t=" + std::to_string(now) + " service=" +
                                       std::to_string(payload.config.service_id) +
                                       " rejected: " + result.reason);
    }
  } else {
    rbmas_->release_service(payload.service_id);
    admitted_service_rbma_.erase(payload.service_id);
    metrics_.admission_log.push_back("t=" + std::to_string(now) + " service=" +
                                     std::to_string(payload.service_id) + " released");
  }
}

void SimRunner::build_utilization() {
  std::map<int, int> demand;
  for (const ScenarioUnicastDemand& d : scenario_.unicast_demand) {
    demand[d.cell_id] = d.prbs_per_slot;
  }
  std::vector<Frame> frames;
  for (const auto& [cell_id, cell] : topology_->cells) {
    std::vector<ServicePlacement> placements;
    for (const auto& [sid, alloc] : rbmas_->allocations()) {
      auto it = alloc.per_cell.find(cell_id);
      if (it == alloc.per_cell.end()) continue;
      const Rbma& rbma = rbmas_->get(alloc.rbma_id);
      ServicePlacement placement;
      placement.service_id = sid;
      placement.prbs = it->second;
      auto hash_it = last_service_hash_.find(sid);
      if (hash_it != last_service_hash_.end()) placement.content_hash = hash_it->second;
      if (rbma.mode == RbmaMode::Composite) {
        // first constituent holding a window on the cell, as admission chose
        for (int cid : rbma.constituents) {
          const Rbma& constituent = rbmas_->get(cid);
          auto wit = constituent.windows.find(cell_id);
          if (wit != constituent.windows.end()) {
            placement.slots = wit->second.slots;
            break;
          }
        }
      } else {
        auto wit = rbma.windows.find(cell_id);
        if (wit != rbma.windows.end()) placement.slots = wit->second.slots;
      }
      placements.push_back(std::move(placement));
    }
    UnicastDemand unicast{demand.count(cell_id) ? demand.at(cell_id) : 0};
    frames.push_back(build_frame(*topology_, cell_id, 0, placements, unicast));
  }
  MultiplexReport report = multiplex_report(*rbmas_, frames);
  utilization_ = report.cells;
}

void SimRunner::finish() {
  // Conservation: every sent message was delivered exactly once.
  if (metrics_.messages_sent != metrics_.messages_delivered) {
    fail(ErrorCode::RuntimeInvariantViolation,
         "message conservation broken: sent " + std::to_string(metrics_.messages_sent) +
             ", delivered " + std::to_string(metrics_.messages_delivered));
  }
  rbmas_->check_admission_safety();

  // SFN alignment per (rbma, period), muted cells excluded but accounted.
  Usec tolerance = scenario_.policies.alignment_tolerance_us;
  for (const auto& [key, events] : alignment_) {
    const Rbma& rbma = rbmas_->get(key.first);
    if (rbma.mode != RbmaMode::Sfn) continue;
    ++metrics_.periods_checked;
    AlignmentResult result = check_sfn_alignment(events, rbma, tolerance);
    std::set<int> present;
    for (const TransmissionEvent& e : events) present.insert(e.cell_id);
    for (const MemberCell& m : rbma.members) {
      if (!present.count(m.cell_id)) {
        result.aligned = false;
        result.details.push_back("cell " + std::to_string(m.cell_id) +
                                 " silent without mute");
      }
    }
    if (result.aligned) {
      ++metrics_.periods_aligned;
    } else {
      ++metrics_.periods_misaligned;
      for (const std::string& d : result.details) {
        metrics_.misalignment_details.push_back("rbma " + std::to_string(key.first) +
                                                " period " + std::to_string(key.second) +
                                                ": " + d);
      }
    }
  }

  for (const auto& [ue, rt] : ue_runtime_) {
    if (rt.update_pending) ++metrics_.outstanding_updates;
  }

  // Broadcast coverage of devices the network cannot see.
  std::set<int> sfn_cells;
  for (const auto& [rid, rbma] : rbmas_->all()) {
    if (rbma.mode != RbmaMode::Sfn) continue;
    for (const MemberCell& m : rbma.members) sfn_cells.insert(m.cell_id);
  }
  for (const auto& [ue_id, rom] : ues_->rom_ues()) {
    if (sfn_cells.count(rom.camped_cell)) ++metrics_.rom_ues_covered;
  }
  for (const auto& [ue_id, ctx] : ues_->contexts()) {
    if (ctx.rrc_state == RrcState::Idle && sfn_cells.count(ctx.serving_cell)) {
      ++metrics_.idle_ues_covered;
    }
  }

  metrics_.tunnels_opened = tunnels_.count();
  build_utilization();

  for (const auto& [rid, rbma] : rbmas_->all()) {
    RbmaCoverageReport report = rbmas_->coverage_report(rid);
    std::ostringstream os;
    os << "rbma " << rid << ": mode=" << to_string(report.mode)
       << " cells=" << report.cell_count << " carriers=";
    for (std::size_t i = 0; i < report.carriers.size(); ++i) {
      if (i > 0) os << "/";
      os << report.carriers[i];
    }
    int reserved = 0, free_cap = 0;
    for (const auto& [cell, cap] : report.reserved_capacity) reserved += cap;
    for (const auto& [cell, cap] : report.free_capacity) free_cap += cap;
    os << " reserved_prb_slots=" << reserved << " free=" << free_cap << " services=";
    for (std::size_t i = 0; i < report.admitted_services.size(); ++i) {
      if (i > 0) os << ",";
      os << report.admitted_services[i];
    }
    os << " tdm=";
    bool first_cell = true;
    for (const auto& [cell, layout] : report.tdm_layout) {
      if (!first_cell) os << ";";
      first_cell = false;
      os << "cell" << cell << ":";
      bool first_rbma = true;
      for (const auto& [owner, slots] : layout) {
        if (!first_rbma) os << "+";
        first_rbma = false;
        os << "r" << owner << "[";
        for (std::size_t i = 0; i < slots.size(); ++i) {
          if (i > 0) os << ",";
          os << slots[i];
        }
        os << "]";
      }
    }
    metrics_.rbma_reports.push_back(os.str());
  }

  // Orthogonal scheduling for the single-cell deployments, when present.
  std::vector<int> single_cell_ids;
  for (const auto& [rid, rbma] : rbmas_->all()) {
    if (rbma.mode == RbmaMode::SingleCell) single_cell_ids.push_back(rid);
  }
  if (single_cell_ids.size() >= 2) {
    try {
      std::vector<CellReuseAssignment> plan = plan_reuse3(
          *topology_, *rbmas_, single_cell_ids, scenario_.policies.interference_radius_km);
      for (const CellReuseAssignment& a : plan) {
        metrics_.reuse3_plan.push_back("cell " + std::to_string(a.cell_id) +
                                       " partition " + std::to_string(a.partition));
      }
    } catch (const SimError& e) {
      metrics_.reuse3_plan.push_back(std::string("not three-colorable: ") + e.what());
    }
  }
}

std::string SimRunner::render_metrics_json() const {
  nlohmann::json j;
  j["scenario"] = scenario_.name;
  j["seed"] = options_.seed;
  j["events_processed"] = metrics_.events_processed;
  j["messages"] = {{"sent", metrics_.messages_sent},
                   {"delivered", metrics_.messages_delivered}};
  j["admission"] = {{"admitted", metrics_.services_admitted},
                    {"rejected", metrics_.services_rejected},
                    {"log", metrics_.admission_log}};
  j["sync"] = {{"pdus_sent", metrics_.pdus_sent},
               {"pdus_late", metrics_.pdus_late},
               {"pdus_injected_lost", metrics_.pdus_injected_lost},
               {"emissions", metrics_.emissions},
               {"muted_du_periods", metrics_.muted_du_periods.size()},
               {"tunnels", metrics_.tunnels_opened}};
  j["alignment"] = {{"checked", metrics_.periods_checked},
                    {"aligned", metrics_.periods_aligned},
                    {"misaligned", metrics_.periods_misaligned},
                    {"details", metrics_.misalignment_details}};
  j["rrc"] = {{"suspends", metrics_.suspends},
              {"suppressed_suspends", metrics_.suppressed_suspends},
              {"silent_reselections", metrics_.silent_reselections},
              {"rbma_updates", metrics_.rbma_update_exchanges}};
  nlohmann::json uplink = nlohmann::json::object();
  for (const auto& [ue, count] : metrics_.uplink_msgs_per_ue) {
    uplink[std::to_string(ue)] = count;
  }
  j["uplink_msgs_per_ue"] = uplink;
  nlohmann::json deliveries = nlohmann::json::object();
  for (const auto& [ue, count] : metrics_.deliveries_per_ue) {
    deliveries[std::to_string(ue)] = count;
  }
  j["deliveries_per_ue"] = deliveries;
  j["dedup_discards"] = metrics_.dedup_discards;

  auto stats = [](const LatencyStats& s) {
    nlohmann::json out;
    out["count"] = s.samples.size();
    if (!s.empty()) {
      out["min_us"] = s.min();
      out["mean_us"] = s.mean();
      out["max_us"] = s.max();
    }
    return out;
  };
  j["latency"] = {{"cp_setup", stats(metrics_.cp_setup)},
                  {"rrc_resume", stats(metrics_.rrc_resume)},
                  {"user_plane", stats(metrics_.user_plane)}};

  nlohmann::json util = nlohmann::json::array();
  for (const CellUtilization& u : utilization_) {
    util.push_back({{"cell", u.cell_id},
                    {"broadcast", u.broadcast_fraction},
                    {"unicast", u.unicast_fraction},
                    {"empty", u.empty_fraction}});
  }
  j["utilization"] = util;

  j["areas"] = metrics_.rbma_reports;
  if (!metrics_.reuse3_plan.empty()) j["reuse3"] = metrics_.reuse3_plan;
  j["suppressed_during_update"] = metrics_.suppressed_during_update;
  j["coverage"] = {{"rom_total", metrics_.rom_ues_total},
                   {"rom_covered", metrics_.rom_ues_covered},
                   {"idle_covered", metrics_.idle_ues_covered}};

  nlohmann::json reqs = nlohmann::json::array();
  for (const RequirementRow& row : requirement_table(metrics_)) {
    reqs.push_back({{"requirement", row.requirement},
                    {"pass", row.pass},
                    {"note", row.note}});
  }
  j["requirements"] = reqs;
  if (!fault_log_.empty()) j["faults"] = fault_log_;
  if (skipped_chunks_ > 0) j["skipped_chunks"] = skipped_chunks_;

  return j.dump(2) + "\n";
}

} // namespace

std::string render_summary(const Metrics& metrics, const std::string& scenario_name) {
  std::ostringstream os;
  os << "scenario: " << scenario_name << "\n";
  os << "events processed: " << metrics.events_processed << "\n";
  os << "messages: sent " << metrics.messages_sent << ", delivered "
     << metrics.messages_delivered << "\n";
  os << "\n[admission]\n";
  os << "admitted " << metrics.services_admitted << ", rejected "
     << metrics.services_rejected << "\n";
  for (const std::string& line : metrics.admission_log) os << "  " << line << "\n";
  os << "\n[sync]\n";
  os << "pdus sent " << metrics.pdus_sent << ", late " << metrics.pdus_late
     << ", injected losses " << metrics.pdus_injected_lost << ", emissions "
     << metrics.emissions << ", muted (du,period) " << metrics.muted_du_periods.size()
     << ", tunnels " << metrics.tunnels_opened << "\n";
  os << "\n[sfn alignment]\n";
  os << "periods checked " << metrics.periods_checked << ", aligned "
     << metrics.periods_aligned << ", misaligned " << metrics.periods_misaligned << "\n";
  for (const std::string& d : metrics.misalignment_details) os << "  " << d << "\n";
  os << "\n[rrc/mobility]\n";
  os << "suspends " << metrics.suspends << " (suppressed " << metrics.suppressed_suspends
     << "), silent reselections " << metrics.silent_reselections << ", rbma updates "
     << metrics.rbma_update_exchanges << "\n";
  for (const auto& [ue, count] : metrics.uplink_msgs_per_ue) {
    os << "  ue " << ue << ": uplink msgs " << count << "\n";
  }
  for (const auto& [ue, count] : metrics.deliveries_per_ue) {
    os << "  ue " << ue << ": deliveries " << count << "\n";
  }
  os << "dedup discards " << metrics.dedup_discards << "\n";
  os << "\n[latency]\n";
  auto show = [&](const char* name, const LatencyStats& s) {
    os << name << ": ";
    if (s.empty()) {
      os << "no samples\n";
    } else {
      os << "count " << s.samples.size() << ", min " << s.min() << " us, mean "
         << format_double(s.mean()) << " us, max " << s.max() << " us\n";
    }
  };
  show("cp_setup", metrics.cp_setup);
  show("rrc_resume", metrics.rrc_resume);
  show("user_plane", metrics.user_plane);
  if (!metrics.rrc_resume.empty() && !metrics.cp_setup.empty()) {
    os << "resume faster than setup: "
       << (metrics.rrc_resume.max() < metrics.cp_setup.min() ? "yes" : "no") << "\n";
  }
  os << "\n[areas]\n";
  for (const std::string& line : metrics.rbma_reports) os << line << "\n";
  if (!metrics.reuse3_plan.empty()) {
    os << "reuse-3 partitions:\n";
    for (const std::string& line : metrics.reuse3_plan) os << "  " << line << "\n";
  }
  if (metrics.suppressed_during_update > 0) {
    os << "deliveries withheld during area updates: " << metrics.suppressed_during_update
       << "\n";
  }
  os << "\n[coverage]\n";
  os << "receive-only covered " << metrics.rom_ues_covered << "/" << metrics.rom_ues_total
     << ", idle covered " << metrics.idle_ues_covered << "\n";
  os << "\n[requirements]\n";
  for (const RequirementRow& row : requirement_table(metrics)) {
    os << (row.pass ? "[PASS] " : "[FAIL] ") << row.requirement << " — " << row.note
       << "\n";
  }
  return os.str();
}

RunArtifacts run_scenario(const Scenario& scenario, const RunOptions& options) {
  SimRunner runner(scenario, options);
  return runner.run();
}

void validate_scenario(const Scenario& scenario, const RunOptions& options) {
  SimRunner runner(scenario, options);
  runner.init();
}

void write_artifacts(const RunArtifacts& artifacts, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    fail(ErrorCode::IoFailure, "cannot create " + out_dir + ": " + ec.message());
  }
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream out(out_dir + "/" + name, std::ios::binary);
    if (!out) {
      fail(ErrorCode::IoFailure, "cannot write " + out_dir + "/" + name);
    }
    out << content;
  };
  write("summary.txt", artifacts.summary_text);
  write("metrics.json", artifacts.metrics_json);
  write("emission_log.csv", artifacts.emission_log);
  write("decision_log.csv", artifacts.decision_log);
  write("transitions.csv", artifacts.transition_log);
}

} // namespace ransim
