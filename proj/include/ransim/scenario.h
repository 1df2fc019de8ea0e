#ifndef RANSIM_SCENARIO_H
#define RANSIM_SCENARIO_H

#include <optional>
#include <string>
#include <vector>

#include "ransim/bearer_switching.h"
#include "ransim/rbma.h"
#include "ransim/rrc_mobility.h"
#include "ransim/topology.h"
#include "ransim/types.h"

namespace ransim {

struct ScenarioRbma {
  int id = 0;
  RbmaMode mode = RbmaMode::SingleCell;
  std::vector<int> cells;
  bool slots_all = false; // "slots=all" resolves against the cell's frame
  std::vector<int> slots;
  int prb_start = 0;
  int prb_end = 0;
  std::vector<int> constituents;
  std::string slice_tag;
};

struct ScenarioService {
  ServiceConfig config;
  Usec at_us = 0;
};

struct ScenarioRelease {
  int service_id = 0;
  Usec at_us = 0;
};

struct ScenarioTraffic {
  int service_id = 0;
  Usec start_us = 0;
  int chunks = 0;
  int chunk_octets = 0;
  Usec interval_us = 0;
};

struct ScenarioUnicastDemand {
  int cell_id = 0;
  int prbs_per_slot = 0;
};

struct ScenarioUe {
  int ue_id = 0;
  UeCapability capability = UeCapability::Normal;
  int cell = 0;
  RrcState initial = RrcState::Idle;
};

struct ScenarioInterest {
  int ue_id = 0;
  int rbma_id = 0;
  Usec at_us = 0;
};

struct ScenarioActivity {
  int ue_id = 0;
  Usec at_us = 0;
  ActivityKind kind = ActivityKind::UnicastData;
};

struct ScenarioReport {
  int ue_id = 0;
  Usec at_us = 0;
  int cell_id = 0;
  double rsrp_dbm = 0.0;
};

struct ScenarioPolicies {
  Usec inactivity_timeout_us = 10'000'000;
  Usec idle_release_timeout_us = 60'000'000;
  double rsrp_threshold_dbm = -110.0;
  int min_multicast_ues = 1;
  Usec report_staleness_us = 200'000;
  Usec sync_period_ms = 40;
  Usec processing_us = 0;
  int dtch_lcid = 1;
  int xtch_lcid = 2;
  double interference_radius_km = 1.0;
  Usec alignment_tolerance_us = 0;
  std::optional<Usec> horizon_us;
};

struct FaultDropPdu {
  int du_id = 0;
  std::uint64_t packet_number = 0;
};

struct FaultClockSkew {
  int du_id = 0;
  Usec offset_us = 0;
};

struct FaultLatencySpike {
  InterfaceKind kind = InterfaceKind::F1U;
  NodeRef a;
  NodeRef b;
  Usec from_us = 0;
  Usec to_us = 0;
  Usec add_us = 0;
};

struct ScenarioFaults {
  std::vector<FaultDropPdu> drop_pdus;
  std::vector<FaultClockSkew> clock_skews;
  std::vector<FaultLatencySpike> latency_spikes;
};

struct Scenario {
  std::string name;
  TopologyConfig topology;
  std::vector<ScenarioRbma> rbmas;
  std::vector<ScenarioService> services;
  std::vector<ScenarioRelease> releases;
  std::vector<ScenarioTraffic> traffic;
  std::vector<ScenarioUnicastDemand> unicast_demand;
  std::vector<ScenarioUe> ues;
  std::vector<ScenarioInterest> interests;
  std::vector<ScenarioActivity> activities;
  std::vector<ScenarioReport> reports;
  ScenarioPolicies policies;
  ScenarioFaults faults;
  std::optional<std::string> trace_csv; // relative to the scenario file

  bool jitter_enabled() const;
};

// Section/key-value scenario format; see the schema notes in README.md.
// SchemaError with the offending line number on any malformed input.
Scenario parse_scenario_text(const std::string& text, const std::string& name);
Scenario parse_scenario_file(const std::string& path);

} // namespace ransim

#endif // RANSIM_SCENARIO_H
