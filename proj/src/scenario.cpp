#include "ransim/scenario.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace ransim {

bool Scenario::jitter_enabled() const {
  for (const auto& link : topology.links) {
    if (link.jitter_us > 0) return true;
  }
  return false;
}

namespace {

struct Line {
  int number = 0;
  std::string entry; // first token
  std::map<std::string, std::string> kv;
};

[[noreturn]] void schema_fail(int line, const std::string& message) {
  fail(ErrorCode::SchemaError, "line " + std::to_string(line) + ": " + message);
}

class Fields {
public:
  Fields(const Line& line) : line_(line) {}

  bool has(const std::string& key) const { return line_.kv.count(key) > 0; }

  std::string str(const std::string& key) const {
    auto it = line_.kv.find(key);
    if (it == line_.kv.end()) {
      schema_fail(line_.number, line_.entry + " missing " + key + "=");
    }
    return it->second;
  }

  std::string str_or(const std::string& key, const std::string& fallback) const {
    auto it = line_.kv.find(key);
    return it == line_.kv.end() ? fallback : it->second;
  }

  long long integer(const std::string& key) const {
    return to_int(key, str(key));
  }

  long long integer_or(const std::string& key, long long fallback) const {
    return has(key) ? integer(key) : fallback;
  }

  double real(const std::string& key) const {
    const std::string raw = str(key);
    try {
      std::size_t used = 0;
      double v = std::stod(raw, &used);
      if (used != raw.size()) throw std::invalid_argument(raw);
      return v;
    } catch (const std::exception&) {
      schema_fail(line_.number, key + "=" + raw + " is not a number");
    }
  }

  double real_or(const std::string& key, double fallback) const {
    return has(key) ? real(key) : fallback;
  }

  std::vector<int> int_list(const std::string& key) const {
    std::vector<int> out;
    std::string raw = str(key);
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
      out.push_back(static_cast<int>(to_int(key, item)));
    }
    if (out.empty()) schema_fail(line_.number, key + "= must not be empty");
    return out;
  }

  // "0-9" range, "0,4,8" list or "all".
  std::vector<int> slot_list(const std::string& key, bool& all) const {
    all = false;
    std::string raw = str(key);
    if (raw == "all") {
      all = true;
      return {};
    }
    auto dash = raw.find('-');
    if (dash != std::string::npos) {
      int lo = static_cast<int>(to_int(key, raw.substr(0, dash)));
      int hi = static_cast<int>(to_int(key, raw.substr(dash + 1)));
      if (lo > hi) schema_fail(line_.number, key + "=" + raw + " inverted range");
      std::vector<int> out;
      for (int s = lo; s <= hi; ++s) out.push_back(s);
      return out;
    }
    return int_list(key);
  }

  NodeRef node(const std::string& key) const {
    std::string raw = str(key);
    auto colon = raw.find(':');
    if (colon == std::string::npos) {
      schema_fail(line_.number, key + "=" + raw + " wants kind:id");
    }
    std::string kind = raw.substr(0, colon);
    std::string id = raw.substr(colon + 1);
    NodeRef ref;
    if (kind == "cu") ref.kind = NodeKind::Cu;
    else if (kind == "du") ref.kind = NodeKind::Du;
    else if (kind == "amf") ref.kind = NodeKind::Amf;
    else if (kind == "upf") ref.kind = NodeKind::Upf;
    else if (kind == "xuf") ref.kind = NodeKind::Xuf;
    else if (kind == "ue") ref.kind = NodeKind::Ue;
    else schema_fail(line_.number, key + ": unknown node kind " + kind);
    if (ref.kind == NodeKind::Ue && id == "*") {
      ref.id = NodeRef::kAnyUe;
    } else {
      ref.id = to_int(key, id);
    }
    return ref;
  }

  int line_number() const { return line_.number; }
  const std::string& entry() const { return line_.entry; }

private:
  long long to_int(const std::string& key, const std::string& raw) const {
    try {
      std::size_t used = 0;
      long long v = std::stoll(raw, &used);
      if (used != raw.size()) throw std::invalid_argument(raw);
      return v;
    } catch (const std::exception&) {
      schema_fail(line_.number, key + "=" + raw + " is not an integer");
    }
  }

  const Line& line_;
};

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::stringstream ss(text);
  std::string token;
  while (ss >> token) tokens.push_back(token);
  return tokens;
}

void parse_topology_line(const Fields& f, TopologyConfig& topo) {
  const std::string& entry = f.entry();
  if (entry == "numerology") {
    NumerologyEntry row;
    row.mu = static_cast<int>(f.integer("mu"));
    row.slot_duration_us = f.integer_or("slot_us", 0);
    row.max_isd_km = f.real("max_isd_km");
    topo.extra_numerologies.push_back(row);
  } else if (entry == "cell") {
    Cell cell;
    cell.cell_id = static_cast<int>(f.integer("id"));
    cell.x_km = f.real_or("x_km", 0.0);
    cell.y_km = f.real_or("y_km", 0.0);
    cell.carrier = static_cast<int>(f.integer_or("carrier", 0));
    cell.bandwidth_prbs = static_cast<int>(f.integer("prbs"));
    cell.numerology_mu = static_cast<int>(f.integer_or("mu", 0));
    std::string power = f.str_or("power", "hpht");
    if (power == "hpht") cell.power_class = PowerClass::HPHT;
    else if (power == "low") cell.power_class = PowerClass::LowPower;
    else schema_fail(f.line_number(), "power=" + power + " unknown");
    topo.cells.push_back(cell);
  } else if (entry == "du") {
    GnbDu du;
    du.du_id = static_cast<int>(f.integer("id"));
    if (f.has("cells")) du.served_cells = f.int_list("cells");
    du.clock_offset_us = f.integer_or("clock_offset_us", 0);
    if (f.has("declared_cells")) {
      du.declared_cell_count = static_cast<std::uint64_t>(f.integer("declared_cells"));
    }
    topo.dus.push_back(du);
  } else if (entry == "cu") {
    GnbCu cu;
    cu.cu_id = static_cast<int>(f.integer("id"));
    std::stringstream ss(f.str("roles"));
    std::string role;
    while (std::getline(ss, role, ',')) {
      if (role == "cp") cu.roles.cp = true;
      else if (role == "up") cu.roles.up = true;
      else if (role == "mc") cu.roles.mc = true;
      else schema_fail(f.line_number(), "roles: unknown role " + role);
    }
    if (f.has("dus")) cu.child_dus = f.int_list("dus");
    if (f.has("declared_dus")) {
      cu.declared_du_count = static_cast<std::uint64_t>(f.integer("declared_dus"));
    }
    topo.cus.push_back(cu);
  } else if (entry == "link") {
    Link link;
    auto kind = parse_interface_kind(f.str("kind"));
    if (!kind) schema_fail(f.line_number(), "kind=" + f.str("kind") + " unknown");
    link.kind = *kind;
    link.a = f.node("a");
    link.b = f.node("b");
    link.latency_us = f.integer("latency_us");
    link.jitter_us = f.integer_or("jitter_us", 0);
    topo.links.push_back(link);
  } else {
    schema_fail(f.line_number(), "unknown topology entry " + entry);
  }
}

void parse_rbma_line(const Fields& f, Scenario& scenario) {
  if (f.entry() != "rbma") {
    schema_fail(f.line_number(), "unknown rbma entry " + f.entry());
  }
  ScenarioRbma rbma;
  rbma.id = static_cast<int>(f.integer("id"));
  std::string mode = f.str("mode");
  if (mode == "single_cell") rbma.mode = RbmaMode::SingleCell;
  else if (mode == "sfn") rbma.mode = RbmaMode::Sfn;
  else if (mode == "composite") rbma.mode = RbmaMode::Composite;
  else schema_fail(f.line_number(), "mode=" + mode + " unknown");
  if (rbma.mode == RbmaMode::Composite) {
    rbma.constituents = f.int_list("members");
  } else {
    rbma.cells = f.int_list("cells");
    rbma.slots = f.slot_list("slots", rbma.slots_all);
    rbma.prb_start = static_cast<int>(f.integer("prb_start"));
    rbma.prb_end = static_cast<int>(f.integer("prb_end"));
  }
  rbma.slice_tag = f.str_or("slice", "");
  scenario.rbmas.push_back(rbma);
}

void parse_service_line(const Fields& f, Scenario& scenario) {
  const std::string& entry = f.entry();
  if (entry == "service") {
    ScenarioService s;
    s.config.service_id = static_cast<int>(f.integer("id"));
    s.config.rbma_id = static_cast<int>(f.integer("rbma"));
    s.config.mcs_index = static_cast<int>(f.integer_or("mcs", 0));
    s.config.required_prbs = static_cast<int>(f.integer("prbs"));
    s.config.data_rate_kbps = static_cast<int>(f.integer_or("rate_kbps", 0));
    s.config.priority = static_cast<int>(f.integer_or("priority", 0));
    s.at_us = f.integer_or("at_ms", 0) * kUsecPerMs;
    scenario.services.push_back(s);
  } else if (entry == "release") {
    ScenarioRelease r;
    r.service_id = static_cast<int>(f.integer("service"));
    r.at_us = f.integer("at_ms") * kUsecPerMs;
    scenario.releases.push_back(r);
  } else if (entry == "traffic") {
    ScenarioTraffic t;
    t.service_id = static_cast<int>(f.integer("service"));
    t.start_us = f.integer_or("start_ms", 0) * kUsecPerMs;
    t.chunks = static_cast<int>(f.integer("chunks"));
    t.chunk_octets = static_cast<int>(f.integer("chunk_octets"));
    t.interval_us = f.integer("interval_ms") * kUsecPerMs;
    if (t.chunks <= 0 || t.chunk_octets <= 0 || t.interval_us <= 0) {
      schema_fail(f.line_number(), "traffic needs positive chunks/chunk_octets/interval");
    }
    scenario.traffic.push_back(t);
  } else if (entry == "unicast_demand") {
    ScenarioUnicastDemand d;
    d.cell_id = static_cast<int>(f.integer("cell"));
    d.prbs_per_slot = static_cast<int>(f.integer("prbs_per_slot"));
    scenario.unicast_demand.push_back(d);
  } else {
    schema_fail(f.line_number(), "unknown services entry " + entry);
  }
}

void parse_ue_line(const Fields& f, Scenario& scenario) {
  const std::string& entry = f.entry();
  if (entry == "ue") {
    ScenarioUe ue;
    ue.ue_id = static_cast<int>(f.integer("id"));
    std::string cap = f.str_or("capability", "normal");
    if (cap == "normal") ue.capability = UeCapability::Normal;
    else if (cap == "rom") ue.capability = UeCapability::ReceiveOnly;
    else schema_fail(f.line_number(), "capability=" + cap + " unknown");
    ue.cell = static_cast<int>(f.integer("cell"));
    std::string state = f.str_or("state", "idle");
    if (state == "idle") ue.initial = RrcState::Idle;
    else if (state == "connected") ue.initial = RrcState::Connected;
    else schema_fail(f.line_number(), "state=" + state + " must be idle or connected");
    scenario.ues.push_back(ue);
  } else if (entry == "interest") {
    ScenarioInterest i;
    i.ue_id = static_cast<int>(f.integer("ue"));
    i.rbma_id = static_cast<int>(f.integer("rbma"));
    i.at_us = f.integer_or("at_ms", 0) * kUsecPerMs;
    scenario.interests.push_back(i);
  } else if (entry == "activity") {
    ScenarioActivity a;
    a.ue_id = static_cast<int>(f.integer("ue"));
    a.at_us = f.integer("at_ms") * kUsecPerMs;
    std::string kind = f.str_or("kind", "unicast");
    if (kind == "unicast") a.kind = ActivityKind::UnicastData;
    else if (kind == "multicast_interest") a.kind = ActivityKind::MulticastInterest;
    else schema_fail(f.line_number(), "kind=" + kind + " unknown");
    scenario.activities.push_back(a);
  } else if (entry == "report") {
    ScenarioReport r;
    r.ue_id = static_cast<int>(f.integer("ue"));
    r.at_us = f.integer("at_ms") * kUsecPerMs;
    r.cell_id = static_cast<int>(f.integer("cell"));
    r.rsrp_dbm = f.real("rsrp");
    scenario.reports.push_back(r);
  } else if (entry == "trace") {
    scenario.trace_csv = f.str("csv");
  } else {
    schema_fail(f.line_number(), "unknown ues entry " + entry);
  }
}

void parse_policy_line(const Fields& f, ScenarioPolicies& p) {
  const std::string& entry = f.entry();
  // Policies are single "key=value" tokens; Fields holds them under entry.
  if (entry == "inactivity_timeout_ms") p.inactivity_timeout_us = f.integer(entry) * kUsecPerMs;
  else if (entry == "idle_release_timeout_ms") p.idle_release_timeout_us = f.integer(entry) * kUsecPerMs;
  else if (entry == "rsrp_threshold_dbm") p.rsrp_threshold_dbm = f.real(entry);
  else if (entry == "min_multicast_ues") p.min_multicast_ues = static_cast<int>(f.integer(entry));
  else if (entry == "report_staleness_ms") p.report_staleness_us = f.integer(entry) * kUsecPerMs;
  else if (entry == "sync_period_ms") p.sync_period_ms = f.integer(entry);
  else if (entry == "processing_us") p.processing_us = f.integer(entry);
  else if (entry == "dtch_lcid") p.dtch_lcid = static_cast<int>(f.integer(entry));
  else if (entry == "xtch_lcid") p.xtch_lcid = static_cast<int>(f.integer(entry));
  else if (entry == "interference_radius_km") p.interference_radius_km = f.real(entry);
  else if (entry == "alignment_tolerance_us") p.alignment_tolerance_us = f.integer(entry);
  else if (entry == "horizon_ms") p.horizon_us = f.integer(entry) * kUsecPerMs;
  else schema_fail(f.line_number(), "unknown policy " + entry);
}

void parse_fault_line(const Fields& f, ScenarioFaults& faults) {
  const std::string& entry = f.entry();
  if (entry == "drop_pdu") {
    FaultDropPdu fault;
    fault.du_id = static_cast<int>(f.integer("du"));
    fault.packet_number = static_cast<std::uint64_t>(f.integer("packet_number"));
    faults.drop_pdus.push_back(fault);
  } else if (entry == "clock_skew") {
    FaultClockSkew fault;
    fault.du_id = static_cast<int>(f.integer("du"));
    fault.offset_us = f.integer("offset_us");
    faults.clock_skews.push_back(fault);
  } else if (entry == "latency_spike") {
    FaultLatencySpike fault;
    auto kind = parse_interface_kind(f.str("kind"));
    if (!kind) schema_fail(f.line_number(), "kind=" + f.str("kind") + " unknown");
    fault.kind = *kind;
    fault.a = f.node("a");
    fault.b = f.node("b");
    fault.from_us = f.integer("from_ms") * kUsecPerMs;
    fault.to_us = f.integer("to_ms") * kUsecPerMs;
    fault.add_us = f.integer("add_us");
    faults.latency_spikes.push_back(fault);
  } else {
    schema_fail(f.line_number(), "unknown fault " + entry);
  }
}

} // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& name) {
  Scenario scenario;
  scenario.name = name;

  std::istringstream stream(text);
  std::string raw;
  int line_number = 0;
  std::string section;
  static const std::vector<std::string> known_sections = {
      "topology", "rbma", "services", "ues", "policies", "faults"};

  while (std::getline(stream, raw)) {
    ++line_number;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::vector<std::string> tokens = tokenize(raw);
    if (tokens.empty()) continue;

    if (tokens[0].front() == '[') {
      if (tokens.size() != 1 || tokens[0].back() != ']') {
        schema_fail(line_number, "malformed section header");
      }
      section = tokens[0].substr(1, tokens[0].size() - 2);
      if (std::find(known_sections.begin(), known_sections.end(), section) ==
          known_sections.end()) {
        schema_fail(line_number, "unknown section [" + section + "]");
      }
      continue;
    }
    if (section.empty()) {
      schema_fail(line_number, "entry before any section header");
    }

    Line line;
    line.number = line_number;
    if (section == "policies") {
      // policies are bare key=value lines
      auto eq = tokens[0].find('=');
      if (tokens.size() != 1 || eq == std::string::npos) {
        schema_fail(line_number, "policies want key=value");
      }
      line.entry = tokens[0].substr(0, eq);
      line.kv[line.entry] = tokens[0].substr(eq + 1);
      Fields f(line);
      parse_policy_line(f, scenario.policies);
      continue;
    }

    line.entry = tokens[0];
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      auto eq = tokens[i].find('=');
      if (eq == std::string::npos) {
        schema_fail(line_number, "token " + tokens[i] + " wants key=value");
      }
      line.kv[tokens[i].substr(0, eq)] = tokens[i].substr(eq + 1);
    }
    Fields f(line);
    if (section == "topology") parse_topology_line(f, scenario.topology);
    else if (section == "rbma") parse_rbma_line(f, scenario);
    else if (section == "services") parse_service_line(f, scenario);
    else if (section == "ues") parse_ue_line(f, scenario);
    else if (section == "faults") parse_fault_line(f, scenario.faults);
  }

  return scenario;
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorCode::IoFailure, "cannot open scenario " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::string name = path;
  auto slash = name.find_last_of('/');
  if (slash != std::string::npos) name.erase(0, slash + 1);
  auto dot = name.find_last_of('.');
  if (dot != std::string::npos) name.erase(dot);
  return parse_scenario_text(buffer.str(), name);
}

} // namespace ransim
