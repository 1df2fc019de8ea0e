#include "ransim/rrc_mobility.h"

#include <algorithm>

namespace ransim {

const char* to_string(RrcState state) {
  switch (state) {
    case RrcState::Connected: return "connected";
    case RrcState::Inactive: return "inactive";
    case RrcState::Idle: return "idle";
  }
  return "?";
}

const char* to_string(UeCapability capability) {
  switch (capability) {
    case UeCapability::Normal: return "normal";
    case UeCapability::ReceiveOnly: return "rom";
  }
  return "?";
}

const char* to_string(ActivityKind kind) {
  switch (kind) {
    case ActivityKind::UnicastData: return "unicast_data";
    case ActivityKind::MulticastInterest: return "multicast_interest";
  }
  return "?";
}

UeContext& UeRegistry::add_ue(int ue_id, int serving_cell, RrcState initial) {
  if (contexts_.count(ue_id) || rom_ues_.count(ue_id)) {
    fail(ErrorCode::DuplicateId, "ue " + std::to_string(ue_id));
  }
  UeContext ctx;
  ctx.ue_id = ue_id;
  ctx.serving_cell = serving_cell;
  ctx.rrc_state = initial;
  ctx.cm_state = initial == RrcState::Idle ? CmState::CmIdle : CmState::CmConnected;
  contexts_[ue_id] = ctx;
  return contexts_.at(ue_id);
}

void UeRegistry::add_rom_ue(int ue_id, int camped_cell) {
  if (contexts_.count(ue_id) || rom_ues_.count(ue_id)) {
    fail(ErrorCode::DuplicateId, "ue " + std::to_string(ue_id));
  }
  rom_ues_[ue_id] = RomUe{ue_id, camped_cell};
}

UeContext& UeRegistry::context(int ue_id) {
  if (rom_ues_.count(ue_id)) {
    fail(ErrorCode::RomUeHasNoContext, "ue " + std::to_string(ue_id));
  }
  auto it = contexts_.find(ue_id);
  if (it == contexts_.end()) fail(ErrorCode::UnknownUe, "ue " + std::to_string(ue_id));
  return it->second;
}

const UeContext& UeRegistry::context(int ue_id) const {
  if (rom_ues_.count(ue_id)) {
    fail(ErrorCode::RomUeHasNoContext, "ue " + std::to_string(ue_id));
  }
  auto it = contexts_.find(ue_id);
  if (it == contexts_.end()) fail(ErrorCode::UnknownUe, "ue " + std::to_string(ue_id));
  return it->second;
}

UeContext& UeRegistry::report_activity(int ue_id, ActivityKind kind, Usec now_us) {
  UeContext& ctx = context(ue_id); // RomUeHasNoContext for ROM devices

  switch (kind) {
    case ActivityKind::UnicastData:
      ctx.rrc_state = RrcState::Connected;
      ctx.cm_state = CmState::CmConnected;
      ctx.last_unicast_activity_us = now_us;
      break;
    case ActivityKind::MulticastInterest:
      if (ctx.rrc_state == RrcState::Connected) {
        // Location known by a single cell: serve multicast on unicast bearers.
        ctx.multicast_over_unicast = true;
      }
      // Inactive UEs already receive over the multicast RB; Idle UEs receive
      // SFN broadcast without any signalling. No transition either way.
      break;
  }
  return ctx;
}

UeContext& UeRegistry::suspend_to_inactive(const Topology& t, int ue_id, int rbma_id,
                                           std::uint32_t g_rnti, Usec now_us) {
  UeContext& ctx = context(ue_id);
  if (ctx.rrc_state != RrcState::Connected) {
    fail(ErrorCode::PreconditionNotMet,
         "ue " + std::to_string(ue_id) + " not connected");
  }
  if (now_us - ctx.last_unicast_activity_us < policy_.inactivity_timeout_us) {
    fail(ErrorCode::PreconditionNotMet,
         "ue " + std::to_string(ue_id) + " still active");
  }
  ctx.rrc_state = RrcState::Inactive;
  ctx.rbma_id = rbma_id;
  ctx.g_rnti = g_rnti;
  ctx.cm_state = CmState::CmConnected; // maintained connection to AMF/UPF
  auto du = t.du_of_cell(ctx.serving_cell);
  ctx.anchor_gnb = du ? t.cu_of_du(*du) : std::nullopt;
  // Multicast moves from the unicast RB to the multicast RB.
  ctx.multicast_over_unicast = false;
  return ctx;
}

ReselectOutcome UeRegistry::cell_reselect(const Topology& t, const RbmaRegistry& rbmas,
                                          int ue_id, int new_cell, Usec) {
  UeContext& ctx = context(ue_id);
  if (ctx.rrc_state != RrcState::Inactive) {
    fail(ErrorCode::PreconditionNotMet,
         "ue " + std::to_string(ue_id) + " not inactive");
  }
  t.cell(new_cell); // UnknownCell if missing
  if (!ctx.rbma_id) {
    fail(ErrorCode::PreconditionNotMet,
         "ue " + std::to_string(ue_id) + " has no stored rbma");
  }

  ReselectOutcome outcome;
  outcome.new_cell = new_cell;
  std::vector<int> cells = rbmas.resolve_cells(*ctx.rbma_id);
  bool inside = std::binary_search(cells.begin(), cells.end(), new_cell);
  if (inside) {
    // 2(a): same multicast traffic from every transmission point of the RBMA;
    // the move stays local, nothing is signalled.
    ctx.serving_cell = new_cell;
    outcome.update_required = false;
  } else {
    // 2(b): the UE must notify the network; the serving cell changes once the
    // update round trip lands (apply_rbma_update).
    outcome.update_required = true;
  }
  return outcome;
}

UeContext& UeRegistry::apply_rbma_update(int ue_id, int new_rbma, std::uint32_t g_rnti) {
  UeContext& ctx = context(ue_id);
  if (ctx.rrc_state != RrcState::Inactive) {
    fail(ErrorCode::PreconditionNotMet,
         "ue " + std::to_string(ue_id) + " not inactive");
  }
  ctx.rbma_id = new_rbma;
  ctx.g_rnti = g_rnti;
  return ctx;
}

UeContext& UeRegistry::release_to_idle(int ue_id, Usec now_us) {
  UeContext& ctx = context(ue_id);
  if (ctx.rrc_state == RrcState::Idle) {
    fail(ErrorCode::PreconditionNotMet, "ue " + std::to_string(ue_id) + " already idle");
  }
  if (now_us - ctx.last_unicast_activity_us < policy_.idle_release_timeout_us) {
    fail(ErrorCode::PreconditionNotMet,
         "ue " + std::to_string(ue_id) + " released too early");
  }
  ctx.rrc_state = RrcState::Idle;
  ctx.cm_state = CmState::CmIdle;
  // RAN context dropped: location known only at tracking-area granularity.
  ctx.rbma_id.reset();
  ctx.g_rnti.reset();
  ctx.anchor_gnb.reset();
  ctx.multicast_over_unicast = false;
  return ctx;
}

ResumeOutcome UeRegistry::resume_to_connected(const Topology& t, int ue_id,
                                              Usec now_us) {
  UeContext& ctx = context(ue_id);
  if (ctx.rrc_state != RrcState::Inactive) {
    fail(ErrorCode::PreconditionNotMet,
         "ue " + std::to_string(ue_id) + " cannot resume from " +
             to_string(ctx.rrc_state));
  }
  LatencyModel model;
  ResumeOutcome outcome;
  outcome.resume_latency_us =
      model.resume_latency_us(t, ctx.serving_cell, ctx.anchor_gnb);
  ctx.rrc_state = RrcState::Connected;
  ctx.cm_state = CmState::CmConnected;
  ctx.last_unicast_activity_us = now_us;
  return outcome;
}

namespace {

Usec uu_latency(const Topology& t, int serving_cell) {
  auto du = t.du_of_cell(serving_cell);
  if (!du) {
    fail(ErrorCode::DanglingReference,
         "cell " + std::to_string(serving_cell) + " has no serving du");
  }
  const Link* uu = t.find_link(NodeRef{NodeKind::Du, *du},
                               NodeRef{NodeKind::Ue, NodeRef::kAnyUe}, InterfaceKind::Uu);
  if (uu == nullptr) {
    fail(ErrorCode::NoSuchLink, "no Uu link at du " + std::to_string(*du));
  }
  return uu->latency_us;
}

} // namespace

Usec LatencyModel::idle_setup_latency_us(const Topology& t, int serving_cell) const {
  Usec uu = uu_latency(t, serving_cell);
  auto du = t.du_of_cell(serving_cell);
  auto cu = t.cu_of_du(*du);
  if (!cu) {
    fail(ErrorCode::DanglingReference, "du " + std::to_string(*du) + " has no cu");
  }
  const Link* n2 = nullptr;
  for (const auto& link : t.links) {
    if (link.kind != InterfaceKind::N2) continue;
    if ((link.a.kind == NodeKind::Cu && link.a.id == *cu) ||
        (link.b.kind == NodeKind::Cu && link.b.id == *cu)) {
      n2 = &link;
      break;
    }
  }
  if (n2 == nullptr) {
    fail(ErrorCode::NoSuchLink, "no N2 link at cu " + std::to_string(*cu));
  }
  return 2 * uu + 2 * n2->latency_us + processing_us;
}

Usec LatencyModel::resume_latency_us(const Topology& t, int serving_cell,
                                     std::optional<int> anchor_cu) const {
  Usec uu = uu_latency(t, serving_cell);
  Usec total = 2 * uu + processing_us;
  auto du = t.du_of_cell(serving_cell);
  auto serving_cu = t.cu_of_du(*du);
  if (anchor_cu && serving_cu && *anchor_cu != *serving_cu) {
    const Link* xn = t.find_link(NodeRef{NodeKind::Cu, *serving_cu},
                                 NodeRef{NodeKind::Cu, *anchor_cu}, InterfaceKind::XnC);
    if (xn == nullptr) {
      fail(ErrorCode::NoSuchLink,
           "no Xn-C between cu " + std::to_string(*serving_cu) + " and cu " +
               std::to_string(*anchor_cu));
    }
    total += 2 * xn->latency_us;
  }
  return total;
}

Usec LatencyModel::user_plane_latency_us(const Topology& t, int serving_cell) const {
  Usec uu = uu_latency(t, serving_cell);
  auto du = t.du_of_cell(serving_cell);
  auto cu = t.cu_of_du(*du);
  if (!cu) {
    fail(ErrorCode::DanglingReference, "du " + std::to_string(*du) + " has no cu");
  }
  const Link* f1u = t.find_link(NodeRef{NodeKind::Cu, *cu}, NodeRef{NodeKind::Du, *du},
                                InterfaceKind::F1U);
  if (f1u == nullptr) {
    fail(ErrorCode::NoSuchLink, "no F1-U link at du " + std::to_string(*du));
  }
  const Link* n3 = nullptr;
  for (const auto& link : t.links) {
    if (link.kind != InterfaceKind::N3) continue;
    if ((link.a.kind == NodeKind::Cu && link.a.id == *cu) ||
        (link.b.kind == NodeKind::Cu && link.b.id == *cu)) {
      n3 = &link;
      break;
    }
  }
  if (n3 == nullptr) {
    fail(ErrorCode::NoSuchLink, "no N3 link at cu " + std::to_string(*cu));
  }
  return n3->latency_us + f1u->latency_us + uu;
}

} // namespace ransim
