#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "ucdf/diagram.hpp"

namespace ucdf {

// ---------------------------------------------------------------------------
// Alias resolution
// ---------------------------------------------------------------------------

/// Representative of every node under the alias relation: nodes joined by
/// alias edges (transitively) share the representative with the smallest id;
/// unaliased nodes map to themselves. Index by node id; slot 0 is unused.
inline std::vector<NodeId> alias_canonical(const Diagram& d) {
  std::vector<NodeId> rep(d.nodes.size() + 1);
  for (size_t i = 0; i < rep.size(); ++i) rep[i] = (NodeId)i;
  auto find = [&](NodeId v) {
    while (rep[v] != v) {
      rep[v] = rep[rep[v]];
      v = rep[v];
    }
    return v;
  };
  for (const Edge& e : d.edges) {
    if (e.kind != EdgeKind::Alias || !e.src.is_node() || !e.dst.is_node()) continue;
    if (!d.node(e.src.id) || !d.node(e.dst.id)) continue;
    NodeId a = find(e.src.id), b = find(e.dst.id);
    if (a != b) rep[std::max(a, b)] = std::min(a, b);
  }
  for (size_t i = 1; i < rep.size(); ++i) rep[i] = find((NodeId)i);
  return rep;
}

// ---------------------------------------------------------------------------
// Data sources
// ---------------------------------------------------------------------------

/// Every element with a directed data path into the holder: walk data update,
/// data read and data flow edges backwards from it. The holder itself is
/// excluded unless it sits on a data cycle.
inline std::vector<NodeId> data_sources(const Diagram& d, NodeId holder) {
  const DiagramNode* h = d.node(holder);
  if (!h || !h->kind.is_holder()) throw BuildError("data_sources requires a data holder");
  std::map<NodeId, std::vector<NodeId>> into;  // dst -> srcs
  for (const Edge& e : d.edges) {
    if (e.kind != EdgeKind::DataUpdate && e.kind != EdgeKind::DataRead &&
        e.kind != EdgeKind::DataFlow)
      continue;
    if (!e.src.is_node() || !e.dst.is_node()) continue;
    into[e.dst.id].push_back(e.src.id);
  }
  std::set<NodeId> seen;
  std::vector<NodeId> work = {holder};
  while (!work.empty()) {
    NodeId v = work.back();
    work.pop_back();
    auto it = into.find(v);
    if (it == into.end()) continue;
    for (NodeId s : it->second)
      if (seen.insert(s).second) work.push_back(s);
  }
  return {seen.begin(), seen.end()};
}

// ---------------------------------------------------------------------------
// Contraction
// ---------------------------------------------------------------------------

/// Collapses a process and everything it transitively dispatches into the
/// single process node, keeping the exterior interface:
///   - timelines owned by absorbed nodes disappear; outside dispatches onto
///     absorbed nodes retarget to the process itself
///   - data edges crossing the boundary (and the process's own) lose their
///     read/write detail and become plain data flow
///   - create/destroy, parallel and exception control, structure and comment
///     edges re-attach to the process; interior-only edges disappear
///   - alias edges into the absorbed interior disappear
///   - euler children of absorbed nodes are re-drawn inside the process
/// Re-attached duplicates collapse to one edge. Ids are renumbered densely;
/// identifiers are preserved. The operation is idempotent.
inline Diagram contract(const Diagram& d, NodeId process) {
  if (!d.process_like(process)) throw BuildError("contract requires a process-like node");

  // Absorbed set: the process plus its transitive dispatch reachability.
  std::set<NodeId> absorbed = {process};
  std::vector<NodeId> work = {process};
  while (!work.empty()) {
    NodeId v = work.back();
    work.pop_back();
    for (const Timeline& t : d.timelines) {
      if (!t.owner || *t.owner != v) continue;
      for (const Dispatch& disp : t.dispatches)
        if (absorbed.insert(disp.target).second) work.push_back(disp.target);
    }
  }
  auto in_s = [&](NodeId v) { return absorbed.count(v) != 0; };
  auto map_node = [&](NodeId v) { return in_s(v) ? process : v; };

  std::vector<bool> keep_tl(d.timelines.size() + 1, false);
  for (const Timeline& t : d.timelines)
    keep_tl[t.id] = !t.owner || !in_s(*t.owner);

  // Decide each edge: dropped, kept as-is, or kept with rewritten ends/kind.
  struct Planned {
    bool keep = false;
    bool modified = false;
    EdgeKind kind{};
    Endpoint src, dst;
    int count = 1;
  };
  std::vector<Planned> plan(d.edges.size() + 1);
  auto edge_touches_s = [&](const Edge& e) {
    return (e.src.is_node() && in_s(e.src.id)) || (e.dst.is_node() && in_s(e.dst.id));
  };
  for (const Edge& e : d.edges) {
    Planned p;
    p.kind = e.kind;
    p.src = e.src;
    p.dst = e.dst;
    p.count = e.count;
    p.keep = true;

    if (e.kind == EdgeKind::Gate) {
      // Resolved against the plan of the gated edge, which has a smaller id.
      if (!e.dst.is_edge() || e.dst.id < 1 || e.dst.id >= (int)plan.size() ||
          !plan[e.dst.id].keep) {
        p.keep = false;
      } else if (e.src.is_node() && in_s(e.src.id)) {
        p.src = Endpoint::node(process);
        p.modified = true;
      }
      plan[e.id] = p;
      continue;
    }
    if (e.kind == EdgeKind::Alias) {
      bool interior = (e.src.is_node() && in_s(e.src.id) && e.src.id != process) ||
                      (e.dst.is_node() && in_s(e.dst.id) && e.dst.id != process);
      if (interior) p.keep = false;
      plan[e.id] = p;
      continue;
    }
    bool src_in = e.src.is_node() && in_s(e.src.id);
    bool dst_in = e.dst.is_node() && in_s(e.dst.id);
    if (src_in && dst_in) {
      p.keep = false;
      plan[e.id] = p;
      continue;
    }
    if (e.src.is_timeline_pos() && !keep_tl[e.src.id]) p.keep = false;
    if (e.dst.is_timeline_pos() && !keep_tl[e.dst.id]) p.keep = false;
    if (!p.keep) {
      plan[e.id] = p;
      continue;
    }
    if (src_in) {
      p.src = Endpoint::node(process);
      p.modified = e.src.id != process || p.modified;
    }
    if (dst_in) {
      p.dst = Endpoint::node(process);
      p.modified = e.dst.id != process || p.modified;
    }
    if ((e.kind == EdgeKind::DataUpdate || e.kind == EdgeKind::DataRead ||
         e.kind == EdgeKind::DataFlow) &&
        edge_touches_s(e) && e.kind != EdgeKind::DataFlow) {
      p.kind = EdgeKind::DataFlow;
      p.modified = true;
    }
    plan[e.id] = p;
  }

  // Collapse duplicates among rewritten edges.
  {
    std::set<std::tuple<int, int, int, int, int, int, int, int>> seen;
    for (const Edge& e : d.edges) {
      Planned& p = plan[e.id];
      if (!p.keep) continue;
      auto key = std::make_tuple((int)p.kind, (int)p.src.kind, p.src.id, p.src.rank,
                                 (int)p.dst.kind, p.dst.id, p.dst.rank, p.count);
      if (p.modified && seen.count(key)) {
        p.keep = false;
        continue;
      }
      seen.insert(key);
    }
  }

  // Rebuild with dense ids.
  Diagram out;
  std::vector<NodeId> node_map(d.nodes.size() + 1, 0);
  for (const DiagramNode& n : d.nodes) {
    if (in_s(n.id) && n.id != process) continue;
    DiagramNode copy = n;
    copy.id = (NodeId)out.nodes.size() + 1;
    node_map[n.id] = copy.id;
    out.nodes.push_back(std::move(copy));
  }
  std::vector<TimelineId> tl_map(d.timelines.size() + 1, 0);
  for (const Timeline& t : d.timelines) {
    if (!keep_tl[t.id]) continue;
    Timeline copy = t;
    copy.id = (TimelineId)out.timelines.size() + 1;
    if (copy.owner) copy.owner = node_map[map_node(*copy.owner)];
    for (Dispatch& disp : copy.dispatches) disp.target = node_map[map_node(disp.target)];
    tl_map[t.id] = copy.id;
    out.timelines.push_back(std::move(copy));
  }
  std::vector<EdgeId> edge_map(d.edges.size() + 1, 0);
  {
    EdgeId next = 1;
    for (const Edge& e : d.edges)
      if (plan[e.id].keep) edge_map[e.id] = next++;
  }
  auto remap_ep = [&](const Endpoint& ep) {
    switch (ep.kind) {
      case Endpoint::Kind::Node: return Endpoint::node(node_map[ep.id]);
      case Endpoint::Kind::TimelinePos: return Endpoint::timeline_pos(tl_map[ep.id], ep.rank);
      case Endpoint::Kind::Edge: return Endpoint::edge(edge_map[ep.id]);
    }
    return ep;
  };
  for (const Edge& e : d.edges) {
    const Planned& p = plan[e.id];
    if (!p.keep) continue;
    Edge copy;
    copy.id = edge_map[e.id];
    copy.kind = p.kind;
    copy.src = remap_ep(p.src);
    copy.dst = remap_ep(p.dst);
    copy.count = p.count;
    out.edges.push_back(copy);
  }
  // Absorbed children vanish with their nodes; children placed inside an
  // absorbed interior node move into the process itself.
  for (const auto& [child, parent] : d.euler) {
    if (in_s(child)) continue;
    NodeId new_child = node_map[child];
    NodeId new_parent = node_map[map_node(parent)];
    if (new_child && new_parent && new_child != new_parent) out.euler[new_child] = new_parent;
  }
  out.file_comments = d.file_comments;
  return out;
}

}  // namespace ucdf
