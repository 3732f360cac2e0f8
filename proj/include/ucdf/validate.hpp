#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ucdf/diagram.hpp"

namespace ucdf {

/// One broken rule instance. `subjects` pins the offending elements so that
/// tools can highlight them; violations compare and sort deterministically.
struct Violation {
  std::string rule;
  std::string message;
  std::vector<Endpoint> subjects;

  friend bool operator==(const Violation&, const Violation&) = default;
  friend auto operator<=>(const Violation&, const Violation&) = default;
};

/// The closed rule set, in code order.
inline std::vector<std::string> all_rule_codes() {
  return {"R-ALI-01", "R-CMT-01", "R-CRE-01", "R-CTL-01", "R-CTL-02", "R-DAT-01",
          "R-DAT-02", "R-DAT-03", "R-EUL-01", "R-GTE-01", "R-HAS-01", "R-MIX-01",
          "R-ORJ-01", "R-REF-01", "R-TLM-01", "R-TLM-02"};
}

namespace detail {

inline std::string describe(const Diagram& d, const Endpoint& e) {
  switch (e.kind) {
    case Endpoint::Kind::Node: {
      const DiagramNode* n = d.node(e.id);
      return n ? "'" + n->ident + "'" : "<missing node " + std::to_string(e.id) + ">";
    }
    case Endpoint::Kind::TimelinePos: {
      const Timeline* t = d.timeline(e.id);
      std::string name = t ? t->ident : "<missing timeline " + std::to_string(e.id) + ">";
      return name + ":" + std::to_string(e.rank);
    }
    case Endpoint::Kind::Edge: {
      const Edge* g = d.edge(e.id);
      if (!g) return "<missing edge " + std::to_string(e.id) + ">";
      return std::string("edge ") + std::to_string(e.id) + " (" + edge_kind_word(g->kind) + ")";
    }
  }
  return "?";
}

inline bool node_endpoint(const Diagram& d, const Endpoint& e, const DiagramNode** out) {
  if (!e.is_node()) return false;
  *out = d.node(e.id);
  return *out != nullptr;
}

inline bool is_holder_node(const Diagram& d, const Endpoint& e) {
  const DiagramNode* n = nullptr;
  return node_endpoint(d, e, &n) && n->kind.is_holder();
}

inline bool is_process_node(const Diagram& d, const Endpoint& e) {
  const DiagramNode* n = nullptr;
  return node_endpoint(d, e, &n) && d.process_like(n->id);
}

}  // namespace detail

/// Checks every rule of the notation against the diagram and returns the
/// violations sorted by (rule, subjects, message). An empty result means the
/// diagram is well formed.
inline std::vector<Violation> validate(const Diagram& d) {
  using detail::describe;
  std::vector<Violation> out;
  auto add = [&](std::string rule, std::vector<Endpoint> subjects, std::string message) {
    out.push_back({std::move(rule), std::move(message), std::move(subjects)});
  };

  // Timeline ownership and dispatch targets.
  for (const Timeline& t : d.timelines) {
    if (t.owner && !d.process_like(*t.owner)) {
      add("R-CTL-01", {Endpoint::timeline_pos(t.id, 0)},
          "timeline '" + t.ident + "' is owned by " + describe(d, Endpoint::node(*t.owner)) +
              ", which cannot run a timeline");
    }
    for (const Dispatch& disp : t.dispatches) {
      if (!d.control_capable(disp.target)) {
        add("R-CTL-01",
            {Endpoint::timeline_pos(t.id, disp.mark.rank), Endpoint::node(disp.target)},
            "dispatch " + t.ident + ":" + std::to_string(disp.mark.rank) + " targets " +
                describe(d, Endpoint::node(disp.target)) + ", which cannot receive control");
      }
    }
    if (t.stop && t.done) {
      add("R-TLM-01", {Endpoint::timeline_pos(t.id, 0)},
          "timeline '" + t.ident + "' is marked both stop and done");
    }
    int prev = 0;
    for (const Dispatch& disp : t.dispatches) {
      if (disp.mark.rank <= prev) {
        add("R-TLM-02", {Endpoint::timeline_pos(t.id, disp.mark.rank)},
            "order mark " + std::to_string(disp.mark.rank) + " on timeline '" + t.ident +
                "' does not increase (previous was " + std::to_string(prev) + ")");
        break;
      }
      prev = disp.mark.rank;
    }
  }

  // Per-edge rules.
  for (const Edge& e : d.edges) {
    const Endpoint self = Endpoint::edge(e.id);
    switch (e.kind) {
      case EdgeKind::DataUpdate:
        if (!detail::is_process_node(d, e.src) || !detail::is_holder_node(d, e.dst))
          add("R-DAT-01", {self},
              "data update must run from a process to a data holder, got " +
                  describe(d, e.src) + " w> " + describe(d, e.dst));
        break;
      case EdgeKind::DataRead:
        if (!detail::is_holder_node(d, e.src) || !detail::is_process_node(d, e.dst))
          add("R-DAT-02", {self},
              "data read must run from a data holder to a process, got " + describe(d, e.src) +
                  " r> " + describe(d, e.dst));
        break;
      case EdgeKind::DataFlow: {
        bool ok = true;
        for (const Endpoint* p : {&e.src, &e.dst}) {
          const DiagramNode* n = nullptr;
          if (!detail::node_endpoint(d, *p, &n)) { ok = false; break; }
          if (n->kind.tag == NodeKind::Tag::Comment || n->kind.tag == NodeKind::Tag::Mark ||
              n->kind.tag == NodeKind::Tag::OrJoin) {
            ok = false;
            break;
          }
        }
        if (!ok)
          add("R-DAT-03", {self},
              "data flow endpoints must be processes or data holders, got " +
                  describe(d, e.src) + " -> " + describe(d, e.dst));
        break;
      }
      case EdgeKind::Create:
      case EdgeKind::Destroy:
        if (!detail::is_process_node(d, e.src) || !detail::is_holder_node(d, e.dst))
          add("R-CRE-01", {self},
              std::string(e.kind == EdgeKind::Create ? "create" : "destroy") +
                  " must run from a process to a data holder, got " + describe(d, e.src) +
                  " " + edge_kind_word(e.kind) + " " + describe(d, e.dst));
        break;
      case EdgeKind::ControlPar:
        if (!e.src.is_node() || !e.dst.is_node() || !d.control_capable(e.src.id) ||
            !d.control_capable(e.dst.id))
          add("R-CTL-01", {self},
              "parallel control must connect control-capable elements, got " +
                  describe(d, e.src) + " => " + describe(d, e.dst));
        break;
      case EdgeKind::ControlReturn: {
        if (!e.dst.is_timeline_pos()) {
          add("R-CTL-02", {self},
              "control return must target a timeline position, got " + describe(d, e.dst));
          break;
        }
        const Timeline* t = d.timeline(e.dst.id);
        bool rank_ok = false;
        if (t) {
          for (const Dispatch& disp : t->dispatches)
            if (disp.mark.rank == e.dst.rank) rank_ok = true;
          if (e.dst.rank == t->end_rank()) rank_ok = true;
        }
        if (!rank_ok)
          add("R-CTL-02", {self},
              "control return targets " + describe(d, e.dst) +
                  ", which is neither an order mark nor the end of the timeline");
        break;
      }
      case EdgeKind::ExceptionCtl:
        if (!e.src.is_node() || !e.dst.is_node() || !d.control_capable(e.src.id) ||
            !d.control_capable(e.dst.id))
          add("R-CTL-01", {self},
              "exception control must connect control-capable elements, got " +
                  describe(d, e.src) + " e> " + describe(d, e.dst));
        break;
      case EdgeKind::Has:
        if (!e.src.is_node() || !e.dst.is_node() || !d.node(e.src.id) || !d.node(e.dst.id))
          add("R-HAS-01", {self},
              "has must connect two elements, got " + describe(d, e.src) + " has> " +
                  describe(d, e.dst));
        break;
      case EdgeKind::Is:
        if (!e.src.is_node() || !e.dst.is_node() || !d.node(e.src.id) || !d.node(e.dst.id))
          add("R-HAS-01", {self},
              "is must connect two elements, got " + describe(d, e.src) + " is> " +
                  describe(d, e.dst));
        break;
      case EdgeKind::Alias: {
        const DiagramNode* a = nullptr;
        const DiagramNode* b = nullptr;
        if (!detail::node_endpoint(d, e.src, &a) || !detail::node_endpoint(d, e.dst, &b) ||
            a->kind != b->kind)
          add("R-ALI-01", {self},
              "alias endpoints must be elements of the same kind, got " + describe(d, e.src) +
                  " ~~ " + describe(d, e.dst));
        else if (e.count < 1)
          add("R-ALI-01", {self},
              "alias count must be at least 1, got " + std::to_string(e.count));
        break;
      }
      case EdgeKind::Ref: {
        const DiagramNode* a = nullptr;
        if (!detail::node_endpoint(d, e.src, &a) || !a->kind.is_holder(HolderKind::Address) ||
            !e.dst.is_node() || !d.node(e.dst.id))
          add("R-REF-01", {self},
              "ref must run from an address holder to an element, got " + describe(d, e.src) +
                  " *> " + describe(d, e.dst));
        break;
      }
      case EdgeKind::CommentAttach: {
        const DiagramNode* a = nullptr;
        if (!detail::node_endpoint(d, e.src, &a) || a->kind.tag != NodeKind::Tag::Comment)
          add("R-CMT-01", {self},
              "comment attachment must start at a comment, got " + describe(d, e.src));
        break;
      }
      case EdgeKind::Gate: {
        bool ok = detail::is_process_node(d, e.src) && e.dst.is_edge();
        if (ok) {
          const Edge* target = d.edge(e.dst.id);
          ok = target && (target->kind == EdgeKind::DataUpdate ||
                          target->kind == EdgeKind::DataRead ||
                          target->kind == EdgeKind::DataFlow ||
                          target->kind == EdgeKind::ControlPar);
        }
        if (!ok)
          add("R-GTE-01", {self},
              "gate must run from a process onto a data or parallel-control edge, got " +
                  describe(d, e.src) + " %> " + describe(d, e.dst));
        break;
      }
    }
  }

  // Containment: has/euler agreement per node.
  {
    std::map<NodeId, std::set<NodeId>> has_parents;
    for (const Edge& e : d.edges)
      if (e.kind == EdgeKind::Has && e.src.is_node() && e.dst.is_node() && d.node(e.src.id) &&
          d.node(e.dst.id))
        has_parents[e.dst.id].insert(e.src.id);
    for (const auto& [child, parents] : has_parents) {
      auto it = d.euler.find(child);
      if (it == d.euler.end()) continue;
      for (NodeId p : parents) {
        if (p != it->second)
          add("R-MIX-01",
              {Endpoint::node(child), Endpoint::node(p), Endpoint::node(it->second)},
              describe(d, Endpoint::node(child)) + " is drawn inside " +
                  describe(d, Endpoint::node(it->second)) + " but marked as part of " +
                  describe(d, Endpoint::node(p)) + "; pick one parent");
      }
    }
  }

  // Containment cycles. Arcs run whole -> part; a strongly connected component
  // with more than a self-contained single node means something contains
  // itself. Components whose arcs are all euler placements report under
  // R-EUL-01, everything else under R-HAS-01.
  {
    int n = (int)d.nodes.size();
    std::vector<std::vector<int>> adj(n + 1);
    std::set<std::pair<int, int>> has_arc;
    for (const Edge& e : d.edges)
      if (e.kind == EdgeKind::Has && e.src.is_node() && e.dst.is_node() && d.node(e.src.id) &&
          d.node(e.dst.id)) {
        adj[e.src.id].push_back(e.dst.id);
        has_arc.insert({e.src.id, e.dst.id});
      }
    for (const auto& [child, parent] : d.euler)
      if (d.node(child) && d.node(parent)) adj[parent].push_back(child);

    // Tarjan, iterative to keep deep chains safe.
    std::vector<int> index(n + 1, 0), low(n + 1, 0), comp(n + 1, 0);
    std::vector<bool> on_stack(n + 1, false);
    std::vector<int> stack;
    int next_index = 1, next_comp = 1;
    std::vector<std::vector<NodeId>> components;
    for (int start = 1; start <= n; ++start) {
      if (index[start]) continue;
      std::vector<std::pair<int, size_t>> work = {{start, 0}};
      while (!work.empty()) {
        auto& [v, ei] = work.back();
        if (ei == 0) {
          index[v] = low[v] = next_index++;
          stack.push_back(v);
          on_stack[v] = true;
        }
        bool descended = false;
        while (ei < adj[v].size()) {
          int w = adj[v][ei++];
          if (!index[w]) {
            work.push_back({w, 0});
            descended = true;
            break;
          }
          if (on_stack[w]) low[v] = std::min(low[v], index[w]);
        }
        if (descended) continue;
        if (low[v] == index[v]) {
          std::vector<NodeId> c;
          while (true) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp[w] = next_comp;
            c.push_back(w);
            if (w == v) break;
          }
          next_comp++;
          std::sort(c.begin(), c.end());
          components.push_back(std::move(c));
        }
        int finished = v;
        work.pop_back();
        if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[finished]);
      }
    }
    for (const auto& c : components) {
      bool cyclic = c.size() > 1;
      if (!cyclic) {
        int v = c[0];
        for (int w : adj[v])
          if (w == v) cyclic = true;
      }
      if (!cyclic) continue;
      bool uses_has = false;
      for (int v : c)
        for (int w : adj[v])
          if (comp[w] == comp[v] && has_arc.count({v, w})) uses_has = true;
      std::vector<Endpoint> subjects;
      std::string names;
      for (NodeId v : c) {
        subjects.push_back(Endpoint::node(v));
        if (!names.empty()) names += ", ";
        names += describe(d, Endpoint::node(v));
      }
      if (uses_has)
        add("R-HAS-01", std::move(subjects), "ownership cycle through " + names);
      else
        add("R-EUL-01", std::move(subjects), "containment cycle through " + names);
    }
  }

  // Or-join shape: pure control fan-out.
  for (const DiagramNode& n : d.nodes) {
    if (n.kind.tag != NodeKind::Tag::OrJoin) continue;
    int fanout = 0;
    bool touches_data = false;
    for (const Edge& e : d.edges) {
      bool at_src = e.src.is_node() && e.src.id == n.id;
      bool at_dst = e.dst.is_node() && e.dst.id == n.id;
      if (!at_src && !at_dst) continue;
      switch (e.kind) {
        case EdgeKind::DataUpdate:
        case EdgeKind::DataRead:
        case EdgeKind::DataFlow:
        case EdgeKind::Create:
        case EdgeKind::Destroy:
          touches_data = true;
          break;
        case EdgeKind::ControlPar:
          if (at_src) fanout++;
          break;
        default:
          break;
      }
    }
    if (touches_data)
      add("R-ORJ-01", {Endpoint::node(n.id)},
          "or-join " + describe(d, Endpoint::node(n.id)) +
              " carries data edges; it may only branch control");
    else if (fanout < 2)
      add("R-ORJ-01", {Endpoint::node(n.id)},
          "or-join " + describe(d, Endpoint::node(n.id)) + " branches to " +
              std::to_string(fanout) + " alternatives; at least 2 are required");
  }

  std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    return std::tie(a.rule, a.subjects, a.message) < std::tie(b.rule, b.subjects, b.message);
  });
  return out;
}

inline bool is_valid(const Diagram& d) { return validate(d).empty(); }

}  // namespace ucdf
