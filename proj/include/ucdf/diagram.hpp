#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ucdf/source.hpp"

namespace ucdf {

using NodeId = int;      // 1-based, dense, creation order
using EdgeId = int;      // 1-based, dense, creation order
using TimelineId = int;  // 1-based, dense, creation order

// ---------------------------------------------------------------------------
// Node and edge kinds
// ---------------------------------------------------------------------------

enum class HolderKind {
  Static,
  Stack,
  Heap,
  Register,
  File,
  Document,
  Collection,
  Address,
  Constant,
};

/// Kind of a diagram node. Holder carries the holder sub-kind; for every other
/// tag the holder field is fixed to Static so that defaulted comparison works.
struct NodeKind {
  enum class Tag {
    Process,
    Module,
    Decision,
    OrJoin,
    HumanAction,
    Comment,
    Mark,
    Holder,
  };

  Tag tag = Tag::Process;
  HolderKind holder = HolderKind::Static;

  static constexpr NodeKind process() { return {Tag::Process, HolderKind::Static}; }
  static constexpr NodeKind module() { return {Tag::Module, HolderKind::Static}; }
  static constexpr NodeKind decision() { return {Tag::Decision, HolderKind::Static}; }
  static constexpr NodeKind or_join() { return {Tag::OrJoin, HolderKind::Static}; }
  static constexpr NodeKind human_action() { return {Tag::HumanAction, HolderKind::Static}; }
  static constexpr NodeKind comment() { return {Tag::Comment, HolderKind::Static}; }
  static constexpr NodeKind mark() { return {Tag::Mark, HolderKind::Static}; }
  static constexpr NodeKind holder_of(HolderKind h) { return {Tag::Holder, h}; }

  bool is_holder() const { return tag == Tag::Holder; }
  bool is_holder(HolderKind h) const { return tag == Tag::Holder && holder == h; }

  friend bool operator==(const NodeKind&, const NodeKind&) = default;
  friend auto operator<=>(const NodeKind&, const NodeKind&) = default;
};

enum class EdgeKind {
  DataUpdate,     // process -> holder
  DataRead,       // holder -> process
  DataFlow,       // abstract information flow
  Create,         // process -> holder
  Destroy,        // process -> holder
  ControlPar,     // parallel control, process -> process
  ControlReturn,  // double-arrowed, to a timeline position
  ExceptionCtl,   // try -> catch
  Has,            // whole -> part
  Is,             // instance -> type / mark
  Alias,          // same entity, dot-and-dash; carries a count
  Ref,            // address holder -> referenced entity
  CommentAttach,  // comment -> annotated node
  Gate,           // process -> edge it controls
};

// ---------------------------------------------------------------------------
// Endpoints
// ---------------------------------------------------------------------------

/// Where an edge attaches: a node, a position on a timeline (the order mark
/// with the given rank, or max+1 for the end slot), or another edge.
struct Endpoint {
  enum class Kind { Node, TimelinePos, Edge };

  Kind kind = Kind::Node;
  int id = 0;    // node, timeline, or edge id
  int rank = 0;  // meaningful for TimelinePos only

  static Endpoint node(NodeId n) { return {Kind::Node, n, 0}; }
  static Endpoint timeline_pos(TimelineId t, int rank) { return {Kind::TimelinePos, t, rank}; }
  static Endpoint edge(EdgeId e) { return {Kind::Edge, e, 0}; }

  bool is_node() const { return kind == Kind::Node; }
  bool is_timeline_pos() const { return kind == Kind::TimelinePos; }
  bool is_edge() const { return kind == Kind::Edge; }

  friend bool operator==(const Endpoint&, const Endpoint&) = default;
  friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
};

// ---------------------------------------------------------------------------
// Elements
// ---------------------------------------------------------------------------

struct DiagramNode {
  NodeId id = 0;
  std::string ident;  // user-facing token, unique within the diagram
  NodeKind kind;
  std::optional<std::string> name;     // displayed name, e.g. "int: a"
  std::optional<std::string> content;  // displayed information value
  bool as_process = false;             // Holder(Document) only
  std::map<std::string, std::string> attrs;  // runtime annotations, not serialized
};

struct Edge {
  EdgeId id = 0;
  EdgeKind kind = EdgeKind::DataFlow;
  Endpoint src;
  Endpoint dst;
  int count = 1;  // alias multiplicity
};

/// Small rectangle on a timeline carrying the dispatch order.
struct OrderMark {
  int rank = 1;
  std::string label;  // defaults to the decimal rank; may be a timestamp

  friend bool operator==(const OrderMark&, const OrderMark&) = default;
};

struct Dispatch {
  OrderMark mark;
  NodeId target = 0;

  friend bool operator==(const Dispatch&, const Dispatch&) = default;
};

struct Timeline {
  TimelineId id = 0;
  std::string ident;
  std::optional<NodeId> owner;  // nullopt = root (processor-level) timeline
  std::string root_label;       // only for root timelines
  std::vector<Dispatch> dispatches;
  bool start = false;
  bool stop = false;
  bool done = false;

  int max_rank() const { return dispatches.empty() ? 0 : dispatches.back().mark.rank; }
  /// Rank of the slot just past the last mark ("return to the end of the line").
  int end_rank() const { return max_rank() + 1; }
};

// ---------------------------------------------------------------------------
// Diagram
// ---------------------------------------------------------------------------

inline std::string default_mark_label(int rank) { return std::to_string(rank); }

/// The whole UCDF graph. A plain value: build it single-threaded, then share
/// freely for read-only queries. Builders enforce local well-formedness;
/// semantic rules live in validate() so that broken diagrams remain
/// representable for diagnosis.
struct Diagram {
  std::vector<DiagramNode> nodes;          // nodes[i].id == i + 1
  std::vector<Edge> edges;                 // edges[i].id == i + 1
  std::vector<Timeline> timelines;         // timelines[i].id == i + 1
  std::map<NodeId, NodeId> euler;          // child -> parent containment
  std::vector<std::string> file_comments;  // "//" trivia, original order

  // -- lookups ---------------------------------------------------------------

  const DiagramNode* node(NodeId id) const {
    return id >= 1 && id <= (int)nodes.size() ? &nodes[id - 1] : nullptr;
  }
  DiagramNode* node(NodeId id) {
    return id >= 1 && id <= (int)nodes.size() ? &nodes[id - 1] : nullptr;
  }
  const Edge* edge(EdgeId id) const {
    return id >= 1 && id <= (int)edges.size() ? &edges[id - 1] : nullptr;
  }
  const Timeline* timeline(TimelineId id) const {
    return id >= 1 && id <= (int)timelines.size() ? &timelines[id - 1] : nullptr;
  }
  Timeline* timeline(TimelineId id) {
    return id >= 1 && id <= (int)timelines.size() ? &timelines[id - 1] : nullptr;
  }

  NodeId find_node(const std::string& ident) const {
    for (const auto& n : nodes)
      if (n.ident == ident) return n.id;
    return 0;
  }
  TimelineId find_timeline(const std::string& ident) const {
    for (const auto& t : timelines)
      if (t.ident == ident) return t.id;
    return 0;
  }

  /// Process-like per the notation: rectangle-family shapes that may own
  /// timelines and emit control, plus documents flagged as-process.
  bool process_like(NodeId id) const {
    const DiagramNode* n = node(id);
    if (!n) return false;
    switch (n->kind.tag) {
      case NodeKind::Tag::Process:
      case NodeKind::Tag::Module:
      case NodeKind::Tag::Decision:
      case NodeKind::Tag::HumanAction:
        return true;
      case NodeKind::Tag::Holder:
        return n->kind.holder == HolderKind::Document && n->as_process;
      default:
        return false;
    }
  }

  /// Process-like or OrJoin: everything allowed to sit on a control path.
  bool control_capable(NodeId id) const {
    const DiagramNode* n = node(id);
    if (!n) return false;
    return n->kind.tag == NodeKind::Tag::OrJoin || process_like(id);
  }

  bool endpoint_resolves(const Endpoint& e) const {
    switch (e.kind) {
      case Endpoint::Kind::Node: return node(e.id) != nullptr;
      case Endpoint::Kind::TimelinePos: return timeline(e.id) != nullptr;
      case Endpoint::Kind::Edge: return edge(e.id) != nullptr;
    }
    return false;
  }

  // -- builders ----------------------------------------------------------------

  NodeId add_node(NodeKind kind, std::optional<std::string> name = {},
                  std::optional<std::string> content = {}, bool as_process = false,
                  std::map<std::string, std::string> attrs = {}, std::string ident = "") {
    if (as_process && !kind.is_holder(HolderKind::Document))
      throw BuildError("asprocess is only valid on document holders");
    DiagramNode n;
    n.id = (NodeId)nodes.size() + 1;
    n.ident = ident.empty() ? "n" + std::to_string(n.id) : std::move(ident);
    if (find_node(n.ident) != 0 || find_timeline(n.ident) != 0)
      throw BuildError("duplicate identifier '" + n.ident + "'");
    n.kind = kind;
    n.name = std::move(name);
    n.content = std::move(content);
    n.as_process = as_process;
    n.attrs = std::move(attrs);
    nodes.push_back(std::move(n));
    return nodes.back().id;
  }

  EdgeId add_edge(EdgeKind kind, Endpoint src, Endpoint dst, int count = 1) {
    if (!endpoint_resolves(src)) throw BuildError("edge source does not resolve");
    if (!endpoint_resolves(dst)) throw BuildError("edge destination does not resolve");
    Edge e;
    e.id = (EdgeId)edges.size() + 1;
    e.kind = kind;
    e.src = src;
    e.dst = dst;
    e.count = count;
    edges.push_back(e);
    return e.id;
  }

  TimelineId add_timeline(NodeId owner, std::string ident = "", bool start = false,
                          bool stop = false, bool done = false) {
    if (!process_like(owner)) throw BuildError("timeline owner is not process-like");
    return push_timeline(owner, "", std::move(ident), start, stop, done);
  }

  TimelineId add_root_timeline(std::string label = "", std::string ident = "",
                               bool start = false, bool stop = false, bool done = false) {
    return push_timeline(std::nullopt, std::move(label), std::move(ident), start, stop, done);
  }

  void append_dispatch(TimelineId tl, int rank, NodeId target, std::string label = "") {
    Timeline* t = timeline(tl);
    if (!t) throw BuildError("no such timeline");
    if (!node(target)) throw BuildError("dispatch target does not resolve");
    if (rank <= t->max_rank())
      throw BuildError("dispatch rank " + std::to_string(rank) + " does not increase");
    if (rank < 1) throw BuildError("dispatch rank must be >= 1");
    t->dispatches.push_back({{rank, label.empty() ? default_mark_label(rank) : std::move(label)},
                             target});
  }

  void set_euler(NodeId child, NodeId parent) {
    if (!node(child) || !node(parent)) throw BuildError("euler endpoint does not resolve");
    if (euler.count(child)) throw BuildError("node already has a containment parent");
    euler[child] = parent;
  }

 private:
  TimelineId push_timeline(std::optional<NodeId> owner, std::string label, std::string ident,
                           bool start, bool stop, bool done) {
    Timeline t;
    t.id = (TimelineId)timelines.size() + 1;
    t.ident = ident.empty() ? "t" + std::to_string(t.id) : std::move(ident);
    if (find_node(t.ident) != 0 || find_timeline(t.ident) != 0)
      throw BuildError("duplicate identifier '" + t.ident + "'");
    t.owner = owner;
    t.root_label = std::move(label);
    t.start = start;
    t.stop = stop;
    t.done = done;
    timelines.push_back(std::move(t));
    return timelines.back().id;
  }
};

inline Diagram new_diagram() { return Diagram{}; }

// ---------------------------------------------------------------------------
// Canonical edge order
// ---------------------------------------------------------------------------

inline const char* edge_kind_word(EdgeKind k) {
  switch (k) {
    case EdgeKind::DataFlow: return "->";
    case EdgeKind::DataUpdate: return "w>";
    case EdgeKind::DataRead: return "r>";
    case EdgeKind::Create: return "+>";
    case EdgeKind::Destroy: return "x>";
    case EdgeKind::ControlPar: return "=>";
    case EdgeKind::ControlReturn: return "=>>";
    case EdgeKind::ExceptionCtl: return "e>";
    case EdgeKind::Has: return "has>";
    case EdgeKind::Is: return "is>";
    case EdgeKind::Alias: return "~~";
    case EdgeKind::Ref: return "*>";
    case EdgeKind::CommentAttach: return "#>";
    case EdgeKind::Gate: return "%>";
  }
  return "?";
}

/// Canonical emission order of edges: (kind, src, dst, count) with endpoints
/// keyed by identifier. Gate edges go after the edges they may reference, and
/// their references are keyed by the target's canonical position, so that the
/// order is a pure function of the structure, not of insertion order.
inline std::vector<EdgeId> canonical_edge_order(const Diagram& d) {
  auto endpoint_key = [&](const Endpoint& e, const std::vector<int>& pos) {
    std::string k;
    switch (e.kind) {
      case Endpoint::Kind::Node:
        k = "n " + (d.node(e.id) ? d.node(e.id)->ident : "?");
        break;
      case Endpoint::Kind::TimelinePos:
        k = "t " + (d.timeline(e.id) ? d.timeline(e.id)->ident : "?") + " " +
            std::to_string(e.rank);
        break;
      case Endpoint::Kind::Edge:
        k = "e " + std::to_string(e.id >= 1 && e.id <= (int)pos.size() ? pos[e.id - 1] : 0);
        break;
    }
    return k;
  };

  // Gate targets always precede their gate (builders enforce resolvability),
  // so ordering by reference depth terminates.
  std::vector<int> level(d.edges.size(), 0);
  for (size_t i = 0; i < d.edges.size(); ++i) {
    const Edge& e = d.edges[i];
    if (e.dst.is_edge() && e.dst.id >= 1 && e.dst.id <= (int)i)
      level[i] = level[e.dst.id - 1] + 1;
  }
  int max_level = 0;
  for (int l : level) max_level = std::max(max_level, l);

  std::vector<int> pos(d.edges.size(), 0);  // edge id-1 -> canonical position (1-based)
  std::vector<EdgeId> order;
  order.reserve(d.edges.size());
  for (int lvl = 0; lvl <= max_level; ++lvl) {
    std::vector<std::pair<std::tuple<int, std::string, std::string, int>, EdgeId>> keyed;
    for (size_t i = 0; i < d.edges.size(); ++i) {
      if (level[i] != lvl) continue;
      const Edge& e = d.edges[i];
      keyed.push_back({{(int)e.kind, endpoint_key(e.src, pos), endpoint_key(e.dst, pos), e.count},
                       e.id});
    }
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [key, id] : keyed) {
      order.push_back(id);
      pos[id - 1] = (int)order.size();
    }
  }
  return order;
}

// ---------------------------------------------------------------------------
// Structural equality
// ---------------------------------------------------------------------------

/// Structural equality keyed by identifiers: element order (by id), kinds,
/// names, contents, markers, dispatches, containment, and the canonical edge
/// multiset must all agree. Numeric ids are handles and may differ (e.g. after
/// contraction renumbers); identifiers are the stable identity.
inline bool diagram_equal(const Diagram& a, const Diagram& b) {
  if (a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size() ||
      a.timelines.size() != b.timelines.size() || a.euler.size() != b.euler.size() ||
      a.file_comments != b.file_comments)
    return false;
  for (size_t i = 0; i < a.nodes.size(); ++i) {
    const DiagramNode& x = a.nodes[i];
    const DiagramNode& y = b.nodes[i];
    if (x.ident != y.ident || x.kind != y.kind || x.name != y.name || x.content != y.content ||
        x.as_process != y.as_process)
      return false;
  }
  auto ident_of = [](const Diagram& d, NodeId id) {
    const DiagramNode* n = d.node(id);
    return n ? n->ident : std::string("?");
  };
  for (size_t i = 0; i < a.timelines.size(); ++i) {
    const Timeline& x = a.timelines[i];
    const Timeline& y = b.timelines[i];
    if (x.ident != y.ident || x.owner.has_value() != y.owner.has_value() ||
        x.root_label != y.root_label || x.start != y.start || x.stop != y.stop ||
        x.done != y.done || x.dispatches.size() != y.dispatches.size())
      return false;
    if (x.owner && ident_of(a, *x.owner) != ident_of(b, *y.owner)) return false;
    for (size_t j = 0; j < x.dispatches.size(); ++j) {
      if (x.dispatches[j].mark != y.dispatches[j].mark ||
          ident_of(a, x.dispatches[j].target) != ident_of(b, y.dispatches[j].target))
        return false;
    }
  }
  {
    std::set<std::pair<std::string, std::string>> ea, eb;
    for (const auto& [c, p] : a.euler) ea.insert({ident_of(a, c), ident_of(a, p)});
    for (const auto& [c, p] : b.euler) eb.insert({ident_of(b, c), ident_of(b, p)});
    if (ea != eb) return false;
  }
  auto canon_edges = [&](const Diagram& d) {
    std::vector<std::tuple<int, std::string, int, std::string, int, int>> out;
    auto order = canonical_edge_order(d);
    std::vector<int> pos(d.edges.size(), 0);
    for (size_t i = 0; i < order.size(); ++i) pos[order[i] - 1] = (int)i + 1;
    auto key = [&](const Endpoint& e) -> std::pair<std::string, int> {
      switch (e.kind) {
        case Endpoint::Kind::Node: return {"n" + ident_of(d, e.id), 0};
        case Endpoint::Kind::TimelinePos:
          return {"t" + (d.timeline(e.id) ? d.timeline(e.id)->ident : "?"), e.rank};
        case Endpoint::Kind::Edge: return {"e", pos[e.id - 1]};
      }
      return {"?", 0};
    };
    for (EdgeId id : order) {
      const Edge& e = *d.edge(id);
      auto [sk, sr] = key(e.src);
      auto [dk, dr] = key(e.dst);
      out.push_back({(int)e.kind, sk + "\n" + dk, sr, "", dr, e.count});
    }
    return out;
  };
  return canon_edges(a) == canon_edges(b);
}

}  // namespace ucdf
