#pragma once

#include <cctype>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ucdf/diagram.hpp"

namespace ucdf {

// ---------------------------------------------------------------------------
// Words of the text form
// ---------------------------------------------------------------------------

inline const char* node_kind_word(const NodeKind& k) {
  switch (k.tag) {
    case NodeKind::Tag::Process: return "process";
    case NodeKind::Tag::Module: return "module";
    case NodeKind::Tag::Decision: return "decision";
    case NodeKind::Tag::OrJoin: return "orjoin";
    case NodeKind::Tag::HumanAction: return "human";
    case NodeKind::Tag::Comment: return "note";
    case NodeKind::Tag::Mark: return "mark";
    case NodeKind::Tag::Holder:
      switch (k.holder) {
        case HolderKind::Static: return "static";
        case HolderKind::Stack: return "stack";
        case HolderKind::Heap: return "heap";
        case HolderKind::Register: return "register";
        case HolderKind::File: return "file";
        case HolderKind::Document: return "document";
        case HolderKind::Collection: return "collection";
        case HolderKind::Address: return "address";
        case HolderKind::Constant: return "const";
      }
  }
  return "process";
}

inline bool node_kind_from_word(const std::string& w, NodeKind* out) {
  if (w == "process") *out = NodeKind::process();
  else if (w == "module") *out = NodeKind::module();
  else if (w == "decision") *out = NodeKind::decision();
  else if (w == "orjoin") *out = NodeKind::or_join();
  else if (w == "human") *out = NodeKind::human_action();
  else if (w == "note") *out = NodeKind::comment();
  else if (w == "mark") *out = NodeKind::mark();
  else if (w == "static") *out = NodeKind::holder_of(HolderKind::Static);
  else if (w == "stack") *out = NodeKind::holder_of(HolderKind::Stack);
  else if (w == "heap") *out = NodeKind::holder_of(HolderKind::Heap);
  else if (w == "register") *out = NodeKind::holder_of(HolderKind::Register);
  else if (w == "file") *out = NodeKind::holder_of(HolderKind::File);
  else if (w == "document") *out = NodeKind::holder_of(HolderKind::Document);
  else if (w == "collection") *out = NodeKind::holder_of(HolderKind::Collection);
  else if (w == "address") *out = NodeKind::holder_of(HolderKind::Address);
  else if (w == "const") *out = NodeKind::holder_of(HolderKind::Constant);
  else return false;
  return true;
}

inline bool edge_kind_from_word(const std::string& w, EdgeKind* out) {
  if (w == "->") *out = EdgeKind::DataFlow;
  else if (w == "w>") *out = EdgeKind::DataUpdate;
  else if (w == "r>") *out = EdgeKind::DataRead;
  else if (w == "+>") *out = EdgeKind::Create;
  else if (w == "x>") *out = EdgeKind::Destroy;
  else if (w == "=>") *out = EdgeKind::ControlPar;
  else if (w == "=>>") *out = EdgeKind::ControlReturn;
  else if (w == "e>") *out = EdgeKind::ExceptionCtl;
  else if (w == "has>") *out = EdgeKind::Has;
  else if (w == "is>") *out = EdgeKind::Is;
  else if (w == "~~") *out = EdgeKind::Alias;
  else if (w == "*>") *out = EdgeKind::Ref;
  else if (w == "#>") *out = EdgeKind::CommentAttach;
  else if (w == "%>") *out = EdgeKind::Gate;
  else return false;
  return true;
}

inline bool reserved_word(const std::string& w) {
  static const std::set<std::string> words = {
      "process", "module",  "decision",   "orjoin",  "human",    "note",    "mark",
      "holder",  "static",  "stack",      "heap",    "register", "file",    "document",
      "collection", "address", "const",   "content", "asprocess", "timeline", "on",
      "root",    "start",   "stop",       "done",    "in",       "edge",    "x",
      "ucdf"};
  return words.count(w) != 0;
}

// ---------------------------------------------------------------------------
// Lexing
// ---------------------------------------------------------------------------

namespace textdetail {

struct Tok {
  enum Kind { Word, Int, Str, Op, End } kind = End;
  std::string text;  // word/op spelling, digits, or decoded string value
  int col = 1;
  int len = 0;
};

inline std::vector<Tok> lex_line(const std::string& line, int lineno) {
  // Operators first, longest first: the alphabetic ones only match when the
  // trailing '>' is present, so they never clip identifiers.
  static const std::vector<std::string> ops = {"has>", "=>>", "is>", "=>", "->", "w>", "r>",
                                               "+>",   "x>",  "e>",  "*>", "#>", "%>", "~~",
                                               ":",    "@"};
  std::vector<Tok> out;
  size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == ' ' || c == '\t') {
      i++;
      continue;
    }
    bool is_op = false;
    for (const auto& op : ops) {
      if (line.compare(i, op.size(), op) == 0) {
        out.push_back({Tok::Op, op, (int)i + 1, (int)op.size()});
        i += op.size();
        is_op = true;
        break;
      }
    }
    if (is_op) continue;
    if (std::isalpha((unsigned char)c) || c == '_') {
      size_t j = i;
      while (j < line.size() && (std::isalnum((unsigned char)line[j]) || line[j] == '_')) j++;
      out.push_back({Tok::Word, line.substr(i, j - i), (int)i + 1, (int)(j - i)});
      i = j;
      continue;
    }
    if (std::isdigit((unsigned char)c)) {
      size_t j = i;
      while (j < line.size() && std::isdigit((unsigned char)line[j])) j++;
      out.push_back({Tok::Int, line.substr(i, j - i), (int)i + 1, (int)(j - i)});
      i = j;
      continue;
    }
    if (c == '"') {
      std::string val;
      size_t j = i + 1;
      while (true) {
        if (j >= line.size())
          throw ParseError({lineno, (int)j + 1, 1}, "closing '\"'", "end of line");
        char x = line[j];
        if (x == '"') {
          j++;
          break;
        }
        if (x == '\\') {
          if (j + 1 >= line.size())
            throw ParseError({lineno, (int)j + 1, 1}, "escape character", "end of line");
          char e = line[j + 1];
          if (e == '"') val += '"';
          else if (e == '\\') val += '\\';
          else if (e == 'n') val += '\n';
          else
            throw ParseError({lineno, (int)j + 1, 2}, "escape \\\", \\\\ or \\n",
                             std::string("\\") + e);
          j += 2;
          continue;
        }
        val += x;
        j++;
      }
      out.push_back({Tok::Str, val, (int)i + 1, (int)(j - i)});
      i = j;
      continue;
    }
    throw ParseError({lineno, (int)i + 1, 1}, "token", std::string(1, c));
  }
  out.push_back({Tok::End, "", (int)line.size() + 1, 0});
  return out;
}

inline std::string show(const Tok& t) {
  switch (t.kind) {
    case Tok::Word: return "'" + t.text + "'";
    case Tok::Int: return "'" + t.text + "'";
    case Tok::Str: return "string";
    case Tok::Op: return "'" + t.text + "'";
    case Tok::End: return "end of line";
  }
  return "?";
}

}  // namespace textdetail

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// Parses the text form into a diagram. Stops at the first syntax error.
/// Identifiers must be declared before use; semantic rules are not checked
/// here, so a parseable file may still fail validate().
inline Diagram parse(const std::string& text) {
  using textdetail::Tok;
  using textdetail::lex_line;
  using textdetail::show;

  std::vector<std::string> lines;
  {
    std::string cur;
    for (char c : text) {
      if (c == '\n') {
        if (!cur.empty() && cur.back() == '\r') cur.pop_back();
        lines.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) {
      if (cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
    }
  }
  if (lines.empty()) throw ParseError({1, 1, 0}, "header 'ucdf 1'", "end of input");

  Diagram d;
  std::map<std::string, NodeId> node_by_ident;
  std::map<std::string, TimelineId> tl_by_ident;

  {
    auto toks = lex_line(lines[0], 1);
    bool ok = toks.size() == 3 && toks[0].kind == Tok::Word && toks[0].text == "ucdf" &&
              toks[1].kind == Tok::Int && toks[1].text == "1";
    if (!ok) throw ParseError({1, 1, (int)lines[0].size()}, "header 'ucdf 1'", show(toks[0]));
  }

  for (size_t li = 1; li < lines.size(); ++li) {
    const std::string& raw = lines[li];
    int lineno = (int)li + 1;
    {
      size_t p = raw.find_first_not_of(" \t");
      if (p == std::string::npos) continue;  // blank
      if (raw.compare(p, 2, "//") == 0) {
        std::string c = raw.substr(p + 2);
        if (!c.empty() && c.front() == ' ') c.erase(c.begin());
        d.file_comments.push_back(c);
        continue;
      }
    }
    auto toks = lex_line(raw, lineno);
    size_t ti = 0;
    auto peek = [&]() -> const Tok& { return toks[ti]; };
    auto next = [&]() -> const Tok& { return toks[ti++]; };
    auto fail = [&](const std::string& expected) -> ParseError {
      const Tok& t = peek();
      return ParseError({lineno, t.col, t.len}, expected, show(t));
    };
    auto expect_op = [&](const std::string& op) {
      if (peek().kind != Tok::Op || peek().text != op) throw fail("'" + op + "'");
      ti++;
    };
    auto expect_end = [&]() {
      if (peek().kind != Tok::End) throw fail("end of line");
    };
    auto new_ident = [&]() -> std::string {
      if (peek().kind != Tok::Word) throw fail("identifier");
      if (reserved_word(peek().text)) throw fail("identifier (not a keyword)");
      if (node_by_ident.count(peek().text) || tl_by_ident.count(peek().text))
        throw fail("new identifier ('" + peek().text + "' is already declared)");
      return next().text;
    };
    auto node_ref = [&]() -> NodeId {
      if (peek().kind != Tok::Word) throw fail("element identifier");
      auto it = node_by_ident.find(peek().text);
      if (it == node_by_ident.end())
        throw fail("declared element identifier ('" + peek().text + "' is unknown)");
      ti++;
      return it->second;
    };
    auto parse_int = [&](const char* what) -> int {
      if (peek().kind != Tok::Int) throw fail(what);
      const std::string& s = next().text;
      if (s.size() > 9) throw ParseError({lineno, toks[ti - 1].col, toks[ti - 1].len},
                                         std::string(what) + " in range", "'" + s + "'");
      return std::stoi(s);
    };

    if (peek().kind != Tok::Word) throw fail("declaration, dispatch or edge");
    std::string head = peek().text;

    NodeKind kind;
    if (node_kind_from_word(head, &kind)) {
      ti++;
      DiagramNode n;
      n.id = (NodeId)d.nodes.size() + 1;
      n.kind = kind;
      n.ident = new_ident();
      if (peek().kind == Tok::Str) n.name = next().text;
      if (peek().kind == Tok::Word && peek().text == "content") {
        ti++;
        if (peek().kind != Tok::Str) throw fail("string after 'content'");
        n.content = next().text;
      }
      if (peek().kind == Tok::Word && peek().text == "asprocess") {
        if (!kind.is_holder(HolderKind::Document)) throw fail("end of line ('asprocess' is only valid on document)");
        ti++;
        n.as_process = true;
      }
      expect_end();
      node_by_ident[n.ident] = n.id;
      d.nodes.push_back(std::move(n));
      continue;
    }

    if (head == "timeline") {
      ti++;
      Timeline t;
      t.id = (TimelineId)d.timelines.size() + 1;
      t.ident = new_ident();
      if (peek().kind == Tok::Word && peek().text == "on") {
        ti++;
        t.owner = node_ref();
      } else if (peek().kind == Tok::Word && peek().text == "root") {
        ti++;
        if (peek().kind == Tok::Str) t.root_label = next().text;
      } else {
        throw fail("'on' or 'root'");
      }
      while (peek().kind == Tok::Word) {
        const std::string& m = peek().text;
        if (m == "start" && !t.start) t.start = true;
        else if (m == "stop" && !t.stop) t.stop = true;
        else if (m == "done" && !t.done) t.done = true;
        else throw fail("marker 'start', 'stop' or 'done' (at most once each)");
        ti++;
      }
      expect_end();
      tl_by_ident[t.ident] = t.id;
      d.timelines.push_back(std::move(t));
      continue;
    }

    if (head == "in") {
      ti++;
      NodeId parent = node_ref();
      expect_op(":");
      if (peek().kind != Tok::Word) throw fail("element identifier");
      while (peek().kind == Tok::Word) {
        int col = peek().col, len = peek().len;
        NodeId child = node_ref();
        if (d.euler.count(child))
          throw ParseError({lineno, col, len}, "element without a containment parent",
                           "'" + d.nodes[child - 1].ident + "' (already placed)");
        d.euler[child] = parent;
      }
      expect_end();
      continue;
    }

    if (head == "edge" || node_by_ident.count(head) || tl_by_ident.count(head)) {
      // Dispatch line: TIMELINE RANK [@ "label"] => TARGET
      if (tl_by_ident.count(head) && toks.size() > 1 && toks[1].kind == Tok::Int) {
        TimelineId tl = tl_by_ident[head];
        ti++;
        int rank = parse_int("order rank");
        std::string label = std::to_string(rank);
        if (peek().kind == Tok::Op && peek().text == "@") {
          ti++;
          if (peek().kind != Tok::Str) throw fail("string label after '@'");
          label = next().text;
        }
        expect_op("=>");
        NodeId target = node_ref();
        expect_end();
        d.timelines[tl - 1].dispatches.push_back({{rank, label}, target});
        continue;
      }

      // Edge line: ENDPOINT OP ENDPOINT [x COUNT]
      auto endpoint = [&]() -> Endpoint {
        if (peek().kind == Tok::Word && peek().text == "edge") {
          ti++;
          int col = peek().col, len = peek().len;
          int ref = parse_int("edge number");
          if (ref < 1 || ref > (int)d.edges.size())
            throw ParseError({lineno, col, len}, "number of an earlier edge",
                             "'" + std::to_string(ref) + "'");
          return Endpoint::edge(ref);
        }
        if (peek().kind != Tok::Word) throw fail("endpoint");
        if (tl_by_ident.count(peek().text)) {
          TimelineId tl = tl_by_ident[next().text];
          expect_op(":");
          int rank = parse_int("order rank");
          return Endpoint::timeline_pos(tl, rank);
        }
        return Endpoint::node(node_ref());
      };
      Endpoint src = endpoint();
      EdgeKind ek;
      if (peek().kind != Tok::Op || !edge_kind_from_word(peek().text, &ek))
        throw fail("edge operator");
      ti++;
      Endpoint dst = endpoint();
      int count = 1;
      if (peek().kind == Tok::Word && peek().text == "x") {
        ti++;
        count = parse_int("count");
      }
      expect_end();
      Edge e;
      e.id = (EdgeId)d.edges.size() + 1;
      e.kind = ek;
      e.src = src;
      e.dst = dst;
      e.count = count;
      d.edges.push_back(e);
      continue;
    }

    throw fail("declaration, dispatch or edge");
  }
  return d;
}

// ---------------------------------------------------------------------------
// Serializing
// ---------------------------------------------------------------------------

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\\\"";
    else if (c == '\\') out += "\\\\";
    else if (c == '\n') out += "\\n";
    else out += c;
  }
  out += '"';
  return out;
}

/// Emits the canonical text form: header, file comments, nodes by id,
/// timelines by id (each followed by its dispatches), edges in canonical
/// order, containment lines last. serialize(parse(s)) is a fixed point.
inline std::string serialize(const Diagram& d) {
  std::string out = "ucdf 1\n";
  for (const std::string& c : d.file_comments) out += c.empty() ? "//\n" : "// " + c + "\n";

  auto ident_of = [&](NodeId id) -> const std::string& {
    const DiagramNode* n = d.node(id);
    if (!n) throw BuildError("serialize: unresolved node id " + std::to_string(id));
    return n->ident;
  };

  for (const DiagramNode& n : d.nodes) {
    out += node_kind_word(n.kind);
    out += " " + n.ident;
    if (n.name) out += " " + quote(*n.name);
    if (n.content) out += " content " + quote(*n.content);
    if (n.as_process) out += " asprocess";
    out += "\n";
  }

  for (const Timeline& t : d.timelines) {
    out += "timeline " + t.ident;
    if (t.owner) {
      out += " on " + ident_of(*t.owner);
    } else {
      out += " root";
      if (!t.root_label.empty()) out += " " + quote(t.root_label);
    }
    if (t.start) out += " start";
    if (t.stop) out += " stop";
    if (t.done) out += " done";
    out += "\n";
    for (const Dispatch& disp : t.dispatches) {
      out += t.ident + " " + std::to_string(disp.mark.rank);
      if (disp.mark.label != std::to_string(disp.mark.rank)) out += " @ " + quote(disp.mark.label);
      out += " => " + ident_of(disp.target) + "\n";
    }
  }

  auto order = canonical_edge_order(d);
  std::vector<int> pos(d.edges.size(), 0);
  for (size_t i = 0; i < order.size(); ++i) pos[order[i] - 1] = (int)i + 1;
  auto endpoint_text = [&](const Endpoint& e) -> std::string {
    switch (e.kind) {
      case Endpoint::Kind::Node: return ident_of(e.id);
      case Endpoint::Kind::TimelinePos: {
        const Timeline* t = d.timeline(e.id);
        if (!t) throw BuildError("serialize: unresolved timeline id " + std::to_string(e.id));
        return t->ident + ":" + std::to_string(e.rank);
      }
      case Endpoint::Kind::Edge:
        if (e.id < 1 || e.id > (int)d.edges.size())
          throw BuildError("serialize: unresolved edge id " + std::to_string(e.id));
        return "edge " + std::to_string(pos[e.id - 1]);
    }
    return "?";
  };
  for (EdgeId id : order) {
    const Edge& e = *d.edge(id);
    out += endpoint_text(e.src);
    out += std::string(" ") + edge_kind_word(e.kind) + " ";
    out += endpoint_text(e.dst);
    if (e.count != 1) out += " x " + std::to_string(e.count);
    out += "\n";
  }

  std::map<NodeId, std::vector<NodeId>> children;
  for (const auto& [child, parent] : d.euler) children[parent].push_back(child);
  for (auto& [parent, kids] : children) {
    std::sort(kids.begin(), kids.end());
    out += "in " + ident_of(parent) + " :";
    for (NodeId c : kids) out += " " + ident_of(c);
    out += "\n";
  }
  return out;
}

inline std::string canonicalize(const std::string& text) { return serialize(parse(text)); }

}  // namespace ucdf
