// Copyright 2026 The enertest Authors
// SPDX-License-Identifier: Apache-2.0

#include "enertest/efg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

#include "enertest/rng.hpp"

namespace enertest::efg {

EventFlowGraph::EventFlowGraph(std::string root,
                               std::vector<std::string> nodes,
                               std::vector<Edge> edges)
    : root_(std::move(root)), nodes_(std::move(nodes)), edges_(std::move(edges)) {
  if (nodes_.empty()) {
    throw Error(Errc::config, "EFG has no nodes");
  }
  std::sort(nodes_.begin(), nodes_.end());
  if (std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end()) {
    throw Error(Errc::config, "duplicate EFG node id");
  }
  if (!has_node(root_)) {
    throw Error(Errc::config, "EFG root '" + root_ + "' is not a node");
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
  });
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (!has_node(e.from) || !has_node(e.to)) {
      throw Error(Errc::config,
                  "EFG edge " + e.from + " -> " + e.to + " leaves the node set");
    }
    if (i > 0 && edges_[i - 1].from == e.from && edges_[i - 1].to == e.to) {
      throw Error(Errc::config, "duplicate EFG edge " + e.from + " -> " + e.to);
    }
    adjacency_[e.from].push_back(i);
  }

  std::set<std::string> reached;
  std::queue<std::string> frontier;
  reached.insert(root_);
  frontier.push(root_);
  while (!frontier.empty()) {
    const std::string at = frontier.front();
    frontier.pop();
    auto it = adjacency_.find(at);
    if (it == adjacency_.end()) continue;
    for (std::size_t idx : it->second) {
      if (reached.insert(edges_[idx].to).second) {
        frontier.push(edges_[idx].to);
      }
    }
  }
  for (const std::string& n : nodes_) {
    if (!reached.count(n)) {
      throw Error(Errc::config,
                  "EFG node '" + n + "' is unreachable from the root");
    }
  }
}

bool EventFlowGraph::has_node(const std::string& id) const noexcept {
  return std::binary_search(nodes_.begin(), nodes_.end(), id);
}

const Edge* EventFlowGraph::edge(const std::string& from,
                                 const std::string& to) const {
  auto it = adjacency_.find(from);
  if (it == adjacency_.end()) return nullptr;
  for (std::size_t idx : it->second) {
    if (edges_[idx].to == to) return &edges_[idx];
  }
  return nullptr;
}

std::vector<const Edge*> EventFlowGraph::out_edges(
    const std::string& from) const {
  std::vector<const Edge*> out;
  auto it = adjacency_.find(from);
  if (it == adjacency_.end()) return out;
  out.reserve(it->second.size());
  for (std::size_t idx : it->second) out.push_back(&edges_[idx]);
  return out;
}

void WeightConfig::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0) ||
      std::abs(alpha + beta - 1.0) > 1e-9) {
    throw Error(Errc::config,
                "weight coefficients must be positive and sum to 1");
  }
}

double weight(const SequenceStats& stats, const WeightConfig& cfg) {
  cfg.validate();
  if (stats.s < 0 || stats.c < 0) {
    throw Error(Errc::invalid_argument, "sequence stats must be nonnegative");
  }
  return cfg.alpha * static_cast<double>(stats.s) +
         cfg.beta * static_cast<double>(stats.c);
}

std::vector<std::vector<std::string>> enumerate_paths(
    const EventFlowGraph& graph, std::size_t max_len, std::size_t max_paths) {
  if (max_len < 1) {
    throw Error(Errc::invalid_argument, "max_len must be at least 1");
  }
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> walk{graph.root()};

  // Preorder DFS with children in target-id order yields lexicographic
  // emission; out-edges are already sorted.
  auto visit = [&](auto&& self, const std::string& at) -> bool {
    out.push_back(walk);
    if (out.size() >= max_paths) return false;
    if (walk.size() >= max_len) return true;
    for (const Edge* e : graph.out_edges(at)) {
      walk.push_back(e->to);
      const bool keep_going = self(self, e->to);
      walk.pop_back();
      if (!keep_going) return false;
    }
    return true;
  };
  visit(visit, graph.root());
  return out;
}

SequenceStats path_stats(const EventFlowGraph& graph,
                         const std::vector<std::string>& path) {
  if (path.empty() || path.front() != graph.root()) {
    throw Error(Errc::path, "sequence must start at the EFG root");
  }
  SequenceStats stats;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Edge* e = graph.edge(path[i - 1], path[i]);
    if (e == nullptr) {
      throw Error(Errc::path,
                  "no EFG edge " + path[i - 1] + " -> " + path[i]);
    }
    stats.s += e->s;
    stats.c += e->c;
  }
  return stats;
}

std::vector<WeightedSequence> build_pool(const EventFlowGraph& graph,
                                         std::size_t max_len,
                                         std::size_t max_paths,
                                         const WeightConfig& cfg) {
  cfg.validate();
  std::vector<WeightedSequence> pool;
  for (auto& path : enumerate_paths(graph, max_len, max_paths)) {
    WeightedSequence seq;
    seq.stats = path_stats(graph, path);
    seq.weight = weight(seq.stats, cfg);
    seq.path = std::move(path);
    pool.push_back(std::move(seq));
  }
  return pool;
}

WeightedSequence* next_weighted(std::vector<WeightedSequence>& pool) {
  WeightedSequence* best = nullptr;
  for (WeightedSequence& cand : pool) {
    if (cand.explored) continue;
    if (best == nullptr || cand.weight > best->weight ||
        (cand.weight == best->weight &&
         (cand.path.size() < best->path.size() ||
          (cand.path.size() == best->path.size() &&
           cand.path < best->path)))) {
      best = &cand;
    }
  }
  if (best != nullptr) best->explored = true;
  return best;
}

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::tap: return "tap";
    case EventKind::swipe: return "swipe";
    case EventKind::text: return "text";
    case EventKind::back: return "back";
  }
  return "?";
}

std::string_view to_string(InputKind kind) noexcept {
  return kind == InputKind::weighted ? "weighted" : "random";
}

std::vector<UiEvent> random_events(const RandomSequence& seq) {
  if (seq.length < 1) {
    throw Error(Errc::invalid_argument,
                "random sequence length must be at least 1");
  }
  SplitMix64 rng(seq.seed);
  std::vector<UiEvent> events;
  events.reserve(seq.length);
  for (std::size_t i = 0; i < seq.length; ++i) {
    UiEvent ev;
    ev.kind = static_cast<EventKind>(rng.next_below(4));
    ev.x = static_cast<int>(rng.next_below(1080));
    ev.y = static_cast<int>(rng.next_below(1920));
    events.push_back(ev);
  }
  return events;
}

EventFlowGraph read_efg(std::istream& in) {
  std::string root;
  bool have_root = false;
  std::vector<std::string> nodes;
  std::vector<Edge> edges;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string directive;
    if (!(fields >> directive)) continue;
    const auto fail = [&](const std::string& what) {
      throw Error(Errc::parse,
                  what + " on line " + std::to_string(line_no));
    };
    if (directive == "root") {
      if (have_root) fail("second root directive");
      if (!(fields >> root)) fail("root directive without id");
      have_root = true;
    } else if (directive == "node") {
      std::string id;
      if (!(fields >> id)) fail("node directive without id");
      nodes.push_back(id);
    } else if (directive == "edge") {
      Edge e;
      if (!(fields >> e.from >> e.to)) fail("edge directive needs two ids");
      if (fields >> e.s) {
        if (!(fields >> e.c)) fail("edge stats need both s and c");
        if (e.s < 0 || e.c < 0) fail("negative edge stats");
      } else if (!fields.eof()) {
        fail("edge stats must be integers");
      }
      edges.push_back(e);
    } else {
      fail("unknown directive '" + directive + "'");
    }
    std::string extra;
    if (fields >> extra) fail("trailing tokens");
  }
  if (!have_root) {
    throw Error(Errc::parse, "EFG file has no root directive");
  }
  return EventFlowGraph(std::move(root), std::move(nodes), std::move(edges));
}

EventFlowGraph read_efg_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::io, "cannot open " + path.string());
  }
  return read_efg(in);
}

void write_efg(const EventFlowGraph& graph, std::ostream& out) {
  out << "root " << graph.root() << '\n';
  for (const std::string& n : graph.nodes()) {
    out << "node " << n << '\n';
  }
  for (const Edge& e : graph.edges()) {
    out << "edge " << e.from << ' ' << e.to << ' ' << e.s << ' ' << e.c
        << '\n';
  }
}

void write_efg_file(const EventFlowGraph& graph,
                    const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(Errc::io, "cannot open " + path.string() + " for writing");
  }
  write_efg(graph, out);
  out.flush();
  if (!out) {
    throw Error(Errc::io, "failed writing " + path.string());
  }
}

}  // namespace enertest::efg
