// Copyright 2026 The enertest Authors
// SPDX-License-Identifier: Apache-2.0
//
// Event-flow graphs and input sequences. An EFG node is a UI component, an
// edge means one interaction moves the app from one component to the next.
// Walks from the root are candidate weighted input sequences; random
// sequences are seeded Monkey-style event streams.

#ifndef ENERTEST_EFG_HPP
#define ENERTEST_EFG_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "enertest/error.hpp"

namespace enertest::efg {

/// Directed UI transition with its per-edge sequence statistics: s system-API
/// invocations and c control-flow steps attributed to taking the edge.
struct Edge {
  std::string from;
  std::string to;
  std::int64_t s = 0;
  std::int64_t c = 0;
};

/// Event-flow graph. Construction validates that the root is a node, all
/// edge endpoints are nodes, edges are unique and every node is reachable
/// from the root; violations throw Errc::config.
class EventFlowGraph {
 public:
  EventFlowGraph(std::string root, std::vector<std::string> nodes,
                 std::vector<Edge> edges);

  const std::string& root() const noexcept { return root_; }
  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  bool has_node(const std::string& id) const noexcept;
  /// Edge from -> to, or nullptr when absent.
  const Edge* edge(const std::string& from, const std::string& to) const;
  /// Out-edges of a node, ordered by target id.
  std::vector<const Edge*> out_edges(const std::string& from) const;

 private:
  std::string root_;
  std::vector<std::string> nodes_;          // sorted
  std::vector<Edge> edges_;                 // sorted by (from, to)
  std::map<std::string, std::vector<std::size_t>> adjacency_;
};

/// Per-sequence totals feeding the weight formula: s system-API invocations,
/// c function invocations plus block transitions.
struct SequenceStats {
  std::int64_t s = 0;
  std::int64_t c = 0;
};

/// Weight formula coefficients; alpha + beta must equal 1.
struct WeightConfig {
  double alpha = 0.5;
  double beta = 0.5;

  void validate() const;
};

/// weight = alpha * S + beta * C.
double weight(const SequenceStats& stats, const WeightConfig& cfg);

/// A candidate weighted input sequence: a walk from the root with its
/// summed stats and weight. explored flips once the campaign has run it.
struct WeightedSequence {
  std::vector<std::string> path;
  SequenceStats stats;
  double weight = 0.0;
  bool explored = false;
};

/// All walks from the root of up to max_len nodes, in lexicographic node-id
/// order, truncated at max_paths. Node revisits are allowed, so max_len also
/// bounds work on cyclic graphs.
std::vector<std::vector<std::string>> enumerate_paths(
    const EventFlowGraph& graph, std::size_t max_len, std::size_t max_paths);

/// Stats of a walk: sum of per-edge (s, c) along it. Throws Errc::path when
/// the walk does not start at the root or uses a missing edge.
SequenceStats path_stats(const EventFlowGraph& graph,
                         const std::vector<std::string>& path);

/// Enumerates paths and attaches stats and weights, ready for next_weighted.
std::vector<WeightedSequence> build_pool(const EventFlowGraph& graph,
                                         std::size_t max_len,
                                         std::size_t max_paths,
                                         const WeightConfig& cfg);

/// Picks the unexplored sequence of maximal weight (ties: shorter path, then
/// lexicographic path order), marks it explored and returns it. Returns
/// nullptr when the pool is drained.
WeightedSequence* next_weighted(std::vector<WeightedSequence>& pool);

enum class EventKind { tap, swipe, text, back };

std::string_view to_string(EventKind kind) noexcept;

/// Synthetic UI event on a 1080x1920 screen.
struct UiEvent {
  EventKind kind = EventKind::tap;
  int x = 0;
  int y = 0;
};

/// Seeded Monkey-style sequence; (seed, length) fully determines the events.
struct RandomSequence {
  std::uint64_t seed = 0;
  std::size_t length = 0;
};

/// The event list of a random sequence. Per event the generator draws, in
/// order: kind = next_below(4), x = next_below(1080), y = next_below(1920)
/// from a SplitMix64 stream seeded with seq.seed.
std::vector<UiEvent> random_events(const RandomSequence& seq);

/// How a test case's input sequence was chosen.
enum class InputKind { weighted, random };

std::string_view to_string(InputKind kind) noexcept;

/// Serializable description of either sequence flavor, carried by test cases
/// and issue records.
struct SequenceDescriptor {
  InputKind kind = InputKind::random;
  std::vector<std::string> path;  // weighted only
  std::uint64_t seed = 0;         // random only
  std::size_t length = 0;         // random only
};

// --- EFG file format --------------------------------------------------------
//
// UTF-8 text, one directive per line, `#` starts a comment:
//   root <id>
//   node <id>
//   edge <from> <to> [<s> <c>]
// The root line is required and names a declared node; edge stats default
// to 0 0.

EventFlowGraph read_efg(std::istream& in);
EventFlowGraph read_efg_file(const std::filesystem::path& path);
void write_efg(const EventFlowGraph& graph, std::ostream& out);
void write_efg_file(const EventFlowGraph& graph,
                    const std::filesystem::path& path);

}  // namespace enertest::efg

#endif  // ENERTEST_EFG_HPP
