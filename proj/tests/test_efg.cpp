// Copyright 2026 The enertest Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "enertest/efg.hpp"
#include "enertest/rng.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace enertest;
using enertest::testing::ScratchDir;

namespace {

efg::EventFlowGraph chain_abc() {
  return efg::EventFlowGraph(
      "A", {"A", "B", "C"},
      {{"A", "B", 2, 4}, {"B", "C", 1, 3}});
}

efg::EventFlowGraph random_graph(SplitMix64& rng) {
  const int n = 2 + static_cast<int>(rng.next_below(5));
  std::vector<std::string> nodes;
  for (int i = 0; i < n; ++i) nodes.push_back("v" + std::to_string(i));
  std::vector<efg::Edge> edges;
  // Spine for reachability, then a few random extras (self-loops allowed).
  for (int i = 0; i + 1 < n; ++i) {
    edges.push_back({nodes[static_cast<std::size_t>(i)],
                     nodes[static_cast<std::size_t>(i + 1)],
                     static_cast<std::int64_t>(rng.next_below(5)),
                     static_cast<std::int64_t>(rng.next_below(9))});
  }
  for (int i = 0; i < n; ++i) {
    const auto from = nodes[rng.next_below(static_cast<std::uint64_t>(n))];
    const auto to = nodes[rng.next_below(static_cast<std::uint64_t>(n))];
    const bool dup = std::any_of(edges.begin(), edges.end(),
                                 [&](const efg::Edge& e) {
                                   return e.from == from && e.to == to;
                                 });
    if (!dup) {
      edges.push_back({from, to,
                       static_cast<std::int64_t>(rng.next_below(5)),
                       static_cast<std::int64_t>(rng.next_below(9))});
    }
  }
  return efg::EventFlowGraph(nodes[0], nodes, edges);
}

}  // namespace

TEST_CASE("graph construction validates its invariants") {
  CHECK_NOTHROW(chain_abc());

  const auto code_of = [](auto&& build) {
    try {
      build();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::io;  // sentinel for "did not throw"
  };

  SUBCASE("root must be a node") {
    CHECK(code_of([] {
            return efg::EventFlowGraph("X", {"A"}, {});
          }) == Errc::config);
  }
  SUBCASE("edge endpoints must be nodes") {
    CHECK(code_of([] {
            return efg::EventFlowGraph("A", {"A"}, {{"A", "Z", 0, 0}});
          }) == Errc::config);
  }
  SUBCASE("duplicate edges rejected") {
    CHECK(code_of([] {
            return efg::EventFlowGraph(
                "A", {"A", "B"},
                {{"A", "B", 1, 1}, {"A", "B", 2, 2}});
          }) == Errc::config);
  }
  SUBCASE("every node reachable from the root") {
    CHECK(code_of([] {
            return efg::EventFlowGraph("A", {"A", "B", "C"},
                                       {{"A", "B", 0, 0}});
          }) == Errc::config);
  }
  SUBCASE("empty node set rejected") {
    CHECK(code_of([] {
            return efg::EventFlowGraph("A", {}, {});
          }) == Errc::config);
  }
}

TEST_CASE("graph accessors") {
  const auto g = chain_abc();
  CHECK(g.root() == "A");
  CHECK(g.has_node("B"));
  CHECK_FALSE(g.has_node("Z"));
  REQUIRE(g.edge("A", "B") != nullptr);
  CHECK(g.edge("A", "B")->s == 2);
  CHECK(g.edge("B", "A") == nullptr);
  const auto out = g.out_edges("A");
  REQUIRE(out.size() == 1);
  CHECK(out[0]->to == "B");
}

TEST_CASE("weight applies the linear formula") {
  CHECK(efg::weight({4, 10}, {0.5, 0.5}) == doctest::Approx(7.0).epsilon(1e-12));
  CHECK(efg::weight({10, 0}, {0.7, 0.3}) == doctest::Approx(7.0));
  CHECK(efg::weight({0, 0}, {0.5, 0.5}) == 0.0);
}

TEST_CASE("weight coefficients must be positive and sum to one") {
  CHECK_NOTHROW(efg::WeightConfig{0.25, 0.75}.validate());
  // Tiny imbalance within the 1e-9 tolerance is accepted.
  CHECK_NOTHROW(efg::WeightConfig{0.5, 0.5 + 5e-10}.validate());
  CHECK_THROWS_AS((efg::WeightConfig{0.6, 0.5}.validate()), Error);
  CHECK_THROWS_AS((efg::WeightConfig{1.2, -0.2}.validate()), Error);
  CHECK_THROWS_AS((efg::WeightConfig{0.0, 1.0}.validate()), Error);
}

TEST_CASE("enumerate_paths on a chain yields the three prefixes") {
  const auto g = chain_abc();
  const auto paths = efg::enumerate_paths(g, 3, 100);
  REQUIRE(paths.size() == 3);
  CHECK(paths[0] == std::vector<std::string>{"A"});
  CHECK(paths[1] == std::vector<std::string>{"A", "B"});
  CHECK(paths[2] == std::vector<std::string>{"A", "B", "C"});
}

TEST_CASE("enumerate_paths is bounded on cyclic graphs") {
  const efg::EventFlowGraph g("A", {"A"}, {{"A", "A", 1, 1}});
  const auto paths = efg::enumerate_paths(g, 4, 100);
  REQUIRE(paths.size() == 4);  // A, AA, AAA, AAAA
  CHECK(paths[3].size() == 4);
}

TEST_CASE("enumerate_paths matches the worklist oracle") {
  SplitMix64 rng(31337);
  for (int iter = 0; iter < 60; ++iter) {
    const auto g = random_graph(rng);
    const std::size_t max_len = 1 + rng.next_below(5);
    const std::size_t max_paths = 1 + rng.next_below(400);
    const auto got = efg::enumerate_paths(g, max_len, max_paths);
    const auto want = enertest::testing::naive_paths(g, max_len, max_paths);
    CHECK(got == want);
  }
}

TEST_CASE("path_stats sums edge stats and validates the walk") {
  const auto g = chain_abc();
  const auto st = efg::path_stats(g, {"A", "B", "C"});
  CHECK(st.s == 3);
  CHECK(st.c == 7);
  const auto st_root = efg::path_stats(g, {"A"});
  CHECK(st_root.s == 0);
  CHECK(st_root.c == 0);

  const auto code_of = [&](const std::vector<std::string>& p) {
    try {
      (void)efg::path_stats(g, p);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::io;
  };
  CHECK(code_of({"B", "C"}) == Errc::path);       // not rooted
  CHECK(code_of({"A", "C"}) == Errc::path);       // missing edge
  CHECK(code_of({}) == Errc::path);               // empty walk
}

TEST_CASE("next_weighted drains the pool by weight, length, then order") {
  // Diamond with asymmetric stats.
  const efg::EventFlowGraph g("A", {"A", "B", "C"},
                              {{"A", "B", 6, 0},    // weight 3 at 0.5/0.5
                               {"A", "C", 2, 4},    // weight 3 as well
                               {"B", "C", 10, 10}});
  auto pool = efg::build_pool(g, 2, 100, {0.5, 0.5});
  // Pool: [A] w=0, [A,B] w=3, [A,C] w=3.
  REQUIRE(pool.size() == 3);

  const auto* first = efg::next_weighted(pool);
  REQUIRE(first != nullptr);
  // Tie at weight 3, equal length: lexicographic order picks [A, B].
  CHECK(first->path == std::vector<std::string>{"A", "B"});
  CHECK(first->explored);

  const auto* second = efg::next_weighted(pool);
  REQUIRE(second != nullptr);
  CHECK(second->path == std::vector<std::string>{"A", "C"});

  const auto* third = efg::next_weighted(pool);
  REQUIRE(third != nullptr);
  CHECK(third->path == std::vector<std::string>{"A"});

  CHECK(efg::next_weighted(pool) == nullptr);
}

TEST_CASE("next_weighted prefers the shorter path on equal weight") {
  const efg::EventFlowGraph g("A", {"A", "B", "C"},
                              {{"A", "B", 0, 0},
                               {"B", "C", 6, 6},
                               {"A", "C", 6, 6}});
  auto pool = efg::build_pool(g, 3, 100, {0.5, 0.5});
  // [A,C] and [A,B,C] both weigh 6; the shorter wins.
  const auto* first = efg::next_weighted(pool);
  REQUIRE(first != nullptr);
  CHECK(first->path == std::vector<std::string>{"A", "C"});
}

TEST_CASE("random_events is deterministic and stays on screen") {
  const efg::RandomSequence seq{12345, 200};
  const auto a = efg::random_events(seq);
  const auto b = efg::random_events(seq);
  REQUIRE(a.size() == 200);
  REQUIRE(b.size() == 200);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].kind == b[i].kind);
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].y == b[i].y);
    CHECK(a[i].x >= 0);
    CHECK(a[i].x < 1080);
    CHECK(a[i].y >= 0);
    CHECK(a[i].y < 1920);
  }
  // The draw order (kind, x, y per event) is part of the contract.
  SplitMix64 rng(12345);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(static_cast<std::uint64_t>(a[i].kind) == rng.next_below(4));
    CHECK(static_cast<std::uint64_t>(a[i].x) == rng.next_below(1080));
    CHECK(static_cast<std::uint64_t>(a[i].y) == rng.next_below(1920));
  }
  CHECK_THROWS_AS((void)efg::random_events({1, 0}), Error);
}

TEST_CASE("EFG text format round-trips") {
  SplitMix64 rng(2024);
  for (int iter = 0; iter < 20; ++iter) {
    const auto g = random_graph(rng);
    std::ostringstream out;
    efg::write_efg(g, out);
    std::istringstream in(out.str());
    const auto back = efg::read_efg(in);
    CHECK(back.root() == g.root());
    CHECK(back.nodes() == g.nodes());
    REQUIRE(back.edges().size() == g.edges().size());
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
      CHECK(back.edges()[i].from == g.edges()[i].from);
      CHECK(back.edges()[i].to == g.edges()[i].to);
      CHECK(back.edges()[i].s == g.edges()[i].s);
      CHECK(back.edges()[i].c == g.edges()[i].c);
    }
  }
}

TEST_CASE("EFG parser accepts comments and rejects malformed lines") {
  const auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return efg::read_efg(in);
  };
  const auto g = parse(
      "# a tiny graph\n"
      "root A\n"
      "node A\n"
      "node B  # trailing comment\n"
      "\n"
      "edge A B 3 5\n"
      "edge B B\n");
  CHECK(g.root() == "A");
  CHECK(g.edge("A", "B")->c == 5);
  CHECK(g.edge("B", "B")->s == 0);  // stats default to 0 0

  CHECK_THROWS_AS((void)parse("node A\n"), Error);             // no root
  CHECK_THROWS_AS((void)parse("root A\nnode A\nwat A\n"), Error);
  CHECK_THROWS_AS((void)parse("root A\nnode A\nedge A\n"), Error);
  CHECK_THROWS_AS((void)parse("root A\nnode A\nedge A A 1\n"), Error);
  CHECK_THROWS_AS((void)parse("root A\nnode A\nedge A A 1 2 3\n"), Error);
  try {
    (void)parse("root A\nnode A\nedge A A x y\n");
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::parse);
  }
}

TEST_CASE("EFG files round-trip through the filesystem") {
  ScratchDir dir("efg");
  const auto g = chain_abc();
  const auto path = dir.path() / "app.efg";
  efg::write_efg_file(g, path);
  const auto back = efg::read_efg_file(path);
  CHECK(back.nodes() == g.nodes());
  CHECK_THROWS_AS((void)efg::read_efg_file(dir.path() / "missing.efg"), Error);
}
