#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "doctest.h"
#include "satsched/feasibility.hpp"
#include "satsched/mcts.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace satsched;
using testing::blank_instance;
using testing::open_window;

namespace {

SearchConfig config(Variant v, std::uint64_t sims = 1000, std::uint64_t seed = 1, double c = 10.0) {
  SearchConfig cfg;
  cfg.variant = v;
  cfg.num_simulations = sims;
  cfg.seed = seed;
  cfg.exploration = c;
  return cfg;
}

/// One orbit, one task worth 10 observed with probability 0.5.
ProblemInstance single_task() {
  ProblemInstance inst = blank_instance(1, {10.0});
  open_window(inst, 0, 1, 0, 5, 0.5);
  return inst;
}

Schedule schedule_from_nodes(const std::vector<NodeId>& nodes, int num_orbits) {
  Schedule s(num_orbits);
  for (const NodeId& n : nodes) {
    if (n.is_task()) s.orbit(n.orbit).push_back(n.task);
  }
  return s;
}

void check_tree_invariants(const SearchTree& tree, Variant variant, double total_profit) {
  for (SearchTree::Index i = 0; i < tree.size(); ++i) {
    const TreeNode& n = tree.node(i);
    std::uint64_t child_visits = 0;
    for (const TreeNode& c : tree.children(i)) {
      child_visits += c.visits;
      if (variant == Variant::kMax) CHECK(n.value >= c.value);
    }
    REQUIRE(n.visits == child_visits + n.playouts);
    if (!n.expanded) CHECK(n.num_children == 0);
    if (n.visits > 0) {
      const double v = variant == Variant::kAverage ? n.value / n.visits : n.value;
      CHECK(v >= 0.0);
      CHECK(v <= total_profit + 1e-9);
    }
  }
}

}  // namespace

TEST_CASE("uct score examples") {
  // 5 + 1.5 * sqrt(ln 8 / 2), evaluated independently in double precision.
  CHECK(std::abs(uct_score(Variant::kAverage, 10.0, 2, 8, 1.5) - 6.529500485253213) <= 1e-12);
  CHECK(std::abs(uct_score(Variant::kMax, 7.0, 4, 100, 5.0) - 12.364915) <= 1e-6);
  CHECK(std::abs(uct_score(Variant::kMax, 7.0, 4, 100, 5.0) - 12.364915065723368) <= 1e-12);
  CHECK(uct_score(Variant::kMax, 9.0, 3, 50, 2.0) ==
        doctest::Approx(9.0 + 2.0 * std::sqrt(std::log(50.0) / 3.0)).epsilon(1e-12));
  CHECK(std::isinf(uct_score(Variant::kAverage, 0.0, 0, 10, 1.0)));
  CHECK(std::isinf(uct_score(Variant::kMax, 0.0, 0, 0, 1.0)));
}

TEST_CASE("variant names") {
  CHECK(parse_variant("max") == Variant::kMax);
  CHECK(parse_variant("average") == Variant::kAverage);
  CHECK(to_string(Variant::kAverage) == "average");
  CHECK_THROWS_AS(parse_variant("median"), std::invalid_argument);
}

TEST_CASE("invalid search configurations are rejected") {
  const ProblemInstance inst = single_task();
  const ScheduleGraph g = build_graph(inst);
  SearchConfig cfg;
  cfg.exploration = 0.0;
  CHECK_THROWS_AS(search(inst, g, cfg), std::invalid_argument);
  cfg = {};
  cfg.num_simulations = 0;
  CHECK_THROWS_AS(search(inst, g, cfg), std::invalid_argument);
  cfg = {};
  cfg.time_limit_s = -1.0;
  CHECK_THROWS_AS(search(inst, g, cfg), std::invalid_argument);
}

TEST_CASE("selection on a fresh tree stops at the root") {
  const ProblemInstance inst = single_task();
  const ScheduleGraph g = build_graph(inst);
  SearchTree tree(inst, g, config(Variant::kAverage));
  CHECK(tree.select() == std::vector<SearchTree::Index>{SearchTree::kRoot});
}

TEST_CASE("an unvisited child beats any visited sibling") {
  const ProblemInstance inst = single_task();
  const ScheduleGraph g = build_graph(inst);
  for (Variant v : {Variant::kAverage, Variant::kMax}) {
    SearchTree tree(inst, g, config(v));
    tree.expand(SearchTree::kRoot);
    REQUIRE(tree.node(SearchTree::kRoot).num_children == 2);
    const auto first = tree.node(SearchTree::kRoot).first_child;
    tree.node(SearchTree::kRoot).visits = 5;
    tree.node(first).visits = 5;
    tree.node(first).value = 1e12;
    const auto& path = tree.select();
    REQUIRE(path.size() == 2);
    CHECK(path[1] == first + 1);
  }
}

TEST_CASE("ties between equal children are broken uniformly") {
  ProblemInstance inst = blank_instance(1, {1.0, 1.0});
  open_window(inst, 0, 1, 0, 5, 0.5);
  open_window(inst, 1, 1, 0, 5, 0.5);
  testing::uniform_transitions(inst, 1, 0.0, 0.0);
  const ScheduleGraph g = build_graph(inst);
  SearchTree tree(inst, g, config(Variant::kAverage, 1, 12345));
  tree.expand(SearchTree::kRoot);
  const TreeNode& root = tree.node(SearchTree::kRoot);
  REQUIRE(root.num_children == 3);
  tree.node(SearchTree::kRoot).visits = 9;
  for (std::uint32_t c = 0; c < 3; ++c) {
    tree.node(root.first_child + c).visits = 3;
    tree.node(root.first_child + c).value = 6.0;
  }
  std::array<int, 3> counts{};
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    const auto& path = tree.select();
    ++counts[path[1] - root.first_child];
  }
  double chi2 = 0.0;
  const double expected = trials / 3.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 9.210);  // chi-square, 2 degrees of freedom, p = 0.01
}

TEST_CASE("expansion adds every legal successor at once") {
  GeneratorParams p;
  p.num_orbits = 2;
  p.num_tasks = 6;
  p.seed = 3;
  const ProblemInstance inst = generate(p);
  const ScheduleGraph g = build_graph(inst);
  SearchTree tree(inst, g, config(Variant::kMax));
  const auto chosen = tree.expand(SearchTree::kRoot);
  const auto legal = legal_successors(g, inst, NodeId::start(1), OrbitResourceState::fresh(1));
  const auto kids = tree.children(SearchTree::kRoot);
  REQUIRE(kids.size() == legal.size());
  for (std::size_t c = 0; c < kids.size(); ++c) {
    CHECK(kids[c].node == legal[c]);
    CHECK(kids[c].visits == 0);
    CHECK(kids[c].state == *extend(OrbitResourceState::fresh(1), inst, legal[c]));
  }
  CHECK(chosen >= tree.node(SearchTree::kRoot).first_child);
  CHECK(chosen < tree.node(SearchTree::kRoot).first_child + kids.size());
  CHECK_THROWS_AS(tree.expand(SearchTree::kRoot), std::logic_error);
}

TEST_CASE("expansion at the edges of the graph") {
  const ProblemInstance empty = blank_instance(2, {});
  const ScheduleGraph g = build_graph(empty);
  SearchTree tree(empty, g, config(Variant::kAverage));
  const auto only = tree.expand(SearchTree::kRoot);
  CHECK(tree.node(only).node == NodeId::end(1));
  const auto last = tree.expand(only);
  CHECK(tree.node(last).node == NodeId::end(2));
  CHECK(tree.is_terminal(last));
  CHECK_THROWS_AS(tree.expand(last), std::logic_error);

  // A task that exhausts the budget has the boundary as its only child.
  ProblemInstance tight = blank_instance(1, {1.0, 1.0}, 5.0, 1e9);
  open_window(tight, 0, 1, 0, 5, 0.5);
  open_window(tight, 1, 1, 10, 12, 0.5);
  testing::uniform_transitions(tight, 1, 0.0, 0.0);
  const ScheduleGraph tg = build_graph(tight);
  SearchTree t2(tight, tg, config(Variant::kAverage));
  t2.expand(SearchTree::kRoot);
  const auto task0 = t2.node(SearchTree::kRoot).first_child;
  REQUIRE(t2.node(task0).node == NodeId::task_node(1, 0));
  const auto boundary = t2.expand(task0);
  CHECK(t2.node(task0).num_children == 1);
  CHECK(t2.node(boundary).node == NodeId::end(1));
}

TEST_CASE("rollouts from the root average the exact uniform-completion value") {
  {
    const ProblemInstance inst = single_task();
    const ScheduleGraph g = build_graph(inst);
    SearchTree tree(inst, g, config(Variant::kAverage, 1, 9));
    const std::vector<SearchTree::Index> path{SearchTree::kRoot};
    double sum = 0.0;
    const int n = 100000;
    for (int r = 0; r < n; ++r) {
      const double v = tree.simulate(path);
      CHECK((v == 0.0 || v == 5.0));
      sum += v;
    }
    CHECK(testing::exact_rollout_mean(inst) == doctest::Approx(2.5));
    CHECK(std::abs(sum / n - 2.5) <= 0.1);
  }
  {
    GeneratorParams p;
    p.num_orbits = 2;
    p.num_tasks = 4;
    p.seed = 21;
    const ProblemInstance inst = generate(p);
    const ScheduleGraph g = build_graph(inst);
    SearchTree tree(inst, g, config(Variant::kAverage, 1, 10));
    const std::vector<SearchTree::Index> path{SearchTree::kRoot};
    double sum = 0.0;
    double sum_sq = 0.0;
    const int n = 100000;
    for (int r = 0; r < n; ++r) {
      const double v = tree.simulate(path);
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / n);
    CHECK(std::abs(mean - testing::exact_rollout_mean(inst)) <= 5.0 * se + 1e-12);
  }
}

TEST_CASE("rollouts score zero when every probability is zero") {
  GeneratorParams p;
  p.num_orbits = 3;
  p.num_tasks = 8;
  p.probability_range = {0.0, 0.0};
  const ProblemInstance inst = generate(p);
  const ScheduleGraph g = build_graph(inst);
  SearchTree tree(inst, g, config(Variant::kAverage));
  const std::vector<SearchTree::Index> path{SearchTree::kRoot};
  for (int r = 0; r < 1000; ++r) CHECK(tree.simulate(path) == 0.0);
}

TEST_CASE("backpropagation semantics") {
  const ProblemInstance inst = single_task();
  const ScheduleGraph g = build_graph(inst);
  {
    SearchTree tree(inst, g, config(Variant::kAverage));
    const auto child = tree.expand(SearchTree::kRoot);
    const std::vector<SearchTree::Index> path{SearchTree::kRoot, child};
    tree.backpropagate(path, 3.0);
    CHECK(tree.node(child).value == 3.0);
    CHECK(tree.node(child).visits == 1);
    CHECK(tree.node(child).playouts == 1);
    CHECK(tree.node(SearchTree::kRoot).value == 3.0);
    CHECK(tree.node(SearchTree::kRoot).playouts == 0);
  }
  {
    SearchTree tree(inst, g, config(Variant::kMax));
    const auto child = tree.expand(SearchTree::kRoot);
    tree.node(child).value = 5.0;
    tree.node(child).visits = 2;
    const std::vector<SearchTree::Index> path{SearchTree::kRoot, child};
    tree.backpropagate(path, 3.0);
    CHECK(tree.node(child).value == 5.0);
    CHECK(tree.node(child).visits == 3);
    tree.backpropagate(path, 9.0);
    CHECK(tree.node(child).value == 9.0);
    CHECK(tree.node(child).visits == 4);
    CHECK(tree.node(SearchTree::kRoot).value == 9.0);
  }
}

TEST_CASE("a terminal leaf is scored by its own path") {
  const ProblemInstance inst = single_task();
  const ScheduleGraph g = build_graph(inst);
  SearchTree tree(inst, g, config(Variant::kAverage, 1, 4));
  for (int it = 0; it < 200; ++it) tree.run_iteration();
  // task0 -> End(1) is terminal and worth exactly 5 on every visit.
  const TreeNode& root = tree.node(SearchTree::kRoot);
  REQUIRE(root.expanded);
  const auto task0 = root.first_child;
  REQUIRE(tree.node(task0).node == NodeId::task_node(1, 0));
  REQUIRE(tree.node(task0).expanded);
  const auto leaf = tree.node(task0).first_child;
  CHECK(tree.is_terminal(leaf));
  CHECK(tree.node(leaf).visits > 1);
  CHECK(tree.node(leaf).value == 5.0 * tree.node(leaf).visits);
  CHECK(tree.node(leaf).playouts == tree.node(leaf).visits);
  CHECK_FALSE(tree.node(leaf).expanded);
  const auto end_direct = root.first_child + 1;
  CHECK(tree.node(end_direct).value == 0.0);
  CHECK(tree.size() == 4);
}

TEST_CASE("a one-simulation search returns its rollout") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const ProblemInstance inst = generate(testing::random_params(rng, 5, 12));
    const ScheduleGraph g = build_graph(inst);
    for (Variant v : {Variant::kAverage, Variant::kMax}) {
      SearchTree tree(inst, g, config(v, 1, trial));
      tree.run_iteration();
      const Schedule s = tree.extract_path();
      CHECK(s == schedule_from_nodes(tree.best_rollout_path(), inst.num_orbits()));
      const SearchResult r = search(inst, g, config(v, 1, trial));
      CHECK(r.simulations_run == 1);
      CHECK(r.expected_value == r.best_rollout_value);
      CHECK(validate_schedule(inst, r.schedule).empty());
    }
  }
}

TEST_CASE("search without tasks returns the empty schedule") {
  const ProblemInstance inst = blank_instance(4, {});
  const ScheduleGraph g = build_graph(inst);
  const SearchResult r = search(inst, g, config(Variant::kMax, 100));
  CHECK(r.schedule == Schedule(4));
  CHECK(r.expected_value == 0.0);
}

TEST_CASE("search is deterministic in its seed") {
  GeneratorParams p;
  p.num_orbits = 5;
  p.num_tasks = 15;
  p.seed = 8;
  const ProblemInstance inst = generate(p);
  const ScheduleGraph g = build_graph(inst);
  for (Variant v : {Variant::kAverage, Variant::kMax}) {
    const SearchResult a = search(inst, g, config(v, 20000, 77));
    const SearchResult b = search(inst, g, config(v, 20000, 77));
    CHECK(a.schedule == b.schedule);
    CHECK(a.expected_value == b.expected_value);
    CHECK(a.tree_size == b.tree_size);
    CHECK(a.best_rollout_value == b.best_rollout_value);
  }
}

TEST_CASE("tree statistics stay consistent during search") {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 60; ++trial) {
    const ProblemInstance inst = generate(testing::random_params(rng, 6, 15));
    const ScheduleGraph g = build_graph(inst);
    const double total = std::accumulate(inst.tasks().begin(), inst.tasks().end(), 0.0,
                                         [](double a, const TaskDef& t) { return a + t.profit; });
    std::size_t bound = static_cast<std::size_t>(inst.num_orbits()) + 1;
    for (int k = 1; k <= inst.num_orbits(); ++k) bound += inst.available_tasks(k).size();
    for (Variant v : {Variant::kAverage, Variant::kMax}) {
      SearchTree tree(inst, g, config(v, 1, trial));
      double best_root = 0.0;
      for (int it = 1; it <= 2000; ++it) {
        tree.run_iteration();
        if (v == Variant::kMax) {
          CHECK(tree.node(SearchTree::kRoot).value >= best_root);
          best_root = tree.node(SearchTree::kRoot).value;
        }
        CHECK(tree.best_rollout_path().size() <= bound);
      }
      CHECK(tree.node(SearchTree::kRoot).visits == 2000);
      check_tree_invariants(tree, v, total);
      const Schedule s = tree.extract_path();
      CHECK(validate_schedule(inst, s).empty());
    }
  }
}

TEST_CASE("time limit stops the search early") {
  GeneratorParams p;
  p.num_orbits = 9;
  p.num_tasks = 30;
  const ProblemInstance inst = generate(p);
  const ScheduleGraph g = build_graph(inst);
  SearchConfig cfg = config(Variant::kAverage, 1'000'000'000ULL);
  cfg.time_limit_s = 0.05;
  const SearchResult r = search(inst, g, cfg);
  CHECK(r.simulations_run >= 1);
  CHECK(r.simulations_run < cfg.num_simulations);
  CHECK(r.wall_time_s < 5.0);
  CHECK(validate_schedule(inst, r.schedule).empty());
}

TEST_CASE("search finds the exhaustive optimum on a small instance") {
  GeneratorParams p;
  p.num_orbits = 2;
  p.num_tasks = 4;
  for (std::uint64_t seed : {1, 2, 3}) {
    p.seed = seed;
    const ProblemInstance inst = generate(p);
    const ScheduleGraph g = build_graph(inst);
    const double optimum = testing::brute_force_optimum(inst).value;
    for (Variant v : {Variant::kMax, Variant::kAverage}) {
      const SearchResult r = search(inst, g, config(v, 200000, seed));
      CHECK(std::abs(r.expected_value - optimum) <= 1e-9);
    }
  }
}
