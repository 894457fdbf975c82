#pragma once

#include <cassert>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "actrack/random.hpp"

namespace actrack {

struct PlannerConfig {
  int horizon = 5;            // K, simulated steps per hypothesis
  int budget = 500;           // L, simulations per planning call
  double discount = 0.9;      // gamma
  double exploration = 1.75;  // c in the UCB bonus
  double epsilon = 1e-6;      // division guard in the UCB bonus
  int plan_particles = 200;   // I_plan, particles of node beliefs

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Per-action bookkeeping of a tree node: visit count N_u and the running
/// mean V_hat of backed-up returns.
struct ActionStats {
  int visits = 0;
  double value = 0.0;
};

/// UCB action choice: argmax of value + c*sqrt(ln N / (N_u + eps)).
/// N = 0 is treated as ln-argument 1; ties break to the lowest index.
int ucb_select(std::span<const ActionStats> actions, int node_visits, double c,
               double eps);

/// Action-observation pairs relative to the tree root.
using HistoryKey = std::vector<std::pair<int, int>>;

/// Running range of backed-up returns plus tree-growth counters.
struct PlannerStats {
  double g_min = std::numeric_limits<double>::infinity();
  double g_max = -std::numeric_limits<double>::infinity();
  long long backups = 0;
  long long expansions = 0;

  void record(double g) {
    if (g < g_min) g_min = g;
    if (g > g_max) g_max = g;
    ++backups;
  }
  void merge(const PlannerStats& o) {
    if (o.g_min < g_min) g_min = o.g_min;
    if (o.g_max > g_max) g_max = o.g_max;
    backups += o.backups;
    expansions += o.expansions;
  }
};

/// Monte Carlo tree search over action-observation histories.
///
/// Model requirements:
///   using State, Belief;
///   int num_actions() const;
///   State sample_transition(const State&, int action, RandomStream&) const;
///   int sample_observation(const State&, RandomStream&) const;
///   struct-like update_belief(const Belief&, int action, int obs,
///                             RandomStream&) const
///     -> { Belief belief; double reward; }   // reward normalized to [-1, 0]
///   int informed_action(const State&, const Belief&, RandomStream&) const;
///
/// One planning session is single-threaded and deterministic given its
/// random stream; independent sessions may run in parallel.
template <class Model>
class MctsPlanner {
 public:
  using State = typename Model::State;
  using Belief = typename Model::Belief;

  struct Node {
    Belief belief;
    double reward = 0.0;  // normalized reward cached at node creation
    int visits = 0;       // N
    std::vector<ActionStats> actions;
    std::map<std::pair<int, int>, std::unique_ptr<Node>> children;
  };

  MctsPlanner(const Model& model, const PlannerConfig& cfg)
      : model_(&model), cfg_(cfg) {
    cfg_.validate();
  }

  bool rooted() const { return root_ != nullptr; }

  /// Starts a fresh tree whose root carries the given planning belief.
  void reset(Belief root_belief) {
    root_ = make_node(std::move(root_belief), 0.0);
    }

  /// Runs the simulation budget from the tracking belief and returns the
  /// index of the action with the best estimated future return. Only actions
  /// that were actually simulated compete; ties break to the lowest index.
  int plan(std::span<const State> root_particles,
           std::span<const double> root_weights, RandomStream& rng) {
    assert(rooted());
    assert(root_particles.size() == root_weights.size());
    for (int l = 0; l < cfg_.budget; ++l) {
      const std::size_t pick = sample_index(root_weights, rng);
      simulate(root_particles[pick], *root_, 0, rng);
    }
    int best = -1;
    double best_value = 0.0;
    for (std::size_t j = 0; j < root_->actions.size(); ++j) {
      const ActionStats& a = root_->actions[j];
      if (a.visits == 0) continue;
      if (best < 0 || a.value > best_value) {
        best = static_cast<int>(j);
        best_value = a.value;
      }
    }
    return best < 0 ? 0 : best;
  }

  /// Reroots the tree at the executed (action, observation) child when it
  /// was simulated, discarding all siblings; otherwise starts a fresh root
  /// with `fresh_belief`. Retained visit counts and values are kept as-is.
  void advance(int action, int observation, Belief fresh_belief) {
    if (root_) {
      auto it = root_->children.find({action, observation});
      if (it != root_->children.end()) {
        std::unique_ptr<Node> child = std::move(it->second);
        root_ = std::move(child);
        return;
      }
    }
    root_ = make_node(std::move(fresh_belief), 0.0);
  }

  /// One recursive return estimation; grows the tree by at most one node.
  double simulate(const State& particle, Node& node, int depth,
                  RandomStream& rng) {
    if (depth >= cfg_.horizon) return 0.0;

    const int u =
        ucb_select(node.actions, node.visits, cfg_.exploration, cfg_.epsilon);
    const State next = model_->sample_transition(particle, u, rng);
    const int z = model_->sample_observation(next, rng);

    double g;
    const auto it = node.children.find({u, z});
    if (it != node.children.end()) {
      Node& child = *it->second;
      g = child.reward + cfg_.discount * simulate(next, child, depth + 1, rng);
    } else {
      auto update = model_->update_belief(node.belief, u, z, rng);
      auto child = make_node(std::move(update.belief), update.reward);
      const double tail = rollout(next, child->belief, depth + 1, rng);
      g = update.reward + cfg_.discount * tail;
      node.children.emplace(std::make_pair(u, z), std::move(child));
      ++stats_.expansions;
    }

    ++node.visits;
    ActionStats& a = node.actions[static_cast<std::size_t>(u)];
    ++a.visits;
    a.value = (1.0 - 1.0 / a.visits) * a.value + g / a.visits;
    stats_.record(g);
    return g;
  }

  /// Default policy beyond the tree frontier: 50/50 uniform-random vs the
  /// model's informed action, with a rollout-local belief chain that is
  /// discarded afterwards. Adds no tree nodes.
  double rollout(const State& particle, const Belief& belief, int depth,
                 RandomStream& rng) {
    if (depth >= cfg_.horizon) return 0.0;

    int u;
    if (rng.uniform() < 0.5) {
      u = rng.uniform_int(model_->num_actions());
    } else {
      u = model_->informed_action(particle, belief, rng);
    }
    const State next = model_->sample_transition(particle, u, rng);
    const int z = model_->sample_observation(next, rng);
    auto update = model_->update_belief(belief, u, z, rng);
    return update.reward +
           cfg_.discount * rollout(next, update.belief, depth + 1, rng);
  }

  const Node* root() const { return root_.get(); }
  Node* mutable_root() { return root_.get(); }

  /// Node reached by following `key` from the root; nullptr when absent.
  const Node* find(const HistoryKey& key) const {
    const Node* node = root_.get();
    for (const auto& step : key) {
      if (!node) return nullptr;
      const auto it = node->children.find(step);
      node = it == node->children.end() ? nullptr : it->second.get();
    }
    return node;
  }

  std::size_t tree_size() const { return root_ ? count_nodes(*root_) : 0; }

  const PlannerStats& stats() const { return stats_; }
  const PlannerConfig& config() const { return cfg_; }

 private:
  std::unique_ptr<Node> make_node(Belief belief, double reward) {
    auto node = std::make_unique<Node>();
    node->belief = std::move(belief);
    node->reward = reward;
    node->actions.resize(static_cast<std::size_t>(model_->num_actions()));
    return node;
  }

  static std::size_t sample_index(std::span<const double> weights,
                                  RandomStream& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.size() - 1;
  }

  static std::size_t count_nodes(const Node& node) {
    std::size_t n = 1;
    for (const auto& [key, child] : node.children) n += count_nodes(*child);
    return n;
  }

  const Model* model_;
  PlannerConfig cfg_;
  std::unique_ptr<Node> root_;
  PlannerStats stats_;
};

}  // namespace actrack
