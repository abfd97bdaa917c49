#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "swlab/closmodel.hpp"

namespace swlab {

struct Edge {
  int left = 0;
  int right = 0;
};

// Multigraph: parallel edges are distinct instances with stable ids.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;
  BipartiteGraph(int left_count, int right_count);

  int add_edge(int left, int right);

  int left_count() const { return left_count_; }
  int right_count() const { return right_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const Edge& edge(int id) const { return edges_[id]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& left_edges(int v) const { return left_adj_[v]; }

  int left_degree(int v) const { return static_cast<int>(left_adj_[v].size()); }
  int right_degree(int v) const;
  // Common degree when every vertex on both sides has it, otherwise -1.
  int regular_degree() const;

 private:
  int left_count_ = 0;
  int right_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> left_adj_;
};

struct HallVerdict {
  bool satisfied = true;
  std::vector<int> violating_set;  // A with |N(A)| < |A|
  std::vector<int> neighborhood;   // N(A)
};

HallVerdict hall_check(const BipartiteGraph& g);

struct Matching {
  std::vector<int> edge_of_left;  // edge id or -1
  std::vector<int> mate_of_left;  // right vertex or -1
  int size = 0;
  bool complete = false;
  std::vector<int> hall_violator;  // set when incomplete
};

// Maximum matching by Hopcroft-Karp. `usable` masks edge ids when non-empty.
Matching complete_matching(const BipartiteGraph& g, const std::vector<bool>& usable = {});

struct EdgeColoring {
  std::vector<int> color_of;  // indexed by edge id
  int colors_used = 0;
};

EdgeColoring edge_color(const BipartiteGraph& g, int colors);
bool is_proper_coloring(const BipartiteGraph& g, const EdgeColoring& c);

struct CallRequest {
  int source = 0;
  int destination = 0;
};

// Requests may cover only part of the ports; they are padded to a full
// permutation internally so the module graph is n-regular.
std::vector<RoutingTag> clos_route_assignment(const ClosSpec& spec,
                                              std::span<const CallRequest> requests);

// Independent validity test for a tag set: tag consistent with destination,
// central modules distinct per input module and per output module.
bool is_nonblocking_assignment(const ClosSpec& spec, std::span<const CallRequest> requests,
                               std::span<const RoutingTag> tags, std::string* why = nullptr);

std::vector<CallRequest> requests_from_permutation(std::span<const int> perm);

// Benes outer stage: x_i = 0 sends request i through the upper subnetwork.
struct BenesConstraintSystem {
  int size = 0;
  std::vector<std::pair<int, int>> input_pairs;   // inputs sharing a first-stage switch
  std::vector<std::pair<int, int>> output_pairs;  // requests sharing a last-stage switch
};

BenesConstraintSystem benes_constraints(std::span<const int> perm);
int unsatisfied_constraints(const BenesConstraintSystem& sys, std::span<const int> x);

struct FlipResult {
  std::vector<int> x;
  int flips = 0;
  int cycles = 0;
  int initially_unsatisfied = 0;            // output constraints violated by 0,1,0,1,...
  bool even_unsatisfied_per_cycle = true;   // checked at initialization
};

FlipResult benes_flip_assign(std::span<const int> perm);

struct ComponentCount {
  int components = 0;
  std::uint64_t solutions = 0;  // 2^components
};

ComponentCount count_components(const BenesConstraintSystem& sys);
std::uint64_t count_solutions_exhaustive(const BenesConstraintSystem& sys);

// Flattened Benes network: 2 log2 N - 1 stages of N/2 two-by-two switches.
// settings[stage][switch] is true for the cross state.
struct BenesSettings {
  int size = 0;
  std::vector<std::vector<bool>> settings;
};

BenesSettings benes_full_assign(std::span<const int> perm);

struct BenesWalk {
  std::vector<int> realized;  // input -> output
  bool link_conflict = false;
};

// Walks every input through the stage-by-stage wiring.
BenesWalk walk_benes(const BenesSettings& s);

}  // namespace swlab
