#pragma once

#include <cstdint>
#include <vector>

#include "core/amplitudes.hpp"
#include "core/series.hpp"

namespace nsp {

/// A labeled rooted tree of the diagrammatic expansion. `value` is the full
/// product of propagators, node factors and end-point factors below and
/// including this node's exit line; `order` counts the w-nodes.
struct TreeNode {
    enum class Kind { endpoint, w_cubic, w_insertion, v_node };

    Kind kind = Kind::endpoint;
    Mode momentum;            // exit line (n, m)
    bool conj = false;        // exit line occupies its parent's conjugated slot
    double value = 0.0;
    int order = 0;
    long v_lower_mode = 0;    // v_node only: source mode m' of the resonant block
    std::vector<TreeNode> children;

    bool exit_is_w() const { return kind == Kind::w_cubic || kind == Kind::w_insertion; }
};

/// All labeled trees of the given order (0 <= k <= 3), every exit momentum.
/// Slot order is (conjugated, plus, plus); distinct slot assignments are
/// distinct trees, which matches the ordered sums of the recursion.
std::vector<TreeNode> enumerate_trees(int k, const AmplitudeVector& av,
                                      const FrequencyState& fs);

/// sum of Val(theta) over trees of order k with root momentum (n, m).
double tree_oracle(int k, std::int64_t n, std::int64_t m, const AmplitudeVector& av,
                   const FrequencyState& fs);

enum class SelfEnergyType { none, type_a, type_b };

/// Classify the two-external-line subgraph spanned by the exit line of the
/// node at `outer_path` and the line of the strict descendant at `inner_path`
/// (paths are child-index sequences from the root; outer must be a proper
/// prefix of inner). Throws std::invalid_argument on malformed candidates.
SelfEnergyType detect_self_energy(const TreeNode& root,
                                  const std::vector<int>& outer_path,
                                  const std::vector<int>& inner_path);

struct SelfEnergyCensus {
    std::int64_t candidates = 0;  // pairs of w-exit ancestor / w-line descendant
    std::int64_t type_a = 0;
    std::int64_t type_b = 0;
};

/// Count self-energy subgraphs over all candidate pairs of one tree.
SelfEnergyCensus self_energy_census(const TreeNode& root);

}  // namespace nsp
