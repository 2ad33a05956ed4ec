#include "core/tree.hpp"

#include <cmath>
#include <stdexcept>

#include "core/errors.hpp"

namespace nsp {

namespace {

class TreeEnumerator {
public:
    TreeEnumerator(const AmplitudeVector& av, const FrequencyState& fs)
        : av_(av), fs_(fs) {
        const LinearizationMatrix lm = build_linearization(av, av.modeset().max_mode());
        d_inv_ = invert_resonant_block(lm);
        modes_ = av.modeset().m_plus();
    }

    const std::vector<TreeNode>& order(int k) {
        while (static_cast<int>(by_order_.size()) <= k) grow();
        return by_order_[k];
    }

private:
    void grow() {
        const int k = static_cast<int>(by_order_.size());
        std::vector<TreeNode> out;
        if (k == 0) {
            for (long m : modes_) {
                for (int sign : {+1, -1}) {
                    TreeNode e;
                    e.kind = TreeNode::Kind::endpoint;
                    e.momentum = Mode{m * m, sign * m};
                    e.value = sign * av_.a(m);
                    out.push_back(e);
                }
            }
            by_order_.push_back(std::move(out));
            return;
        }

        // w-exits first: trivalent nodes over orders summing to k-1, and
        // counterterm insertions on order k-1 w-lines.
        std::vector<TreeNode> w_part;
        for (int k1 = 0; k1 <= k - 1; ++k1)
            for (int k2 = 0; k2 + k1 <= k - 1; ++k2) {
                const int k3 = (k - 1) - k1 - k2;
                for (const TreeNode& t1 : by_order_[k1])
                    for (const TreeNode& t2 : by_order_[k2])
                        for (const TreeNode& t3 : by_order_[k3]) {
                            const Mode p{-t1.momentum.n + t2.momentum.n + t3.momentum.n,
                                         -t1.momentum.m + t2.momentum.m + t3.momentum.m};
                            if (is_diagonal(p)) continue;
                            const double d =
                                fs_.omega * double(p.n) - fs_.omega_tilde_sq(p.m);
                            if (d == 0.0)
                                throw excluded_epsilon("first Melnikov condition", p.n, p.m);
                            TreeNode node;
                            node.kind = TreeNode::Kind::w_cubic;
                            node.momentum = p;
                            node.order = k;
                            node.value = (fs_.eps / d) * t1.value * t2.value * t3.value;
                            node.children = {t1, t2, t3};
                            node.children[0].conj = true;
                            w_part.push_back(std::move(node));
                        }
            }
        for (const TreeNode& t : by_order_[k - 1]) {
            if (!t.exit_is_w()) continue;
            const Mode p = t.momentum;
            struct Insertion { Mode exit; double factor; };
            const Insertion variants[2] = {
                {p, fs_.nu_a_at(p.m)},
                {Mode{p.n, -p.m}, fs_.nu_b_at(p.m)},
            };
            for (const auto& ins : variants) {
                if (ins.factor == 0.0) continue;
                const double d =
                    fs_.omega * double(ins.exit.n) - fs_.omega_tilde_sq(ins.exit.m);
                if (d == 0.0)
                    throw excluded_epsilon("first Melnikov condition", ins.exit.n,
                                           ins.exit.m);
                TreeNode node;
                node.kind = TreeNode::Kind::w_insertion;
                node.momentum = ins.exit;
                node.order = k;
                node.value = (ins.factor / d) * t.value;
                node.children = {t};
                w_part.push_back(std::move(node));
            }
        }

        // v-exits: trivalent nodes with children orders summing to k; the
        // order-k slot can only hold a w-exit built above. The starred rule
        // drops all-diagonal children with fewer than two positive orders.
        std::vector<TreeNode> v_part;
        auto pool = [&](int j) -> const std::vector<TreeNode>& {
            return j == k ? w_part : by_order_[j];
        };
        const double four_norm_sq = 4.0 * av_.norm_sq();
        for (int k1 = 0; k1 <= k; ++k1)
            for (int k2 = 0; k2 + k1 <= k; ++k2) {
                const int k3 = k - k1 - k2;
                for (const TreeNode& t1 : pool(k1))
                    for (const TreeNode& t2 : pool(k2))
                        for (const TreeNode& t3 : pool(k3)) {
                            const bool all_diagonal = !t1.exit_is_w() &&
                                                      !t2.exit_is_w() && !t3.exit_is_w();
                            if (all_diagonal &&
                                (k1 > 0) + (k2 > 0) + (k3 > 0) < 2)
                                continue;
                            const Mode p{-t1.momentum.n + t2.momentum.n + t3.momentum.n,
                                         -t1.momentum.m + t2.momentum.m + t3.momentum.m};
                            if (!is_diagonal(p) || p.m == 0) continue;
                            const double prod = t1.value * t2.value * t3.value;
                            const long am = std::labs(p.m);
                            if (av_.modeset().contains(am)) {
                                // The folded resonant block is sourced by the
                                // positive-m star sums only; negative-sum
                                // triples are their odd mirrors and would be
                                // counted twice.
                                if (p.m < 0) continue;
                                const long src_idx = index_of(am);
                                for (long i = 0;
                                     i < static_cast<long>(modes_.size()); ++i)
                                    for (int sign : {+1, -1}) {
                                        TreeNode node;
                                        node.kind = TreeNode::Kind::v_node;
                                        node.momentum =
                                            Mode{modes_[i] * modes_[i], sign * modes_[i]};
                                        node.order = k;
                                        node.v_lower_mode = am;
                                        node.value = sign * d_inv_(i, src_idx) * prod;
                                        node.children = {t1, t2, t3};
                                        node.children[0].conj = true;
                                        v_part.push_back(std::move(node));
                                    }
                            } else {
                                TreeNode node;
                                node.kind = TreeNode::Kind::v_node;
                                node.momentum = p;
                                node.order = k;
                                node.v_lower_mode = p.m;
                                node.value =
                                    prod / (double(p.m) * p.m - four_norm_sq);
                                node.children = {t1, t2, t3};
                                node.children[0].conj = true;
                                v_part.push_back(std::move(node));
                            }
                        }
            }

        std::vector<TreeNode> merged = std::move(w_part);
        merged.insert(merged.end(), v_part.begin(), v_part.end());
        by_order_.push_back(std::move(merged));
    }

    long index_of(long m) const {
        for (long i = 0; i < static_cast<long>(modes_.size()); ++i)
            if (modes_[i] == m) return i;
        throw std::logic_error("TreeEnumerator: mode not in set");
    }

    const AmplitudeVector& av_;
    const FrequencyState& fs_;
    Eigen::MatrixXd d_inv_;
    std::vector<long> modes_;
    std::vector<std::vector<TreeNode>> by_order_;
};

}  // namespace

std::vector<TreeNode> enumerate_trees(int k, const AmplitudeVector& av,
                                      const FrequencyState& fs) {
    if (k < 0 || k > 3)
        throw std::invalid_argument(
            "enumerate_trees: order must be in [0, 3] (enumeration is exponential)");
    TreeEnumerator en(av, fs);
    return en.order(k);
}

double tree_oracle(int k, std::int64_t n, std::int64_t m, const AmplitudeVector& av,
                   const FrequencyState& fs) {
    const auto trees = enumerate_trees(k, av, fs);
    double total = 0.0;
    for (const TreeNode& t : trees)
        if (t.momentum.n == n && t.momentum.m == m) total += t.value;
    return total;
}

namespace {

const TreeNode* walk(const TreeNode& root, const std::vector<int>& path) {
    const TreeNode* node = &root;
    for (int idx : path) {
        if (idx < 0 || idx >= static_cast<int>(node->children.size())) return nullptr;
        node = &node->children[idx];
    }
    return node;
}

}  // namespace

SelfEnergyType detect_self_energy(const TreeNode& root,
                                  const std::vector<int>& outer_path,
                                  const std::vector<int>& inner_path) {
    if (inner_path.size() <= outer_path.size() ||
        !std::equal(outer_path.begin(), outer_path.end(), inner_path.begin()))
        throw std::invalid_argument(
            "detect_self_energy: inner line must hang strictly below the outer line");
    const TreeNode* outer = walk(root, outer_path);
    const TreeNode* inner = walk(root, inner_path);
    if (outer == nullptr || inner == nullptr)
        throw std::invalid_argument("detect_self_energy: path outside the tree");

    // Parity of conjugation marks on the lines from the inner line up to (and
    // excluding) the outer line.
    int sigma = 1;
    const TreeNode* node = &root;
    std::vector<const TreeNode*> chain;  // nodes along inner_path below outer
    for (std::size_t i = 0; i < inner_path.size(); ++i) {
        node = &node->children[inner_path[i]];
        if (i >= outer_path.size()) chain.push_back(node);
    }
    for (const TreeNode* t : chain)
        if (t->conj) sigma = -sigma;

    const std::int64_t n_t = outer->momentum.n - sigma * inner->momentum.n;
    const std::int64_t m_t = outer->momentum.m - sigma * inner->momentum.m;
    if (n_t != 0) return SelfEnergyType::none;
    if (m_t == 0) return SelfEnergyType::type_a;
    if (m_t == 2 * outer->momentum.m) return SelfEnergyType::type_b;
    return SelfEnergyType::none;
}

namespace {

void collect_w_paths(const TreeNode& node, std::vector<int>& path,
                     std::vector<std::vector<int>>& out) {
    if (node.exit_is_w()) out.push_back(path);
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        path.push_back(static_cast<int>(i));
        collect_w_paths(node.children[i], path, out);
        path.pop_back();
    }
}

}  // namespace

SelfEnergyCensus self_energy_census(const TreeNode& root) {
    std::vector<std::vector<int>> w_paths;
    std::vector<int> scratch;
    collect_w_paths(root, scratch, w_paths);

    SelfEnergyCensus out;
    for (const auto& outer : w_paths)
        for (const auto& inner : w_paths) {
            if (inner.size() <= outer.size()) continue;
            if (!std::equal(outer.begin(), outer.end(), inner.begin())) continue;
            out.candidates++;
            switch (detect_self_energy(root, outer, inner)) {
                case SelfEnergyType::type_a: out.type_a++; break;
                case SelfEnergyType::type_b: out.type_b++; break;
                case SelfEnergyType::none: break;
            }
        }
    return out;
}

}  // namespace nsp
