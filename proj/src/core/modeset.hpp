#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "core/rational.hpp"

namespace nsp {

/// The resonant positive wave numbers of an unperturbed wave packet,
/// with the integer invariants N = |set| and M = sum of squares.
class ModeSet {
public:
    /// Validates entries (positive, strictly increasing) and the packet
    /// feasibility/nondegeneracy conditions; throws std::invalid_argument
    /// with the failed check otherwise.
    explicit ModeSet(std::vector<long> m_plus);

    const std::vector<long>& m_plus() const { return m_plus_; }
    long n_count() const { return static_cast<long>(m_plus_.size()); }
    Integer weight() const { return weight_; }  // M = sum m^2 over m_plus

    bool contains(long m) const;
    long max_mode() const { return m_plus_.back(); }

    /// ||a||^2 = M / (4N - 1), exact.
    Rational norm_sq() const;
    /// a_m^2 = 4 ||a||^2 - m^2, exact; throws if m is not a member.
    Rational amplitude_sq(long m) const;

private:
    std::vector<long> m_plus_;
    Integer weight_;
};

/// Everything validate_modeset reports about a candidate list.
struct ModeSetReport {
    std::vector<long> m_plus;
    long n_count = 0;
    Integer weight = 0;
    bool feasible = false;         // max m^2 < 4M/(4N-1), strict
    bool nondegenerate = false;    // 4||a||^2 != j^2 for every integer j outside the set
    bool four_norm_sq_integer = false;  // whether 4M/(4N-1) is an integer at all
    Rational four_norm_sq;         // 4||a||^2
    std::map<long, Rational> amplitude_sq;  // only when feasible
    std::string detail;            // human-readable failure reason, empty when valid

    bool valid() const { return feasible && nondegenerate; }
};

/// Structural errors (non-increasing / non-positive entries) throw;
/// condition failures are reported, not thrown.
ModeSetReport validate_modeset(const std::vector<long>& candidate);

/// Consecutive block {m_N - (N-1), ..., m_N} with m_N = (4N+j)(N-1) and the
/// smallest j in {0,1} making 4M/(4N-1) a non-integer. Requires n_count >= 2.
ModeSet construct_lemma5(long n_count);
/// The j that construct_lemma5 settled on.
int lemma5_chosen_j(long n_count);

/// Smallest m_N such that {m_N - i_{N-1}, ..., m_N - i_1, m_N} is feasible and
/// nondegenerate, for strictly increasing positive gaps of length n_count-1.
ModeSet construct_lemma6(long n_count, const std::vector<long>& gaps);

nlohmann::json modeset_report_json(const ModeSetReport& rep);
nlohmann::json modeset_to_json(const ModeSet& s);
ModeSet modeset_from_json(const nlohmann::json& j);

}  // namespace nsp
