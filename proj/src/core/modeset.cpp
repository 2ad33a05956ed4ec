#include "core/modeset.hpp"

#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace nsp {

namespace {

Integer sum_of_squares(const std::vector<long>& ms) {
    Integer w = 0;
    for (long m : ms) w += Integer(m) * m;
    return w;
}

void check_structure(const std::vector<long>& ms) {
    if (ms.empty())
        throw std::invalid_argument("mode set: at least one mode required");
    long prev = 0;
    for (long m : ms) {
        if (m <= prev)
            throw std::invalid_argument(
                "mode set: entries must be positive and strictly increasing");
        prev = m;
    }
}

}  // namespace

ModeSetReport validate_modeset(const std::vector<long>& candidate) {
    check_structure(candidate);

    ModeSetReport rep;
    rep.m_plus = candidate;
    rep.n_count = static_cast<long>(candidate.size());
    rep.weight = sum_of_squares(candidate);

    const Rational norm_sq = Rational(rep.weight) / Rational(4 * rep.n_count - 1);
    rep.four_norm_sq = 4 * norm_sq;
    rep.four_norm_sq_integer = denominator(rep.four_norm_sq) == 1;

    // Strict feasibility: every a_m^2 = 4||a||^2 - m^2 must be positive.
    const long worst = candidate.back();
    rep.feasible = rep.four_norm_sq > Rational(Integer(worst) * worst);
    if (!rep.feasible) {
        std::ostringstream os;
        os << "infeasible: max m^2 = " << Integer(worst) * worst
           << " >= 4M/(4N-1) = " << rep.four_norm_sq.str();
        rep.detail = os.str();
        return rep;
    }
    for (long m : candidate) rep.amplitude_sq[m] = rep.four_norm_sq - Rational(Integer(m) * m);

    // Nondegeneracy: 4||a||^2 must not be the square of an integer outside the
    // set (equality inside the set is already ruled out by strict feasibility).
    rep.nondegenerate = true;
    if (rep.four_norm_sq_integer && is_integer_square(rep.four_norm_sq)) {
        const Integer root = boost::multiprecision::sqrt(numerator(rep.four_norm_sq));
        bool member = false;
        for (long m : candidate) member = member || Integer(m) == root;
        if (!member) {
            rep.nondegenerate = false;
            std::ostringstream os;
            os << "degenerate: 4||a||^2 = " << root << "^2 with " << root
               << " outside the set";
            rep.detail = os.str();
        }
    }
    return rep;
}

ModeSet::ModeSet(std::vector<long> m_plus) : m_plus_(std::move(m_plus)) {
    const ModeSetReport rep = validate_modeset(m_plus_);
    if (!rep.valid())
        throw std::invalid_argument("ModeSet: " + rep.detail);
    weight_ = rep.weight;
}

bool ModeSet::contains(long m) const {
    for (long x : m_plus_)
        if (x == m) return true;
    return false;
}

Rational ModeSet::norm_sq() const {
    return Rational(weight_) / Rational(4 * n_count() - 1);
}

Rational ModeSet::amplitude_sq(long m) const {
    if (!contains(m))
        throw std::invalid_argument("ModeSet::amplitude_sq: mode not in the set");
    return 4 * norm_sq() - Rational(Integer(m) * m);
}

namespace {

// Lemma 5 candidate for a given j: consecutive block ending at (4N+j)(N-1).
std::vector<long> lemma5_candidate(long n, int j) {
    const long m_n = (4 * n + j) * (n - 1);
    std::vector<long> ms;
    for (long k = 1; k <= n; ++k) ms.push_back(m_n - (n - k));
    return ms;
}

}  // namespace

int lemma5_chosen_j(long n_count) {
    if (n_count < 2)
        throw std::invalid_argument("construct_lemma5: requires n_count >= 2");
    for (int j = 0; j <= 1; ++j) {
        const auto ms = lemma5_candidate(n_count, j);
        const Integer four_m = 4 * sum_of_squares(ms);
        if (four_m % (4 * n_count - 1) != 0) return j;
    }
    // Lemma 5 guarantees one of j = 0, 1 works.
    throw std::logic_error("construct_lemma5: both j=0 and j=1 give integer 4M/(4N-1)");
}

ModeSet construct_lemma5(long n_count) {
    ModeSet s(lemma5_candidate(n_count, lemma5_chosen_j(n_count)));
    return s;
}

ModeSet construct_lemma6(long n_count, const std::vector<long>& gaps) {
    if (n_count < 2)
        throw std::invalid_argument("construct_lemma6: requires n_count >= 2");
    if (static_cast<long>(gaps.size()) != n_count - 1)
        throw std::invalid_argument("construct_lemma6: need exactly n_count-1 gaps");
    long prev = 0;
    for (long g : gaps) {
        if (g <= prev)
            throw std::invalid_argument(
                "construct_lemma6: gaps must be positive and strictly increasing");
        prev = g;
    }

    // Scan m_N upward. The valid window sits between the roots of two
    // quadratics in m_N; once 4||a||^2 < (m_N+1)^2 fails for good the window
    // is exhausted, so a bounded scan suffices.
    const long widest = gaps.back();
    bool seen_feasible = false;
    for (long m_n = widest + 1;; ++m_n) {
        std::vector<long> ms;
        for (auto it = gaps.rbegin(); it != gaps.rend(); ++it) ms.push_back(m_n - *it);
        ms.push_back(m_n);

        const Integer m_sq = sum_of_squares(ms);
        const Rational four_norm_sq = Rational(4 * m_sq) / Rational(4 * n_count - 1);
        const bool f1 = four_norm_sq > Rational(Integer(m_n) * m_n);
        const bool f2 = four_norm_sq < Rational(Integer(m_n + 1) * (m_n + 1));
        if (f1 && f2) return ModeSet(ms);  // squeezed between consecutive squares

        if (seen_feasible && !f2) {
            // Past the upper edge of the window; Lemma 6 promises we never get
            // here without returning first.
            throw std::logic_error("construct_lemma6: scan exhausted the window");
        }
        seen_feasible = seen_feasible || f1;
        if (m_n > 16 * (n_count + widest) * (n_count + widest) + 64)
            throw std::logic_error("construct_lemma6: no valid m_N found in bound");
    }
}

nlohmann::json modeset_report_json(const ModeSetReport& rep) {
    nlohmann::json amp = nlohmann::json::object();
    for (const auto& [m, q] : rep.amplitude_sq) amp[std::to_string(m)] = q.str();
    return {
        {"m_plus", rep.m_plus},
        {"N", rep.n_count},
        {"M", rep.weight.str()},
        {"four_norm_sq", rep.four_norm_sq.str()},
        {"amplitude_squares", amp},
        {"checks",
         {{"feasible", rep.feasible},
          {"nondegenerate", rep.nondegenerate},
          {"four_norm_sq_is_integer", rep.four_norm_sq_integer},
          {"detail", rep.detail}}},
        {"valid", rep.valid()},
    };
}

nlohmann::json modeset_to_json(const ModeSet& s) {
    return {{"m_plus", s.m_plus()}};
}

ModeSet modeset_from_json(const nlohmann::json& j) {
    std::vector<long> ms;
    if (j.is_array())
        ms = j.get<std::vector<long>>();
    else if (j.is_object() && j.contains("m_plus"))
        ms = j.at("m_plus").get<std::vector<long>>();
    else
        throw std::invalid_argument("modeset_from_json: expected [..] or {\"m_plus\": [..]}");
    return ModeSet(ms);
}

}  // namespace nsp
