#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <stdexcept>
#include <vector>

namespace nsp {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) {
    return static_cast<double>(q);
}

inline long double to_long_double(const Rational& q) {
    return q.convert_to<long double>();
}

inline std::string rational_string(const Rational& q) {
    return q.str();
}

/// True when q is the square of an integer.
inline bool is_integer_square(const Rational& q) {
    if (q < 0 || denominator(q) != 1) return false;
    const Integer n = numerator(q);
    const Integer r = boost::multiprecision::sqrt(n);
    return r * r == n;
}

// Exact linear combinations of square-root monomials sqrt(prod_{m in S} s_m),
// where s_m are fixed positive rationals (the amplitude squares a_m^2).
// Values are kept as a map from the odd-exponent mode subset S to a rational
// coefficient; multiplying two monomials folds the shared modes back into the
// coefficient through the table of squares. Distinct subsets are linearly
// independent over Q whenever the products of the s_m are not perfect squares,
// which holds for the mode sets used here; zero testing therefore reduces to
// all coefficients vanishing.
class RadicalSum {
public:
    using Key = std::vector<long>;  // sorted modes with odd exponent

    RadicalSum() = default;

    static RadicalSum rational(const Rational& q) {
        RadicalSum r;
        if (q != 0) r.terms_[{}] = q;
        return r;
    }

    /// coeff * a_m  (a single square-root factor)
    static RadicalSum radical(long m, const Rational& coeff = 1) {
        RadicalSum r;
        if (coeff != 0) r.terms_[{m}] = coeff;
        return r;
    }

    bool is_zero() const { return terms_.empty(); }

    RadicalSum& operator+=(const RadicalSum& other) {
        for (const auto& [key, c] : other.terms_) {
            auto it = terms_.find(key);
            if (it == terms_.end()) {
                terms_.emplace(key, c);
            } else {
                it->second += c;
                if (it->second == 0) terms_.erase(it);
            }
        }
        return *this;
    }

    RadicalSum operator-() const {
        RadicalSum r = *this;
        for (auto& [key, c] : r.terms_) c = -c;
        return r;
    }

    RadicalSum& scale(const Rational& q) {
        if (q == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [key, c] : terms_) c *= q;
        return *this;
    }

    /// Product; `squares` maps m -> a_m^2 and must cover every mode used.
    static RadicalSum mul(const RadicalSum& x, const RadicalSum& y,
                          const std::map<long, Rational>& squares) {
        RadicalSum out;
        for (const auto& [kx, cx] : x.terms_) {
            for (const auto& [ky, cy] : y.terms_) {
                Rational c = cx * cy;
                Key merged;
                // symmetric difference of the keys; shared modes contribute a_m^2
                std::size_t i = 0, j = 0;
                while (i < kx.size() && j < ky.size()) {
                    if (kx[i] == ky[j]) {
                        auto it = squares.find(kx[i]);
                        if (it == squares.end())
                            throw std::invalid_argument("RadicalSum::mul: mode missing from squares table");
                        c *= it->second;
                        ++i;
                        ++j;
                    } else if (kx[i] < ky[j]) {
                        merged.push_back(kx[i++]);
                    } else {
                        merged.push_back(ky[j++]);
                    }
                }
                for (; i < kx.size(); ++i) merged.push_back(kx[i]);
                for (; j < ky.size(); ++j) merged.push_back(ky[j]);
                RadicalSum term;
                term.terms_[std::move(merged)] = c;
                out += term;
            }
        }
        return out;
    }

    /// Numeric value given sqrt table values; for tests and reporting.
    double value(const std::map<long, double>& roots) const {
        double v = 0.0;
        for (const auto& [key, c] : terms_) {
            double prod = to_double(c);
            for (long m : key) prod *= roots.at(m);
            v += prod;
        }
        return v;
    }

    const std::map<Key, Rational>& terms() const { return terms_; }

private:
    std::map<Key, Rational> terms_;
};

}  // namespace nsp
