#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace nsp {

/// A Diophantine screen rejected this epsilon (Cantor-set excision), or a
/// divisor fell below the safety threshold mid-computation. Not a solver
/// failure.
class excluded_epsilon : public std::runtime_error {
public:
    excluded_epsilon(std::string condition, std::int64_t n, std::int64_t m,
                     std::int64_t m_prime = 0)
        : std::runtime_error("excluded epsilon: " + condition + " violated at (n=" +
                             std::to_string(n) + ", m=" + std::to_string(m) +
                             (m_prime ? ", m'=" + std::to_string(m_prime) : "") + ")"),
          condition_(std::move(condition)),
          n_(n),
          m_(m),
          m_prime_(m_prime) {}

    const std::string& condition() const { return condition_; }
    std::int64_t n() const { return n_; }
    std::int64_t m() const { return m_; }
    std::int64_t m_prime() const { return m_prime_; }

private:
    std::string condition_;
    std::int64_t n_, m_, m_prime_;
};

}  // namespace nsp
