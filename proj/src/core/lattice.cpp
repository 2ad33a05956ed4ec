#include "core/lattice.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace nsp {

Lattice::Lattice(std::int64_t nmax, std::int64_t mmax) : n_max(nmax), m_max(mmax) {
    if (nmax <= 0 || mmax <= 0)
        throw std::invalid_argument("Lattice: cutoffs must be strictly positive");
}

Lattice Lattice::diagonal_complete(std::int64_t nmax, std::int64_t mmax) {
    if (nmax < mmax * mmax)
        throw std::invalid_argument(
            "Lattice::diagonal_complete: n_max must be at least m_max^2");
    return Lattice(nmax, mmax);
}

void FourierField::set(Mode p, Complex z) {
    if (!lattice_.contains(p))
        throw std::out_of_range("FourierField::set: mode outside lattice");
    if (z == Complex{0.0, 0.0})
        coeffs_.erase(p);
    else
        coeffs_[p] = z;
}

void FourierField::add(Mode p, Complex z) {
    if (!lattice_.contains(p))
        throw std::out_of_range("FourierField::add: mode outside lattice");
    auto it = coeffs_.find(p);
    if (it == coeffs_.end()) {
        if (z != Complex{0.0, 0.0}) coeffs_.emplace(p, z);
        return;
    }
    it->second += z;
    if (it->second == Complex{0.0, 0.0}) coeffs_.erase(it);
}

FourierField& FourierField::operator+=(const FourierField& g) {
    for (const auto& [p, z] : g.coeffs_) add(p, z);
    return *this;
}

FourierField& FourierField::operator-=(const FourierField& g) {
    for (const auto& [p, z] : g.coeffs_) add(p, -z);
    return *this;
}

FourierField& FourierField::operator*=(Complex z) {
    if (z == Complex{0.0, 0.0}) {
        coeffs_.clear();
        return *this;
    }
    for (auto& [p, c] : coeffs_) c *= z;
    return *this;
}

FourierField FourierField::rehomed(Lattice lat) const {
    FourierField out(lat);
    for (const auto& [p, z] : coeffs_) out.set(p, z);
    return out;
}

double FourierField::oddness_defect() const {
    double worst = 0.0;
    for (const auto& [p, z] : coeffs_) {
        const Complex partner = at(Mode{p.n, -p.m});
        worst = std::max(worst, std::abs(z + partner));
    }
    return worst;
}

double FourierField::reality_defect() const {
    double worst = 0.0;
    for (const auto& [p, z] : coeffs_) worst = std::max(worst, std::abs(z.imag()));
    return worst;
}

FourierField operator+(FourierField f, const FourierField& g) { return f += g; }
FourierField operator-(FourierField f, const FourierField& g) { return f -= g; }
FourierField operator*(Complex z, FourierField f) { return f *= z; }

NormParams::NormParams(double radius) : r(radius) {
    if (!(radius > 0.0))
        throw std::invalid_argument("NormParams: radius must be positive");
}

double weighted_norm(const FourierField& f, NormParams p) {
    double s = 0.0;
    for (const auto& [q, z] : f.coeffs())
        s += std::abs(z) * std::exp(p.r * double(std::abs(q.n) + std::abs(q.m)));
    return s;
}

FourierField enforce_oddness(const FourierField& f) {
    FourierField out(f.lattice());
    for (const auto& [p, z] : f.coeffs()) {
        if (p.m <= 0) continue;
        out.set(p, z);
        out.set(Mode{p.n, -p.m}, -z);
    }
    return out;
}

namespace {

// Pair convolution P(N,M) = sum over n2+n3 = N, m2+m3 = M of f2 f3.
std::map<Mode, Complex> pair_convolution(const FourierField& f2, const FourierField& f3) {
    std::map<Mode, Complex> out;
    for (const auto& [p2, z2] : f2.coeffs())
        for (const auto& [p3, z3] : f3.coeffs())
            out[Mode{p2.n + p3.n, p2.m + p3.m}] += z2 * z3;
    return out;
}

}  // namespace

FourierField cubic_term(const FourierField& conj_factor, const FourierField& f2,
                        const FourierField& f3, const Lattice& out) {
    if (!(conj_factor.lattice() == f2.lattice() && f2.lattice() == f3.lattice()))
        throw std::invalid_argument("cubic_term: inputs on incompatible lattices");

    const auto pair = pair_convolution(f2, f3);
    FourierField result(out);
    // out(n,m) = sum over pair(N,M) with N - n1 = n, M - m1 = m
    for (const auto& [p1, z1] : conj_factor.coeffs()) {
        const Complex c1 = std::conj(z1);
        for (const auto& [q, w] : pair) {
            const Mode target{q.n - p1.n, q.m - p1.m};
            if (out.contains(target)) result.add(target, c1 * w);
        }
    }
    return result;
}

FourierField pde_residual(const FourierField& u, double eps, const Lattice& out) {
    const double omega = 1.0 + eps;
    FourierField res(out);
    for (const auto& [p, z] : u.coeffs()) {
        if (!out.contains(p)) continue;
        res.add(p, (omega * double(p.n) - double(p.m * p.m)) * z);
    }
    if (eps != 0.0) {
        const FourierField cube = cubic_term(u, u, u, out);
        for (const auto& [p, z] : cube.coeffs()) res.add(p, -eps * z);
    }
    return res;
}

nlohmann::json field_to_json(const FourierField& f) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [p, z] : f.coeffs()) {
        arr.push_back({{"n", p.n}, {"m", p.m}, {"re", z.real()}, {"im", z.imag()}});
    }
    return arr;
}

FourierField field_from_json(const nlohmann::json& j, Lattice lat) {
    if (!j.is_array())
        throw std::invalid_argument("field_from_json: expected an array of records");
    FourierField f(lat);
    for (const auto& rec : j) {
        f.add(Mode{rec.at("n").get<std::int64_t>(), rec.at("m").get<std::int64_t>()},
              Complex{rec.at("re").get<double>(), rec.value("im", 0.0)});
    }
    return f;
}

}  // namespace nsp
