#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace nsp {

using Complex = std::complex<double>;

/// A point (n, m) on the time x space frequency lattice.
struct Mode {
    std::int64_t n = 0;
    std::int64_t m = 0;
    auto operator<=>(const Mode&) const = default;
};

inline bool is_diagonal(Mode p) { return p.n == p.m * p.m; }

/// Truncation box |n| <= n_max, |m| <= m_max.
struct Lattice {
    std::int64_t n_max = 0;
    std::int64_t m_max = 0;

    Lattice(std::int64_t nmax, std::int64_t mmax);

    /// A box that must hold every diagonal mode n = m^2 up to m_max.
    static Lattice diagonal_complete(std::int64_t nmax, std::int64_t mmax);

    bool contains(Mode p) const {
        return p.n >= -n_max && p.n <= n_max && p.m >= -m_max && p.m <= m_max;
    }
    bool operator==(const Lattice&) const = default;
};

/// Sparse complex coefficient map supported inside a lattice box.
/// Exact zeros are never stored.
class FourierField {
public:
    explicit FourierField(Lattice lat) : lattice_(lat) {}

    const Lattice& lattice() const { return lattice_; }
    const std::map<Mode, Complex>& coeffs() const { return coeffs_; }
    std::size_t support_size() const { return coeffs_.size(); }

    Complex at(Mode p) const {
        auto it = coeffs_.find(p);
        return it == coeffs_.end() ? Complex{0.0, 0.0} : it->second;
    }
    Complex at(std::int64_t n, std::int64_t m) const { return at(Mode{n, m}); }

    /// Assign a coefficient; the mode must lie inside the lattice.
    void set(Mode p, Complex z);
    void add(Mode p, Complex z);

    FourierField& operator+=(const FourierField& g);
    FourierField& operator-=(const FourierField& g);
    FourierField& operator*=(Complex z);

    /// Copy onto another (usually larger) lattice; throws if support does not fit.
    FourierField rehomed(Lattice lat) const;

    /// max |f(n,m) + f(n,-m)|: zero for fields odd in m.
    double oddness_defect() const;
    /// max |Im f(n,m)| over the support.
    double reality_defect() const;

private:
    Lattice lattice_;
    std::map<Mode, Complex> coeffs_;
};

FourierField operator+(FourierField f, const FourierField& g);
FourierField operator-(FourierField f, const FourierField& g);
FourierField operator*(Complex z, FourierField f);

struct NormParams {
    double r;
    explicit NormParams(double radius);
};

/// sum over the support of |f_{n,m}| e^{r(|n|+|m|)}.
double weighted_norm(const FourierField& f, NormParams p);

/// Antisymmetrize in m with the m > 0 value as master:
/// out(n,m) = f(n,m), out(n,-m) = -f(n,m) for m > 0, and out(n,0) = 0.
FourierField enforce_oddness(const FourierField& f);

/// Triple convolution with the first factor conjugated and momentum-negated:
///   out_{n,m} = sum over -n1+n2+n3 = n, -m1+m2+m3 = m of
///               conj(f1_{n1,m1}) f2_{n2,m2} f3_{n3,m3},
/// truncated to `out`. All inputs must share one lattice.
FourierField cubic_term(const FourierField& conj_factor, const FourierField& f2,
                        const FourierField& f3, const Lattice& out);

/// Per-mode residual (omega n - m^2) u_{n,m} - eps [|u|^2 u]_{n,m} with
/// omega = 1 + eps, evaluated on `out`.
FourierField pde_residual(const FourierField& u, double eps, const Lattice& out);

/// JSON array of {n, m, re, im} records ordered by (n, m).
nlohmann::json field_to_json(const FourierField& f);
FourierField field_from_json(const nlohmann::json& j, Lattice lat);

}  // namespace nsp
