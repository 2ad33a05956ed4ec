#include "core/series.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "core/errors.hpp"

namespace nsp {

FrequencyState FrequencyState::bare(double eps) {
    FrequencyState fs;
    fs.eps = eps;
    fs.omega = 1.0 + eps;
    return fs;
}

FrequencyState FrequencyState::with_nu(double eps, std::map<long, double> nu) {
    FrequencyState fs = bare(eps);
    fs.nu_a = nu;
    fs.nu = std::move(nu);
    return fs;
}

FrequencyState FrequencyState::with_split(double eps, std::map<long, double> nu_a,
                                          std::map<long, double> nu_b) {
    FrequencyState fs = bare(eps);
    fs.nu_a = std::move(nu_a);
    fs.nu_b = std::move(nu_b);
    for (const auto& [m, v] : fs.nu_a) fs.nu[m] = v;
    for (const auto& [m, v] : fs.nu_b) fs.nu[m] -= v;
    for (auto it = fs.nu.begin(); it != fs.nu.end();)
        it = it->second == 0.0 ? fs.nu.erase(it) : std::next(it);
    return fs;
}

namespace {
double map_at(const std::map<long, double>& m, long key) {
    auto it = m.find(std::abs(key));
    return it == m.end() ? 0.0 : it->second;
}
}  // namespace

double FrequencyState::nu_at(long m) const { return map_at(nu, m); }
double FrequencyState::nu_a_at(long m) const { return map_at(nu_a, m); }
double FrequencyState::nu_b_at(long m) const { return map_at(nu_b, m); }

double FrequencyState::c3_estimate() const {
    double worst = 0.0;
    for (const auto& [m, v] : nu) worst = std::max(worst, std::abs(v));
    return eps > 0.0 ? worst / eps : 0.0;
}

double propagator(std::int64_t n, std::int64_t m, const FrequencyState& fs,
                  const AmplitudeVector* av) {
    if (n == m * m) {
        if (av == nullptr)
            throw std::invalid_argument(
                "propagator: diagonal point needs the amplitude context");
        const auto& set = av->modeset();
        if (set.contains(std::labs(m))) {
            if (set.n_count() != 1)
                throw std::invalid_argument(
                    "propagator: resonant block of a multi-mode set is a matrix; "
                    "use the series engine");
            return -1.0 / (2.0 * double(m) * m);
        }
        const double denom = double(m) * m - 4.0 * av->norm_sq();
        if (denom == 0.0)
            throw excluded_epsilon("Q nondegeneracy", n, m);
        return 1.0 / denom;
    }
    const double d = fs.omega * double(n) - fs.omega_tilde_sq(m);
    if (d == 0.0) throw excluded_epsilon("first Melnikov condition", n, m);
    return 1.0 / d;
}

SeriesLadder::SeriesLadder(AmplitudeVector av, FrequencyState fs, int max_order)
    : av_(std::move(av)),
      fs_(fs),
      max_order_(max_order),
      lattice_((2 * std::int64_t(max_order) + 1) * av_.modeset().max_mode() *
                   av_.modeset().max_mode(),
               (2 * std::int64_t(max_order) + 1) * av_.modeset().max_mode()) {
    if (max_order < 0) throw std::invalid_argument("SeriesLadder: negative max_order");
    const LinearizationMatrix lm = build_linearization(av_, av_.modeset().max_mode());
    resonant_inverse_ = invert_resonant_block(lm);
    per_k_.push_back(av_.packet(lattice_));
}

void SeriesLadder::extend_to(int k) {
    while (order() < k) extend();
}

void SeriesLadder::extend() {
    const int k = order() + 1;
    if (k > max_order_)
        throw std::invalid_argument("SeriesLadder::extend: past max_order; rebuild with a larger bound");

    const auto& modes = av_.modeset().m_plus();

    // Cubic term at order k-1: sum over k1+k2+k3 = k-1 of the triple
    // convolution with the first slot conjugated.
    FourierField cubic_prev(lattice_);
    for (int k1 = 0; k1 <= k - 1; ++k1)
        for (int k2 = 0; k2 + k1 <= k - 1; ++k2) {
            const int k3 = (k - 1) - k1 - k2;
            cubic_prev += cubic_term(per_k_[k1], per_k_[k2], per_k_[k3], lattice_);
        }

    // Off-diagonal update: w^(k) = g(n,m) (nu_a w^(k-1)_{n,m} + nu_b w^(k-1)_{n,-m}
    //                                       + eps [cubic]^(k-1)_{n,m}).
    FourierField w_k(lattice_);
    const FourierField& prev = per_k_[k - 1];
    auto counterterm = [&](Mode p) -> Complex {
        Complex t = 0.0;
        if (!is_diagonal(p)) {
            t += fs_.nu_a_at(p.m) * prev.at(p);
            t += fs_.nu_b_at(p.m) * prev.at(Mode{p.n, -p.m});
        }
        return t;
    };
    std::map<Mode, Complex> w_rhs;
    for (const auto& [p, z] : cubic_prev.coeffs())
        if (!is_diagonal(p)) w_rhs[p] += fs_.eps * z;
    for (const auto& [p, z] : prev.coeffs()) {
        if (is_diagonal(p)) continue;
        const Complex t = counterterm(p);
        if (t != Complex{0.0, 0.0}) w_rhs[p] += t;
    }
    for (const auto& [p, z] : w_rhs) {
        if (z == Complex{0.0, 0.0}) continue;
        const double d = fs_.omega * double(p.n) - fs_.omega_tilde_sq(p.m);
        if (d == 0.0) throw excluded_epsilon("first Melnikov condition", p.n, p.m);
        if (std::abs(d) < min_divisor_) {
            min_divisor_ = std::abs(d);
            min_divisor_mode_ = p;
        }
        w_k.set(p, z / d);
    }

    // Diagonal update at order k. The starred sum runs over k1+k2+k3 = k and
    // excludes all-diagonal terms with fewer than two positive labels; order-k
    // slots therefore contribute only through w^(k), which is already known.
    FourierField star(lattice_);
    for (int k1 = 0; k1 <= k; ++k1)
        for (int k2 = 0; k2 + k1 <= k; ++k2) {
            const int k3 = k - k1 - k2;
            const FourierField& f1 = (k1 == k) ? w_k : per_k_[k1];
            const FourierField& f2 = (k2 == k) ? w_k : per_k_[k2];
            const FourierField& f3 = (k3 == k) ? w_k : per_k_[k3];
            const FourierField conv = cubic_term(f1, f2, f3, lattice_);
            for (const auto& [p, z] : conv.coeffs())
                if (is_diagonal(p)) star.add(p, z);
        }

    FourierField u_k = w_k;
    // Resonant block: V on the set modes through the inverse linearization.
    {
        const long n_res = static_cast<long>(modes.size());
        Eigen::VectorXd s(n_res);
        for (long i = 0; i < n_res; ++i)
            s(i) = star.at(modes[i] * modes[i], modes[i]).real();
        const Eigen::VectorXd v = resonant_inverse_ * s;
        for (long i = 0; i < n_res; ++i) {
            const long m = modes[i];
            if (v(i) == 0.0) continue;
            u_k.add(Mode{m * m, m}, Complex{v(i), 0.0});
            u_k.add(Mode{m * m, -m}, Complex{-v(i), 0.0});
        }
    }
    // Non-resonant diagonal: scalar denominators m^2 - 4||a||^2.
    const double four_norm_sq = 4.0 * av_.norm_sq();
    for (const auto& [p, z] : star.coeffs()) {
        if (p.m == 0 || av_.modeset().contains(std::labs(p.m))) continue;
        u_k.add(p, z / (double(p.m) * p.m - four_norm_sq));
    }

    per_k_.push_back(std::move(u_k));
}

FourierField SeriesLadder::sum(double mu) const {
    FourierField total(lattice_);
    double mu_k = 1.0;
    for (const auto& u_k : per_k_) {
        for (const auto& [p, z] : u_k.coeffs()) total.add(p, mu_k * z);
        mu_k *= mu;
    }
    return total;
}

int divisor_scale(double absdiv, double c0) {
    if (absdiv > c0) return -1;
    if (!(absdiv > 0.0)) return std::numeric_limits<int>::max();  // exact resonance
    int h = 0;
    while (absdiv <= std::ldexp(c0, -h - 1)) ++h;
    return h;
}

int scale_threshold_h0(double eps, double c0) {
    const double x = 16.0 * c0 / std::sqrt(eps);
    int h0 = static_cast<int>(std::floor(std::log2(x)));
    while (std::ldexp(1.0, h0) >= x) --h0;
    while (std::ldexp(1.0, h0 + 1) < x) ++h0;
    return h0;
}

ScaleAssignment assign_scales(const Lattice& lat, const FrequencyState& fs, double c0) {
    if (!(fs.eps > 0.0))
        throw std::invalid_argument("assign_scales: eps must be positive");
    ScaleAssignment sa;
    sa.h0 = scale_threshold_h0(fs.eps, c0);
    const double quarter_eps_inv = 1.0 / (4.0 * fs.eps);
    for (std::int64_t n = -lat.n_max; n <= lat.n_max; ++n) {
        for (std::int64_t m = 0; m <= lat.m_max; ++m) {
            if (n == m * m) continue;
            const double d = std::abs(fs.omega * double(n) - fs.omega_tilde_sq(m));
            sa.histogram[divisor_scale(d, c0)]++;
            if (d < 0.5 && std::min(double(n), double(m) * m) <= quarter_eps_inv) {
                sa.lemma1_ok = false;
                if (sa.lemma1_violations.size() < 32)
                    sa.lemma1_violations.push_back(Mode{n, m});
            }
        }
    }
    return sa;
}

std::map<int, std::int64_t> ladder_scale_histogram(const SeriesLadder& ladder, double c0) {
    std::map<Mode, int> seen;
    const FrequencyState& fs = ladder.frequency();
    for (int k = 0; k <= ladder.order(); ++k)
        for (const auto& [p, z] : ladder.coeff(k).coeffs()) {
            if (is_diagonal(p) || seen.count(p)) continue;
            const double d = std::abs(fs.omega * double(p.n) - fs.omega_tilde_sq(p.m));
            seen[p] = divisor_scale(d, c0);
        }
    std::map<int, std::int64_t> hist;
    for (const auto& [p, h] : seen) hist[h]++;
    return hist;
}

nlohmann::json series_report_json(const SeriesLadder& ladder, bool dump_coefficients) {
    const NormParams norm_r(0.05);
    nlohmann::json per_order = nlohmann::json::array();
    for (int k = 0; k <= ladder.order(); ++k) {
        const auto& f = ladder.coeff(k);
        nlohmann::json entry = {{"k", k},
                                {"support", f.support_size()},
                                {"norm", weighted_norm(f, norm_r)},
                                {"oddness_defect", f.oddness_defect()}};
        if (dump_coefficients) entry["coefficients"] = field_to_json(f);
        per_order.push_back(entry);
    }

    nlohmann::json hist = nlohmann::json::object();
    for (const auto& [h, c] : ladder_scale_histogram(ladder)) hist[std::to_string(h)] = c;

    const bool finite_min = std::isfinite(ladder.min_abs_divisor());
    return {
        {"modeset", modeset_to_json(ladder.amplitudes().modeset())},
        {"eps", ladder.frequency().eps},
        {"order", ladder.order()},
        {"norm_radius", norm_r.r},
        {"per_order", per_order},
        {"min_abs_divisor", finite_min ? nlohmann::json(ladder.min_abs_divisor())
                                       : nlohmann::json()},
        {"min_divisor_mode",
         {{"n", ladder.min_divisor_mode().n}, {"m", ladder.min_divisor_mode().m}}},
        {"scale_histogram", hist},
        {"h0", ladder.frequency().eps > 0.0
                   ? nlohmann::json(scale_threshold_h0(ladder.frequency().eps, 0.5))
                   : nlohmann::json()},
    };
}

}  // namespace nsp
