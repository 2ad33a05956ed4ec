#include "core/amplitudes.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace nsp {

AmplitudeVector::AmplitudeVector(ModeSet s) : modeset_(std::move(s)) {
    for (long m : modeset_.m_plus()) {
        const Rational sq = modeset_.amplitude_sq(m);
        if (sq <= 0)
            throw std::invalid_argument("AmplitudeVector: infeasible mode set");
        a_sq_[m] = sq;
        a_[m] = std::sqrt(to_double(sq));
    }
    norm_sq_double_ = to_double(modeset_.norm_sq());
}

double AmplitudeVector::a(long m) const {
    auto it = a_.find(m);
    if (it == a_.end())
        throw std::invalid_argument("AmplitudeVector::a: mode not in the set");
    return it->second;
}

const Rational& AmplitudeVector::a_sq(long m) const {
    auto it = a_sq_.find(m);
    if (it == a_sq_.end())
        throw std::invalid_argument("AmplitudeVector::a_sq: mode not in the set");
    return it->second;
}

FourierField AmplitudeVector::packet(const Lattice& lat) const {
    FourierField v0(lat);
    for (const auto& [m, amp] : a_) {
        v0.set(Mode{m * m, m}, Complex{amp, 0.0});
        v0.set(Mode{m * m, -m}, Complex{-amp, 0.0});
    }
    return v0;
}

AmplitudeVector solve_amplitudes(const ModeSet& s) { return AmplitudeVector(s); }

std::map<long, double> q_residual_eps0(const AmplitudeVector& av) {
    // Brute-force triple sum over the 2N-point packet. Amplitudes of the wide
    // Lemma-5/6 sets reach ~m_N/2, so the convolution terms are ~m_N^3 and a
    // plain double accumulation could not resolve the cancellation to 1e-12;
    // the sum is carried in extended precision instead.
    std::vector<std::pair<long, long double>> support;  // (m, signed amplitude)
    for (long m : av.modeset().m_plus()) {
        const long double amp = sqrtl(to_long_double(av.a_sq(m)));
        support.emplace_back(m, amp);
        support.emplace_back(-m, -amp);
    }

    std::map<long, double> res;
    for (long m : av.modeset().m_plus()) {
        long double acc = 0.0L;
        for (const auto& [m1, v1] : support)
            for (const auto& [m2, v2] : support)
                for (const auto& [m3, v3] : support) {
                    if (-m1 + m2 + m3 != m) continue;
                    if (-m1 * m1 + m2 * m2 + m3 * m3 != m * m) continue;
                    acc += v1 * v2 * v3;
                }
        const long double amp = sqrtl(to_long_double(av.a_sq(m)));
        res[m] = static_cast<double>(static_cast<long double>(m) * m * amp - acc);
    }
    return res;
}

std::map<long, RadicalSum> q_residual_eps0_exact(const AmplitudeVector& av) {
    const auto& squares = av.squares();
    const auto& modes = av.modeset().m_plus();

    // signed packet coefficient at space mode m (time mode is m^2 implicitly)
    auto coeff = [&](long m) {
        return m > 0 ? RadicalSum::radical(m) : -RadicalSum::radical(-m);
    };
    std::vector<long> support;
    for (long m : modes) {
        support.push_back(m);
        support.push_back(-m);
    }

    std::map<long, RadicalSum> res;
    for (long m : modes) {
        RadicalSum acc;
        for (long m1 : support)
            for (long m2 : support)
                for (long m3 : support) {
                    if (-m1 + m2 + m3 != m) continue;
                    if (-m1 * m1 + m2 * m2 + m3 * m3 != m * m) continue;
                    acc += RadicalSum::mul(RadicalSum::mul(coeff(m1), coeff(m2), squares),
                                           coeff(m3), squares);
                }
        RadicalSum lhs = coeff(m);
        lhs.scale(Rational(Integer(m) * m));
        res[m] = lhs += -acc;
    }
    return res;
}

double det_constant_matrix(long n_count, double p, double q) {
    if (n_count < 1)
        throw std::invalid_argument("det_constant_matrix: n_count must be >= 1");
    return std::pow(p - q, double(n_count - 1)) * (p + double(n_count - 1) * q);
}

LinearizationMatrix build_linearization(const AmplitudeVector& av, long m_tail_max) {
    const auto& modes = av.modeset().m_plus();
    const long n = static_cast<long>(modes.size());

    LinearizationMatrix lm;
    lm.modes = modes;
    lm.resonant.resize(n, n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j)
            lm.resonant(i, j) = (i == j) ? -6.0 * to_double(av.a_sq(modes[i]))
                                         : -8.0 * av.a(modes[i]) * av.a(modes[j]);

    const double four_norm_sq = 4.0 * av.norm_sq();
    for (long m = 1; m <= m_tail_max; ++m) {
        if (av.modeset().contains(m)) continue;
        lm.tail[m] = double(m * m) - four_norm_sq;
    }
    return lm;
}

Rational det_resonant_exact(const AmplitudeVector& av) {
    const long n = av.modeset().n_count();
    // det D_N(6,8) = (6-8)^(N-1) (6 + (N-1) 8), exact in integers
    Integer det_d = 6 + 8 * (n - 1);
    for (long k = 1; k < n; ++k) det_d *= -2;
    Rational det = det_d;
    if (n % 2 == 1) det = -det;
    for (long m : av.modeset().m_plus()) det *= av.a_sq(m);
    return det;
}

Eigen::MatrixXd invert_resonant_block(const LinearizationMatrix& lm) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(lm.resonant);
    const double det = lu.determinant();
    if (det == 0.0 || !std::isfinite(det))
        throw std::runtime_error("invert_resonant_block: singular resonant block");
    return lu.inverse();
}

nlohmann::json amplitudes_report_json(const AmplitudeVector& av) {
    nlohmann::json amp_sq = nlohmann::json::object();
    nlohmann::json amp = nlohmann::json::object();
    for (const auto& [m, q] : av.squares()) {
        amp_sq[std::to_string(m)] = q.str();
        amp[std::to_string(m)] = av.a(m);
    }

    const LinearizationMatrix lm = build_linearization(av, av.modeset().max_mode() + 8);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(lm.resonant);
    const auto& sv = svd.singularValues();
    const double cond = sv(0) / sv(sv.size() - 1);

    return {
        {"modeset", modeset_to_json(av.modeset())},
        {"norm_sq", av.modeset().norm_sq().str()},
        {"amplitude_squares", amp_sq},
        {"amplitudes", amp},
        {"det_resonant_exact", det_resonant_exact(av).str()},
        {"det_resonant", to_double(det_resonant_exact(av))},
        {"condition_number", cond},
    };
}

}  // namespace nsp
