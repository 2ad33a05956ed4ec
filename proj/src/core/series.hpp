#pragma once

#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "core/amplitudes.hpp"
#include "core/lattice.hpp"

namespace nsp {

/// eps, omega = 1 + eps, and the counterterm sequence nu_m (keyed on |m|,
/// so nu_m = nu_{-m} by construction) together with its (a, b) split,
/// nu_a - nu_b = nu. Renormalized frequencies are omega_tilde_m^2 = m^2 - nu_m.
struct FrequencyState {
    double eps = 0.0;
    double omega = 1.0;
    std::map<long, double> nu;
    std::map<long, double> nu_a;
    std::map<long, double> nu_b;

    static FrequencyState bare(double eps);
    /// Split taken as (nu, 0).
    static FrequencyState with_nu(double eps, std::map<long, double> nu);
    /// Arbitrary split; nu is reconstructed as nu_a - nu_b.
    static FrequencyState with_split(double eps, std::map<long, double> nu_a,
                                     std::map<long, double> nu_b);

    double nu_at(long m) const;
    double nu_a_at(long m) const;
    double nu_b_at(long m) const;
    double omega_tilde_sq(long m) const { return double(m) * m - nu_at(m); }
    /// max |nu_m| / eps, the empirical constant of the counterterm bound.
    double c3_estimate() const;
};

/// 1 / (omega n - omega_tilde_m^2) for n != m^2; throws excluded_epsilon on an
/// exact zero divisor (first Melnikov violation). The diagonal branch needs the
/// amplitude context: scalar -1/(2 m0^2) for the single resonant mode, and
/// 1/(m^2 - 4||a||^2) off the set; resonant modes of a multi-mode set have a
/// matrix inverse instead of a scalar and are rejected here.
double propagator(std::int64_t n, std::int64_t m, const FrequencyState& fs,
                  const AmplitudeVector* av = nullptr);

/// Per-order coefficient fields u^(k) of the mu-expansion around the packet.
class SeriesLadder {
public:
    /// max_order fixes the lattice box once: |m| <= (2K+1) max(set),
    /// |n| <= (2K+1) max(set)^2.
    SeriesLadder(AmplitudeVector av, FrequencyState fs, int max_order);

    int order() const { return static_cast<int>(per_k_.size()) - 1; }
    int max_order() const { return max_order_; }
    const FourierField& coeff(int k) const { return per_k_.at(k); }
    const AmplitudeVector& amplitudes() const { return av_; }
    const FrequencyState& frequency() const { return fs_; }
    const Lattice& lattice() const { return lattice_; }

    void extend();            // order K -> K+1
    void extend_to(int k);

    /// sum_k mu^k u^(k), truncated at the current order.
    FourierField sum(double mu) const;

    double min_abs_divisor() const { return min_divisor_; }
    Mode min_divisor_mode() const { return min_divisor_mode_; }

private:
    AmplitudeVector av_;
    FrequencyState fs_;
    int max_order_;
    Lattice lattice_;
    Eigen::MatrixXd resonant_inverse_;  // D = A^{-1} on the resonant block
    std::vector<FourierField> per_k_;
    double min_divisor_ = std::numeric_limits<double>::infinity();
    Mode min_divisor_mode_{};
};

/// Dyadic scale of a divisor magnitude: -1 when |x| > C0, else the h >= 0 with
/// 2^{-h-1} C0 < |x| <= 2^{-h} C0.
int divisor_scale(double absdiv, double c0);

/// The threshold with 2^{h0} < 16 C0 / sqrt(eps) <= 2^{h0+1}.
int scale_threshold_h0(double eps, double c0);

struct ScaleAssignment {
    int h0 = 0;
    std::map<int, std::int64_t> histogram;  // scale -> point count (off-diagonal box)
    bool lemma1_ok = true;                  // |omega n - omega_tilde^2| < 1/2 implies
                                            // min(n, m^2) > 1/(4 eps), over the box
    std::vector<Mode> lemma1_violations;
};

ScaleAssignment assign_scales(const Lattice& lat, const FrequencyState& fs,
                              double c0 = 0.5);

/// Scale census restricted to the off-diagonal support of a ladder.
std::map<int, std::int64_t> ladder_scale_histogram(const SeriesLadder& ladder,
                                                   double c0 = 0.5);

nlohmann::json series_report_json(const SeriesLadder& ladder, bool dump_coefficients);

}  // namespace nsp
