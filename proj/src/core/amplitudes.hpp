#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "core/lattice.hpp"
#include "core/modeset.hpp"
#include "core/rational.hpp"

namespace nsp {

/// Real amplitudes of the eps = 0 wave packet. All signs are taken positive;
/// any sign pattern solves the same equations.
class AmplitudeVector {
public:
    explicit AmplitudeVector(ModeSet s);

    const ModeSet& modeset() const { return modeset_; }
    double a(long m) const;                    // +sqrt(a_m^2)
    const Rational& a_sq(long m) const;        // exact
    const std::map<long, Rational>& squares() const { return a_sq_; }
    double norm_sq() const { return norm_sq_double_; }
    Rational norm_sq_exact() const { return modeset_.norm_sq(); }

    /// The packet v0 = a(x) - a(-x) as a field: coefficients +-a_m at (m^2, +-m).
    FourierField packet(const Lattice& lat) const;

private:
    ModeSet modeset_;
    std::map<long, Rational> a_sq_;
    std::map<long, double> a_;
    double norm_sq_double_ = 0.0;
};

AmplitudeVector solve_amplitudes(const ModeSet& s);

/// Residual of the exact eps = 0 Q equation,
///   m^2 v_m - [ |v0|^2 v0 ]_{(m^2, m)},
/// per mode of the set, via the full cubic convolution over the 2N-point packet.
std::map<long, double> q_residual_eps0(const AmplitudeVector& av);

/// Same residual in exact radical arithmetic; each entry must be identically zero.
std::map<long, RadicalSum> q_residual_eps0_exact(const AmplitudeVector& av);

/// det of the N x N matrix with diagonal p and off-diagonal q:
/// (p - q)^(N-1) (p + (N-1) q).
double det_constant_matrix(long n_count, double p, double q);

/// Resonant block (diagonal -6 a_m^2, off-diagonal -8 a_m a_m') plus the
/// diagonal tail m^2 - 4||a||^2 for positive m outside the set.
struct LinearizationMatrix {
    std::vector<long> modes;       // row/column order: the set, increasing
    Eigen::MatrixXd resonant;      // N x N
    std::map<long, double> tail;   // m -> m^2 - 4||a||^2, m <= m_tail_max, m not in set
};

LinearizationMatrix build_linearization(const AmplitudeVector& av, long m_tail_max);

/// Exact determinant of the resonant block: (-1)^N det D_N(6,8) prod a_m^2.
Rational det_resonant_exact(const AmplitudeVector& av);

/// Inverse of the resonant block; throws on a singular block.
Eigen::MatrixXd invert_resonant_block(const LinearizationMatrix& lm);

nlohmann::json amplitudes_report_json(const AmplitudeVector& av);

}  // namespace nsp
