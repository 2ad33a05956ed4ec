#pragma once

#include <map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "core/amplitudes.hpp"
#include "core/diophantine.hpp"
#include "core/lattice.hpp"
#include "core/series.hpp"

namespace nsp {

struct SolveOptions {
    std::int64_t n_max = 400;
    std::int64_t m_max = 20;
    double tol = 1e-10;
    int max_iter = 40;
    double norm_radius = 0.05;      // kappa of the distance norm
    double divisor_exponent = 1.1;  // excision threshold eps^1.1 on the lattice
    DiophantineParams dio{};
};

struct SolveReport {
    double eps = 0.0;
    bool converged = false;
    int iterations = 0;
    double residual_norm = 0.0;       // weighted norm of the full PDE residual
    double distance = 0.0;            // || u_eps - sqrt(eps) u0 ||_r
    double c_constant = 0.0;          // distance / eps^{3/2}
    std::map<long, double> nu_out;    // measured counterterms m^2 - omega_tilde^2
    double divisor_min = 0.0;         // min |omega n - m^2| over the lattice box
    Mode divisor_argmin{};
    bool admissible = false;          // passed the Cantor-set screens
    double quad_c = 0.0;              // measured quadratic-tail constant
    std::vector<double> residual_history;
    std::size_t support = 0;          // master modes carried by the solve
};

struct SolveResult {
    SolveReport report;
    FourierField u;  // solution of the rescaled equation; u_eps = sqrt(eps) u
};

/// Newton solve of the truncated Q/P system starting from the scaled packet.
/// Throws excluded_epsilon when eps fails the base screen or a lattice divisor
/// sits below eps^{divisor_exponent}; max_iter exhaustion is reported, not thrown.
SolveResult newton_solve(const ModeSet& set, double eps, const SolveOptions& opt = {});

/// Counterterms measured from the linearization channels of a converged field:
/// nu_m = -eps (2 sum u^2 - 2 sum_p u_p u_{(n_p, m_p + 2m)}), m = 1..m_track.
std::map<long, double> measure_counterterms(const FourierField& u, double eps,
                                            long m_track);

struct FrequencyIterationResult {
    FrequencyState fs;
    int rounds = 0;
    double final_increment = 0.0;
};

/// How a measured counterterm sequence is distributed onto the (a, b) split.
using SplitRule = std::function<FrequencyState(double eps, const std::map<long, double>&)>;

/// Fixed-point iteration for the renormalized frequencies: start from
/// omega_tilde^2 = m^2, measure nu from the mu-series at the given order,
/// reinsert, repeat until the increment is Cauchy-small. Iterates must stay
/// inside the Melnikov region or excluded_epsilon is thrown.
FrequencyIterationResult frequency_iteration(const ModeSet& set, double eps, int order,
                                             const SplitRule& split = {},
                                             double fp_tol = 1e-12, int max_rounds = 30);

struct SweepPoint {
    double eps = 0.0;
    bool converged = false;
    bool excluded = false;
    double residual = 0.0;
    double distance = 0.0;
    double c_constant = 0.0;
};

struct SweepReport {
    std::vector<SweepPoint> points;
    int converged_count = 0;
    double slope = 0.0;  // least-squares log(distance) vs log(eps)
};

/// Solves across eps_list and fits the distance growth exponent. Requires at
/// least four converged points spanning >= 1.45 decades.
SweepReport scaling_sweep(const ModeSet& set, const std::vector<double>& eps_list,
                          const SolveOptions& opt = {});

nlohmann::json solve_report_json(const SolveReport& rep);
nlohmann::json sweep_report_json(const SweepReport& rep);
std::string sweep_report_csv(const SweepReport& rep);

}  // namespace nsp
