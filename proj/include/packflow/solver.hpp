#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "packflow/errors.hpp"
#include "packflow/kernels.hpp"

// Branch-current solvers for n parallel-connected cells. Three routes:
//
//  * solve_no_interconnect    closed form, valid when every interconnection
//                             resistance is zero;
//  * solve_with_interconnect  O(n) scaled backward recurrence followed by a
//                             backward sweep through the voltage loops;
//  * solve_dense_oracle       LU with partial pivoting on the full Kirchhoff
//                             system, kept as the verification oracle.
//
// Conventions: cells are numbered 1..n from the terminals; series_r[k-1] is
// r_k; interconnect_R[k-2] is R_k (the busbar between branches k-1 and k).

namespace packflow {

struct PackResistances {
    std::vector<double> series_r;      // r_1..r_n, ohms, evaluated at current SoC
    std::vector<double> interconnect_R; // R_2..R_n, ohms, size n-1 (empty for n=1)

    std::size_t size() const noexcept { return series_r.size(); }
    void validate() const; // throws ValidationError on shape/sign problems
};

/// One branch-current solve: the currents i_1..i_n, the cascaded sums
/// S_k = sum_{j>=k} i_j, recurrence diagnostics and Kirchhoff residuals.
struct BranchSolution {
    std::vector<double> currents;      // i_1..i_n, amperes
    std::vector<double> current_sums;  // S_1..S_n, amperes
    double beta2 = 0.0;                // diagnostic; may be inf for extreme packs
    double psi2 = 0.0;                 // scaled counterpart of beta2
    double scale_c = 1.0;
    bool overflow_raw = false;         // some |beta_k| or |f_k| exceeded 1e300
    double kcl_residual = 0.0;         // amperes
    std::vector<double> kvl_residuals; // volts, one per adjacent pair
};

/// Per-pair coefficients of the current-sum recursion, index j = 0 <-> k = 2:
/// theta_k = r_k/r_{k-1}, rho_k = (vbar_k - vbar_{k-1})/r_{k-1},
/// omega_k = R_k/r_{k-1}, alpha_k = 1 + theta_k + omega_k.
struct LocalCoefficients {
    std::vector<double> theta, rho, omega, alpha;
    std::size_t pack_size() const noexcept { return theta.size() + 1; }
};

/// Raw backward sequences beta_k, f_k for k = 2..n+1 (index j = 0 <-> k = 2).
struct RawSequences {
    std::vector<double> beta, f;
    bool overflow = false; // any magnitude above 1e300
};

/// Scaled sequences psi_k = c^{n+1-k} beta_k, g_k = c^{n+1-k} f_k,
/// k = 2..n+1 (index j = 0 <-> k = 2).
struct ScaledSequences {
    std::vector<double> psi, g;
    double scale_c = 1.0;
    bool recovery_underflow = false; // c^{n-1} underflowed; raw recovery impossible
};

struct RecurrenceDiagnostics {
    LocalCoefficients coeffs;
    ScaledSequences scaled;
};

/// Coefficients and scaled sequences for a pack at given cell voltages;
/// the introspection surface for studying how the sequences grow.
RecurrenceDiagnostics recurrence_diagnostics(const PackResistances& res,
                                             std::span<const double> vbar, double scale_c = 0.5);

/// Dense Kirchhoff system A i = q, row-major.
struct DenseSystem {
    std::vector<double> a;
    std::vector<double> q;
    std::size_t n = 0;
};

/// Kirchhoff system referenced to cell 1: first row all ones (current law),
/// row k equates branch k+1's voltage with branch 1's.
DenseSystem build_a22_no_interconnect(const PackResistances& res, std::span<const double> vbar,
                                      double applied_I);

/// Kirchhoff system chaining adjacent branches, including the busbar drops
/// R_{k+1} * S_{k+1} in each voltage loop.
DenseSystem build_a22_interconnect(const PackResistances& res, std::span<const double> vbar,
                                   double applied_I);

/// Dense factorize-and-solve with partial pivoting; the verification oracle
/// for the analytical routes. Throws SingularSystem on rank loss.
std::vector<double> solve_dense_oracle(const DenseSystem& sys,
                                       kernels::Exec exec = kernels::Exec::serial);

/// Closed-form currents for a pack without interconnection resistances.
/// Requires every r_k > 0 (throws ZeroUpstreamResistance otherwise).
BranchSolution solve_no_interconnect(const PackResistances& res, std::span<const double> vbar,
                                     double applied_I);

/// Throws ZeroUpstreamResistance when some r_{k-1} <= 0.
LocalCoefficients compute_local_params(const PackResistances& res, std::span<const double> vbar);

/// Unscaled backward recursion. Values can overflow for large packs; that is
/// reported through RawSequences::overflow rather than as an error.
RawSequences backward_recurrences_raw(const LocalCoefficients& coeffs);

/// Scaled backward recursion, 0 < c <= 1. c = 1 reproduces the raw sequences.
ScaledSequences backward_recurrences_scaled(const LocalCoefficients& coeffs, double c);

/// O(n) analytical solve with interconnection resistances: i_n from the
/// scaled ratio (c^{n-1} I - g_2) / psi_2, then a backward sweep through the
/// voltage loops accumulating the current sums. Verifies the Kirchhoff
/// residuals of the result and throws KirchhoffResidualExceeded when the
/// pack is too ill-conditioned for the recurrence in double precision.
BranchSolution solve_with_interconnect(const PackResistances& res, std::span<const double> vbar,
                                       double applied_I, double scale_c = 0.5);

struct Residuals {
    double kcl = 0.0;              // |sum i_k - I|, amperes
    std::vector<double> kvl;       // per voltage loop, volts
    double max_kvl() const noexcept;
};

/// Kirchhoff residuals of a candidate current vector, evaluated directly
/// from the loop equations (independent of how the currents were obtained).
Residuals residuals(const PackResistances& res, std::span<const double> vbar, double applied_I,
                    std::span<const double> currents);

/// Residual acceptance threshold used by the solvers' self-checks.
inline double residual_tolerance(double applied_I) noexcept {
    const double a = applied_I < 0 ? -applied_I : applied_I;
    return 1e-9 * (a > 1.0 ? a : 1.0);
}

} // namespace packflow
