#include "packflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace packflow {

namespace {

constexpr double kOverflowFlagAt = 1e300;
constexpr double kPsiUnderflowFloor = 1e-300;

void require_same_size(std::size_t n, std::span<const double> vbar) {
    if (vbar.size() != n) throw ValidationError("vbar size does not match pack size");
}

void require_positive_series(const PackResistances& res) {
    for (std::size_t k = 0; k < res.size(); ++k)
        if (!(res.series_r[k] > 0.0))
            throw ZeroUpstreamResistance("analytical solve requires r_k > 0; r_" +
                                         std::to_string(k + 1) + " = " +
                                         std::to_string(res.series_r[k]));
}

} // namespace

void PackResistances::validate() const {
    if (series_r.empty()) throw ValidationError("pack must contain at least one cell");
    if (interconnect_R.size() + 1 != series_r.size())
        throw ValidationError("interconnect_R must have n-1 entries");
    for (double r : series_r)
        if (!(r >= 0.0)) throw ValidationError("series resistances must be >= 0");
    for (double R : interconnect_R)
        if (!(R >= 0.0)) throw ValidationError("interconnection resistances must be >= 0");
}

DenseSystem build_a22_no_interconnect(const PackResistances& res, std::span<const double> vbar,
                                      double applied_I) {
    const std::size_t n = res.size();
    require_same_size(n, vbar);

    DenseSystem sys;
    sys.n = n;
    sys.a.assign(n * n, 0.0);
    sys.q.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) sys.a[j] = 1.0;
    sys.q[0] = applied_I;
    for (std::size_t row = 1; row < n; ++row) {
        sys.a[row * n] = res.series_r[0];
        sys.a[row * n + row] = -res.series_r[row];
        sys.q[row] = vbar[row] - vbar[0];
    }
    return sys;
}

DenseSystem build_a22_interconnect(const PackResistances& res, std::span<const double> vbar,
                                   double applied_I) {
    const std::size_t n = res.size();
    require_same_size(n, vbar);

    DenseSystem sys;
    sys.n = n;
    sys.a.assign(n * n, 0.0);
    sys.q.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) sys.a[j] = 1.0;
    sys.q[0] = applied_I;
    // Loop j (1-based): r_j i_j - (r_{j+1}+R_{j+1}) i_{j+1} - R_{j+1} sum_{k>j+1} i_k
    //                   = vbar_{j+1} - vbar_j
    for (std::size_t row = 1; row < n; ++row) {
        const double R = res.interconnect_R[row - 1];
        sys.a[row * n + (row - 1)] = res.series_r[row - 1];
        sys.a[row * n + row] = -(res.series_r[row] + R);
        for (std::size_t col = row + 1; col < n; ++col) sys.a[row * n + col] = -R;
        sys.q[row] = vbar[row] - vbar[row - 1];
    }
    return sys;
}

std::vector<double> solve_dense_oracle(const DenseSystem& sys, kernels::Exec exec) {
    const std::size_t n = sys.n;
    if (n == 0 || sys.a.size() != n * n || sys.q.size() != n)
        throw ValidationError("dense system has inconsistent dimensions");

    std::vector<double> lu = sys.a;
    std::vector<double> x = sys.q;
    std::vector<std::size_t> perm(n);
    kernels::lu_factor(lu, n, perm, exec);
    kernels::lu_solve(lu, n, perm, x);
    return x;
}

BranchSolution solve_no_interconnect(const PackResistances& res, std::span<const double> vbar,
                                     double applied_I) {
    const std::size_t n = res.size();
    require_same_size(n, vbar);
    require_positive_series(res);

    BranchSolution sol;
    sol.beta2 = std::numeric_limits<double>::quiet_NaN();
    sol.psi2 = std::numeric_limits<double>::quiet_NaN();
    sol.currents.resize(n);

    if (n == 1) {
        sol.currents[0] = applied_I;
    } else {
        // phi = r_1 i_1; every branch then follows from its own voltage loop.
        double inv_sum = 0.0;
        double drive = applied_I;
        for (std::size_t k = 0; k < n; ++k) inv_sum += 1.0 / res.series_r[k];
        for (std::size_t k = 1; k < n; ++k) drive += (vbar[k] - vbar[0]) / res.series_r[k];
        const double phi = drive / inv_sum;
        for (std::size_t k = 0; k < n; ++k)
            sol.currents[k] = (phi - (vbar[k] - vbar[0])) / res.series_r[k];
    }

    sol.current_sums.assign(n, 0.0);
    double acc = 0.0;
    for (std::size_t k = n; k-- > 0;) {
        acc += sol.currents[k];
        sol.current_sums[k] = acc;
    }

    PackResistances zero_R{res.series_r, std::vector<double>(n - 1, 0.0)};
    Residuals resid = residuals(zero_R, vbar, applied_I, sol.currents);
    sol.kcl_residual = resid.kcl;
    sol.kvl_residuals = std::move(resid.kvl);
    return sol;
}

LocalCoefficients compute_local_params(const PackResistances& res, std::span<const double> vbar) {
    const std::size_t n = res.size();
    require_same_size(n, vbar);
    if (n < 2) return {};

    LocalCoefficients c;
    c.theta.resize(n - 1);
    c.rho.resize(n - 1);
    c.omega.resize(n - 1);
    c.alpha.resize(n - 1);
    for (std::size_t j = 0; j < n - 1; ++j) {
        const double r_prev = res.series_r[j]; // r_{k-1} for k = j + 2
        if (!(r_prev > 0.0))
            throw ZeroUpstreamResistance("r_" + std::to_string(j + 1) +
                                         " must be > 0 for the recurrence coefficients");
        c.theta[j] = res.series_r[j + 1] / r_prev;
        c.rho[j] = (vbar[j + 1] - vbar[j]) / r_prev;
        c.omega[j] = res.interconnect_R[j] / r_prev;
        c.alpha[j] = 1.0 + c.theta[j] + c.omega[j];
    }
    return c;
}

RawSequences backward_recurrences_raw(const LocalCoefficients& coeffs) {
    const std::size_t n = coeffs.pack_size();
    if (n < 2) throw ValidationError("recurrences need at least two cells");

    RawSequences seq;
    seq.beta.assign(n, 0.0); // index j = 0 <-> k = 2, ..., j = n-1 <-> k = n+1
    seq.f.assign(n, 0.0);
    seq.beta[n - 1] = 1.0;
    seq.f[n - 1] = 0.0;
    seq.beta[n - 2] = coeffs.alpha[n - 2];
    seq.f[n - 2] = coeffs.rho[n - 2];
    for (std::size_t k = n - 1; k >= 2; --k) {
        const std::size_t j = k - 2;
        seq.beta[j] = coeffs.alpha[j] * seq.beta[j + 1] - coeffs.theta[j] * seq.beta[j + 2];
        seq.f[j] = coeffs.alpha[j] * seq.f[j + 1] - coeffs.theta[j] * seq.f[j + 2] +
                   coeffs.rho[j];
    }
    for (std::size_t j = 0; j < n; ++j)
        if (std::abs(seq.beta[j]) > kOverflowFlagAt || std::abs(seq.f[j]) > kOverflowFlagAt)
            seq.overflow = true;
    return seq;
}

ScaledSequences backward_recurrences_scaled(const LocalCoefficients& coeffs, double c) {
    const std::size_t n = coeffs.pack_size();
    if (n < 2) throw ValidationError("recurrences need at least two cells");
    if (!(c > 0.0) || c > 1.0) throw ValidationError("scale c must lie in (0, 1]");

    ScaledSequences seq;
    seq.scale_c = c;
    seq.psi.assign(n, 0.0);
    seq.g.assign(n, 0.0);
    seq.psi[n - 1] = 1.0;
    seq.g[n - 1] = 0.0;
    seq.psi[n - 2] = c * coeffs.alpha[n - 2];
    seq.g[n - 2] = c * coeffs.rho[n - 2];
    double c_pow = c; // c^{n+1-k}, starting at k = n
    for (std::size_t k = n - 1; k >= 2; --k) {
        const std::size_t j = k - 2;
        c_pow *= c;
        seq.psi[j] = c * coeffs.alpha[j] * seq.psi[j + 1] - c * c * coeffs.theta[j] * seq.psi[j + 2];
        seq.g[j] = c * coeffs.alpha[j] * seq.g[j + 1] - c * c * coeffs.theta[j] * seq.g[j + 2] +
                   c_pow * coeffs.rho[j];
    }
    if (std::pow(c, static_cast<double>(n - 1)) < std::numeric_limits<double>::min())
        seq.recovery_underflow = true;
    return seq;
}

RecurrenceDiagnostics recurrence_diagnostics(const PackResistances& res,
                                             std::span<const double> vbar, double scale_c) {
    RecurrenceDiagnostics diag;
    diag.coeffs = compute_local_params(res, vbar);
    diag.scaled = backward_recurrences_scaled(diag.coeffs, scale_c);
    return diag;
}

BranchSolution solve_with_interconnect(const PackResistances& res, std::span<const double> vbar,
                                       double applied_I, double scale_c) {
    const std::size_t n = res.size();
    require_same_size(n, vbar);
    res.validate();
    require_positive_series(res);

    BranchSolution sol;
    sol.scale_c = scale_c;
    if (n == 1) {
        sol.currents = {applied_I};
        sol.current_sums = {applied_I};
        sol.beta2 = std::numeric_limits<double>::quiet_NaN();
        sol.psi2 = std::numeric_limits<double>::quiet_NaN();
        sol.kcl_residual = 0.0;
        return sol;
    }

    const LocalCoefficients coeffs = compute_local_params(res, vbar);
    const ScaledSequences scaled = backward_recurrences_scaled(coeffs, scale_c);

    const double psi2 = scaled.psi[0];
    const double g2 = scaled.g[0];
    sol.psi2 = psi2;
    if (!(std::abs(psi2) > kPsiUnderflowFloor))
        throw UnsolvablePack("psi_2 = " + std::to_string(psi2) +
                             "; beta_2 vanished or the scale underflowed");

    // i_n = (I - f_2)/beta_2, evaluated in scaled form to keep the
    // intermediates representable. c^{n-1} may underflow for very large
    // packs; the ratio below never needs the unscaled sequences.
    const double c_shift = std::pow(scale_c, static_cast<double>(n - 1));
    const double i_n = (c_shift * applied_I - g2) / psi2;
    sol.beta2 = psi2 / c_shift; // diagnostic only; inf when c^{n-1} underflows
    sol.overflow_raw = !std::isfinite(sol.beta2) || std::abs(sol.beta2) > kOverflowFlagAt;

    sol.currents.assign(n, 0.0);
    sol.current_sums.assign(n, 0.0);
    sol.currents[n - 1] = i_n;
    sol.current_sums[n - 1] = i_n;
    // Backward sweep through the voltage loops, accumulating S on the fly:
    // i_{k-1} = theta_k i_k + omega_k S_k + rho_k.
    for (std::size_t k = n; k >= 2; --k) {
        const std::size_t j = k - 2;
        sol.currents[k - 2] = coeffs.theta[j] * sol.currents[k - 1] +
                              coeffs.omega[j] * sol.current_sums[k - 1] + coeffs.rho[j];
        sol.current_sums[k - 2] = sol.current_sums[k - 1] + sol.currents[k - 2];
    }

    Residuals resid = residuals(res, vbar, applied_I, sol.currents);
    sol.kcl_residual = resid.kcl;
    const double max_kvl = resid.max_kvl();
    sol.kvl_residuals = std::move(resid.kvl);

    const double tol = residual_tolerance(applied_I);
    if (sol.kcl_residual > tol || max_kvl > tol)
        throw KirchhoffResidualExceeded(
            "residual check failed (kcl = " + std::to_string(sol.kcl_residual) +
            " A, max kvl = " + std::to_string(max_kvl) +
            " V, tol = " + std::to_string(tol) +
            "); the recurrence lost too much precision for this pack");
    return sol;
}

double Residuals::max_kvl() const noexcept {
    double m = 0.0;
    for (double v : kvl) m = std::max(m, v);
    return m;
}

Residuals residuals(const PackResistances& res, std::span<const double> vbar, double applied_I,
                    std::span<const double> currents) {
    const std::size_t n = res.size();
    require_same_size(n, vbar);
    if (currents.size() != n) throw ValidationError("current vector size mismatch");

    Residuals out;
    // Neumaier-compensated sum: the currents of strongly imbalanced packs can
    // dwarf their own total, and the check must not drown in summation noise.
    double total = 0.0, comp = 0.0;
    for (double i : currents) {
        const double t = total + i;
        comp += std::abs(total) >= std::abs(i) ? (total - t) + i : (i - t) + total;
        total = t;
    }
    out.kcl = std::abs(total + comp - applied_I);

    out.kvl.assign(n >= 1 ? n - 1 : 0, 0.0);
    double suffix = 0.0; // S_{j+1}
    std::vector<double> sums(n, 0.0);
    for (std::size_t k = n; k-- > 0;) {
        suffix += currents[k];
        sums[k] = suffix;
    }
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double lhs = res.series_r[j] * currents[j] + vbar[j];
        const double rhs = res.interconnect_R[j] * sums[j + 1] +
                           res.series_r[j + 1] * currents[j + 1] + vbar[j + 1];
        out.kvl[j] = std::abs(lhs - rhs);
    }
    return out;
}

} // namespace packflow
