#pragma once

// Forward problem: the discrete T-matrix in its direct and symmetric
// forms, Born-series iteration with divergence detection, the measurable
// data function, and the spectral convergence radius.

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "diffborn/errors.hpp"
#include "diffborn/geometry.hpp"
#include "diffborn/linalg.hpp"
#include "diffborn/operators.hpp"

namespace diffborn {

enum class DivergenceFlag { none, residual_growth, overflow_cap };

inline const char* to_string(DivergenceFlag f) {
    switch (f) {
    case DivergenceFlag::none: return "none";
    case DivergenceFlag::residual_growth: return "residual_growth";
    default: return "overflow_cap";
    }
}

struct BornReport {
    bool converged = false;
    int iterations = 0;
    std::vector<double> residuals; // relative update per iteration
    DivergenceFlag divergence_flag = DivergenceFlag::none;
    DenseMatrixR dipoles; // N x N_s
};

struct DataFunction {
    DenseMatrixR g_ds;  // perturbed Green's values, N_d x N_s
    DenseMatrixR g0_ds; // unperturbed reference
    DenseMatrixR delta; // g_ds - g0_ds
};

/// T = (I - V G0)^(-1) V with V = diag(chi_n).
inline DenseMatrixR tmatrix_direct(const VoxelGrid& grid,
                                   const Polarizabilities& pol) {
    const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
    if (n == 0) return DenseMatrixR::Zero(0, 0);
    const DenseMatrixR g0 = assemble_g0vv(grid);
    Eigen::VectorXd chi(n);
    for (Eigen::Index i = 0; i < n; ++i)
        chi(i) = pol.chis[static_cast<std::size_t>(i)];
    const DenseMatrixR a = DenseMatrixR::Identity(n, n) - chi.asDiagonal() * g0;
    return solve_linear(a, DenseMatrixR(chi.asDiagonal())).x;
}

/// T = -S (Sigma + W)^(-1) S, the symmetric form; equals tmatrix_direct.
inline DenseMatrixR tmatrix_symmetric(const VoxelGrid& grid,
                                      const Polarizabilities& pol) {
    const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
    if (n == 0) return DenseMatrixR::Zero(0, 0);
    const DenseMatrixR w = assemble_w(grid, pol);
    const SignOperator sigma = assemble_sigma(grid);
    Eigen::VectorXd s(n), sg(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        s(i) = std::sqrt(std::abs(pol.chis[static_cast<std::size_t>(i)]));
        sg(i) = sigma.signs[static_cast<std::size_t>(i)];
    }
    DenseMatrixR a = w;
    a += DenseMatrixR(sg.asDiagonal());
    const DenseMatrixR inv_s = solve_linear(a, DenseMatrixR(s.asDiagonal())).x;
    return DenseMatrixR(-(s.asDiagonal() * inv_s));
}

/// Fixed-point iteration d_{k+1} = V (u_inc + G0 d_k) starting from the
/// first Born term d_0 = V u_inc, so the iteration count equals the series
/// order. Divergence (a report outcome, not an error) is declared after 10
/// consecutive residual increases or a 1e12-fold norm blowup.
inline BornReport born_iterate(const VoxelGrid& grid,
                               const Polarizabilities& pol,
                               const DenseMatrixR& u_inc, double tol = 1e-10,
                               int max_iter = 10000) {
    if (!(tol > 0.0)) throw Error("born_iterate: tol must be positive");
    if (max_iter < 1) throw Error("born_iterate: max_iter must be >= 1");
    const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
    BornReport rep;
    if (n == 0) {
        rep.converged = true;
        rep.dipoles = DenseMatrixR::Zero(0, u_inc.cols());
        return rep;
    }
    const DenseMatrixR g0 = assemble_g0vv(grid);
    Eigen::VectorXd chi(n);
    for (Eigen::Index i = 0; i < n; ++i)
        chi(i) = pol.chis[static_cast<std::size_t>(i)];
    DenseMatrixR d = chi.asDiagonal() * u_inc;
    const double d0_norm = d.norm();
    if (d0_norm == 0.0) {
        rep.converged = true;
        rep.dipoles = d;
        return rep;
    }
    int growth_streak = 0;
    double prev_resid = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= max_iter; ++it) {
        const DenseMatrixR next = chi.asDiagonal() * (u_inc + g0 * d);
        const double dnorm = d.norm();
        const double resid = (next - d).norm() / dnorm;
        rep.residuals.push_back(resid);
        rep.iterations = it;
        d = next;
        if (resid <= tol) {
            rep.converged = true;
            break;
        }
        if (d.norm() > 1e12 * d0_norm) {
            rep.divergence_flag = DivergenceFlag::overflow_cap;
            break;
        }
        growth_streak = resid > prev_resid ? growth_streak + 1 : 0;
        if (growth_streak >= 10) {
            rep.divergence_flag = DivergenceFlag::residual_growth;
            break;
        }
        prev_resid = resid;
    }
    rep.dipoles = std::move(d);
    return rep;
}

/// Measurable data function G_DS = G0_DS + G0_DV T G0_VS.
inline DataFunction data_function(const VoxelGrid& grid,
                                  const Polarizabilities& pol,
                                  const ProbeLayout& probes) {
    const ProbeMatrices pm = assemble_probes(grid, probes);
    DataFunction df;
    df.g0_ds = pm.g0_ds;
    if (grid.empty()) {
        df.g_ds = pm.g0_ds;
        df.delta = DenseMatrixR::Zero(pm.g0_ds.rows(), pm.g0_ds.cols());
        return df;
    }
    const DenseMatrixR t = tmatrix_direct(grid, pol);
    df.delta = pm.g0_dv * t * pm.g0_vs;
    df.g_ds = df.g0_ds + df.delta;
    return df;
}

/// Spectral radius of W_c (equivalently of V G0 up to sign, by similarity);
/// the Born series is predicted convergent iff the result is below 1.
inline double convergence_radius(const VoxelGrid& grid,
                                 const Polarizabilities& pol,
                                 Eigen::Index cap_complex = 4000) {
    const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
    if (n == 0) return 0.0;
    if (n > cap_complex)
        throw CapExceeded("convergence_radius: N exceeds the complex cap");
    const SpectrumC s = eig_real_general_all(assemble_wc_similar(grid, pol));
    double rho = 0.0;
    for (const auto& w : s.values) rho = std::max(rho, std::abs(w));
    return rho;
}

} // namespace diffborn
