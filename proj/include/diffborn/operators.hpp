#pragma once

// Discrete operators of the coupled-monopole scheme: per-voxel
// polarizabilities, the volume-to-volume Green's matrix, the symmetrized
// interaction kernels W and W_c, the sign operator, and the probe
// (source/detector) Green's matrices.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "diffborn/errors.hpp"
#include "diffborn/geometry.hpp"
#include "diffborn/green.hpp"
#include "diffborn/linalg.hpp"

namespace diffborn {

/// Per-voxel polarizabilities chi_n = -v*delta_alpha_n/(1 + Q_F*delta_alpha_n).
struct Polarizabilities {
    std::vector<double> chis;
    double q_f = 0.0; // self-energy actually used (0 when disabled)
    double v = 0.0;   // voxel volume h^3
};

/// Diagonal +-1 operator by the sign of delta_alpha.
struct SignOperator {
    std::vector<double> signs;
};

/// Green's matrices coupling voxels to external sources and detectors.
struct ProbeMatrices {
    DenseMatrixR g0_dv; // N_d x N
    DenseMatrixR g0_vs; // N x N_s
    DenseMatrixR g0_ds; // N_d x N_s
};

/// chi_n per voxel. With use_self_energy=false, Q_F = 0 and chi_n reduces
/// to -v*delta_alpha_n exactly (test mode; continuum identities become exact).
inline Polarizabilities polarizabilities(const VoxelGrid& grid,
                                         bool use_self_energy = true) {
    Polarizabilities p;
    p.v = grid.voxel_volume();
    p.q_f = use_self_energy && !grid.empty() ? q_self(grid.h, grid.medium) : 0.0;
    p.chis.reserve(grid.size());
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const double da = grid.delta_alpha(n);
        const double denom = 1.0 + p.q_f * da;
        if (std::abs(denom) < 1e-6)
            throw PoleContrast("polarizabilities: contrast at the pole");
        p.chis.push_back(-p.v * da / denom);
    }
    return p;
}

/// N x N matrix with zero diagonal and g_free(r_n, r_m) off the diagonal.
inline DenseMatrixR assemble_g0vv(const VoxelGrid& grid) {
    const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
    DenseMatrixR g = DenseMatrixR::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double val = g_free(grid.centers[static_cast<std::size_t>(i)],
                                      grid.centers[static_cast<std::size_t>(j)],
                                      grid.medium);
            g(i, j) = val;
            g(j, i) = val;
        }
    return g;
}

/// Real symmetric kernel W = S G0 S with S = diag(|chi_n|^(1/2)).
inline DenseMatrixR assemble_w(const VoxelGrid& grid,
                               const Polarizabilities& pol) {
    DenseMatrixR w = assemble_g0vv(grid);
    const Eigen::Index n = w.rows();
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i)
        s(i) = std::sqrt(std::abs(pol.chis[static_cast<std::size_t>(i)]));
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) w(i, j) *= s(i) * s(j);
    return w;
}

/// Complex symmetric kernel W_c = S_c G0 S_c with S_c = diag(sqrt(-chi_n)),
/// principal square-root branch. Equals W when all contrasts are
/// nonnegative; branch choice is immaterial (the sign cancels).
inline DenseMatrixC assemble_wc(const VoxelGrid& grid,
                                const Polarizabilities& pol) {
    const DenseMatrixR g0 = assemble_g0vv(grid);
    const Eigen::Index n = g0.rows();
    Eigen::VectorXcd s(n);
    for (Eigen::Index i = 0; i < n; ++i)
        s(i) = std::sqrt(
            std::complex<double>(-pol.chis[static_cast<std::size_t>(i)], 0.0));
    DenseMatrixC w(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) w(i, j) = s(i) * g0(i, j) * s(j);
    return w;
}

/// Real matrix G0 diag(-chi), similar to W_c via S_c = diag(sqrt(-chi)):
/// S_c^(-1) W_c S_c = G0 S_c^2 = G0 diag(-chi). Shares the exact eigenvalue
/// multiset with W_c while staying in real arithmetic.
inline DenseMatrixR assemble_wc_similar(const VoxelGrid& grid,
                                        const Polarizabilities& pol) {
    DenseMatrixR m = assemble_g0vv(grid);
    const Eigen::Index n = m.rows();
    for (Eigen::Index j = 0; j < n; ++j)
        m.col(j) *= -pol.chis[static_cast<std::size_t>(j)];
    return m;
}

/// sigma_n = +1 if delta_alpha_n >= 0, -1 otherwise.
inline SignOperator assemble_sigma(const VoxelGrid& grid) {
    SignOperator s;
    s.signs.reserve(grid.size());
    for (std::size_t n = 0; n < grid.size(); ++n)
        s.signs.push_back(grid.delta_alpha(n) >= 0.0 ? 1.0 : -1.0);
    return s;
}

/// Green's matrices between voxels, sources, and detectors.
inline ProbeMatrices assemble_probes(const VoxelGrid& grid,
                                     const ProbeLayout& probes) {
    const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
    const Eigen::Index ns = static_cast<Eigen::Index>(probes.sources.size());
    const Eigen::Index nd = static_cast<Eigen::Index>(probes.detectors.size());
    ProbeMatrices pm;
    pm.g0_dv.resize(nd, n);
    pm.g0_vs.resize(n, ns);
    pm.g0_ds.resize(nd, ns);
    for (Eigen::Index l = 0; l < nd; ++l)
        for (Eigen::Index i = 0; i < n; ++i)
            pm.g0_dv(l, i) =
                g_free(probes.detectors[static_cast<std::size_t>(l)],
                       grid.centers[static_cast<std::size_t>(i)], grid.medium);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < ns; ++k)
            pm.g0_vs(i, k) =
                g_free(grid.centers[static_cast<std::size_t>(i)],
                       probes.sources[static_cast<std::size_t>(k)], grid.medium);
    for (Eigen::Index l = 0; l < nd; ++l)
        for (Eigen::Index k = 0; k < ns; ++k)
            pm.g0_ds(l, k) =
                g_free(probes.detectors[static_cast<std::size_t>(l)],
                       probes.sources[static_cast<std::size_t>(k)], grid.medium);
    return pm;
}

/// Incident field at the voxel centers, u_inc[n][k] = q_k * g_free(r_n, r_sk).
inline DenseMatrixR incident_field(const VoxelGrid& grid,
                                   const ProbeLayout& probes) {
    const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
    const Eigen::Index ns = static_cast<Eigen::Index>(probes.sources.size());
    DenseMatrixR u(n, ns);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < ns; ++k) {
            const double q = probes.strengths.empty()
                                 ? 1.0
                                 : probes.strengths[static_cast<std::size_t>(k)];
            u(i, k) = q * g_free(grid.centers[static_cast<std::size_t>(i)],
                                 probes.sources[static_cast<std::size_t>(k)],
                                 grid.medium);
        }
    return u;
}

} // namespace diffborn
