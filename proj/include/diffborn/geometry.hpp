#pragma once

// Voxelized absorption-contrast targets: lattice builders for the test
// geometries, the enclosing radius, and physical-allowability diagnostics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "diffborn/errors.hpp"
#include "diffborn/green.hpp"

namespace diffborn {

/// Voxelized inhomogeneity: lattice centers, pitch, per-voxel contrast
/// kappa_n = delta_alpha_n / alpha0. Only support voxels are stored
/// (zero-contrast entries are dropped at build time). Immutable after
/// construction; ordering is lexicographic by (x, y, z).
struct VoxelGrid {
    double h = 0.0; // voxel pitch, nondimensional length
    std::vector<Eigen::Vector3d> centers;
    std::vector<double> kappas;
    Medium medium;

    std::size_t size() const { return centers.size(); }
    bool empty() const { return centers.empty(); }
    double voxel_volume() const { return h * h * h; }
    double delta_alpha(std::size_t n) const { return kappas[n] * medium.alpha0; }
};

/// Point sources with strengths and point detectors.
struct ProbeLayout {
    std::vector<Eigen::Vector3d> sources;
    std::vector<double> strengths; // q_k, one per source
    std::vector<Eigen::Vector3d> detectors;
};

namespace detail {

inline int commensurate(double big, double small, const char* what) {
    const double ratio = big / small;
    const int m = static_cast<int>(std::llround(ratio));
    if (m < 1 || std::abs(ratio - m) > 1e-6)
        throw NonCommensurate(std::string(what) + ": ratio " +
                              std::to_string(ratio) + " is not integral");
    return m;
}

inline void check_pole(double kappa, double h, const Medium& medium) {
    if (!std::isfinite(kappa))
        throw Error("contrast must be finite");
    const double qf = q_self(h, medium);
    if (std::abs(1.0 + qf * medium.alpha0 * kappa) < 1e-6)
        throw PoleContrast("contrast hits the polarizability pole");
}

struct LexLess {
    bool operator()(const Eigen::Vector3d& a, const Eigen::Vector3d& b) const {
        if (a.x() != b.x()) return a.x() < b.x();
        if (a.y() != b.y()) return a.y() < b.y();
        return a.z() < b.z();
    }
};

inline void sort_lexicographic(VoxelGrid& g) {
    std::vector<std::size_t> idx(g.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return LexLess{}(g.centers[a], g.centers[b]);
    });
    std::vector<Eigen::Vector3d> c(g.size());
    std::vector<double> k(g.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        c[i] = g.centers[idx[i]];
        k[i] = g.kappas[idx[i]];
    }
    g.centers = std::move(c);
    g.kappas = std::move(k);
}

inline void drop_zero_contrast(VoxelGrid& g) {
    std::size_t out = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.kappas[i] != 0.0) {
            g.centers[out] = g.centers[i];
            g.kappas[out] = g.kappas[i];
            ++out;
        }
    }
    g.centers.resize(out);
    g.kappas.resize(out);
}

} // namespace detail

/// Cube of side H centered at the origin, uniform contrast. H and h are
/// given in units of the diffuse wavelength.
inline VoxelGrid build_cube(double H_over_lambda, double h_over_lambda,
                            double kappa, const Medium& medium = Medium{}) {
    const int m = detail::commensurate(H_over_lambda, h_over_lambda, "H/h");
    const double h = h_over_lambda * medium.lambda_d;
    detail::check_pole(kappa, h, medium);
    VoxelGrid g;
    g.h = h;
    g.medium = medium;
    g.centers.reserve(static_cast<std::size_t>(m) * m * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                g.centers.emplace_back((i + 0.5 - 0.5 * m) * h,
                                       (j + 0.5 - 0.5 * m) * h,
                                       (k + 0.5 - 0.5 * m) * h);
                g.kappas.push_back(kappa);
            }
    detail::drop_zero_contrast(g);
    return g;
}

/// Two cubes of side H placed face-to-face along the x axis, separated by
/// the surface-to-surface distance deltaH_over_H * H. At zero separation
/// they tile a 2m x m x m parallelepiped with no duplicate voxels.
inline VoxelGrid build_two_cubes(double H_over_lambda, double h_over_lambda,
                                 double deltaH_over_H, double kappa1,
                                 double kappa2,
                                 const Medium& medium = Medium{}) {
    const int m = detail::commensurate(H_over_lambda, h_over_lambda, "H/h");
    if (deltaH_over_H < 0.0)
        throw GeometryError("two cubes: gap must be nonnegative");
    const double gap_voxels = deltaH_over_H * H_over_lambda / h_over_lambda;
    const int g_m = static_cast<int>(std::llround(gap_voxels));
    if (std::abs(gap_voxels - g_m) > 1e-6)
        throw NonCommensurate("two cubes: gap not representable on the lattice");
    const double h = h_over_lambda * medium.lambda_d;
    detail::check_pole(kappa1, h, medium);
    detail::check_pole(kappa2, h, medium);
    VoxelGrid g;
    g.h = h;
    g.medium = medium;
    // cube 1 occupies x in [-(gap/2 + H), -gap/2], cube 2 mirrors it
    for (int cube = 0; cube < 2; ++cube) {
        const double kappa = cube == 0 ? kappa1 : kappa2;
        const double x0 = cube == 0 ? -(0.5 * g_m + m) * h : 0.5 * g_m * h;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k) {
                    g.centers.emplace_back(x0 + (i + 0.5) * h,
                                           (j + 0.5 - 0.5 * m) * h,
                                           (k + 0.5 - 0.5 * m) * h);
                    g.kappas.push_back(kappa);
                }
    }
    detail::drop_zero_contrast(g);
    detail::sort_lexicographic(g);
    return g;
}

/// Cube of side H made of m = H/h square layers of thickness h stacked
/// along z, layer j carrying contrast (-1)^j * kappa_amplitude.
inline VoxelGrid build_sandwich(double H_over_lambda, double h_over_lambda,
                                double kappa_amplitude,
                                const Medium& medium = Medium{}) {
    const int m = detail::commensurate(H_over_lambda, h_over_lambda, "H/h");
    const double h = h_over_lambda * medium.lambda_d;
    detail::check_pole(kappa_amplitude, h, medium);
    detail::check_pole(-kappa_amplitude, h, medium);
    VoxelGrid g;
    g.h = h;
    g.medium = medium;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                g.centers.emplace_back((i + 0.5 - 0.5 * m) * h,
                                       (j + 0.5 - 0.5 * m) * h,
                                       (k + 0.5 - 0.5 * m) * h);
                g.kappas.push_back((k % 2 == 0 ? 1.0 : -1.0) * kappa_amplitude);
            }
    detail::drop_zero_contrast(g);
    return g;
}

/// Concentric cubes: inner region carries exactly kappa_in (not additive),
/// the surrounding shell kappa_out.
inline VoxelGrid build_embedded(double H_out_over_lambda,
                                double H_in_over_lambda, double h_over_lambda,
                                double kappa_out, double kappa_in,
                                const Medium& medium = Medium{}) {
    if (H_in_over_lambda >= H_out_over_lambda)
        throw GeometryError("embedded cubes: inner side must be smaller");
    const int m_out =
        detail::commensurate(H_out_over_lambda, h_over_lambda, "H_out/h");
    detail::commensurate(H_in_over_lambda, h_over_lambda, "H_in/h");
    const double h = h_over_lambda * medium.lambda_d;
    detail::check_pole(kappa_out, h, medium);
    detail::check_pole(kappa_in, h, medium);
    const double half_in = 0.5 * H_in_over_lambda * medium.lambda_d;
    VoxelGrid g;
    g.h = h;
    g.medium = medium;
    for (int i = 0; i < m_out; ++i)
        for (int j = 0; j < m_out; ++j)
            for (int k = 0; k < m_out; ++k) {
                Eigen::Vector3d c((i + 0.5 - 0.5 * m_out) * h,
                                  (j + 0.5 - 0.5 * m_out) * h,
                                  (k + 0.5 - 0.5 * m_out) * h);
                const bool inner = c.cwiseAbs().maxCoeff() < half_in * (1.0 + 1e-12);
                g.centers.push_back(c);
                g.kappas.push_back(inner ? kappa_in : kappa_out);
            }
    detail::drop_zero_contrast(g);
    return g;
}

namespace detail {

// Minimal enclosing ball of a 3-D point set (Welzl with move-to-front).
struct Ball {
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    double r2 = -1.0;
    bool contains(const Eigen::Vector3d& p, double eps) const {
        return (p - c).squaredNorm() <= r2 + eps;
    }
};

inline Ball ball_from(const std::vector<Eigen::Vector3d>& s) {
    Ball b;
    switch (s.size()) {
    case 0:
        return b;
    case 1:
        b.c = s[0];
        b.r2 = 0.0;
        return b;
    case 2:
        b.c = 0.5 * (s[0] + s[1]);
        b.r2 = (s[0] - b.c).squaredNorm();
        return b;
    default: {
        // circumsphere through 2..4 points via the linear system
        // 2(p_i - p_0).c' = |p_i|^2 - |p_0|^2 restricted to their span
        const std::size_t n = s.size();
        Eigen::MatrixXd A(n - 1, 3);
        Eigen::VectorXd rhs(n - 1);
        for (std::size_t i = 1; i < n; ++i) {
            A.row(i - 1) = 2.0 * (s[i] - s[0]).transpose();
            rhs(i - 1) = s[i].squaredNorm() - s[0].squaredNorm();
        }
        // minimum-norm solution relative to p0 keeps the center in the
        // affine span for degenerate (coplanar) supports
        Eigen::VectorXd rhs0 = rhs;
        for (std::size_t i = 1; i < n; ++i)
            rhs0(i - 1) -= 2.0 * (s[i] - s[0]).dot(s[0]);
        Eigen::Vector3d c0 =
            A.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs0);
        b.c = s[0] + c0;
        b.r2 = (s[0] - b.c).squaredNorm();
        return b;
    }
    }
}

inline Ball welzl(std::vector<Eigen::Vector3d>& pts, std::size_t n,
                  std::vector<Eigen::Vector3d>& support, double eps) {
    if (n == 0 || support.size() == 4)
        return ball_from(support);
    Ball b = welzl(pts, n - 1, support, eps);
    if (b.contains(pts[n - 1], eps))
        return b;
    support.push_back(pts[n - 1]);
    b = welzl(pts, n - 1, support, eps);
    support.pop_back();
    // move-to-front heuristic
    std::rotate(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(n - 1),
                pts.begin() + static_cast<std::ptrdiff_t>(n));
    return b;
}

inline Ball min_enclosing_ball(const std::vector<Eigen::Vector3d>& points) {
    std::vector<Eigen::Vector3d> pts = points;
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    std::shuffle(pts.begin(), pts.end(), rng);
    double scale = 0.0;
    for (const auto& p : pts) scale = std::max(scale, p.squaredNorm());
    std::vector<Eigen::Vector3d> support;
    return welzl(pts, pts.size(), support, 1e-12 * std::max(scale, 1.0));
}

} // namespace detail

/// Radius of the smallest sphere containing the continuous support: the
/// minimal enclosing ball of the voxel centers padded by the voxel
/// half-diagonal h*sqrt(3)/2.
inline double enclosing_radius(const VoxelGrid& grid) {
    if (grid.empty())
        throw EmptyGrid("enclosing_radius: empty grid");
    const detail::Ball b = detail::min_enclosing_ball(grid.centers);
    return std::sqrt(std::max(b.r2, 0.0)) + grid.h * std::sqrt(3.0) / 2.0;
}

enum class DiagnosticKind { NotPhysicallyAllowable, ExceedsTheorem, PoleProximity };

struct Diagnostic {
    DiagnosticKind kind;
    std::size_t voxel;
    double kappa;
};

inline const char* to_string(DiagnosticKind k) {
    switch (k) {
    case DiagnosticKind::NotPhysicallyAllowable: return "NotPhysicallyAllowable";
    case DiagnosticKind::ExceedsTheorem: return "ExceedsTheorem";
    default: return "PoleProximity";
    }
}

/// Flags contrasts below the physically-allowable floor (kappa < -1),
/// above the guaranteed-convergence ceiling (kappa > +1), and near the
/// polarizability pole. Pure report; computation may still proceed.
inline std::vector<Diagnostic> validate(const VoxelGrid& grid) {
    std::vector<Diagnostic> out;
    const double qf = grid.empty() ? 0.0 : q_self(grid.h, grid.medium);
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const double kappa = grid.kappas[n];
        if (kappa < -1.0)
            out.push_back({DiagnosticKind::NotPhysicallyAllowable, n, kappa});
        if (kappa > 1.0)
            out.push_back({DiagnosticKind::ExceedsTheorem, n, kappa});
        if (std::abs(1.0 + qf * grid.medium.alpha0 * kappa) < 1e-6)
            out.push_back({DiagnosticKind::PoleProximity, n, kappa});
    }
    return out;
}

} // namespace diffborn
