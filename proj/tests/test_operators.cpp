#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "diffborn/operators.hpp"
#include "test_support.hpp"

using namespace diffborn;

TEST_CASE("polarizabilities closed form, with and without self-energy") {
    const VoxelGrid g = build_cube(0.05, 0.05, 0.7);
    const double v = g.voxel_volume();
    const double da = 0.7 * g.medium.alpha0;
    const double qf = q_self(g.h, g.medium);

    const Polarizabilities with = polarizabilities(g, true);
    CHECK(with.q_f == qf);
    CHECK(with.chis[0] ==
          doctest::Approx(-v * da / (1.0 + qf * da)).epsilon(1e-14));

    const Polarizabilities without = polarizabilities(g, false);
    CHECK(without.q_f == 0.0);
    CHECK(without.chis[0] == doctest::Approx(-v * da).epsilon(1e-14));

    // chi and delta_alpha have opposite signs away from the pole
    VoxelGrid neg = g;
    neg.kappas[0] = -0.7;
    CHECK(polarizabilities(neg).chis[0] > 0.0);
    CHECK(with.chis[0] < 0.0);
}

TEST_CASE("polarizabilities throws at the pole") {
    VoxelGrid g = build_cube(0.05, 0.05, 0.7);
    g.kappas[0] = -1.0 / q_self(g.h, g.medium);
    CHECK_THROWS_AS(polarizabilities(g), PoleContrast);
}

TEST_CASE("assemble_g0vv diagonal, symmetry, and entries") {
    const VoxelGrid g = build_cube(0.15, 0.05, 1.0);
    const DenseMatrixR g0 = assemble_g0vv(g);
    REQUIRE(g0.rows() == 27);
    CHECK(g0.diagonal().cwiseAbs().maxCoeff() == 0.0);
    CHECK((g0 - g0.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 8; ++j)
            CHECK(g0(i, j) ==
                  doctest::Approx(g_free(g.centers[i], g.centers[j], g.medium))
                      .epsilon(1e-15));
}

TEST_CASE("W is symmetric with zero diagonal; W_c equals W for kappa >= 0") {
    const VoxelGrid g = build_cube(0.25, 0.05, 1.0);
    const Polarizabilities pol = polarizabilities(g);
    const DenseMatrixR w = assemble_w(g, pol);
    CHECK((w - w.transpose()).cwiseAbs().maxCoeff() <=
          1e-15 * w.cwiseAbs().maxCoeff());
    CHECK(w.diagonal().cwiseAbs().maxCoeff() == 0.0);

    const DenseMatrixC wc = assemble_wc(g, pol);
    CHECK((wc.real() - w).cwiseAbs().maxCoeff() <=
          1e-14 * w.cwiseAbs().maxCoeff());
    CHECK(wc.imag().cwiseAbs().maxCoeff() <= 1e-14 * w.cwiseAbs().maxCoeff());
}

TEST_CASE("contrast sign flip negates W_c") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        const VoxelGrid g = testing::random_grid(rng);
        VoxelGrid flipped = g;
        for (auto& k : flipped.kappas) k = -k;
        bool pole = false;
        Polarizabilities pol, pol_f;
        try {
            pol = polarizabilities(g);
            pol_f = polarizabilities(flipped);
        } catch (const PoleContrast&) {
            pole = true;
        }
        if (pole) continue;
        const DenseMatrixC wc = assemble_wc(g, pol);
        const DenseMatrixC wc_f = assemble_wc(flipped, pol_f);
        // flipping every contrast rotates each sqrt(-chi_n) by +-i (the
        // branch direction depends on the original sign), so entry (i,j)
        // flips sign when sigma_i == sigma_j and keeps it otherwise, up to
        // the rescaled chi magnitudes
        for (Eigen::Index i = 0; i < wc.rows(); ++i)
            for (Eigen::Index j = 0; j < wc.cols(); ++j) {
                const std::size_t si = std::size_t(i), sj = std::size_t(j);
                const double mi =
                    std::sqrt(std::abs(pol_f.chis[si]) / std::abs(pol.chis[si]));
                const double mj =
                    std::sqrt(std::abs(pol_f.chis[sj]) / std::abs(pol.chis[sj]));
                const bool same_sign =
                    (g.kappas[si] >= 0.0) == (g.kappas[sj] >= 0.0);
                const double flip = same_sign ? 1.0 : -1.0;
                CHECK(std::abs(wc_f(i, j) + flip * mi * mj * wc(i, j)) <=
                      1e-12 * (1.0 + std::abs(wc(i, j))));
            }
    }
}

TEST_CASE("spectrum of W_c negates under a global contrast flip (no self-energy)") {
    // with the self-energy off, chi = -v*delta_alpha exactly, so the flipped
    // kernel is similar to the negated one and the spectra match as multisets
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 5; ++trial) {
        const VoxelGrid g = testing::random_grid(rng);
        VoxelGrid flipped = g;
        for (auto& k : flipped.kappas) k = -k;
        const SpectrumC a =
            eig_general_all(assemble_wc(g, polarizabilities(g, false)));
        SpectrumC b = eig_general_all(
            assemble_wc(flipped, polarizabilities(flipped, false)));
        // negate and re-sort under the deterministic order, then compare
        for (auto& w : b.values) w = -w;
        std::sort(b.values.begin(), b.values.end(),
                  [](const std::complex<double>& x,
                     const std::complex<double>& y) {
                      if (x.real() != y.real()) return x.real() > y.real();
                      return x.imag() > y.imag();
                  });
        REQUIRE(a.values.size() == b.values.size());
        // nearest-match as multisets: the deterministic sort can swap members
        // of conjugate pairs whose real parts agree only to rounding
        std::vector<bool> used(b.values.size(), false);
        for (const auto& w : a.values) {
            double best = 1e300;
            std::size_t best_j = 0;
            for (std::size_t j = 0; j < b.values.size(); ++j) {
                if (used[j]) continue;
                const double d = std::abs(w - b.values[j]);
                if (d < best) {
                    best = d;
                    best_j = j;
                }
            }
            used[best_j] = true;
            CHECK(best <= 1e-10);
        }
    }
}

TEST_CASE("W_c branch independence: spectrum invariant under sign choices") {
    // flipping the branch of sqrt(-chi_n) on any subset conjugates W_c by a
    // diagonal +-1 matrix, leaving the spectrum unchanged
    std::mt19937_64 rng(41);
    const VoxelGrid g = testing::random_grid(rng);
    const Polarizabilities pol = polarizabilities(g);
    const DenseMatrixC wc = assemble_wc(g, pol);
    const Eigen::Index n = wc.rows();
    Eigen::VectorXd flips(n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) flips(i) = u(rng) < 0.5 ? -1.0 : 1.0;
    const DenseMatrixC conj =
        flips.asDiagonal() * wc * flips.asDiagonal();
    const SpectrumC a = eig_general_all(wc);
    const SpectrumC b = eig_general_all(conj);
    for (std::size_t i = 0; i < a.values.size(); ++i)
        CHECK(std::abs(a.values[i] - b.values[i]) <= 1e-10);
}

TEST_CASE("sign operator tracks contrast signs") {
    const VoxelGrid g = build_two_cubes(0.25, 0.05, 0.2, 1.0, -1.0);
    const SignOperator sigma = assemble_sigma(g);
    REQUIRE(sigma.signs.size() == g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(sigma.signs[i] == (g.kappas[i] >= 0.0 ? 1.0 : -1.0));
}

TEST_CASE("probe matrices: shapes, values, and reciprocity") {
    const VoxelGrid g = build_cube(0.15, 0.05, 1.0);
    ProbeLayout probes;
    probes.sources = {{3.0, 0.0, 0.0}, {0.0, 3.0, 0.0}};
    probes.detectors = {{-3.0, 0.0, 0.0}, {0.0, -3.0, 0.0}, {0.0, 0.0, 3.0}};
    const ProbeMatrices pm = assemble_probes(g, probes);
    CHECK(pm.g0_dv.rows() == 3);
    CHECK(pm.g0_dv.cols() == 27);
    CHECK(pm.g0_vs.rows() == 27);
    CHECK(pm.g0_vs.cols() == 2);
    CHECK(pm.g0_ds.rows() == 3);
    CHECK(pm.g0_ds.cols() == 2);
    CHECK(pm.g0_ds(0, 0) ==
          doctest::Approx(g_free(probes.detectors[0], probes.sources[0],
                                 g.medium))
              .epsilon(1e-15));

    // reciprocity: swapping source and detector roles transposes the blocks
    ProbeLayout swapped;
    swapped.sources = probes.detectors;
    swapped.detectors = probes.sources;
    const ProbeMatrices pm2 = assemble_probes(g, swapped);
    CHECK((pm2.g0_ds - pm.g0_ds.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((pm2.g0_vs - pm.g0_dv.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("incident field scales with source strength") {
    const VoxelGrid g = build_cube(0.15, 0.05, 1.0);
    ProbeLayout unit;
    unit.sources = {{2.0, 1.0, 0.0}};
    ProbeLayout strong = unit;
    strong.strengths = {2.5};
    const DenseMatrixR u1 = incident_field(g, unit);
    const DenseMatrixR u2 = incident_field(g, strong);
    CHECK((u2 - 2.5 * u1).cwiseAbs().maxCoeff() <=
          1e-15 * u2.cwiseAbs().maxCoeff());
    CHECK(u1(0, 0) ==
          doctest::Approx(g_free(g.centers[0], unit.sources[0], g.medium))
              .epsilon(1e-15));
}
