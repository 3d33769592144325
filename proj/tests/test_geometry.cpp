#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "diffborn/geometry.hpp"
#include "test_support.hpp"

using namespace diffborn;

namespace {

bool grids_identical(const VoxelGrid& a, const VoxelGrid& b) {
    if (a.size() != b.size() || a.h != b.h) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.centers[i] != b.centers[i]) return false;
        if (a.kappas[i] != b.kappas[i]) return false;
    }
    return true;
}

double min_pairwise_distance(const VoxelGrid& g) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = i + 1; j < g.size(); ++j)
            best = std::min(best, (g.centers[i] - g.centers[j]).norm());
    return best;
}

} // namespace

TEST_CASE("build_cube voxel counts") {
    CHECK(build_cube(0.5, 0.05, 1.0).size() == 1000);
    const VoxelGrid single = build_cube(0.05, 0.05, 1.0);
    CHECK(single.size() == 1);
    CHECK(single.centers[0].norm() < 1e-12);
    CHECK_THROWS_AS(build_cube(0.5, 0.04, 1.0), NonCommensurate);
}

TEST_CASE("build_cube lattice and ordering invariants") {
    const VoxelGrid g = build_cube(0.25, 0.05, 1.0); // 125 voxels
    CHECK(g.size() == 125);
    CHECK(min_pairwise_distance(g) >= g.h * (1.0 - 1e-9));
    CHECK(std::is_sorted(g.centers.begin(), g.centers.end(),
                         detail::LexLess{}));
    // deterministic: identical inputs give identical grids
    CHECK(grids_identical(g, build_cube(0.25, 0.05, 1.0)));
}

TEST_CASE("zero-contrast voxels are dropped") {
    CHECK(build_cube(0.5, 0.05, 0.0).empty());
}

TEST_CASE("build_cube rejects the polarizability pole") {
    const Medium medium;
    const double qf = q_self(medium.lambda_d / 20.0, medium);
    CHECK_THROWS_AS(build_cube(0.5, 0.05, -1.0 / qf), PoleContrast);
}

TEST_CASE("build_two_cubes counts, gap, and signs") {
    const VoxelGrid g = build_two_cubes(0.5, 0.05, 1.0, 1.0, 1.0);
    CHECK(g.size() == 2000);
    // surface gap 0.5 lambda_d: nearest centers across the gap are h + gap apart
    double min_cross = std::numeric_limits<double>::infinity();
    for (const auto& a : g.centers)
        for (const auto& b : g.centers)
            if (a.x() < 0 && b.x() > 0)
                min_cross = std::min(min_cross, b.x() - a.x());
    const Medium medium;
    CHECK(min_cross == doctest::Approx(0.5 * medium.lambda_d + g.h).epsilon(1e-12));

    const VoxelGrid opp = build_two_cubes(0.5, 0.05, 0.1, 1.0, -1.0);
    CHECK(opp.size() == 2000);
    CHECK(std::count(opp.kappas.begin(), opp.kappas.end(), 1.0) == 1000);
    CHECK(std::count(opp.kappas.begin(), opp.kappas.end(), -1.0) == 1000);
}

TEST_CASE("build_two_cubes merged case tiles a box") {
    const VoxelGrid g = build_two_cubes(0.25, 0.05, 0.0, 1.0, 1.0);
    CHECK(g.size() == 250);
    CHECK(min_pairwise_distance(g) >= g.h * (1.0 - 1e-9));
    // same center set as a 2m x m x m box built directly
    VoxelGrid box;
    box.h = g.h;
    const int m = 5;
    for (int i = 0; i < 2 * m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                box.centers.emplace_back((i + 0.5 - m) * g.h,
                                         (j + 0.5 - 0.5 * m) * g.h,
                                         (k + 0.5 - 0.5 * m) * g.h);
    REQUIRE(box.centers.size() == g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK((g.centers[i] - box.centers[i]).norm() < 1e-12);
}

TEST_CASE("build_two_cubes rejects unrepresentable gaps") {
    CHECK_THROWS_AS(build_two_cubes(0.5, 0.05, 0.05, 1.0, 1.0),
                    NonCommensurate);
}

TEST_CASE("build_sandwich layer pattern") {
    const VoxelGrid g = build_sandwich(0.75, 0.05, 1.0);
    CHECK(g.size() == 3375);
    double sum = 0.0;
    for (double k : g.kappas) sum += k;
    CHECK(sum == doctest::Approx(225.0)); // (8 - 7) * 225 per the layer parity
    CHECK(build_sandwich(0.05, 0.05, 1.0).size() == 1);
    CHECK(build_sandwich(0.05, 0.05, 1.0).kappas[0] == 1.0);
}

TEST_CASE("build_embedded counts and non-additive contrasts") {
    const VoxelGrid g = build_embedded(1.05, 0.55, 0.05, 1.0, -1.0);
    CHECK(g.size() == 9261);
    const auto inner =
        std::count(g.kappas.begin(), g.kappas.end(), -1.0);
    CHECK(inner == 1331);
    CHECK(std::count(g.kappas.begin(), g.kappas.end(), 1.0) == 9261 - 1331);
    CHECK_THROWS_AS(build_embedded(0.5, 0.5, 0.05, 1.0, -1.0), GeometryError);
    // degenerate merge: equal contrasts reproduce the plain cube
    CHECK(grids_identical(build_embedded(0.25, 0.15, 0.05, 1.0, 1.0),
                          build_cube(0.25, 0.05, 1.0)));
}

TEST_CASE("enclosing_radius basic cases") {
    const VoxelGrid single = build_cube(0.05, 0.05, 1.0);
    CHECK(enclosing_radius(single) ==
          doctest::Approx(single.h * std::sqrt(3.0) / 2.0).epsilon(1e-12));

    const Medium medium;
    const VoxelGrid cube = build_cube(0.5, 0.05, 1.0);
    CHECK(enclosing_radius(cube) ==
          doctest::Approx(std::sqrt(3.0) * 0.5 * medium.lambda_d / 2.0)
              .epsilon(1e-9));

    VoxelGrid empty;
    CHECK_THROWS_AS(enclosing_radius(empty), EmptyGrid);
}

TEST_CASE("enclosing_radius is translation invariant") {
    const VoxelGrid g = build_two_cubes(0.25, 0.05, 0.4, 1.0, 1.0);
    const double a0 = enclosing_radius(g);
    VoxelGrid shifted = g;
    const Eigen::Vector3d t(13.7, -2.9, 0.41);
    for (auto& c : shifted.centers) c += t;
    CHECK(enclosing_radius(shifted) == doctest::Approx(a0).epsilon(1e-12));
}

TEST_CASE("enclosing_radius vs brute-force corner scan") {
    const VoxelGrid g = build_two_cubes(0.5, 0.05, 1.0, 1.0, 1.0);
    const double a = enclosing_radius(g);
    const detail::Ball ball = detail::min_enclosing_ball(g.centers);
    // every voxel corner must fit inside the padded ball
    double max_corner = 0.0;
    for (const auto& c : g.centers)
        for (int sx : {-1, 1})
            for (int sy : {-1, 1})
                for (int sz : {-1, 1}) {
                    const Eigen::Vector3d corner =
                        c + 0.5 * g.h * Eigen::Vector3d(sx, sy, sz);
                    max_corner = std::max(max_corner, (corner - ball.c).norm());
                }
    CHECK(max_corner <= a + 1e-12);
    CHECK(a <= max_corner + 0.25 * g.h); // pad alignment slack
}

TEST_CASE("min_enclosing_ball is tight on random point sets") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Eigen::Vector3d> pts;
        for (int i = 0; i < 40; ++i)
            pts.emplace_back(u(rng), u(rng), u(rng));
        const detail::Ball b = detail::min_enclosing_ball(pts);
        const double r = std::sqrt(b.r2);
        double max_d = 0.0;
        for (const auto& p : pts) max_d = std::max(max_d, (p - b.c).norm());
        CHECK(max_d <= r * (1.0 + 1e-9) + 1e-12);
        // optimality: no strictly smaller ball centered at the centroid
        Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
        for (const auto& p : pts) centroid += p;
        centroid /= static_cast<double>(pts.size());
        double centroid_r = 0.0;
        for (const auto& p : pts)
            centroid_r = std::max(centroid_r, (p - centroid).norm());
        CHECK(r <= centroid_r + 1e-9);
    }
}

TEST_CASE("validate diagnostics") {
    const VoxelGrid clean = build_cube(0.25, 0.05, 1.0);
    CHECK(validate(clean).empty());

    VoxelGrid bad = clean;
    bad.kappas[3] = -1.5;
    const auto diags = validate(bad);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].kind == DiagnosticKind::NotPhysicallyAllowable);
    CHECK(diags[0].voxel == 3);

    const VoxelGrid strong = build_cube(0.25, 0.05, 4.0);
    const auto strong_diags = validate(strong);
    CHECK(strong_diags.size() == strong.size());
    for (const auto& d : strong_diags)
        CHECK(d.kind == DiagnosticKind::ExceedsTheorem);

    VoxelGrid pole = clean;
    pole.kappas[0] = -1.0 / q_self(pole.h, pole.medium);
    bool found_pole = false;
    for (const auto& d : validate(pole))
        found_pole = found_pole || d.kind == DiagnosticKind::PoleProximity;
    CHECK(found_pole);
}

TEST_CASE("random grids satisfy the stored-support invariants") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 25; ++trial) {
        const VoxelGrid g = testing::random_grid(rng);
        CHECK(min_pairwise_distance(g) >= g.h * (1.0 - 1e-9));
        for (double k : g.kappas) CHECK(k != 0.0);
    }
}
