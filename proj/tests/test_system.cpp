#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "gabor/system.hpp"
#include "oracles.hpp"

using namespace gabor;
using Catch::Approx;

namespace {

GaborSystem unit_cube_system(std::vector<SpectrumPoint> pts, double trunc) {
    return make_system(make_cube(2, 1.0), std::move(pts), trunc);
}

SpectrumPoint pt(std::initializer_list<double> a, std::initializer_list<double> b) {
    return SpectrumPoint{Vec(a), Vec(b)};
}

}  // namespace

TEST_CASE("system normalization satisfies n^2 |K| = 1") {
    for (const auto& body :
         {make_ball(2, 1.0), make_ellipsoid_semiaxes(Vec{2.0, 1.0}), make_cube(2, 1.0)}) {
        auto sys = make_system(body, {}, 10.0);
        CHECK(sys.normalization * sys.normalization * volume(body) == Approx(1.0).margin(1e-10));
    }
    CHECK_THROWS_AS(make_system(make_ball(2, 1.0), {pt({9.0, 9.0}, {9.0, 9.0})}, 5.0),
                    InvalidArgument);
}

TEST_CASE("stft: cube/cube closed form") {
    auto g = make_cube(2, 1.0);
    auto f = cube_function(Vec{0.0, 0.0}, 1.0);
    // unit-norm inner product at the origin of phase space
    CHECK(std::real(stft(f, g, 1.0, Vec{0.0, 0.0}, Vec{0.0, 0.0})) == Approx(1.0));
    // full-period oscillation across the common support
    CHECK(std::abs(stft(f, g, 1.0, Vec{0.0, 0.0}, Vec{1.0, 0.0})) < 1e-14);
    // disjoint supports
    CHECK(std::abs(stft(f, g, 1.0, Vec{2.5, 0.0}, Vec{0.3, 0.1})) == 0.0);
}

TEST_CASE("stft covariance under simultaneous time translation") {
    auto g = make_cube(2, 1.0);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        Vec t{u(rng), u(rng)}, nu{u(rng), u(rng)}, shift{u(rng), u(rng)};
        auto f0 = cube_function(Vec{0.0, 0.0}, 0.5);
        auto f1 = cube_function(shift, 0.5);
        double m0 = std::abs(stft(f0, g, 1.0, t, nu));
        double m1 = std::abs(stft(f1, g, 1.0, t + shift, nu));
        CHECK(m0 == Approx(m1).margin(1e-12));
    }
}

TEST_CASE("orthogonality defect examples") {
    auto sys = unit_cube_system({}, 10.0);
    // adjacent time shift: essentially disjoint supports
    CHECK(orthogonality_defect(sys, pt({0.0, 0.0}, {0.0, 0.0}), pt({1.0, 0.0}, {0.0, 0.0})) ==
          0.0);
    // pure frequency shift: exact sinc zero
    CHECK(orthogonality_defect(sys, pt({0.0, 0.0}, {0.0, 0.0}), pt({0.0, 0.0}, {1.0, 0.0})) <
          1e-14);
    CHECK_THROWS_AS(
        orthogonality_defect(sys, pt({0.0, 0.0}, {0.0, 0.0}), pt({0.0, 0.0}, {0.0, 0.0})),
        InvalidArgument);

    // disk window: frequency gap at the first zero of the transform
    auto disk_sys = make_system(make_ball(2, 1.0), {}, 10.0);
    double z1 = 0.0;
    {
        double lo = 0.5, hi = 0.7;  // first positive zero of J1(2 pi t)/t is ~0.61
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (lo + hi);
            if ((oracle::disk_transform(lo) < 0.0) == (oracle::disk_transform(mid) < 0.0)) lo = mid;
            else hi = mid;
        }
        z1 = 0.5 * (lo + hi);
    }
    CHECK(orthogonality_defect(disk_sys, pt({0.3, -0.2}, {0.0, 0.0}),
                               pt({0.3, -0.2}, {z1, 0.0}), 1e-10) < 1e-6);
}

TEST_CASE("gram_scan on the lattice system is orthogonal to 1e-9") {
    auto sys = lattice_onb(Mat::identity(2), 5.0);
    REQUIRE(sys.spectrum.size() > 100);
    auto res = gram_scan(sys, 1e-9);
    CHECK(res.max_defect <= 1e-9);
    CHECK(res.above_threshold == 0);
    CHECK_FALSE(res.pruned);

    // multithreaded scan agrees
    auto res4 = gram_scan(sys, 1e-9, 0.0, 4);
    CHECK(res4.max_defect == res.max_defect);
}

TEST_CASE("gram_scan flags a perturbed lattice point") {
    auto sys = lattice_onb(Mat::identity(2), 5.0);
    // move one point by 0.3 in time
    for (auto& p : sys.spectrum) {
        if (p.a == Vec{0.0, 0.0} && p.b == Vec{0.0, 0.0}) {
            p.a[0] = 0.3;
            break;
        }
    }
    auto res = gram_scan(sys, 0.01);
    CHECK(res.max_defect > 0.01);
    // worst pair reported: overlap 0.3 with an axis neighbor
    CHECK(res.max_defect == Approx(0.3).epsilon(0.01));
}

TEST_CASE("gram_scan is vacuous on a single point") {
    auto sys = unit_cube_system({pt({0.0, 0.0}, {0.0, 0.0})}, 5.0);
    auto res = gram_scan(sys, 1e-9);
    CHECK(res.max_defect == 0.0);
}

TEST_CASE("gram_scan pruned mode matches the quadratic scan") {
    auto sys = lattice_onb(Mat::identity(2), 4.0);
    auto full = gram_scan(sys, 1e-9);
    auto pruned = gram_scan(sys, 1e-9, 0.0, 1, /*quadratic_cap=*/10);
    CHECK(pruned.pruned);
    CHECK(pruned.max_defect == Approx(full.max_defect).margin(1e-12));
}

TEST_CASE("separation of lattices") {
    auto sys = lattice_onb(Mat::identity(2), 5.0);
    CHECK(separation(sys) == Approx(1.0));

    auto half = lattice_onb(Mat::diagonal(Vec{0.5, 0.5}), 3.0);
    CHECK(separation(half) == Approx(0.5));

    auto two = unit_cube_system({pt({0.2, 0.2}, {0.0, 0.0}), pt({0.2, 0.2}, {0.0, 0.0})}, 5.0);
    CHECK(separation(two) == 0.0);

    auto one = unit_cube_system({pt({0.0, 0.0}, {0.0, 0.0})}, 5.0);
    CHECK_THROWS_AS(separation(one), UndefinedResult);
}

TEST_CASE("separation grid path agrees with the quadratic path") {
    // force the grid path with a spectrum beyond the quadratic threshold
    auto sys = lattice_onb(Mat::identity(2), 9.0);
    REQUIRE(sys.spectrum.size() > 4000);
    CHECK(separation(sys) == Approx(1.0));
}

TEST_CASE("covering radius of the unit lattice") {
    auto sys = lattice_onb(Mat::identity(2), 10.0);
    auto cov = covering_radius(sys, 2.0);
    CHECK(cov.side <= 2.0);
}

TEST_CASE("covering radius detects a planted empty cube") {
    auto sys = lattice_onb(Mat::identity(2), 10.0);
    // empty the side-3 cube [1, 4) x [1, 4) x [1, 4) x [1, 4)
    std::vector<SpectrumPoint> kept;
    for (const auto& p : sys.spectrum) {
        bool inside = true;
        for (int k = 0; k < 2; ++k)
            inside = inside && p.a[k] >= 1.0 && p.a[k] < 4.0 && p.b[k] >= 1.0 && p.b[k] < 4.0;
        if (!inside) kept.push_back(p);
    }
    auto planted = make_system(sys.window_body, std::move(kept), sys.truncation_radius);
    auto cov = covering_radius(planted, 2.0);
    CHECK(cov.side >= 3.0);
    CHECK(cov.has_witness);
    // the witness cube sits inside the emptied region
    for (int k = 0; k < 2; ++k) {
        CHECK(cov.witness_center.a[k] > 0.5);
        CHECK(cov.witness_center.a[k] < 4.5);
    }
}

TEST_CASE("covering radius of a seeded uniform sample is finite and witnessed") {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> u(-8.0, 8.0);
    std::vector<SpectrumPoint> pts;
    for (int i = 0; i < 4096; ++i) {
        SpectrumPoint p{Vec(2), Vec(2)};
        for (int k = 0; k < 2; ++k) {
            p.a[k] = u(rng);
            p.b[k] = u(rng);
        }
        if (p.a.norm2() + p.b.norm2() <= 100.0) pts.push_back(p);
    }
    auto sys = unit_cube_system(std::move(pts), 10.0);
    auto cov = covering_radius(sys, 2.0);
    CHECK(cov.side > 0.0);
    CHECK(cov.side < 16.0);
}

TEST_CASE("beurling density of lattices matches the determinant") {
    auto sys = lattice_onb(Mat::identity(2), 21.0);
    auto est = beurling_density(sys, {20.0});
    REQUIRE(est.size() == 1);
    REQUIRE_FALSE(est[0].skipped);
    CHECK(est[0].lower == Approx(1.0).margin(0.05));
    CHECK(est[0].upper == Approx(1.0).margin(0.05));

    // oversized window is skipped with a flag
    auto big = beurling_density(sys, {100.0});
    CHECK(big[0].skipped);
}

TEST_CASE("beurling density of the hybrid (1/2)Z x Z^3 lattice is 2") {
    Mat A(2), B(2);
    A(0, 0) = 0.5;
    A(1, 1) = 1.0;
    B = Mat::identity(2);
    double T = 21.0;
    auto pts = make_lattice_spectrum(A, B, T, T);
    std::vector<SpectrumPoint> ball;
    for (const auto& p : pts)
        if (p.a.norm2() + p.b.norm2() <= T * T) ball.push_back(p);
    auto sys = make_system(make_box(Vec{0.5, 1.0}), std::move(ball), T);
    auto est = beurling_density(sys, {20.0});
    REQUIRE_FALSE(est[0].skipped);
    CHECK(est[0].lower == Approx(2.0).epsilon(0.05));
    CHECK(est[0].upper == Approx(2.0).epsilon(0.05));
}

TEST_CASE("localized lower density") {
    auto sys = lattice_onb(Mat::identity(2), 12.0);
    BoxRegion region{Vec{0.0, 0.0}, Vec{1.0, 1.0}};
    auto est = localized_lower_density(sys, region, 1.0, 10.0);
    REQUIRE_FALSE(est.skipped);
    CHECK(est.lower == Approx(1.0).margin(0.05));

    // slab spectrum: frequencies confined to |b1| <= 1 lose density for large h
    std::vector<SpectrumPoint> slab;
    for (const auto& p : sys.spectrum)
        if (std::abs(p.b[0]) <= 1.0) slab.push_back(p);
    auto slab_sys = make_system(sys.window_body, std::move(slab), sys.truncation_radius);
    auto est2 = localized_lower_density(slab_sys, region, 1.0, 10.0);
    CHECK(est2.lower <= 0.5);
}

TEST_CASE("tiling defect of the deep-frequency lattice system") {
    auto sys = lattice_onb_cylinder(Mat::identity(2), 3.5, 100.0);
    auto f = cube_function(Vec{0.0, 0.0}, 0.5);
    auto probes = random_probes(2, 20, 2.0, 0);
    auto rep = tiling_defect(sys, f, probes);
    CHECK(rep.max_defect <= 5e-2);
    // packing side: sums never exceed 1 + 5e-2
    CHECK(rep.max_sum <= 1.0 + 5e-2);
}

TEST_CASE("tiling defect detects a decimated lattice") {
    auto sys = lattice_onb_cylinder(Mat::identity(2), 3.5, 60.0);
    std::vector<SpectrumPoint> kept;
    for (const auto& p : sys.spectrum) {
        long s = 0;
        for (int k = 0; k < 2; ++k)
            s += std::llround(p.a[k]) + std::llround(p.b[k]);
        if (s % 2 == 0) kept.push_back(p);
    }
    auto dec = make_system(sys.window_body, std::move(kept), sys.truncation_radius);
    auto f = cube_function(Vec{0.0, 0.0}, 0.5);
    auto probes = random_probes(2, 20, 2.0, 0);
    auto rep = tiling_defect(dec, f, probes);
    CHECK(rep.min_sum <= 0.6);
}

TEST_CASE("tiling defect of an empty spectrum is 1 everywhere") {
    auto sys = unit_cube_system({}, 10.0);
    auto f = cube_function(Vec{0.0, 0.0}, 0.5);
    auto rep = tiling_defect(sys, f, random_probes(2, 5, 1.0, 3));
    CHECK(rep.max_defect == Approx(1.0));
    CHECK(rep.max_sum == 0.0);
}

TEST_CASE("lattice_onb: scaled lattice and its dual") {
    auto sys = lattice_onb(Mat::diagonal(Vec{2.0, 1.0}), 5.0);
    CHECK(sys.window_body.sides[0] == Approx(2.0));
    // frequency shifts live on diag(1/2, 1) Z^2
    for (const auto& p : sys.spectrum) {
        CHECK(std::abs(p.b[0] * 2.0 - std::round(p.b[0] * 2.0)) < 1e-12);
        CHECK(std::abs(p.b[1] - std::round(p.b[1])) < 1e-12);
        CHECK(std::abs(p.a[0] / 2.0 - std::round(p.a[0] / 2.0)) < 1e-12);
    }
    CHECK(gram_scan(sys, 1e-9).max_defect <= 1e-9);

    CHECK_THROWS_AS(
        [] {
            Mat m = Mat::identity(2);
            m(0, 1) = 0.3;
            return lattice_onb(m, 3.0);
        }(),
        UnsupportedBody);
}

TEST_CASE("lattice_onb density example at small truncation") {
    auto sys = lattice_onb(Mat::identity(2), 3.0);
    auto est = beurling_density(sys, {2.0});
    REQUIRE_FALSE(est[0].skipped);
    CHECK(est[0].lower == Approx(1.0));
    CHECK(est[0].upper == Approx(1.0));
}

TEST_CASE("gram_scan over mixed scales stays orthogonal") {
    for (double s : {0.5, 1.0, 2.0}) {
        auto sys = lattice_onb(Mat::diagonal(Vec{s, 1.0}), 4.0);
        CHECK(gram_scan(sys, 1e-9).max_defect <= 1e-9);
    }
}
