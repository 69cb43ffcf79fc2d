#pragma once
#include <cmath>
#include <random>
#include <vector>

#include "gabor/certificate.hpp"

namespace gabor {

/// A spectrum with a known planted triple, plus uniform noise points.
struct PlantedFixture {
    std::vector<SpectrumPoint> spectrum;
    Triple planted;
    double truncation_radius = 0.0;
};

/// Plants three points with equal-to-within-cell time shifts and exactly
/// collinear frequency gaps {r, r, 2r}, then adds uniformly seeded noise that
/// avoids the planted time cell. Deterministic for a fixed seed.
inline PlantedFixture plant_triple_spectrum(int d, double r, double R, int noise_points,
                                            uint64_t seed) {
    if (!(r >= 2.0) || !(R >= 10.0 * r))
        throw InvalidArgument("plant_triple_spectrum: need r >= 2 and R >= 10 r");
    PlantedFixture fix;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> ua(-1.4, 1.4);
    std::uniform_real_distribution<double> ub(-1.0, 1.0);

    Vec u(d);
    do {
        for (int k = 0; k < d; ++k) u[k] = gauss(rng);
    } while (u.norm() < 1e-3);
    u = u.normalized();

    const double cell = 1.0 / (100.0 * r * std::sqrt(static_cast<double>(d)));
    Vec a0(d);
    for (int k = 0; k < d; ++k) a0[k] = 0.25 * ub(rng);  // inside the default base cube reach
    Vec b0(d);
    for (int k = 0; k < d; ++k) b0[k] = 0.15 * R * ub(rng);

    std::array<SpectrumPoint, 3> planted;
    for (int i = 0; i < 3; ++i) {
        Vec da(d);
        for (int k = 0; k < d; ++k) da[k] = 0.25 * cell * ub(rng);
        planted[static_cast<size_t>(i)] =
            SpectrumPoint{a0 + da, b0 + (static_cast<double>(i) * r) * u};
    }
    fix.planted.points = planted;
    fix.planted.r = r;
    fix.planted.line_direction = u;
    fix.planted.line_deviation = 0.0;
    auto bad = triple_violation(fix.planted);
    if (!bad.empty()) throw InvalidArgument("plant_triple_spectrum: fixture invalid: " + bad);

    for (const auto& p : planted) fix.spectrum.push_back(p);
    int made = 0;
    while (made < noise_points) {
        SpectrumPoint p{Vec(d), Vec(d)};
        for (int k = 0; k < d; ++k) p.a[k] = ua(rng);
        for (int k = 0; k < d; ++k) p.b[k] = R * ub(rng);
        if (p.b.norm() > R) continue;
        if ((p.a - a0).norm_inf() < 2.0 * cell) continue;  // keep the planted cell clean
        fix.spectrum.push_back(p);
        ++made;
    }
    double amax = 0.0;
    for (const auto& p : fix.spectrum) amax = std::max(amax, p.a.norm());
    fix.truncation_radius = std::sqrt(amax * amax + R * R) + 1.0;
    return fix;
}

/// Unit-disk spectrum whose extracted triple has all three pairwise frequency
/// gaps sitting at true zeros of the disk transform. Exactly collinear
/// triples cannot do this (the largest gap is the sum of the other two while
/// the zero set is offset by (d-1)/8), so the middle point is bent transverse
/// to the line; at desk scale the 1/r deviation budget absorbs the bend.
struct EngineeredFixture {
    std::vector<SpectrumPoint> spectrum;
    double r = 0.0;          // extraction scale matching the planted gaps
    double zero_a = 0.0;     // transform zero used for the two short gaps
    double zero_c = 0.0;     // transform zero used for the long gap
    double truncation_radius = 0.0;
};

inline EngineeredFixture engineered_zeros_spectrum(const BodyDescriptor& body, int zero_short = 4,
                                                   int zero_long = 8, int decoys = 3,
                                                   double quad_tol = 1e-10) {
    if (body.dim != 2 || body.family != BodyFamily::Ball || body.radius != 1.0)
        throw InvalidArgument("engineered_zeros_spectrum: unit disk windows only");
    EngineeredFixture fix;
    // bracket the true zeros around the leading-phase zeros 1/8 + m/2 (the
    // true zeros sit a few 1e-3 below them at these magnitudes)
    auto zero_near = [&](int m) {
        double lead = 0.125 + 0.5 * m;
        return find_transform_zero(body, Vec{1.0, 0.0}, lead - 0.05, lead + 0.01, quad_tol);
    };
    fix.zero_a = zero_near(zero_short);
    fix.zero_c = zero_near(zero_long);
    const double za = fix.zero_a, zc = fix.zero_c;
    if (!(zc < 2.0 * za))
        throw InvalidArgument("engineered_zeros_spectrum: zero pair admits no bend");
    const double s = 0.5 * zc;
    const double vw = std::sqrt(za * za - s * s);  // total transverse bend
    const double v = 0.5 * vw;

    // r so that the gaps {za, za, zc} lie in [r, 2r] and the bend fits 1/r
    const double r_lo = 0.5 * zc, r_hi = za;
    fix.r = 0.5 * (r_lo + r_hi);
    if (fix.r < 2.0) throw InvalidArgument("engineered_zeros_spectrum: zeros too low for r >= 2");
    if (2.0 * vw / 3.0 > 1.0 / fix.r)
        throw InvalidArgument("engineered_zeros_spectrum: bend exceeds the deviation budget");

    const Vec a0{0.03, -0.02};
    fix.spectrum.push_back(SpectrumPoint{a0, Vec{-s, v}});
    fix.spectrum.push_back(SpectrumPoint{a0, Vec{0.0, -v}});
    fix.spectrum.push_back(SpectrumPoint{a0, Vec{s, v}});

    // far time-separated decoys: exactly orthogonal to everything
    for (int i = 0; i < decoys; ++i) {
        double x = 6.0 + 2.0 * i;
        fix.spectrum.push_back(SpectrumPoint{Vec{x, x}, Vec{0.4 * i, -0.3 * i}});
    }
    double rad = 0.0;
    for (const auto& p : fix.spectrum)
        rad = std::max(rad, std::sqrt(p.a.norm2() + p.b.norm2()));
    fix.truncation_radius = rad + 1.0;
    return fix;
}

/// Desk-scale analogue for d = 1 mod 4: ball window in R^5 and a collinear
/// equal-time triple with gaps on the zero set of the leading phase, which is
/// the half-integer grid there, so all residuals vanish and the (d-1)/4 term
/// is an integer.
inline PlantedFixture absorbed_fixture_d5(double gap = 2.5) {
    const int d = 5;
    PlantedFixture fix;
    Vec a0(d);
    Vec b0(d);
    Vec u = Vec::unit(d, 0);
    for (int i = 0; i < 3; ++i)
        fix.spectrum.push_back(SpectrumPoint{a0, b0 + (static_cast<double>(i) * gap) * u});
    fix.planted.points = {fix.spectrum[0], fix.spectrum[1], fix.spectrum[2]};
    fix.planted.r = gap;
    fix.planted.line_direction = u;
    fix.planted.line_deviation = 0.0;
    fix.truncation_radius = 2.0 * gap + 1.0;
    return fix;
}

}  // namespace gabor
