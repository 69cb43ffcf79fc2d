#pragma once
// Independent oracles for the test suite. Everything here is implemented from
// textbook series/closed forms and deliberately shares no code with the
// library's quadrature path.
#include <cmath>
#include <numbers>
#include <vector>

#include "gabor/geometry.hpp"

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

/// Bessel J1 from the power series (z <= 16) and the Hankel asymptotic
/// expansion beyond. Accurate to ~1e-10 relative over the range we test.
inline double bessel_j1(double z) {
    const double az = std::abs(z);
    const double sign = z < 0 ? -1.0 : 1.0;
    if (az <= 16.0) {
        // (z/2) sum_m (-1)^m (z^2/4)^m / (m! (m+1)!)
        const double q = az * az / 4.0;
        double term = az / 2.0;
        double sum = term;
        for (int m = 1; m < 60; ++m) {
            term *= -q / (m * (m + 1.0));
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
        }
        return sign * sum;
    }
    // Hankel: J1(z) = sqrt(2/(pi z)) [P cos(chi) - Q sin(chi)], chi = z - 3 pi/4
    const double mu = 4.0;  // 4 nu^2 with nu = 1
    double c = 1.0;
    double P = 0.0, Q = 0.0;
    for (int k = 0; k <= 10; ++k) {
        double term = c;
        int grp = k % 4;
        if (grp == 0) P += term;
        else if (grp == 1) Q += term;
        else if (grp == 2) P -= term;
        else Q -= term;
        c *= (mu - (2.0 * k + 1.0) * (2.0 * k + 1.0)) / (8.0 * az * (k + 1.0));
    }
    const double chi = az - 3.0 * kPi / 4.0;
    return sign * std::sqrt(2.0 / (kPi * az)) * (P * std::cos(chi) - Q * std::sin(chi));
}

/// Transform of the indicator of the disk of radius R in the plane:
/// R J1(2 pi R t) / t at radial frequency t, area at t = 0.
inline double disk_transform(double t, double R = 1.0) {
    if (t == 0.0) return kPi * R * R;
    return R * bessel_j1(2.0 * kPi * R * t) / t;
}

/// Transform of the indicator of the ball of radius R in R^3.
inline double ball3_transform(double t, double R = 1.0) {
    if (t == 0.0) return 4.0 / 3.0 * kPi * R * R * R;
    const double x = 2.0 * kPi * R * t;
    return (std::sin(x) - x * std::cos(x)) / (2.0 * kPi * kPi * t * t * t);
}

/// Area of the lens formed by two circles of radius r at center distance delta.
inline double lens_area(double r, double delta) {
    if (delta >= 2.0 * r) return 0.0;
    return 2.0 * r * r * std::acos(delta / (2.0 * r)) -
           (delta / 2.0) * std::sqrt(4.0 * r * r - delta * delta);
}

/// Gaussian curvature of an axis-aligned ellipsoid with the given semi-axes at
/// the boundary point x: (prod a_i)^{-2} (sum x_i^2 / a_i^4)^{-(d+1)/2}.
inline double ellipsoid_curvature(const gabor::Vec& semi_axes, const gabor::Vec& x) {
    const int d = semi_axes.dim();
    double prod = 1.0, s = 0.0;
    for (int i = 0; i < d; ++i) {
        prod *= semi_axes[i];
        s += x[i] * x[i] / std::pow(semi_axes[i], 4);
    }
    return 1.0 / (prod * prod * std::pow(s, (d + 1) / 2.0));
}

/// Plane-curve curvature of the ellipse (x/a)^2 + (y/b)^2 = 1 at angle
/// parameter t of the point (a cos t, b sin t).
inline double ellipse_curvature(double a, double b, double t) {
    double s = a * a * std::sin(t) * std::sin(t) + b * b * std::cos(t) * std::cos(t);
    return a * b / std::pow(s, 1.5);
}

/// Brute-force support function: coarse scan over a dense boundary mesh, then
/// local golden-section refinement around the best direction (d = 2) or best
/// mesh point neighborhood (d = 3).
inline double support_bruteforce(const gabor::BodyDescriptor& body, const gabor::Vec& xi,
                                 int coarse = 4096) {
    using gabor::Vec;
    if (body.dim == 2) {
        auto val = [&](double th) {
            Vec u{std::cos(th), std::sin(th)};
            Vec p = (1.0 / gabor::gauge(body, u)) * u;
            return p.dot(xi);
        };
        double best = -1e300, best_th = 0.0;
        for (int k = 0; k < coarse; ++k) {
            double th = 2.0 * kPi * k / coarse;
            double v = val(th);
            if (v > best) {
                best = v;
                best_th = th;
            }
        }
        double lo = best_th - 2.0 * kPi / coarse, hi = best_th + 2.0 * kPi / coarse;
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        double c = hi - gr * (hi - lo), d2 = lo + gr * (hi - lo);
        for (int it = 0; it < 200; ++it) {
            if (val(c) > val(d2)) hi = d2;
            else lo = c;
            c = hi - gr * (hi - lo);
            d2 = lo + gr * (hi - lo);
        }
        return val(0.5 * (lo + hi));
    }
    // d = 3: Fibonacci scan plus local 2-d refinement in spherical coordinates
    auto val_dir = [&](double theta, double phi) {
        Vec u{std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
              std::cos(theta)};
        Vec p = (1.0 / gabor::gauge(body, u)) * u;
        return p.dot(xi);
    };
    const double ga = kPi * (3.0 - std::sqrt(5.0));
    double best = -1e300, bth = 0.0, bph = 0.0;
    for (int k = 0; k < coarse; ++k) {
        double z = 1.0 - 2.0 * (k + 0.5) / coarse;
        double theta = std::acos(z);
        double phi = ga * k;
        double v = val_dir(theta, phi);
        if (v > best) {
            best = v;
            bth = theta;
            bph = phi;
        }
    }
    double span = 4.0 / std::sqrt(static_cast<double>(coarse));
    for (int round = 0; round < 40; ++round) {
        double step = span / 8.0;
        bool moved = true;
        while (moved) {
            moved = false;
            for (auto [dt, dp] : {std::pair{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}}) {
                double v = val_dir(bth + dt, bph + dp);
                if (v > best) {
                    best = v;
                    bth += dt;
                    bph += dp;
                    moved = true;
                }
            }
        }
        span *= 0.5;
    }
    return best;
}

}  // namespace oracle
