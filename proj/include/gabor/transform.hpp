#pragma once
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include "gabor/geometry.hpp"
#include "gabor/quadrature.hpp"

namespace gabor {

using Complex = std::complex<double>;

/// A frequency and the transform value sampled there.
struct FrequencySample {
    Vec xi;
    Complex value;
};

namespace detail {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// sin(x)/x with the removable singularity filled in.
inline double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

/// Radial oscillatory integral I_d(R, c) = int_0^R r^{d-1} exp(-2 pi i r c) dr,
/// in closed form with a power-series branch for small |c| R (the closed forms
/// cancel catastrophically there).
inline Complex radial_oscillatory(int d, double R, double c) {
    if (R <= 0.0) return {0.0, 0.0};
    const double alpha = kTwoPi * c;
    // the closed form cancels like (cR)^{-(d+1)}, so d = 3 switches earlier
    const double series_switch = d == 3 ? 1e-2 : 1e-3;
    if (std::abs(c) * R < series_switch) {
        // sum_k (-i alpha)^k R^{k+d} / (k! (k+d))
        Complex sum{0.0, 0.0};
        Complex term{1.0, 0.0};  // (-i alpha)^k R^k / k!
        for (int k = 0; k < 24; ++k) {
            Complex contrib = term * (std::pow(R, d) / (k + d));
            sum += contrib;
            if (std::abs(contrib) < 1e-18 * std::abs(sum) && k > 2) break;
            term *= Complex{0.0, -alpha} * (R / (k + 1.0));
        }
        return sum;
    }
    const Complex e = std::polar(1.0, -alpha * R);
    if (d == 2) {
        return Complex{0.0, 1.0} * (R / alpha) * e + (e - 1.0) / (alpha * alpha);
    }
    if (d == 3) {
        const double a2 = alpha * alpha;
        return e * (Complex{0.0, 1.0} * (R * R / alpha) + 2.0 * R / a2) -
               Complex{0.0, 2.0} * (e - 1.0) / (a2 * alpha);
    }
    throw UnsupportedDimension("radial_oscillatory: d = 2 or 3 only");
}

inline double default_ft_tol(int d) { return d == 2 ? 1e-8 : 1e-5; }

/// Exact transform of an axis-aligned box centered at `center`:
/// prod_i exp(-2 pi i c_i xi_i) * w_i * sinc(pi w_i xi_i).
inline Complex box_transform(const Vec& center, const Vec& widths, const Vec& xi) {
    Complex out{1.0, 0.0};
    double phase = 0.0;
    for (int i = 0; i < xi.dim(); ++i) {
        phase += center[i] * xi[i];
        out *= widths[i] * sinc(std::numbers::pi * widths[i] * xi[i]);
    }
    return out * std::polar(1.0, -kTwoPi * phase);
}

}  // namespace detail

/// Quadrature budget: panel cap for the d = 2 adaptive rule and refinement
/// level cap for the d = 3 product rule.
struct QuadBudget {
    int max_panels = 30000;
    int max_sphere_level = 12;
};

/// Fourier transform of the indicator of the body:
/// int_K exp(-2 pi i x.xi) dx, via the polar-coordinate reduction (closed-form
/// radial integral, then angular quadrature). Boxes use the exact product form.
/// tol is a relative target; pass 0 for the per-dimension default
/// (1e-8 for d = 2, 1e-5 for d = 3).
inline Complex ft_indicator(const BodyDescriptor& body, const Vec& xi, double tol = 0.0,
                            const QuadBudget& budget = {}) {
    detail::check_finite(xi, "ft_indicator");
    detail::check_dim(body, xi, "ft_indicator");
    if (body.dim > 3) throw UnsupportedDimension("ft_indicator: d = 2 or 3 only");
    if (tol == 0.0) tol = detail::default_ft_tol(body.dim);
    if (tol < 1e-12) throw InvalidArgument("ft_indicator: tol must be >= 1e-12");

    if (body.family == BodyFamily::Cube)
        return detail::box_transform(Vec(body.dim), body.sides, xi);

    if (body.dim == 2) {
        auto integrand = [&](double th) {
            Vec w{std::cos(th), std::sin(th)};
            double R = 1.0 / gauge(body, w);
            return detail::radial_oscillatory(2, R, w.dot(xi));
        };
        auto r = quad::integrate_adaptive(integrand, 0.0, 2.0 * std::numbers::pi,
                                          angular_breakpoints(body), tol, 1e-14,
                                          budget.max_panels);
        return r.value;
    }
    Vec axis = xi.norm() > 0 ? xi.normalized() : Vec{0.0, 0.0, 1.0};
    auto integrand = [&](const Vec& w) {
        double R = 1.0 / gauge(body, w);
        return detail::radial_oscillatory(3, R, w.dot(xi));
    };
    auto r = quad::integrate_sphere(integrand, axis, tol, 1e-12, budget.max_sphere_level);
    return r.value;
}

/// Transform of the indicator of (K + a) intersect (K + a2).
struct IntersectionTransform {
    Complex value{0.0, 0.0};
    bool empty = false;  // translates do not overlap; value is exactly 0
};

/// int chi_{K+a}(x) chi_{K+a2}(x) exp(-2 pi i x.xi) dx. The intersection is
/// star-shaped about the midpoint m of the two centers; the modulation
/// exp(-2 pi i m.xi) is factored out and the symmetric remainder integrated as
/// in ft_indicator. Symmetric bodies only.
inline IntersectionTransform ft_intersection(const BodyDescriptor& body, const Vec& a,
                                             const Vec& a2, const Vec& xi, double tol = 0.0) {
    detail::check_finite(a, "ft_intersection");
    detail::check_finite(a2, "ft_intersection");
    detail::check_finite(xi, "ft_intersection");
    if (!body.symmetric)
        throw UnsupportedBody("ft_intersection: symmetric bodies only");
    if (tol == 0.0) tol = detail::default_ft_tol(body.dim);

    // (K+a) and (K+a2) overlap iff a - a2 is in 2K (support separation test)
    const Vec da = a - a2;
    if (gauge(body, da) > 2.0) return {Complex{0.0, 0.0}, true};
    if (da.norm() == 0.0)
        return {std::polar(1.0, -detail::kTwoPi * a.dot(xi)) * ft_indicator(body, xi, tol), false};
    if (body.dim > 3) throw UnsupportedDimension("ft_intersection: d = 2 or 3 only");

    const Vec m = 0.5 * (a + a2);
    const Vec delta = 0.5 * (a - a2);
    const Complex mod = std::polar(1.0, -detail::kTwoPi * m.dot(xi));

    if (body.family == BodyFamily::Cube) {
        // exact overlap box
        Vec lo(body.dim), hi(body.dim);
        for (int i = 0; i < body.dim; ++i) {
            double h = 0.5 * body.sides[i];
            lo[i] = std::max(a[i] - h, a2[i] - h);
            hi[i] = std::min(a[i] + h, a2[i] + h);
            if (hi[i] <= lo[i]) return {Complex{0.0, 0.0}, true};
        }
        Vec center = 0.5 * (lo + hi), widths = hi - lo;
        return {detail::box_transform(center, widths, xi), false};
    }

    auto r_min = [&](const Vec& w) {
        return std::min(radial_from(body, -1.0 * delta, w), radial_from(body, delta, w));
    };

    if (body.dim == 2) {
        // locate the kink angles where the two radial functions swap
        auto diff = [&](double th) {
            Vec w{std::cos(th), std::sin(th)};
            return radial_from(body, -1.0 * delta, w) - radial_from(body, delta, w);
        };
        std::vector<double> kinks;
        const int scan = 128;
        double prev = diff(0.0);
        for (int k = 1; k <= scan; ++k) {
            double th = 2.0 * std::numbers::pi * k / scan;
            double cur = diff(th);
            if ((prev < 0.0) != (cur < 0.0)) {
                double lo = 2.0 * std::numbers::pi * (k - 1) / scan, hi = th;
                for (int it = 0; it < 60; ++it) {
                    double mid = 0.5 * (lo + hi);
                    if ((diff(lo) < 0.0) != (diff(mid) < 0.0)) hi = mid;
                    else lo = mid;
                }
                kinks.push_back(0.5 * (lo + hi));
            }
            prev = cur;
        }
        auto integrand = [&](double th) {
            Vec w{std::cos(th), std::sin(th)};
            return detail::radial_oscillatory(2, r_min(w), w.dot(xi));
        };
        auto r = quad::integrate_adaptive(integrand, 0.0, 2.0 * std::numbers::pi, kinks, tol);
        return {mod * r.value, false};
    }

    Vec axis = xi.norm() > 0 ? xi.normalized() : Vec{0.0, 0.0, 1.0};
    auto integrand = [&](const Vec& w) {
        return detail::radial_oscillatory(3, r_min(w), w.dot(xi));
    };
    auto r = quad::integrate_sphere(integrand, axis, tol);
    return {mod * r.value, false};
}

/// Leading term of the large-frequency expansion of ft_indicator:
/// c_d * kappa^{-1/2}(xi/|xi|) * sin(2 pi (rho*(xi) - (d-1)/8)) * |xi|^{-(d+1)/2}.
inline double herz_leading(const BodyDescriptor& body, const Vec& xi, double c_d = 1.0) {
    detail::require_smooth(body, "herz_leading");
    double t = xi.norm();
    if (t == 0.0) throw InvalidArgument("herz_leading: xi must be nonzero");
    const int d = body.dim;
    double kappa = gaussian_curvature(body, xi.normalized());
    double phase = support(body, xi) - (d - 1) / 8.0;
    return c_d / std::sqrt(kappa) * std::sin(detail::kTwoPi * phase) *
           std::pow(t, -(d + 1) / 2.0);
}

/// Least-squares fit of the expansion constant c_d over the phase-extremal
/// sample points (where |sin| = 1) with magnitudes in [lo, hi].
inline double calibrate_constant(const BodyDescriptor& body, const Vec& direction, double lo,
                                 double hi, double quad_tol = 0.0) {
    if (lo < 10.0 || hi > 200.0 || lo >= hi)
        throw InvalidArgument("calibrate_constant: range must lie within [10, 200]");
    const int d = body.dim;
    Vec dir = direction.normalized();
    const double rs = support(body, dir);
    // extremal phases: rho*(t dir) - (d-1)/8 = 1/4 + k/2
    double base = (d - 1) / 8.0 + 0.25;
    long k0 = static_cast<long>(std::ceil((lo * rs - base) * 2.0));
    double num_lead = 0.0, lead_sq = 0.0;
    int count = 0;
    for (long k = k0;; ++k) {
        double t = (base + 0.5 * static_cast<double>(k)) / rs;
        if (t > hi) break;
        if (t < lo) continue;
        Vec xi = t * dir;
        double num = std::real(ft_indicator(body, xi, quad_tol));
        double lead = herz_leading(body, xi, 1.0);
        num_lead += num * lead;
        lead_sq += lead * lead;
        ++count;
    }
    if (count == 0 || lead_sq < 1e-30)
        throw CalibrationFailed("calibrate_constant: no usable extremal samples in range");
    double c = num_lead / lead_sq;
    if (!(c > 0.0)) throw CalibrationFailed("calibrate_constant: fit produced non-positive c_d");
    return c;
}

/// Remainder decay measurement along a ray.
struct AsymptoticReport {
    Vec direction;
    std::vector<double> magnitudes;      // possibly phase-snapped (see scan options)
    std::vector<double> numeric_values;  // Re ft_indicator at each magnitude
    std::vector<double> leading_values;  // herz_leading with c_d = 1
    std::vector<double> remainders;      // |numeric - c_d * leading|
    double fitted_decay_exponent = std::numeric_limits<double>::quiet_NaN();
    double calibration_constant = 0.0;
    double remainder_envelope_constant = 0.0;  // max remainder * t^{(d+3)/2}
    bool degenerate_fit = false;
};

struct ScanOptions {
    /// Snap each magnitude to the nearest phase-extremal point of the
    /// remainder (= a zero of the leading sine). The raw remainder oscillates
    /// with the phase; at extremal points the fit measures the envelope decay
    /// instead of the oscillation.
    bool snap_to_extrema = true;
    double quad_tol = 0.0;
    double calibration_lo = 0.0;  // 0 = derive from magnitudes, clamped to [10, 200]
    double calibration_hi = 0.0;
};

/// Compares ft_indicator against the calibrated leading term along a ray and
/// fits the decay exponent of the remainder by least squares in log-log space.
inline AsymptoticReport herz_remainder_scan(const BodyDescriptor& body, const Vec& direction,
                                            std::vector<double> magnitudes,
                                            const ScanOptions& opts = {}) {
    if (magnitudes.empty()) throw InvalidArgument("herz_remainder_scan: empty magnitudes");
    for (size_t i = 0; i < magnitudes.size(); ++i) {
        if (magnitudes[i] < 5.0)
            throw InvalidArgument("herz_remainder_scan: magnitudes must be >= 5");
        if (i > 0 && magnitudes[i] < magnitudes[i - 1])
            throw InvalidArgument("herz_remainder_scan: magnitudes must be ascending");
    }
    AsymptoticReport rep;
    Vec dir = direction.normalized();
    rep.direction = dir;
    const int d = body.dim;
    const double rs = support(body, dir);

    if (opts.snap_to_extrema) {
        // leading-sine zeros: rho*(t dir) - (d-1)/8 in Z/2
        for (double& t : magnitudes) {
            double k = std::round((t * rs - (d - 1) / 8.0) * 2.0);
            t = ((d - 1) / 8.0 + 0.5 * k) / rs;
        }
    }
    rep.magnitudes = magnitudes;

    double clo = opts.calibration_lo, chi = opts.calibration_hi;
    if (clo == 0.0) clo = std::max(10.0, magnitudes.front());
    if (chi == 0.0) chi = std::min(200.0, magnitudes.back());
    if (chi < clo + 10.0) chi = std::min(200.0, clo + 20.0);  // short scans still calibrate
    rep.calibration_constant = calibrate_constant(body, dir, clo, chi, opts.quad_tol);

    for (double t : magnitudes) {
        Vec xi = t * dir;
        Complex num = ft_indicator(body, xi, opts.quad_tol);
        double lead = herz_leading(body, xi, 1.0);
        rep.numeric_values.push_back(std::real(num));
        rep.leading_values.push_back(lead);
        rep.remainders.push_back(std::abs(num - rep.calibration_constant * lead));
    }
    for (size_t i = 0; i < magnitudes.size(); ++i)
        rep.remainder_envelope_constant =
            std::max(rep.remainder_envelope_constant,
                     rep.remainders[i] * std::pow(magnitudes[i], (d + 3) / 2.0));

    // least-squares slope of log |remainder| vs log |xi|
    size_t n = magnitudes.size();
    if (n < 2) {
        rep.degenerate_fit = true;
        return rep;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t used = 0;
    for (size_t i = 0; i < n; ++i) {
        if (rep.remainders[i] <= 0.0) continue;
        double x = std::log(magnitudes[i]), y = std::log(rep.remainders[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++used;
    }
    double denom = used * sxx - sx * sx;
    if (used < 2 || std::abs(denom) < 1e-12) {
        rep.degenerate_fit = true;
        return rep;
    }
    rep.fitted_decay_exponent = (used * sxy - sx * sy) / denom;
    return rep;
}

/// Locates a sign change of the (real) transform along the ray t -> t * dir by
/// bisection. Returns the zero if the bracket has one.
inline double find_transform_zero(const BodyDescriptor& body, const Vec& direction, double t_lo,
                                  double t_hi, double quad_tol = 0.0) {
    Vec dir = direction.normalized();
    auto g = [&](double t) { return std::real(ft_indicator(body, t * dir, quad_tol)); };
    double flo = g(t_lo), fhi = g(t_hi);
    if ((flo < 0.0) == (fhi < 0.0))
        throw InvalidArgument("find_transform_zero: bracket has no sign change");
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (t_lo + t_hi);
        double fm = g(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            t_lo = mid;
            flo = fm;
        } else {
            t_hi = mid;
        }
        if (t_hi - t_lo < 1e-13 * (1.0 + t_hi)) break;
    }
    return 0.5 * (t_lo + t_hi);
}

}  // namespace gabor
