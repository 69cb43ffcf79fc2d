#pragma once
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <mutex>
#include <queue>
#include <vector>

#include "gabor/errors.hpp"
#include "gabor/vec.hpp"

namespace gabor::quad {

using Complex = std::complex<double>;

struct Result {
    Complex value{0.0, 0.0};
    double error = 0.0;
    long evaluations = 0;
    bool converged = false;
};

namespace detail {

// 15-point Kronrod nodes on [-1, 1] and weights, with the embedded 7-point
// Gauss weights (QUADPACK constants).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Panel {
    double a, b;
    Complex integral;
    double error;
    double round;  // round-off floor of this panel's estimate
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
inline Panel gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    Complex fc = f(c);
    Complex resk = kWgk[7] * fc;
    Complex resg = kWg[3] * fc;
    double resabs = kWgk[7] * std::abs(fc);
    std::array<Complex, 15> fv;
    fv[7] = fc;
    for (int j = 0; j < 7; ++j) {
        double x = h * kXgk[static_cast<size_t>(j)];
        Complex f1 = f(c - x);
        Complex f2 = f(c + x);
        fv[static_cast<size_t>(j)] = f1;
        fv[static_cast<size_t>(14 - j)] = f2;
        resk += kWgk[static_cast<size_t>(j)] * (f1 + f2);
        resabs += kWgk[static_cast<size_t>(j)] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += kWg[static_cast<size_t>(j / 2)] * (f1 + f2);
    }
    Complex mean = resk * 0.5;
    double resasc = kWgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j)
        resasc += kWgk[static_cast<size_t>(j)] *
                  (std::abs(fv[static_cast<size_t>(j)] - mean) +
                   std::abs(fv[static_cast<size_t>(14 - j)] - mean));
    resasc *= h;
    double err = std::abs(resk - resg) * h;
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    double round = 50.0 * std::numeric_limits<double>::epsilon() * resabs * h;
    err = std::max(err, round);
    return Panel{a, b, resk * h, err, round};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of a complex integrand over
/// [a, b], with optional interior breakpoints (integrand kinks). The target is
/// max(rel_tol * |I|, abs_floor); on budget exhaustion throws AccuracyNotReached.
template <class F>
inline Result integrate_adaptive(const F& f, double a, double b,
                                 const std::vector<double>& breakpoints, double rel_tol,
                                 double abs_floor = 1e-14, int max_panels = 30000) {
    std::vector<double> cuts;
    cuts.push_back(a);
    for (double x : breakpoints)
        if (x > a + 1e-15 && x < b - 1e-15) cuts.push_back(x);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());

    std::priority_queue<detail::Panel> heap;
    Complex total{0.0, 0.0};
    double err_sum = 0.0;
    double round_sum = 0.0;
    long evals = 0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto p = detail::gk15(f, cuts[i], cuts[i + 1]);
        evals += 15;
        total += p.integral;
        err_sum += p.error;
        round_sum += p.round;
        heap.push(p);
    }
    int n_panels = static_cast<int>(cuts.size()) - 1;
    // splitting cannot push the estimate below the accumulated round-off floor
    auto target = [&]() {
        return std::max({rel_tol * std::abs(total), abs_floor, 2.0 * round_sum});
    };
    while (err_sum > target() && n_panels < max_panels) {
        detail::Panel worst = heap.top();
        heap.pop();
        double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {  // interval at machine resolution
            heap.push(detail::Panel{worst.a, worst.b, worst.integral, 0.0, worst.round});
            err_sum -= worst.error;
            continue;
        }
        auto left = detail::gk15(f, worst.a, mid);
        auto right = detail::gk15(f, mid, worst.b);
        evals += 30;
        total += left.integral + right.integral - worst.integral;
        err_sum += left.error + right.error - worst.error;
        round_sum += left.round + right.round - worst.round;
        heap.push(left);
        heap.push(right);
        ++n_panels;
    }
    Result r;
    r.value = total;
    r.error = err_sum;
    r.evaluations = evals;
    r.converged = err_sum <= target();
    if (!r.converged)
        throw AccuracyNotReached("integrate_adaptive: panel budget exhausted", total, err_sum);
    return r;
}

/// Gauss-Legendre nodes/weights on [-1, 1], cached per order.
inline const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<double> x(static_cast<size_t>(n)), w(static_cast<size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[static_cast<size_t>(i)] = -z;
        x[static_cast<size_t>(n - 1 - i)] = z;
        double wi = 2.0 / ((1.0 - z * z) * pp * pp);
        w[static_cast<size_t>(i)] = wi;
        w[static_cast<size_t>(n - 1 - i)] = wi;
    }
    auto [ins, ok] = cache.emplace(n, std::make_pair(std::move(x), std::move(w)));
    (void)ok;
    return ins->second;
}

/// Integral of F(omega) over the unit sphere S^2 via a product rule:
/// Gauss-Legendre in cos(theta) x trapezoid in phi, polar axis aligned with
/// `axis`. Refines until two successive levels agree to rel_tol.
template <class F>
inline Result integrate_sphere(const F& f_omega, const Vec& axis, double rel_tol,
                               double abs_floor = 1e-12, int max_level = 12) {
    Mat basis = gabor::detail::basis_with_last_axis(axis.norm() > 0 ? axis : Vec{0.0, 0.0, 1.0});
    auto omega_at = [&](double u, double phi) {
        double rho = std::sqrt(std::max(0.0, 1.0 - u * u));
        Vec local{rho * std::cos(phi), rho * std::sin(phi), u};
        Vec w(3);
        for (int r = 0; r < 3; ++r) {
            double s = 0.0;
            for (int c = 0; c < 3; ++c) s += basis(r, c) * local[c];
            w[r] = s;
        }
        return w;
    };
    Complex prev{0.0, 0.0};
    long evals = 0;
    for (int level = 0; level <= max_level; ++level) {
        int nu = static_cast<int>(std::ceil(12.0 * std::pow(1.5, level)));
        int nphi = std::max(12, nu / 2);
        const auto& [xs, ws] = gauss_legendre(nu);
        Complex sum{0.0, 0.0};
        for (int i = 0; i < nu; ++i) {
            Complex ring{0.0, 0.0};
            for (int j = 0; j < nphi; ++j) {
                double phi = 2.0 * std::numbers::pi * j / nphi;
                ring += f_omega(omega_at(xs[static_cast<size_t>(i)], phi));
            }
            sum += ws[static_cast<size_t>(i)] * ring * (2.0 * std::numbers::pi / nphi);
            evals += nphi;
        }
        if (level > 0) {
            double diff = std::abs(sum - prev);
            if (diff <= std::max(rel_tol * std::abs(sum), abs_floor)) {
                Result r;
                r.value = sum;
                r.error = diff;
                r.evaluations = evals;
                r.converged = true;
                return r;
            }
        }
        prev = sum;
    }
    throw AccuracyNotReached("integrate_sphere: refinement budget exhausted", prev, -1.0);
}

}  // namespace gabor::quad
