#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "gabor/errors.hpp"
#include "gabor/vec.hpp"

namespace gabor {

enum class BodyFamily { Ball, Ellipsoid, Superellipsoid, Cube, Triangle };

inline const char* family_name(BodyFamily f) {
    switch (f) {
        case BodyFamily::Ball: return "ball";
        case BodyFamily::Ellipsoid: return "ellipsoid";
        case BodyFamily::Superellipsoid: return "superellipsoid";
        case BodyFamily::Cube: return "cube";
        case BodyFamily::Triangle: return "triangle";
    }
    return "?";
}

/// A symmetric (or fixture) convex body with closed-form evaluators.
/// Immutable after construction; safe to share across threads.
struct BodyDescriptor {
    int dim = 2;
    BodyFamily family = BodyFamily::Ball;
    bool symmetric = true;

    double radius = 1.0;            // ball
    Mat matrix;                     // ellipsoid: gauge(x) = sqrt(x^T M x)
    Mat matrix_inv;                 // cached M^{-1}
    double exponent = 4.0;          // superellipsoid: gauge(x) = lp-norm, p even >= 4
    Vec sides;                      // cube: per-axis side lengths (a plain cube has equal sides)
    std::array<Vec, 3> vertices{};  // triangle (d = 2 only)

    /// Smooth with everywhere positive curvature; the class the main argument needs.
    bool smooth_positive_curvature() const {
        return family == BodyFamily::Ball || family == BodyFamily::Ellipsoid;
    }
};

inline BodyDescriptor make_ball(int dim, double radius) {
    if (dim < 2 || dim > Vec::kMaxDim) throw InvalidArgument("make_ball: dim out of range");
    if (!(radius > 0.0)) throw InvalidArgument("make_ball: radius must be positive");
    BodyDescriptor b;
    b.dim = dim;
    b.family = BodyFamily::Ball;
    b.radius = radius;
    return b;
}

inline BodyDescriptor make_ellipsoid(const Mat& m) {
    BodyDescriptor b;
    b.dim = m.dim();
    if (b.dim < 2) throw InvalidArgument("make_ellipsoid: dim out of range");
    for (int i = 0; i < b.dim; ++i)
        for (int j = i + 1; j < b.dim; ++j)
            if (std::abs(m(i, j) - m(j, i)) > 1e-12)
                throw InvalidArgument("make_ellipsoid: matrix must be symmetric");
    b.family = BodyFamily::Ellipsoid;
    b.matrix = m;
    b.matrix_inv = m.inverse();
    Vec ev;
    Mat evec;
    detail::jacobi_eigen(m, ev, evec);
    if (ev[0] <= 0.0) throw InvalidArgument("make_ellipsoid: matrix must be positive definite");
    return b;
}

/// Ellipsoid with the given semi-axes: M = diag(1/a_i^2).
inline BodyDescriptor make_ellipsoid_semiaxes(const Vec& axes) {
    Mat m(axes.dim());
    for (int i = 0; i < axes.dim(); ++i) {
        if (!(axes[i] > 0.0)) throw InvalidArgument("make_ellipsoid_semiaxes: axes must be positive");
        m(i, i) = 1.0 / (axes[i] * axes[i]);
    }
    return make_ellipsoid(m);
}

inline BodyDescriptor make_superellipsoid(int dim, double exponent) {
    if (dim < 2 || dim > Vec::kMaxDim) throw InvalidArgument("make_superellipsoid: dim out of range");
    if (exponent < 4.0 || std::fmod(exponent, 2.0) != 0.0)
        throw InvalidArgument("make_superellipsoid: exponent must be an even integer >= 4");
    BodyDescriptor b;
    b.dim = dim;
    b.family = BodyFamily::Superellipsoid;
    b.exponent = exponent;
    return b;
}

inline BodyDescriptor make_box(const Vec& sides) {
    BodyDescriptor b;
    b.dim = sides.dim();
    if (b.dim < 2) throw InvalidArgument("make_box: dim out of range");
    for (int i = 0; i < b.dim; ++i)
        if (!(sides[i] > 0.0)) throw InvalidArgument("make_box: sides must be positive");
    b.family = BodyFamily::Cube;
    b.sides = sides;
    return b;
}

inline BodyDescriptor make_cube(int dim, double side) {
    Vec s(dim);
    for (int i = 0; i < dim; ++i) s[i] = side;
    return make_box(s);
}

/// Non-symmetric fixture. Default is the equilateral triangle centered at the
/// origin with a vertex at (1, 0).
inline BodyDescriptor make_triangle() {
    BodyDescriptor b;
    b.dim = 2;
    b.family = BodyFamily::Triangle;
    b.symmetric = false;
    const double h = std::sqrt(3.0) / 2.0;
    b.vertices = {Vec{1.0, 0.0}, Vec{-0.5, h}, Vec{-0.5, -h}};
    return b;
}

inline BodyDescriptor make_triangle(const Vec& v0, const Vec& v1, const Vec& v2) {
    BodyDescriptor b;
    b.dim = 2;
    b.family = BodyFamily::Triangle;
    b.symmetric = false;
    b.vertices = {v0, v1, v2};
    // the gauge below requires the origin strictly inside
    for (int e = 0; e < 3; ++e) {
        Vec a = b.vertices[static_cast<size_t>(e)];
        Vec c = b.vertices[static_cast<size_t>((e + 1) % 3)];
        Vec edge = c - a;
        Vec n{edge[1], -edge[0]};
        if (n.dot(a) < 0) n = -n;
        if (!(n.dot(a) > 0)) throw InvalidArgument("make_triangle: origin must be interior");
    }
    return b;
}

namespace detail {

inline void check_finite(const Vec& x, const char* who) {
    if (!x.finite()) throw InvalidArgument(std::string(who) + ": non-finite input");
}

inline void check_dim(const BodyDescriptor& body, const Vec& x, const char* who) {
    if (x.dim() != body.dim) throw InvalidArgument(std::string(who) + ": dimension mismatch");
}

}  // namespace detail

/// Minkowski functional: gauge(x) <= 1 iff x lies in the body.
/// Positively homogeneous; zero only at the origin.
inline double gauge(const BodyDescriptor& body, const Vec& x) {
    detail::check_finite(x, "gauge");
    detail::check_dim(body, x, "gauge");
    switch (body.family) {
        case BodyFamily::Ball:
            return x.norm() / body.radius;
        case BodyFamily::Ellipsoid:
            return std::sqrt(std::max(0.0, x.dot(body.matrix.apply(x))));
        case BodyFamily::Superellipsoid: {
            // scale out the max coordinate for stability under homogeneity tests
            double m = x.norm_inf();
            if (m == 0.0) return 0.0;
            double s = 0.0;
            for (int i = 0; i < x.dim(); ++i) s += std::pow(std::abs(x[i]) / m, body.exponent);
            return m * std::pow(s, 1.0 / body.exponent);
        }
        case BodyFamily::Cube: {
            double g = 0.0;
            for (int i = 0; i < x.dim(); ++i) g = std::max(g, std::abs(x[i]) / (0.5 * body.sides[i]));
            return g;
        }
        case BodyFamily::Triangle: {
            double g = -std::numeric_limits<double>::infinity();
            for (int e = 0; e < 3; ++e) {
                Vec a = body.vertices[static_cast<size_t>(e)];
                Vec c = body.vertices[static_cast<size_t>((e + 1) % 3)];
                Vec edge = c - a;
                Vec n{edge[1], -edge[0]};
                if (n.dot(a) < 0) n = -n;
                g = std::max(g, x.dot(n) / a.dot(n));
            }
            return std::max(g, 0.0);
        }
    }
    throw InvalidArgument("gauge: unknown family");
}

/// Support function rho*(xi) = sup_{x in K} x . xi. Degree-1 homogeneous.
inline double support(const BodyDescriptor& body, const Vec& xi) {
    detail::check_finite(xi, "support");
    detail::check_dim(body, xi, "support");
    switch (body.family) {
        case BodyFamily::Ball:
            return body.radius * xi.norm();
        case BodyFamily::Ellipsoid:
            return std::sqrt(std::max(0.0, xi.dot(body.matrix_inv.apply(xi))));
        case BodyFamily::Superellipsoid: {
            // dual of the lp ball is the lq ball, 1/p + 1/q = 1
            double q = body.exponent / (body.exponent - 1.0);
            double m = xi.norm_inf();
            if (m == 0.0) return 0.0;
            double s = 0.0;
            for (int i = 0; i < xi.dim(); ++i) s += std::pow(std::abs(xi[i]) / m, q);
            return m * std::pow(s, 1.0 / q);
        }
        case BodyFamily::Cube: {
            double s = 0.0;
            for (int i = 0; i < xi.dim(); ++i) s += 0.5 * body.sides[i] * std::abs(xi[i]);
            return s;
        }
        case BodyFamily::Triangle: {
            double s = -std::numeric_limits<double>::infinity();
            for (const Vec& v : body.vertices) s = std::max(s, v.dot(xi));
            return s;
        }
    }
    throw InvalidArgument("support: unknown family");
}

/// Volume |K| in closed form.
inline double volume(const BodyDescriptor& body) {
    const int d = body.dim;
    const double unit_ball = std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
    switch (body.family) {
        case BodyFamily::Ball:
            return unit_ball * std::pow(body.radius, d);
        case BodyFamily::Ellipsoid:
            return unit_ball / std::sqrt(body.matrix.determinant());
        case BodyFamily::Superellipsoid: {
            double p = body.exponent;
            return std::pow(2.0 * std::tgamma(1.0 + 1.0 / p), d) / std::tgamma(1.0 + d / p);
        }
        case BodyFamily::Cube: {
            double v = 1.0;
            for (int i = 0; i < d; ++i) v *= body.sides[i];
            return v;
        }
        case BodyFamily::Triangle: {
            const Vec &a = body.vertices[0], &b = body.vertices[1], &c = body.vertices[2];
            return 0.5 * std::abs((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
        }
    }
    throw InvalidArgument("volume: unknown family");
}

/// Outward unit normal of the boundary at the boundary point x (gauge(x) = 1).
/// On edges/vertices of polytope fixtures the first maximizing facet wins.
inline Vec boundary_normal(const BodyDescriptor& body, const Vec& x) {
    switch (body.family) {
        case BodyFamily::Ball:
            return x.normalized();
        case BodyFamily::Ellipsoid:
            return body.matrix.apply(x).normalized();
        case BodyFamily::Superellipsoid: {
            Vec g(x.dim());
            for (int i = 0; i < x.dim(); ++i) {
                double s = x[i] >= 0 ? 1.0 : -1.0;
                g[i] = s * std::pow(std::abs(x[i]), body.exponent - 1.0);
            }
            return g.normalized();
        }
        case BodyFamily::Cube: {
            int best = 0;
            double bv = -1.0;
            for (int i = 0; i < x.dim(); ++i) {
                double v = std::abs(x[i]) / (0.5 * body.sides[i]);
                if (v > bv + 1e-15) {
                    bv = v;
                    best = i;
                }
            }
            Vec n(x.dim());
            n[best] = x[best] >= 0 ? 1.0 : -1.0;
            return n;
        }
        case BodyFamily::Triangle: {
            double bv = -std::numeric_limits<double>::infinity();
            Vec bn{0.0, 0.0};
            for (int e = 0; e < 3; ++e) {
                Vec a = body.vertices[static_cast<size_t>(e)];
                Vec c = body.vertices[static_cast<size_t>((e + 1) % 3)];
                Vec edge = c - a;
                Vec n{edge[1], -edge[0]};
                if (n.dot(a) < 0) n = -n;
                double v = x.dot(n) / a.dot(n);
                if (v > bv) {
                    bv = v;
                    bn = n.normalized();
                }
            }
            return bn;
        }
    }
    throw InvalidArgument("boundary_normal: unknown family");
}

/// Point on the boundary plus its normal and Gaussian curvature.
struct SurfaceSample {
    Vec point;
    Vec normal;
    double curvature = 0.0;  // 0 when the family has no curvature evaluator
};

namespace detail {

/// Euclidean Hessian of the support function at a unit vector, by central
/// differences with the given step. The support function is 1-homogeneous, so
/// the Hessian annihilates omega and its restriction to omega-perp is the
/// reverse Weingarten map.
inline Mat support_hessian_fd(const BodyDescriptor& body, const Vec& omega, double step) {
    const int d = body.dim;
    Mat h(d);
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            double v;
            if (i == j) {
                Vec xp = omega, xm = omega;
                xp[i] += step;
                xm[i] -= step;
                v = (support(body, xp) - 2.0 * support(body, omega) + support(body, xm)) /
                    (step * step);
            } else {
                Vec xpp = omega, xpm = omega, xmp = omega, xmm = omega;
                xpp[i] += step; xpp[j] += step;
                xpm[i] += step; xpm[j] -= step;
                xmp[i] -= step; xmp[j] += step;
                xmm[i] -= step; xmm[j] -= step;
                v = (support(body, xpp) - support(body, xpm) - support(body, xmp) +
                     support(body, xmm)) /
                    (4.0 * step * step);
            }
            h(i, j) = v;
            h(j, i) = v;
        }
    }
    return h;
}

inline void require_smooth(const BodyDescriptor& body, const char* who) {
    if (!body.smooth_positive_curvature())
        throw UnsupportedBody(std::string(who) + ": family '" + family_name(body.family) +
                              "' has no curvature guarantee");
}

}  // namespace detail

/// Unique boundary point whose outward normal is omega. Ball/ellipsoid only.
inline SurfaceSample normal_point(const BodyDescriptor& body, const Vec& omega);

/// Gaussian curvature of the boundary at the point with outward normal omega,
/// computed from the support function by central finite differences (step 1e-4).
inline double gaussian_curvature(const BodyDescriptor& body, const Vec& omega,
                                 double step = 1e-4) {
    detail::require_smooth(body, "gaussian_curvature");
    detail::check_finite(omega, "gaussian_curvature");
    detail::check_dim(body, omega, "gaussian_curvature");
    if (std::abs(omega.norm() - 1.0) > 1e-8)
        throw InvalidArgument("gaussian_curvature: omega must be a unit vector");
    const int d = body.dim;
    Mat h = detail::support_hessian_fd(body, omega, step);
    Mat basis = detail::basis_with_last_axis(omega);  // last column = omega
    Mat w(d - 1);
    for (int i = 0; i < d - 1; ++i) {
        Vec bi(d);
        for (int k = 0; k < d; ++k) bi[k] = basis(k, i);
        Vec hbi = h.apply(bi);
        for (int j = 0; j < d - 1; ++j) {
            Vec bj(d);
            for (int k = 0; k < d; ++k) bj[k] = basis(k, j);
            w(i, j) = bj.dot(hbi);
        }
    }
    double det = w.determinant();
    if (!(det > 0.0)) throw UnsupportedBody("gaussian_curvature: non-positive curvature detected");
    return 1.0 / det;
}

inline SurfaceSample normal_point(const BodyDescriptor& body, const Vec& omega) {
    detail::require_smooth(body, "normal_point");
    detail::check_finite(omega, "normal_point");
    detail::check_dim(body, omega, "normal_point");
    if (std::abs(omega.norm() - 1.0) > 1e-8)
        throw InvalidArgument("normal_point: omega must be a unit vector");
    SurfaceSample s;
    if (body.family == BodyFamily::Ball) {
        s.point = body.radius * omega;
    } else {
        // boundary {x : x^T M x = 1}; gradient M x parallel to omega
        Vec y = body.matrix_inv.apply(omega);
        s.point = (1.0 / std::sqrt(omega.dot(y))) * y;
    }
    s.normal = boundary_normal(body, s.point);
    s.curvature = gaussian_curvature(body, omega);
    return s;
}

/// Quasi-uniform boundary sampling: angular grid for d = 2, Fibonacci sphere
/// grid mapped radially onto the boundary for d = 3. `resolution` is the
/// number of samples.
inline std::vector<SurfaceSample> boundary_mesh(const BodyDescriptor& body, int resolution) {
    if (resolution < 8) throw InvalidArgument("boundary_mesh: resolution must be >= 8");
    if (body.dim != 2 && body.dim != 3)
        throw UnsupportedDimension("boundary_mesh: d = 2 or 3 only");
    std::vector<SurfaceSample> out;
    out.reserve(static_cast<size_t>(resolution));
    const bool smooth = body.smooth_positive_curvature();
    auto push = [&](const Vec& u) {
        SurfaceSample s;
        s.point = (1.0 / gauge(body, u)) * u;
        s.normal = boundary_normal(body, s.point);
        s.curvature = smooth ? gaussian_curvature(body, s.normal) : 0.0;
        out.push_back(s);
    };
    if (body.dim == 2) {
        for (int k = 0; k < resolution; ++k) {
            double th = 2.0 * std::numbers::pi * k / resolution;
            push(Vec{std::cos(th), std::sin(th)});
        }
    } else {
        const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));  // golden angle
        for (int k = 0; k < resolution; ++k) {
            double z = 1.0 - 2.0 * (k + 0.5) / resolution;
            double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            double phi = ga * k;
            push(Vec{rho * std::cos(phi), rho * std::sin(phi), z});
        }
    }
    return out;
}

/// Largest circumscribed-ball radius: max |x| over the body.
inline double circumradius(const BodyDescriptor& body) {
    switch (body.family) {
        case BodyFamily::Ball:
            return body.radius;
        case BodyFamily::Ellipsoid: {
            Vec ev;
            Mat evec;
            detail::jacobi_eigen(body.matrix, ev, evec);
            return 1.0 / std::sqrt(ev[0]);
        }
        case BodyFamily::Superellipsoid:
            return std::pow(static_cast<double>(body.dim), 0.5 - 1.0 / body.exponent);
        case BodyFamily::Cube: {
            Vec h = body.sides;
            h *= 0.5;
            return h.norm();
        }
        case BodyFamily::Triangle: {
            double r = 0.0;
            for (const Vec& v : body.vertices) r = std::max(r, v.norm());
            return r;
        }
    }
    throw InvalidArgument("circumradius: unknown family");
}

/// Radial function of the body translated by `center`, seen from the origin:
/// the largest t >= 0 with center + t*omega inside the body... equivalently the
/// exit parameter of the ray {center + t*omega} from K. Requires gauge(center) <= 1.
inline double radial_from(const BodyDescriptor& body, const Vec& center, const Vec& omega) {
    switch (body.family) {
        case BodyFamily::Ball: {
            double b = omega.dot(center);
            double disc = b * b + body.radius * body.radius - center.norm2();
            if (disc < 0.0) return 0.0;
            return -b + std::sqrt(disc);
        }
        case BodyFamily::Ellipsoid: {
            double a = omega.dot(body.matrix.apply(omega));
            double b = omega.dot(body.matrix.apply(center));
            double c = center.dot(body.matrix.apply(center)) - 1.0;
            double disc = b * b - a * c;
            if (disc < 0.0) return 0.0;
            return (-b + std::sqrt(disc)) / a;
        }
        case BodyFamily::Cube: {
            // slab clipping of the ray against the box
            double t = std::numeric_limits<double>::infinity();
            for (int i = 0; i < body.dim; ++i) {
                double h = 0.5 * body.sides[i];
                if (omega[i] > 1e-300) t = std::min(t, (h - center[i]) / omega[i]);
                else if (omega[i] < -1e-300) t = std::min(t, (-h - center[i]) / omega[i]);
            }
            return std::max(t, 0.0);
        }
        default: {
            // generic convex body: gauge(center + t*omega) - 1 is convex in t;
            // bracket then bisect
            auto g = [&](double t) { return gauge(body, center + t * omega) - 1.0; };
            if (g(0.0) > 1e-12) return 0.0;
            double hi = 1.0;
            double cap = 4.0 * circumradius(body) + center.norm() + 1.0;
            while (g(hi) < 0.0 && hi < cap) hi *= 2.0;
            double lo = 0.0;
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (lo + hi);
                if (g(mid) < 0.0) lo = mid;
                else hi = mid;
                if (hi - lo < 1e-14 * (1.0 + hi)) break;
            }
            return 0.5 * (lo + hi);
        }
    }
}

/// Angles of radial-function kinks for polygonal d = 2 bodies (vertex directions).
inline std::vector<double> angular_breakpoints(const BodyDescriptor& body) {
    std::vector<double> out;
    if (body.dim != 2) return out;
    auto push_dir = [&out](const Vec& v) {
        double a = std::atan2(v[1], v[0]);
        if (a < 0) a += 2.0 * std::numbers::pi;
        out.push_back(a);
    };
    if (body.family == BodyFamily::Cube) {
        double hx = 0.5 * body.sides[0], hy = 0.5 * body.sides[1];
        push_dir(Vec{hx, hy});
        push_dir(Vec{-hx, hy});
        push_dir(Vec{-hx, -hy});
        push_dir(Vec{hx, -hy});
    } else if (body.family == BodyFamily::Triangle) {
        for (const Vec& v : body.vertices) push_dir(v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace gabor
