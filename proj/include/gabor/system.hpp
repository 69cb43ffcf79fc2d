#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <unordered_map>
#include <vector>

#include "gabor/parallel.hpp"
#include "gabor/transform.hpp"

namespace gabor {

/// A time-frequency point (a, b) in R^d x R^d.
struct SpectrumPoint {
    Vec a;
    Vec b;
};

/// Normalized indicator window plus a finite truncated spectrum sample.
struct GaborSystem {
    BodyDescriptor window_body;
    double normalization = 1.0;  // |K|^{-1/2}
    std::vector<SpectrumPoint> spectrum;
    double truncation_radius = 0.0;  // ball of R^{2d} the sample covers

    int dim() const { return window_body.dim; }
};

inline GaborSystem make_system(const BodyDescriptor& body, std::vector<SpectrumPoint> spectrum,
                               double truncation_radius) {
    GaborSystem sys;
    sys.window_body = body;
    sys.normalization = 1.0 / std::sqrt(volume(body));
    sys.truncation_radius = truncation_radius;
    for (const auto& p : spectrum) {
        if (p.a.dim() != body.dim || p.b.dim() != body.dim)
            throw InvalidArgument("make_system: spectrum dimension mismatch");
        if (!p.a.finite() || !p.b.finite())
            throw InvalidArgument("make_system: non-finite spectrum point");
        double r2 = p.a.norm2() + p.b.norm2();
        if (r2 > truncation_radius * truncation_radius * (1.0 + 1e-9))
            throw InvalidArgument("make_system: spectrum point outside truncation radius");
    }
    sys.spectrum = std::move(spectrum);
    return sys;
}

/// Analysis function for STFT/tiling checks: a normalized cube indicator or a
/// translate of the (normalized) window body itself.
struct FunctionSpec {
    enum class Kind { Cube, WindowBody };
    Kind kind = Kind::Cube;
    Vec center;
    double side = 0.5;
};

inline FunctionSpec cube_function(const Vec& center, double side) {
    if (!(side > 0.0)) throw InvalidArgument("cube_function: side must be positive");
    return FunctionSpec{FunctionSpec::Kind::Cube, center, side};
}

inline FunctionSpec window_function(const Vec& center) {
    return FunctionSpec{FunctionSpec::Kind::WindowBody, center, 0.0};
}

/// Short-time Fourier transform V_g f(t, nu) = int f(x) g(x - t) e^{-2 pi i x.nu} dx
/// for the unit-norm indicator pairs the toolkit supports. Cube/cube pairs are
/// exact products of sinc factors; body/body pairs reduce to ft_intersection.
inline Complex stft(const FunctionSpec& f, const BodyDescriptor& window_body,
                    double window_normalization, const Vec& t, const Vec& nu,
                    double quad_tol = 0.0) {
    const int d = window_body.dim;
    if (f.center.dim() != d || t.dim() != d || nu.dim() != d)
        throw InvalidArgument("stft: dimension mismatch");
    if (f.kind == FunctionSpec::Kind::Cube) {
        if (window_body.family != BodyFamily::Cube)
            throw InvalidArgument("stft: cube analysis function requires a cube window");
        double nf = std::pow(f.side, -d / 2.0);
        Vec lo(d), hi(d);
        for (int i = 0; i < d; ++i) {
            lo[i] = std::max(f.center[i] - 0.5 * f.side, t[i] - 0.5 * window_body.sides[i]);
            hi[i] = std::min(f.center[i] + 0.5 * f.side, t[i] + 0.5 * window_body.sides[i]);
            if (hi[i] <= lo[i]) return {0.0, 0.0};
        }
        return nf * window_normalization *
               detail::box_transform(0.5 * (lo + hi), hi - lo, nu);
    }
    // f is the normalized window body translated to f.center
    double nf = 1.0 / std::sqrt(volume(window_body));
    auto r = ft_intersection(window_body, f.center, t, nu, quad_tol);
    return nf * window_normalization * r.value;
}

inline Complex stft(const GaborSystem& sys, const FunctionSpec& f, const Vec& t, const Vec& nu,
                    double quad_tol = 0.0) {
    return stft(f, sys.window_body, sys.normalization, t, nu, quad_tol);
}

/// |<g_p, g_q>| for two distinct spectrum points: the absolute orthogonality
/// integral, normalization^2 |ft_intersection(K, a_p, a_q, b_q - b_p)|.
inline double orthogonality_defect(const GaborSystem& sys, const SpectrumPoint& p,
                                   const SpectrumPoint& q, double quad_tol = 0.0) {
    if (p.a == q.a && p.b == q.b)
        throw InvalidArgument("orthogonality_defect: points coincide (norm case)");
    auto r = ft_intersection(sys.window_body, p.a, q.a, q.b - p.b, quad_tol);
    return sys.normalization * sys.normalization * std::abs(r.value);
}

struct GramScanResult {
    double max_defect = 0.0;
    size_t worst_i = 0, worst_j = 0;
    long pairs_total = 0;
    long pairs_evaluated = 0;  // pairs needing quadrature/closed-form work
    size_t above_threshold = 0;
    bool pruned = false;  // neighbor-pruned mode (spectra beyond the quadratic cap)
};

/// Max orthogonality defect over distinct pairs. Distant time shifts give
/// exactly zero overlap and are skipped; beyond `quadratic_cap` points only
/// neighbor pairs (by a spatial hash on the time shifts) are visited at all.
inline GramScanResult gram_scan(const GaborSystem& sys, double threshold, double quad_tol = 0.0,
                                int threads = 1, size_t quadratic_cap = 10000) {
    GramScanResult res;
    const auto& sp = sys.spectrum;
    const size_t n = sp.size();
    if (n < 2) return res;  // vacuous
    const double diam_gauge = 2.0;  // overlap iff gauge(a - a') <= 2

    auto consider = [&](size_t i, size_t j, GramScanResult& acc) {
        ++acc.pairs_total;
        if (gauge(sys.window_body, sp[i].a - sp[j].a) > diam_gauge) return;
        if (sp[i].a == sp[j].a && sp[i].b == sp[j].b) return;  // duplicate point, norm case
        ++acc.pairs_evaluated;
        double d = orthogonality_defect(sys, sp[i], sp[j], quad_tol);
        if (d > threshold) ++acc.above_threshold;
        if (d > acc.max_defect) {
            acc.max_defect = d;
            acc.worst_i = i;
            acc.worst_j = j;
        }
    };

    if (n <= quadratic_cap) {
        const size_t chunk =
            threads > 1 ? (n + static_cast<size_t>(threads) - 1) / static_cast<size_t>(threads) : n;
        std::vector<GramScanResult> partial(static_cast<size_t>(std::max(threads, 1)));
        detail::parallel_for(static_cast<long>(n), threads, [&](long li) {
            size_t i = static_cast<size_t>(li);
            size_t slot = threads > 1 ? i / chunk : 0;  // one slot per worker chunk
            for (size_t j = i + 1; j < n; ++j) consider(i, j, partial[slot]);
        });
        for (const auto& p : partial) {
            res.pairs_total += p.pairs_total;
            res.pairs_evaluated += p.pairs_evaluated;
            res.above_threshold += p.above_threshold;
            if (p.max_defect > res.max_defect ||
                (p.max_defect == res.max_defect && p.max_defect > 0.0 &&
                 std::make_pair(p.worst_i, p.worst_j) < std::make_pair(res.worst_i, res.worst_j))) {
                res.max_defect = p.max_defect;
                res.worst_i = p.worst_i;
                res.worst_j = p.worst_j;
            }
        }
        return res;
    }

    // neighbor-pruned scan: hash time shifts on a grid of the body diameter
    res.pruned = true;
    const double cell = std::max(2.0 * circumradius(sys.window_body), 1e-6);
    const int d = sys.dim();
    auto key_of = [&](const Vec& a) {
        int64_t key = 0;
        for (int k = 0; k < d; ++k)
            key = key * 73856093 + static_cast<int64_t>(std::floor(a[k] / cell)) * 19349663;
        return key;
    };
    std::unordered_map<int64_t, std::vector<size_t>> grid;
    for (size_t i = 0; i < n; ++i) grid[key_of(sp[i].a)].push_back(i);
    std::vector<int> offsets(static_cast<size_t>(d), -1);
    for (size_t i = 0; i < n; ++i) {
        // visit all neighbor cells (odometer over {-1,0,1}^d)
        std::fill(offsets.begin(), offsets.end(), -1);
        while (true) {
            Vec shifted = sp[i].a;
            for (int k = 0; k < d; ++k) shifted[k] += offsets[static_cast<size_t>(k)] * cell;
            auto it = grid.find(key_of(shifted));
            if (it != grid.end())
                for (size_t j : it->second)
                    if (j > i) consider(i, j, res);
            int k = 0;
            for (; k < d; ++k) {
                if (++offsets[static_cast<size_t>(k)] <= 1) break;
                offsets[static_cast<size_t>(k)] = -1;
            }
            if (k == d) break;
        }
    }
    return res;
}

/// Minimum of |a - a'| + |b - b'| over distinct pairs.
inline double separation(const GaborSystem& sys) {
    const auto& sp = sys.spectrum;
    const size_t n = sp.size();
    if (n < 2) throw UndefinedResult("separation: fewer than two spectrum points");
    auto pair_dist = [&](size_t i, size_t j) {
        return (sp[i].a - sp[j].a).norm() + (sp[i].b - sp[j].b).norm();
    };
    if (n <= 4000) {
        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) best = std::min(best, pair_dist(i, j));
        return best;
    }
    // estimate a bound from a deterministic sample, then confirm on a grid of
    // that size (the true nearest pair shares a cell or touches a neighbor)
    double bound = std::numeric_limits<double>::infinity();
    size_t stride = n / 2000 + 1;
    for (size_t i = 0; i + stride < n; i += stride) bound = std::min(bound, pair_dist(i, i + stride));
    for (size_t i = 0; i + 1 < std::min<size_t>(n, 2000); ++i)
        bound = std::min(bound, pair_dist(i, i + 1));
    if (bound == 0.0) return 0.0;
    const int d = sys.dim();
    const int dims = 2 * d;
    const double cell = bound;
    auto key_of = [&](const SpectrumPoint& p, const std::vector<int>& off) {
        int64_t key = 1469598103934665603LL;
        for (int k = 0; k < dims; ++k) {
            double x = k < d ? p.a[k] : p.b[k - d];
            int64_t c = static_cast<int64_t>(std::floor(x / cell)) + off[static_cast<size_t>(k)];
            key = (key ^ c) * 1099511628211LL;
        }
        return key;
    };
    std::unordered_map<int64_t, std::vector<size_t>> grid;
    std::vector<int> zero(static_cast<size_t>(dims), 0);
    for (size_t i = 0; i < n; ++i) grid[key_of(sp[i], zero)].push_back(i);
    double best = bound;
    std::vector<int> off(static_cast<size_t>(dims), -1);
    for (size_t i = 0; i < n; ++i) {
        std::fill(off.begin(), off.end(), -1);
        while (true) {
            auto it = grid.find(key_of(sp[i], off));
            if (it != grid.end())
                for (size_t j : it->second)
                    if (j > i) best = std::min(best, pair_dist(i, j));
            int k = 0;
            for (; k < dims; ++k) {
                if (++off[static_cast<size_t>(k)] <= 1) break;
                off[static_cast<size_t>(k)] = -1;
            }
            if (k == dims) break;
        }
    }
    return best;
}

namespace detail {

/// Dense multi-dimensional prefix-sum counter over a regular cell grid.
class GridCounter {
public:
    GridCounter(const std::vector<int>& shape) : shape_(shape) {
        strides_.assign(shape.size(), 1);
        size_t total = 1;
        for (size_t k = 0; k < shape.size(); ++k) {
            if (shape[k] <= 0) throw InvalidArgument("GridCounter: empty shape");
            total *= static_cast<size_t>(shape[k] + 1);  // +1 border for prefix sums
        }
        if (total > 60000000) throw InvalidArgument("GridCounter: grid too large");
        // row-major strides over (shape + 1) extents
        size_t s = 1;
        for (size_t k = shape.size(); k-- > 0;) {
            strides_[k] = static_cast<long>(s);
            s *= static_cast<size_t>(shape[k] + 1);
        }
        data_.assign(s, 0);
    }

    /// Adds one at the cell index (clamped indices are the caller's business).
    void add(const std::vector<int>& idx) {
        long off = 0;
        for (size_t k = 0; k < shape_.size(); ++k) {
            if (idx[k] < 0 || idx[k] >= shape_[k]) return;
            off += strides_[k] * (idx[k] + 1);
        }
        data_[static_cast<size_t>(off)] += 1;
    }

    /// Turns raw counts into inclusive prefix sums (call once).
    void integrate() {
        const size_t dims = shape_.size();
        for (size_t k = 0; k < dims; ++k) {
            // sweep axis k: data[i] += data[i - stride_k] for idx_k >= 1
            sweep(0, 0, k);
        }
    }

    /// Count of points with cell index in the half-open box [lo, hi) per axis.
    long box_count(const std::vector<int>& lo, const std::vector<int>& hi) const {
        const size_t dims = shape_.size();
        long total = 0;
        for (unsigned corner = 0; corner < (1u << dims); ++corner) {
            long off = 0;
            int sign = 1;
            for (size_t k = 0; k < dims; ++k) {
                int edge;
                if (corner & (1u << k)) {
                    edge = std::max(0, std::min(lo[k], shape_[k]));
                    sign = -sign;
                } else {
                    edge = std::max(0, std::min(hi[k], shape_[k]));
                }
                off += strides_[k] * edge;
            }
            total += sign * data_[static_cast<size_t>(off)];
        }
        return total;
    }

private:
    void sweep(size_t axis_pos, long base, size_t k) {
        // iterate all indices of axes != k, accumulate along axis k
        if (axis_pos == shape_.size()) {
            long stride = strides_[k];
            long extent = shape_[k] + 1;
            for (long i = 1; i < extent; ++i)
                data_[static_cast<size_t>(base + i * stride)] +=
                    data_[static_cast<size_t>(base + (i - 1) * stride)];
            return;
        }
        if (axis_pos == k) {
            sweep(axis_pos + 1, base, k);
            return;
        }
        for (int i = 0; i <= shape_[axis_pos]; ++i)
            sweep(axis_pos + 1, base + strides_[axis_pos] * i, k);
    }

    std::vector<int> shape_;
    std::vector<long> strides_;
    std::vector<int32_t> data_;
};

}  // namespace detail

struct CoveringResult {
    double side = 0.0;                       // smallest grid-tested covering side
    bool has_witness = false;                // an empty cube at side - 0.5 exists
    SpectrumPoint witness_center;            // center of that empty cube
};

/// Smallest side C (tested on a half-integer center grid, in 0.5 steps) such
/// that every probe cube of side C inside truncation_radius - margin contains
/// a spectrum point.
inline CoveringResult covering_radius(const GaborSystem& sys, double margin = 2.0) {
    const auto& sp = sys.spectrum;
    if (sp.empty()) throw InvalidArgument("covering_radius: empty spectrum");
    const int d = sys.dim();
    const int dims = 2 * d;
    const double step = 0.5;
    const double T = sys.truncation_radius;
    const double Teff = T - margin;
    if (Teff <= step) throw InvalidArgument("covering_radius: margin exhausts the sample");

    // occupancy grid over [-T, T]^{2d}
    const int cells = static_cast<int>(std::ceil(2.0 * T / step));
    std::vector<int> shape(static_cast<size_t>(dims), cells);
    detail::GridCounter counter(shape);
    std::vector<int> idx(static_cast<size_t>(dims));
    for (const auto& p : sp) {
        for (int k = 0; k < dims; ++k) {
            double x = k < d ? p.a[k] : p.b[k - d];
            idx[static_cast<size_t>(k)] = static_cast<int>(std::floor((x + T) / step));
        }
        counter.add(idx);
    }
    counter.integrate();

    const double sqrt_dims = std::sqrt(static_cast<double>(dims));
    // covering test: every aligned probe cube of side C inside the ball of
    // radius Teff contains at least one point
    auto empty_probe = [&](double C, SpectrumPoint* witness) {
        const int span = static_cast<int>(std::llround(C / step));
        const double reach = Teff - 0.5 * C * sqrt_dims;
        if (reach < 0.0) return false;  // no valid probes: vacuously covered
        const int kmax = static_cast<int>(std::floor(reach / step));
        std::vector<int> kidx(static_cast<size_t>(dims), -kmax);
        std::vector<int> lo(static_cast<size_t>(dims)), hi(static_cast<size_t>(dims));
        while (true) {
            double r2 = 0.0;
            for (int k = 0; k < dims; ++k) {
                double c = kidx[static_cast<size_t>(k)] * step;
                r2 += c * c;
            }
            if (r2 <= reach * reach) {
                for (int k = 0; k < dims; ++k) {
                    double c = kidx[static_cast<size_t>(k)] * step;
                    int cell_lo = static_cast<int>(std::llround((c - 0.5 * C + T) / step));
                    lo[static_cast<size_t>(k)] = cell_lo;
                    hi[static_cast<size_t>(k)] = cell_lo + span;
                }
                if (counter.box_count(lo, hi) == 0) {
                    if (witness) {
                        witness->a = Vec(d);
                        witness->b = Vec(d);
                        for (int k = 0; k < dims; ++k) {
                            double c = kidx[static_cast<size_t>(k)] * step;
                            if (k < d) witness->a[k] = c;
                            else witness->b[k - d] = c;
                        }
                    }
                    return true;
                }
            }
            int k = 0;
            for (; k < dims; ++k) {
                if (++kidx[static_cast<size_t>(k)] <= kmax) break;
                kidx[static_cast<size_t>(k)] = -kmax;
            }
            if (k == dims) break;
        }
        return false;
    };

    const double cmax = 2.0 * Teff / sqrt_dims;
    CoveringResult out;
    // dyadic search: bracket [lo, hi] on the 0.5 grid, then bisect
    double lo = 0.0, hi = step;
    while (hi <= cmax && empty_probe(hi, nullptr)) {
        lo = hi;
        hi = std::min(2.0 * hi, std::floor(cmax / step) * step);
        if (hi == lo) break;
    }
    if (hi > cmax || empty_probe(hi, nullptr))
        throw UndefinedResult("covering_radius: no covering side within the probe domain");
    while (hi - lo > step + 1e-12) {
        double mid = std::floor((0.5 * (lo + hi)) / step + 0.5) * step;
        if (mid <= lo || mid >= hi) break;
        if (empty_probe(mid, nullptr)) lo = mid;
        else hi = mid;
    }
    out.side = hi;
    if (lo > 0.0) out.has_witness = empty_probe(lo, &out.witness_center);
    return out;
}

struct DensityEstimate {
    double h = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    long probes = 0;
    bool skipped = false;  // h exceeded the truncation budget
};

namespace detail {

/// min/max of count/h^dims over probe cubes [c - h/2, c + h/2)^dims with
/// centers on a `step` grid, restricted to |c| <= domain_radius. Points are
/// rows of `coords` (dims doubles each). h is snapped to the step grid so
/// cube edges align with cell boundaries and the counts are exact.
inline DensityEstimate window_density(const std::vector<double>& coords, int dims, double h,
                                      double domain_radius, double step = 0.5) {
    DensityEstimate est;
    est.h = h;
    if (domain_radius < 0.0) {
        est.skipped = true;
        return est;
    }
    int kmax = static_cast<int>(std::floor(domain_radius / step));
    // probe-center index grid: k in [-kmax, kmax]^dims; coarsen for memory
    auto probe_cells = [&](int km) {
        double tot = 1.0;
        for (int k = 0; k < dims; ++k) tot *= 2.0 * static_cast<double>(km) + 2.0;
        return tot;
    };
    while (probe_cells(kmax) > 4e6 && kmax > 1) {
        step *= 2.0;
        kmax = static_cast<int>(std::floor(domain_radius / step));
    }

    const size_t n = coords.size() / static_cast<size_t>(dims);
    double hsnap = std::max(step, std::round(h / step) * step);
    const int span = static_cast<int>(std::llround(hsnap / step));
    const double origin = (static_cast<double>(kmax) + 0.5) * step + 0.5 * hsnap;
    const int cell_count = static_cast<int>(std::llround(2.0 * origin / step));
    std::vector<int> cshape(static_cast<size_t>(dims), cell_count);
    GridCounter cells(cshape);
    std::vector<int> idx(static_cast<size_t>(dims));
    for (size_t i = 0; i < n; ++i) {
        bool in = true;
        for (int k = 0; k < dims; ++k) {
            double x = coords[i * static_cast<size_t>(dims) + static_cast<size_t>(k)];
            double v = (x + origin) / step;
            int c = static_cast<int>(std::floor(v));
            if (c < 0 || c >= cell_count) {
                in = false;
                break;
            }
            idx[static_cast<size_t>(k)] = c;
        }
        if (in) cells.add(idx);
    }
    cells.integrate();

    long best_lo = std::numeric_limits<long>::max();
    long best_hi = std::numeric_limits<long>::min();
    long probes = 0;
    std::vector<int> kidx(static_cast<size_t>(dims), -kmax);
    std::vector<int> blo(static_cast<size_t>(dims)), bhi(static_cast<size_t>(dims));
    while (true) {
        double r2 = 0.0;
        for (int k = 0; k < dims; ++k) {
            double c = kidx[static_cast<size_t>(k)] * step;
            r2 += c * c;
        }
        if (r2 <= domain_radius * domain_radius) {
            for (int k = 0; k < dims; ++k) {
                double c = kidx[static_cast<size_t>(k)] * step;
                int cl = static_cast<int>(std::llround((c - 0.5 * hsnap + origin) / step));
                blo[static_cast<size_t>(k)] = cl;
                bhi[static_cast<size_t>(k)] = cl + span;
            }
            long cnt = cells.box_count(blo, bhi);
            best_lo = std::min(best_lo, cnt);
            best_hi = std::max(best_hi, cnt);
            ++probes;
        }
        int k = 0;
        for (; k < dims; ++k) {
            if (++kidx[static_cast<size_t>(k)] <= kmax) break;
            kidx[static_cast<size_t>(k)] = -kmax;
        }
        if (k == dims) break;
    }
    if (probes == 0) {
        est.skipped = true;
        return est;
    }
    double vol = std::pow(hsnap, dims);
    est.h = hsnap;
    est.lower = static_cast<double>(best_lo) / vol;
    est.upper = static_cast<double>(best_hi) / vol;
    est.probes = probes;
    return est;
}

}  // namespace detail

/// Lower/upper Beurling-type density estimates over probe cubes of side h in
/// R^{2d}, probe centers on a half-unit grid within the truncation budget.
inline std::vector<DensityEstimate> beurling_density(const GaborSystem& sys,
                                                     const std::vector<double>& window_sides) {
    const int d = sys.dim();
    const int dims = 2 * d;
    std::vector<double> coords;
    coords.reserve(sys.spectrum.size() * static_cast<size_t>(dims));
    for (const auto& p : sys.spectrum) {
        for (int k = 0; k < d; ++k) coords.push_back(p.a[k]);
        for (int k = 0; k < d; ++k) coords.push_back(p.b[k]);
    }
    std::vector<DensityEstimate> out;
    for (double h : window_sides) {
        if (!(h > 0.0)) throw InvalidArgument("beurling_density: window side must be positive");
        double domain = sys.truncation_radius - 0.5 * h * std::sqrt(static_cast<double>(dims));
        out.push_back(detail::window_density(coords, dims, h, domain));
    }
    return out;
}

/// Axis-aligned box region in R^d.
struct BoxRegion {
    Vec lo;
    Vec hi;
};

/// Lower density of the frequency projection of the spectrum points whose time
/// shift lies within `ball_radius` of the region, over frequency windows of
/// side h.
inline DensityEstimate localized_lower_density(const GaborSystem& sys, const BoxRegion& region,
                                               double ball_radius, double h) {
    const int d = sys.dim();
    if (region.lo.dim() != d || region.hi.dim() != d)
        throw InvalidArgument("localized_lower_density: region dimension mismatch");
    // pi_2 is a set projection: the same frequency reached from several time
    // shifts counts once
    std::vector<Vec> freqs;
    for (const auto& p : sys.spectrum) {
        double dist2 = 0.0;
        for (int k = 0; k < d; ++k) {
            double c = std::max({region.lo[k] - p.a[k], 0.0, p.a[k] - region.hi[k]});
            dist2 += c * c;
        }
        if (dist2 <= ball_radius * ball_radius) freqs.push_back(p.b);
    }
    std::sort(freqs.begin(), freqs.end(), [d](const Vec& x, const Vec& y) {
        for (int k = 0; k < d; ++k) {
            if (x[k] < y[k]) return true;
            if (x[k] > y[k]) return false;
        }
        return false;
    });
    freqs.erase(std::unique(freqs.begin(), freqs.end()), freqs.end());
    std::vector<double> coords;
    coords.reserve(freqs.size() * static_cast<size_t>(d));
    for (const auto& b : freqs)
        for (int k = 0; k < d; ++k) coords.push_back(b[k]);
    double domain = sys.truncation_radius - 0.5 * h * std::sqrt(static_cast<double>(d));
    return detail::window_density(coords, d, h, domain);
}

struct TilingReport {
    double max_defect = 0.0;  // max over probes of |sum - 1|
    double max_sum = 0.0;     // packing check: should stay <= 1 + tolerance
    double min_sum = 0.0;
    std::vector<double> sums;
    double min_tail_gap = 0.0;   // min distance from probe frequency to truncation
    bool tail_warning = false;   // margin likely too small for the declared defect
    double tail_estimate = 0.0;  // crude upper estimate of the truncated mass
};

/// Evaluates sum_alpha |V_g f(w - alpha)|^2 at each probe w and reports the
/// worst deviation from the tiling value 1 plus the packing maximum.
inline TilingReport tiling_defect(const GaborSystem& sys, const FunctionSpec& f,
                                  const std::vector<SpectrumPoint>& probes,
                                  double quad_tol = 0.0, double tail_margin = 25.0) {
    if (probes.empty()) throw InvalidArgument("tiling_defect: no probes");
    const int d = sys.dim();
    TilingReport rep;
    rep.min_sum = std::numeric_limits<double>::infinity();
    rep.min_tail_gap = std::numeric_limits<double>::infinity();

    // time-support radius of V_g f in the t variable
    double t_reach;
    if (f.kind == FunctionSpec::Kind::Cube && sys.window_body.family == BodyFamily::Cube) {
        double wmax = 0.0;
        for (int i = 0; i < d; ++i) wmax = std::max(wmax, sys.window_body.sides[i]);
        t_reach = 0.5 * (f.side + wmax);
    } else {
        t_reach = 2.0 * circumradius(sys.window_body);
    }

    double freq_extent = 0.0;
    for (const auto& p : sys.spectrum) freq_extent = std::max(freq_extent, p.b.norm());

    for (const auto& w : probes) {
        double sum = 0.0;
        long cols = 0;
        for (const auto& alpha : sys.spectrum) {
            Vec t = w.a - alpha.a;
            if (t.norm_inf() >= t_reach) continue;
            Complex v = stft(sys, f, t, w.b - alpha.b, quad_tol);
            sum += std::norm(v);
            ++cols;
        }
        (void)cols;
        rep.sums.push_back(sum);
        rep.max_sum = std::max(rep.max_sum, sum);
        rep.min_sum = std::min(rep.min_sum, sum);
        rep.max_defect = std::max(rep.max_defect, std::abs(sum - 1.0));
        rep.min_tail_gap = std::min(rep.min_tail_gap, freq_extent - w.b.norm());
    }
    rep.tail_warning = rep.min_tail_gap < tail_margin;
    // heuristic frequency-tail mass for cube/cube pairs: O(1/B) per active column
    if (rep.min_tail_gap > 0.0)
        rep.tail_estimate = 32.0 / (std::numbers::pi * std::numbers::pi * std::numbers::pi *
                                    rep.min_tail_gap);
    return rep;
}

/// Uniformly seeded probe points in [-half_width, half_width]^{2d}.
inline std::vector<SpectrumPoint> random_probes(int d, int count, double half_width,
                                                uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-half_width, half_width);
    std::vector<SpectrumPoint> out;
    out.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        SpectrumPoint p{Vec(d), Vec(d)};
        for (int k = 0; k < d; ++k) p.a[k] = u(rng);
        for (int k = 0; k < d; ++k) p.b[k] = u(rng);
        out.push_back(p);
    }
    return out;
}

namespace detail {

/// Enumerates lattice points A k (diagonal A) with per-axis index bounds
/// derived from the radius constraint, invoking fn on each.
template <class Fn>
inline void enumerate_diagonal_lattice(const Mat& a, double radius, Fn&& fn) {
    const int d = a.dim();
    std::vector<long> kmax(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i)
        kmax[static_cast<size_t>(i)] = static_cast<long>(std::floor(radius / std::abs(a(i, i))));
    std::vector<long> k(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) k[static_cast<size_t>(i)] = -kmax[static_cast<size_t>(i)];
    while (true) {
        Vec x(d);
        for (int i = 0; i < d; ++i) x[i] = a(i, i) * static_cast<double>(k[static_cast<size_t>(i)]);
        if (x.norm() <= radius + 1e-12) fn(x);
        int i = 0;
        for (; i < d; ++i) {
            if (++k[static_cast<size_t>(i)] <= kmax[static_cast<size_t>(i)]) break;
            k[static_cast<size_t>(i)] = -kmax[static_cast<size_t>(i)];
        }
        if (i == d) break;
    }
}

}  // namespace detail

/// Spectrum A Z^d x B Z^d truncated to a cylinder: |a| <= time_radius,
/// |b| <= freq_radius. A and B must be diagonal.
inline std::vector<SpectrumPoint> make_lattice_spectrum(const Mat& a, const Mat& b,
                                                        double time_radius, double freq_radius) {
    if (!a.is_diagonal() || !b.is_diagonal())
        throw UnsupportedBody("make_lattice_spectrum: diagonal lattices only");
    std::vector<Vec> freqs;
    detail::enumerate_diagonal_lattice(b, freq_radius, [&](const Vec& x) { freqs.push_back(x); });
    std::vector<SpectrumPoint> out;
    detail::enumerate_diagonal_lattice(a, time_radius, [&](const Vec& x) {
        for (const Vec& f : freqs) out.push_back(SpectrumPoint{x, f});
    });
    return out;
}

/// Ground-truth orthonormal system from lattice duality: window = fundamental
/// box of L = scale Z^d (diagonal scale only), spectrum = (L x L*) truncated to
/// the ball of R^{2d} of the given radius.
inline GaborSystem lattice_onb(const Mat& scale, double truncation_radius) {
    const int d = scale.dim();
    if (!scale.is_diagonal())
        throw UnsupportedBody("lattice_onb: non-diagonal scale (fundamental domain is not a box)");
    Vec sides(d);
    for (int i = 0; i < d; ++i) {
        if (!(scale(i, i) > 0.0)) throw InvalidArgument("lattice_onb: scale must be positive");
        sides[i] = scale(i, i);
    }
    BodyDescriptor window = make_box(sides);
    Mat dual(d);
    for (int i = 0; i < d; ++i) dual(i, i) = 1.0 / scale(i, i);

    std::vector<SpectrumPoint> spectrum;
    detail::enumerate_diagonal_lattice(scale, truncation_radius, [&](const Vec& a) {
        double rem2 = truncation_radius * truncation_radius - a.norm2();
        if (rem2 < 0.0) return;
        detail::enumerate_diagonal_lattice(dual, std::sqrt(rem2), [&](const Vec& b) {
            spectrum.push_back(SpectrumPoint{a, b});
        });
    });
    return make_system(window, std::move(spectrum), truncation_radius);
}

/// Cylinder-truncated variant of lattice_onb for tiling experiments that need
/// a deep frequency tail but only a few time columns.
inline GaborSystem lattice_onb_cylinder(const Mat& scale, double time_radius,
                                        double freq_radius) {
    const int d = scale.dim();
    if (!scale.is_diagonal())
        throw UnsupportedBody("lattice_onb: non-diagonal scale (fundamental domain is not a box)");
    Vec sides(d);
    for (int i = 0; i < d; ++i) sides[i] = scale(i, i);
    Mat dual(d);
    for (int i = 0; i < d; ++i) dual(i, i) = 1.0 / scale(i, i);
    auto spectrum = make_lattice_spectrum(scale, dual, time_radius, freq_radius);
    double trunc = std::sqrt(time_radius * time_radius + freq_radius * freq_radius);
    return make_system(make_box(sides), std::move(spectrum), trunc);
}

}  // namespace gabor
