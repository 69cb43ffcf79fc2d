#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gabor/system.hpp"

namespace gabor {

/// Three spectrum points with nearly equal time shifts and frequency gaps of
/// order r along a common line.
struct Triple {
    std::array<SpectrumPoint, 3> points;
    double r = 0.0;
    Vec line_direction;          // unit vector u
    double line_deviation = 0.0; // max distance of the b_i from the line
};

inline constexpr double kTripleSlack = 1e-9;  // relative slack on the closed bounds

/// Checks the three extraction conditions; returns an empty string when the
/// triple satisfies them all.
inline std::string triple_violation(const Triple& t) {
    const double r = t.r;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            double da = (t.points[static_cast<size_t>(i)].a - t.points[static_cast<size_t>(j)].a).norm();
            if (da > 1.0 / (100.0 * r) * (1.0 + kTripleSlack))
                return "time shifts too far apart (condition on |a_i - a_j|)";
            double db = (t.points[static_cast<size_t>(i)].b - t.points[static_cast<size_t>(j)].b).norm();
            if (db < r * (1.0 - kTripleSlack) || db > 2.0 * r * (1.0 + kTripleSlack))
                return "frequency gap outside [r, 2r]";
        }
    if (t.line_deviation > (1.0 / r) * (1.0 + kTripleSlack))
        return "frequencies leave the 1/r line neighborhood";
    // deviation field must actually bound the distances to the stated line
    const Vec& u = t.line_direction;
    Vec p0 = t.points[0].b;
    for (const auto& p : t.points) {
        Vec rel = p.b - p0;
        Vec off = rel - rel.dot(u) * u;
        if (off.norm() > t.line_deviation + 2.0 / r) return "line bookkeeping inconsistent";
    }
    return {};
}

/// Line-direction policy for the slab stage of the extraction.
struct LinePolicy {
    enum class Kind { Principal, Explicit };
    Kind kind = Kind::Principal;
    Vec direction;  // used when kind == Explicit
};

struct ExtractionStats {
    size_t spectrum_size = 0;
    size_t candidates_time = 0;   // points whose translated window meets the base cube
    size_t occupied_cells = 0;    // occupied time cells over the best shift grid
    size_t best_fiber = 0;        // frequency fiber size of the selected cell
    size_t slabs = 0;             // occupied slabs in the selected fiber
    size_t best_slab = 0;
    long triples_examined = 0;
};

struct ExtractionResult {
    std::optional<Triple> triple;
    ExtractionStats stats;
};

namespace detail {

/// Principal direction (largest-eigenvalue eigenvector of the covariance) of
/// the frequency fiber, sign-normalized for determinism.
inline Vec principal_direction(const std::vector<Vec>& pts, int d) {
    Vec mean(d);
    for (const auto& p : pts) mean += p;
    mean *= 1.0 / static_cast<double>(pts.size());
    Mat cov(d);
    for (const auto& p : pts) {
        Vec c = p - mean;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) cov(i, j) += c[i] * c[j];
    }
    Vec values;
    Mat vectors;
    jacobi_eigen(cov, values, vectors);
    Vec u(d);
    for (int i = 0; i < d; ++i) u[i] = vectors(i, d - 1);  // ascending order: last is largest
    for (int i = 0; i < d; ++i) {
        if (std::abs(u[i]) > 1e-12) {
            if (u[i] < 0) u = -1.0 * u;
            break;
        }
    }
    return u.normalized();
}

inline int64_t hash_cells(const std::vector<long>& idx) {
    int64_t key = 1469598103934665603LL;
    for (long v : idx) key = (key ^ v) * 1099511628211LL;
    return key;
}

}  // namespace detail

/// Pigeonhole search for a triple satisfying the three extraction conditions.
///
/// Stages: (1) keep points whose translated window body meets the base cube,
/// (2) cover their time shifts by cells small enough to force the |a_i - a_j|
/// condition (2^d half-shifted grids so clusters straddling a cell boundary
/// are still seen) and select the cell with the largest frequency fiber,
/// (3) slice the fiber into slabs transverse to the line direction sized to
/// the full 1/r deviation budget and scan each slab for gaps in [r, 2r].
/// Deterministic given the policy: ties break by shift, then lexicographic
/// cell index, then point order.
inline ExtractionResult extract_triple(const BodyDescriptor& body,
                                       const std::vector<SpectrumPoint>& spectrum, double r,
                                       double R, const BoxRegion& base_cube,
                                       const LinePolicy& policy = {}) {
    if (!(r >= 2.0)) throw InvalidArgument("extract_triple: r must be >= 2");
    if (!(R >= 10.0 * r)) throw InvalidArgument("extract_triple: R must be >= 10 r");
    const int d = body.dim;
    ExtractionResult out;
    out.stats.spectrum_size = spectrum.size();

    // stage 1: A_Q membership via the clamp test (exact for balls and boxes,
    // conservative for ellipsoids)
    std::vector<size_t> candidates;
    for (size_t i = 0; i < spectrum.size(); ++i) {
        const Vec& a = spectrum[i].a;
        if (a.dim() != d) throw InvalidArgument("extract_triple: dimension mismatch");
        Vec clamped(d);
        for (int k = 0; k < d; ++k) clamped[k] = std::clamp(a[k], base_cube.lo[k], base_cube.hi[k]);
        if (gauge(body, clamped - a) < 1.0 && spectrum[i].b.norm() <= R)
            candidates.push_back(i);
    }
    out.stats.candidates_time = candidates.size();
    if (candidates.size() < 3) return out;

    // stage 2: time cells of diameter 1/(100 r), over 2^d shifted grids
    const double cell = 1.0 / (100.0 * r * std::sqrt(static_cast<double>(d)));
    std::vector<size_t> best_cell_points;
    size_t best_occupied = 0;
    for (unsigned shift = 0; shift < (1u << d); ++shift) {
        std::map<std::vector<long>, std::vector<size_t>> cells;
        std::vector<long> idx(static_cast<size_t>(d));
        for (size_t i : candidates) {
            for (int k = 0; k < d; ++k) {
                double off = (shift & (1u << k)) ? 0.5 * cell : 0.0;
                idx[static_cast<size_t>(k)] =
                    static_cast<long>(std::floor((spectrum[i].a[k] + off) / cell));
            }
            cells[idx].push_back(i);
        }
        best_occupied = std::max(best_occupied, cells.size());
        for (const auto& [key, pts] : cells) {
            if (pts.size() > best_cell_points.size()) best_cell_points = pts;
        }
    }
    out.stats.occupied_cells = best_occupied;
    out.stats.best_fiber = best_cell_points.size();
    if (best_cell_points.size() < 3) return out;

    // stage 3: line direction and slabs
    std::vector<Vec> fiber;
    fiber.reserve(best_cell_points.size());
    for (size_t i : best_cell_points) fiber.push_back(spectrum[i].b);
    Vec u;
    if (policy.kind == LinePolicy::Kind::Explicit) {
        if (policy.direction.dim() != d)
            throw InvalidArgument("extract_triple: explicit direction dimension mismatch");
        u = policy.direction.normalized();
    } else {
        u = detail::principal_direction(fiber, d);
    }
    Mat basis = detail::basis_with_last_axis(u);  // columns 0..d-2 span H = u-perp

    // per-axis slab width sized so a full slab stays within the deviation budget
    const double slab_w = d == 2 ? 2.0 / r : 2.0 / (r * std::sqrt(static_cast<double>(d - 1)));
    const double t_lo = std::sqrt(std::max(0.0, r * r - (2.0 / r) * (2.0 / r))) *
                        (1.0 - kTripleSlack);
    const double t_hi = 2.0 * r * (1.0 + kTripleSlack);

    struct SlabEntry {
        double t;
        size_t idx;  // into spectrum
    };
    size_t n_slabs = 0, best_slab = 0;
    long examined = 0;
    std::optional<Triple> found;

    for (unsigned shift = 0; shift < (1u << (d - 1)) && !found; ++shift) {
        std::map<std::vector<long>, std::vector<SlabEntry>> slabs;
        std::vector<long> sidx(static_cast<size_t>(d - 1));
        for (size_t i : best_cell_points) {
            const Vec& b = spectrum[i].b;
            double t = 0.0;
            for (int k = 0; k < d; ++k) t += basis(k, d - 1) * b[k];
            for (int h = 0; h < d - 1; ++h) {
                double coord = 0.0;
                for (int k = 0; k < d; ++k) coord += basis(k, h) * b[k];
                double off = (shift & (1u << h)) ? 0.5 * slab_w : 0.0;
                sidx[static_cast<size_t>(h)] = static_cast<long>(std::floor((coord + off) / slab_w));
            }
            slabs[sidx].push_back(SlabEntry{t, i});
        }
        n_slabs = std::max(n_slabs, slabs.size());

        // visit slabs by descending occupancy, then lexicographic index
        std::vector<const std::pair<const std::vector<long>, std::vector<SlabEntry>>*> order;
        for (const auto& kv : slabs) order.push_back(&kv);
        std::stable_sort(order.begin(), order.end(),
                         [](const auto* x, const auto* y) { return x->second.size() > y->second.size(); });
        if (!order.empty()) best_slab = std::max(best_slab, order.front()->second.size());

        for (const auto* kv : order) {
            auto entries = kv->second;
            std::stable_sort(entries.begin(), entries.end(), [](const SlabEntry& x, const SlabEntry& y) {
                return x.t < y.t || (x.t == y.t && x.idx < y.idx);
            });
            const size_t m = entries.size();
            if (m < 3) continue;
            for (size_t i = 0; i < m && !found; ++i) {
                for (size_t j = i + 1; j < m && !found; ++j) {
                    double g1 = entries[j].t - entries[i].t;
                    if (g1 > t_hi) break;
                    if (g1 < t_lo) continue;
                    for (size_t k = j + 1; k < m && !found; ++k) {
                        double g2 = entries[k].t - entries[j].t;
                        if (entries[k].t - entries[i].t > t_hi) break;
                        if (g2 < t_lo) continue;
                        ++examined;
                        Triple cand;
                        cand.points = {spectrum[entries[i].idx], spectrum[entries[j].idx],
                                       spectrum[entries[k].idx]};
                        cand.r = r;
                        cand.line_direction = u;
                        // line offset: minimax center of the transverse coordinates
                        double dev = 0.0;
                        for (int h = 0; h < d - 1; ++h) {
                            double cmin = 1e300, cmax = -1e300;
                            for (const auto& p : cand.points) {
                                double coord = 0.0;
                                for (int kk = 0; kk < d; ++kk) coord += basis(kk, h) * p.b[kk];
                                cmin = std::min(cmin, coord);
                                cmax = std::max(cmax, coord);
                            }
                            double half = 0.5 * (cmax - cmin);
                            dev += half * half;
                        }
                        cand.line_deviation = std::sqrt(dev);
                        if (triple_violation(cand).empty()) found = cand;
                    }
                }
            }
            if (found) break;
        }
    }
    out.stats.slabs = n_slabs;
    out.stats.best_slab = best_slab;
    out.stats.triples_examined = examined;
    out.triple = found;
    return out;
}

/// Half-integer bookkeeping of the oscillation phase for one spectrum pair:
/// phi = rho*(b_p - b_q) + (a_p - a_q).(b_p - b_q), k = nearest integer to
/// 2 (phi - (d-1)/8) with ties broken toward even k, e = phi - (d-1)/8 - k/2.
struct PhaseResidual {
    long k = 0;
    double e = 0.0;
    double phi = 0.0;
};

inline PhaseResidual phase_residual(const BodyDescriptor& body, const SpectrumPoint& p,
                                    const SpectrumPoint& q) {
    detail::require_smooth(body, "phase_residual");
    if (p.b == q.b) throw InvalidArgument("phase_residual: coincident frequencies");
    const Vec db = p.b - q.b;
    const Vec da = p.a - q.a;
    PhaseResidual out;
    out.phi = support(body, db) + da.dot(db);
    const double shift = (body.dim - 1) / 8.0;
    const double x = 2.0 * (out.phi - shift);
    double k = std::round(x);
    if (std::abs(std::abs(x - std::floor(x)) - 0.5) < 1e-13) {
        // tie at e = +-1/4: take the even side
        double fl = std::floor(x);
        k = (std::fmod(std::abs(fl), 2.0) < 0.5) ? fl : fl + 1.0;
    }
    out.k = static_cast<long>(k);
    out.e = out.phi - shift - 0.5 * k;
    return out;
}

enum class Verdict { Obstructed, Absorbed, Inconclusive };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Obstructed: return "Obstructed";
        case Verdict::Absorbed: return "Absorbed";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

inline constexpr double kResidualBound = 1.0 / 50.0;     // decisive-residual bound
inline constexpr double kIntegralityTol = 3.0 / 25.0;    // distance-to-integer threshold

/// Residue arithmetic of the certificate.
struct PhaseReport {
    std::array<long, 3> k{};    // keyed 12, 23, 13
    std::array<double, 3> e{};  // keyed 12, 23, 13
    double delta = 0.0;         // (d-1)/4 + 2 (e12 + e23 - e13)
    Verdict verdict = Verdict::Inconclusive;
    double tolerance_used = kIntegralityTol;
};

/// delta = (d-1)/4 + 2(e12 + e23 - e13). Obstructed when every residual is
/// decisive (|e| <= 1/50) and delta stays farther than 3/25 from the integers;
/// Absorbed when d = 1 mod 4; Inconclusive otherwise.
inline PhaseReport mod4_certificate(int d, const PhaseResidual& r12, const PhaseResidual& r23,
                                    const PhaseResidual& r13) {
    PhaseReport rep;
    rep.k = {r12.k, r23.k, r13.k};
    rep.e = {r12.e, r23.e, r13.e};
    rep.delta = (d - 1) / 4.0 + 2.0 * (r12.e + r23.e - r13.e);
    double dist = std::abs(rep.delta - std::round(rep.delta));
    bool decisive = std::abs(r12.e) <= kResidualBound && std::abs(r23.e) <= kResidualBound &&
                    std::abs(r13.e) <= kResidualBound;
    if (decisive && dist > kIntegralityTol) rep.verdict = Verdict::Obstructed;
    else if (d % 4 == 1) rep.verdict = Verdict::Absorbed;
    else rep.verdict = Verdict::Inconclusive;
    return rep;
}

/// Per-pair diagnostics attached to the end-to-end report.
struct PairDiagnostics {
    int i = 0, j = 0;              // indices into the triple (0-based)
    PhaseResidual residual;
    double transform_magnitude = 0.0;  // normalized |<g_p, g_q>| for the pair
    bool magnitude_from_quadrature = false;
    double sin_phase = 0.0;        // |sin(2 pi e)|
    double sin_bound = 0.0;        // magnitude/leading-amplitude + C'/|db|
    bool decay_consistent = false; // sin_phase <= sin_bound + slack
    bool cr_bound_ok = false;      // sin_phase <= C/r
};

struct FalsifyOptions {
    double gram_threshold = 1e-3;
    double quad_tol = 0.0;
    LinePolicy policy{};
    std::optional<BoxRegion> base_cube;  // default: unit cube centered at 0
    double remainder_constant = 0.1;     // C' in the sine bound (from a remainder scan)
    double cr_constant = 1.0;            // C in the almost-zero bound C/r
    double leading_constant = 1.0 / std::numbers::pi;  // c_d for the sine bound
    bool verify_orthogonality = true;    // gram-scan the spectrum first (d <= 3 only)
    int threads = 1;
};

struct FalsifyReport {
    bool triple_found = false;
    Triple triple;
    ExtractionStats stats;
    std::array<PairDiagnostics, 3> pairs{};
    PhaseReport certificate;
    double max_gram_defect = 0.0;
    bool orthogonality_checked = false;
    bool near_orthogonal = false;
    double r = 0.0, R = 0.0;
};

/// End-to-end pipeline: verify near-orthogonality, extract a triple, compute
/// the three phase residuals (cross-checking each pair's transform magnitude
/// against the expected almost-zero decay), and run the residue certificate.
inline FalsifyReport falsify(const BodyDescriptor& body, const GaborSystem& system, double r,
                             double R, const FalsifyOptions& opts = {}) {
    if (!body.smooth_positive_curvature())
        throw UnsupportedBody("falsify: window body must be smooth with positive curvature");
    const int d = body.dim;
    FalsifyReport rep;
    rep.r = r;
    rep.R = R;

    if (opts.verify_orthogonality && d <= 3) {
        auto g = gram_scan(system, opts.gram_threshold, opts.quad_tol, opts.threads);
        rep.max_gram_defect = g.max_defect;
        rep.orthogonality_checked = true;
        rep.near_orthogonal = g.max_defect <= opts.gram_threshold;
    }

    BoxRegion q;
    if (opts.base_cube) {
        q = *opts.base_cube;
    } else {
        q.lo = Vec(d);
        q.hi = Vec(d);
        for (int k = 0; k < d; ++k) {
            q.lo[k] = -0.5;
            q.hi[k] = 0.5;
        }
    }
    auto ext = extract_triple(body, system.spectrum, r, R, q, opts.policy);
    rep.stats = ext.stats;
    if (!ext.triple) return rep;
    rep.triple_found = true;
    rep.triple = *ext.triple;

    const double n2 = system.normalization * system.normalization;
    const std::array<std::pair<int, int>, 3> keys = {{{0, 1}, {1, 2}, {0, 2}}};
    std::array<PhaseResidual, 3> residuals;
    for (size_t idx = 0; idx < 3; ++idx) {
        auto [i, j] = keys[idx];
        const auto& p = rep.triple.points[static_cast<size_t>(i)];
        const auto& s = rep.triple.points[static_cast<size_t>(j)];
        PairDiagnostics diag;
        diag.i = i;
        diag.j = j;
        diag.residual = phase_residual(body, p, s);
        residuals[idx] = diag.residual;
        const Vec db = p.b - s.b;
        const double t = db.norm();
        double kappa = gaussian_curvature(body, db.normalized());
        double amplitude = opts.leading_constant / std::sqrt(kappa) * std::pow(t, -(d + 1) / 2.0);
        double raw_magnitude;  // |ft of the pair overlap|, unnormalized
        if (d <= 3) {
            auto ft = ft_intersection(body, p.a, s.a, db, opts.quad_tol);
            raw_magnitude = std::abs(ft.value);
            diag.magnitude_from_quadrature = true;
        } else {
            raw_magnitude = std::abs(herz_leading(body, db, opts.leading_constant));
            diag.magnitude_from_quadrature = false;
        }
        diag.transform_magnitude = n2 * raw_magnitude;
        diag.sin_phase = std::abs(std::sin(2.0 * std::numbers::pi * diag.residual.e));
        diag.sin_bound = raw_magnitude / amplitude + opts.remainder_constant / t;
        diag.decay_consistent = diag.sin_phase <= diag.sin_bound + 0.02;
        diag.cr_bound_ok = diag.sin_phase <= opts.cr_constant / r;
        rep.pairs[idx] = diag;
    }
    rep.certificate = mod4_certificate(d, residuals[0], residuals[1], residuals[2]);
    return rep;
}

}  // namespace gabor
