#pragma once
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gabor/certificate.hpp"
#include "gabor/generators.hpp"

namespace gabor::io {

using nlohmann::json;

inline json vec_to_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.dim(); ++i) a.push_back(v[i]);
    return a;
}

inline Vec vec_from_json(const json& a) {
    if (!a.is_array() || a.size() > static_cast<size_t>(Vec::kMaxDim))
        throw InvalidArgument("vec_from_json: expected a short numeric array");
    Vec v(static_cast<int>(a.size()));
    for (size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
    return v;
}

/// Body description schema: {"dim": d, "family": "...", "params": {...}}.
inline BodyDescriptor body_from_json(const json& j) {
    if (!j.contains("dim") || !j.contains("family"))
        throw InvalidArgument("body_from_json: need dim and family");
    const int d = j["dim"].get<int>();
    const std::string fam = j["family"].get<std::string>();
    const json params = j.value("params", json::object());
    if (fam == "ball") return make_ball(d, params.value("radius", 1.0));
    if (fam == "ellipsoid") {
        if (params.contains("semi_axes")) return make_ellipsoid_semiaxes(vec_from_json(params["semi_axes"]));
        if (!params.contains("matrix")) throw InvalidArgument("ellipsoid: need matrix or semi_axes");
        const json& rows = params["matrix"];
        if (!rows.is_array() || static_cast<int>(rows.size()) != d)
            throw InvalidArgument("ellipsoid: matrix must be d x d");
        Mat m(d);
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k) m(i, k) = rows[static_cast<size_t>(i)][static_cast<size_t>(k)].get<double>();
        return make_ellipsoid(m);
    }
    if (fam == "superellipsoid") return make_superellipsoid(d, params.value("exponent", 4.0));
    if (fam == "cube") {
        if (params.contains("sides")) return make_box(vec_from_json(params["sides"]));
        return make_cube(d, params.value("side", 1.0));
    }
    if (fam == "triangle") {
        if (d != 2) throw InvalidArgument("triangle: d = 2 only");
        if (params.contains("vertices")) {
            const json& vs = params["vertices"];
            if (vs.size() != 3) throw InvalidArgument("triangle: need 3 vertices");
            return make_triangle(vec_from_json(vs[0]), vec_from_json(vs[1]), vec_from_json(vs[2]));
        }
        return make_triangle();
    }
    throw InvalidArgument("body_from_json: unknown family '" + fam + "'");
}

inline json body_to_json(const BodyDescriptor& b) {
    json j;
    j["dim"] = b.dim;
    j["family"] = family_name(b.family);
    json p = json::object();
    switch (b.family) {
        case BodyFamily::Ball: p["radius"] = b.radius; break;
        case BodyFamily::Ellipsoid: {
            json rows = json::array();
            for (int i = 0; i < b.dim; ++i) {
                json row = json::array();
                for (int k = 0; k < b.dim; ++k) row.push_back(b.matrix(i, k));
                rows.push_back(row);
            }
            p["matrix"] = rows;
            break;
        }
        case BodyFamily::Superellipsoid: p["exponent"] = b.exponent; break;
        case BodyFamily::Cube: p["sides"] = vec_to_json(b.sides); break;
        case BodyFamily::Triangle: {
            json vs = json::array();
            for (const auto& v : b.vertices) vs.push_back(vec_to_json(v));
            p["vertices"] = vs;
            break;
        }
    }
    j["params"] = p;
    return j;
}

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// Spectrum CSV: header a1..ad,b1..bd then one row per point.
inline std::string spectrum_to_csv(const std::vector<SpectrumPoint>& pts, int d) {
    std::ostringstream out;
    for (int k = 0; k < d; ++k) out << "a" << (k + 1) << ",";
    for (int k = 0; k < d; ++k) out << "b" << (k + 1) << (k + 1 < d ? "," : "\n");
    for (const auto& p : pts) {
        for (int k = 0; k < d; ++k) out << format_double(p.a[k]) << ",";
        for (int k = 0; k < d; ++k) out << format_double(p.b[k]) << (k + 1 < d ? "," : "\n");
    }
    return out.str();
}

inline std::vector<SpectrumPoint> spectrum_from_csv(std::istream& in, int d) {
    std::vector<SpectrumPoint> pts;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                cols.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur.push_back(c);
            }
        }
        cols.push_back(cur);
        if (first) {
            first = false;
            // header row detection: non-numeric first column
            char* end = nullptr;
            std::strtod(cols[0].c_str(), &end);
            if (end == cols[0].c_str()) continue;
        }
        if (static_cast<int>(cols.size()) != 2 * d)
            throw InvalidArgument("spectrum_from_csv: expected " + std::to_string(2 * d) +
                                  " columns");
        SpectrumPoint p{Vec(d), Vec(d)};
        for (int k = 0; k < d; ++k) p.a[k] = std::stod(cols[static_cast<size_t>(k)]);
        for (int k = 0; k < d; ++k) p.b[k] = std::stod(cols[static_cast<size_t>(d + k)]);
        pts.push_back(p);
    }
    return pts;
}

inline std::vector<SpectrumPoint> spectrum_from_csv_file(const std::string& path, int d) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("spectrum_from_csv_file: cannot open " + path);
    return spectrum_from_csv(in, d);
}

/// AsymptoticReport tabular form: magnitude, numeric, leading, remainder.
inline std::string report_to_csv(const AsymptoticReport& rep) {
    std::ostringstream out;
    out << "magnitude,numeric,leading,remainder\n";
    for (size_t i = 0; i < rep.magnitudes.size(); ++i)
        out << format_double(rep.magnitudes[i]) << "," << format_double(rep.numeric_values[i])
            << "," << format_double(rep.leading_values[i]) << ","
            << format_double(rep.remainders[i]) << "\n";
    return out.str();
}

inline json report_summary_json(const AsymptoticReport& rep) {
    json j;
    j["direction"] = vec_to_json(rep.direction);
    j["exponent"] = rep.degenerate_fit ? json() : json(rep.fitted_decay_exponent);
    j["c_d"] = rep.calibration_constant;
    j["remainder_envelope_constant"] = rep.remainder_envelope_constant;
    j["degenerate_fit"] = rep.degenerate_fit;
    j["points"] = rep.magnitudes.size();
    return j;
}

inline json triple_to_json(const Triple& t) {
    json j;
    json pts = json::array();
    for (const auto& p : t.points) {
        json q;
        q["a"] = vec_to_json(p.a);
        q["b"] = vec_to_json(p.b);
        pts.push_back(q);
    }
    j["points"] = pts;
    j["r"] = t.r;
    j["line_direction"] = vec_to_json(t.line_direction);
    j["line_deviation"] = t.line_deviation;
    return j;
}

inline json stats_to_json(const ExtractionStats& s) {
    json j;
    j["spectrum_size"] = s.spectrum_size;
    j["candidates_time"] = s.candidates_time;
    j["occupied_cells"] = s.occupied_cells;
    j["best_fiber"] = s.best_fiber;
    j["slabs"] = s.slabs;
    j["best_slab"] = s.best_slab;
    j["triples_examined"] = s.triples_examined;
    return j;
}

inline json falsify_to_json(const FalsifyReport& rep) {
    json j;
    j["parameters"] = {{"r", rep.r}, {"R", rep.R}};
    j["triple_found"] = rep.triple_found;
    j["extraction_stats"] = stats_to_json(rep.stats);
    j["orthogonality_checked"] = rep.orthogonality_checked;
    if (rep.orthogonality_checked) {
        j["max_gram_defect"] = rep.max_gram_defect;
        j["near_orthogonal"] = rep.near_orthogonal;
    }
    if (!rep.triple_found) {
        j["verdict"] = "NotFound";
        return j;
    }
    j["triple"] = triple_to_json(rep.triple);
    json pairs = json::array();
    const char* names[3] = {"12", "23", "13"};
    for (size_t idx = 0; idx < 3; ++idx) {
        const auto& p = rep.pairs[idx];
        json q;
        q["pair"] = names[idx];
        q["phi"] = p.residual.phi;
        q["k"] = p.residual.k;
        q["e"] = p.residual.e;
        q["transform_magnitude"] = p.transform_magnitude;
        q["magnitude_source"] = p.magnitude_from_quadrature ? "quadrature" : "asymptotic";
        q["sin_phase"] = p.sin_phase;
        q["sin_bound"] = p.sin_bound;
        q["decay_consistent"] = p.decay_consistent;
        q["cr_bound_ok"] = p.cr_bound_ok;
        pairs.push_back(q);
    }
    j["pairs"] = pairs;
    j["delta"] = rep.certificate.delta;
    j["verdict"] = verdict_name(rep.certificate.verdict);
    j["tolerance_used"] = rep.certificate.tolerance_used;
    return j;
}

inline json density_to_json(const std::vector<DensityEstimate>& est) {
    json rows = json::array();
    for (const auto& e : est) {
        json r;
        r["h"] = e.h;
        r["lower"] = e.lower;
        r["upper"] = e.upper;
        r["probes"] = e.probes;
        r["skipped"] = e.skipped;
        rows.push_back(r);
    }
    return rows;
}

inline std::string density_to_csv(const std::vector<DensityEstimate>& est) {
    std::ostringstream out;
    out << "h,lower,upper,probes,skipped\n";
    for (const auto& e : est)
        out << format_double(e.h) << "," << format_double(e.lower) << ","
            << format_double(e.upper) << "," << e.probes << "," << (e.skipped ? 1 : 0) << "\n";
    return out.str();
}

}  // namespace gabor::io
