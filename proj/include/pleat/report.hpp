#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pleat/angles.hpp"
#include "pleat/error.hpp"
#include "pleat/farey.hpp"
#include "pleat/geometry.hpp"
#include "pleat/triangulation.hpp"
#include "pleat/volume.hpp"

namespace pleat
{

struct RunConfig {
    Kind mode{Kind::TorusBundle};
    std::optional<std::string> word;
    std::optional<std::string> matrix;
    double tol{1e-12};
    int max_iter{200};
    std::optional<std::string> json_path;
    std::optional<std::string> svg_path;
    int svg_periods{2};
    std::optional<std::pair<int, int>> rnlm;
};

/** @brief Everything computed for one input */
struct RunResult {
    std::string input;
    LayeredTriangulation tri;
    AngleStructure structure;
    VolumeReport volume;
    CuspDevelopment dev;
    std::vector<FanChain> fans;
    std::vector<FanDiagnostic> fan_margins;
    std::vector<GeodesicLength> lengths;
    std::optional<RNLMSolution> rnlm;
    std::vector<std::pair<int, RNLMCrossCheck>> rnlm_checks;
};

inline LayeredTriangulation triangulate(const RunConfig& cfg, std::string& input)
{
    if (cfg.word.has_value() == cfg.matrix.has_value()) {
        throw Error(ErrorCode::Parse, "give exactly one of --word and --matrix");
    }
    if (cfg.matrix) {
        input = *cfg.matrix;
        if (cfg.mode == Kind::TwoBridge) {
            throw Error(ErrorCode::Parse, "two-bridge links take a word, not a matrix");
        }
        return build_bundle_triangulation(matrix_to_word(parse_matrix(*cfg.matrix)), cfg.mode);
    }
    input = *cfg.word;
    if (cfg.mode == Kind::TwoBridge) {
        return build_bridge_triangulation(parse_bridge_word(*cfg.word));
    }
    return build_bundle_triangulation(parse_bundle_word(*cfg.word), cfg.mode);
}

/** @brief parse, triangulate, maximize, develop and diagnose; converged is reported, not thrown */
inline RunResult run_pipeline(const RunConfig& cfg)
{
    if (!(cfg.tol > 0)) {
        throw Error(ErrorCode::Parse, "tolerance must be positive");
    }
    RunResult r;
    r.tri = triangulate(cfg, r.input);
    auto [s, rep] = ascend_volume(r.tri, initial_structure(r.tri), cfg.tol, cfg.max_iter);
    r.structure = s;
    r.volume = rep;
    r.dev = develop_cusp(r.tri, s);
    r.fans = fan_chains(r.tri, s);
    r.fan_margins = fan_diagnostics(r.fans);
    r.lengths = geodesic_complex_lengths(r.fans);
    if (cfg.rnlm) {
        const auto [N, M] = *cfg.rnlm;
        const auto syl = detail::group(r.tri.letters);
        const bool match = r.tri.kind != Kind::TwoBridge && syl.size() == 2 &&
                           syl[0].letter == Letter::R && syl[0].exponent == N && syl[1].exponent == M;
        if (!match) {
            throw Error(ErrorCode::Parse, "--rnlm N,M needs the word R^N L^M");
        }
        r.rnlm = solve_rnlm(N, M);
        for (const auto& f : r.fans) {
            r.rnlm_checks.emplace_back(f.syllable, rnlm_crosscheck(*r.rnlm, f));
        }
    }
    return r;
}

namespace detail
{
inline std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// sorted keys (nlohmann objects are ordered maps) and %.17g numbers
inline void dump(const nlohmann::json& j, std::string& out, int indent, int depth)
{
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string padEnd(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
    case nlohmann::json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) {
                out += ",\n";
            }
            first = false;
            out += pad + nlohmann::json(it.key()).dump() + ": ";
            dump(it.value(), out, indent, depth + 1);
        }
        out += "\n" + padEnd + "}";
        return;
    }
    case nlohmann::json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        for (std::size_t k = 0; k < j.size(); ++k) {
            if (k) {
                out += ",\n";
            }
            out += pad;
            dump(j[k], out, indent, depth + 1);
        }
        out += "\n" + padEnd + "]";
        return;
    }
    case nlohmann::json::value_t::number_float:
        out += fmt_double(j.get<double>());
        return;
    default:
        out += j.dump();
    }
}

inline nlohmann::json complex_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }
}  // namespace detail

inline std::string to_json_text(const nlohmann::json& j)
{
    std::string out;
    detail::dump(j, out, 2, 0);
    out += "\n";
    return out;
}

inline nlohmann::json report_json(const RunResult& r)
{
    using nlohmann::json;
    json j;
    j["input"] = r.input;
    j["word"] = r.tri.word;
    j["kind"] = kind_name(r.tri.kind);
    j["m_or_c"] = r.tri.size();
    json hinges = json::array();
    for (const auto& l : r.tri.layers) {
        if (l.hinge) {
            hinges.push_back(l.index);
        }
    }
    j["hinges"] = hinges;
    j["w"] = r.structure.w;
    json angles = json::array();
    for (std::size_t k = 0; k < r.tri.layers.size(); ++k) {
        const auto& a = r.structure.angles[k];
        angles.push_back({{"layer", r.tri.layers[k].index}, {"x", a.x}, {"y", a.y}, {"z", a.z}});
    }
    j["angles"] = angles;
    j["volume"] = r.volume.total_volume;
    j["bounds"] = {{"lower", r.volume.lower_bound},
                   {"upper", r.volume.upper_bound},
                   {"certificate", r.volume.certificate_volume}};
    j["gradient_norm"] = r.volume.gradient_inf_norm;
    j["iterations"] = r.volume.iterations;
    j["converged"] = r.volume.converged;
    json hol = json::array();
    for (const auto& h : r.dev.residuals) {
        hol.push_back({{"generator", h.generator}, {"residual", h.residual}});
    }
    j["holonomy_residuals"] = hol;
    json periods = json::array();
    for (const auto& p : r.dev.periods) {
        periods.push_back({{"component", p.component},
                           {"horizontal", detail::complex_json(p.horizontal)},
                           {"vertical", detail::complex_json(p.vertical)}});
    }
    j["periods"] = periods;
    json fans = json::array();
    for (const auto& f : r.fan_margins) {
        fans.push_back({{"syllable", f.syllable},
                        {"hinge", f.hinge_layer},
                        {"Q", f.Q},
                        {"P", f.P},
                        {"T", f.T},
                        {"margin", f.margin}});
    }
    j["fan_margins"] = fans;
    json lengths = json::array();
    for (const auto& g : r.lengths) {
        lengths.push_back({{"syllable", g.syllable},
                           {"re", g.length.real()},
                           {"im", g.length.imag()},
                           {"orbit_residual", g.orbit_residual}});
    }
    j["geodesic_lengths"] = lengths;
    if (r.rnlm) {
        const auto& s = *r.rnlm;
        json checks = json::array();
        for (const auto& [syl, c] : r.rnlm_checks) {
            checks.push_back({{"syllable", syl},
                              {"vertex_mismatch", c.vertex_mismatch},
                              {"ratio_mismatch", c.ratio_mismatch},
                              {"pinched_angle", c.pinched_angle},
                              {"pinched_prediction", c.pinched_prediction},
                              {"length", detail::complex_json(c.geodesic_length)},
                              {"predicted_length", detail::complex_json(c.predicted_length)}});
        }
        j["rnlm"] = {{"N", s.N},
                     {"M", s.M},
                     {"a", detail::complex_json(s.a)},
                     {"a_prime", detail::complex_json(s.a_prime)},
                     {"b", detail::complex_json(s.b)},
                     {"b_prime", detail::complex_json(s.b_prime)},
                     {"residual", s.residual},
                     {"iterations", s.iterations},
                     {"fans", checks}};
    }
    return j;
}

inline std::string emit_json(const RunResult& r) { return to_json_text(report_json(r)); }

inline std::string emit_error_json(const std::string& input, const Error& e)
{
    nlohmann::json j;
    j["input"] = input;
    j["error"] = {{"code", code_name(e.code())}, {"message", e.message()}};
    return to_json_text(j);
}

/**
 * @brief Cusp tiling as SVG 1.1, one block per cusp component.
 *
 * Each component is rotated and scaled so that its horizontal period is 1000
 * units along the x axis; `periods` copies are drawn in both directions.
 */
inline std::string emit_svg(const LayeredTriangulation& tri, const CuspDevelopment& dev, int periods)
{
    periods = std::max(periods, 1);
    const auto& g = tri.cusp;
    std::ostringstream body;
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", v);
        return std::string(buf);
    };
    double yOffset = 0;
    double width = 0;
    for (const auto& P : dev.periods) {
        if (std::abs(P.horizontal) == 0) {
            continue;
        }
        const cplx scale = 1000.0 / P.horizontal;
        const cplx V = P.vertical * scale;
        const cplx sgnV = V.imag() < 0 ? -1.0 : 1.0;
        std::vector<std::pair<std::array<cplx, 3>, bool>> tris;
        double minX = INFINITY, maxX = -INFINITY, minY = INFINITY, maxY = -INFINITY;
        cplx origin{};
        bool haveOrigin = false;
        for (std::size_t t = 0; t < g.triangles.size(); ++t) {
            if (g.triangles[t].component != P.component) {
                continue;
            }
            if (!haveOrigin) {
                origin = dev.positions[t][0] * scale;
                haveOrigin = true;
            }
            for (int i = 0; i < periods; ++i) {
                for (int k = 0; k < periods; ++k) {
                    std::array<cplx, 3> z{};
                    for (int c = 0; c < 3; ++c) {
                        z[static_cast<std::size_t>(c)] = dev.positions[t][static_cast<std::size_t>(c)] * scale +
                                                         1000.0 * i + sgnV * V * static_cast<double>(k) -
                                                         origin;
                        // SVG y grows downwards
                        z[static_cast<std::size_t>(c)] = std::conj(z[static_cast<std::size_t>(c)]);
                        minX = std::min(minX, z[static_cast<std::size_t>(c)].real());
                        maxX = std::max(maxX, z[static_cast<std::size_t>(c)].real());
                        minY = std::min(minY, z[static_cast<std::size_t>(c)].imag());
                        maxY = std::max(maxY, z[static_cast<std::size_t>(c)].imag());
                    }
                    tris.emplace_back(z, g.triangles[t].hinge);
                }
            }
        }
        const double shift = yOffset - minY + 20;
        const double dx = -minX + 20;
        body << "<g id=\"cusp" << P.component << "\">\n";
        for (const auto& [z, grey] : tris) {
            body << "<polygon points=\"";
            for (int c = 0; c < 3; ++c) {
                body << (c ? " " : "") << num(z[static_cast<std::size_t>(c)].real() + dx) << ","
                     << num(z[static_cast<std::size_t>(c)].imag() + shift);
            }
            body << "\" fill=\"" << (grey ? "#bfbfbf" : "#ffffff")
                 << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
        }
        // fundamental domain
        const std::array<cplx, 4> box{cplx{0, 0}, cplx{1000, 0}, cplx{1000, 0} + sgnV * V, sgnV * V};
        body << "<polygon class=\"domain\" points=\"";
        for (int c = 0; c < 4; ++c) {
            const cplx q = std::conj(box[static_cast<std::size_t>(c)]);
            body << (c ? " " : "") << num(q.real() + dx) << "," << num(q.imag() + shift);
        }
        body << "\" fill=\"none\" stroke=\"#d00000\" stroke-width=\"3\" stroke-dasharray=\"12,6\"/>\n";
        body << "</g>\n";
        yOffset += maxY - minY + 40;
        width = std::max(width, maxX - minX + 40);
    }
    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(width)
        << "\" height=\"" << num(yOffset) << "\" viewBox=\"0 0 " << num(width) << " " << num(yOffset)
        << "\">\n"
        << "<title>" << kind_name(tri.kind) << " " << tri.word << "</title>\n"
        << body.str() << "</svg>\n";
    return svg.str();
}

/** Exit status for an error code */
inline int exit_status(ErrorCode c)
{
    switch (c) {
    case ErrorCode::Parse:
    case ErrorCode::WordEmpty:
        return 2;
    case ErrorCode::NotAnosov:
    case ErrorCode::TooFewSyllables:
    case ErrorCode::WordNotMixed:
        return 3;
    case ErrorCode::NotConverged:
        return 4;
    default:
        return 1;
    }
}

}  // namespace pleat
