// Complete hyperbolic structures on punctured-torus bundles, 4-punctured-sphere
// bundles and two-bridge link complements.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pleat/report.hpp"

namespace
{

bool write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    return static_cast<bool>(out);
}

std::pair<int, int> parse_pair(const std::string& s)
{
    const auto comma = s.find(',');
    if (comma == std::string::npos) {
        throw pleat::Error(pleat::ErrorCode::Parse, "--rnlm expects N,M");
    }
    try {
        return {std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
    } catch (const std::exception&) {
        throw pleat::Error(pleat::ErrorCode::Parse, "--rnlm expects N,M");
    }
}

int run(const pleat::RunConfig& cfg)
{
    const std::string input = cfg.word ? *cfg.word : cfg.matrix.value_or("");
    try {
        const auto result = pleat::run_pipeline(cfg);
        const std::string json = pleat::emit_json(result);
        if (cfg.json_path) {
            if (!write_file(*cfg.json_path, json)) {
                std::cerr << "cannot write " << *cfg.json_path << "\n";
                return 1;
            }
        } else {
            std::cout << json;
        }
        if (cfg.svg_path && !write_file(*cfg.svg_path, pleat::emit_svg(result.tri, result.dev, cfg.svg_periods))) {
            std::cerr << "cannot write " << *cfg.svg_path << "\n";
            return 1;
        }
        if (!result.volume.converged) {
            std::cerr << pleat::code_name(pleat::ErrorCode::NotConverged) << ": gradient norm "
                      << result.volume.gradient_inf_norm << " after " << result.volume.iterations
                      << " iterations; smallest angle at " << result.volume.degeneracy_hint << "\n";
            return pleat::exit_status(pleat::ErrorCode::NotConverged);
        }
        return 0;
    } catch (const pleat::Error& e) {
        std::cerr << e.what() << "\n";
        if (cfg.json_path) {
            write_file(*cfg.json_path, pleat::emit_error_json(input, e));
        }
        return pleat::exit_status(e.code());
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Complete hyperbolic structures from layered ideal triangulations"};
    app.require_subcommand(1);

    pleat::RunConfig cfg;
    std::string rnlm;
    auto addCommon = [&](CLI::App* sub) {
        auto* w = sub->add_option("--word", cfg.word, "RL-word, e.g. R3L2 or RRRLL");
        auto* m = sub->add_option("--matrix", cfg.matrix, "monodromy a,b,c,d (bundles only)");
        w->excludes(m);
        sub->add_option("--tol", cfg.tol, "gradient tolerance")->capture_default_str();
        sub->add_option("--max-iter", cfg.max_iter, "iteration cap")->capture_default_str();
        sub->add_option("--json", cfg.json_path, "write the JSON report here instead of stdout");
        sub->add_option("--svg", cfg.svg_path, "write the cusp tiling here");
        sub->add_option("--svg-periods", cfg.svg_periods, "copies of the domain per direction")
            ->capture_default_str();
        sub->add_option("--rnlm", rnlm, "N,M: compare with the analytic R^N L^M solution");
    };
    auto* bundle = app.add_subcommand("bundle", "punctured-torus bundle");
    auto* sphere = app.add_subcommand("sphere", "4-punctured-sphere bundle");
    auto* bridge = app.add_subcommand("bridge", "two-bridge link complement");
    for (auto* sub : {bundle, sphere, bridge}) {
        addCommon(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    cfg.mode = sphere->parsed()   ? pleat::Kind::SphereBundle
               : bridge->parsed() ? pleat::Kind::TwoBridge
                                  : pleat::Kind::TorusBundle;
    if (!rnlm.empty()) {
        try {
            cfg.rnlm = parse_pair(rnlm);
        } catch (const pleat::Error& e) {
            std::cerr << e.what() << "\n";
            return 2;
        }
    }
    return run(cfg);
}
