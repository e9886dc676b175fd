// gqsearch: command-line runner for spectral analysis, success curves,
// phase-estimation sweeps and original-vs-modified search comparisons.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure, 1 anything else.

#include "gqs/gqs.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace gqs;
namespace fs = std::filesystem;

struct Globals {
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string format = "json";
};

struct Source {
    std::string spec_path;
    std::string scenario;
    std::optional<double> phi;
};

void add_source_options(CLI::App* cmd, Source& src) {
    auto* spec = cmd->add_option("--spec", src.spec_path, "DiffusionSpec or scenario JSON file");
    auto* sc = cmd->add_option("--scenario", src.scenario, "built-in scenario name or scenario JSON file");
    spec->excludes(sc);
    cmd->add_option("--phi", src.phi, "phase of the selective target rotation (radians)");
}

Scenario resolve(const Source& src, const Globals& g) {
    Scenario sc;
    if (!src.scenario.empty()) {
        if (fs::path(src.scenario).extension() == ".json") {
            sc = load_scenario_file(src.scenario);
        } else {
            sc = builtin_scenario(src.scenario, g.seed.value_or(0));
        }
    } else if (!src.spec_path.empty()) {
        sc = load_scenario_file(src.spec_path);
    } else {
        throw ValidationError("one of --spec or --scenario is required");
    }
    if (g.seed) {
        sc.spec.seed = *g.seed;
    }
    if (src.phi) {
        sc.phi = *src.phi;
    }
    sc.spec.validate();
    return sc;
}

void emit(const Globals& g, const std::string& file_name, const std::string& content) {
    if (g.out_dir.empty()) {
        std::cout << content;
        if (!content.empty() && content.back() != '\n') {
            std::cout << '\n';
        }
    } else {
        write_atomic(fs::path(g.out_dir) / file_name, content);
    }
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------

std::string analyze_output(const Scenario& sc, bool report, const std::string& format) {
    const auto problem = SearchProblem::make(sc.spec, sc.phi);
    if (report) {
        const auto rows = residual_table(problem);
        return format == "csv" ? residual_csv(rows) : dump(residual_json(rows));
    }
    return format == "csv" ? summary_csv(problem.summary) : dump(nlohmann::json(problem.summary));
}

std::string curve_output(const Scenario& sc, std::optional<std::size_t> q_max, const std::string& format) {
    const auto d = build_diffusion(sc.spec);
    const std::size_t len = q_max ? *q_max : default_curve_length(std::sqrt(1.0 + moments(d.eig, 2)), sc.spec.alpha());
    const auto curve = success_curve(d.op, sc.spec.target_index, sc.phi, sc.spec.source_state(), len);
    if (format == "csv") {
        return curve_csv(curve);
    }
    nlohmann::json j = nlohmann::json::array();
    for (const auto& p : curve.points) {
        j.push_back({{"q", p.q}, {"probability", p.probability}});
    }
    return dump(j);
}

struct PeaArgs {
    std::optional<std::size_t> bits;
    std::string sweep;
    double epsilon = 0.05;
    std::string prep = "kaiser";
};

std::vector<std::size_t> pea_bits(const PeaArgs& a, double theta_min) {
    if (a.bits && !a.sweep.empty()) {
        throw ValidationError("--bits and --sweep are mutually exclusive");
    }
    if (a.bits) {
        return {*a.bits};
    }
    if (!a.sweep.empty()) {
        const auto colon = a.sweep.find(':');
        if (colon == std::string::npos) {
            throw ValidationError("--sweep expects b0:b1");
        }
        std::size_t b0 = 0;
        std::size_t b1 = 0;
        try {
            b0 = std::stoul(a.sweep.substr(0, colon));
            b1 = std::stoul(a.sweep.substr(colon + 1));
        } catch (const std::exception&) {
            throw ValidationError("--sweep expects two non-negative integers b0:b1");
        }
        if (b1 < b0) {
            throw ValidationError("--sweep needs b0 <= b1");
        }
        std::vector<std::size_t> out;
        for (std::size_t b = b0; b <= b1; ++b) out.push_back(b);
        return out;
    }
    return {required_ancillas(theta_min, a.epsilon, parse_ancilla_prep(a.prep)).ancilla_count};
}

std::string pea_output(const Scenario& sc, const PeaArgs& a, const std::string& format) {
    const auto d = build_diffusion(sc.spec);
    const double theta_min = std::min(d.eig.theta_min(), pi);
    std::vector<PEARow> rows;
    for (std::size_t b : pea_bits(a, theta_min)) {
        PEAConfig cfg;
        cfg.ancilla_count = b;
        cfg.theta_min = theta_min;
        cfg.target_error = a.epsilon;
        cfg.prep = parse_ancilla_prep(a.prep);
        rows.push_back(pea_row(d, cfg));
    }
    return format == "csv" ? pea_csv(rows) : dump(pea_json(rows));
}

struct CompareArgs {
    std::optional<double> epsilon;
    std::string mode = "both";
    std::string inversion = "pea";
    std::string prep = "kaiser";
    bool refine = false;
    double c1 = 1.0;
    double c2 = 1.0;
};

struct CompareResult {
    nlohmann::json json;
    std::string costs;
};

CompareResult compare_output(const Scenario& sc, const CompareArgs& a) {
    const auto problem = SearchProblem::make(sc.spec, sc.phi);
    const ClassifierThresholds th{a.c1, a.c2};
    std::vector<RunReport> reports;
    if (a.mode == "original" || a.mode == "both") {
        reports.push_back(original_search(problem, std::nullopt, th));
    }
    if (a.mode == "modified" || a.mode == "both") {
        ModifiedOptions opt;
        opt.inversion = a.inversion == "exact" ? InversionImpl::exact : InversionImpl::approximate;
        opt.epsilon = a.epsilon ? a.epsilon : sc.epsilon;
        opt.prep = parse_ancilla_prep(a.prep);
        opt.refine_q = a.refine;
        opt.thresholds = th;
        reports.push_back(modified_search(problem, opt));
    }
    CompareResult out;
    out.json = {{"scenario", sc.name}, {"phi", sc.phi}, {"summary", problem.summary}, {"reports", reports}};
    out.costs = cost_csv(reports);
    return out;
}

std::vector<std::size_t> batch_pea_bits(const Scenario& sc) {
    const auto d = build_diffusion(sc.spec);
    const double theta_min = std::min(d.eig.theta_min(), pi);
    const auto lo = static_cast<std::size_t>(std::max(1.0, std::ceil(std::log2(2.0 * pi / theta_min) - 1e-12)));
    const auto hi = required_ancillas(theta_min, 0.05).ancilla_count + 1;
    std::vector<std::size_t> out;
    for (std::size_t b = lo; b <= hi && sc.spec.dimension * (std::size_t{1} << b) <= (std::size_t{1} << 20); ++b) {
        out.push_back(b);
    }
    return out;
}

void run_batch(const std::vector<std::string>& names, const Globals& g) {
    const fs::path root = g.out_dir.empty() ? fs::path("batch-output") : fs::path(g.out_dir);
    nlohmann::json manifest = {{"seed", g.seed.value_or(0)}, {"scenarios", nlohmann::json::array()}};
    for (const auto& name : names) {
        Source src;
        src.scenario = name;
        const Scenario sc = resolve(src, g);
        const fs::path dir = root / sc.name;
        write_atomic(dir / "scenario.json", dump(nlohmann::json(sc)));
        write_atomic(dir / "summary.json", analyze_output(sc, false, "json"));
        write_atomic(dir / "residuals.csv", analyze_output(sc, true, "csv"));
        write_atomic(dir / "curve.csv", curve_output(sc, std::nullopt, "csv"));
        PeaArgs pa;
        const auto bits = batch_pea_bits(sc);
        if (!bits.empty()) {
            pa.sweep = std::to_string(bits.front()) + ":" + std::to_string(bits.back());
        }
        write_atomic(dir / "pea.csv", pea_output(sc, pa, "csv"));
        const auto cmp = compare_output(sc, CompareArgs{});
        write_atomic(dir / "compare.json", dump(cmp.json));
        write_atomic(dir / "costs.csv", cmp.costs);
        manifest["scenarios"].push_back(
            {{"name", sc.name},
             {"files", {"scenario.json", "summary.json", "residuals.csv", "curve.csv", "pea.csv", "compare.json",
                        "costs.csv"}}});
    }
    write_atomic(root / "manifest.json", dump(manifest));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized quantum search: analysis, simulation and cost comparison"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    Globals g;
    app.add_option("--seed", g.seed, "seed for every random choice (overrides spec seeds)");
    app.add_option("--out-dir", g.out_dir, "write outputs into this directory instead of stdout");
    app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "csv"}));

    Source analyze_src;
    bool analyze_report = false;
    auto* analyze = app.add_subcommand("analyze", "spectral summary or predicted-vs-numeric residual table");
    add_source_options(analyze, analyze_src);
    analyze->add_flag("--report", analyze_report, "emit the residual table (CSV with --format csv)");

    Source curve_src;
    std::optional<std::size_t> q_max;
    auto* curve = app.add_subcommand("curve", "success probability |<t|S^q|s>|^2 for q = 0..q_max");
    add_source_options(curve, curve_src);
    curve->add_option("--q-max", q_max, "last iteration count (default 10 * ceil(pi B / (4 alpha)))");

    Source pea_src;
    PeaArgs pea_args;
    auto* pea = app.add_subcommand("pea", "phase-estimation inversion error and query table");
    add_source_options(pea, pea_src);
    pea->add_option("--bits", pea_args.bits, "ancilla count b");
    pea->add_option("--sweep", pea_args.sweep, "ancilla range b0:b1");
    pea->add_option("--epsilon", pea_args.epsilon, "target error for the sizing rule");
    pea->add_option("--prep", pea_args.prep, "ancilla preparation")->check(CLI::IsMember({"kaiser", "hadamard"}));

    Source cmp_src;
    CompareArgs cmp_args;
    auto* compare = app.add_subcommand("compare", "original vs modified search runs with cost ledgers");
    add_source_options(compare, cmp_src);
    compare->add_option("--epsilon", cmp_args.epsilon, "per-call inversion error budget (default beta/10)");
    compare->add_option("--mode", cmp_args.mode, "which pipelines to run")
        ->check(CLI::IsMember({"original", "modified", "both"}));
    compare->add_option("--inversion", cmp_args.inversion, "source inversion used by the modified pipeline")
        ->check(CLI::IsMember({"pea", "exact"}));
    compare->add_option("--prep", cmp_args.prep, "ancilla preparation")->check(CLI::IsMember({"kaiser", "hadamard"}));
    compare->add_flag("--refine", cmp_args.refine, "search q_m +- 2 for the largest |<t|u>|");
    compare->add_option("--c1", cmp_args.c1, "original-condition threshold multiplier");
    compare->add_option("--c2", cmp_args.c2, "relaxed-condition threshold multiplier");

    std::vector<std::string> batch_names = builtin_scenario_names();
    auto* batch = app.add_subcommand("batch", "run every built-in scenario and write all outputs");
    batch->add_option("--scenarios", batch_names, "subset of built-in scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (analyze->parsed()) {
            emit(g, analyze_report ? "residuals." + g.format : "summary." + g.format,
                 analyze_output(resolve(analyze_src, g), analyze_report, g.format));
        } else if (curve->parsed()) {
            emit(g, "curve." + g.format, curve_output(resolve(curve_src, g), q_max, g.format));
        } else if (pea->parsed()) {
            emit(g, "pea." + g.format, pea_output(resolve(pea_src, g), pea_args, g.format));
        } else if (compare->parsed()) {
            const auto res = compare_output(resolve(cmp_src, g), cmp_args);
            if (g.out_dir.empty()) {
                std::cout << (g.format == "csv" ? res.costs : dump(res.json));
            } else {
                write_atomic(fs::path(g.out_dir) / "compare.json", dump(res.json));
                write_atomic(fs::path(g.out_dir) / "costs.csv", res.costs);
            }
        } else if (batch->parsed()) {
            run_batch(batch_names, g);
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
