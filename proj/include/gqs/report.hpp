// report.hpp
// Tables and file output shared by the CLI and the tests: predicted-vs-numeric
// residuals, phase-estimation sweeps, cost tables, atomic file writes.

#pragma once

#include "gqs/amplification.hpp"
#include "gqs/analysis.hpp"
#include "gqs/phase_inversion.hpp"
#include "gqs/search.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

namespace gqs {

// Shortest representation that round-trips, so output is stable across runs.
inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

// Write to a sibling temporary file, then rename over the destination.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            throw std::runtime_error("failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Spectral summary as CSV

inline std::string summary_csv(const SpectralSummary& s) {
    const nlohmann::json j = s;
    std::ostringstream os;
    os << "quantity,value\n";
    for (const auto& [k, v] : j.items()) {
        os << k << ',' << (v.is_boolean() ? (v.get<bool>() ? "true" : "false") : format_number(v.get<double>())) << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Predicted vs numeric residuals

struct ResidualRow {
    std::string quantity;
    double predicted = std::numeric_limits<double>::quiet_NaN();
    double numeric = std::numeric_limits<double>::quiet_NaN();

    double residual() const { return std::abs(predicted - numeric); }
};

// Dense eigendecompositions are used up to this dimension; above it the two-level
// eigenvectors come from the closed form along the secular roots.
inline constexpr std::size_t dense_analysis_limit = 256;

inline std::vector<ResidualRow> residual_table(const SearchProblem& p) {
    const auto& s = p.summary;
    const auto& eig = p.diffusion.eig;
    std::vector<ResidualRow> rows;

    const auto sec = secular_roots(eig, p.phi);
    const SearchIterate iterate(p.diffusion.op, p.target(), p.phi);
    const bool dense = p.dimension() <= dense_analysis_limit;
    if (dense) {
        const auto phases = dense_eigenphases(iterate.matrix());
        rows.push_back({"secular_vs_eigen", 0.0, phase_multiset_distance(sec.all_phases(), phases)});
    }

    std::optional<TwoLevelPair> pair;
    try {
        pair = dense ? dense_two_level_pair(iterate.matrix(), p.theta_min()) : secular_two_level_pair(eig, p.phi);
    } catch (const NumericalError&) {
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rows.push_back({"lambda_plus", s.lambda_plus, pair ? pair->lambda_plus : nan});
    rows.push_back({"lambda_minus", s.lambda_minus, pair ? pair->lambda_minus : nan});
    if (pair) {
        const auto d = decompose_in_lambda_basis(*pair, p.source().amplitudes(), p.spec.target_state().amplitudes(),
                                                 s.eta, s.B, p.phi);
        const double proj = 1.0 / (s.B * s.B * std::pow(std::sin(p.phi / 2.0), 2));
        rows.push_back({"s_weight_plus", std::pow(std::cos(s.eta), 2), d.s_plus});
        rows.push_back({"s_weight_minus", std::pow(std::sin(s.eta), 2), d.s_minus});
        rows.push_back({"t_projection", proj, d.t_projection});
        rows.push_back({"t_perp_norm", std::sqrt(std::max(0.0, 1.0 - proj)), d.t_perp_norm});
    }

    const auto curve = success_curve(p.diffusion.op, p.target(), p.phi, p.source(), default_curve_length(s.B, s.alpha));
    try {
        const auto first = find_first_max(curve);
        rows.push_back({"q_m", s.q_m, static_cast<double>(first.q)});
        rows.push_back({"P_m", s.P_m, first.probability});
        rows.push_back({"beta", s.beta, std::sqrt(first.probability)});
    } catch (const NoMaximumFound&) {
        rows.push_back({"q_m", s.q_m, nan});
        rows.push_back({"P_m", s.P_m, nan});
        rows.push_back({"beta", s.beta, nan});
    }
    return rows;
}

inline std::string residual_csv(const std::vector<ResidualRow>& rows) {
    std::ostringstream os;
    os << "quantity,predicted,numeric,abs_residual\n";
    for (const auto& r : rows) {
        os << r.quantity << ',' << format_number(r.predicted) << ',' << format_number(r.numeric) << ','
           << format_number(r.residual()) << '\n';
    }
    return os.str();
}

inline nlohmann::json residual_json(const std::vector<ResidualRow>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) {
        out.push_back({{"quantity", r.quantity},
                       {"predicted", r.predicted},
                       {"numeric", r.numeric},
                       {"abs_residual", r.residual()}});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Phase-estimation sweep

struct PEARow {
    std::size_t b = 0;
    std::size_t queries = 0;
    double worst_error = 0.0;
    double leakage = 0.0;
};

inline PEARow pea_row(const DiffusionOperator& d, const PEAConfig& cfg) {
    const PhaseInversionCircuit w(d.op, cfg);
    const auto rep = inversion_report(w, d.eig);
    return {cfg.ancilla_count, rep.queries, rep.worst_error, rep.worst_leakage};
}

inline std::string pea_csv(const std::vector<PEARow>& rows) {
    std::ostringstream os;
    os << "b,queries,worst_error,leakage\n";
    for (const auto& r : rows) {
        os << r.b << ',' << r.queries << ',' << format_number(r.worst_error) << ',' << format_number(r.leakage) << '\n';
    }
    return os.str();
}

inline nlohmann::json pea_json(const std::vector<PEARow>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) {
        out.push_back({{"b", r.b}, {"queries", r.queries}, {"worst_error", r.worst_error}, {"leakage", r.leakage}});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cost tables

inline std::string cost_csv(const std::vector<RunReport>& reports) {
    std::ostringstream os;
    os << "mode,q_m,qaa_iterations,search_steps,inversion_steps,per_iteration_steps,total_cost,final_success,"
          "model_cost,estimate\n";
    for (const auto& r : reports) {
        const double model = r.mode == "original" ? r.model.original : r.model.modified;
        os << r.mode << ',' << r.q_m << ',' << r.qaa_iterations << ',' << r.search_steps << ',' << r.inversion_steps
           << ',' << r.per_iteration_steps << ',' << format_number(r.total_cost) << ','
           << format_number(r.final_success) << ',' << format_number(model) << ','
           << format_number(r.model.estimate) << '\n';
    }
    return os.str();
}

inline std::string curve_csv(const SuccessCurve& c) {
    std::ostringstream os;
    os << "q,probability\n";
    for (const auto& p : c.points) {
        os << p.q << ',' << format_number(p.probability) << '\n';
    }
    return os.str();
}

}  // namespace gqs
