// amplification.hpp
// Two-stage search: S^q |s> prepares |u>, then amplitude amplification with the
// reflection I_u = S^q I_s S^{-q} boosts |<t|u>| to order one. I_s is either exact
// or the phase-estimation circuit; cost is tallied in unit time steps where one
// application of S, I_t or exact I_s is one step and each controlled-D_s query is one step.

#pragma once

#include "gqs/analysis.hpp"
#include "gqs/core.hpp"
#include "gqs/phase_inversion.hpp"
#include "gqs/search.hpp"
#include "gqs/spectrum.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace gqs {

// ---------------------------------------------------------------------------
// Condition classifier

struct ConditionVerdict {
    double A = 0.0;
    double B = 1.0;
    double alpha = 0.0;
    double theta_min = 0.0;
    double c1 = 1.0;
    double c2 = 1.0;
    double original_threshold = 0.0;  // c1 * 2 alpha B
    double modified_threshold = 0.0;  // c2 * 1.57 B^2 theta_min
    bool original_ok = false;
    bool modified_ok = false;

    // original_ok implies modified_ok whenever the original threshold is the smaller one.
    bool implication_applies() const { return original_threshold <= modified_threshold; }
};

inline ConditionVerdict classify_conditions(double A, double B, double alpha, double theta_min, double c1 = 1.0,
                                            double c2 = 1.0) {
    if (!std::isfinite(A) || !(B > 0.0) || !(alpha > 0.0) || !(theta_min > 0.0) || !(c1 > 0.0) || !(c2 > 0.0) ||
        !std::isfinite(B) || !std::isfinite(theta_min)) {
        throw ValidationError("classifier needs finite positive B, alpha, theta_min and thresholds");
    }
    ConditionVerdict v{A, B, alpha, theta_min, c1, c2};
    v.original_threshold = c1 * 2.0 * alpha * B;
    v.modified_threshold = c2 * 1.57 * B * B * theta_min;
    const double slack = 1.0 + tolerance::comparison_relative;
    v.original_ok = std::abs(A) <= v.original_threshold * slack;
    v.modified_ok = std::abs(A) <= v.modified_threshold * slack;
    return v;
}

inline void to_json(nlohmann::json& j, const ConditionVerdict& v) {
    j = nlohmann::json{{"A", v.A},
                       {"B", v.B},
                       {"alpha", v.alpha},
                       {"theta_min", v.theta_min},
                       {"c1", v.c1},
                       {"c2", v.c2},
                       {"original_threshold", v.original_threshold},
                       {"modified_threshold", v.modified_threshold},
                       {"original_ok", v.original_ok},
                       {"modified_ok", v.modified_ok}};
}

// ---------------------------------------------------------------------------
// Cost model

struct CostModel {
    double original = 0.0;           // q_m / beta^2
    double modified_search = 0.0;    // q_m / beta
    double modified_inversion = 0.0; // ln(1/beta) / (theta_min beta)
    double modified = 0.0;           // sum of the two terms above
    double estimate = 0.0;           // pi B^2 sin(phi/2) / (4 alpha)
    bool inversion_term_subdominant = true;  // ln(1/beta)/theta_min <= q_m
    std::optional<std::size_t> pea_queries_per_call;  // from the sizing rule at the given epsilon
};

inline CostModel cost_model(const SpectralSummary& s, double theta_min, double epsilon) {
    if (!(std::abs(s.beta) > 0.0) || !std::isfinite(s.beta)) {
        throw ValidationError("cost model needs beta != 0");
    }
    if (!std::isfinite(s.q_m) || !(theta_min > 0.0)) {
        throw ValidationError("cost model needs finite q_m and theta_min > 0");
    }
    const double beta = std::abs(s.beta);
    CostModel c;
    c.original = s.q_m / (beta * beta);
    c.modified_search = s.q_m / beta;
    const double log_term = beta < 1.0 ? std::log(1.0 / beta) / theta_min : 0.0;
    c.modified_inversion = log_term / beta;
    c.modified = c.modified_search + c.modified_inversion;
    c.estimate = pi * s.B * s.B * std::sin(s.phi / 2.0) / (4.0 * s.alpha);
    c.inversion_term_subdominant = log_term <= s.q_m;
    if (epsilon > 0.0 && epsilon < 1.0) {
        try {
            c.pea_queries_per_call = 2 * required_ancillas(std::min(theta_min, pi), epsilon).queries;
        } catch (const NumericalError&) {
        }
    }
    return c;
}

inline void to_json(nlohmann::json& j, const CostModel& c) {
    j = nlohmann::json{{"original", c.original},
                       {"modified_search_term", c.modified_search},
                       {"modified_inversion_term", c.modified_inversion},
                       {"modified", c.modified},
                       {"estimate", c.estimate},
                       {"inversion_term_subdominant", c.inversion_term_subdominant}};
    j["pea_queries_per_call"] = c.pea_queries_per_call ? nlohmann::json(*c.pea_queries_per_call) : nlohmann::json();
}

// ---------------------------------------------------------------------------
// Reflections

enum class InversionImpl { exact, approximate };

inline Matrix exact_source_inversion(const Vector& s) {
    return Matrix::Identity(s.size(), s.size()) - 2.0 * s * s.adjoint();
}

// I_u = S^q I_s S^{-q}. With the approximate implementation the effective system
// block of the phase-estimation circuit stands in for I_s.
inline Matrix build_Iu(const DiffusionOperator& d, std::size_t t, double phi, const Vector& s, std::size_t q,
                       InversionImpl impl, const PEAConfig* pea = nullptr, double max_leakage = 0.1) {
    if (s.size() != static_cast<Eigen::Index>(d.op.dimension())) {
        throw ValidationError("dimension mismatch between source state and diffusion operator");
    }
    SearchIterate iterate(d.op, t, phi);
    Matrix is;
    if (impl == InversionImpl::exact) {
        is = exact_source_inversion(s);
    } else {
        if (pea == nullptr) {
            throw ValidationError("approximate inversion needs a phase-estimation configuration");
        }
        const PhaseInversionCircuit w(d.op, *pea);
        auto eff = effective_system_action(w, d.eig);
        if (eff.leakage > max_leakage) {
            throw NumericalError("approximate inversion leaks " + std::to_string(eff.leakage) +
                                 " out of the ancilla-zero subspace");
        }
        // The circuit flips the phase-0 eigenstate; I_s in the same convention.
        is = std::move(eff.block);
    }
    // S^q X S^{-q}: apply S^{-q} from the right via (S^{-q})^dagger = S^q on the adjoint.
    Matrix m = is;
    for (std::size_t k = 0; k < q; ++k) {
        iterate.apply(m);
    }
    Matrix right = m.adjoint();
    for (std::size_t k = 0; k < q; ++k) {
        iterate.apply(right);
    }
    return right.adjoint();
}

inline Matrix target_inversion(std::size_t dim, std::size_t t) {
    Matrix m = Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(t)) = -1.0;
    return m;
}

// ---------------------------------------------------------------------------
// Amplitude amplification

inline std::size_t qaa_iterations(double beta) {
    if (!(beta >= tolerance::beta_floor)) {
        throw NumericalError("beta below the numerical floor of 1e-8");
    }
    beta = std::min(beta, 1.0);
    return static_cast<std::size_t>(std::floor(pi / (4.0 * std::asin(beta))));
}

struct QAAResult {
    std::size_t iterations = 0;
    double beta = 0.0;
    double success = 0.0;
    std::vector<double> history;  // success after 0..iterations rounds
};

// Iterates G = -I_u I_t on u with I_t the plain target inversion.
inline QAAResult qaa_run(const StateVector& u, std::size_t t, const Matrix& iu) {
    if (t >= u.dimension() || iu.rows() != static_cast<Eigen::Index>(u.dimension())) {
        throw ValidationError("dimension mismatch in amplitude amplification");
    }
    QAAResult r;
    const auto ti = static_cast<Eigen::Index>(t);
    r.beta = std::abs(u[t]);
    r.iterations = qaa_iterations(r.beta);
    Vector v = u.amplitudes();
    r.history.push_back(std::norm(v(ti)));
    for (std::size_t k = 0; k < r.iterations; ++k) {
        v(ti) = -v(ti);
        v = -(iu * v);
        r.history.push_back(std::norm(v(ti)));
    }
    r.success = r.history.back();
    return r;
}

// ---------------------------------------------------------------------------
// Pipelines

struct SearchProblem {
    DiffusionSpec spec;
    DiffusionOperator diffusion;
    double phi = pi;
    SpectralSummary summary;

    static SearchProblem make(const DiffusionSpec& spec, double phi) {
        auto d = build_diffusion(spec);
        auto summary = summarize(d.eig, spec.alpha(), phi);
        return SearchProblem{spec, std::move(d), phi, summary};
    }

    std::size_t dimension() const { return spec.dimension; }
    std::size_t target() const { return spec.target_index; }
    StateVector source() const { return spec.source_state(); }
    double theta_min() const { return diffusion.eig.theta_min(); }
};

struct RunReport {
    std::string mode;  // original | modified-exact-Is | modified-pea-Is
    double phi = pi;
    std::size_t q_m = 0;
    double q_m_predicted = 0.0;
    double beta_predicted = 0.0;
    double beta_empirical = 0.0;
    std::size_t qaa_iterations = 0;
    double final_success = 0.0;
    // Cost ledger, unit steps.
    std::size_t search_steps = 0;       // preparing u (or the single search pass)
    std::size_t inversion_steps = 0;    // T[I_s] per call
    std::size_t per_iteration_steps = 0;  // 2 q_m + 1 + T[I_s]
    double total_cost = 0.0;
    // Phase-estimation details.
    std::size_t pea_ancillas = 0;
    std::size_t pea_queries_per_call = 0;
    double epsilon_target = 0.0;
    double epsilon_measured = 0.0;
    double leakage_measured = 0.0;
    ConditionVerdict verdict;
    CostModel model;
};

inline void to_json(nlohmann::json& j, const RunReport& r) {
    j = nlohmann::json{{"mode", r.mode},
                       {"phi", r.phi},
                       {"q_m", r.q_m},
                       {"q_m_predicted", r.q_m_predicted},
                       {"beta_predicted", r.beta_predicted},
                       {"beta_empirical", r.beta_empirical},
                       {"qaa_iterations", r.qaa_iterations},
                       {"final_success", r.final_success},
                       {"cost",
                        {{"search_steps", r.search_steps},
                         {"inversion_steps", r.inversion_steps},
                         {"per_iteration_steps", r.per_iteration_steps},
                         {"total", r.total_cost}}},
                       {"pea",
                        {{"ancillas", r.pea_ancillas},
                         {"queries_per_call", r.pea_queries_per_call},
                         {"epsilon_target", r.epsilon_target},
                         {"epsilon_measured", r.epsilon_measured},
                         {"leakage_measured", r.leakage_measured}}},
                       {"conditions", r.verdict},
                       {"cost_model", r.model}};
}

struct ClassifierThresholds {
    double c1 = 1.0;
    double c2 = 1.0;
};

inline void fill_common(RunReport& r, const SearchProblem& p, const ClassifierThresholds& th, double epsilon) {
    r.phi = p.phi;
    r.q_m_predicted = p.summary.q_m;
    r.beta_predicted = p.summary.beta;
    r.verdict = classify_conditions(p.summary.A, p.summary.B, p.summary.alpha, p.theta_min(), th.c1, th.c2);
    r.model = cost_model(p.summary, p.theta_min(), epsilon);
}

// Plain repeated search: run S up to the first maximum of the success curve and
// repeat the whole pass 1/P_m times on average, for an expected cost q / P_m.
inline RunReport original_search(const SearchProblem& p, std::optional<std::size_t> q_max = std::nullopt,
                                 ClassifierThresholds th = {}) {
    RunReport r;
    r.mode = "original";
    fill_common(r, p, th, 0.0);
    const std::size_t len = q_max ? *q_max : default_curve_length(p.summary.B, p.summary.alpha);
    const auto curve = success_curve(p.diffusion.op, p.target(), p.phi, p.source(), len);
    const auto first = find_first_max(curve);
    r.q_m = first.q;
    r.beta_empirical = std::sqrt(first.probability);
    r.final_success = first.probability;
    r.search_steps = first.q;
    r.total_cost = first.probability > 0.0 ? static_cast<double>(first.q) / first.probability
                                           : std::numeric_limits<double>::infinity();
    return r;
}

struct ModifiedOptions {
    InversionImpl inversion = InversionImpl::approximate;
    std::optional<double> epsilon;  // default beta / 10
    AncillaPrep prep = AncillaPrep::kaiser;
    double taper = 0.04;
    std::optional<std::size_t> ancillas;  // override the sizing rule
    bool refine_q = false;                // +-2 search around the predicted q_m maximizing beta
    std::size_t simulation_cap = std::size_t{1} << 20;
    ClassifierThresholds thresholds;
};

inline RunReport modified_search(const SearchProblem& p, const ModifiedOptions& opt = {}) {
    const auto n = static_cast<Eigen::Index>(p.dimension());
    const auto ti = static_cast<Eigen::Index>(p.target());
    const SearchIterate iterate(p.diffusion.op, p.target(), p.phi);
    const Vector s = p.source().amplitudes();

    std::size_t q = static_cast<std::size_t>(std::max(1.0, std::round(p.summary.q_m)));
    auto beta_at = [&](std::size_t qq) { return std::abs(iterate.power_apply(s, qq)(ti)); };
    if (opt.refine_q) {
        std::size_t best = q;
        double best_beta = beta_at(q);
        for (std::size_t cand = q > 2 ? q - 2 : 1; cand <= q + 2; ++cand) {
            const double b = beta_at(cand);
            if (b > best_beta + 1e-15) {
                best = cand;
                best_beta = b;
            }
        }
        q = best;
    }
    const Vector u = iterate.power_apply(s, q);
    const double beta = std::abs(u(ti));
    const std::size_t iterations = qaa_iterations(beta);
    const double epsilon = opt.epsilon ? *opt.epsilon : beta / 10.0;

    RunReport r;
    fill_common(r, p, opt.thresholds, epsilon);
    r.q_m = q;
    r.beta_empirical = beta;
    r.qaa_iterations = iterations;
    r.epsilon_target = epsilon;
    r.search_steps = q;

    auto apply_s_power = [&](Matrix& z, bool inverse) {
        for (std::size_t k = 0; k < q; ++k) {
            if (inverse) {
                iterate.apply_inverse(z);
            } else {
                iterate.apply(z);
            }
        }
    };

    Matrix psi;
    if (opt.inversion == InversionImpl::exact) {
        r.mode = "modified-exact-Is";
        r.inversion_steps = 1;
        psi = u;
        for (std::size_t k = 0; k < iterations; ++k) {
            psi.row(ti) = -psi.row(ti);
            apply_s_power(psi, true);
            psi -= 2.0 * s * (s.adjoint() * psi);
            apply_s_power(psi, false);
            psi = -psi;
        }
    } else {
        r.mode = "modified-pea-Is";
        if (!(epsilon > 0.0 && epsilon < 1.0)) {
            throw ValidationError("epsilon must lie in (0, 1)");
        }
        PEAConfig cfg;
        cfg.theta_min = std::min(p.theta_min(), pi);
        cfg.target_error = epsilon;
        cfg.prep = opt.prep;
        cfg.taper = opt.taper;
        cfg.simulation_cap = opt.simulation_cap;
        cfg.ancilla_count =
            opt.ancillas ? *opt.ancillas : required_ancillas(cfg.theta_min, epsilon, opt.prep, opt.taper).ancilla_count;
        const PhaseInversionCircuit w(p.diffusion.op, cfg);
        const auto inv = inversion_report(w, p.diffusion.eig);
        r.pea_ancillas = cfg.ancilla_count;
        r.pea_queries_per_call = w.queries_per_call();
        r.inversion_steps = w.queries_per_call();
        r.epsilon_measured = inv.worst_error;
        r.leakage_measured = inv.worst_leakage;

        // Coherent run on system (x) ancillas; column y carries ancilla value y.
        psi = Matrix::Zero(n, static_cast<Eigen::Index>(w.register_size()));
        psi.col(0) = u;
        for (std::size_t k = 0; k < iterations; ++k) {
            psi.row(ti) = -psi.row(ti);
            apply_s_power(psi, true);
            w.apply(psi, 1);
            apply_s_power(psi, false);
            psi = -psi;
        }
    }
    r.final_success = psi.row(ti).squaredNorm();
    r.per_iteration_steps = 2 * q + 1 + r.inversion_steps;
    r.total_cost = static_cast<double>(r.search_steps + iterations * r.per_iteration_steps);
    return r;
}

}  // namespace gqs
