// analysis.hpp
// Secular-equation root finding for the eigenphases of S = D_s I_t^phi, the
// two-level closed forms for lambda_+-, eta, q_m, beta, and residual checks of
// those closed forms against numerically exact eigenpairs.

#pragma once

#include "gqs/core.hpp"
#include "gqs/spectrum.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <numeric>
#include <limits>
#include <vector>

namespace gqs {

// ---------------------------------------------------------------------------
// Dense eigen helpers (oracles and small-N numerics)

struct DenseEigen {
    RealVector phases;  // wrapped to (-pi, pi], unsorted, paired with columns of `vectors`
    Matrix vectors;
};

inline DenseEigen dense_eigen(const Matrix& u) {
    Eigen::ComplexEigenSolver<Matrix> solver(u, true);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("dense eigensolver failed");
    }
    DenseEigen out;
    out.phases.resize(u.rows());
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
        out.phases(i) = wrap_angle(std::arg(solver.eigenvalues()(i)));
    }
    out.vectors = solver.eigenvectors();
    for (Eigen::Index i = 0; i < u.cols(); ++i) {
        out.vectors.col(i).normalize();
    }
    return out;
}

inline std::vector<double> dense_eigenphases(const Matrix& u) {
    Eigen::ComplexEigenSolver<Matrix> solver(u, false);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("dense eigensolver failed");
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(u.rows()));
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
        out.push_back(wrap_angle(std::arg(solver.eigenvalues()(i))));
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Largest circular mismatch under the best cyclic matching of two sorted angle multisets.
inline double phase_multiset_distance(std::vector<double> a, std::vector<double> b) {
    if (a.size() != b.size()) {
        return std::numeric_limits<double>::infinity();
    }
    if (a.empty()) {
        return 0.0;
    }
    for (auto& x : a) x = wrap_angle(x);
    for (auto& x : b) x = wrap_angle(x);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t n = a.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t shift = 0; shift < n; ++shift) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n && worst < best; ++i) {
            worst = std::max(worst, circular_distance(a[i], b[(i + shift) % n]));
        }
        best = std::min(best, worst);
    }
    return best;
}

// ---------------------------------------------------------------------------
// Secular equation: sum_l |<l|t>|^2 cot((lambda - theta_l)/2) = cot(phi/2)

struct SecularPole {
    double phase = 0.0;
    double weight = 0.0;
    std::size_t multiplicity = 0;
};

struct SecularSolution {
    std::vector<double> roots;      // one per arc between circularly consecutive poles, ascending
    std::vector<double> unmoved;    // eigenphases of D_s that S inherits unchanged
    std::vector<SecularPole> poles;
    double max_residual = 0.0;

    std::vector<double> all_phases() const {
        std::vector<double> out = roots;
        out.insert(out.end(), unmoved.begin(), unmoved.end());
        std::sort(out.begin(), out.end());
        return out;
    }
};

namespace detail {

inline std::vector<SecularPole> secular_poles(const EigenData& eig, std::vector<double>& unmoved) {
    struct Entry {
        double phase;
        double weight;
    };
    std::vector<Entry> weighted;
    for (std::size_t l = 0; l < eig.dimension(); ++l) {
        const double th = eig.phases(static_cast<Eigen::Index>(l));
        const double w = eig.weight(l);
        if (w <= tolerance::zero_overlap) {
            unmoved.push_back(th);
        } else {
            weighted.push_back({th, w});
        }
    }
    std::sort(weighted.begin(), weighted.end(), [](const Entry& a, const Entry& b) { return a.phase < b.phase; });

    std::vector<SecularPole> poles;
    for (const auto& e : weighted) {
        if (!poles.empty() && circular_distance(poles.back().phase, e.phase) <= tolerance::degenerate_phase) {
            poles.back().weight += e.weight;
            poles.back().multiplicity += 1;
            unmoved.push_back(e.phase);
        } else {
            poles.push_back({e.phase, e.weight, 1});
        }
    }
    if (poles.size() > 1 && circular_distance(poles.front().phase, poles.back().phase) <= tolerance::degenerate_phase) {
        poles.front().weight += poles.back().weight;
        poles.front().multiplicity += poles.back().multiplicity;
        unmoved.push_back(poles.back().phase);
        poles.pop_back();
    }
    return poles;
}

inline double secular_function(const std::vector<SecularPole>& poles, double cot_half_phi, double lambda) {
    double sum = 0.0;
    for (const auto& p : poles) {
        sum += p.weight * cot((lambda - p.phase) / 2.0);
    }
    return sum - cot_half_phi;
}

struct ArcRoot {
    double root;
    double residual;
};

// The secular function decreases from +inf to -inf across each arc, so plain
// bisection on interior midpoints always converges.
inline ArcRoot bisect_arc(const std::vector<SecularPole>& poles, double cot_half_phi, double lo, double hi) {
    double f_lo = std::numeric_limits<double>::infinity();
    double f_hi = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) {
            break;
        }
        const double f = secular_function(poles, cot_half_phi, mid);
        if (f > 0.0) {
            lo = mid;
            f_lo = f;
        } else {
            hi = mid;
            f_hi = f;
        }
    }
    if (!std::isfinite(f_lo) && !std::isfinite(f_hi)) {
        throw NumericalError("secular bisection failed to converge");
    }
    if (std::abs(f_lo) <= std::abs(f_hi)) {
        return {wrap_angle(lo), std::abs(f_lo)};
    }
    return {wrap_angle(hi), std::abs(f_hi)};
}

inline void check_secular_inputs(const std::vector<SecularPole>& poles, double phi) {
    if (!(phi > 0.0 && phi < 2.0 * pi)) {
        throw ValidationError("phi must lie in (0, 2*pi)");
    }
    if (poles.empty()) {
        throw ValidationError("target is orthogonal to every eigenvector with a usable overlap");
    }
    if (poles.size() == 1 && std::abs(poles.front().phase) <= tolerance::zero_phase) {
        throw ValidationError("target coincides with the source eigenstate; no search dynamics");
    }
}

}  // namespace detail

inline SecularSolution secular_roots(const EigenData& eig, double phi) {
    SecularSolution sol;
    sol.poles = detail::secular_poles(eig, sol.unmoved);
    detail::check_secular_inputs(sol.poles, phi);
    const double c = cot(phi / 2.0);
    const std::size_t k = sol.poles.size();
    for (std::size_t i = 0; i < k; ++i) {
        const double lo = sol.poles[i].phase;
        const double hi = i + 1 < k ? sol.poles[i + 1].phase : sol.poles[0].phase + 2.0 * pi;
        const auto r = detail::bisect_arc(sol.poles, c, lo, hi);
        sol.roots.push_back(r.root);
        sol.max_residual = std::max(sol.max_residual, r.residual);
    }
    std::sort(sol.roots.begin(), sol.roots.end());
    std::sort(sol.unmoved.begin(), sol.unmoved.end());
    return sol;
}

// The two roots on the arcs adjacent to the source pole at 0.
struct NearZeroRoots {
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    double max_residual = 0.0;
};

inline NearZeroRoots secular_roots_near_zero(const EigenData& eig, double phi) {
    std::vector<double> unmoved;
    const auto poles = detail::secular_poles(eig, unmoved);
    detail::check_secular_inputs(poles, phi);
    const auto it = std::find_if(poles.begin(), poles.end(),
                                 [](const SecularPole& p) { return std::abs(p.phase) <= tolerance::zero_phase; });
    if (it == poles.end()) {
        throw ValidationError("source eigenstate has no overlap with the target (alpha = 0)");
    }
    const std::size_t k = poles.size();
    const auto i = static_cast<std::size_t>(it - poles.begin());
    const double c = cot(phi / 2.0);
    const double next = i + 1 < k ? poles[i + 1].phase : poles[0].phase + 2.0 * pi;
    const double prev = i > 0 ? poles[i - 1].phase : poles[k - 1].phase - 2.0 * pi;
    const auto up = detail::bisect_arc(poles, c, poles[i].phase, next);
    const auto down = detail::bisect_arc(poles, c, prev, poles[i].phase);
    return {up.root, down.root, std::max(up.residual, down.residual)};
}

// ---------------------------------------------------------------------------
// Two-level closed forms

struct TwoLevelPrediction {
    double eta = 0.0;  // in [0, pi/2]
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
};

// cot(2 eta) = A / (2 alpha B);  lambda_+- = +-(2 alpha / B) tan(eta)^{+-1}
inline TwoLevelPrediction predict_two_level(double A, double B, double alpha) {
    if (!(alpha > 0.0)) {
        throw ValidationError("alpha must be positive");
    }
    if (!(B >= 1.0 - 1e-12)) {
        throw ValidationError("B must be at least 1");
    }
    TwoLevelPrediction out;
    out.eta = 0.5 * std::atan2(2.0 * alpha * B, A);
    const double scale = 2.0 * alpha / B;
    out.lambda_plus = scale * std::tan(out.eta);
    out.lambda_minus = -scale / std::tan(out.eta);
    return out;
}

struct PerformancePrediction {
    double q_m = 0.0;
    double beta = 0.0;
    double Q = 0.0;
};

// q_m = pi B sin(2 eta) / (4 alpha);  beta = sin(2 eta) / (B sin(phi/2));  Q = q_m / beta^2
inline PerformancePrediction performance_prediction(double eta, double B, double alpha, double phi) {
    if (!(alpha > 0.0) || !std::isfinite(eta) || !std::isfinite(B)) {
        throw ValidationError("performance prediction needs finite inputs and alpha > 0");
    }
    if (!(phi > 0.0 && phi < 2.0 * pi)) {
        throw ValidationError("phi must lie in (0, 2*pi)");
    }
    PerformancePrediction out;
    const double s2 = std::sin(2.0 * eta);
    out.q_m = pi * B * s2 / (4.0 * alpha);
    out.beta = s2 / (B * std::sin(phi / 2.0));
    out.Q = out.q_m / (out.beta * out.beta);
    return out;
}

// ---------------------------------------------------------------------------
// Summary of every derived scalar

struct SpectralSummary {
    double alpha = 0.0;
    double theta_min = 0.0;
    double phi = pi;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double A = 0.0;
    double B = 1.0;
    double eta = 0.0;
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    double q_m = 0.0;
    double beta = 0.0;
    double P_m = 0.0;
    double Q = 0.0;

    // |lambda_+-| < theta_min, the regime the closed forms assume.
    bool lambdas_inside_gap() const {
        return std::abs(lambda_plus) < theta_min && std::abs(lambda_minus) < theta_min;
    }
    // B |sin(phi/2)| >= 1, needed for the |t> decomposition to be a valid split.
    bool t_projection_valid() const { return B * std::abs(std::sin(phi / 2.0)) >= 1.0 - 1e-12; }
};

inline SpectralSummary summarize(const EigenData& eig, double alpha, double phi) {
    SpectralSummary s;
    s.alpha = alpha;
    s.theta_min = eig.theta_min();
    s.phi = phi;
    s.lambda1 = moments(eig, 1);
    s.lambda2 = moments(eig, 2);
    const auto ab = ab_quantities(s.lambda1, s.lambda2, phi);
    s.A = ab.A;
    s.B = ab.B;
    const auto two = predict_two_level(s.A, s.B, alpha);
    s.eta = two.eta;
    s.lambda_plus = two.lambda_plus;
    s.lambda_minus = two.lambda_minus;
    const auto perf = performance_prediction(s.eta, s.B, alpha, phi);
    s.q_m = perf.q_m;
    s.beta = perf.beta;
    s.P_m = perf.beta * perf.beta;
    s.Q = perf.Q;
    return s;
}

inline void to_json(nlohmann::json& j, const SpectralSummary& s) {
    j = nlohmann::json{{"alpha", s.alpha},
                       {"theta_min", s.theta_min},
                       {"phi", s.phi},
                       {"Lambda1", s.lambda1},
                       {"Lambda2", s.lambda2},
                       {"A", s.A},
                       {"B", s.B},
                       {"eta", s.eta},
                       {"lambda_plus", s.lambda_plus},
                       {"lambda_minus", s.lambda_minus},
                       {"q_m", s.q_m},
                       {"beta", s.beta},
                       {"P_m", s.P_m},
                       {"Q", s.Q},
                       {"lambdas_inside_gap", s.lambdas_inside_gap()},
                       {"t_projection_valid", s.t_projection_valid()}};
}

// ---------------------------------------------------------------------------
// Eigenpairs of S closest to phase 0 and the decomposition residuals

struct TwoLevelPair {
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    Vector v_plus;
    Vector v_minus;
};

// From a dense eigendecomposition of S: the two eigenphases of smallest magnitude.
inline TwoLevelPair dense_two_level_pair(const Matrix& s_matrix, double theta_min) {
    const auto de = dense_eigen(s_matrix);
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(de.phases.size()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::sort(idx.begin(), idx.end(),
              [&](Eigen::Index a, Eigen::Index b) { return std::abs(de.phases(a)) < std::abs(de.phases(b)); });
    if (idx.size() < 2 || std::abs(de.phases(idx[1])) >= theta_min) {
        throw NumericalError("fewer than two eigenphases of S lie inside (-theta_min, theta_min)");
    }
    Eigen::Index p = idx[0];
    Eigen::Index m = idx[1];
    if (de.phases(p) < de.phases(m)) {
        std::swap(p, m);
    }
    if (!(de.phases(p) >= 0.0 && de.phases(m) <= 0.0)) {
        throw NumericalError("the two smallest eigenphases of S do not straddle 0");
    }
    return {de.phases(p), de.phases(m), de.vectors.col(p), de.vectors.col(m)};
}

// Eigenvector of S for eigenphase lambda, from the D_s eigenbasis:
// <l|v> proportional to e^{i theta_l} <l|t> / (e^{i lambda} - e^{i theta_l}).
inline Vector secular_eigenvector(const EigenData& eig, double lambda) {
    Vector coeff(eig.phases.size());
    const Complex z = phase_factor(lambda);
    for (Eigen::Index l = 0; l < coeff.size(); ++l) {
        const Complex e = phase_factor(eig.phases(l));
        coeff(l) = e * eig.target_overlaps(l) / (z - e);
    }
    Vector v = eig.vectors * coeff;
    v.normalize();
    return v;
}

inline TwoLevelPair secular_two_level_pair(const EigenData& eig, double phi) {
    const auto r = secular_roots_near_zero(eig, phi);
    if (!(std::abs(r.lambda_plus) < eig.theta_min() && std::abs(r.lambda_minus) < eig.theta_min())) {
        throw NumericalError("fewer than two eigenphases of S lie inside (-theta_min, theta_min)");
    }
    return {r.lambda_plus, r.lambda_minus, secular_eigenvector(eig, r.lambda_plus),
            secular_eigenvector(eig, r.lambda_minus)};
}

struct LambdaDecomposition {
    double s_plus = 0.0;        // |<lambda_+|s>|^2
    double s_minus = 0.0;       // |<lambda_-|s>|^2
    double t_projection = 0.0;  // squared norm of |t> projected onto span{lambda_+-}
    double t_perp_norm = 0.0;   // norm of the remainder
    double s_plus_residual = 0.0;
    double s_minus_residual = 0.0;
    double t_projection_residual = 0.0;
    double t_perp_residual = 0.0;
    bool projection_valid = true;  // B |sin(phi/2)| >= 1

    double max_residual() const {
        return std::max({s_plus_residual, s_minus_residual, t_projection_residual, t_perp_residual});
    }
};

inline LambdaDecomposition decompose_in_lambda_basis(const TwoLevelPair& pair, const Vector& s, const Vector& t,
                                                     double eta, double B, double phi) {
    LambdaDecomposition d;
    d.s_plus = std::norm(pair.v_plus.dot(s));
    d.s_minus = std::norm(pair.v_minus.dot(s));
    d.t_projection = std::norm(pair.v_plus.dot(t)) + std::norm(pair.v_minus.dot(t));
    d.t_perp_norm = std::sqrt(std::max(0.0, 1.0 - d.t_projection));

    const double c = std::cos(eta);
    const double sn = std::sin(eta);
    const double predicted_projection = 1.0 / (B * B * std::pow(std::sin(phi / 2.0), 2));
    d.projection_valid = predicted_projection <= 1.0 + 1e-12;
    d.s_plus_residual = std::abs(d.s_plus - c * c);
    d.s_minus_residual = std::abs(d.s_minus - sn * sn);
    d.t_projection_residual = std::abs(d.t_projection - predicted_projection);
    d.t_perp_residual = std::abs(d.t_perp_norm - std::sqrt(std::max(0.0, 1.0 - predicted_projection)));
    return d;
}

}  // namespace gqs
