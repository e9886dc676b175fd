// spectrum.hpp
// Declarative diffusion-operator specs, their dense realization, and the
// overlap-weighted cotangent moments that govern the generalized search.

#pragma once

#include "gqs/core.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace gqs {

// Recipe for a diffusion operator D_s: eigenphases theta_l and target overlaps
// p_l = |<l|t>|^2 per eigenvector slot. Exactly one slot has phase 0 and holds |s>.
struct DiffusionSpec {
    std::size_t dimension = 0;
    std::optional<std::size_t> source_index;  // nullopt: |s> is the uniform superposition
    std::size_t target_index = 0;
    std::vector<double> eigenphases;
    std::vector<double> target_overlaps;
    std::uint64_t seed = 0;

    StateVector source_state() const {
        return source_index ? StateVector::basis(dimension, *source_index) : StateVector::uniform(dimension);
    }

    StateVector target_state() const { return StateVector::basis(dimension, target_index); }

    // alpha = |<t|s>|
    double alpha() const {
        if (source_index) {
            return *source_index == target_index ? 1.0 : 0.0;
        }
        return 1.0 / std::sqrt(static_cast<double>(dimension));
    }

    // Index of the phase-0 slot. Assumes validate() passed.
    std::size_t source_slot() const {
        for (std::size_t i = 0; i < eigenphases.size(); ++i) {
            if (std::abs(eigenphases[i]) <= tolerance::zero_phase) {
                return i;
            }
        }
        throw ValidationError("spec has no zero eigenphase");
    }

    double theta_min() const {
        const std::size_t s = source_slot();
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < eigenphases.size(); ++i) {
            if (i != s) {
                m = std::min(m, std::abs(wrap_angle(eigenphases[i])));
            }
        }
        return m;
    }

    void validate() const;
};

inline void DiffusionSpec::validate() const {
    if (dimension < 2) {
        throw ValidationError("dimension must be at least 2");
    }
    if (eigenphases.size() != dimension) {
        throw ValidationError("eigenphases must have one entry per dimension");
    }
    if (target_overlaps.size() != dimension) {
        throw ValidationError("target_overlaps must have one entry per dimension");
    }
    if (target_index >= dimension) {
        throw ValidationError("target index out of range");
    }
    if (source_index && *source_index >= dimension) {
        throw ValidationError("source index out of range");
    }
    std::size_t zeros = 0;
    for (double th : eigenphases) {
        if (!std::isfinite(th) || th < -pi - 1e-12 || th > pi + 1e-12) {
            throw ValidationError("eigenphases must be finite and lie in [-pi, pi]");
        }
        if (std::abs(th) <= tolerance::zero_phase) {
            ++zeros;
        }
    }
    if (zeros != 1) {
        throw ValidationError("exactly one eigenphase must be 0 (found " + std::to_string(zeros) +
                              "); the source eigenstate must be non-degenerate");
    }
    double sum = 0.0;
    for (double p : target_overlaps) {
        if (!std::isfinite(p) || p < 0.0) {
            throw ValidationError("target overlaps must be non-negative");
        }
        if (p > 1.0 + tolerance::overlap_sum) {
            throw ValidationError("target overlap exceeds 1");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > tolerance::overlap_sum) {
        throw ValidationError("target overlaps must sum to 1 (sum = " + std::to_string(sum) + ")");
    }
    const double a = alpha();
    if (std::abs(target_overlaps[source_slot()] - a * a) > tolerance::overlap_sum) {
        throw ValidationError("source-slot overlap must equal alpha^2 = " + std::to_string(a * a));
    }
}

inline void to_json(nlohmann::json& j, const DiffusionSpec& s) {
    j = nlohmann::json{{"dimension", s.dimension},
                       {"target", s.target_index},
                       {"eigenphases", s.eigenphases},
                       {"target_overlaps", s.target_overlaps},
                       {"seed", s.seed}};
    if (s.source_index) {
        j["source"] = *s.source_index;
    } else {
        j["source"] = "uniform";
    }
}

inline void from_json(const nlohmann::json& j, DiffusionSpec& s) {
    try {
        s.dimension = j.at("dimension").get<std::size_t>();
        const auto& src = j.at("source");
        if (src.is_string()) {
            if (src.get<std::string>() != "uniform") {
                throw ValidationError("source must be \"uniform\" or a basis index");
            }
            s.source_index.reset();
        } else {
            s.source_index = src.get<std::size_t>();
        }
        s.target_index = j.at("target").get<std::size_t>();
        s.eigenphases = j.at("eigenphases").get<std::vector<double>>();
        s.target_overlaps = j.at("target_overlaps").get<std::vector<double>>();
        s.seed = j.value("seed", std::uint64_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed diffusion spec: ") + e.what());
    }
}

// Eigendecomposition of D_s, sorted by eigenphase.
struct EigenData {
    RealVector phases;         // theta_l in (-pi, pi], ascending
    Matrix vectors;            // |l> as columns
    Vector target_overlaps;    // <l|t>
    std::size_t source_slot = 0;
    std::vector<std::size_t> spec_slot;  // sorted position -> slot index in the originating spec

    std::size_t dimension() const { return static_cast<std::size_t>(phases.size()); }

    double weight(std::size_t l) const { return std::norm(target_overlaps(static_cast<Eigen::Index>(l))); }

    double theta_min() const {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t l = 0; l < dimension(); ++l) {
            if (l != source_slot) {
                m = std::min(m, std::abs(phases(static_cast<Eigen::Index>(l))));
            }
        }
        return m;
    }

    Matrix reconstruct() const {
        Vector diag(phases.size());
        for (Eigen::Index l = 0; l < phases.size(); ++l) {
            diag(l) = phase_factor(phases(l));
        }
        return vectors * diag.asDiagonal() * vectors.adjoint();
    }
};

struct DiffusionOperator {
    UnitaryOperator op;
    EigenData eig;
};

namespace detail {

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix g(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(r, c) = Complex(re, im);
        }
    }
    return g;
}

// Unitary whose leading columns equal `fixed` (assumed orthonormal); the rest are
// Householder-QR completions of seeded Gaussian columns.
inline Matrix complete_unitary(const Matrix& fixed, Eigen::Index dim, std::mt19937_64& rng) {
    const Eigen::Index k = fixed.cols();
    Matrix m(dim, dim);
    m.leftCols(k) = fixed;
    if (dim > k) {
        m.rightCols(dim - k) = gaussian_matrix(dim, dim - k, rng);
    }
    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix q = qr.householderQ();
    const Matrix& r = qr.matrixQR();
    for (Eigen::Index c = 0; c < dim; ++c) {
        const double mag = std::abs(r(c, c));
        if (mag > 0.0) {
            q.col(c) *= r(c, c) / mag;
        }
    }
    return q;
}

}  // namespace detail

// Realize D_s = sum_l e^{i theta_l} |l><l| with |<l|t>|^2 = p_l and |s> the phase-0 eigenvector.
inline DiffusionOperator build_diffusion(const DiffusionSpec& spec) {
    spec.validate();
    const auto n = static_cast<Eigen::Index>(spec.dimension);
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const Vector s = spec.source_state().amplitudes();
    const Vector t = spec.target_state().amplitudes();
    const Complex st = s.dot(t);  // <s|t>
    const double alpha = std::abs(st);
    const double rest = 1.0 - alpha * alpha;

    Matrix fixed;
    if (rest > tolerance::overlap_sum) {
        Vector t_perp = t - st * s;
        t_perp /= t_perp.norm();
        fixed.resize(n, 2);
        fixed.col(0) = s;
        fixed.col(1) = t_perp;
    } else {
        fixed = s;
    }
    const Matrix q = detail::complete_unitary(fixed, n, rng);
    const auto basis_perp = q.rightCols(n - 1);  // spans s-perp; first column is t_perp when it exists

    const std::size_t s_slot = spec.source_slot();
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < spec.dimension; ++i) {
        if (i != s_slot) {
            others.push_back(i);
        }
    }

    // c_k = <u_k|t_perp>, with seeded phases and prescribed magnitudes.
    Vector c = Vector::Zero(n - 1);
    if (rest > tolerance::overlap_sum) {
        for (Eigen::Index k = 0; k < n - 1; ++k) {
            const double mag = std::sqrt(spec.target_overlaps[others[static_cast<std::size_t>(k)]] / rest);
            c(k) = std::polar(mag, 2.0 * pi * unit(rng));
        }
        c /= c.norm();
    } else {
        c(0) = 1.0;
    }
    const Matrix k_mat = detail::complete_unitary(c, n - 1, rng);
    const Matrix u_perp = basis_perp * k_mat.adjoint();

    // Assemble eigenvectors in spec slot order, then sort by phase.
    std::vector<std::size_t> order(spec.dimension);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> wrapped(spec.dimension);
    for (std::size_t i = 0; i < spec.dimension; ++i) {
        wrapped[i] = i == s_slot ? 0.0 : wrap_angle(spec.eigenphases[i]);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return wrapped[a] < wrapped[b]; });

    EigenData eig;
    eig.phases.resize(n);
    eig.vectors.resize(n, n);
    eig.spec_slot = order;
    for (Eigen::Index pos = 0; pos < n; ++pos) {
        const std::size_t slot = order[static_cast<std::size_t>(pos)];
        eig.phases(pos) = wrapped[slot];
        if (slot == s_slot) {
            eig.vectors.col(pos) = s;
            eig.source_slot = static_cast<std::size_t>(pos);
        } else {
            const auto k = static_cast<Eigen::Index>(std::find(others.begin(), others.end(), slot) - others.begin());
            eig.vectors.col(pos) = u_perp.col(k);
        }
    }
    eig.target_overlaps = eig.vectors.adjoint() * t;

    for (Eigen::Index pos = 0; pos < n; ++pos) {
        const double want = spec.target_overlaps[order[static_cast<std::size_t>(pos)]];
        if (std::abs(std::norm(eig.target_overlaps(pos)) - want) > tolerance::overlap_fidelity) {
            throw NumericalError("eigenvector construction missed a prescribed overlap");
        }
    }

    return DiffusionOperator{UnitaryOperator(eig.reconstruct()), std::move(eig)};
}

// Lambda_p = sum_{l != s} |<l|t>|^2 cot^p(theta_l / 2)
inline double moments(const EigenData& eig, int p) {
    if (p != 1 && p != 2) {
        throw ValidationError("moment order must be 1 or 2");
    }
    double sum = 0.0;
    for (std::size_t l = 0; l < eig.dimension(); ++l) {
        if (l == eig.source_slot) {
            continue;
        }
        const double th = eig.phases(static_cast<Eigen::Index>(l));
        if (std::abs(th) <= tolerance::zero_phase) {
            throw ValidationError("degenerate spectrum: a non-source eigenphase is 0");
        }
        sum += eig.weight(l) * std::pow(cot(th / 2.0), p);
    }
    return sum;
}

struct ABQuantities {
    double A = 0.0;
    double B = 1.0;
};

// A = Lambda_1 + cot(phi/2), B = sqrt(1 + Lambda_2). A is the value of the secular function
// (sign-flipped) at lambda = 0 once the source pole is removed, which is what the two-level
// formulas need; for phi = pi both sign conventions agree.
inline ABQuantities ab_quantities(double lambda1, double lambda2, double phi) {
    if (!(phi > 0.0 && phi < 2.0 * pi)) {
        throw ValidationError("phi must lie in (0, 2*pi)");
    }
    if (!(lambda2 >= 0.0)) {
        throw ValidationError("Lambda_2 must be non-negative");
    }
    return {lambda1 + cot(phi / 2.0), std::sqrt(1.0 + lambda2)};
}

}  // namespace gqs
