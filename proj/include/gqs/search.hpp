// search.hpp
// Dense statevector engine for the generalized search iterate S = D_s I_t^phi.

#pragma once

#include "gqs/core.hpp"

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace gqs {

// Multiply the amplitude at index t by e^{i phi}.
inline StateVector selective_phase(const StateVector& psi, std::size_t t, double phi) {
    if (t >= psi.dimension()) {
        throw ValidationError("target index out of range");
    }
    Vector v = psi.amplitudes();
    v(static_cast<Eigen::Index>(t)) *= phase_factor(phi);
    return StateVector(std::move(v));
}

// S = D_s I_t^phi, applied as a dense matvec after a diagonal phase; the product is
// only materialized on request.
class SearchIterate {
public:
    SearchIterate(const UnitaryOperator& diffusion, std::size_t target, double phi)
        : d_(&diffusion), target_(target), phi_(phi), kick_(phase_factor(phi)) {
        if (target >= diffusion.dimension()) {
            throw ValidationError("target index out of range");
        }
    }

    std::size_t dimension() const { return d_->dimension(); }
    std::size_t target() const { return target_; }
    double phi() const { return phi_; }
    const UnitaryOperator& diffusion() const { return *d_; }

    // Columns of `block` are independent system states.
    void apply(Matrix& block) const {
        check(block.rows());
        block.row(static_cast<Eigen::Index>(target_)) *= kick_;
        block = d_->matrix() * block;
    }

    void apply_inverse(Matrix& block) const {
        check(block.rows());
        block = d_->matrix().adjoint() * block;
        block.row(static_cast<Eigen::Index>(target_)) *= std::conj(kick_);
    }

    void apply(Vector& v) const {
        check(v.size());
        v(static_cast<Eigen::Index>(target_)) *= kick_;
        v = d_->matrix() * v;
    }

    void apply_inverse(Vector& v) const {
        check(v.size());
        v = d_->matrix().adjoint() * v;
        v(static_cast<Eigen::Index>(target_)) *= std::conj(kick_);
    }

    // S^q v for q >= 0.
    Vector power_apply(Vector v, std::size_t q) const {
        for (std::size_t i = 0; i < q; ++i) {
            apply(v);
        }
        return v;
    }

    Matrix matrix() const {
        Matrix m = d_->matrix();
        m.col(static_cast<Eigen::Index>(target_)) *= kick_;
        return m;
    }

private:
    void check(Eigen::Index rows) const {
        if (rows != static_cast<Eigen::Index>(d_->dimension())) {
            throw ValidationError("dimension mismatch between state and diffusion operator");
        }
    }

    const UnitaryOperator* d_;
    std::size_t target_;
    double phi_;
    Complex kick_;
};

inline StateVector search_step(const UnitaryOperator& diffusion, std::size_t t, double phi,
                               const StateVector& psi) {
    if (psi.dimension() != diffusion.dimension()) {
        throw ValidationError("dimension mismatch between state and diffusion operator");
    }
    SearchIterate s(diffusion, t, phi);
    Vector v = psi.amplitudes();
    s.apply(v);
    return StateVector(std::move(v));
}

struct CurvePoint {
    std::size_t q = 0;
    double probability = 0.0;
};

struct SuccessCurve {
    std::vector<CurvePoint> points;

    std::size_t size() const { return points.size(); }
    double at(std::size_t q) const { return points.at(q).probability; }

    void write_csv(std::ostream& os) const {
        os << "q,probability\n";
        os.precision(17);
        for (const auto& p : points) {
            os << p.q << ',' << p.probability << '\n';
        }
    }
};

// P(q) = |<t|S^q|s>|^2 for q = 0..q_max.
inline SuccessCurve success_curve(const UnitaryOperator& diffusion, std::size_t t, double phi,
                                  const StateVector& s, std::size_t q_max) {
    if (q_max < 1) {
        throw ValidationError("q_max must be at least 1");
    }
    if (s.dimension() != diffusion.dimension()) {
        throw ValidationError("dimension mismatch between state and diffusion operator");
    }
    SearchIterate iterate(diffusion, t, phi);
    SuccessCurve curve;
    curve.points.reserve(q_max + 1);
    Vector v = s.amplitudes();
    const auto ti = static_cast<Eigen::Index>(t);
    curve.points.push_back({0, std::norm(v(ti))});
    for (std::size_t q = 1; q <= q_max; ++q) {
        iterate.apply(v);
        curve.points.push_back({q, std::norm(v(ti))});
    }
    return curve;
}

// Default sampling window: 10 * ceil(pi B / (4 alpha)) iterations.
inline std::size_t default_curve_length(double B, double alpha) {
    if (!(alpha > 0.0)) {
        throw ValidationError("alpha must be positive");
    }
    return 10 * static_cast<std::size_t>(std::ceil(pi * B / (4.0 * alpha)));
}

// Thrown when the curve rises up to its last sample.
class NoMaximumFound : public NumericalError {
public:
    NoMaximumFound(std::size_t q, double p)
        : NumericalError("no maximum found up to q = " + std::to_string(q)), boundary_q(q), boundary_probability(p) {}
    std::size_t boundary_q;
    double boundary_probability;
};

struct FirstMaximum {
    std::size_t q = 0;
    double probability = 0.0;
};

// Smallest q >= 1 with P(q) >= P(q-1) and P(q) >= P(q+1). The last sample only
// qualifies when it already saturates P = 1.
inline FirstMaximum find_first_max(const SuccessCurve& curve) {
    if (curve.size() < 2) {
        throw ValidationError("curve needs at least two points");
    }
    const auto& pts = curve.points;
    for (std::size_t q = 1; q < pts.size(); ++q) {
        const bool rises = pts[q].probability >= pts[q - 1].probability;
        const bool last = q + 1 == pts.size();
        if (rises && (last ? pts[q].probability >= 1.0 - 1e-12 : pts[q].probability >= pts[q + 1].probability)) {
            return {pts[q].q, pts[q].probability};
        }
    }
    throw NoMaximumFound(pts.back().q, pts.back().probability);
}

}  // namespace gqs
