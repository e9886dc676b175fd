// core.hpp
// Numeric aliases, error types, angle helpers and the two carrier types
// (UnitaryOperator, StateVector) shared by every module.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace gqs {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr Complex imag_unit{0.0, 1.0};

// Tolerance policy. Every numerical threshold the library asserts lives here.
namespace tolerance {
inline constexpr double unitarity = 1e-10;
inline constexpr double state_norm = 1e-10;
inline constexpr double overlap_sum = 1e-12;
inline constexpr double overlap_fidelity = 1e-10;
inline constexpr double zero_phase = 1e-12;
inline constexpr double degenerate_phase = 1e-12;
inline constexpr double zero_overlap = 1e-14;
inline constexpr double secular_residual = 1e-9;
inline constexpr double probability_slack = 1e-12;
inline constexpr double beta_floor = 1e-8;
inline constexpr double comparison_relative = 1e-9;
}  // namespace tolerance

// Input that violates a documented precondition. The CLI maps it to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computation that could not meet its numerical contract. CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Reduce an angle to (-pi, pi].
inline double wrap_angle(double angle) {
    double r = std::remainder(angle, 2.0 * pi);
    if (r <= -pi) {
        r += 2.0 * pi;
    }
    return r;
}

// Shortest distance between two angles on the circle.
inline double circular_distance(double a, double b) {
    return std::abs(wrap_angle(a - b));
}

inline double cot(double x) {
    return std::cos(x) / std::sin(x);
}

inline Complex phase_factor(double angle) {
    return std::polar(1.0, angle);
}

// max_ij |(U^dagger U - 1)_ij|
inline double unitarity_defect(const Matrix& u) {
    if (u.rows() != u.cols()) {
        return std::numeric_limits<double>::infinity();
    }
    const Matrix gram = u.adjoint() * u;
    return (gram - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

// Dense square matrix whose unitarity was checked on construction.
class UnitaryOperator {
public:
    explicit UnitaryOperator(Matrix m, double tol = tolerance::unitarity) : m_(std::move(m)) {
        if (m_.rows() == 0 || m_.rows() != m_.cols()) {
            throw ValidationError("unitary operator must be a non-empty square matrix");
        }
        const double defect = unitarity_defect(m_);
        if (!(defect <= tol)) {
            throw NumericalError("matrix is not unitary: defect " + std::to_string(defect));
        }
    }

    std::size_t dimension() const { return static_cast<std::size_t>(m_.rows()); }
    const Matrix& matrix() const { return m_; }

    Vector apply(const Vector& v) const {
        if (v.size() != m_.cols()) {
            throw ValidationError("dimension mismatch in operator application");
        }
        return m_ * v;
    }

    UnitaryOperator adjoint() const { return UnitaryOperator(m_.adjoint(), 10 * tolerance::unitarity); }

private:
    Matrix m_;
};

// Normalized amplitude vector. Construction from raw amplitudes requires unit norm.
class StateVector {
public:
    explicit StateVector(Vector amplitudes, double tol = tolerance::state_norm)
        : amps_(std::move(amplitudes)) {
        if (amps_.size() == 0) {
            throw ValidationError("state vector must be non-empty");
        }
        const double n = amps_.norm();
        if (!(std::abs(n - 1.0) <= tol)) {
            throw NumericalError("state vector is not normalized: norm " + std::to_string(n));
        }
    }

    static StateVector basis(std::size_t dim, std::size_t index) {
        if (index >= dim) {
            throw ValidationError("basis index out of range");
        }
        Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
        v(static_cast<Eigen::Index>(index)) = 1.0;
        return StateVector(std::move(v));
    }

    static StateVector uniform(std::size_t dim) {
        if (dim == 0) {
            throw ValidationError("dimension must be positive");
        }
        Vector v = Vector::Constant(static_cast<Eigen::Index>(dim),
                                    Complex(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
        return StateVector(std::move(v));
    }

    static StateVector normalized(Vector v) {
        const double n = v.norm();
        if (!(n > 0.0)) {
            throw NumericalError("cannot normalize a zero vector");
        }
        v /= n;
        return StateVector(std::move(v));
    }

    std::size_t dimension() const { return static_cast<std::size_t>(amps_.size()); }
    const Vector& amplitudes() const { return amps_; }
    Complex operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

    double probability(std::size_t i) const {
        if (i >= dimension()) {
            throw ValidationError("basis index out of range");
        }
        return std::norm(amps_(static_cast<Eigen::Index>(i)));
    }

    // <this|other>
    Complex overlap(const StateVector& other) const { return amps_.dot(other.amps_); }

private:
    Vector amps_;
};

}  // namespace gqs
