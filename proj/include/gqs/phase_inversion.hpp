// phase_inversion.hpp
// Coherent phase-estimation circuit W = P^dagger Z_window P that approximates the
// selective inversion I - 2|s><s| of the phase-0 eigenstate of a black-box D_s.
//
// Extended states are stored as an (N * batch) x 2^b matrix: column y holds the
// system amplitudes (batch items stacked, N rows each) paired with ancilla value y.

#pragma once

#include "gqs/core.hpp"
#include "gqs/spectrum.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace gqs {

enum class AncillaPrep {
    hadamard,  // uniform superposition; exact on bin-centre phases
    kaiser,    // Kaiser-Bessel tapered amplitudes; exponentially small spectral leakage
};

inline std::string to_string(AncillaPrep p) {
    return p == AncillaPrep::hadamard ? "hadamard" : "kaiser";
}

inline AncillaPrep parse_ancilla_prep(const std::string& s) {
    if (s == "hadamard") return AncillaPrep::hadamard;
    if (s == "kaiser") return AncillaPrep::kaiser;
    throw ValidationError("unknown ancilla preparation '" + s + "' (expected hadamard or kaiser)");
}

struct PEAConfig {
    std::size_t ancilla_count = 1;
    double theta_min = pi;
    double target_error = 0.05;
    AncillaPrep prep = AncillaPrep::kaiser;
    double taper = 0.04;  // Kaiser shape parameter is taper * 2^b * theta_min
    std::size_t simulation_cap = std::size_t{1} << 20;
    std::size_t repetitions = 1;

    std::size_t register_size() const { return std::size_t{1} << ancilla_count; }
    std::size_t queries() const { return (register_size() - 1) * repetitions; }

    void validate(std::size_t system_dimension) const {
        if (ancilla_count < 1 || ancilla_count > 30) {
            throw ValidationError("ancilla count must lie in [1, 30]");
        }
        if (!(theta_min > 0.0 && theta_min <= pi + 1e-12)) {
            throw ValidationError("theta_min must lie in (0, pi]");
        }
        if (!(target_error > 0.0 && target_error < 1.0)) {
            throw ValidationError("target error must lie in (0, 1)");
        }
        if (!(taper >= 0.0 && std::isfinite(taper))) {
            throw ValidationError("taper must be finite and non-negative");
        }
        if (repetitions != 1) {
            throw ValidationError("only a single repetition is supported");
        }
        if (static_cast<double>(register_size()) * theta_min / (2.0 * pi) < 1.0 - 1e-12) {
            throw ValidationError("2^b * theta_min / (2 pi) must be at least 1 (b = " +
                                  std::to_string(ancilla_count) + ")");
        }
        if (system_dimension * register_size() > simulation_cap) {
            throw ValidationError("N * 2^b = " + std::to_string(system_dimension * register_size()) +
                                  " exceeds the simulation cap of " + std::to_string(simulation_cap));
        }
    }
};

// Ancilla amplitudes prepared from |0...0>, normalized and real.
inline RealVector ancilla_state(std::size_t register_size, double theta_min, AncillaPrep prep, double taper) {
    const auto m = static_cast<Eigen::Index>(register_size);
    RealVector w(m);
    if (prep == AncillaPrep::hadamard || m == 1) {
        w.setOnes();
    } else {
        const double shape = taper * static_cast<double>(m) * theta_min;
        for (Eigen::Index k = 0; k < m; ++k) {
            const double x = 2.0 * static_cast<double>(k) / static_cast<double>(m - 1) - 1.0;
            w(k) = std::cyl_bessel_i(0.0, shape * std::sqrt(std::max(0.0, 1.0 - x * x)));
        }
    }
    w /= w.norm();
    return w;
}

inline RealVector ancilla_state(const PEAConfig& cfg) {
    return ancilla_state(cfg.register_size(), cfg.theta_min, cfg.prep, cfg.taper);
}

// Window rule: ancilla value y flips the sign iff |2 pi y / 2^b| < theta_min / 2 on the circle.
inline std::vector<bool> inversion_window(std::size_t register_size, double theta_min) {
    std::vector<bool> win(register_size);
    for (std::size_t y = 0; y < register_size; ++y) {
        const double ph = 2.0 * pi * static_cast<double>(y) / static_cast<double>(register_size);
        win[y] = circular_distance(ph, 0.0) < theta_min / 2.0;
    }
    return win;
}

namespace detail {

// Discrete Fourier transform along the ancilla axis (columns of z), unitary normalization.
// sign < 0 applies e^{-2 pi i y y'/M}, the inverse QFT on the register.
inline void ancilla_dft(Matrix& z, int sign) {
    const Eigen::Index m = z.cols();
    if (m == 1) {
        return;
    }
    Eigen::FFT<double> fft;
    const double norm = 1.0 / std::sqrt(static_cast<double>(m));
    std::vector<Complex> in(static_cast<std::size_t>(m));
    std::vector<Complex> out(static_cast<std::size_t>(m));
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
        for (Eigen::Index y = 0; y < m; ++y) {
            in[static_cast<std::size_t>(y)] = z(r, y);
        }
        if (sign < 0) {
            fft.fwd(out, in);
            for (Eigen::Index y = 0; y < m; ++y) {
                z(r, y) = out[static_cast<std::size_t>(y)] * norm;
            }
        } else {
            fft.inv(out, in);
            for (Eigen::Index y = 0; y < m; ++y) {
                z(r, y) = out[static_cast<std::size_t>(y)] * (static_cast<double>(m) * norm);
            }
        }
    }
}

// Walsh-Hadamard transform on the ancilla axis (self-inverse).
inline void ancilla_hadamard(Matrix& z) {
    const Eigen::Index m = z.cols();
    const double r = 1.0 / std::sqrt(2.0);
    for (Eigen::Index h = 1; h < m; h *= 2) {
        for (Eigen::Index i = 0; i < m; i += 2 * h) {
            for (Eigen::Index j = i; j < i + h; ++j) {
                Vector a = z.col(j);
                z.col(j) = (a + z.col(j + h)) * r;
                z.col(j + h) = (a - z.col(j + h)) * r;
            }
        }
    }
}

// Householder reflection on the ancilla axis exchanging |0> and |w> (self-inverse).
inline void ancilla_householder(Matrix& z, const RealVector& w) {
    RealVector v = -w;
    v(0) += 1.0;
    const double vv = v.squaredNorm();
    if (vv < 1e-30) {
        return;
    }
    const Vector zv = z * v.cast<Complex>();
    z.noalias() -= (2.0 / vv) * zv * v.cast<Complex>().transpose();
}

}  // namespace detail

class PhaseInversionCircuit {
public:
    PhaseInversionCircuit(const UnitaryOperator& diffusion, PEAConfig cfg)
        : cfg_(cfg), n_(static_cast<Eigen::Index>(diffusion.dimension())) {
        cfg_.validate(diffusion.dimension());
        m_ = static_cast<Eigen::Index>(cfg_.register_size());
        prep_ = ancilla_state(cfg_);
        window_ = inversion_window(cfg_.register_size(), cfg_.theta_min);
        // D^{2^j} by repeated squaring; a simulation shortcut, the circuit still charges 2^j queries.
        powers_.reserve(cfg_.ancilla_count);
        powers_.push_back(diffusion.matrix());
        for (std::size_t j = 1; j < cfg_.ancilla_count; ++j) {
            powers_.push_back(powers_.back() * powers_.back());
        }
    }

    const PEAConfig& config() const { return cfg_; }
    std::size_t system_dimension() const { return static_cast<std::size_t>(n_); }
    std::size_t register_size() const { return static_cast<std::size_t>(m_); }
    std::size_t queries_per_pass() const { return cfg_.queries(); }
    // Compute plus uncompute.
    std::size_t queries_per_call() const { return 2 * cfg_.queries(); }
    const std::vector<bool>& window() const { return window_; }
    const RealVector& prepared_state() const { return prep_; }

    // W is Hermitian and squares to the identity, so this is also W^{-1}.
    void apply(Matrix& z, Eigen::Index batch) const {
        check(z, batch);
        forward(z, batch);
        for (Eigen::Index y = 0; y < m_; ++y) {
            if (window_[static_cast<std::size_t>(y)]) {
                z.col(y) = -z.col(y);
            }
        }
        backward(z, batch);
    }

    // Inputs are system states (columns) with ancillas in |0...0>; returns the
    // <0...0| component of W applied to each.
    Matrix block(const Matrix& inputs) const {
        if (inputs.rows() != n_) {
            throw ValidationError("dimension mismatch between inputs and circuit");
        }
        const Eigen::Index batch = inputs.cols();
        Matrix z = Matrix::Zero(n_ * batch, m_);
        z.col(0) = Eigen::Map<const Vector>(inputs.data(), n_ * batch);
        apply(z, batch);
        Matrix out(n_, batch);
        Eigen::Map<Vector>(out.data(), n_ * batch) = z.col(0);
        return out;
    }

    // Dense W on system (x) ancillas, index i + N * y. Intended for small N * 2^b.
    Matrix to_matrix() const {
        const Eigen::Index dim = n_ * m_;
        if (dim > 4096) {
            throw ValidationError("extended dimension too large for a dense matrix");
        }
        Matrix z = Matrix::Zero(n_ * dim, m_);
        for (Eigen::Index y = 0; y < m_; ++y) {
            for (Eigen::Index i = 0; i < n_; ++i) {
                const Eigen::Index input = i + n_ * y;
                z(i + n_ * input, y) = 1.0;
            }
        }
        apply(z, dim);
        Matrix w(dim, dim);
        for (Eigen::Index input = 0; input < dim; ++input) {
            for (Eigen::Index y = 0; y < m_; ++y) {
                w.block(n_ * y, input, n_, 1) = z.block(n_ * input, y, n_, 1);
            }
        }
        return w;
    }

private:
    void check(const Matrix& z, Eigen::Index batch) const {
        if (batch < 1 || z.rows() != n_ * batch || z.cols() != m_) {
            throw ValidationError("extended state has the wrong shape for this circuit");
        }
    }

    void prepare(Matrix& z) const {
        if (cfg_.prep == AncillaPrep::hadamard) {
            detail::ancilla_hadamard(z);
        } else {
            detail::ancilla_householder(z, prep_);
        }
    }

    // Ancilla bit j controls D^{2^j}: columns with bit j set form contiguous runs of 2^j.
    void controlled_powers(Matrix& z, Eigen::Index batch, bool adjoint) const {
        const Eigen::Index rows = z.rows();
        for (std::size_t jj = 0; jj < powers_.size(); ++jj) {
            const std::size_t j = adjoint ? powers_.size() - 1 - jj : jj;
            const Eigen::Index run = Eigen::Index{1} << j;
            for (Eigen::Index start = run; start < m_; start += 2 * run) {
                Eigen::Map<Matrix> blk(z.data() + start * rows, n_, batch * run);
                if (adjoint) {
                    blk = powers_[j].adjoint() * blk;
                } else {
                    blk = powers_[j] * blk;
                }
            }
        }
    }

    void forward(Matrix& z, Eigen::Index batch) const {
        prepare(z);
        controlled_powers(z, batch, false);
        detail::ancilla_dft(z, -1);
    }

    void backward(Matrix& z, Eigen::Index batch) const {
        detail::ancilla_dft(z, +1);
        controlled_powers(z, batch, true);
        prepare(z);
    }

    PEAConfig cfg_;
    Eigen::Index n_ = 0;
    Eigen::Index m_ = 0;
    RealVector prep_;
    std::vector<bool> window_;
    std::vector<Matrix> powers_;
};

struct EffectiveAction {
    Matrix block;           // <0...0| W |0...0> on the system
    double leakage = 0.0;   // max over D_s eigenstates of 1 - ||block |l>||
};

inline EffectiveAction effective_system_action(const PhaseInversionCircuit& w, const EigenData& eig) {
    const auto n = static_cast<Eigen::Index>(w.system_dimension());
    if (eig.vectors.rows() != n) {
        throw ValidationError("eigenbasis does not match the circuit dimension");
    }
    EffectiveAction out;
    out.block.resize(n, n);
    const auto chunk = std::max<Eigen::Index>(
        1, static_cast<Eigen::Index>((std::size_t{1} << 22) / (w.system_dimension() * w.register_size())));
    for (Eigen::Index c0 = 0; c0 < n; c0 += chunk) {
        const Eigen::Index len = std::min(chunk, n - c0);
        out.block.middleCols(c0, len) = w.block(Matrix::Identity(n, n).middleCols(c0, len));
    }
    const Matrix images = out.block * eig.vectors;
    for (Eigen::Index l = 0; l < n; ++l) {
        out.leakage = std::max(out.leakage, 1.0 - images.col(l).norm());
    }
    return out;
}

struct PhaseError {
    double phase = 0.0;
    double error = 0.0;    // |<l|block|l> - target_l|, target -1 at phase 0 and +1 elsewhere
    double leakage = 0.0;  // 1 - ||block |l>||
};

struct ApproxInversionReport {
    std::vector<PhaseError> per_phase;
    double worst_error = 0.0;
    double worst_leakage = 0.0;
    std::size_t ancilla_count = 0;
    std::size_t queries = 0;  // controlled-D_s applications per pass
    std::size_t repetitions = 1;
};

// The effective block is a function of D_s, so one eigenvector per distinct phase
// determines the error on that whole eigenspace. `all_eigenstates` measures every one.
inline ApproxInversionReport inversion_report(const PhaseInversionCircuit& w, const EigenData& eig,
                                              bool all_eigenstates = false) {
    const auto n = static_cast<Eigen::Index>(w.system_dimension());
    if (eig.vectors.rows() != n) {
        throw ValidationError("eigenbasis does not match the circuit dimension");
    }
    std::vector<Eigen::Index> reps;
    for (Eigen::Index l = 0; l < n; ++l) {
        const bool seen = std::any_of(reps.begin(), reps.end(), [&](Eigen::Index r) {
            return circular_distance(eig.phases(r), eig.phases(l)) <= tolerance::degenerate_phase;
        });
        if (all_eigenstates || !seen) {
            reps.push_back(l);
        }
    }
    ApproxInversionReport rep;
    rep.ancilla_count = w.config().ancilla_count;
    rep.queries = w.queries_per_pass();
    rep.repetitions = w.config().repetitions;

    const auto chunk = std::max<std::size_t>(1, (std::size_t{1} << 22) / (w.system_dimension() * w.register_size()));
    for (std::size_t c0 = 0; c0 < reps.size(); c0 += chunk) {
        const std::size_t len = std::min(chunk, reps.size() - c0);
        Matrix inputs(n, static_cast<Eigen::Index>(len));
        for (std::size_t k = 0; k < len; ++k) {
            inputs.col(static_cast<Eigen::Index>(k)) = eig.vectors.col(reps[c0 + k]);
        }
        const Matrix images = w.block(inputs);
        for (std::size_t k = 0; k < len; ++k) {
            const auto col = static_cast<Eigen::Index>(k);
            const Eigen::Index l = reps[c0 + k];
            const double target = static_cast<std::size_t>(l) == eig.source_slot ? -1.0 : 1.0;
            PhaseError pe;
            pe.phase = eig.phases(l);
            pe.error = std::abs(inputs.col(col).dot(images.col(col)) - target);
            pe.leakage = std::max(0.0, 1.0 - images.col(col).norm());
            rep.worst_error = std::max(rep.worst_error, pe.error);
            rep.worst_leakage = std::max(rep.worst_leakage, pe.leakage);
            rep.per_phase.push_back(pe);
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Sizing rule

// Probability that an eigenstate with phase theta lands in the inversion window.
inline double window_probability(const RealVector& w, const std::vector<bool>& window, double theta) {
    const auto m = w.size();
    double p = 0.0;
    for (Eigen::Index y = 0; y < m; ++y) {
        if (!window[static_cast<std::size_t>(y)]) {
            continue;
        }
        const double d = theta - 2.0 * pi * static_cast<double>(y) / static_cast<double>(m);
        Complex amp = 0.0;
        for (Eigen::Index k = 0; k < m; ++k) {
            amp += w(k) * phase_factor(static_cast<double>(k) * d);
        }
        p += std::norm(amp) / static_cast<double>(m);
    }
    return p;
}

// Worst-case error over every phase admissible for theta_min: 2 (1 - P_in(0)) for the
// source, and 2 P_in(theta) for |theta| in [theta_min, pi]. The supremum is taken on a
// 16x oversampled grid plus the two edge points.
inline double predicted_worst_error(std::size_t ancilla_count, double theta_min, AncillaPrep prep, double taper) {
    const std::size_t m = std::size_t{1} << ancilla_count;
    const RealVector w = ancilla_state(m, theta_min, prep, taper);
    const auto window = inversion_window(m, theta_min);
    constexpr std::size_t oversample = 16;
    const std::size_t len = m * oversample;

    std::vector<Complex> padded(len, Complex(0.0));
    for (std::size_t k = 0; k < m; ++k) {
        padded[k] = w(static_cast<Eigen::Index>(k));
    }
    // g[j] = sum_k w_k e^{+i k 2 pi j / len}
    std::vector<Complex> g(len);
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    fft.inv(g, padded);

    std::vector<std::size_t> in_window;
    for (std::size_t y = 0; y < m; ++y) {
        if (window[y]) in_window.push_back(y);
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < len; ++j) {
        const double theta = 2.0 * pi * static_cast<double>(j) / static_cast<double>(len);
        const double dist = circular_distance(theta, 0.0);
        const bool is_source = j == 0;
        if (!is_source && dist < theta_min) {
            continue;
        }
        double p = 0.0;
        for (std::size_t y : in_window) {
            p += std::norm(g[(j + len - (oversample * y) % len) % len]);
        }
        p /= static_cast<double>(m);
        worst = std::max(worst, is_source ? 2.0 * (1.0 - p) : 2.0 * p);
    }
    for (double edge : {theta_min, -theta_min}) {
        worst = std::max(worst, 2.0 * window_probability(w, window, edge));
    }
    return std::min(worst, 2.0);
}

struct AncillaSizing {
    std::size_t ancilla_count = 0;
    std::size_t queries = 0;
    double predicted_error = 0.0;
};

// Smallest b >= ceil(log2(2 pi / theta_min)) whose predicted worst-case error is <= epsilon.
inline AncillaSizing required_ancillas(double theta_min, double epsilon, AncillaPrep prep = AncillaPrep::kaiser,
                                       double taper = 0.04, std::size_t max_ancillas = 20) {
    if (!(theta_min > 0.0 && theta_min <= pi + 1e-12)) {
        throw ValidationError("theta_min must lie in (0, pi]");
    }
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw ValidationError("epsilon must lie in (0, 1)");
    }
    auto b = static_cast<std::size_t>(std::max(1.0, std::ceil(std::log2(2.0 * pi / theta_min) - 1e-12)));
    for (; b <= max_ancillas; ++b) {
        const double err = predicted_worst_error(b, theta_min, prep, taper);
        if (err <= epsilon) {
            return {b, (std::size_t{1} << b) - 1, err};
        }
    }
    throw NumericalError("no ancilla count up to " + std::to_string(max_ancillas) + " meets the target error");
}

}  // namespace gqs
