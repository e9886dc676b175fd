// scenarios.hpp
// Named built-in scenarios, scenario files, and seeded spec generators used by
// the test suites and the CLI.

#pragma once

#include "gqs/core.hpp"
#include "gqs/spectrum.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace gqs {

struct Scenario {
    std::string name;
    DiffusionSpec spec;
    double phi = pi;
    std::optional<double> epsilon;  // per-call inversion budget; default beta / 10
    std::string description;
};

inline void to_json(nlohmann::json& j, const Scenario& s) {
    j = nlohmann::json{{"name", s.name}, {"spec", s.spec}, {"phi", s.phi}, {"description", s.description}};
    j["epsilon"] = s.epsilon ? nlohmann::json(*s.epsilon) : nlohmann::json();
}

namespace detail {

// Grover spectrum: phase 0 on |s>, phase pi on the rest. All target weight off |s>
// sits on the first pi slot; the others are degenerate and never see the target.
inline DiffusionSpec grover_spec(std::size_t n, std::uint64_t seed) {
    DiffusionSpec s;
    s.dimension = n;
    s.target_index = 0;
    s.seed = seed;
    s.eigenphases.assign(n, pi);
    s.eigenphases[0] = 0.0;
    s.target_overlaps.assign(n, 0.0);
    const double a2 = 1.0 / static_cast<double>(n);
    s.target_overlaps[0] = a2;
    s.target_overlaps[1] = 1.0 - a2;
    return s;
}

}  // namespace detail

inline Scenario grover_scenario(std::size_t n, std::uint64_t seed) {
    return {"grover" + std::to_string(n), detail::grover_spec(n, seed), pi, std::nullopt,
            "Grover diffusion on N = " + std::to_string(n) + " with a single target"};
}

// N = 256, alpha = 1/16, Grover spectrum (B = 1, theta_min = pi), and phi tuned so
// |A| = cot(phi/2) = 10 * (2 alpha B) = 1.25. The two-level prediction puts the
// original single-pass success near 0.016.
inline Scenario skewed_a_scenario(std::uint64_t seed) {
    Scenario sc;
    sc.name = "skewed-A";
    sc.spec = detail::grover_spec(256, seed);
    const double alpha = 1.0 / 16.0;
    const double A = 10.0 * 2.0 * alpha;
    sc.phi = 2.0 * std::atan2(1.0, A);
    sc.description = "phase-mismatched search with A = 10 * 2 alpha B on a Grover spectrum";
    return sc;
}

// phi = pi/2 with Lambda_1 = -cot(pi/4) = -1 so that A = 0.
inline Scenario phase_rotated_scenario(std::uint64_t seed) {
    Scenario sc;
    sc.name = "phase-rotated";
    const std::size_t n = 64;
    DiffusionSpec& s = sc.spec;
    s.dimension = n;
    s.target_index = 0;
    s.seed = seed;
    s.eigenphases.assign(n, pi);
    s.target_overlaps.assign(n, 0.0);
    const double a2 = 1.0 / static_cast<double>(n);
    const double theta0 = -pi / 3.0;
    const double w = 1.0 / -cot(theta0 / 2.0);  // weight at theta0 giving Lambda_1 = -1
    s.eigenphases[0] = 0.0;
    s.target_overlaps[0] = a2;
    s.eigenphases[1] = theta0;
    s.target_overlaps[1] = w;
    s.target_overlaps[2] = 1.0 - a2 - w;
    sc.phi = pi / 2.0;
    sc.description = "phi = pi/2 with Lambda_1 tuned so that A = 0";
    return sc;
}

// A = 1.57 B^2 theta_min exactly, reached through phi since |Lambda_1| < B caps what the
// spectrum alone can provide.
inline Scenario boundary_scenario(std::uint64_t seed) {
    Scenario sc;
    sc.name = "boundary";
    const std::size_t n = 64;
    DiffusionSpec& s = sc.spec;
    s.dimension = n;
    s.target_index = 0;
    s.seed = seed;
    s.eigenphases.assign(n, pi);
    s.target_overlaps.assign(n, 0.0);
    const double a2 = 1.0 / static_cast<double>(n);
    s.eigenphases[0] = 0.0;
    s.target_overlaps[0] = a2;
    s.eigenphases[1] = pi / 2.0;
    s.target_overlaps[1] = 0.4;
    s.eigenphases[2] = -pi / 2.0;
    s.target_overlaps[2] = 0.3;
    s.target_overlaps[3] = 1.0 - a2 - 0.7;
    const double lambda1 = 0.4 - 0.3;
    const double b2 = 1.0 + 0.7;
    const double A = 1.57 * b2 * (pi / 2.0);
    sc.phi = 2.0 * std::atan2(1.0, A - lambda1);
    sc.description = "A sits exactly on the relaxed threshold 1.57 B^2 theta_min";
    return sc;
}

inline std::vector<std::string> builtin_scenario_names() {
    return {"grover4", "grover64", "skewed-A", "phase-rotated", "boundary"};
}

inline Scenario builtin_scenario(const std::string& name, std::uint64_t seed = 0) {
    if (name == "grover4") return grover_scenario(4, seed);
    if (name == "grover64") return grover_scenario(64, seed);
    if (name == "skewed-A") return skewed_a_scenario(seed);
    if (name == "phase-rotated") return phase_rotated_scenario(seed);
    if (name == "boundary") return boundary_scenario(seed);
    throw ValidationError("unknown scenario '" + name + "'");
}

// Scenario file: {"name", "spec" (inline object) or "spec_file" (path relative to the
// scenario file), "phi", optional "epsilon"}. A bare DiffusionSpec is accepted too,
// with phi = pi.
inline Scenario scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
    Scenario sc;
    try {
        if (j.contains("dimension")) {
            sc.spec = j.get<DiffusionSpec>();
            sc.name = "spec";
        } else {
            sc.name = j.value("name", std::string("scenario"));
            if (j.contains("spec")) {
                sc.spec = j.at("spec").get<DiffusionSpec>();
            } else if (j.contains("spec_file")) {
                const auto path = base_dir / j.at("spec_file").get<std::string>();
                std::ifstream in(path);
                if (!in) {
                    throw ValidationError("cannot open spec file " + path.string());
                }
                nlohmann::json sj;
                in >> sj;
                sc.spec = sj.get<DiffusionSpec>();
            } else {
                throw ValidationError("scenario needs \"spec\" or \"spec_file\"");
            }
            sc.phi = j.value("phi", pi);
            if (j.contains("epsilon") && !j.at("epsilon").is_null()) {
                sc.epsilon = j.at("epsilon").get<double>();
            }
            sc.description = j.value("description", std::string());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed scenario: ") + e.what());
    }
    sc.spec.validate();
    return sc;
}

inline Scenario load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("invalid JSON in " + path.string() + ": " + e.what());
    }
    return scenario_from_json(j, path.parent_path());
}

// ---------------------------------------------------------------------------
// Seeded generators

// Uniform source, target 0, random non-zero phases with |theta| >= theta_min (one
// eigenphase pinned at +-theta_min) and strictly positive random overlaps.
inline DiffusionSpec random_spec(std::size_t n, std::uint64_t seed, double theta_min_lo = 0.2,
                                 double theta_min_hi = 1.0) {
    if (n < 3) {
        throw ValidationError("random specs need N >= 3");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double theta_min = theta_min_lo + (theta_min_hi - theta_min_lo) * unit(rng);
    DiffusionSpec s;
    s.dimension = n;
    s.target_index = 0;
    s.seed = seed ^ 0x9e3779b97f4a7c15ULL;
    s.eigenphases.assign(n, 0.0);
    s.target_overlaps.assign(n, 0.0);
    const double a2 = 1.0 / static_cast<double>(n);
    s.target_overlaps[0] = a2;
    std::vector<double> w(n, 0.0);
    double total = 0.0;
    for (std::size_t l = 1; l < n; ++l) {
        const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
        const double mag = l == 1 ? theta_min : theta_min + (pi - theta_min) * unit(rng);
        s.eigenphases[l] = sign * mag;
        w[l] = 0.05 + unit(rng);
        total += w[l];
    }
    for (std::size_t l = 1; l < n; ++l) {
        s.target_overlaps[l] = (1.0 - a2) * w[l] / total;
    }
    return s;
}

// Spectrum for the A sweep at fixed (alpha, B, theta_min, phi = pi): a pair at +-pi/2
// with overlaps (w +- A)/2 sets Lambda_1 = A and Lambda_2 = w independently of A; a
// faint pair at +-pi/8 fixes theta_min; the rest of the weight sits at pi.
struct SweepFamily {
    std::size_t dimension = 256;
    double pair_weight = 0.95;
    double faint_weight = 1e-4;
    double faint_phase = pi / 8.0;
    std::uint64_t seed = 2024;

    double alpha() const { return 1.0 / std::sqrt(static_cast<double>(dimension)); }
    double lambda2() const {
        const double c = cot(faint_phase / 2.0);
        return pair_weight + 2.0 * faint_weight * c * c;
    }
    double B() const { return std::sqrt(1.0 + lambda2()); }
    double theta_min() const { return faint_phase; }
    double max_A() const { return B() * B() * theta_min(); }

    DiffusionSpec spec(double A) const {
        if (std::abs(A) > pair_weight) {
            throw ValidationError("sweep family cannot reach |A| > pair weight");
        }
        DiffusionSpec s;
        s.dimension = dimension;
        s.target_index = 0;
        s.seed = seed;
        s.eigenphases.assign(dimension, pi);
        s.target_overlaps.assign(dimension, 0.0);
        const double a2 = alpha() * alpha();
        s.eigenphases[0] = 0.0;
        s.target_overlaps[0] = a2;
        s.eigenphases[1] = pi / 2.0;
        s.target_overlaps[1] = (pair_weight + A) / 2.0;
        s.eigenphases[2] = -pi / 2.0;
        s.target_overlaps[2] = (pair_weight - A) / 2.0;
        s.eigenphases[3] = faint_phase;
        s.target_overlaps[3] = faint_weight;
        s.eigenphases[4] = -faint_phase;
        s.target_overlaps[4] = faint_weight;
        s.target_overlaps[5] = 1.0 - a2 - pair_weight - 2.0 * faint_weight;
        return s;
    }
};

// Specs in the two-level regime: uniform source on N, theta_min drawn from
// [ratio_floor * alpha, pi], random phases and overlaps.
inline DiffusionSpec two_level_spec(std::size_t n, std::uint64_t seed, double ratio_floor = 50.0) {
    const double alpha = 1.0 / std::sqrt(static_cast<double>(n));
    const double lo = std::min(ratio_floor * alpha, pi);
    return random_spec(n, seed, lo, pi);
}

// phi giving A = target_A for a spectrum with first moment lambda1.
inline double phi_for_A(double target_A, double lambda1) {
    return 2.0 * std::atan2(1.0, target_A - lambda1);
}

}  // namespace gqs
