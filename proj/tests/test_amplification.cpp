#include "gqs/amplification.hpp"
#include "gqs/scenarios.hpp"

#include <catch_amalgamated.hpp>

using namespace gqs;
using Catch::Matchers::WithinAbs;

TEST_CASE("condition classifier", "[amplification]") {
    const auto zero = classify_conditions(0.0, 1.2, 0.05, 0.4);
    CHECK(zero.original_ok);
    CHECK(zero.modified_ok);

    const double alpha = 0.05;
    const double B = 1.2;
    const auto edge = classify_conditions(2.0 * alpha * B, B, alpha, 0.4);
    CHECK(edge.original_ok);

    const double theta_min = 0.4;
    const auto relaxed = classify_conditions(B * B * theta_min, B, alpha, theta_min);
    CHECK(relaxed.modified_ok);
    CHECK_FALSE(relaxed.original_ok);  // B theta_min > 2 alpha

    const auto over = classify_conditions(1.6 * B * B * theta_min, B, alpha, theta_min);
    CHECK_FALSE(over.modified_ok);

    // Sign of A does not matter.
    CHECK(classify_conditions(-2.0 * alpha * B, B, alpha, theta_min).original_ok);

    // original_ok => modified_ok whenever the original threshold is the tighter one.
    for (double a = 0.0; a < 3.0; a += 0.01) {
        const auto v = classify_conditions(a, B, alpha, theta_min);
        REQUIRE(v.implication_applies());
        CHECK((!v.original_ok || v.modified_ok));
    }
    REQUIRE_THROWS_AS(classify_conditions(0.0, 1.0, 0.0, 0.4), ValidationError);
}

TEST_CASE("cost model", "[amplification]") {
    SpectralSummary grover;
    grover.alpha = 0.125;
    grover.B = 1.0;
    grover.phi = pi;
    grover.q_m = 2.0 * pi;
    grover.beta = 1.0;
    const auto g = cost_model(grover, pi, 0.1);
    CHECK_THAT(g.original, WithinAbs(grover.q_m, 1e-12));
    CHECK_THAT(g.modified, WithinAbs(grover.q_m, 1e-12));
    CHECK_THAT(g.estimate, WithinAbs(grover.q_m, 1e-12));

    SpectralSummary s;
    s.alpha = 0.01;
    s.B = 1.0;
    s.phi = pi;
    s.eta = 0.5 * std::asin(0.1);
    const auto perf = performance_prediction(s.eta, s.B, s.alpha, s.phi);
    s.q_m = perf.q_m;
    s.beta = perf.beta;
    const auto c = cost_model(s, 0.5, 0.01);
    CHECK_THAT(c.original / c.modified_search, WithinAbs(10.0, 1e-9));
    CHECK_THAT(c.modified_inversion, WithinAbs(std::log(10.0) / 0.5 * 10.0, 1e-9));
    CHECK(c.pea_queries_per_call.has_value());

    s.beta = 0.0;
    REQUIRE_THROWS_AS(cost_model(s, 0.5, 0.01), ValidationError);
}

TEST_CASE("exact I_u is the reflection about u", "[amplification]") {
    const auto grover = build_diffusion(grover_scenario(16, 0).spec);
    const Vector s = StateVector::uniform(16).amplitudes();

    const Matrix iu0 = build_Iu(grover, 0, pi, s, 0, InversionImpl::exact);
    CHECK((iu0 - exact_source_inversion(s)).cwiseAbs().maxCoeff() < 1e-14);

    const Matrix iu = build_Iu(grover, 0, pi, s, 3, InversionImpl::exact);
    const Vector u = SearchIterate(grover.op, 0, pi).power_apply(s, 3);
    CHECK((iu * u + u).norm() < 1e-10);
    CHECK((iu * iu - Matrix::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-9);
    // Eigenvalue -1 exactly once: trace N - 2.
    CHECK_THAT(iu.trace().real(), WithinAbs(14.0, 1e-9));
}

TEST_CASE("approximate I_u tracks the exact one", "[amplification]") {
    auto spec = random_spec(16, 21, 0.5, 0.5);
    const auto d = build_diffusion(spec);
    const Vector s = spec.source_state().amplitudes();
    PEAConfig cfg;
    cfg.theta_min = d.eig.theta_min();
    cfg.target_error = 1e-3;
    cfg.ancilla_count = required_ancillas(cfg.theta_min, 1e-3).ancilla_count;
    const Matrix exact = build_Iu(d, 0, 2.0, s, 4, InversionImpl::exact);
    const Matrix approx = build_Iu(d, 0, 2.0, s, 4, InversionImpl::approximate, &cfg);
    CHECK((approx - exact).cwiseAbs().maxCoeff() <= 2e-3);
    REQUIRE_THROWS_AS(build_Iu(d, 0, 2.0, s, 4, InversionImpl::approximate), ValidationError);
    REQUIRE_THROWS_AS(build_Iu(d, 0, 2.0, Vector::Ones(8), 4, InversionImpl::exact), ValidationError);
}

TEST_CASE("amplitude amplification follows the two-dimensional rotation", "[amplification]") {
    const std::size_t n = 32;
    for (double beta : {0.05, 0.1, 0.3, 0.7}) {
        Vector u = Vector::Zero(n);
        u(0) = beta;
        u(5) = std::sqrt(1.0 - beta * beta) * phase_factor(0.4);
        const Matrix iu = Matrix::Identity(n, n) - 2.0 * u * u.adjoint();
        const auto r = qaa_run(StateVector(u), 0, iu);
        CHECK(r.iterations == static_cast<std::size_t>(std::floor(pi / (4.0 * std::asin(beta)))));
        for (std::size_t k = 0; k < r.history.size(); ++k) {
            const double expect = std::pow(std::sin((2.0 * static_cast<double>(k) + 1.0) * std::asin(beta)), 2);
            CHECK_THAT(r.history[k], WithinAbs(expect, 1e-6));
        }
        CHECK(r.success >= 0.5);
    }
    // beta = 0.3 takes two rounds.
    CHECK(qaa_iterations(0.3) == 2);
    CHECK(qaa_iterations(1.0) == 0);
    REQUIRE_THROWS_AS(qaa_iterations(1e-9), NumericalError);
}

TEST_CASE("Grover N=64 pipeline degenerates to plain search", "[amplification]") {
    const auto sc = builtin_scenario("grover64");
    const auto p = SearchProblem::make(sc.spec, sc.phi);
    for (auto impl : {InversionImpl::exact, InversionImpl::approximate}) {
        ModifiedOptions opt;
        opt.inversion = impl;
        const auto r = modified_search(p, opt);
        CHECK(r.q_m == 6);
        CHECK(r.qaa_iterations == 0);
        CHECK(r.final_success >= 0.98);
        CHECK(r.total_cost == 6.0);
    }
}

TEST_CASE("cost ledger adds up", "[amplification]") {
    const auto sc = builtin_scenario("skewed-A");
    const auto p = SearchProblem::make(sc.spec, sc.phi);
    const auto r = modified_search(p);
    CHECK(r.mode == "modified-pea-Is");
    CHECK(r.per_iteration_steps == 2 * r.q_m + 1 + r.inversion_steps);
    CHECK(r.inversion_steps == 2 * ((std::size_t{1} << r.pea_ancillas) - 1));
    CHECK(r.total_cost == static_cast<double>(r.search_steps + r.qaa_iterations * r.per_iteration_steps));
    CHECK(r.epsilon_measured <= r.epsilon_target);
    CHECK(r.final_success >= 0.5);

    const nlohmann::json j = r;
    CHECK(j.at("cost").at("total") == r.total_cost);
    CHECK(j.at("conditions").at("modified_ok").is_boolean());
}

TEST_CASE("balanced spectrum: original and modified costs agree", "[amplification]") {
    // phi = pi and a symmetric spectrum give Lambda_1 = 0, eta = pi/4.
    SweepFamily fam;
    const auto p = SearchProblem::make(fam.spec(0.0), pi);
    CHECK_THAT(p.summary.A, WithinAbs(0.0, 1e-12));
    CHECK_THAT(p.summary.eta, WithinAbs(pi / 4.0, 1e-12));
    const auto orig = original_search(p);
    ModifiedOptions opt;
    opt.inversion = InversionImpl::exact;
    const auto mod = modified_search(p, opt);
    const double ratio = orig.total_cost / mod.total_cost;
    CHECK(ratio <= 2.0);
    CHECK(ratio >= 0.5);
}

TEST_CASE("refinement never lowers beta", "[amplification]") {
    const auto sc = builtin_scenario("phase-rotated");
    const auto p = SearchProblem::make(sc.spec, sc.phi);
    ModifiedOptions plain;
    plain.inversion = InversionImpl::exact;
    ModifiedOptions refined = plain;
    refined.refine_q = true;
    CHECK(modified_search(p, refined).beta_empirical >= modified_search(p, plain).beta_empirical - 1e-15);
}
