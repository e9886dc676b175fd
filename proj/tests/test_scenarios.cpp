#include "gqs/amplification.hpp"
#include "gqs/scenarios.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

using namespace gqs;
using Catch::Matchers::WithinAbs;

TEST_CASE("built-in scenarios validate and carry their design targets", "[scenarios]") {
    for (const auto& name : builtin_scenario_names()) {
        const auto sc = builtin_scenario(name, 3);
        INFO(name);
        CHECK(sc.name == name);
        REQUIRE_NOTHROW(sc.spec.validate());
        CHECK(sc.spec.seed == 3);
    }
    REQUIRE_THROWS_AS(builtin_scenario("nope"), ValidationError);

    const auto skew = SearchProblem::make(builtin_scenario("skewed-A").spec, builtin_scenario("skewed-A").phi);
    CHECK_THAT(std::abs(skew.summary.A), WithinAbs(10.0 * 2.0 * skew.summary.alpha * skew.summary.B, 1e-12));
    CHECK_THAT(skew.summary.alpha, WithinAbs(1.0 / 16.0, 1e-15));
    CHECK(skew.summary.P_m <= 0.05);

    const auto rot_sc = builtin_scenario("phase-rotated");
    const auto rot = SearchProblem::make(rot_sc.spec, rot_sc.phi);
    CHECK_THAT(rot.summary.lambda1, WithinAbs(-1.0, 1e-12));
    CHECK_THAT(rot.summary.A, WithinAbs(0.0, 1e-12));
    CHECK_THAT(rot_sc.phi, WithinAbs(pi / 2.0, 0.0));

    const auto bnd_sc = builtin_scenario("boundary");
    const auto bnd = SearchProblem::make(bnd_sc.spec, bnd_sc.phi);
    const auto& s = bnd.summary;
    CHECK_THAT(s.A, WithinAbs(1.57 * s.B * s.B * s.theta_min, 1e-12));
    const auto v = classify_conditions(s.A, s.B, s.alpha, s.theta_min);
    CHECK(v.modified_ok);
    CHECK_FALSE(v.original_ok);
    CHECK_FALSE(classify_conditions(s.A, s.B, s.alpha, s.theta_min, 1.0, 0.999).modified_ok);
}

TEST_CASE("sweep family keeps alpha, B, theta_min fixed while A moves", "[scenarios]") {
    SweepFamily fam;
    const double a_max = fam.max_A();
    for (int k = 0; k <= 5; ++k) {
        const double A = a_max * k / 5.0;
        const auto p = SearchProblem::make(fam.spec(A), pi);
        CHECK_THAT(p.summary.A, WithinAbs(A, 1e-12));
        CHECK_THAT(p.summary.B, WithinAbs(fam.B(), 1e-12));
        CHECK_THAT(p.theta_min(), WithinAbs(fam.theta_min(), 1e-15));
        CHECK_THAT(p.summary.alpha, WithinAbs(fam.alpha(), 1e-15));
    }
    REQUIRE_THROWS_AS(fam.spec(1.0), ValidationError);
}

TEST_CASE("two-level specs respect the gap ratio", "[scenarios]") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto spec = two_level_spec(1024, seed);
        CHECK(spec.alpha() / spec.theta_min() <= 0.02 + 1e-15);
        REQUIRE_NOTHROW(spec.validate());
    }
    CHECK_THAT(phi_for_A(0.7, 0.2), WithinAbs(2.0 * std::atan2(1.0, 0.5), 1e-15));
    CHECK_THAT(ab_quantities(0.2, 0.0, phi_for_A(0.7, 0.2)).A, WithinAbs(0.7, 1e-12));
}

TEST_CASE("scenario files", "[scenarios]") {
    const auto dir = std::filesystem::temp_directory_path() / "gqs_scenario_test";
    std::filesystem::create_directories(dir);
    const auto spec = builtin_scenario("grover4").spec;
    {
        std::ofstream(dir / "spec.json") << nlohmann::json(spec).dump();
        std::ofstream(dir / "scenario.json")
            << nlohmann::json{{"name", "mine"}, {"spec_file", "spec.json"}, {"phi", 1.5}, {"epsilon", 0.01}}.dump();
        std::ofstream(dir / "broken.json") << "{ not json";
    }
    const auto sc = load_scenario_file(dir / "scenario.json");
    CHECK(sc.name == "mine");
    CHECK(sc.phi == 1.5);
    REQUIRE(sc.epsilon.has_value());
    CHECK(*sc.epsilon == 0.01);
    CHECK(sc.spec.eigenphases == spec.eigenphases);

    const auto bare = load_scenario_file(dir / "spec.json");
    CHECK(bare.phi == pi);

    REQUIRE_THROWS_AS(load_scenario_file(dir / "broken.json"), ValidationError);
    REQUIRE_THROWS_AS(load_scenario_file(dir / "missing.json"), ValidationError);
    REQUIRE_THROWS_AS(scenario_from_json(nlohmann::json{{"name", "x"}}), ValidationError);
    std::filesystem::remove_all(dir);
}
