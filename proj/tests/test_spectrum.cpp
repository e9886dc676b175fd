#include "gqs/scenarios.hpp"
#include "gqs/spectrum.hpp"

#include <catch_amalgamated.hpp>

using namespace gqs;
using Catch::Matchers::WithinAbs;

namespace {

DiffusionSpec small_spec() {
    DiffusionSpec s;
    s.dimension = 4;
    s.target_index = 2;
    s.seed = 11;
    s.eigenphases = {0.0, 1.0, -2.0, 3.0};
    s.target_overlaps = {0.25, 0.4, 0.2, 0.15};
    return s;
}

}  // namespace

TEST_CASE("spec validation rejects malformed inputs", "[spectrum]") {
    REQUIRE_NOTHROW(small_spec().validate());

    auto s = small_spec();
    s.target_overlaps = {0.25, 0.3, 0.2, 0.15};  // sums to 0.9
    REQUIRE_THROWS_AS(s.validate(), ValidationError);

    s = small_spec();
    s.eigenphases[1] = 0.0;  // degenerate source eigenspace
    REQUIRE_THROWS_AS(s.validate(), ValidationError);

    s = small_spec();
    s.eigenphases[3] = 4.0;
    REQUIRE_THROWS_AS(s.validate(), ValidationError);

    s = small_spec();
    s.target_overlaps = {0.2, 0.45, 0.2, 0.15};  // source slot must hold alpha^2 = 1/4
    REQUIRE_THROWS_AS(s.validate(), ValidationError);

    s = small_spec();
    s.target_index = 4;
    REQUIRE_THROWS_AS(s.validate(), ValidationError);

    s = small_spec();
    s.dimension = 1;
    REQUIRE_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("spec JSON round trip and malformed JSON", "[spectrum]") {
    const auto s = small_spec();
    const nlohmann::json j = s;
    CHECK(j.at("source") == "uniform");
    const auto back = j.get<DiffusionSpec>();
    CHECK(back.dimension == s.dimension);
    CHECK(back.eigenphases == s.eigenphases);
    CHECK(back.target_overlaps == s.target_overlaps);
    CHECK(back.seed == s.seed);
    CHECK_FALSE(back.source_index.has_value());

    auto bad = j;
    bad.erase("eigenphases");
    REQUIRE_THROWS_AS(bad.get<DiffusionSpec>(), ValidationError);
    bad = j;
    bad["source"] = "random";
    REQUIRE_THROWS_AS(bad.get<DiffusionSpec>(), ValidationError);
}

TEST_CASE("built diffusion operator realizes the prescribed spectrum", "[spectrum]") {
    const auto spec = small_spec();
    const auto d = build_diffusion(spec);
    const Matrix& m = d.op.matrix();
    CHECK(unitarity_defect(m) < 1e-12);

    const Vector s = spec.source_state().amplitudes();
    CHECK((m * s - s).norm() < 1e-12);

    for (Eigen::Index l = 0; l < d.eig.phases.size(); ++l) {
        const Vector v = d.eig.vectors.col(l);
        CHECK((m * v - phase_factor(d.eig.phases(l)) * v).norm() < 1e-12);
        const double want = spec.target_overlaps[d.eig.spec_slot[static_cast<std::size_t>(l)]];
        CHECK_THAT(d.eig.weight(static_cast<std::size_t>(l)), WithinAbs(want, 1e-12));
    }
    CHECK_THAT(d.eig.theta_min(), WithinAbs(1.0, 1e-15));
    CHECK(std::abs(d.eig.phases(static_cast<Eigen::Index>(d.eig.source_slot))) < 1e-15);
}

TEST_CASE("construction is deterministic in the seed", "[spectrum]") {
    auto spec = small_spec();
    const auto a = build_diffusion(spec);
    const auto b = build_diffusion(spec);
    CHECK(a.op.matrix() == b.op.matrix());
    spec.seed = 12;
    const auto c = build_diffusion(spec);
    CHECK((a.op.matrix() - c.op.matrix()).norm() > 1e-6);
}

TEST_CASE("random specs over seeds build valid unitaries", "[spectrum][property]") {
    for (std::uint64_t seed = 0; seed < 24; ++seed) {
        const std::size_t n = std::size_t{4} << (seed % 3);
        const auto spec = random_spec(n, seed);
        REQUIRE_NOTHROW(spec.validate());
        const auto d = build_diffusion(spec);
        CHECK(unitarity_defect(d.op.matrix()) < 1e-10);
        const Vector t = spec.target_state().amplitudes();
        const Vector back = d.eig.vectors * d.eig.target_overlaps;
        CHECK((back - t).norm() < 1e-10);
    }
}

TEST_CASE("moments and A, B", "[spectrum]") {
    const auto g = build_diffusion(builtin_scenario("grover64").spec);
    CHECK_THAT(moments(g.eig, 1), WithinAbs(0.0, 1e-14));
    CHECK_THAT(moments(g.eig, 2), WithinAbs(0.0, 1e-14));
    const auto ab = ab_quantities(0.0, 0.0, pi);
    CHECK_THAT(ab.A, WithinAbs(0.0, 1e-15));
    CHECK_THAT(ab.B, WithinAbs(1.0, 1e-15));

    // Lambda_1 = -1 at phi = pi/2 cancels to A = 0.
    const auto rot = ab_quantities(-1.0, 3.0, pi / 2.0);
    CHECK_THAT(rot.A, WithinAbs(0.0, 1e-15));
    CHECK_THAT(rot.B, WithinAbs(2.0, 1e-15));

    REQUIRE_THROWS_AS(ab_quantities(0.0, 0.0, 0.0), ValidationError);
    REQUIRE_THROWS_AS(ab_quantities(0.0, -1.0, pi), ValidationError);
    REQUIRE_THROWS_AS(moments(g.eig, 3), ValidationError);

    const auto d = build_diffusion(small_spec());
    const double l1 = 0.4 * cot(0.5) + 0.2 * cot(-1.0) + 0.15 * cot(1.5);
    const double l2 = 0.4 * std::pow(cot(0.5), 2) + 0.2 * std::pow(cot(-1.0), 2) + 0.15 * std::pow(cot(1.5), 2);
    CHECK_THAT(moments(d.eig, 1), WithinAbs(l1, 1e-13));
    CHECK_THAT(moments(d.eig, 2), WithinAbs(l2, 1e-13));
}
