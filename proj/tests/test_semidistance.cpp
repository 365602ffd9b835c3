#include <catch2/catch_amalgamated.hpp>

#include "support/instances.hpp"

#include <cmath>

using namespace eiknet;
using testsupport::Built;

namespace {

double leg_sum(const PathCertificate& cert) {
    double t = 0.0;
    for (const auto& leg : cert.legs) t += leg.cost;
    return t;
}

} // namespace

TEST_CASE("segment semidistance is the drift-free line distance") {
    Built s = testsupport::segment_abs();
    const HamiltonianField& H = *s.field;
    NetworkPoint v0 = NetworkPoint::at_vertex(0);
    NetworkPoint v1 = NetworkPoint::at_vertex(1);

    auto r = semidistance(H, 1.0, v0, v1);
    REQUIRE(r.value == Catch::Approx(1.0).margin(1e-10));
    REQUIRE(r.path.legs.size() == 1);
    REQUIRE(r.path.legs[0].arc == "e0");
    REQUIRE_FALSE(r.path.legs[0].reversed);
    REQUIRE(leg_sum(r.path) == Catch::Approx(r.value).margin(1e-12));

    REQUIRE(semidistance(H, 1.0, v0, NetworkPoint::interior(0, 0.7)).value ==
            Catch::Approx(0.7).margin(1e-10));
    REQUIRE(semidistance(H, 1.0, NetworkPoint::interior(0, 0.3), v0).value ==
            Catch::Approx(0.3).margin(1e-10));

    // identical endpoints cost nothing
    auto same = semidistance(H, 1.0, v0, v0);
    REQUIRE(same.value == 0.0);
    REQUIRE(same.path.legs.empty());
}

TEST_CASE("well semidistance integrates the critical support function") {
    Built w = testsupport::parabolic_well();
    const HamiltonianField& H = *w.field;
    NetworkPoint v0 = NetworkPoint::at_vertex(0);
    NetworkPoint v1 = NetworkPoint::at_vertex(1);
    NetworkPoint mid = NetworkPoint::interior(0, 0.5);

    REQUIRE(semidistance(H, 0.0, v0, v1).value == Catch::Approx(0.25).margin(1e-10));
    REQUIRE(semidistance(H, 0.0, v1, v0).value == Catch::Approx(0.25).margin(1e-10));
    REQUIRE(semidistance(H, 0.0, v0, mid).value == Catch::Approx(0.125).margin(1e-10));
    REQUIRE(semidistance(H, 0.0, mid, v0).value == Catch::Approx(0.125).margin(1e-10));
}

TEST_CASE("theta semidistances see the zero-cost cycle") {
    Built t = testsupport::load_named("theta");
    const HamiltonianField& H = *t.field;
    double c = critical_value(H).c;
    REQUIRE(c == Catch::Approx(0.16).margin(5e-8));

    NetworkPoint L = NetworkPoint::at_vertex(t.net->vertex_index("L"));
    NetworkPoint R = NetworkPoint::at_vertex(t.net->vertex_index("R"));

    // both directions around the cycle are free at the critical level
    REQUIRE(semidistance(H, c, L, R).value == Catch::Approx(0.0).margin(1e-7));
    REQUIRE(semidistance(H, c, R, L).value == Catch::Approx(0.0).margin(1e-7));

    // entering the drift-free chord costs sqrt(c) per unit parameter
    NetworkPoint q = t.net->canonical_point("mid", 0.25);
    auto r = semidistance(H, c, L, q);
    REQUIRE(r.value == Catch::Approx(0.1).margin(1e-7));
    REQUIRE(r.path.legs.size() == 1);
    REQUIRE(r.path.legs[0].arc == "mid");
    REQUIRE(r.path.legs[0].s2 == Catch::Approx(0.25).margin(1e-12));
}

TEST_CASE("certificates concatenate into their reported value") {
    Built t = testsupport::load_named("triangle");
    const HamiltonianField& H = *t.field;
    double c = critical_value(H).c;

    NetworkPoint x = t.net->canonical_point("ab", 0.3);
    NetworkPoint y = t.net->canonical_point("ca", 0.6);
    auto r = semidistance(H, c + 0.4, x, y);
    REQUIRE(leg_sum(r.path) == Catch::Approx(r.value).margin(1e-10));
    REQUIRE_FALSE(r.path.legs.empty());

    // each leg's cost is the sub-arc integral it claims
    for (const auto& leg : r.path.legs) {
        ArcRef g{t.net->arc_index(leg.arc), leg.reversed};
        auto cst = H.arc_cost(g, c + 0.4, leg.s1, leg.s2);
        REQUIRE(cst.has_value());
        REQUIRE(*cst == Catch::Approx(leg.cost).margin(1e-10));
    }
}

TEST_CASE("negative cycles below the critical level are detected") {
    Built l = testsupport::loop_drift();
    const HamiltonianField& H = *l.field;
    NetworkPoint w = NetworkPoint::at_vertex(0);
    NetworkPoint q = NetworkPoint::interior(0, 0.5);

    REQUIRE_THROWS_AS(semidistance(H, 1.5, w, q), NegativeCycleDetected);
    REQUIRE_THROWS_AS(semidistance(H, 1.5, q, w), NegativeCycleDetected);
    REQUIRE_NOTHROW(semidistance(H, 2.0, w, q));

    auto witness = find_negative_cycle(H, 1.5);
    REQUIRE(witness.has_value());
    REQUIRE(witness->total < 0.0);
    REQUIRE_FALSE(find_negative_cycle(H, 2.0).has_value());
}

TEST_CASE("levels below the floor leave points unreachable") {
    Built w = testsupport::parabolic_well();
    const HamiltonianField& H = *w.field;
    NetworkPoint v0 = NetworkPoint::at_vertex(0);
    NetworkPoint v1 = NetworkPoint::at_vertex(1);

    // the well's peak floor blocks any crossing at a = -0.05
    REQUIRE_THROWS_AS(semidistance(H, -0.05, v0, v1), NoAdmissiblePath);
    // but a short hop near the end is still admissible
    REQUIRE_NOTHROW(semidistance(H, -0.05, v0, NetworkPoint::interior(0, 0.05)));
}

TEST_CASE("shortest paths agree with exhaustive enumeration") {
    for (const char* name : {"segment", "parabolic_well", "loop", "triangle", "theta"}) {
        Built b = testsupport::load_named(name);
        const HamiltonianField& H = *b.field;
        double c = critical_value(H).c;
        Rng rng(23);
        for (double a : {c, c + 0.7}) {
            for (int i = 0; i < 6; ++i) {
                NetworkPoint x = testsupport::random_point(*b.net, rng);
                NetworkPoint y = testsupport::random_point(*b.net, rng);
                INFO(name << " a=" << a);
                double fast = semidistance(H, a, x, y).value;
                double slow = brute_force_semidistance(H, a, x, y);
                REQUIRE(fast == Catch::Approx(slow).margin(1e-9));
            }
        }
    }
}

TEST_CASE("triangle inequality and nonnegative round trips") {
    Rng rng(29);
    for (int inst = 0; inst < 6; ++inst) {
        Built b = testsupport::random_instance(rng);
        const HamiltonianField& H = *b.field;
        double c = critical_value(H).c;
        for (double a : {c, c + 0.5}) {
            for (int i = 0; i < 4; ++i) {
                NetworkPoint x = testsupport::random_point(*b.net, rng);
                NetworkPoint y = testsupport::random_point(*b.net, rng);
                NetworkPoint z = testsupport::random_point(*b.net, rng);
                auto d = semidistance_table(H, a, {x, y, z});
                REQUIRE(d[0][2] <= d[0][1] + d[1][2] + 1e-8);
                REQUIRE(d[0][1] + d[1][0] >= -1e-8);
                if (i == 0) // the shared table measures the same quantity
                    REQUIRE(d[0][1] == Catch::Approx(semidistance(H, a, x, y).value).margin(1e-6));
            }
        }
    }
}

TEST_CASE("semidistances obey the Lipschitz bound") {
    Built seg = testsupport::segment_abs();
    double L = lipschitz_bound(*seg.field, 2.0);
    REQUIRE(L == Catch::Approx(2.0).margin(1e-9));

    Rng rng(31);
    for (int inst = 0; inst < 4; ++inst) {
        Built b = testsupport::random_instance(rng);
        const HamiltonianField& H = *b.field;
        double a = critical_value(H).c + 0.3;
        double bound = lipschitz_bound(H, a);
        for (int i = 0; i < 4; ++i) {
            NetworkPoint x = testsupport::random_point(*b.net, rng);
            NetworkPoint y = testsupport::random_point(*b.net, rng);
            double s = semidistance(H, a, y, x).value;
            double d = b.net->geodesic_distance(x, y);
            REQUIRE(std::fabs(s) <= bound * d + 1e-8);
        }
    }
}

TEST_CASE("the Lipschitz bound needs every support value") {
    Built w = testsupport::parabolic_well();
    REQUIRE_THROWS_AS(lipschitz_bound(*w.field, -0.05), UndefinedSigma);
}
