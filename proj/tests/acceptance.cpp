#include <catch2/catch_amalgamated.hpp>

#include "support/instances.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

using namespace eiknet;
using testsupport::Built;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Trace point_trace(const NetworkPoint& p, double value) {
    Trace t;
    t.points.push_back({p, value});
    return t;
}

// solution from admissible data pinned on the whole Aubry set
FieldOnNetwork aubry_solution(const HamiltonianField& H, const CriticalData& crit,
                              const AubryStructure& au, double base_value) {
    Trace seedling;
    for (const auto& sc : au.classes) seedling.points.push_back({sc.representative, base_value});
    FieldOnNetwork env = hopf_lax_envelope(H, crit.c, seedling);
    return solve(H, crit, restrict_to_aubry(H.network(), env, au));
}

bool class_covers_arc(const StaticClass& sc, int arc) {
    for (const auto& it : sc.items)
        if (!it.is_vertex() && it.arc == arc && it.s1 <= 1e-12 && it.s2 >= 1.0 - 1e-12) return true;
    return false;
}

} // namespace

TEST_CASE("acceptance 1: loop critical value and static class") {
    auto t0 = Clock::now();
    Built l = testsupport::load_named("loop");
    CriticalData crit = critical_value(*l.field);
    REQUIRE(crit.c == Catch::Approx(2.0).margin(1e-8));

    AubryStructure au = aubry_set(*l.field, crit);
    REQUIRE(au.classes.size() == 1);
    REQUIRE(class_covers_arc(au.classes[0], 0));
    REQUIRE(au.classes[0].from_cycle);

    double dt = seconds_since(t0);
    REQUIRE(dt < 1.0);
    std::printf("[acceptance 1] PASS  loop: c = %.10f (target 2 within 1e-8), one class covering the "
                "full loop, %.2f s\n",
                crit.c, dt);
}

TEST_CASE("acceptance 2: parabolic well solve against the closed form") {
    auto t0 = Clock::now();
    Built w = testsupport::load_named("parabolic_well");
    const HamiltonianField& H = *w.field;

    CriticalData crit = critical_value(H);
    REQUIRE(crit.c == Catch::Approx(0.0).margin(1e-8));
    REQUIRE(crit.a0 == Catch::Approx(0.0).margin(1e-8));

    AubryStructure au = aubry_set(H, crit);
    REQUIRE(au.classes.size() == 1);
    REQUIRE(au.classes[0].items.size() == 1);
    const AubryItem& item = au.classes[0].items[0];
    REQUIRE_FALSE(item.is_vertex());
    REQUIRE(item.s1 <= 0.5);
    REQUIRE(item.s2 >= 0.5);
    REQUIRE(item.s2 - item.s1 <= 2.0 / 256.0); // interval within two grid steps

    // the qualifying arc has a genuinely non-constant floor
    auto diag = constant_floor_diagnostic(H, crit);
    REQUIRE(diag.size() == 1);
    REQUIRE(diag[0].qualifying);
    REQUIRE_FALSE(diag[0].constant);

    Trace tr = trace_from_json(*w.net, read_json_file(testsupport::instance_path("well_trace")));
    FieldOnNetwork u = solve(H, crit, tr);
    double err = 0.0;
    for (int k = 0; k < u.grid; ++k) {
        double s = static_cast<double>(k) / (u.grid - 1);
        err = std::fmax(err, std::fabs(u.arc_values[0][k] - 0.5 * (s - 0.5) * (s - 0.5)));
    }
    REQUIRE(err <= 1e-6);

    double dt = seconds_since(t0);
    REQUIRE(dt < 2.0);
    std::printf("[acceptance 2] PASS  well: c = %.2e = a0, interval width %.2e, non-constant floor "
                "flagged, solve sup-error %.2e (budget 1e-6), %.2f s\n",
                crit.c, item.s2 - item.s1, err, dt);
}

TEST_CASE("acceptance 3: semidistance agrees with exhaustive enumeration") {
    auto t0 = Clock::now();
    Rng rng(20240816);
    const int instances = 200;
    int pairs_checked = 0;
    double worst = 0.0;

    for (int i = 0; i < instances; ++i) {
        Built b = testsupport::random_instance(rng);
        const HamiltonianField& H = *b.field;
        CriticalData crit = critical_value(H);
        for (double a : {crit.c, crit.c + 1.0}) {
            for (int p = 0; p < 3; ++p) {
                NetworkPoint x = testsupport::random_point(*b.net, rng);
                NetworkPoint y = testsupport::random_point(*b.net, rng);
                INFO("instance " << i << " level " << a);
                double fast = semidistance(H, a, y, x).value;
                double slow = brute_force_semidistance(H, a, y, x);
                double diff = std::fabs(fast - slow);
                worst = std::fmax(worst, diff);
                REQUIRE(diff <= 1e-9);
                ++pairs_checked;
            }
        }
    }

    double dt = seconds_since(t0);
    REQUIRE(dt < 60.0);
    std::printf("[acceptance 3] PASS  %d random instances, %d oracle pairs, worst gap %.2e "
                "(budget 1e-9), %.1f s\n",
                instances, pairs_checked, worst, dt);
}

TEST_CASE("acceptance 4: structural invariants on random instances") {
    Rng rng(424242);
    int triangle_checks = 0, roundtrip_checks = 0, lipschitz_checks = 0;
    int compat_checks = 0, monotone_checks = 0, weight_checks = 0;

    for (int i = 0; i < 40; ++i) {
        Built b = testsupport::random_instance(rng);
        const HamiltonianField& H = *b.field;
        CriticalData crit = critical_value(H);
        INFO("instance " << i);

        for (double a : {crit.c, crit.c + 0.5}) {
            // triangle inequality and nonnegative round trips, all legs read
            // off one shared level graph
            for (int t = 0; t < 3; ++t) {
                NetworkPoint x = testsupport::random_point(*b.net, rng);
                NetworkPoint y = testsupport::random_point(*b.net, rng);
                NetworkPoint z = testsupport::random_point(*b.net, rng);
                auto d = semidistance_table(H, a, {x, y, z});
                REQUIRE(d[0][2] <= d[0][1] + d[1][2] + 1e-8);
                REQUIRE(d[0][1] + d[1][0] >= -1e-8);
                ++triangle_checks;
                ++roundtrip_checks;
            }
        }

        // Lipschitz bound against the induced path metric
        double al = crit.c + 0.25;
        double L = lipschitz_bound(H, al);
        for (int t = 0; t < 2; ++t) {
            NetworkPoint x = testsupport::random_point(*b.net, rng);
            NetworkPoint y = testsupport::random_point(*b.net, rng);
            double s = semidistance_table(H, al, {y, x})[0][1];
            double d = b.net->geodesic_distance(x, y);
            REQUIRE(std::fabs(s) <= L * d * (1.0 + 1e-6) + 1e-8);
            ++lipschitz_checks;
        }

        for (int t = 0; t < 5; ++t) {
            int arc = rng.pick(b.net->num_arcs());
            ArcRef g{arc, rng.pick(2) == 1};
            double s = rng.range(0, 1);
            double a1 = H.arc_floor(arc) + rng.range(0.05, 0.6);
            double a2 = a1 + rng.range(0.05, 0.8);

            // the two support functions are one reversal apart
            auto sm = H.support_minus(g, a1, s);
            auto sp_rev = H.support_plus(g.reverse(), a1, 1.0 - s);
            if (sm && sp_rev) {
                REQUIRE(std::fabs(*sm + *sp_rev) <= 1e-10);
                ++compat_checks;
            }

            // sigma^+ grows with the level, sigma^- shrinks
            auto p1 = H.support_plus(g, a1, s), p2 = H.support_plus(g, a2, s);
            if (p1 && p2) {
                REQUIRE(*p1 <= *p2 + 1e-12);
                ++monotone_checks;
            }

            // hence sub-arc traversal costs grow with the level
            auto c1 = H.arc_cost(g, a1, 0.2, 0.9), c2 = H.arc_cost(g, a2, 0.2, 0.9);
            if (c1 && c2) {
                REQUIRE(*c1 <= *c2 + 1e-10);
                ++weight_checks;
            }
        }
    }

    std::printf("[acceptance 4] PASS  invariants: %d triangle, %d round-trip, %d Lipschitz, "
                "%d compatibility, %d monotonicity, %d edge-weight checks, zero violations\n",
                triangle_checks, roundtrip_checks, lipschitz_checks, compat_checks, monotone_checks,
                weight_checks);
}

TEST_CASE("acceptance 5: comparison principle harness") {
    double worst = std::numeric_limits<double>::infinity();
    int total_trials = 0;

    for (const char* name : {"parabolic_well", "loop", "theta"}) {
        Built b = testsupport::load_named(name);
        CriticalData crit = critical_value(*b.field);
        AubryStructure au = aubry_set(*b.field, crit);
        for (bool extra_vertex : {false, true}) {
            ComparisonReport rep =
                comparison_harness(*b.field, crit, au, 100, b.field->config().seed + extra_vertex,
                                   extra_vertex);
            INFO(name << " extra_vertex=" << extra_vertex);
            REQUIRE(rep.violations == 0);
            REQUIRE(rep.trials >= 200); // critical plus supercritical rounds
            worst = std::fmin(worst, rep.worst_margin);
            total_trials += rep.trials;
        }
    }

    REQUIRE(worst >= -1e-6);
    std::printf("[acceptance 5] PASS  comparison: %d trials across trace variants and supercritical "
                "levels, worst margin %.2e (floor -1e-6), zero violations\n",
                total_trials, worst);
}

TEST_CASE("acceptance 6: solutions are fixed points of the solve") {
    double worst_dev = 0.0;
    int fields_checked = 0;

    for (const char* name : {"segment", "parabolic_well", "loop", "triangle", "theta"}) {
        Built b = testsupport::load_named(name);
        const HamiltonianField& H = *b.field;
        CriticalData crit = critical_value(H);
        AubryStructure au = aubry_set(H, crit);
        FieldOnNetwork u = aubry_solution(H, crit, au, 0.4);

        FixedPointReport rep = check_fixed_point(H, crit, au, u);
        INFO(name);
        REQUIRE(rep.passes);
        REQUIRE(rep.deviation <= 1e-6 * (1.0 + u.sup_norm()));
        worst_dev = std::fmax(worst_dev, rep.deviation / (1.0 + u.sup_norm()));
        ++fields_checked;
    }

    // flattened fields are subsolutions but not solutions
    int rejected = 0;
    for (const char* name : {"parabolic_well", "theta"}) {
        Built b = testsupport::load_named(name);
        const HamiltonianField& H = *b.field;
        CriticalData crit = critical_value(H);
        AubryStructure au = aubry_set(H, crit);
        FieldOnNetwork u = aubry_solution(H, crit, au, 0.0);

        double lo = -u.sup_norm(), hi = u.sup_norm();
        for (int a = 0; a < static_cast<int>(u.arc_values.size()); ++a)
            for (double v : u.arc_values[a]) {
                lo = std::fmin(lo, v);
                hi = std::fmax(hi, v);
            }
        double cap = lo + 0.75 * (hi - lo);
        FieldOnNetwork flat = u.transformed([&](double x) { return std::fmin(x, cap); });
        REQUIRE(flat.max_difference(u) > 1e-3); // the cap actually bites

        FixedPointReport rep = check_fixed_point(H, crit, au, flat);
        INFO(name);
        REQUIRE_FALSE(rep.passes);
        ++rejected;
    }

    std::printf("[acceptance 6] PASS  fixed point: %d solutions reproduced (worst relative deviation "
                "%.2e, budget 1e-6), %d flattened impostors rejected\n",
                fields_checked, worst_dev, rejected);
}

TEST_CASE("acceptance 7: no solutions away from the critical level") {
    int failed_levels = 0;

    for (const char* name : {"segment", "parabolic_well", "loop", "triangle", "theta"}) {
        Built b = testsupport::load_named(name);
        const HamiltonianField& H = *b.field;
        CriticalData crit = critical_value(H);
        AubryStructure au = aubry_set(H, crit);
        FieldOnNetwork u = aubry_solution(H, crit, au, 0.0);

        INFO(name);
        // sanity: the critical level itself accepts the solution
        REQUIRE(check_fixed_point_at_level(H, crit.c, u).passes);

        for (double a : {crit.c - 0.1, crit.c + 0.1}) {
            FixedPointReport rep = check_fixed_point_at_level(H, a, u);
            INFO(name << " at level " << a << ": " << rep.reason);
            REQUIRE_FALSE(rep.passes);
            REQUIRE_FALSE(rep.reason.empty());
            ++failed_levels;
        }
    }

    std::printf("[acceptance 7] PASS  level scan: %d off-critical levels rejected across 5 instances "
                "(c-0.1 and c+0.1 each)\n",
                failed_levels);
}

TEST_CASE("acceptance 8: doubling the resolution halves the error") {
    // the closed-form benchmark from acceptance 2, at two resolutions
    auto well_error = [](int grid, int panels) {
        Config cfg;
        cfg.grid = grid;
        cfg.panels = panels;
        Built w = testsupport::load_named("parabolic_well", cfg);
        CriticalData crit = critical_value(*w.field);
        FieldOnNetwork u =
            solve(*w.field, crit, point_trace(NetworkPoint::interior(0, 0.5), 0.0));
        double err = 0.0;
        for (int k = 0; k < u.grid; ++k) {
            double s = static_cast<double>(k) / (u.grid - 1);
            err = std::fmax(err, std::fabs(u.arc_values[0][k] - 0.5 * (s - 0.5) * (s - 0.5)));
        }
        return err;
    };

    double e_coarse = well_error(257, 256);
    double e_fine = well_error(513, 512);
    // the convergence floor sits many orders below the 1e-6 acceptance budget
    REQUIRE(e_coarse <= 1e-6);
    REQUIRE(e_fine <= std::fmax(0.5 * e_coarse, 5e-14));

    // companion with a genuinely resolution-limited integrand: sampled
    // piecewise-linear potential, solved against its closed-form integral
    auto plateau_error = [](int grid, int panels) {
        Config cfg;
        cfg.grid = grid;
        cfg.panels = panels;
        Built p = testsupport::plateau_ramp(cfg);
        CriticalData crit = critical_value(*p.field);
        FieldOnNetwork u =
            solve(*p.field, crit, point_trace(NetworkPoint::interior(0, 0.5), 0.0));

        auto vk = [](int k) { // sampled potential at joint k/32
            double s = static_cast<double>(k) / 32.0;
            if (s < 0.3) return 0.2 * (0.3 - s) / 0.3;
            if (s > 0.7) return 0.2 * (s - 0.7) / 0.3;
            return 0.0;
        };
        auto sqrt_piece = [&](int k, double t1, double t2) {
            // integral of sqrt(V) over [t1,t2] within joint piece [k/32,(k+1)/32]
            double v1 = vk(k), v2 = vk(k + 1), w = 1.0 / 32.0;
            double a1 = v1 + (v2 - v1) * (t1 * 32.0 - k);
            double a2 = v1 + (v2 - v1) * (t2 * 32.0 - k);
            if (std::fabs(v2 - v1) < 1e-30) return std::sqrt(v1) * (t2 - t1);
            return (2.0 / 3.0) * w / (v2 - v1) * (std::pow(a2, 1.5) - std::pow(a1, 1.5));
        };
        auto accum = [&](double s) { // integral of sqrt(V) between 0.5 and s
            double lo = std::fmin(s, 0.5), hi = std::fmax(s, 0.5), total = 0.0;
            for (int k = 0; k < 32; ++k) {
                double p1 = std::fmax(lo, k / 32.0), p2 = std::fmin(hi, (k + 1) / 32.0);
                if (p1 < p2) total += sqrt_piece(k, p1, p2);
            }
            return total;
        };

        double err = 0.0;
        for (int k = 0; k < u.grid; ++k) {
            double s = static_cast<double>(k) / (u.grid - 1);
            double ref = 0.3 * (s - 0.5) + accum(s);
            err = std::fmax(err, std::fabs(u.arc_values[0][k] - ref));
        }
        return err;
    };

    double p_coarse = plateau_error(257, 256);
    double p_fine = plateau_error(513, 512);
    REQUIRE(p_coarse > 1e-13); // genuinely above the floating-point floor
    REQUIRE(p_fine <= 0.6 * p_coarse);

    std::printf("[acceptance 8] PASS  refinement: well error %.2e -> %.2e, sampled-potential error "
                "%.2e -> %.2e (ratio %.2f, halving required)\n",
                e_coarse, e_fine, p_coarse, p_fine, p_fine / std::fmax(p_coarse, 1e-300));
}
