#include <catch2/catch_amalgamated.hpp>

#include "support/instances.hpp"

#include <cmath>
#include <string>

using namespace eiknet;
using testsupport::Built;

TEST_CASE("named instances round-trip through their JSON form") {
    for (const char* name : {"segment", "parabolic_well", "loop", "triangle", "theta"}) {
        Built b = testsupport::load_named(name);
        ordered_json once = instance_to_json(*b.field);
        Instance inst = load_instance(once);
        ordered_json twice = instance_to_json(*inst.field);
        INFO(name);
        REQUIRE(dump_json(once) == dump_json(twice));
    }
}

TEST_CASE("instance parsing validates its input") {
    ordered_json good = instance_to_json(*testsupport::load_named("segment").field);

    ordered_json j = good;
    j.erase("vertices");
    REQUIRE_THROWS_AS(load_instance(j), InputError);

    j = good;
    j["arcs"][0]["from"] = "ghost";
    REQUIRE_THROWS_AS(load_instance(j), InputError);

    j = good;
    j["arcs"][0]["geometry"]["kind"] = "spiral";
    REQUIRE_THROWS_AS(load_instance(j), InputError);

    j = good;
    j["arcs"][0]["hamiltonian"]["family"] = "mystery";
    REQUIRE_THROWS_AS(load_instance(j), InputError);

    j = good;
    j["arcs"][0]["hamiltonian"] = ordered_json{{"family", "poly"}}; // a coefficient kind, not a family
    REQUIRE_THROWS_AS(load_instance(j), InputError);
}

TEST_CASE("coefficients accept constants, polynomials, and samples") {
    ordered_json j = instance_to_json(*testsupport::load_named("segment").field);
    j["arcs"][0]["hamiltonian"]["b"] = 0.75; // bare number = constant
    Instance c1 = load_instance(j);
    REQUIRE(c1.field->arc_hamiltonian(0).power().b(0.3) == Catch::Approx(0.75));

    j["arcs"][0]["hamiltonian"]["b"] = ordered_json{{"kind", "poly"}, {"coeffs", {0.1, 1.0}}};
    Instance c2 = load_instance(j);
    REQUIRE(c2.field->arc_hamiltonian(0).power().b(0.5) == Catch::Approx(0.6));

    j["arcs"][0]["hamiltonian"]["b"] = ordered_json{{"kind", "samples"}, {"values", {0.0, 1.0, 0.0}}};
    Instance c3 = load_instance(j);
    REQUIRE(c3.field->arc_hamiltonian(0).power().b(0.25) == Catch::Approx(0.5));

    j["arcs"][0]["hamiltonian"]["b"] = ordered_json{{"kind", "fourier"}, {"coeffs", {0.1}}};
    REQUIRE_THROWS_AS(load_instance(j), InputError);
}

TEST_CASE("trace serialization round-trips") {
    Built w = testsupport::parabolic_well();

    ordered_json doc = read_json_file(testsupport::instance_path("well_trace"));
    Trace t = trace_from_json(*w.net, doc);
    REQUIRE(t.points.size() == 1);
    REQUIRE(t.intervals.empty());
    REQUIRE(t.points[0].at.s == Catch::Approx(0.5));
    REQUIRE(t.points[0].value == 0.0);

    Trace full = t;
    TraceInterval iv;
    iv.arc = 0;
    iv.s1 = 0.25;
    iv.s2 = 0.75;
    iv.values = {0.1, 0.2, 0.3};
    full.intervals.push_back(iv);
    full.points.push_back({NetworkPoint::at_vertex(1), -0.5});

    ordered_json out = trace_to_json(*w.net, full);
    Trace back = trace_from_json(*w.net, out);
    REQUIRE(back.points.size() == 2);
    REQUIRE(back.intervals.size() == 1);
    REQUIRE(back.intervals[0].values == full.intervals[0].values);
    REQUIRE(dump_json(trace_to_json(*w.net, back)) == dump_json(out));

    ordered_json badiv = out;
    badiv["intervals"][0]["s"] = {0.75, 0.25};
    REQUIRE_THROWS_AS(trace_from_json(*w.net, badiv), InputError);
    badiv["intervals"][0]["s"] = {0.25};
    REQUIRE_THROWS_AS(trace_from_json(*w.net, badiv), InputError);
}

TEST_CASE("points parse from JSON and command-line text") {
    Built t = testsupport::load_named("theta");
    const Network& net = *t.net;

    NetworkPoint v = point_from_json(net, ordered_json{{"vertex", "L"}});
    REQUIRE(v.is_vertex());
    REQUIRE(v.vertex == net.vertex_index("L"));

    NetworkPoint p = point_from_json(net, ordered_json{{"arc", "mid"}, {"s", 0.25}});
    REQUIRE(p.arc == net.arc_index("mid"));
    REQUIRE(p.s == Catch::Approx(0.25));
    REQUIRE(dump_json(point_to_json(net, p)) ==
            dump_json(ordered_json{{"arc", "mid"}, {"s", 0.25}}));

    REQUIRE_THROWS_AS(point_from_json(net, ordered_json{{"level", 1.0}}), InputError);

    REQUIRE(point_from_string(net, "R").vertex == net.vertex_index("R"));
    NetworkPoint q = point_from_string(net, "mid:0.75");
    REQUIRE(q.arc == net.arc_index("mid"));
    REQUIRE(q.s == Catch::Approx(0.75));
    REQUIRE_THROWS_AS(point_from_string(net, "mid:zebra"), InputError);
    REQUIRE_THROWS_AS(point_from_string(net, "ghost"), UnknownVertex);
}

TEST_CASE("fields round-trip and export to CSV") {
    Built w = testsupport::parabolic_well();
    const HamiltonianField& H = *w.field;
    CriticalData crit = critical_value(H);
    Trace tr;
    tr.points.push_back({NetworkPoint::interior(0, 0.5), 0.0});
    FieldOnNetwork u = solve(H, crit, tr);

    ordered_json j = field_to_json(*w.net, u);
    FieldOnNetwork back = field_from_json(*w.net, j);
    REQUIRE(back.grid == u.grid);
    REQUIRE(u.max_difference(back) == 0.0);

    // malformed variants
    ordered_json bad = j;
    bad["arcs"][0]["values"].erase(0);
    REQUIRE_THROWS_AS(field_from_json(*w.net, bad), InputError);
    bad = j;
    bad["vertices"].erase("v0");
    REQUIRE_THROWS_AS(field_from_json(*w.net, bad), InputError);

    std::string csv = field_to_csv(*w.net, u);
    REQUIRE(csv.rfind("arc,s,value\n", 0) == 0);
    std::size_t rows = std::count(csv.begin(), csv.end(), '\n');
    REQUIRE(rows == static_cast<std::size_t>(u.grid) + 1); // header + one arc
    REQUIRE(csv.find("e0,") != std::string::npos);
}

TEST_CASE("critical artifacts carry their witnesses") {
    Built l = testsupport::load_named("loop");
    CriticalData lc = critical_value(*l.field);
    ordered_json lj = critical_to_json(*l.net, lc);
    REQUIRE(lj["c"].get<double>() == Catch::Approx(2.0).margin(1e-8));
    REQUIRE(lj["witness"]["type"] == "cycle");
    REQUIRE(lj["witness"]["cycle"]["legs"].size() >= 1);
    REQUIRE(lj["witness"]["cycle"]["legs"][0]["dir"] == "rev");
    REQUIRE(lj["arc_floors"].contains("l"));
    REQUIRE(lj["bracket_history"].is_array());

    Built w = testsupport::load_named("parabolic_well");
    CriticalData wc = critical_value(*w.field);
    ordered_json wj = critical_to_json(*w.net, wc);
    REQUIRE(wj["witness"]["type"] == "degenerate_point");
    REQUIRE(wj["witness"]["at"]["arc"] == "e0");
    double a0 = wj["a0"].get<double>();
    REQUIRE(a0 == 0.0);
    REQUIRE_FALSE(std::signbit(a0)); // negative zero is normalized away
}

TEST_CASE("aubry artifacts follow the class schema") {
    Built t = testsupport::load_named("theta");
    CriticalData crit = critical_value(*t.field);
    AubryStructure au = aubry_set(*t.field, crit);
    ordered_json j = aubry_to_json(*t.net, au);

    REQUIRE(j.contains("c"));
    REQUIRE(j.contains("a0"));
    REQUIRE(j["classes"].is_array());
    REQUIRE(j["classes"].size() == 1);
    const auto& cls = j["classes"][0];
    REQUIRE(cls["id"].get<int>() == 0);
    REQUIRE(cls["origin"] == "cycle");
    bool saw_interval = false;
    for (const auto& item : cls["items"]) {
        if (item.contains("vertex")) continue;
        REQUIRE(item.contains("arc"));
        REQUIRE(item["interval"].size() == 2);
        saw_interval = true;
    }
    REQUIRE(saw_interval);

    Built w = testsupport::load_named("parabolic_well");
    CriticalData wc = critical_value(*w.field);
    ordered_json wj = aubry_to_json(*w.net, aubry_set(*w.field, wc));
    REQUIRE(wj["classes"][0]["origin"] == "degenerate");
}

TEST_CASE("semidistance certificates serialize their legs") {
    Built t = testsupport::load_named("theta");
    const HamiltonianField& H = *t.field;
    double c = critical_value(H).c;
    NetworkPoint L = NetworkPoint::at_vertex(t.net->vertex_index("L"));
    NetworkPoint q = t.net->canonical_point("mid", 0.25);
    auto r = semidistance(H, c, L, q);

    ordered_json j = certificate_to_json(*t.net, r.path);
    REQUIRE(j["cost"].get<double>() == Catch::Approx(0.1).margin(1e-7));
    REQUIRE(j["legs"].size() == 1);
    REQUIRE(j["legs"][0]["arc"] == "mid");
    REQUIRE(j["legs"][0]["dir"] == "fwd");
    REQUIRE(j["legs"][0]["s"][0].get<double>() == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(j["legs"][0]["s"][1].get<double>() == Catch::Approx(0.25).margin(1e-12));
}

TEST_CASE("artifact dumps are deterministic across runs") {
    auto render = [](const char* name) {
        Built b = testsupport::load_named(name);
        CriticalData crit = critical_value(*b.field);
        AubryStructure au = aubry_set(*b.field, crit);
        return dump_json(critical_to_json(*b.net, crit)) + dump_json(aubry_to_json(*b.net, au));
    };
    for (const char* name : {"loop", "parabolic_well", "theta"}) {
        INFO(name);
        REQUIRE(render(name) == render(name));
    }
}

TEST_CASE("config echo carries every knob") {
    Config cfg;
    cfg.grid = 129;
    cfg.seed = 7;
    ordered_json j = config_to_json(cfg);
    REQUIRE(j["grid"].get<int>() == 129);
    REQUIRE(j["panels"].get<int>() == cfg.panels);
    REQUIRE(j["seed"].get<std::uint64_t>() == 7);
    for (const char* key : {"root_tol", "critical_tol", "energy_tol", "check_tol", "solution_tol",
                            "cycle_tol_factor", "class_tol", "coord_tol", "enumeration_cap"})
        REQUIRE(j.contains(key));
}

TEST_CASE("json dumps are newline-terminated and indented") {
    ordered_json j;
    j["alpha"] = 1;
    std::string s = dump_json(j);
    REQUIRE(s.back() == '\n');
    REQUIRE(s.rfind("{\n  \"alpha\": 1\n}\n") == 0);
}
