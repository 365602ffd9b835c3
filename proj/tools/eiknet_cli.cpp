#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eiknet/eiknet.hpp"

namespace {

using eiknet::ordered_json;

struct Options {
    std::string network;
    std::string output;
    std::string format = "json";
    eiknet::Config cfg;
};

void emit(const Options& opt, const std::string& text) {
    if (opt.output.empty())
        std::fputs(text.c_str(), stdout);
    else
        eiknet::write_text_file(opt.output, text);
}

ordered_json artifact(const Options& opt) {
    ordered_json j;
    j["config"] = eiknet::config_to_json(opt.cfg);
    return j;
}

int run_validate(const Options& opt) {
    auto inst = eiknet::load_instance_file(opt.network, opt.cfg);
    auto report = inst.field->validate();
    ordered_json j = artifact(opt);
    j["network"] = ordered_json{{"vertices", inst.network->num_vertices()},
                                {"arcs", inst.network->num_arcs()}};
    bool all_ok = true;
    ordered_json arcs = ordered_json::array();
    for (const auto& av : report.arcs) {
        ordered_json aj;
        aj["arc"] = av.arc;
        aj["ok"] = av.ok();
        aj["failures"] = av.failures;
        aj["warnings"] = av.warnings;
        arcs.push_back(aj);
        all_ok = all_ok && av.ok();
    }
    j["validation"] = ordered_json{{"ok", all_ok}, {"arcs", arcs}};
    emit(opt, eiknet::dump_json(j));
    return all_ok ? 0 : 1;
}

int run_critical(const Options& opt) {
    auto inst = eiknet::load_instance_file(opt.network, opt.cfg);
    auto cd = eiknet::critical_value(*inst.field);
    ordered_json j = artifact(opt);
    j["critical"] = eiknet::critical_to_json(*inst.network, cd);
    emit(opt, eiknet::dump_json(j));
    return 0;
}

int run_aubry(const Options& opt) {
    auto inst = eiknet::load_instance_file(opt.network, opt.cfg);
    auto cd = eiknet::critical_value(*inst.field);
    auto au = eiknet::aubry_set(*inst.field, cd);
    ordered_json j = artifact(opt);
    j["critical"] = eiknet::critical_to_json(*inst.network, cd);
    j["aubry"] = eiknet::aubry_to_json(*inst.network, au);
    emit(opt, eiknet::dump_json(j));
    return 0;
}

int run_distance(const Options& opt, const std::string& from, const std::string& to,
                 std::optional<double> level) {
    auto inst = eiknet::load_instance_file(opt.network, opt.cfg);
    double a = level ? *level : eiknet::critical_value(*inst.field).c;
    auto y = eiknet::point_from_string(*inst.network, from);
    auto x = eiknet::point_from_string(*inst.network, to);
    ordered_json j = artifact(opt);
    j["level"] = a;
    j["from"] = eiknet::point_to_json(*inst.network, y);
    j["to"] = eiknet::point_to_json(*inst.network, x);
    try {
        auto sd = eiknet::semidistance(*inst.field, a, y, x);
        j["value"] = sd.value == 0.0 ? 0.0 : sd.value;
        j["certificate"] = eiknet::certificate_to_json(*inst.network, sd.path);
    } catch (const eiknet::NegativeCycleDetected& e) {
        j["error"] = e.what();
        emit(opt, eiknet::dump_json(j));
        return 1;
    } catch (const eiknet::NoAdmissiblePath& e) {
        j["error"] = e.what();
        emit(opt, eiknet::dump_json(j));
        return 1;
    }
    emit(opt, eiknet::dump_json(j));
    return 0;
}

int run_solve(const Options& opt, const std::string& trace_path, const std::string& on) {
    auto inst = eiknet::load_instance_file(opt.network, opt.cfg);
    auto cd = eiknet::critical_value(*inst.field);
    auto trace = eiknet::trace_from_json(*inst.network, eiknet::read_json_file(trace_path));

    eiknet::FieldOnNetwork u;
    if (on == "aubry") {
        // project the data through the envelope, restrict to the Aubry set,
        // then solve from that restriction
        auto au = eiknet::aubry_set(*inst.field, cd);
        auto env = eiknet::hopf_lax_envelope(*inst.field, cd.c, trace);
        u = eiknet::solve(*inst.field, cd, eiknet::restrict_to_aubry(*inst.network, env, au));
    } else {
        u = eiknet::solve(*inst.field, cd, trace);
    }

    if (opt.format == "csv") {
        emit(opt, eiknet::field_to_csv(*inst.network, u));
    } else {
        ordered_json j = artifact(opt);
        j["level"] = cd.c == 0.0 ? 0.0 : cd.c;
        j["field"] = eiknet::field_to_json(*inst.network, u);
        emit(opt, eiknet::dump_json(j));
    }
    return 0;
}

int run_verify(const Options& opt, const std::string& field_path, std::optional<double> level) {
    auto inst = eiknet::load_instance_file(opt.network, opt.cfg);
    auto doc = eiknet::read_json_file(field_path);
    if (doc.contains("field")) doc = doc["field"]; // accept a solve artifact directly
    auto u = eiknet::field_from_json(*inst.network, doc);
    auto cd = eiknet::critical_value(*inst.field);
    double a = level ? *level : cd.c;

    auto sub = eiknet::check_subsolution(*inst.field, u, a);
    eiknet::FixedPointReport fp;
    if (level) {
        fp = eiknet::check_fixed_point_at_level(*inst.field, a, u);
    } else {
        auto au = eiknet::aubry_set(*inst.field, cd);
        fp = eiknet::check_fixed_point(*inst.field, cd, au, u);
    }

    ordered_json j = artifact(opt);
    j["level"] = a == 0.0 ? 0.0 : a;
    j["subsolution"] = ordered_json{{"pass", sub.passes},
                                    {"worst_excess", sub.worst_excess},
                                    {"worst_where", sub.worst_where}};
    j["fixed_point"] = ordered_json{{"pass", fp.passes},
                                    {"deviation", fp.deviation},
                                    {"reason", fp.reason}};
    emit(opt, eiknet::dump_json(j));
    return (sub.passes && fp.passes) ? 0 : 1;
}

int run_harness(const Options& opt, int trials) {
    auto inst = eiknet::load_instance_file(opt.network, opt.cfg);
    auto cd = eiknet::critical_value(*inst.field);
    auto au = eiknet::aubry_set(*inst.field, cd);
    ordered_json j = artifact(opt);
    int status = 0;
    try {
        auto plain = eiknet::comparison_harness(*inst.field, cd, au, trials, opt.cfg.seed, false);
        auto extra = eiknet::comparison_harness(*inst.field, cd, au, trials, opt.cfg.seed + 1, true);
        j["comparison"] = ordered_json{{"trials", plain.trials + extra.trials},
                                       {"violations", plain.violations + extra.violations},
                                       {"worst_margin", std::min(plain.worst_margin, extra.worst_margin)}};
    } catch (const eiknet::ComparisonViolation& e) {
        j["comparison"] = ordered_json{{"violation", e.what()}};
        status = 1;
    }
    emit(opt, eiknet::dump_json(j));
    return status;
}

int run_oracle(const Options& opt, int pairs) {
    auto inst = eiknet::load_instance_file(opt.network, opt.cfg);
    const auto& net = *inst.network;
    auto cd = eiknet::critical_value(*inst.field);
    eiknet::Rng rng(opt.cfg.seed);

    auto random_point = [&]() {
        if (rng.pick(2) == 0) return eiknet::NetworkPoint::at_vertex(rng.pick(net.num_vertices()));
        return net.canonical_point(eiknet::ArcRef{rng.pick(net.num_arcs()), false},
                                   0.125 * (1 + rng.pick(7)));
    };

    double worst = 0.0;
    int checked = 0;
    ordered_json mismatches = ordered_json::array();
    for (double a : {cd.c, cd.c + 1.0}) {
        for (int t = 0; t < pairs; ++t) {
            auto y = random_point();
            auto x = random_point();
            double fast, slow;
            try {
                fast = eiknet::semidistance(*inst.field, a, y, x).value;
                slow = eiknet::brute_force_semidistance(*inst.field, a, y, x);
            } catch (const eiknet::NegativeCycleDetected&) {
                continue;
            } catch (const eiknet::NoAdmissiblePath&) {
                continue;
            } catch (const eiknet::ExplosionGuard&) {
                continue;
            }
            ++checked;
            double diff = std::fabs(fast - slow);
            worst = std::fmax(worst, diff);
            if (diff > 1e-9) {
                ordered_json m;
                m["level"] = a;
                m["from"] = eiknet::point_to_json(net, y);
                m["to"] = eiknet::point_to_json(net, x);
                m["graph"] = fast;
                m["enumeration"] = slow;
                mismatches.push_back(m);
            }
        }
    }
    ordered_json j = artifact(opt);
    j["oracle"] = ordered_json{{"pairs_checked", checked},
                               {"worst_difference", worst},
                               {"mismatches", mismatches}};
    emit(opt, eiknet::dump_json(j));
    return mismatches.empty() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Eikonal Hamilton-Jacobi analysis on embedded networks"};
    app.require_subcommand(1);

    Options opt;
    app.add_option("--network", opt.network, "instance JSON file")->required();
    app.add_option("--grid", opt.cfg.grid, "samples per arc (odd, >= 33)");
    app.add_option("--panels", opt.cfg.panels, "Simpson panels per arc");
    double tol = 0.0;
    auto* tol_opt = app.add_option("--tol", tol, "check and solution agreement tolerance");
    app.add_option("--output", opt.output, "write the artifact here instead of stdout");
    app.add_option("--format", opt.format, "json or csv (csv applies to solve)")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--seed", opt.cfg.seed, "RNG seed for randomized runs");

    auto* validate = app.add_subcommand("validate", "structural and field checks on the instance");
    auto* critical = app.add_subcommand("critical", "critical value with bracket history and witness");
    auto* aubry = app.add_subcommand("aubry", "Aubry set partitioned into static classes");

    auto* distance = app.add_subcommand("distance", "one-way minimal cost between two points");
    std::string from, to;
    std::optional<double> level;
    distance->add_option("--from", from, "source point: vertexId or arcId:s")->required();
    distance->add_option("--to", to, "target point: vertexId or arcId:s")->required();
    double level_value = 0.0;
    auto* level_opt = distance->add_option("--level", level_value, "energy level (default: critical)");

    auto* solve = app.add_subcommand("solve", "Hopf-Lax solution from a trace file");
    std::string trace_path, solve_on = "trace-domain";
    solve->add_option("--trace", trace_path, "trace JSON file")->required();
    solve->add_option("--on", solve_on, "trace-domain (as given) or aubry (project first)")
        ->check(CLI::IsMember({"trace-domain", "aubry"}));

    auto* verify = app.add_subcommand("verify", "subsolution and fixed-point checks on a field file");
    std::string field_path;
    verify->add_option("--field", field_path, "field JSON file")->required();
    double verify_level_value = 0.0;
    auto* verify_level_opt =
        verify->add_option("--level", verify_level_value, "energy level (default: critical)");

    auto* harness = app.add_subcommand("harness", "comparison-principle property run");
    int trials = 20;
    harness->add_option("--trials", trials, "trials per harness variant")->check(CLI::PositiveNumber);

    auto* oracle = app.add_subcommand("oracle", "graph vs enumeration differential test");
    int pairs = 32;
    oracle->add_option("--pairs", pairs, "point pairs per level")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    if (*tol_opt) {
        opt.cfg.check_tol = tol;
        opt.cfg.solution_tol = tol;
    }

    try {
        opt.cfg.validate();
        if (*level_opt) level = level_value;
        if (validate->parsed()) return run_validate(opt);
        if (critical->parsed()) return run_critical(opt);
        if (aubry->parsed()) return run_aubry(opt);
        if (distance->parsed()) return run_distance(opt, from, to, level);
        if (solve->parsed()) return run_solve(opt, trace_path, solve_on);
        if (verify->parsed())
            return run_verify(opt, field_path,
                              *verify_level_opt ? std::optional<double>(verify_level_value)
                                                : std::nullopt);
        if (harness->parsed()) return run_harness(opt, trials);
        if (oracle->parsed()) return run_oracle(opt, pairs);
    } catch (const eiknet::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const eiknet::NetworkError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
