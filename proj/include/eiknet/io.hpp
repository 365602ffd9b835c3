#pragma once

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "eiknet/critical.hpp"
#include "eiknet/hamiltonian.hpp"
#include "eiknet/hopflax.hpp"
#include "eiknet/level_graph.hpp"
#include "eiknet/network.hpp"

namespace eiknet {

using ordered_json = nlohmann::ordered_json;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace io_detail {

// Normalizes -0.0 so that serialized artifacts are sign-stable.
inline double clean(double x) { return x == 0.0 ? 0.0 : x; }

inline const ordered_json& need(const ordered_json& j, const char* key, const char* where) {
    auto it = j.find(key);
    if (it == j.end())
        throw InputError(std::string(where) + ": missing key \"" + key + "\"");
    return *it;
}

inline std::vector<double> number_list(const ordered_json& j, const char* where) {
    if (!j.is_array()) throw InputError(std::string(where) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw InputError(std::string(where) + ": expected numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

inline ordered_json number_array(const std::vector<double>& v) {
    ordered_json out = ordered_json::array();
    for (double x : v) out.push_back(clean(x));
    return out;
}

} // namespace io_detail

// ---- config ----

inline ordered_json config_to_json(const Config& c) {
    ordered_json j;
    j["grid"] = c.grid;
    j["panels"] = c.panels;
    j["root_tol"] = c.root_tol;
    j["critical_tol"] = c.critical_tol;
    j["energy_tol"] = c.energy_tol;
    j["check_tol"] = c.check_tol;
    j["solution_tol"] = c.solution_tol;
    j["cycle_tol_factor"] = c.cycle_tol_factor;
    j["class_tol"] = c.class_tol;
    j["coord_tol"] = c.coord_tol;
    j["enumeration_cap"] = c.enumeration_cap;
    j["seed"] = c.seed;
    return j;
}

// ---- coefficients and per-arc Hamiltonians ----

inline Coefficient coefficient_from_json(const ordered_json& j, const char* where) {
    if (j.is_number()) return Coefficient::constant(j.get<double>());
    if (!j.is_object()) throw InputError(std::string(where) + ": coefficient must be a number or an object");
    std::string kind = io_detail::need(j, "kind", where).get<std::string>();
    if (kind == "poly") return Coefficient::poly(io_detail::number_list(io_detail::need(j, "coeffs", where), where));
    if (kind == "samples")
        return Coefficient::samples(io_detail::number_list(io_detail::need(j, "values", where), where));
    throw InputError(std::string(where) + ": unknown coefficient kind \"" + kind + "\"");
}

inline ordered_json coefficient_to_json(const Coefficient& c) {
    ordered_json j;
    j["kind"] = c.is_poly() ? "poly" : "samples";
    j[c.is_poly() ? "coeffs" : "values"] = io_detail::number_array(c.data());
    return j;
}

inline ArcHamiltonian hamiltonian_from_json(const ordered_json& j, const std::string& arc_id) {
    std::string where = "arc " + arc_id + " hamiltonian";
    std::string family = io_detail::need(j, "family", where.c_str()).get<std::string>();
    if (family == "power") {
        PowerFamily f;
        f.p = io_detail::need(j, "p", where.c_str()).get<double>();
        f.b = coefficient_from_json(io_detail::need(j, "b", where.c_str()), where.c_str());
        f.V = coefficient_from_json(io_detail::need(j, "V", where.c_str()), where.c_str());
        return ArcHamiltonian(std::move(f));
    }
    if (family == "table") {
        TableFamily t;
        t.s_grid = io_detail::number_list(io_detail::need(j, "s_grid", where.c_str()), where.c_str());
        t.mu_grid = io_detail::number_list(io_detail::need(j, "mu_grid", where.c_str()), where.c_str());
        for (const auto& row : io_detail::need(j, "values", where.c_str()))
            t.values.push_back(io_detail::number_list(row, where.c_str()));
        return ArcHamiltonian(std::move(t));
    }
    throw InputError(where + ": unknown family \"" + family + "\"");
}

inline ordered_json hamiltonian_to_json(const ArcHamiltonian& h) {
    ordered_json j;
    if (h.is_power()) {
        const auto& f = h.power();
        j["family"] = "power";
        j["p"] = io_detail::clean(f.p);
        j["b"] = coefficient_to_json(f.b);
        j["V"] = coefficient_to_json(f.V);
    } else {
        const auto& t = h.table();
        j["family"] = "table";
        j["s_grid"] = io_detail::number_array(t.s_grid);
        j["mu_grid"] = io_detail::number_array(t.mu_grid);
        ordered_json rows = ordered_json::array();
        for (const auto& row : t.values) rows.push_back(io_detail::number_array(row));
        j["values"] = rows;
    }
    return j;
}

// ---- network instances ----

struct Instance {
    std::unique_ptr<Network> network;
    std::unique_ptr<HamiltonianField> field;
};

inline ArcGeometry geometry_from_json(const ordered_json& j, const Vec& from, const Vec& to,
                                      const std::string& arc_id) {
    std::string where = "arc " + arc_id + " geometry";
    std::string kind = io_detail::need(j, "kind", where.c_str()).get<std::string>();
    if (kind == "segment") return ArcGeometry(SegmentGeometry{from, to});
    if (kind == "samples") {
        SampleGeometry sg;
        for (const auto& p : io_detail::need(j, "points", where.c_str()))
            sg.points.push_back(io_detail::number_list(p, where.c_str()));
        return ArcGeometry(std::move(sg));
    }
    if (kind == "circular_arc") {
        CircularArcGeometry cg;
        cg.center = io_detail::number_list(io_detail::need(j, "center", where.c_str()), where.c_str());
        cg.radius = io_detail::need(j, "radius", where.c_str()).get<double>();
        auto th = io_detail::number_list(io_detail::need(j, "theta", where.c_str()), where.c_str());
        if (th.size() != 2) throw InputError(where + ": theta must be [theta0, theta1]");
        cg.theta0 = th[0];
        cg.theta1 = th[1];
        return ArcGeometry(std::move(cg));
    }
    throw InputError(where + ": unknown kind \"" + kind + "\"");
}

inline ordered_json geometry_to_json(const ArcGeometry& g) {
    ordered_json j;
    if (const auto* cir = std::get_if<CircularArcGeometry>(&g.rep())) {
        j["kind"] = "circular_arc";
        j["center"] = io_detail::number_array(cir->center);
        j["radius"] = io_detail::clean(cir->radius);
        j["theta"] = io_detail::number_array({cir->theta0, cir->theta1});
    } else if (const auto* sg = std::get_if<SampleGeometry>(&g.rep())) {
        j["kind"] = "samples";
        ordered_json pts = ordered_json::array();
        for (const auto& p : sg->points) pts.push_back(io_detail::number_array(p));
        j["points"] = pts;
    } else {
        j["kind"] = "segment";
    }
    return j;
}

inline Instance load_instance(const ordered_json& doc, Config cfg = {}) {
    std::vector<Vertex> vertices;
    for (const auto& vj : io_detail::need(doc, "vertices", "instance")) {
        Vertex v;
        v.id = io_detail::need(vj, "id", "vertex").get<std::string>();
        v.coords = io_detail::number_list(io_detail::need(vj, "coords", "vertex"), "vertex coords");
        vertices.push_back(std::move(v));
    }
    auto vertex_pos = [&](const std::string& id) {
        for (std::size_t i = 0; i < vertices.size(); ++i)
            if (vertices[i].id == id) return static_cast<int>(i);
        throw InputError("arc references unknown vertex \"" + id + "\"");
    };

    std::vector<Arc> arcs;
    std::vector<ArcHamiltonian> fields;
    for (const auto& aj : io_detail::need(doc, "arcs", "instance")) {
        Arc a;
        a.id = io_detail::need(aj, "id", "arc").get<std::string>();
        a.tail = vertex_pos(io_detail::need(aj, "from", ("arc " + a.id).c_str()).get<std::string>());
        a.head = vertex_pos(io_detail::need(aj, "to", ("arc " + a.id).c_str()).get<std::string>());
        a.geometry = geometry_from_json(io_detail::need(aj, "geometry", ("arc " + a.id).c_str()),
                                        vertices[a.tail].coords, vertices[a.head].coords, a.id);
        fields.push_back(
            hamiltonian_from_json(io_detail::need(aj, "hamiltonian", ("arc " + a.id).c_str()), a.id));
        arcs.push_back(std::move(a));
    }

    Instance inst;
    inst.network = std::make_unique<Network>(std::move(vertices), std::move(arcs), cfg);
    inst.field = std::make_unique<HamiltonianField>(*inst.network, std::move(fields), cfg);
    return inst;
}

inline ordered_json instance_to_json(const HamiltonianField& H) {
    const Network& net = H.network();
    ordered_json j;
    j["vertices"] = ordered_json::array();
    for (const auto& v : net.vertices()) {
        ordered_json vj;
        vj["id"] = v.id;
        vj["coords"] = io_detail::number_array(v.coords);
        j["vertices"].push_back(vj);
    }
    j["arcs"] = ordered_json::array();
    for (int a = 0; a < net.num_arcs(); ++a) {
        const Arc& arc = net.arc(a);
        ordered_json aj;
        aj["id"] = arc.id;
        aj["from"] = net.vertex(arc.tail).id;
        aj["to"] = net.vertex(arc.head).id;
        aj["geometry"] = geometry_to_json(arc.geometry);
        aj["hamiltonian"] = hamiltonian_to_json(H.arc_hamiltonian(a));
        j["arcs"].push_back(aj);
    }
    return j;
}

// ---- network points, traces, fields ----

inline ordered_json point_to_json(const Network& net, const NetworkPoint& p) {
    ordered_json j;
    if (p.is_vertex()) {
        j["vertex"] = net.vertex(p.vertex).id;
    } else {
        j["arc"] = net.arc(p.arc).id;
        j["s"] = io_detail::clean(p.s);
    }
    return j;
}

inline NetworkPoint point_from_json(const Network& net, const ordered_json& j) {
    if (j.contains("vertex")) return NetworkPoint::at_vertex(net.vertex_index(j["vertex"].get<std::string>()));
    if (j.contains("arc"))
        return net.canonical_point(j["arc"].get<std::string>(),
                                   io_detail::need(j, "s", "point").get<double>());
    throw InputError("point: expected {\"vertex\": id} or {\"arc\": id, \"s\": value}");
}

// Accepts "vertexId" or "arcId:s" on the command line.
inline NetworkPoint point_from_string(const Network& net, const std::string& text) {
    auto colon = text.rfind(':');
    if (colon == std::string::npos) return NetworkPoint::at_vertex(net.vertex_index(text));
    double s = 0.0;
    try {
        s = std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
        throw InputError("point \"" + text + "\": expected vertexId or arcId:s");
    }
    return net.canonical_point(text.substr(0, colon), s);
}

inline Trace trace_from_json(const Network& net, const ordered_json& doc) {
    Trace t;
    if (doc.contains("points"))
        for (const auto& pj : doc["points"]) {
            TracePoint tp;
            tp.at = point_from_json(net, io_detail::need(pj, "at", "trace point"));
            tp.value = io_detail::need(pj, "value", "trace point").get<double>();
            t.points.push_back(tp);
        }
    if (doc.contains("intervals"))
        for (const auto& ij : doc["intervals"]) {
            TraceInterval iv;
            iv.arc = net.arc_index(io_detail::need(ij, "arc", "trace interval").get<std::string>());
            auto span = io_detail::number_list(io_detail::need(ij, "s", "trace interval"), "trace interval");
            if (span.size() != 2 || span[0] > span[1])
                throw InputError("trace interval: \"s\" must be [s1, s2] with s1 <= s2");
            iv.s1 = span[0];
            iv.s2 = span[1];
            iv.values = io_detail::number_list(io_detail::need(ij, "values", "trace interval"), "trace interval");
            if (iv.values.empty()) throw InputError("trace interval: \"values\" must be nonempty");
            t.intervals.push_back(iv);
        }
    return t;
}

inline ordered_json trace_to_json(const Network& net, const Trace& t) {
    ordered_json j;
    j["points"] = ordered_json::array();
    for (const auto& tp : t.points) {
        ordered_json pj;
        pj["at"] = point_to_json(net, tp.at);
        pj["value"] = io_detail::clean(tp.value);
        j["points"].push_back(pj);
    }
    j["intervals"] = ordered_json::array();
    for (const auto& iv : t.intervals) {
        ordered_json ij;
        ij["arc"] = net.arc(iv.arc).id;
        ij["s"] = io_detail::number_array({iv.s1, iv.s2});
        ij["values"] = io_detail::number_array(iv.values);
        j["intervals"].push_back(ij);
    }
    return j;
}

inline ordered_json field_to_json(const Network& net, const FieldOnNetwork& u) {
    ordered_json j;
    j["arcs"] = ordered_json::array();
    for (int a = 0; a < net.num_arcs(); ++a) {
        ordered_json aj;
        aj["arc"] = net.arc(a).id;
        std::vector<double> sg(u.grid);
        for (int k = 0; k < u.grid; ++k) sg[k] = static_cast<double>(k) / (u.grid - 1);
        aj["s_grid"] = io_detail::number_array(sg);
        aj["values"] = io_detail::number_array(u.arc_values[a]);
        j["arcs"].push_back(aj);
    }
    j["vertices"] = ordered_json();
    for (int v = 0; v < net.num_vertices(); ++v)
        j["vertices"][net.vertex(v).id] = io_detail::clean(u.vertex_values[v]);
    return j;
}

inline FieldOnNetwork field_from_json(const Network& net, const ordered_json& doc) {
    FieldOnNetwork u;
    u.arc_values.resize(net.num_arcs());
    for (const auto& aj : io_detail::need(doc, "arcs", "field")) {
        int a = net.arc_index(io_detail::need(aj, "arc", "field arc").get<std::string>());
        u.arc_values[a] = io_detail::number_list(io_detail::need(aj, "values", "field arc"), "field values");
        if (u.arc_values[a].size() < 2) throw InputError("field: arc needs at least two samples");
        if (aj.contains("s_grid")) {
            auto sg = io_detail::number_list(aj["s_grid"], "field s_grid");
            if (sg.size() != u.arc_values[a].size())
                throw InputError("field: s_grid and values disagree in length");
            for (std::size_t k = 0; k < sg.size(); ++k)
                if (std::fabs(sg[k] - static_cast<double>(k) / (sg.size() - 1)) > 1e-9)
                    throw InputError("field: s_grid must be the uniform parameter grid");
        }
    }
    for (const auto& row : u.arc_values) {
        if (row.empty()) throw InputError("field: some arc has no samples");
        if (row.size() != u.arc_values.front().size())
            throw InputError("field: all arcs must share one grid size");
    }
    u.grid = static_cast<int>(u.arc_values.front().size());
    u.vertex_values.assign(net.num_vertices(), 0.0);
    const auto& vj = io_detail::need(doc, "vertices", "field");
    for (int v = 0; v < net.num_vertices(); ++v) {
        const std::string& id = net.vertex(v).id;
        if (!vj.contains(id)) throw InputError("field: missing vertex value for \"" + id + "\"");
        u.vertex_values[v] = vj[id].get<double>();
    }
    return u;
}

// ---- analysis artifacts ----

inline ordered_json legs_to_json(const std::vector<PathLeg>& legs, double total) {
    ordered_json j;
    j["cost"] = io_detail::clean(total);
    j["legs"] = ordered_json::array();
    for (const auto& leg : legs) {
        ordered_json lj;
        lj["arc"] = leg.arc;
        lj["dir"] = leg.reversed ? "rev" : "fwd";
        lj["s"] = io_detail::number_array({leg.s1, leg.s2});
        lj["cost"] = io_detail::clean(leg.cost);
        j["legs"].push_back(lj);
    }
    return j;
}

inline ordered_json certificate_to_json(const Network&, const PathCertificate& cert) {
    return legs_to_json(cert.legs, cert.total);
}

inline ordered_json cycle_to_json(const Network&, const CycleWitness& cyc) {
    return legs_to_json(cyc.legs, cyc.total);
}

inline ordered_json critical_to_json(const Network& net, const CriticalData& cd) {
    ordered_json j;
    j["c"] = io_detail::clean(cd.c);
    j["a0"] = io_detail::clean(cd.a0);
    j["arc_floors"] = ordered_json();
    for (int a = 0; a < net.num_arcs(); ++a)
        j["arc_floors"][net.arc(a).id] = io_detail::clean(cd.arc_floors[a]);
    ordered_json hist = ordered_json::array();
    for (auto [lo, hi] : cd.bracket_history) hist.push_back(io_detail::number_array({lo, hi}));
    j["bracket_history"] = hist;
    if (cd.zero_cycle) {
        j["witness"] = ordered_json{{"type", "cycle"}};
        j["witness"]["cycle"] = cycle_to_json(net, *cd.zero_cycle);
    } else if (cd.degenerate_witness) {
        j["witness"] = ordered_json{{"type", "degenerate_point"}};
        j["witness"]["at"] = point_to_json(net, *cd.degenerate_witness);
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

inline ordered_json aubry_to_json(const Network& net, const AubryStructure& au) {
    ordered_json j;
    j["c"] = io_detail::clean(au.c);
    j["a0"] = io_detail::clean(au.a0);
    j["classes"] = ordered_json::array();
    for (const auto& sc : au.classes) {
        ordered_json cj;
        cj["id"] = sc.id;
        cj["items"] = ordered_json::array();
        for (const auto& it : sc.items) {
            ordered_json ij;
            if (it.is_vertex()) {
                ij["vertex"] = net.vertex(it.vertex).id;
            } else {
                ij["arc"] = net.arc(it.arc).id;
                ij["interval"] = io_detail::number_array({it.s1, it.s2});
            }
            cj["items"].push_back(ij);
        }
        cj["origin"] = sc.from_cycle ? "cycle" : "degenerate";
        j["classes"].push_back(cj);
    }
    return j;
}

// ---- file plumbing ----

inline ordered_json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open \"" + path + "\"");
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("cannot parse \"" + path + "\": " + e.what());
    }
    return j;
}

inline Instance load_instance_file(const std::string& path, Config cfg = {}) {
    return load_instance(read_json_file(path), cfg);
}

inline std::string dump_json(const ordered_json& j) { return j.dump(2) + "\n"; }

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write \"" + path + "\"");
    out << text;
}

inline std::string field_to_csv(const Network& net, const FieldOnNetwork& u) {
    std::ostringstream out;
    out.precision(17);
    out << "arc,s,value\n";
    for (int a = 0; a < net.num_arcs(); ++a)
        for (int k = 0; k < u.grid; ++k) {
            double s = static_cast<double>(k) / (u.grid - 1);
            out << net.arc(a).id << ',' << io_detail::clean(s) << ','
                << io_detail::clean(u.arc_values[a][k]) << '\n';
        }
    return out.str();
}

} // namespace eiknet
