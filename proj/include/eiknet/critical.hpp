#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eiknet/hamiltonian.hpp"
#include "eiknet/level_graph.hpp"

namespace eiknet {

struct EmptyAubry : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CriticalData {
    double a0 = 0.0;
    std::vector<double> arc_floors;
    double c = 0.0;
    std::vector<std::pair<double, double>> bracket_history;
    std::optional<CycleWitness> zero_cycle;         // present when c > a0
    std::optional<NetworkPoint> degenerate_witness; // present when c == a0
};

namespace detail {

// Cheapest cycle through any single edge of the level graph: the edge weight
// plus the cheapest way back from its head to its tail.
inline std::optional<CycleWitness> min_cycle(const LevelGraph& g) {
    std::optional<CycleWitness> best;
    std::vector<LevelGraph::ShortestPaths> from(g.num_nodes());
    std::vector<char> have(g.num_nodes(), 0);
    for (const auto& e : g.edges()) {
        if (e.from == e.to) {
            auto w = g.make_witness({static_cast<int>(&e - g.edges().data())});
            if (!best || w.total < best->total) best = w;
            continue;
        }
        if (!have[e.to]) {
            from[e.to] = g.shortest_from({{e.to, 0.0}});
            have[e.to] = 1;
        }
        const auto& sp = from[e.to];
        if (!std::isfinite(sp.at(e.from))) continue;
        auto back = g.extract_path_edges(sp, e.from);
        std::vector<int> cyc = {static_cast<int>(&e - g.edges().data())};
        cyc.insert(cyc.end(), back.begin(), back.end());
        auto w = g.make_witness(cyc);
        if (!best || w.total < best->total) best = w;
    }
    return best;
}

} // namespace detail

// Maximal closed sub-intervals of one arc where the floor m reaches the level
// c up to the energy tolerance; these are the momentum-degenerate points.
inline std::vector<std::pair<double, double>> degenerate_set(const HamiltonianField& H, int arc, double c) {
    const Config& cfg = H.config();
    double theta = c - cfg.energy_tol * (1.0 + std::fabs(c));
    const auto& mg = H.floor_grid(arc);
    const int G = static_cast<int>(mg.size());
    auto m = [&](double s) { return H.floor_at({arc, false}, s); };

    // scan positions: the cached grid plus the refined floor argmax, whose
    // crest can top theta strictly between grid nodes
    std::vector<double> pos(G);
    std::vector<double> val(mg.begin(), mg.end());
    for (int k = 0; k < G; ++k) pos[k] = static_cast<double>(k) / (G - 1);
    double s_star = H.arc_floor_argmax(arc);
    auto where = std::lower_bound(pos.begin(), pos.end(), s_star);
    if (where == pos.end() || std::fabs(*where - s_star) > 1e-12) {
        auto at = where - pos.begin();
        pos.insert(where, s_star);
        val.insert(val.begin() + at, H.arc_floor(arc));
    }
    const int P = static_cast<int>(pos.size());

    // refine the crossing of m = theta inside a bracketing cell
    auto cross = [&](int k_below, int k_above) {
        double lo = pos[k_below], hi = pos[k_above];
        for (int it = 0; it < 100 && std::fabs(hi - lo) > cfg.root_tol; ++it) {
            double mid = 0.5 * (lo + hi);
            (m(mid) < theta ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    std::vector<std::pair<double, double>> out;
    int k = 0;
    while (k < P) {
        if (val[k] < theta) {
            ++k;
            continue;
        }
        int k2 = k;
        while (k2 + 1 < P && val[k2 + 1] >= theta) ++k2;
        double s1 = (k == 0) ? 0.0 : cross(k - 1, k);
        double s2 = (k2 == P - 1) ? 1.0 : cross(k2 + 1, k2);
        out.emplace_back(std::fmin(s1, s2), std::fmax(s1, s2));
        k = k2 + 1;
    }
    return out;
}

// Critical value by bisection on the negative-cycle predicate, starting at
// the floor a0 and doubling the bracket upward until cycles disappear.
inline CriticalData critical_value(const HamiltonianField& H) {
    const Config& cfg = H.config();
    CriticalData out;
    out.a0 = H.network_floor();
    for (int a = 0; a < H.network().num_arcs(); ++a) out.arc_floors.push_back(H.arc_floor(a));

    auto has_cycle = [&](double a) { return find_negative_cycle(H, a).has_value(); };

    if (!has_cycle(out.a0)) {
        out.c = out.a0;
        out.bracket_history.emplace_back(out.a0, out.a0);
    } else {
        double lo = out.a0, hi = out.a0 + 1.0;
        int doublings = 0;
        while (has_cycle(hi)) {
            lo = hi;
            hi = out.a0 + 2.0 * (hi - out.a0);
            if (++doublings > 60)
                throw BracketFailure("negative cycles persist at arbitrarily high levels");
        }
        out.bracket_history.emplace_back(lo, hi);
        while (hi - lo > cfg.critical_tol * (1.0 + std::fabs(hi))) {
            double mid = 0.5 * (lo + hi);
            (has_cycle(mid) ? lo : hi) = mid;
            out.bracket_history.emplace_back(lo, hi);
        }
        out.c = hi; // the side where subsolutions exist
    }

    // Lift the reported level by the least amount that leaves no cycle with
    // strictly negative cost. Bisection alone only guarantees cycles above
    // -cycle_tolerance, and even a tiny negative cycle would let walk-based
    // shortest paths undercut the true path infimum downstream.
    bool lifted = false;
    for (int i = 0; i < 32 && !lifted; ++i) {
        auto mc = detail::min_cycle(LevelGraph(H, out.c));
        if (!mc || mc->total >= 0.0) {
            lifted = true;
        } else {
            out.c += std::max(cfg.critical_tol * (1.0 + std::fabs(out.c)), -2.0 * mc->total);
            out.bracket_history.emplace_back(out.c, out.c);
        }
    }
    if (!lifted)
        throw BracketFailure("could not lift the level clear of negative cycles");

    // witness: a (numerically) zero-cost cycle, or a floor point when c = a0
    LevelGraph g(H, out.c);
    double tol = cfg.class_tol * (1.0 + std::fabs(out.c));
    auto cyc = detail::min_cycle(g);
    if (cyc && std::fabs(cyc->total) <= tol) {
        out.zero_cycle = cyc;
    } else if (std::fabs(out.c - out.a0) <= 100.0 * cfg.critical_tol * (1.0 + std::fabs(out.c))) {
        int arc = H.network_floor_arc();
        out.degenerate_witness = H.network().canonical_point(ArcRef{arc, false}, H.arc_floor_argmax(arc));
    } else {
        throw BracketFailure("no zero-cost cycle found although the critical value sits above the floor");
    }
    return out;
}

struct AubryItem {
    int vertex = -1; // >= 0 for a vertex item
    int arc = -1;    // else a closed parameter interval of this arc
    double s1 = 0.0, s2 = 0.0;
    bool from_cycle = false;
    bool is_vertex() const { return vertex >= 0; }
};

struct StaticClass {
    int id = 0;
    std::vector<AubryItem> items;
    NetworkPoint representative;
    bool from_cycle = false;
    bool from_degeneracy = false;
};

struct AubryStructure {
    double c = 0.0;
    double a0 = 0.0;
    std::vector<StaticClass> classes;
};

// The level-a uniqueness structure as plain items: arcs lying on
// (numerically) zero-cost cycles, plus momentum-degenerate intervals.
// Empty above the critical value; throws below it.
inline std::vector<AubryItem> level_uniqueness_items(const HamiltonianField& H, double a) {
    const Network& net = H.network();
    double tol = H.config().class_tol * (1.0 + std::fabs(a));

    LevelGraph g(H, a);
    if (g.negative_cycle())
        throw NegativeCycleDetected("negative cycle at level " + std::to_string(a));

    // (i) arcs on zero-cost cycles: edge weight plus cheapest return is ~0
    std::vector<char> cycle_arc(net.num_arcs(), 0);
    std::vector<LevelGraph::ShortestPaths> from(g.num_nodes());
    std::vector<char> have(g.num_nodes(), 0);
    for (const auto& e : g.edges()) {
        double back = 0.0;
        if (e.from != e.to) {
            if (!have[e.to]) {
                from[e.to] = g.shortest_from({{e.to, 0.0}});
                have[e.to] = 1;
            }
            back = from[e.to].at(e.from);
        }
        if (std::isfinite(back) && e.weight + back <= tol) cycle_arc[e.g.arc] = 1;
    }

    std::vector<AubryItem> items;
    for (int arc = 0; arc < net.num_arcs(); ++arc)
        if (cycle_arc[arc]) items.push_back({-1, arc, 0.0, 1.0, true});

    // (ii) momentum-degenerate intervals, skipping arcs already fully
    // present. Degeneracy at level a needs the arc floor to attain a: the
    // floor never exceeds a on an admissible arc, so only floors within
    // tolerance of a can touch it.
    double floor_tol = H.config().energy_tol * (1.0 + std::fabs(a));
    for (int arc = 0; arc < net.num_arcs(); ++arc) {
        if (cycle_arc[arc]) continue;
        if (std::fabs(H.arc_floor(arc) - a) > floor_tol) continue;
        for (auto [s1, s2] : degenerate_set(H, arc, a)) {
            if (s2 <= 0.0 || s1 >= 1.0) {
                // collapsed onto an endpoint: a vertex item
                int v = s2 <= 0.0 ? net.arc(arc).tail : net.arc(arc).head;
                items.push_back({v, -1, 0.0, 0.0, false});
            } else {
                items.push_back({-1, arc, s1, s2, false});
            }
        }
    }
    return items;
}

// The set of points incident to zero-cost closed curves at the critical
// level, together with the momentum-degenerate points, partitioned into
// static classes by the symmetric-cost relation.
inline AubryStructure aubry_set(const HamiltonianField& H, const CriticalData& crit) {
    const Network& net = H.network();
    const double c = crit.c;
    double tol = H.config().class_tol * (1.0 + std::fabs(c));

    std::vector<AubryItem> items = level_uniqueness_items(H, c);
    if (items.empty())
        throw EmptyAubry("no zero-cycle arc and no degenerate point found; this should be impossible");

    // representatives, then one split graph carrying all of them
    std::vector<NetworkPoint> reps;
    for (const auto& it : items) {
        if (it.is_vertex()) {
            reps.push_back(NetworkPoint::at_vertex(it.vertex));
        } else if (it.from_cycle) {
            reps.push_back(NetworkPoint::at_vertex(net.arc(it.arc).tail));
        } else {
            reps.push_back(net.canonical_point(ArcRef{it.arc, false}, 0.5 * (it.s1 + it.s2)));
        }
    }
    LevelGraph split(H, c, reps);
    std::vector<int> rep_node(reps.size());
    for (std::size_t i = 0; i < reps.size(); ++i) rep_node[i] = split.node_of(reps[i]);

    std::vector<LevelGraph::ShortestPaths> rsp(reps.size());
    for (std::size_t i = 0; i < reps.size(); ++i) rsp[i] = split.shortest_from({{rep_node[i], 0.0}});

    std::vector<int> parent(items.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (std::size_t i = 0; i < items.size(); ++i)
        for (std::size_t j = i + 1; j < items.size(); ++j) {
            double dij = rsp[i].at(rep_node[j]);
            double dji = rsp[j].at(rep_node[i]);
            if (std::isfinite(dij) && std::isfinite(dji) && dij + dji <= tol)
                parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
        }

    AubryStructure out;
    out.c = c;
    out.a0 = crit.a0;
    std::vector<int> class_of(items.size(), -1);
    for (std::size_t i = 0; i < items.size(); ++i) {
        int root = find(static_cast<int>(i));
        int cid = class_of[root];
        if (cid < 0) {
            cid = static_cast<int>(out.classes.size());
            class_of[root] = cid;
            StaticClass sc;
            sc.id = cid;
            sc.representative = reps[i];
            out.classes.push_back(sc);
        }
        out.classes[cid].items.push_back(items[i]);
        out.classes[cid].from_cycle |= items[i].from_cycle;
        out.classes[cid].from_degeneracy |= !items[i].from_cycle;
    }
    return out;
}

struct FloorDiagnostic {
    std::string arc;
    bool qualifying = false; // a_gamma = c = a0 within tolerance
    bool constant = true;    // floor spread within tolerance
    double spread = 0.0;
};

// Reports, for every arc whose floor attains the critical value at the
// network floor, whether the floor is constant along the arc.
inline std::vector<FloorDiagnostic> constant_floor_diagnostic(const HamiltonianField& H,
                                                              const CriticalData& crit) {
    const Network& net = H.network();
    double tol = H.config().energy_tol * (1.0 + std::fabs(crit.c));
    std::vector<FloorDiagnostic> out;
    for (int a = 0; a < net.num_arcs(); ++a) {
        FloorDiagnostic d;
        d.arc = net.arc(a).id;
        d.qualifying = std::fabs(crit.arc_floors[a] - crit.c) <= tol &&
                       std::fabs(crit.c - crit.a0) <= tol;
        const auto& mg = H.floor_grid(a);
        auto [mn, mx] = std::minmax_element(mg.begin(), mg.end());
        d.spread = *mx - *mn;
        d.constant = d.spread <= tol;
        out.push_back(d);
    }
    return out;
}

} // namespace eiknet
