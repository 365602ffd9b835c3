#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eiknet/critical.hpp"
#include "eiknet/hamiltonian.hpp"
#include "eiknet/level_graph.hpp"
#include "eiknet/network.hpp"
#include "eiknet/rng.hpp"

namespace eiknet {

struct InadmissibleTrace : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ComparisonViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TracePoint {
    NetworkPoint at;
    double value = 0.0;
};

// Values sampled uniformly over the parameter interval [s1,s2] of one arc.
struct TraceInterval {
    int arc = -1;
    double s1 = 0.0, s2 = 1.0;
    std::vector<double> values;

    double value_at(double s) const {
        if (values.size() == 1 || s2 <= s1) return values.front();
        double t = std::clamp((s - s1) / (s2 - s1), 0.0, 1.0) * (values.size() - 1);
        auto k = std::min<std::size_t>(static_cast<std::size_t>(t), values.size() - 2);
        return (1.0 - (t - k)) * values[k] + (t - k) * values[k + 1];
    }
};

// Boundary data g on a closed set: listed points plus sampled arc intervals.
struct Trace {
    std::vector<TracePoint> points;
    std::vector<TraceInterval> intervals;

    bool empty() const { return points.empty() && intervals.empty(); }

    // Flatten to point constraints: interval values are imposed at the grid
    // nodes they cover plus the interval endpoints.
    std::vector<TracePoint> expand(const Network& net, int grid) const {
        std::vector<TracePoint> out = points;
        for (const auto& iv : intervals) {
            auto add = [&](double s) {
                out.push_back({net.canonical_point(ArcRef{iv.arc, false}, s), iv.value_at(s)});
            };
            add(iv.s1);
            for (int k = 0; k < grid; ++k) {
                double s = static_cast<double>(k) / (grid - 1);
                if (s > iv.s1 + 1e-12 && s < iv.s2 - 1e-12) add(s);
            }
            if (iv.s2 > iv.s1) add(iv.s2);
        }
        // drop duplicate canonical points, keeping the first listed value
        std::vector<TracePoint> dedup;
        for (const auto& tp : out) {
            bool seen = false;
            for (const auto& q : dedup)
                if (q.at == tp.at) seen = true;
            if (!seen) dedup.push_back(tp);
        }
        return dedup;
    }
};

// A continuous function on the network: per-arc samples on the uniform grid
// in preferred orientation, plus one value per vertex. Arc endpoint samples
// always equal the incident vertex values.
struct FieldOnNetwork {
    int grid = 0;
    std::vector<std::vector<double>> arc_values;
    std::vector<double> vertex_values;

    double at(const NetworkPoint& p) const {
        if (p.is_vertex()) return vertex_values[p.vertex];
        const auto& vals = arc_values[p.arc];
        double t = p.s * (grid - 1);
        auto k = std::min<std::size_t>(static_cast<std::size_t>(t), vals.size() - 2);
        return (1.0 - (t - k)) * vals[k] + (t - k) * vals[k + 1];
    }

    double sup_norm() const {
        double m = 0.0;
        for (const auto& row : arc_values)
            for (double v : row) m = std::fmax(m, std::fabs(v));
        for (double v : vertex_values) m = std::fmax(m, std::fabs(v));
        return m;
    }

    double max_difference(const FieldOnNetwork& other) const {
        double m = 0.0;
        for (std::size_t i = 0; i < arc_values.size(); ++i)
            for (std::size_t k = 0; k < arc_values[i].size(); ++k)
                m = std::fmax(m, std::fabs(arc_values[i][k] - other.arc_values[i][k]));
        for (std::size_t v = 0; v < vertex_values.size(); ++v)
            m = std::fmax(m, std::fabs(vertex_values[v] - other.vertex_values[v]));
        return m;
    }

    template <class F>
    static FieldOnNetwork sampled(const Network& net, int grid, F&& f) {
        FieldOnNetwork out;
        out.grid = grid;
        out.vertex_values.resize(net.num_vertices());
        for (int v = 0; v < net.num_vertices(); ++v)
            out.vertex_values[v] = f(NetworkPoint::at_vertex(v));
        out.arc_values.resize(net.num_arcs());
        for (int a = 0; a < net.num_arcs(); ++a) {
            out.arc_values[a].resize(grid);
            for (int k = 0; k < grid; ++k) {
                double s = static_cast<double>(k) / (grid - 1);
                out.arc_values[a][k] = f(net.canonical_point(ArcRef{a, false}, s));
            }
        }
        return out;
    }

    template <class F>
    FieldOnNetwork transformed(F&& f) const {
        FieldOnNetwork out = *this;
        for (auto& row : out.arc_values)
            for (double& v : row) v = f(v);
        for (double& v : out.vertex_values) v = f(v);
        return out;
    }

    static FieldOnNetwork pointwise_min(const FieldOnNetwork& a, const FieldOnNetwork& b) {
        FieldOnNetwork out = a;
        for (std::size_t i = 0; i < out.arc_values.size(); ++i)
            for (std::size_t k = 0; k < out.arc_values[i].size(); ++k)
                out.arc_values[i][k] = std::fmin(out.arc_values[i][k], b.arc_values[i][k]);
        for (std::size_t v = 0; v < out.vertex_values.size(); ++v)
            out.vertex_values[v] = std::fmin(out.vertex_values[v], b.vertex_values[v]);
        return out;
    }
};

struct AdmissibilityReport {
    bool admissible = true;
    double worst_violation = 0.0; // max over pairs of g(x) - g(y) - S(y,x)
    std::string worst_pair;
};

namespace detail {

// The expanded trace imposed as sources of one multi-source sweep: after it,
// sweep.at(node) = min over trace points y of g(y) + S(y, node).
struct TraceGraph {
    LevelGraph graph;
    std::vector<TracePoint> samples;
    std::vector<int> nodes; // graph node per sample
    LevelGraph::ShortestPaths sweep;

    TraceGraph(const HamiltonianField& H, double a, const std::vector<TracePoint>& expanded)
        : graph(H, a, [&] {
              std::vector<NetworkPoint> pts;
              for (const auto& tp : expanded) pts.push_back(tp.at);
              return pts;
          }()),
          samples(expanded) {
        std::vector<std::pair<int, double>> sources;
        for (const auto& tp : samples) {
            nodes.push_back(graph.node_of(tp.at));
            sources.emplace_back(nodes.back(), tp.value);
        }
        sweep = graph.shortest_from(sources);
    }
};

inline std::string describe(const Network& net, const NetworkPoint& p) {
    if (p.is_vertex()) return "vertex " + net.vertex(p.vertex).id;
    return "arc " + net.arc(p.arc).id + " at s=" + std::to_string(p.s);
}

// Per-arc sampling of the sweep values: between consecutive cut nodes the
// value is transported by the one-sided costs from both ends. A turnaround
// inside a cut-free piece never pays (the round trip costs the integral of
// sigma+ - sigma-, which is nonnegative), so the two-sided minimum is exact.
inline FieldOnNetwork extract_field(const TraceGraph& tg) {
    const Network& net = tg.graph.field().network();
    const Config& cfg = tg.graph.field().config();
    const HamiltonianField& H = tg.graph.field();
    const double a = tg.graph.level();
    const double inf = std::numeric_limits<double>::infinity();

    FieldOnNetwork u;
    u.grid = cfg.grid;
    u.vertex_values.resize(net.num_vertices());
    for (int v = 0; v < net.num_vertices(); ++v)
        u.vertex_values[v] = tg.sweep.at(tg.graph.node_of(NetworkPoint::at_vertex(v)));

    u.arc_values.assign(net.num_arcs(), std::vector<double>(cfg.grid, inf));
    for (int arc = 0; arc < net.num_arcs(); ++arc) {
        auto& vals = u.arc_values[arc];
        std::vector<std::pair<double, int>> cuts = {
            {0.0, tg.graph.node_of(NetworkPoint::at_vertex(net.arc(arc).tail))},
            {1.0, tg.graph.node_of(NetworkPoint::at_vertex(net.arc(arc).head))}};
        for (int n = net.num_vertices(); n < tg.graph.num_nodes(); ++n)
            if (tg.graph.node_point(n).arc == arc) cuts.emplace_back(tg.graph.node_point(n).s, n);
        std::sort(cuts.begin(), cuts.end());

        auto node_s = [&](int k) { return static_cast<double>(k) / (cfg.grid - 1); };
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            auto [u1, n1] = cuts[i];
            auto [u2, n2] = cuts[i + 1];
            int k_lo = static_cast<int>(std::ceil(u1 * (cfg.grid - 1) - 1e-9));
            int k_hi = static_cast<int>(std::floor(u2 * (cfg.grid - 1) + 1e-9));

            // forward transport from the left cut
            std::optional<double> acc = 0.0;
            double prev = u1;
            for (int k = k_lo; k <= k_hi; ++k) {
                if (acc && node_s(k) > prev) {
                    auto piece = H.arc_cost({arc, false}, a, prev, node_s(k));
                    if (piece) *acc += *piece; else acc.reset();
                }
                if (acc) {
                    prev = std::fmax(prev, node_s(k));
                    vals[k] = std::fmin(vals[k], tg.sweep.at(n1) + *acc);
                }
            }
            // backward transport from the right cut
            acc = 0.0;
            prev = u2;
            for (int k = k_hi; k >= k_lo; --k) {
                if (acc && node_s(k) < prev) {
                    auto piece = H.arc_cost({arc, true}, a, 1.0 - prev, 1.0 - node_s(k));
                    if (piece) *acc += *piece; else acc.reset();
                }
                if (acc) {
                    prev = std::fmin(prev, node_s(k));
                    vals[k] = std::fmin(vals[k], tg.sweep.at(n2) + *acc);
                }
            }
        }
        vals.front() = u.vertex_values[net.arc(arc).tail];
        vals.back() = u.vertex_values[net.arc(arc).head];
    }
    return u;
}

inline void require_finite(const FieldOnNetwork& u, double a) {
    for (const auto& row : u.arc_values)
        for (double v : row)
            if (!std::isfinite(v))
                throw NoAdmissiblePath("some point is unreachable from the trace set at level " +
                                       std::to_string(a));
    for (double v : u.vertex_values)
        if (!std::isfinite(v))
            throw NoAdmissiblePath("some vertex is unreachable from the trace set at level " +
                                   std::to_string(a));
}

} // namespace detail

// Checks g(x) - g(y) <= S_a(y,x) over all ordered pairs of trace samples.
// The sweep value min_y(g(y) + S(y,x)) turns the pairwise check into one pass.
inline AdmissibilityReport check_admissible(const HamiltonianField& H, double a, const Trace& trace) {
    AdmissibilityReport rep;
    auto expanded = trace.expand(H.network(), H.config().grid);
    if (expanded.empty()) return rep;
    detail::TraceGraph tg(H, a, expanded);

    double scale = 1.0;
    for (const auto& tp : expanded) scale = std::fmax(scale, std::fabs(tp.value));
    double tol = H.config().check_tol * scale;

    for (std::size_t i = 0; i < expanded.size(); ++i) {
        double viol = expanded[i].value - tg.sweep.at(tg.nodes[i]);
        if (viol > rep.worst_violation) {
            rep.worst_violation = viol;
            auto path = tg.graph.extract_path_edges(tg.sweep, tg.nodes[i]);
            NetworkPoint y = path.empty() ? expanded[i].at
                                          : tg.graph.node_point(tg.graph.edges()[path.front()].from);
            rep.worst_pair = "g(" + detail::describe(H.network(), expanded[i].at) + ") vs g(" +
                             detail::describe(H.network(), y) + ")";
        }
    }
    rep.admissible = rep.worst_violation <= tol;
    return rep;
}

// The maximal subsolution below g at level a: x -> min over trace points y
// of g(y) + S_a(y,x). No agreement with g is required; the result equals g
// on the trace set exactly when g is admissible.
inline FieldOnNetwork hopf_lax_envelope(const HamiltonianField& H, double a, const Trace& trace) {
    if (trace.empty()) throw InadmissibleTrace("the trace set is empty; nothing to build from");
    auto expanded = trace.expand(H.network(), H.config().grid);
    detail::TraceGraph tg(H, a, expanded);
    if (!tg.sweep.settled && tg.graph.negative_cycle())
        throw NegativeCycleDetected("no subsolutions at level " + std::to_string(a) +
                                    ": a negative cycle exists");
    FieldOnNetwork u = detail::extract_field(tg);
    detail::require_finite(u, a);
    return u;
}

// u(x) = min over trace points y of g(y) + S_a(y,x), required to agree with
// g on the trace set. This is the unique solution determined by g when the
// trace covers the level-a uniqueness structure.
inline FieldOnNetwork solve_at_level(const HamiltonianField& H, double a, const Trace& trace) {
    const Network& net = H.network();
    const Config& cfg = H.config();
    if (trace.empty()) throw InadmissibleTrace("the trace set is empty; nothing to agree with");

    auto expanded = trace.expand(net, cfg.grid);
    detail::TraceGraph tg(H, a, expanded);

    if (!tg.sweep.settled && tg.graph.negative_cycle())
        throw NegativeCycleDetected("no solutions at level " + std::to_string(a) +
                                    ": a negative cycle exists");

    double scale = 1.0;
    for (const auto& tp : expanded) scale = std::fmax(scale, std::fabs(tp.value));
    for (std::size_t i = 0; i < expanded.size(); ++i) {
        double viol = expanded[i].value - tg.sweep.at(tg.nodes[i]);
        if (viol > cfg.check_tol * scale)
            throw InadmissibleTrace("trace violates the semidistance constraint at " +
                                    detail::describe(net, expanded[i].at) + " by " +
                                    std::to_string(viol));
    }

    FieldOnNetwork u = detail::extract_field(tg);
    detail::require_finite(u, a);
    return u;
}

inline FieldOnNetwork solve(const HamiltonianField& H, const CriticalData& crit, const Trace& trace) {
    return solve_at_level(H, crit.c, trace);
}

struct SubsolutionReport {
    bool passes = true;
    double worst_excess = 0.0; // max of w(x) - w(y) - S(y,x) over tested pairs
    std::string worst_where;
};

// Discrete subsolution test: adjacent grid pairs against sub-arc costs in
// both orientations, plus sampled long-range pairs against the semidistance.
inline SubsolutionReport check_subsolution(const HamiltonianField& H, const FieldOnNetwork& w, double a,
                                           int long_range_pairs = 24) {
    const Network& net = H.network();
    const Config& cfg = H.config();
    SubsolutionReport rep;
    double tol = cfg.check_tol * (1.0 + w.sup_norm());

    auto note = [&](double excess, const std::string& where) {
        if (excess > rep.worst_excess) {
            rep.worst_excess = excess;
            rep.worst_where = where;
        }
    };

    const int G = w.grid;
    for (int arc = 0; arc < net.num_arcs(); ++arc) {
        const auto& vals = w.arc_values[arc];
        for (int k = 0; k + 1 < G; ++k) {
            double s1 = static_cast<double>(k) / (G - 1), s2 = static_cast<double>(k + 1) / (G - 1);
            auto fwd = H.arc_cost({arc, false}, a, s1, s2);
            auto rev = H.arc_cost({arc, true}, a, 1.0 - s2, 1.0 - s1);
            std::string where = "arc " + net.arc(arc).id + " cell [" + std::to_string(s1) + "," +
                                std::to_string(s2) + "]";
            if (!fwd || !rev) {
                note(std::numeric_limits<double>::infinity(), where + " (no admissible momentum)");
                continue;
            }
            note(vals[k + 1] - vals[k] - *fwd, where);
            note(vals[k] - vals[k + 1] - *rev, where);
        }
    }

    Rng rng(cfg.seed);
    auto random_point = [&]() {
        if (rng.pick(3) == 0) return NetworkPoint::at_vertex(rng.pick(net.num_vertices()));
        int arc = rng.pick(net.num_arcs());
        int k = rng.pick(G);
        return net.canonical_point(ArcRef{arc, false}, static_cast<double>(k) / (G - 1));
    };
    for (int t = 0; t < long_range_pairs; ++t) {
        NetworkPoint x = random_point(), y = random_point();
        try {
            auto sd = semidistance(H, a, y, x);
            note(w.at(x) - w.at(y) - sd.value,
                 detail::describe(net, x) + " against " + detail::describe(net, y));
        } catch (const NegativeCycleDetected&) {
            note(std::numeric_limits<double>::infinity(), "negative cycle at this level");
        } catch (const NoAdmissiblePath&) {
            // an unreachable pair imposes no constraint
        }
    }
    rep.passes = rep.worst_excess <= tol;
    return rep;
}

// Restriction of a field to a set of items, as a trace document.
inline Trace restrict_to_items(const Network& net, const FieldOnNetwork& u,
                               const std::vector<AubryItem>& items) {
    Trace t;
    for (const auto& it : items) {
        if (it.is_vertex()) {
            t.points.push_back({NetworkPoint::at_vertex(it.vertex), u.vertex_values[it.vertex]});
            continue;
        }
        TraceInterval iv;
        iv.arc = it.arc;
        iv.s1 = it.s1;
        iv.s2 = it.s2;
        if (it.s2 <= it.s1) {
            iv.values = {u.at(net.canonical_point(ArcRef{it.arc, false}, it.s1))};
        } else {
            const int n = std::max(2, static_cast<int>(std::lround((it.s2 - it.s1) * (u.grid - 1))) + 1);
            for (int k = 0; k < n; ++k) {
                double s = it.s1 + (it.s2 - it.s1) * k / (n - 1);
                iv.values.push_back(u.at(net.canonical_point(ArcRef{it.arc, false}, s)));
            }
        }
        t.intervals.push_back(iv);
    }
    return t;
}

inline Trace restrict_to_aubry(const Network& net, const FieldOnNetwork& u, const AubryStructure& aubry) {
    std::vector<AubryItem> items;
    for (const auto& sc : aubry.classes)
        for (const auto& it : sc.items) items.push_back(it);
    return restrict_to_items(net, u, items);
}

struct FixedPointReport {
    bool passes = false;
    double deviation = std::numeric_limits<double>::infinity();
    std::string reason;
};

// u solves the level-c equation iff re-solving from its own restriction to
// the Aubry set reproduces it.
inline FixedPointReport check_fixed_point(const HamiltonianField& H, const CriticalData& crit,
                                          const AubryStructure& aubry, const FieldOnNetwork& u) {
    FixedPointReport rep;
    Trace t = restrict_to_aubry(H.network(), u, aubry);
    try {
        FieldOnNetwork again = solve(H, crit, t);
        rep.deviation = u.max_difference(again);
        rep.passes = rep.deviation <= H.config().solution_tol * (1.0 + u.sup_norm());
        if (!rep.passes) rep.reason = "re-solve from the restriction deviates";
    } catch (const InadmissibleTrace& e) {
        rep.reason = e.what();
    }
    return rep;
}

// Same check against the uniqueness structure of an arbitrary level. Levels
// below the network floor have no admissible momenta somewhere; levels with
// a negative cycle admit no subsolution; levels above critical have no
// uniqueness set at all. Each failure mode is reported, not thrown.
inline FixedPointReport check_fixed_point_at_level(const HamiltonianField& H, double a,
                                                   const FieldOnNetwork& u) {
    FixedPointReport rep;
    const Config& cfg = H.config();
    if (a < H.network_floor() - cfg.energy_tol * (1.0 + std::fabs(a))) {
        rep.reason = "level lies below the network floor; no admissible momenta at the floor point";
        return rep;
    }
    std::vector<AubryItem> items;
    try {
        items = level_uniqueness_items(H, a);
    } catch (const NegativeCycleDetected& e) {
        rep.reason = e.what();
        return rep;
    }
    if (items.empty()) {
        rep.reason = "no zero-cost cycle and no degenerate point at this level";
        return rep;
    }
    try {
        FieldOnNetwork again = solve_at_level(H, a, restrict_to_items(H.network(), u, items));
        rep.deviation = u.max_difference(again);
        rep.passes = rep.deviation <= cfg.solution_tol * (1.0 + u.sup_norm());
        if (!rep.passes) rep.reason = "re-solve from the restriction deviates";
    } catch (const InadmissibleTrace& e) {
        rep.reason = e.what();
    } catch (const NegativeCycleDetected& e) {
        rep.reason = e.what();
    } catch (const NoAdmissiblePath& e) {
        rep.reason = e.what();
    }
    return rep;
}

struct ComparisonReport {
    int trials = 0;
    int violations = 0;
    double worst_margin = std::numeric_limits<double>::infinity(); // min of v - w
};

namespace detail {

// Random admissible trace on the given items: random base values at the
// representatives, projected through the Hopf-Lax envelope so that every
// semidistance constraint holds.
inline Trace random_admissible_trace(const HamiltonianField& H, const CriticalData& crit,
                                     const std::vector<AubryItem>& items, Rng& rng,
                                     std::optional<int> extra_vertex = {}) {
    const Network& net = H.network();
    Trace base;
    for (const auto& it : items) {
        NetworkPoint rep = it.is_vertex()
                               ? NetworkPoint::at_vertex(it.vertex)
                               : (it.from_cycle ? NetworkPoint::at_vertex(net.arc(it.arc).tail)
                                                : net.canonical_point(ArcRef{it.arc, false},
                                                                      0.5 * (it.s1 + it.s2)));
        base.points.push_back({rep, rng.range(-1.0, 1.0)});
    }
    FieldOnNetwork g = hopf_lax_envelope(H, crit.c, base);
    Trace out = restrict_to_items(net, g, items);

    if (extra_vertex) {
        // admissible window for the new value: two sweeps on one graph
        NetworkPoint vp = NetworkPoint::at_vertex(*extra_vertex);
        auto expanded = out.expand(net, H.config().grid);
        TraceGraph tg(H, crit.c, expanded);
        int vn = tg.graph.node_of(vp);
        double hi = tg.sweep.at(vn); // min over y of g(y) + S(y, v)
        auto back = tg.graph.shortest_from({{vn, 0.0}});
        double lo = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < expanded.size(); ++i)
            lo = std::fmax(lo, expanded[i].value - back.at(tg.nodes[i]));
        double val = (lo <= hi) ? rng.range(lo, hi) : 0.5 * (lo + hi);
        out.points.push_back({vp, val});
    }
    return out;
}

} // namespace detail

// Property run of the comparison principle: supersolutions built as shifted
// minima of solutions must dominate subsolutions everywhere once they
// dominate on the trace set. Repeated at a supercritical level where any
// single vertex serves as the trace set.
inline ComparisonReport comparison_harness(const HamiltonianField& H, const CriticalData& crit,
                                           const AubryStructure& aubry, int trials,
                                           std::uint64_t seed, bool with_extra_vertex = false) {
    const Network& net = H.network();
    const Config& cfg = H.config();
    Rng rng(seed);
    ComparisonReport rep;

    std::vector<AubryItem> items;
    for (const auto& sc : aubry.classes)
        for (const auto& it : sc.items) items.push_back(it);

    auto run_trial = [&](double a, const Trace& tw, const Trace& t1, const Trace& t2,
                         const std::string& label) {
        FieldOnNetwork w = solve_at_level(H, a, tw);
        FieldOnNetwork v = FieldOnNetwork::pointwise_min(solve_at_level(H, a, t1),
                                                         solve_at_level(H, a, t2));

        // lift v until it dominates w on the trace set
        double shift = -std::numeric_limits<double>::infinity();
        for (const auto& tp : tw.expand(net, cfg.grid))
            shift = std::fmax(shift, tp.value - v.at(tp.at));
        v = v.transformed([&](double x) { return x + shift; });

        double margin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < v.arc_values.size(); ++i)
            for (std::size_t k = 0; k < v.arc_values[i].size(); ++k)
                margin = std::fmin(margin, v.arc_values[i][k] - w.arc_values[i][k]);
        for (std::size_t i = 0; i < v.vertex_values.size(); ++i)
            margin = std::fmin(margin, v.vertex_values[i] - w.vertex_values[i]);

        rep.trials += 1;
        rep.worst_margin = std::fmin(rep.worst_margin, margin);
        if (margin < -cfg.solution_tol * (1.0 + w.sup_norm())) {
            rep.violations += 1;
            throw ComparisonViolation(label + " comparison fails by " + std::to_string(-margin));
        }
    };

    for (int t = 0; t < trials; ++t) {
        std::optional<int> extra;
        if (with_extra_vertex) extra = rng.pick(net.num_vertices());
        Trace tw = detail::random_admissible_trace(H, crit, items, rng, extra);
        Trace t1 = detail::random_admissible_trace(H, crit, items, rng, extra);
        Trace t2 = detail::random_admissible_trace(H, crit, items, rng, extra);
        run_trial(crit.c, tw, t1, t2, "critical");
    }

    // supercritical level: any single vertex serves as the trace set
    double a = crit.c + 1.0;
    for (int t = 0; t < trials; ++t) {
        int vtx = rng.pick(net.num_vertices());
        auto one = [&](double value) {
            Trace tr;
            tr.points.push_back({NetworkPoint::at_vertex(vtx), value});
            return tr;
        };
        run_trial(a, one(rng.range(-1.0, 1.0)), one(rng.range(-1.0, 1.0)), one(rng.range(-1.0, 1.0)),
                  "supercritical");
    }
    return rep;
}

} // namespace eiknet
