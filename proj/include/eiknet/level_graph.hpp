#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eiknet/hamiltonian.hpp"
#include "eiknet/network.hpp"

namespace eiknet {

struct NegativeCycleDetected : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoAdmissiblePath : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ExplosionGuard : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One traversed sub-arc: [s1,s2] of the handle (arc, reversed) in traversal
// coordinates, with its integrated cost.
struct PathLeg {
    std::string arc;
    bool reversed = false;
    double s1 = 0.0;
    double s2 = 1.0;
    double cost = 0.0;
};

struct PathCertificate {
    NetworkPoint from, to;
    std::vector<PathLeg> legs;
    double total = 0.0;
};

struct CycleWitness {
    std::vector<PathLeg> legs;
    double total = 0.0;
};

// Directed graph whose nodes are the network vertices plus requested interior
// points, and whose edge weights are sub-arc traversal costs at a fixed
// level. Both orientations of every piece are present; weights may be
// negative, and loop arcs contribute self-loop edges.
class LevelGraph {
public:
    struct Edge {
        int from = -1;
        int to = -1;
        ArcRef g;
        double s1 = 0.0, s2 = 1.0; // traversal coordinates
        double weight = 0.0;
    };

    LevelGraph(const HamiltonianField& H, double a, const std::vector<NetworkPoint>& extra = {})
        : H_(&H), level_(a) {
        const Network& net = H.network();
        for (int v = 0; v < net.num_vertices(); ++v)
            nodes_.push_back(NetworkPoint::at_vertex(v));
        for (const auto& p : extra) {
            if (p.is_vertex()) continue;
            if (find_node(p) < 0) nodes_.push_back(p);
        }
        for (int a_idx = 0; a_idx < net.num_arcs(); ++a_idx) {
            std::vector<std::pair<double, int>> cuts = {{0.0, net.arc(a_idx).tail},
                                                        {1.0, net.arc(a_idx).head}};
            for (int n = net.num_vertices(); n < static_cast<int>(nodes_.size()); ++n)
                if (nodes_[n].arc == a_idx) cuts.emplace_back(nodes_[n].s, n);
            std::sort(cuts.begin(), cuts.end(),
                      [](const auto& l, const auto& r) { return l.first < r.first; });
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
                auto [u1, n1] = cuts[i];
                auto [u2, n2] = cuts[i + 1];
                ArcRef fwd{a_idx, false}, rev{a_idx, true};
                if (auto w = H.arc_cost(fwd, a, u1, u2))
                    edges_.push_back({n1, n2, fwd, u1, u2, *w});
                if (auto w = H.arc_cost(rev, a, 1.0 - u2, 1.0 - u1))
                    edges_.push_back({n2, n1, rev, 1.0 - u2, 1.0 - u1, *w});
            }
        }
    }

    const HamiltonianField& field() const { return *H_; }
    double level() const { return level_; }
    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    const NetworkPoint& node_point(int n) const { return nodes_.at(n); }

    int find_node(const NetworkPoint& p) const {
        for (int n = 0; n < static_cast<int>(nodes_.size()); ++n) {
            if (p.is_vertex() && nodes_[n].vertex == p.vertex) return n;
            if (!p.is_vertex() && !nodes_[n].is_vertex() && nodes_[n].arc == p.arc &&
                std::fabs(nodes_[n].s - p.s) <= 1e-12)
                return n;
        }
        return -1;
    }
    int node_of(const NetworkPoint& p) const {
        int n = find_node(p);
        if (n < 0) throw std::logic_error("point was not inserted into the level graph");
        return n;
    }

    // Tolerance below which a cycle sum counts as zero rather than negative.
    double cycle_tolerance() const {
        return H_->config().cycle_tol_factor * (1.0 + std::fabs(level_)) *
               std::max(1, H_->network().num_arcs());
    }

    // Round-indexed Bellman-Ford table: dist[r][v] is the cheapest way to
    // reach v with at most r edges. Keeping the rounds makes predecessor
    // walks acyclic even when zero-cost cycles are around, and makes ties
    // resolve to fewest hops, then lowest edge index.
    struct ShortestPaths {
        std::vector<std::vector<double>> dist;
        std::vector<std::vector<int>> pred; // improving edge per round, -1 = inherited
        bool settled = true;                // false when the last round still improved
        const std::vector<double>& final_dist() const { return dist.back(); }
        double at(int v) const { return dist.back()[v]; }
    };

    ShortestPaths shortest_from(const std::vector<std::pair<int, double>>& sources, int rounds = -1) const {
        const double inf = std::numeric_limits<double>::infinity();
        if (rounds < 0) rounds = num_nodes() + 1;
        ShortestPaths sp;
        sp.dist.assign(1, std::vector<double>(nodes_.size(), inf));
        sp.pred.assign(1, std::vector<int>(nodes_.size(), -1));
        for (auto [n, v] : sources)
            if (v < sp.dist[0][n]) sp.dist[0][n] = v;

        for (int r = 1; r <= rounds; ++r) {
            const auto& prev = sp.dist[r - 1];
            auto cur = prev;
            std::vector<int> pr(nodes_.size(), -1);
            bool changed = false;
            for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
                const Edge& ed = edges_[e];
                if (prev[ed.from] == inf) continue;
                double cand = prev[ed.from] + ed.weight;
                if (cand < cur[ed.to]) {
                    cur[ed.to] = cand;
                    pr[ed.to] = e;
                    changed = true;
                }
            }
            if (!changed) break;
            sp.dist.push_back(std::move(cur));
            sp.pred.push_back(std::move(pr));
            if (r == rounds) sp.settled = false;
        }
        return sp;
    }

    // Edge sequence realizing the final value at the target. Rounds strictly
    // decrease along the walk, so it terminates regardless of cycles.
    std::vector<int> extract_path_edges(const ShortestPaths& sp, int target) const {
        double best = sp.at(target);
        if (!std::isfinite(best)) return {};
        int r = 0;
        while (sp.dist[r][target] > best) ++r; // first round attaining the value
        std::vector<int> rev;
        int v = target;
        while (r > 0) {
            if (sp.dist[r][v] == sp.dist[r - 1][v]) {
                --r;
                continue;
            }
            int e = sp.pred[r][v];
            rev.push_back(e);
            v = edges_[e].from;
            --r;
        }
        std::reverse(rev.begin(), rev.end());
        return rev;
    }

    // Any cycle with weight below -cycle_tolerance(). Self-loop edges are
    // cycles of length one; longer ones are sliced out of over-long walks.
    std::optional<CycleWitness> negative_cycle() const {
        double tol = cycle_tolerance();
        for (const Edge& e : edges_)
            if (e.from == e.to && e.weight < -tol) return make_witness({index_of(e)});

        std::vector<std::pair<int, double>> all;
        for (int n = 0; n < num_nodes(); ++n) all.emplace_back(n, 0.0);
        int rounds = 2 * (num_nodes() + 1);
        auto sp = shortest_from(all, rounds);
        if (sp.settled) return std::nullopt;

        std::optional<CycleWitness> best;
        int last = static_cast<int>(sp.dist.size()) - 1;
        for (int v = 0; v < num_nodes(); ++v) {
            if (!(sp.dist[last][v] < sp.dist[last - 1][v])) continue;
            auto walk = extract_path_edges(sp, v);
            for (auto& cyc : slice_cycles(walk)) {
                double total = 0.0;
                for (int e : cyc) total += edges_[e].weight;
                if (total < -tol && (!best || total < best->total)) best = make_witness(cyc);
            }
        }
        return best;
    }

    // Nodes that can reach the target through edges of this graph.
    std::vector<char> can_reach(int target) const {
        std::vector<char> ok(nodes_.size(), 0);
        ok[target] = 1;
        std::deque<int> q = {target};
        while (!q.empty()) {
            int v = q.front();
            q.pop_front();
            for (const Edge& e : edges_)
                if (e.to == v && !ok[e.from]) {
                    ok[e.from] = 1;
                    q.push_back(e.from);
                }
        }
        return ok;
    }

    PathCertificate certificate(const std::vector<int>& edge_ids, NetworkPoint from, NetworkPoint to) const {
        PathCertificate c;
        c.from = from;
        c.to = to;
        for (int e : edge_ids) {
            const Edge& ed = edges_[e];
            PathLeg leg{H_->network().arc(ed.g.arc).id, ed.g.reversed, ed.s1, ed.s2, ed.weight};
            if (!c.legs.empty() && c.legs.back().arc == leg.arc && c.legs.back().reversed == leg.reversed &&
                std::fabs(c.legs.back().s2 - leg.s1) <= 1e-12) {
                c.legs.back().s2 = leg.s2;
                c.legs.back().cost += leg.cost;
            } else {
                c.legs.push_back(leg);
            }
            c.total += ed.weight;
        }
        return c;
    }

    CycleWitness make_witness(const std::vector<int>& edge_ids) const {
        CycleWitness w;
        for (int e : edge_ids) {
            const Edge& ed = edges_[e];
            w.legs.push_back({H_->network().arc(ed.g.arc).id, ed.g.reversed, ed.s1, ed.s2, ed.weight});
            w.total += ed.weight;
        }
        return w;
    }

private:
    int index_of(const Edge& e) const { return static_cast<int>(&e - edges_.data()); }

    // Split an edge walk into the simple cycles it contains.
    std::vector<std::vector<int>> slice_cycles(const std::vector<int>& walk) const {
        std::vector<std::vector<int>> out;
        std::vector<int> where(nodes_.size(), -1);
        std::vector<int> stack_edges;
        std::vector<int> stack_nodes;
        auto push_node = [&](int n) {
            if (where[n] >= 0) {
                out.emplace_back(stack_edges.begin() + where[n], stack_edges.end());
                for (std::size_t i = where[n] + 1; i < stack_nodes.size(); ++i) where[stack_nodes[i]] = -1;
                stack_edges.resize(where[n]);
                stack_nodes.resize(where[n] + 1);
            } else {
                where[n] = static_cast<int>(stack_edges.size());
                stack_nodes.push_back(n);
            }
        };
        if (walk.empty()) return out;
        push_node(edges_[walk.front()].from);
        for (int e : walk) {
            stack_edges.push_back(e);
            push_node(edges_[e].to);
        }
        return out;
    }

    const HamiltonianField* H_;
    double level_;
    std::vector<NetworkPoint> nodes_;
    std::vector<Edge> edges_;
};

inline std::optional<CycleWitness> find_negative_cycle(const HamiltonianField& H, double a) {
    return LevelGraph(H, a).negative_cycle();
}

struct SemidistanceResult {
    double value = 0.0;
    PathCertificate path;
};

// S_a(y, x): least traversal cost from y to x at level a. Detects when the
// value is -infinity because a negative cycle sits between the two points.
inline SemidistanceResult semidistance(const HamiltonianField& H, double a, const NetworkPoint& y,
                                       const NetworkPoint& x) {
    LevelGraph g(H, a, {y, x});
    int src = g.node_of(y), dst = g.node_of(x);
    auto sp = g.shortest_from({{src, 0.0}});

    if (!sp.settled) {
        auto reach_x = g.can_reach(dst);
        if (auto witness = g.negative_cycle()) {
            bool hits = false;
            for (const auto& leg : witness->legs) {
                NetworkPoint p = H.network().canonical_point(leg.arc, leg.s1, leg.reversed);
                int n = g.find_node(p);
                if (n >= 0 && std::isfinite(sp.at(n)) && reach_x[n]) hits = true;
            }
            if (hits)
                throw NegativeCycleDetected("value is -infinity: a negative cycle at level " +
                                            std::to_string(a) + " joins the two points");
        }
    }
    if (!std::isfinite(sp.at(dst)))
        throw NoAdmissiblePath("no admissible momentum path joins the points at this level");

    SemidistanceResult out;
    out.value = sp.at(dst);
    out.path = g.certificate(g.extract_path_edges(sp, dst), y, x);
    return out;
}

// Pairwise S_a between several points computed on one shared level graph, so
// that values of different pairs rest on the same arc splitting and are
// mutually consistent; entry [i][j] is from pts[i] to pts[j], +infinity when
// no admissible path joins them.
inline std::vector<std::vector<double>> semidistance_table(const HamiltonianField& H, double a,
                                                           const std::vector<NetworkPoint>& pts) {
    LevelGraph g(H, a, pts);
    if (g.negative_cycle())
        throw NegativeCycleDetected("negative cycle at level " + std::to_string(a));
    const int n = static_cast<int>(pts.size());
    std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        auto sp = g.shortest_from({{g.node_of(pts[i]), 0.0}});
        for (int j = 0; j < n; ++j) out[i][j] = sp.at(g.node_of(pts[j]));
    }
    return out;
}

// Exhaustive minimum over simple paths of the same level graph; test oracle.
inline double brute_force_semidistance(const HamiltonianField& H, double a, const NetworkPoint& y,
                                       const NetworkPoint& x) {
    LevelGraph g(H, a, {y, x});
    int src = g.node_of(y), dst = g.node_of(x);
    if (src == dst) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    std::vector<char> used(g.num_nodes(), 0);
    long long steps = 0;
    const long long cap = H.config().enumeration_cap;

    std::function<void(int, double)> dfs = [&](int v, double acc) {
        if (++steps > cap) throw ExplosionGuard("simple-path enumeration exceeded the configured cap");
        if (v == dst) {
            best = std::fmin(best, acc);
            return;
        }
        used[v] = 1;
        for (const auto& e : g.edges())
            if (e.from == v && e.from != e.to && !used[e.to]) dfs(e.to, acc + e.weight);
        used[v] = 0;
    };
    dfs(src, 0.0);
    return best;
}

// Largest slope any level-a subsolution can have against arc length:
// max over arcs and parameters of |sigma|/|gamma'|.
inline double lipschitz_bound(const HamiltonianField& H, double a) {
    const Network& net = H.network();
    const int G = H.config().grid;
    double best = 0.0;
    for (int arc = 0; arc < net.num_arcs(); ++arc) {
        ArcRef g{arc, false};
        for (int k = 0; k < G; ++k) {
            double s = static_cast<double>(k) / (G - 1);
            auto sp = H.support_plus(g, a, s);
            auto sm = H.support_minus(g, a, s);
            if (!sp || !sm)
                throw UndefinedSigma("no admissible momentum on arc " + net.arc(arc).id +
                                     " at level " + std::to_string(a));
            double speed = net.arc(arc).geometry.speed(s);
            best = std::fmax(best, std::fmax(*sp, -*sm) / speed);
        }
    }
    return best;
}

} // namespace eiknet
