#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "eiknet/config.hpp"
#include "eiknet/geometry.hpp"

namespace eiknet {

struct NetworkError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonRegularArc : NetworkError {
    using NetworkError::NetworkError;
};
struct OverlapViolation : NetworkError {
    using NetworkError::NetworkError;
};
struct Disconnected : NetworkError {
    using NetworkError::NetworkError;
};
struct EndpointMismatch : NetworkError {
    using NetworkError::NetworkError;
};
struct UnknownArc : NetworkError {
    using NetworkError::NetworkError;
};
struct UnknownVertex : NetworkError {
    using NetworkError::NetworkError;
};
struct ParameterOutOfRange : NetworkError {
    using NetworkError::NetworkError;
};

struct Vertex {
    std::string id;
    Vec coords;
};

struct Arc {
    std::string id;
    int tail = -1; // vertex index of gamma(0)
    int head = -1; // vertex index of gamma(1)
    ArcGeometry geometry;
    bool is_loop() const { return tail == head; }
};

// Oriented handle: (arc index, traversal direction). The stored arc is the
// preferred orientation; reversed handles address the inverse parametrization.
struct ArcRef {
    int arc = -1;
    bool reversed = false;
    ArcRef reverse() const { return {arc, !reversed}; }
    friend bool operator==(const ArcRef&, const ArcRef&) = default;
};

// Canonical point on the network: a vertex, or an interior point of an arc
// addressed in the preferred orientation with s in (0,1).
struct NetworkPoint {
    int vertex = -1;
    int arc = -1;
    double s = 0.0;

    static NetworkPoint at_vertex(int v) { return {v, -1, 0.0}; }
    static NetworkPoint interior(int arc, double s) { return {-1, arc, s}; }
    bool is_vertex() const { return vertex >= 0; }
    friend bool operator==(const NetworkPoint&, const NetworkPoint&) = default;
};

class Network {
public:
    Network(std::vector<Vertex> vertices, std::vector<Arc> arcs, const Config& cfg = {})
        : vertices_(std::move(vertices)), arcs_(std::move(arcs)) {
        validate_and_index(cfg);
    }

    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Arc>& arcs() const { return arcs_; }
    const Vertex& vertex(int v) const { return vertices_.at(v); }
    const Arc& arc(int a) const { return arcs_.at(a); }
    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_arcs() const { return static_cast<int>(arcs_.size()); }
    double diameter_hint() const { return diameter_; }

    int vertex_index(const std::string& id) const {
        auto it = vertex_by_id_.find(id);
        if (it == vertex_by_id_.end()) throw UnknownVertex("unknown vertex id: " + id);
        return it->second;
    }
    int arc_index(const std::string& id) const {
        auto it = arc_by_id_.find(id);
        if (it == arc_by_id_.end()) throw UnknownArc("unknown arc id: " + id);
        return it->second;
    }

    // Arcs ending at vertex v, i.e. oriented handles g with g(1) = v.
    const std::vector<ArcRef>& arcs_into(int v) const { return into_[v]; }

    int tail_of(ArcRef g) const { return g.reversed ? arcs_[g.arc].head : arcs_[g.arc].tail; }
    int head_of(ArcRef g) const { return g.reversed ? arcs_[g.arc].tail : arcs_[g.arc].head; }

    // Map a parameter in traversal coordinates to preferred-orientation coordinates.
    static double to_preferred(ArcRef g, double s) { return g.reversed ? 1.0 - s : s; }

    NetworkPoint canonical_point(ArcRef g, double s) const {
        if (g.arc < 0 || g.arc >= num_arcs()) throw UnknownArc("arc index out of range");
        if (!(s >= 0.0 && s <= 1.0)) throw ParameterOutOfRange("parameter outside [0,1]");
        double sp = to_preferred(g, s);
        if (sp <= 0.0) return NetworkPoint::at_vertex(arcs_[g.arc].tail);
        if (sp >= 1.0) return NetworkPoint::at_vertex(arcs_[g.arc].head);
        return NetworkPoint::interior(g.arc, sp);
    }
    NetworkPoint canonical_point(const std::string& arc_id, double s, bool reversed = false) const {
        return canonical_point(ArcRef{arc_index(arc_id), reversed}, s);
    }

    Vec embed(const NetworkPoint& p) const {
        if (p.is_vertex()) return vertices_[p.vertex].coords;
        return arcs_[p.arc].geometry.point(p.s);
    }

    // Geodesic distance induced by the Euclidean metric, computed on the
    // metric graph with both query points inserted as temporary nodes.
    double geodesic_distance(const NetworkPoint& x, const NetworkPoint& y) const {
        if (x == y) return 0.0;
        // node ids: vertices [0, nv); then split nodes for interior x/y.
        int nv = num_vertices();
        std::vector<NetworkPoint> extra;
        auto node_of = [&](const NetworkPoint& p) {
            if (p.is_vertex()) return p.vertex;
            for (std::size_t i = 0; i < extra.size(); ++i)
                if (extra[i] == p) return nv + static_cast<int>(i);
            extra.push_back(p);
            return nv + static_cast<int>(extra.size()) - 1;
        };
        int sx = node_of(x), sy = node_of(y);
        int n = nv + static_cast<int>(extra.size());

        struct E {
            int to;
            double len;
        };
        std::vector<std::vector<E>> adj(n);
        for (int a = 0; a < num_arcs(); ++a) {
            std::vector<std::pair<double, int>> cuts = {{0.0, arcs_[a].tail}, {1.0, arcs_[a].head}};
            for (std::size_t i = 0; i < extra.size(); ++i)
                if (extra[i].arc == a) cuts.emplace_back(extra[i].s, nv + static_cast<int>(i));
            std::sort(cuts.begin(), cuts.end(),
                      [](const auto& l, const auto& r) { return l.first < r.first; });
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
                double len = arcs_[a].geometry.length(cuts[i].first, cuts[i + 1].first);
                adj[cuts[i].second].push_back({cuts[i + 1].second, len});
                adj[cuts[i + 1].second].push_back({cuts[i].second, len});
            }
        }
        std::vector<double> dist(n, std::numeric_limits<double>::infinity());
        using QE = std::pair<double, int>;
        std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
        dist[sy] = 0.0;
        pq.push({0.0, sy});
        while (!pq.empty()) {
            auto [d, u] = pq.top();
            pq.pop();
            if (d > dist[u]) continue;
            for (const auto& e : adj[u])
                if (d + e.len < dist[e.to]) {
                    dist[e.to] = d + e.len;
                    pq.push({dist[e.to], e.to});
                }
        }
        return dist[sx];
    }

private:
    void validate_and_index(const Config& cfg) {
        for (int v = 0; v < num_vertices(); ++v) {
            if (!vertex_by_id_.emplace(vertices_[v].id, v).second)
                throw NetworkError("duplicate vertex id: " + vertices_[v].id);
        }
        for (int a = 0; a < num_arcs(); ++a) {
            if (!arc_by_id_.emplace(arcs_[a].id, a).second)
                throw NetworkError("duplicate arc id: " + arcs_[a].id);
            if (arcs_[a].tail < 0 || arcs_[a].tail >= num_vertices() || arcs_[a].head < 0 ||
                arcs_[a].head >= num_vertices())
                throw UnknownVertex("arc " + arcs_[a].id + " references an undeclared vertex");
        }
        if (vertices_.empty() || arcs_.empty())
            throw NetworkError("network needs at least one vertex and one arc");

        diameter_ = 0.0;
        for (const auto& v : vertices_)
            for (const auto& w : vertices_) diameter_ = std::fmax(diameter_, distance(v.coords, w.coords));
        for (const auto& a : arcs_) diameter_ = std::fmax(diameter_, a.geometry.total_length());
        double tol = cfg.coord_tol * std::fmax(1.0, diameter_);

        const int K = 64; // screening resolution for embedding checks
        polylines_.resize(arcs_.size());
        for (int a = 0; a < num_arcs(); ++a) {
            auto& pl = polylines_[a];
            pl.reserve(K + 1);
            for (int k = 0; k <= K; ++k) pl.push_back(arcs_[a].geometry.point(static_cast<double>(k) / K));

            for (int k = 0; k <= K; ++k) {
                double s = static_cast<double>(k) / K;
                if (arcs_[a].geometry.speed(s) <= tol)
                    throw NonRegularArc("arc " + arcs_[a].id + " has vanishing derivative near s=" +
                                        std::to_string(s));
            }
            if (distance(pl.front(), vertices_[arcs_[a].tail].coords) > tol ||
                distance(pl.back(), vertices_[arcs_[a].head].coords) > tol)
                throw EndpointMismatch("arc " + arcs_[a].id + " endpoints do not match its vertices");

            // simplicity of the sampled polyline (non-adjacent segments stay apart;
            // a loop may close onto its own first segment at the shared vertex)
            for (int i = 0; i < K; ++i)
                for (int j = i + 2; j < K; ++j) {
                    if (arcs_[a].is_loop() && i == 0 && j == K - 1) continue;
                    if (segment_segment_distance(pl[i], pl[i + 1], pl[j], pl[j + 1]) <= tol)
                        throw OverlapViolation("arc " + arcs_[a].id + " self-intersects");
                }
        }

        // gamma((0,1)) must avoid every other non-inverse arc entirely
        for (int a = 0; a < num_arcs(); ++a)
            for (int b = 0; b < num_arcs(); ++b) {
                if (a == b) continue;
                for (int k = 1; k < K; ++k) {
                    const Vec& p = polylines_[a][k];
                    double d = std::numeric_limits<double>::infinity();
                    for (int j = 0; j < K; ++j)
                        d = std::fmin(d, point_segment_distance(p, polylines_[b][j], polylines_[b][j + 1]));
                    if (d <= tol)
                        throw OverlapViolation("arcs " + arcs_[a].id + " and " + arcs_[b].id +
                                               " overlap away from their endpoints");
                }
            }

        // every declared vertex must be an arc endpoint
        std::vector<bool> used(vertices_.size(), false);
        for (const auto& a : arcs_) used[a.tail] = used[a.head] = true;
        for (int v = 0; v < num_vertices(); ++v)
            if (!used[v]) throw NetworkError("vertex " + vertices_[v].id + " is not an arc endpoint");

        // connectivity by arc concatenation
        std::vector<int> comp(vertices_.size());
        std::iota(comp.begin(), comp.end(), 0);
        std::function<int(int)> find = [&](int v) { return comp[v] == v ? v : comp[v] = find(comp[v]); };
        for (const auto& a : arcs_) comp[find(a.tail)] = find(a.head);
        for (int v = 1; v < num_vertices(); ++v)
            if (find(v) != find(0)) throw Disconnected("network is not connected");

        into_.assign(vertices_.size(), {});
        for (int a = 0; a < num_arcs(); ++a) {
            into_[arcs_[a].head].push_back(ArcRef{a, false});
            into_[arcs_[a].tail].push_back(ArcRef{a, true});
        }
    }

    std::vector<Vertex> vertices_;
    std::vector<Arc> arcs_;
    std::map<std::string, int> vertex_by_id_;
    std::map<std::string, int> arc_by_id_;
    std::vector<std::vector<ArcRef>> into_;
    std::vector<std::vector<Vec>> polylines_;
    double diameter_ = 0.0;
};

} // namespace eiknet
