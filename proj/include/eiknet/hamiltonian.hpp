#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "eiknet/config.hpp"
#include "eiknet/network.hpp"
#include "eiknet/quadrature.hpp"

namespace eiknet {

struct BracketFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TableOutOfRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UndefinedSigma : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scalar coefficient function on [0,1]: polynomial in s or linear
// interpolation of uniformly spaced samples.
class Coefficient {
public:
    static Coefficient poly(std::vector<double> coeffs) {
        Coefficient c;
        c.kind_ = Kind::Poly;
        c.data_ = std::move(coeffs);
        if (c.data_.empty()) c.data_.push_back(0.0);
        return c;
    }
    static Coefficient samples(std::vector<double> values) {
        if (values.size() < 2) throw std::invalid_argument("sampled coefficient needs >= 2 values");
        Coefficient c;
        c.kind_ = Kind::Samples;
        c.data_ = std::move(values);
        return c;
    }
    static Coefficient constant(double v) { return poly({v}); }

    double operator()(double s) const {
        if (kind_ == Kind::Poly) {
            double acc = 0.0;
            for (auto it = data_.rbegin(); it != data_.rend(); ++it) acc = acc * s + *it;
            return acc;
        }
        s = std::clamp(s, 0.0, 1.0);
        const std::size_t n = data_.size();
        double t = s * (n - 1);
        auto k = std::min<std::size_t>(static_cast<std::size_t>(t), n - 2);
        double u = t - k;
        return (1.0 - u) * data_[k] + u * data_[k + 1];
    }

    bool is_poly() const { return kind_ == Kind::Poly; }
    const std::vector<double>& data() const { return data_; }

private:
    enum class Kind { Poly, Samples };
    Kind kind_ = Kind::Poly;
    std::vector<double> data_;
};

// H(s, mu) = |mu - b(s)|^p - V(s) with p >= 1.
struct PowerFamily {
    double p = 2.0;
    Coefficient b = Coefficient::constant(0.0);
    Coefficient V = Coefficient::constant(0.0);
};

// Bilinear interpolation of H on an s x mu grid. s_grid must cover [0,1];
// evaluation outside the mu window is an error rather than an extrapolation.
struct TableFamily {
    std::vector<double> s_grid;
    std::vector<double> mu_grid;
    std::vector<std::vector<double>> values; // values[i][j] = H(s_grid[i], mu_grid[j])
};

class ArcHamiltonian {
public:
    explicit ArcHamiltonian(PowerFamily f) : family_(std::move(f)) { check(); }
    explicit ArcHamiltonian(TableFamily f) : family_(std::move(f)) { check(); }

    bool is_power() const { return std::holds_alternative<PowerFamily>(family_); }
    const PowerFamily& power() const { return std::get<PowerFamily>(family_); }
    const TableFamily& table() const { return std::get<TableFamily>(family_); }

    // Preferred-orientation evaluation.
    double eval(double s, double mu) const {
        if (is_power()) {
            const auto& f = power();
            return std::pow(std::fabs(mu - f.b(s)), f.p) - f.V(s);
        }
        const auto& t = table();
        s = std::clamp(s, t.s_grid.front(), t.s_grid.back());
        double span = t.mu_grid.back() - t.mu_grid.front();
        if (mu < t.mu_grid.front() - 1e-12 * span || mu > t.mu_grid.back() + 1e-12 * span)
            throw TableOutOfRange("mu=" + std::to_string(mu) + " outside tabulated window");
        mu = std::clamp(mu, t.mu_grid.front(), t.mu_grid.back());
        auto cell = [](const std::vector<double>& g, double x) {
            auto it = std::upper_bound(g.begin(), g.end(), x);
            auto i = static_cast<std::size_t>(std::distance(g.begin(), it));
            i = std::clamp<std::size_t>(i, 1, g.size() - 1) - 1;
            double u = (x - g[i]) / (g[i + 1] - g[i]);
            return std::pair<std::size_t, double>{i, u};
        };
        auto [i, us] = cell(t.s_grid, s);
        auto [j, um] = cell(t.mu_grid, mu);
        double lo = (1.0 - um) * t.values[i][j] + um * t.values[i][j + 1];
        double hi = (1.0 - um) * t.values[i + 1][j] + um * t.values[i + 1][j + 1];
        return (1.0 - us) * lo + us * hi;
    }

    std::pair<double, double> mu_window() const {
        if (is_power()) return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        return {table().mu_grid.front(), table().mu_grid.back()};
    }

private:
    void check() const {
        if (is_power()) {
            if (power().p < 1.0) throw std::invalid_argument("power family requires p >= 1");
            return;
        }
        const auto& t = table();
        if (t.s_grid.size() < 2 || t.mu_grid.size() < 2)
            throw std::invalid_argument("table grids need >= 2 nodes");
        auto strictly_increasing = [](const std::vector<double>& g) {
            for (std::size_t i = 0; i + 1 < g.size(); ++i)
                if (!(g[i] < g[i + 1])) return false;
            return true;
        };
        if (!strictly_increasing(t.s_grid) || !strictly_increasing(t.mu_grid))
            throw std::invalid_argument("table grids must be strictly increasing");
        if (t.s_grid.front() > 1e-9 || t.s_grid.back() < 1.0 - 1e-9)
            throw std::invalid_argument("table s_grid must cover [0,1]");
        if (t.values.size() != t.s_grid.size())
            throw std::invalid_argument("table values rows must match s_grid");
        for (const auto& row : t.values)
            if (row.size() != t.mu_grid.size())
                throw std::invalid_argument("table values cols must match mu_grid");
    }

    std::variant<PowerFamily, TableFamily> family_;
};

// Grid sampling of the support functions of one arc at a fixed level.
struct SupportSample {
    std::string arc;
    double level = 0.0;
    std::vector<double> s;
    std::vector<std::optional<double>> sigma_plus;  // empty = -inf (no admissible momentum)
    std::vector<std::optional<double>> sigma_minus; // empty = +inf
    std::vector<double> mu_star;
    std::vector<double> m;
};

struct ArcValidation {
    std::string arc;
    bool continuity_ok = true;
    bool coercivity_ok = true;
    bool quasiconvex_ok = true;
    bool compatibility_ok = true;
    std::vector<std::string> warnings;
    std::vector<std::string> failures;
    bool ok() const { return continuity_ok && coercivity_ok && quasiconvex_ok && compatibility_ok; }
};

struct ValidationReport {
    std::vector<ArcValidation> arcs;
    bool ok() const {
        return std::all_of(arcs.begin(), arcs.end(), [](const auto& a) { return a.ok(); });
    }
};

namespace detail {

template <class F>
double golden_min(F&& f, double lo, double hi, double rel_tol) {
    constexpr double gr = 0.6180339887498949;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > rel_tol * (1.0 + std::fabs(lo) + std::fabs(hi))) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f(x2);
        }
    }
    return 0.5 * (lo + hi);
}

template <class F>
double golden_max(F&& f, double lo, double hi, double rel_tol) {
    return golden_min([&](double x) { return -f(x); }, lo, hi, rel_tol);
}

} // namespace detail

// Per-arc Hamiltonians over a network, with reversed-arc evaluation defined by
// the identity H~(s,mu) = H(1-s,-mu). Support extraction is analytic for the
// power family and numeric (golden section + bisection) for tables.
class HamiltonianField {
public:
    HamiltonianField(const Network& net, std::vector<ArcHamiltonian> per_arc, Config cfg = {})
        : net_(&net), arcs_(std::move(per_arc)), cfg_(cfg) {
        cfg_.validate();
        if (static_cast<int>(arcs_.size()) != net.num_arcs())
            throw std::invalid_argument("one Hamiltonian per arc required");
        build_floor_cache();
    }

    const Config& config() const { return cfg_; }
    const Network& network() const { return *net_; }
    const ArcHamiltonian& arc_hamiltonian(int arc) const { return arcs_.at(arc); }

    double evaluate(ArcRef g, double s, double mu) const {
        check_ref(g);
        if (!(s >= 0.0 && s <= 1.0)) throw ParameterOutOfRange("parameter outside [0,1]");
        if (g.reversed) return arcs_[g.arc].eval(1.0 - s, -mu);
        return arcs_[g.arc].eval(s, mu);
    }

    // (mu*, m) with m = min over mu of H at fixed s, in traversal coordinates.
    std::pair<double, double> pointwise_min(ArcRef g, double s) const {
        check_ref(g);
        const auto& h = arcs_[g.arc];
        double sp = Network::to_preferred(g, s);
        if (h.is_power()) {
            double mu = h.power().b(sp);
            if (g.reversed) mu = -mu;
            return {mu, -h.power().V(sp)};
        }
        auto [lo, hi] = h.mu_window();
        auto fp = [&](double mu) { return h.eval(sp, mu); };
        double mu = detail::golden_min(fp, lo, hi, cfg_.root_tol);
        if (g.reversed) mu = -mu;
        return {mu, h.eval(sp, g.reversed ? -mu : mu)};
    }

    double floor_at(ArcRef g, double s) const { return pointwise_min(g, s).second; }

    // sigma^+ = max{mu : H(s,mu) = a}; empty when the level set is (beyond
    // tolerance) empty. Levels inside the definedness tolerance clamp to mu*.
    std::optional<double> support_plus(ArcRef g, double a, double s) const {
        auto [mu_star, m] = pointwise_min(g, s);
        double tol_def = cfg_.root_tol * 10.0 * (1.0 + std::fabs(a));
        if (a < m - tol_def) return std::nullopt;
        if (a <= m) return mu_star;

        const auto& h = arcs_[g.arc];
        if (h.is_power()) {
            double t = std::pow(a - m, 1.0 / h.power().p);
            return mu_star + t;
        }
        // numeric: expand right of mu* until H exceeds a, then bisect
        double sp = Network::to_preferred(g, s);
        double ms = g.reversed ? -mu_star : mu_star; // argmin in preferred coords
        auto [wlo, whi] = h.mu_window();
        auto eval_trav = [&](double mu) { return h.eval(sp, g.reversed ? -mu : mu); };
        double lo, hi;
        if (!g.reversed) {
            lo = ms;
            hi = std::min(ms + 1.0, whi);
            while (eval_trav(hi) < a && hi < whi) hi = std::min(ms + 2.0 * (hi - ms), whi);
            if (eval_trav(hi) < a - cfg_.root_tol * (1.0 + std::fabs(a)))
                throw BracketFailure("level " + std::to_string(a) + " not reached inside mu window");
        } else {
            // traversal mu increases as preferred mu decreases: bracket on the left
            double plo = std::max(ms - 1.0, wlo);
            while (h.eval(sp, plo) < a && plo > wlo) plo = std::max(ms - 2.0 * (ms - plo), wlo);
            if (h.eval(sp, plo) < a - cfg_.root_tol * (1.0 + std::fabs(a)))
                throw BracketFailure("level " + std::to_string(a) + " not reached inside mu window");
            lo = -ms;
            hi = -plo;
        }
        double tol_res = cfg_.root_tol * (1.0 + std::fabs(a));
        double mid = 0.5 * (lo + hi);
        for (int it = 0; it < 120; ++it) {
            mid = 0.5 * (lo + hi);
            double v = eval_trav(mid);
            if (std::fabs(v - a) <= 0.01 * tol_res) break;
            if (hi - lo <= 1e-14 * (1.0 + std::fabs(mid))) break;
            (v < a ? lo : hi) = mid;
        }
        return mid;
    }

    // sigma^- through the reversal identity sigma^-(s) = -sigma^+_rev(1-s),
    // which then holds exactly by construction.
    std::optional<double> support_minus(ArcRef g, double a, double s) const {
        auto v = support_plus(g.reverse(), a, 1.0 - s);
        if (!v) return std::nullopt;
        return -*v;
    }

    // a_gamma = max_s m(s), cached per arc together with its argmax.
    double arc_floor(int arc) const { return floors_.at(arc).value; }
    double arc_floor_argmax(int arc) const { return floors_.at(arc).argmax; }

    // m sampled on the uniform preferred-orientation grid of config().grid nodes.
    const std::vector<double>& floor_grid(int arc) const { return floors_.at(arc).m_grid; }

    double network_floor() const { return a0_; }
    int network_floor_arc() const { return a0_arc_; }

    // Parameter values in [s1,s2] (traversal coordinates) where m crosses or
    // touches the level a. Integrands kink there, so quadrature panels must
    // not straddle them.
    std::vector<double> sigma_breakpoints(ArcRef g, double a, double s1, double s2) const {
        check_ref(g);
        std::vector<double> out;
        double tol_touch = 1e3 * cfg_.root_tol * (1.0 + std::fabs(a)); // inclusive; a spurious split is cheap
        auto f = [&](double s) { return floor_at(g, s) - a; };

        const auto& mg = floors_[g.arc].m_grid;
        const int G = static_cast<int>(mg.size());
        std::vector<std::pair<double, double>> nodes; // (s traversal, f)
        nodes.emplace_back(s1, f(s1));
        for (int k = 0; k < G; ++k) {
            double u = static_cast<double>(k) / (G - 1);   // preferred coords
            double st = g.reversed ? 1.0 - u : u;          // traversal coords
            if (st > s1 + 1e-12 && st < s2 - 1e-12) nodes.emplace_back(st, mg[k] - a);
        }
        nodes.emplace_back(s2, f(s2));
        std::sort(nodes.begin(), nodes.end());

        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            auto [sl, fl] = nodes[i];
            auto [sr, fr] = nodes[i + 1];
            if ((fl > 0.0) != (fr > 0.0) && fl != fr) {
                double lo = sl, hi = sr;
                for (int it = 0; it < 100 && hi - lo > cfg_.root_tol; ++it) {
                    double mid = 0.5 * (lo + hi);
                    ((f(mid) > 0.0) == (fl > 0.0) ? lo : hi) = mid;
                }
                out.push_back(0.5 * (lo + hi));
            }
        }
        // touch points: local maxima of m grazing the level
        for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
            auto [sm, fm] = nodes[i];
            if (fm >= nodes[i - 1].second && fm >= nodes[i + 1].second && std::fabs(fm) <= tol_touch) {
                double st = detail::golden_max([&](double x) { return f(x); }, nodes[i - 1].first,
                                               nodes[i + 1].first, cfg_.root_tol);
                if (std::fabs(f(st)) <= tol_touch) out.push_back(st);
            }
        }
        double arg = g.reversed ? 1.0 - floors_[g.arc].argmax : floors_[g.arc].argmax;
        if (arg > s1 && arg < s2 && std::fabs(floors_[g.arc].value - a) <= tol_touch) out.push_back(arg);

        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end(),
                              [](double x, double y) { return std::fabs(x - y) <= 1e-12; }),
                  out.end());
        return out;
    }

    // Cost of traversing the sub-arc [s1,s2] of g at level a: the integral of
    // sigma^+ in parameter coordinates. Empty when some point of the sub-arc
    // has no admissible momentum at this level.
    std::optional<double> arc_cost(ArcRef g, double a, double s1, double s2) const {
        check_ref(g);
        if (s2 <= s1) return 0.0;
        double tol_def = cfg_.root_tol * 10.0 * (1.0 + std::fabs(a));

        // definedness: the max of m over the sub-arc must not exceed a
        const auto& fl = floors_[g.arc];
        double arg = g.reversed ? 1.0 - fl.argmax : fl.argmax;
        double peak = (arg >= s1 && arg <= s2) ? fl.value
                                               : std::fmax(floor_at(g, s1), floor_at(g, s2));
        const auto& mg = fl.m_grid;
        const int G = static_cast<int>(mg.size());
        for (int k = 0; k < G; ++k) {
            double st = g.reversed ? 1.0 - static_cast<double>(k) / (G - 1) : static_cast<double>(k) / (G - 1);
            if (st >= s1 && st <= s2) peak = std::fmax(peak, mg[k]);
        }
        if (peak > a + tol_def) return std::nullopt;

        auto integrand = [&](double r) {
            auto v = support_plus(g, a, r);
            return v ? *v : pointwise_min(g, r).first;
        };
        // panel boundaries sit on the global sigma sampling grid, so the cost
        // of a sub-arc split anywhere equals the sum of the parts up to the
        // local error of the single panel containing the split point
        std::vector<double> cuts = sigma_breakpoints(g, a, s1, s2);
        for (int k = 1; k < cfg_.panels; ++k) {
            double t = static_cast<double>(k) / cfg_.panels;
            if (t > s1 + 1e-12 && t < s2 - 1e-12) cuts.push_back(t);
        }
        std::sort(cuts.begin(), cuts.end());
        int n = std::max(1, static_cast<int>(std::lround(cfg_.panels * (s2 - s1))));
        return simpson_piecewise(integrand, s1, s2, n, cuts);
    }

    SupportSample sample_supports(int arc, double a) const {
        SupportSample out;
        out.arc = net_->arc(arc).id;
        out.level = a;
        ArcRef g{arc, false};
        for (int k = 0; k < cfg_.grid; ++k) {
            double s = static_cast<double>(k) / (cfg_.grid - 1);
            auto [mu, m] = pointwise_min(g, s);
            out.s.push_back(s);
            out.mu_star.push_back(mu);
            out.m.push_back(m);
            out.sigma_plus.push_back(support_plus(g, a, s));
            out.sigma_minus.push_back(support_minus(g, a, s));
        }
        return out;
    }

    ValidationReport validate() const {
        ValidationReport rep;
        for (int a = 0; a < net_->num_arcs(); ++a) rep.arcs.push_back(validate_arc(a));
        return rep;
    }

private:
    struct FloorCache {
        std::vector<double> m_grid; // preferred orientation
        double value = 0.0;
        double argmax = 0.0;
    };

    void check_ref(ArcRef g) const {
        if (g.arc < 0 || g.arc >= static_cast<int>(arcs_.size()))
            throw UnknownArc("arc index out of range");
    }

    void build_floor_cache() {
        floors_.resize(arcs_.size());
        a0_ = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < static_cast<int>(arcs_.size()); ++a) {
            auto& fc = floors_[a];
            fc.m_grid.resize(cfg_.grid);
            int best = 0;
            for (int k = 0; k < cfg_.grid; ++k) {
                double s = static_cast<double>(k) / (cfg_.grid - 1);
                fc.m_grid[k] = raw_floor(a, s);
                if (fc.m_grid[k] > fc.m_grid[best]) best = k;
            }
            double lo = static_cast<double>(std::max(0, best - 1)) / (cfg_.grid - 1);
            double hi = static_cast<double>(std::min(cfg_.grid - 1, best + 1)) / (cfg_.grid - 1);
            fc.argmax = detail::golden_max([&](double s) { return raw_floor(a, s); }, lo, hi, cfg_.root_tol);
            fc.value = raw_floor(a, fc.argmax);
            if (fc.m_grid[best] >= fc.value) { // prefer the grid node on ties

                fc.value = fc.m_grid[best];
                fc.argmax = static_cast<double>(best) / (cfg_.grid - 1);
            }
            if (fc.value > a0_) {
                a0_ = fc.value;
                a0_arc_ = a;
            }
        }
    }

    // m(s) at a preferred-orientation parameter, bypassing the cache.
    double raw_floor(int arc, double s) const {
        const auto& h = arcs_[arc];
        if (h.is_power()) return -h.power().V(s);
        auto [lo, hi] = h.mu_window();
        double mu = detail::golden_min([&](double m) { return h.eval(s, m); }, lo, hi, cfg_.root_tol);
        return h.eval(s, mu);
    }

    ArcValidation validate_arc(int arc) const {
        ArcValidation v;
        v.arc = net_->arc(arc).id;
        const auto& h = arcs_[arc];
        auto [wlo, whi] = h.mu_window();

        // bracket radius for the coercivity margin test
        double R = 1.0;
        bool bounded = std::isfinite(wlo);
        if (bounded) R = std::fmax(std::fabs(wlo), std::fabs(whi));

        const int S = 33;
        const int M = 33;
        double margin = 1.0;
        for (int expand = 0; expand < 40 && !bounded; ++expand) {
            bool enough = true;
            for (int i = 0; i <= S; ++i) {
                double s = static_cast<double>(i) / S;
                double m = raw_floor(arc, s);
                if (std::fmin(h.eval(s, -R), h.eval(s, R)) <= m + margin) {
                    enough = false;
                    break;
                }
            }
            if (enough) break;
            R *= 2.0;
            if (expand == 39) {
                v.coercivity_ok = false;
                v.failures.push_back("no bracket radius with a coercivity margin was found");
            }
        }
        double scale = 1.0;
        for (int i = 0; i <= S; ++i) {
            double s = static_cast<double>(i) / S;
            double m = raw_floor(arc, s);
            double lo = bounded ? wlo : -R;
            double hi = bounded ? whi : R;
            if (bounded && std::fmin(h.eval(s, lo), h.eval(s, hi)) <= m + cfg_.energy_tol) {
                v.coercivity_ok = false;
                v.failures.push_back("window edges do not rise above the floor at s=" + std::to_string(s));
                break;
            }

            std::vector<double> hv(M + 1);
            for (int j = 0; j <= M; ++j) {
                double mu = lo + (hi - lo) * j / M;
                hv[j] = h.eval(s, mu);
                if (!std::isfinite(hv[j])) {
                    v.continuity_ok = false;
                    v.failures.push_back("non-finite value at s=" + std::to_string(s));
                }
                scale = std::fmax(scale, std::fabs(hv[j]));
            }
            double tol = 1e-9 * scale;
            for (int i1 = 0; i1 <= M && v.quasiconvex_ok; ++i1)
                for (int j = i1 + 1; j <= M && v.quasiconvex_ok; ++j)
                    for (int k = j + 1; k <= M; ++k) {
                        double cap = std::fmax(hv[i1], hv[k]);
                        if (hv[j] > cap + tol) {
                            v.quasiconvex_ok = false;
                            v.failures.push_back("interior value above both endpoints near s=" +
                                                 std::to_string(s));
                            break;
                        }
                        if (hv[j] > cap - tol && v.warnings.empty())
                            v.warnings.push_back("flat momentum slice detected; quasiconvexity is borderline");
                    }
        }

        // reversed evaluation must agree with the defining identity
        for (int i = 0; i <= 16 && v.compatibility_ok; ++i)
            for (int j = 0; j <= 16; ++j) {
                double s = static_cast<double>(i) / 16;
                double mu = (bounded ? wlo : -R) + ((bounded ? whi : R) - (bounded ? wlo : -R)) * j / 16;
                double lhs = evaluate(ArcRef{arc, true}, s, mu);
                double rhs = h.eval(1.0 - s, -mu);
                if (std::fabs(lhs - rhs) > 1e-12 * scale) {
                    v.compatibility_ok = false;
                    v.failures.push_back("reversed evaluation deviates from the reflection identity");
                    break;
                }
            }
        return v;
    }

    const Network* net_;
    std::vector<ArcHamiltonian> arcs_;
    Config cfg_;
    std::vector<FloorCache> floors_;
    double a0_ = 0.0;
    int a0_arc_ = 0;
};

} // namespace eiknet
