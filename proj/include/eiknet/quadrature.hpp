#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace eiknet {

// Composite Simpson rule over n panels (3-point rule per panel).
template <class F>
double simpson(F&& f, double a, double b, int n) {
    if (b <= a) return 0.0;
    if (n < 1) n = 1;
    double h = (b - a) / n;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        double l = a + k * h;
        double r = (k + 1 == n) ? b : l + h;
        acc += (r - l) / 6.0 * (f(l) + 4.0 * f(0.5 * (l + r)) + f(r));
    }
    return acc;
}

// Simpson on [a,b] split at the given interior breakpoints. Panels are shared
// out proportionally to piece length (at least one per piece) so that the
// total effort stays close to `panels` while no kink sits inside a panel.
template <class F>
double simpson_piecewise(F&& f, double a, double b, int panels, const std::vector<double>& breakpoints) {
    if (b <= a) return 0.0;
    std::vector<double> cuts;
    cuts.push_back(a);
    for (double t : breakpoints)
        if (t > a && t < b) cuts.push_back(t);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [&](double x, double y) { return std::fabs(x - y) <= 1e-14 * (1.0 + std::fabs(b - a)); }),
               cuts.end());

    double total = cuts.back() - cuts.front();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double len = cuts[i + 1] - cuts[i];
        int n = std::max(1, static_cast<int>(std::lround(panels * len / total)));
        acc += simpson(f, cuts[i], cuts[i + 1], n);
    }
    return acc;
}

} // namespace eiknet
