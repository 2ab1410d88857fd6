#include "netvol/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace netvol::stats {

std::pair<double, double> wilson_interval(long k, long n, double z) {
    if (n <= 0) throw std::domain_error("wilson interval needs n > 0");
    double p = static_cast<double>(k) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (p + z2 / (2.0 * n)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

VolumeEstimate estimate_volume(const std::vector<VerdictCount::Kind>& verdicts,
                               const std::string& set_id, bool count_inside) {
    if (verdicts.empty()) throw std::domain_error("estimate_volume: empty verdict stream");
    VolumeEstimate e;
    e.set_id = set_id;
    e.counts_inside = count_inside;
    for (auto k : verdicts) {
        ++e.n_total;
        if (k == VerdictCount::Inside) ++e.n_inside;
        else if (k == VerdictCount::Outside) ++e.n_outside;
        else ++e.n_indeterminate;
    }
    long hits = count_inside ? e.n_inside : e.n_outside;
    e.fraction = static_cast<double>(hits) / e.n_total;
    // Indeterminates pushed to each extreme widen the interval.
    e.ci_low = wilson_interval(hits, e.n_total).first;
    e.ci_high = wilson_interval(hits + e.n_indeterminate, e.n_total).second;
    return e;
}

DistanceHistogram distance_histogram(const std::vector<double>& distances, int bin_count) {
    if (bin_count < 1) throw std::domain_error("bin_count must be >= 1");
    for (double d : distances)
        if (!(d >= 0.0) || d > 1.0 + 1e-12)
            throw std::domain_error("distances must lie in [0,1]");
    DistanceHistogram h;
    double dmax = 0.0;
    long positive = 0;
    for (double d : distances) {
        dmax = std::max(dmax, d);
        if (d > 0.0) ++positive;
    }
    if (dmax <= 0.0) dmax = 1e-12;  // all-zero distances: a single occupied bin at 0
    h.bin_edges.resize(static_cast<size_t>(bin_count) + 1);
    for (int i = 0; i <= bin_count; ++i)
        h.bin_edges[static_cast<size_t>(i)] = dmax * static_cast<double>(i) / bin_count;
    h.counts.assign(static_cast<size_t>(bin_count), 0);
    for (double d : distances) {
        int b = std::min(bin_count - 1, static_cast<int>(d / dmax * bin_count));
        ++h.counts[static_cast<size_t>(b)];
    }
    h.mode_bin = static_cast<int>(std::max_element(h.counts.begin(), h.counts.end()) -
                                  h.counts.begin());
    if (positive < 10) return h;

    // Least-squares fit of log(count) ~ a - rate * center, beyond the mode.
    std::vector<std::pair<double, double>> pts;
    for (int b = h.mode_bin + 1; b < bin_count; ++b) {
        if (h.counts[static_cast<size_t>(b)] < 5) continue;
        double center = 0.5 * (h.bin_edges[static_cast<size_t>(b)] + h.bin_edges[static_cast<size_t>(b) + 1]);
        pts.emplace_back(center, std::log(static_cast<double>(h.counts[static_cast<size_t>(b)])));
    }
    if (pts.size() < 3) return h;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double n = static_cast<double>(pts.size());
    double denom = n * sxx - sx * sx;
    if (std::fabs(denom) < 1e-30) return h;
    double slope = (n * sxy - sx * sy) / denom;
    double intercept = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0, ybar = sy / n;
    for (auto [x, y] : pts) {
        double e = y - (intercept + slope * x);
        ss_res += e * e;
        ss_tot += (y - ybar) * (y - ybar);
    }
    h.tail_rate = -slope;
    h.tail_fit_r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return h;
}

}  // namespace netvol::stats
