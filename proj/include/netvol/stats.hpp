#pragma once

#include <optional>
#include <string>
#include <vector>

// Volume estimates with 99% Wilson intervals (indeterminate verdicts widen
// the interval by counting toward each extreme), and distance histograms
// with an exponential tail fit.

namespace netvol::stats {

struct VolumeEstimate {
    std::string set_id;
    long n_total = 0, n_inside = 0, n_outside = 0, n_indeterminate = 0;
    double fraction = 0.0;  // n_outside / n_total unless count_inside was set
    double ci_low = 0.0, ci_high = 0.0;
    bool counts_inside = false;
};

struct VerdictCount {
    enum Kind { Inside, Outside, Indeterminate } kind;
};

/// 99% Wilson interval bounds for k successes out of n.
std::pair<double, double> wilson_interval(long k, long n, double z = 2.5758293035489004);

/// Folds verdict kinds into a volume estimate. `count_inside` makes the
/// fraction report the inside share instead of the outside share.
VolumeEstimate estimate_volume(const std::vector<VerdictCount::Kind>& verdicts,
                               const std::string& set_id, bool count_inside = false);

struct DistanceHistogram {
    std::vector<double> bin_edges;  // size bins+1, strictly increasing
    std::vector<long> counts;       // size bins
    int mode_bin = 0;
    std::optional<double> tail_rate;      // exponential decay rate (per unit distance)
    std::optional<double> tail_fit_r2;    // goodness of the log-linear fit
};

/// Equal-width bins over [0, max(distances)]; the tail fit regresses
/// log-counts on bin centers beyond the mode (bins with >= 5 entries).
/// No tail fit when fewer than 10 positive distances exist.
DistanceHistogram distance_histogram(const std::vector<double>& distances, int bin_count);

}  // namespace netvol::stats
