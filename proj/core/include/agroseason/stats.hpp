#ifndef AGROSEASON_STATS_HPP
#define AGROSEASON_STATS_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace agroseason::stats {

// Rank-based monotonic trend test on an ordered series.
struct TrendTestResult {
    long long s = 0;        // pairwise sign sum
    double var_s = 0.0;     // tie-corrected variance of s
    double z = 0.0;         // standardized statistic (continuity-corrected)
    double p_two_sided = 1.0;
    double tau = 0.0;       // s / (n(n-1)/2), uncorrected for ties
    int n = 0;
};

// Requires n >= 4 and no missing (NaN) values; the Gaussian p-value is
// considered reliable from n >= 8 (callers may warn below that).
TrendTestResult mann_kendall(std::span<const double> values);

// Robust line through an ordered series: slope is the median of all
// pairwise slopes, intercept the median of (x_i - slope*i), i 0-based.
struct SenSlopeResult {
    double slope = 0.0;     // units per step
    double intercept = 0.0; // level at index 0
};

SenSlopeResult sen_slope(std::span<const double> values);

// Ordinary least squares against the 0-based index, for comparison
// with the robust slope.
struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
};

OlsFit ols_fit(std::span<const double> values);

// Single change-point test on an ordered series (rank-based shift in
// distribution), with segment means around the detected break.
struct BreakTestResult {
    std::vector<long long> u_series; // shift statistic at each t = 1..n-1
    long long k_stat = 0;            // max |u_series|
    int break_index = 0;             // 1-based t of the earliest maximum
    std::string break_date;          // period key at break_index ("" if none given)
    double p_approx = 1.0;           // clamped to [0,1]
    bool significant = false;        // p_approx < alpha
    double alpha = 0.05;
    double mean_before = 0.0;        // over indices <= break_index
    double mean_after = 0.0;         // over the rest
    double mean_diff = 0.0;          // mean_after - mean_before
};

// Requires n >= 4 and no missing values. `period_keys`, when given,
// must have one label per value; break_date is then the label at the
// break. Ties in the maximum break at the earliest index.
BreakTestResult pettitt(std::span<const double> values, double alpha = 0.05,
                        std::span<const std::string> period_keys = {});

struct NormalityTestResult {
    double w = 0.0; // in (0, 1]
    double p = 0.0;
    int n = 0;
};

// Shapiro-Wilk normality test, Royston's 1995 approximation (AS R94)
// for 3 <= n <= 5000. Input order does not matter; a sorted copy is
// used. Zero spread raises DegenerateSampleError.
NormalityTestResult shapiro_wilk(std::span<const double> values);

struct QqPoint {
    double theoretical = 0.0;
    double observed = 0.0;
};

// Normal quantile-quantile pairs: observed values sorted ascending
// against fitted-normal quantiles at the Blom plotting positions
// (i - 3/8)/(n + 1/4), scaled to the sample mean and spread so that a
// sample equal to its own fitted quantiles lands on the identity line.
std::vector<QqPoint> qq_normal(std::span<const double> values);

// (x_i - mean)/sd with the population (1/n) standard deviation; the
// result has mean 0 and population sd 1.
std::vector<double> standardized_anomalies(std::span<const double> values);

struct CorrelationMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> r;     // symmetric, unit diagonal; NaN = missing cell
    std::vector<std::vector<double>> p;     // two-sided significance; NaN = missing cell
    std::vector<std::vector<int>> n_pairs;  // complete observations behind each cell
};

// Pearson correlation across equally indexed series. NaN entries mark
// missing observations; with pairwise_complete each pair uses its own
// shared-complete rows, otherwise only rows complete in every series
// are used. Pairs with fewer than 3 shared observations (or no spread)
// get NaN cells. Significance via the t transform with n-2 degrees of
// freedom; |r| = 1 maps to p = 0.
CorrelationMatrix pearson_matrix(
    const std::vector<std::pair<std::string, std::vector<double>>>& named_series,
    bool pairwise_complete = true);

struct SegmentMeans {
    double mean_before = 0.0;
    double mean_after = 0.0;
    double diff = 0.0; // mean_after - mean_before
};

// Arithmetic means of values[0..break_index-1] and values[break_index..]
// (break_index 1-based, must satisfy 1 <= break_index < n).
SegmentMeans break_period_means(std::span<const double> values, int break_index);

} // namespace agroseason::stats

#endif
