#include "agroseason/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "agroseason/distributions.hpp"
#include "agroseason/errors.hpp"

namespace agroseason::stats {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int sgn(double a, double b) { return (a > b) - (a < b); }

void reject_missing(std::span<const double> values, const char* what) {
    for (double v : values)
        if (std::isnan(v))
            throw DataError(std::string(what) +
                            ": series contains missing values; drop or impute them first");
}

double mean_of(std::span<const double> values) {
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

double median_inplace(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double poly(std::span<const double> c, double x) {
    double r = 0.0;
    for (size_t k = c.size(); k-- > 0;) r = r * x + c[k];
    return r;
}

} // namespace

TrendTestResult mann_kendall(std::span<const double> values) {
    const int n = static_cast<int>(values.size());
    if (n < 4)
        throw InsufficientDataError("trend test needs at least 4 values, got " +
                                    std::to_string(n));
    reject_missing(values, "trend test");

    TrendTestResult r;
    r.n = n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) r.s += sgn(values[j], values[i]);

    // Tie correction: groups of equal values shrink the variance.
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double dn = n;
    double var = dn * (dn - 1.0) * (2.0 * dn + 5.0);
    for (size_t i = 0; i < sorted.size();) {
        size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        if (t > 1.0) var -= t * (t - 1.0) * (2.0 * t + 5.0);
        i = j;
    }
    r.var_s = var / 18.0;

    if (r.s > 0)
        r.z = (static_cast<double>(r.s) - 1.0) / std::sqrt(r.var_s);
    else if (r.s < 0)
        r.z = (static_cast<double>(r.s) + 1.0) / std::sqrt(r.var_s);
    else
        r.z = 0.0;
    r.p_two_sided = dist::normal_p_two_sided(r.z);
    r.tau = static_cast<double>(r.s) / (dn * (dn - 1.0) / 2.0);
    return r;
}

SenSlopeResult sen_slope(std::span<const double> values) {
    const int n = static_cast<int>(values.size());
    if (n < 2)
        throw InsufficientDataError("slope needs at least 2 values, got " + std::to_string(n));
    reject_missing(values, "slope");

    std::vector<double> slopes;
    slopes.reserve(static_cast<size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            slopes.push_back((values[j] - values[i]) / static_cast<double>(j - i));

    SenSlopeResult r;
    r.slope = median_inplace(slopes);
    std::vector<double> level(values.size());
    for (int i = 0; i < n; ++i) level[static_cast<size_t>(i)] = values[i] - r.slope * i;
    r.intercept = median_inplace(level);
    return r;
}

OlsFit ols_fit(std::span<const double> values) {
    const int n = static_cast<int>(values.size());
    if (n < 2)
        throw InsufficientDataError("fit needs at least 2 values, got " + std::to_string(n));
    reject_missing(values, "fit");

    const double xbar = (n - 1) / 2.0;
    const double ybar = mean_of(values);
    double sxy = 0.0, sxx = 0.0;
    for (int i = 0; i < n; ++i) {
        sxy += (i - xbar) * (values[i] - ybar);
        sxx += (i - xbar) * (i - xbar);
    }
    OlsFit f;
    f.slope = sxy / sxx;
    f.intercept = ybar - f.slope * xbar;
    return f;
}

BreakTestResult pettitt(std::span<const double> values, double alpha,
                        std::span<const std::string> period_keys) {
    const int n = static_cast<int>(values.size());
    if (n < 4)
        throw InsufficientDataError("change-point test needs at least 4 values, got " +
                                    std::to_string(n));
    reject_missing(values, "change-point test");
    if (!period_keys.empty() && static_cast<int>(period_keys.size()) != n)
        throw UsageError("change-point test: one period key per value expected");

    BreakTestResult r;
    r.alpha = alpha;
    r.u_series.resize(static_cast<size_t>(n) - 1);

    // Cumulative form: each step adds the sign balance of the new
    // element against the whole series.
    long long cum = 0;
    for (int t = 0; t < n - 1; ++t) {
        long long row = 0;
        for (int j = 0; j < n; ++j) row += sgn(values[t], values[j]);
        cum += row;
        r.u_series[static_cast<size_t>(t)] = cum;
    }

    r.k_stat = 0;
    r.break_index = 1;
    for (int t = 0; t < n - 1; ++t) {
        const long long mag = std::llabs(r.u_series[static_cast<size_t>(t)]);
        if (mag > r.k_stat) {
            r.k_stat = mag;
            r.break_index = t + 1;
        }
    }

    const double k = static_cast<double>(r.k_stat);
    const double dn = n;
    r.p_approx = std::min(1.0, 2.0 * std::exp(-6.0 * k * k / (dn * dn * dn + dn * dn)));
    r.significant = r.p_approx < alpha;
    if (!period_keys.empty()) r.break_date = period_keys[static_cast<size_t>(r.break_index) - 1];

    const auto seg = break_period_means(values, r.break_index);
    r.mean_before = seg.mean_before;
    r.mean_after = seg.mean_after;
    r.mean_diff = seg.diff;
    return r;
}

SegmentMeans break_period_means(std::span<const double> values, int break_index) {
    const int n = static_cast<int>(values.size());
    if (break_index < 1 || break_index >= n)
        throw UsageError("break index " + std::to_string(break_index) +
                         " out of range [1, " + std::to_string(n - 1) + "]");
    reject_missing(values, "segment means");
    SegmentMeans m;
    m.mean_before = mean_of(values.first(static_cast<size_t>(break_index)));
    m.mean_after = mean_of(values.subspan(static_cast<size_t>(break_index)));
    m.diff = m.mean_after - m.mean_before;
    return m;
}

// Royston's 1995 Shapiro-Wilk approximation (Applied Statistics 44,
// algorithm AS R94), complete-sample path, in double precision with the
// normal quantile/CDF from distributions.hpp.
NormalityTestResult shapiro_wilk(std::span<const double> values) {
    static constexpr double c1[6] = {0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
    static constexpr double c2[6] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
    static constexpr double c3[4] = {0.5440, -0.39978, 0.025054, -6.714e-4};
    static constexpr double c4[4] = {1.3822, -0.77857, 0.062767, -0.0020322};
    static constexpr double c5[4] = {-1.5861, -0.31082, -0.083751, 0.0038915};
    static constexpr double c6[3] = {-0.4803, -0.082676, 0.0030302};
    static constexpr double g[2] = {-2.273, 0.459};

    const int n = static_cast<int>(values.size());
    reject_missing(values, "normality test");
    std::vector<double> x(values.begin(), values.end());
    std::sort(x.begin(), x.end());
    if (n >= 2 && x.back() == x.front())
        throw DegenerateSampleError("normality test: sample has zero spread");
    if (n < 3)
        throw InsufficientDataError("normality test supports 3 <= n <= 5000, got " +
                                    std::to_string(n));
    if (n > 5000)
        throw UsageError("normality test supports 3 <= n <= 5000, got " + std::to_string(n));

    const double an = n;
    const int nn2 = n / 2;
    std::vector<double> a(static_cast<size_t>(nn2));
    if (n == 3) {
        a[0] = std::sqrt(0.5);
    } else {
        const double an25 = an + 0.25;
        double summ2 = 0.0;
        for (int i = 0; i < nn2; ++i) {
            a[static_cast<size_t>(i)] = dist::normal_quantile((i + 1 - 0.375) / an25);
            summ2 += a[static_cast<size_t>(i)] * a[static_cast<size_t>(i)];
        }
        summ2 *= 2.0;
        const double ssumm2 = std::sqrt(summ2);
        const double rsn = 1.0 / std::sqrt(an);
        const double a1 = poly(c1, rsn) - a[0] / ssumm2;
        int first_raw; // first index kept from the raw quantile scores
        double fac;
        if (n > 5) {
            first_raw = 2;
            const double a2 = -a[1] / ssumm2 + poly(c2, rsn);
            fac = std::sqrt((summ2 - 2.0 * a[0] * a[0] - 2.0 * a[1] * a[1]) /
                            (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
            a[0] = a1;
            a[1] = a2;
        } else {
            first_raw = 1;
            fac = std::sqrt((summ2 - 2.0 * a[0] * a[0]) / (1.0 - 2.0 * a1 * a1));
            a[0] = a1;
        }
        for (int i = first_raw; i < nn2; ++i) a[static_cast<size_t>(i)] = -a[static_cast<size_t>(i)] / fac;
    }

    // W as the squared correlation between the sorted, range-scaled
    // sample and the antisymmetric coefficient vector.
    const double range = x.back() - x.front();
    double sx = x[0] / range;
    double sa = -a[0];
    for (int i = 1, j = n - 2; i < n; ++i, --j) {
        sx += x[static_cast<size_t>(i)] / range;
        if (i != j) sa += (i < j ? -1.0 : 1.0) * a[static_cast<size_t>(std::min(i, j))];
    }
    sa /= an;
    sx /= an;
    double ssa = 0.0, ssx = 0.0, sax = 0.0;
    for (int i = 0, j = n - 1; i < n; ++i, --j) {
        const double asa =
            (i != j ? (i < j ? -1.0 : 1.0) * a[static_cast<size_t>(std::min(i, j))] : 0.0) - sa;
        const double xsx = x[static_cast<size_t>(i)] / range - sx;
        ssa += asa * asa;
        ssx += xsx * xsx;
        sax += asa * xsx;
    }
    // 1 - W computed directly so W near 1 keeps precision.
    const double ssassx = std::sqrt(ssa * ssx);
    const double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);

    NormalityTestResult out;
    out.n = n;
    out.w = 1.0 - w1;

    if (n == 3) {
        constexpr double pi6 = 1.90985931710274;  // 6/pi
        constexpr double stqr = 1.04719755119660; // pi/3
        out.p = std::clamp(pi6 * (std::asin(std::sqrt(out.w)) - stqr), 0.0, 1.0);
        return out;
    }
    const double y = std::log(w1);
    const double lx = std::log(an);
    if (n <= 11) {
        const double gamma = poly(g, an);
        if (y >= gamma) {
            out.p = 0.0; // w below the supported transform range
            return out;
        }
        const double yy = -std::log(gamma - y);
        const double m = poly(c3, an);
        const double s = std::exp(poly(c4, an));
        out.p = dist::normal_sf((yy - m) / s);
    } else {
        const double m = poly(c5, lx);
        const double s = std::exp(poly(c6, lx));
        out.p = dist::normal_sf((y - m) / s);
    }
    return out;
}

std::vector<QqPoint> qq_normal(std::span<const double> values) {
    const int n = static_cast<int>(values.size());
    if (n < 2)
        throw InsufficientDataError("quantile plot needs at least 2 values, got " +
                                    std::to_string(n));
    reject_missing(values, "quantile plot");

    std::vector<double> x(values.begin(), values.end());
    std::sort(x.begin(), x.end());
    if (x.back() == x.front())
        throw DegenerateSampleError("quantile plot: sample has zero spread");

    const double xbar = mean_of(x);
    double sxx = 0.0;
    for (double v : x) sxx += (v - xbar) * (v - xbar);
    const double sd = std::sqrt(sxx / (n - 1));

    std::vector<double> z(x.size());
    for (int i = 0; i < n; ++i)
        z[static_cast<size_t>(i)] = dist::normal_quantile((i + 1 - 0.375) / (n + 0.25));
    const double zbar = mean_of(z);
    double szz = 0.0;
    for (double v : z) szz += (v - zbar) * (v - zbar);
    const double zsd = std::sqrt(szz / (n - 1));

    // Scale the score axis so a sample equal to its own fitted
    // quantiles lands exactly on the identity line.
    std::vector<QqPoint> out(x.size());
    for (int i = 0; i < n; ++i) {
        out[static_cast<size_t>(i)].theoretical =
            xbar + sd * (z[static_cast<size_t>(i)] - zbar) / zsd;
        out[static_cast<size_t>(i)].observed = x[static_cast<size_t>(i)];
    }
    return out;
}

std::vector<double> standardized_anomalies(std::span<const double> values) {
    const int n = static_cast<int>(values.size());
    if (n < 2)
        throw InsufficientDataError("anomalies need at least 2 values, got " + std::to_string(n));
    reject_missing(values, "anomalies");

    const double m = mean_of(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    const double sd = std::sqrt(ss / n); // population scale
    if (sd == 0.0) throw DegenerateSampleError("anomalies: sample has zero spread");

    std::vector<double> out(values.size());
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = (values[i] - m) / sd;
    return out;
}

CorrelationMatrix pearson_matrix(
    const std::vector<std::pair<std::string, std::vector<double>>>& named_series,
    bool pairwise_complete) {
    const size_t m = named_series.size();
    if (m < 2) throw UsageError("correlation needs at least 2 series");
    const size_t len = named_series.front().second.size();
    for (const auto& [name, v] : named_series)
        if (v.size() != len)
            throw UsageError("correlation: series '" + name + "' has length " +
                             std::to_string(v.size()) + ", expected " + std::to_string(len));

    // Listwise mode keeps only rows complete in every series.
    std::vector<char> row_ok(len, 1);
    if (!pairwise_complete)
        for (size_t t = 0; t < len; ++t)
            for (const auto& [name, v] : named_series)
                if (std::isnan(v[t])) {
                    row_ok[t] = 0;
                    break;
                }

    CorrelationMatrix out;
    out.labels.reserve(m);
    for (const auto& [name, v] : named_series) out.labels.push_back(name);
    out.r.assign(m, std::vector<double>(m, kNaN));
    out.p.assign(m, std::vector<double>(m, kNaN));
    out.n_pairs.assign(m, std::vector<int>(m, 0));

    for (size_t i = 0; i < m; ++i) {
        for (size_t j = i; j < m; ++j) {
            const auto& xi = named_series[i].second;
            const auto& xj = named_series[j].second;
            std::vector<double> a, b;
            for (size_t t = 0; t < len; ++t) {
                if (!row_ok[t] || std::isnan(xi[t]) || std::isnan(xj[t])) continue;
                a.push_back(xi[t]);
                b.push_back(xj[t]);
            }
            const int n = static_cast<int>(a.size());
            out.n_pairs[i][j] = out.n_pairs[j][i] = n;
            if (i == j) {
                out.r[i][j] = 1.0;
                out.p[i][j] = 0.0;
                continue;
            }
            if (n < 3) continue; // cell stays missing
            const double abar = mean_of(a);
            const double bbar = mean_of(b);
            double sab = 0.0, saa = 0.0, sbb = 0.0;
            for (int t = 0; t < n; ++t) {
                sab += (a[static_cast<size_t>(t)] - abar) * (b[static_cast<size_t>(t)] - bbar);
                saa += (a[static_cast<size_t>(t)] - abar) * (a[static_cast<size_t>(t)] - abar);
                sbb += (b[static_cast<size_t>(t)] - bbar) * (b[static_cast<size_t>(t)] - bbar);
            }
            if (saa == 0.0 || sbb == 0.0) continue; // no spread: undefined cell
            double r = sab / std::sqrt(saa * sbb);
            r = std::clamp(r, -1.0, 1.0);
            double p;
            if (std::fabs(r) == 1.0) {
                p = 0.0;
            } else {
                const double t = r * std::sqrt((n - 2) / (1.0 - r * r));
                p = dist::student_t_p_two_sided(t, n - 2);
            }
            out.r[i][j] = out.r[j][i] = r;
            out.p[i][j] = out.p[j][i] = p;
        }
    }
    return out;
}

} // namespace agroseason::stats
