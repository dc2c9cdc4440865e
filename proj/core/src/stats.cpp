#include "inductlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

#include "inductlab/csv.hpp"
#include "inductlab/error.hpp"

namespace inductlab {

namespace {

// Continued fraction for the regularized incomplete beta (Lentz's method).
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIterations = 300;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b; // symmetry
}

} // namespace

double student_t_two_sided_p(double t, int df) {
    if (df < 1) fail("LengthMismatch", "t distribution needs df >= 1");
    if (std::isinf(t)) return 0.0;
    const double nu = static_cast<double>(df);
    const double x = nu / (nu + t * t);
    return incomplete_beta(nu / 2.0, 0.5, x);
}

TTestResult paired_t_test(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        fail("LengthMismatch", "paired samples differ in length: " + std::to_string(x.size()) +
                                   " vs " + std::to_string(y.size()));
    if (x.size() < 2) fail("LengthMismatch", "paired t-test needs at least 2 pairs");

    const auto n = static_cast<double>(x.size());
    std::vector<double> diff(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - y[i];

    const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / n;
    double ss = 0.0;
    for (double d : diff) ss += (d - mean) * (d - mean);
    const double sd = std::sqrt(ss / (n - 1.0));

    TTestResult result;
    result.df = static_cast<int>(x.size()) - 1;
    if (sd == 0.0) {
        if (mean == 0.0) {
            result.t = 0.0;
            result.p = 1.0;
        } else {
            result.t = mean > 0.0 ? std::numeric_limits<double>::infinity()
                                  : -std::numeric_limits<double>::infinity();
            result.p = 1e-15;
        }
        return result;
    }
    result.t = mean / (sd / std::sqrt(n));
    result.p = student_t_two_sided_p(result.t, result.df);
    return result;
}

BhResult bh_correct(const std::vector<double>& p_values, double alpha) {
    if (alpha <= 0.0 || alpha >= 1.0) fail("InvalidP", "alpha must be in (0,1)");
    for (double p : p_values)
        if (!(p >= 0.0 && p <= 1.0)) fail("InvalidP", "p-value outside [0,1]");

    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

    BhResult result;
    result.reject.assign(m, false);
    result.adjusted_p.assign(m, 1.0);

    // Step-up: find the largest k with p_(k) <= k * alpha / m.
    std::size_t k_star = 0;
    for (std::size_t k = 1; k <= m; ++k)
        if (p_values[order[k - 1]] <= static_cast<double>(k) * alpha / static_cast<double>(m))
            k_star = k;
    for (std::size_t k = 0; k < k_star; ++k) result.reject[order[k]] = true;

    double running = 1.0;
    for (std::size_t k = m; k >= 1; --k) {
        const double scaled =
            p_values[order[k - 1]] * static_cast<double>(m) / static_cast<double>(k);
        running = std::min(running, scaled);
        result.adjusted_p[order[k - 1]] = running;
    }
    return result;
}

std::vector<ConditionSummary> aggregate(const std::vector<ResultRow>& results,
                                        const std::vector<std::string>& group_by) {
    auto key_value = [](const ResultRow& row, const std::string& key) -> std::string {
        if (key == "set_label") return row.set_label;
        if (key == "n") return std::to_string(row.n);
        if (key == "category") return row.category;
        if (key == "property") return row.property;
        if (key == "trial_id") return row.trial_id;
        fail("UnknownKey", "cannot group by " + key);
    };

    std::map<std::vector<std::string>, std::vector<double>> groups;
    for (const auto& row : results) {
        if (!row.adapt_ok) continue;
        std::vector<std::string> key;
        key.reserve(group_by.size());
        for (const auto& k : group_by) key.push_back(key_value(row, k));
        groups[key].push_back(row.generalization);
    }
    if (groups.empty()) fail("EmptyResults", "no converged rows to aggregate");

    std::vector<ConditionSummary> summaries;
    summaries.reserve(groups.size());
    for (auto& [key, values] : groups) {
        // Sorted accumulation keeps the means exactly permutation-invariant.
        std::sort(values.begin(), values.end());
        const auto count = static_cast<double>(values.size());
        const double mean = std::accumulate(values.begin(), values.end(), 0.0) / count;
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        ConditionSummary summary;
        for (std::size_t i = 0; i < group_by.size(); ++i)
            summary.keys.emplace_back(group_by[i], key[i]);
        summary.mean_g = mean;
        summary.sd_g = values.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
        summary.count = values.size();
        summaries.push_back(std::move(summary));
    }
    return summaries;
}

void export_long(const std::vector<ResultRow>& results, const std::string& path,
                 const std::vector<std::string>& header_comments) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("IoFailure", "cannot write " + path);
    for (const auto& comment : header_comments) out << comment << "\n";
    out << "G,n,overlap,sim,property,trial\n";
    for (const auto& row : results) {
        if (!row.adapt_ok) continue;
        out << csv::join_record({csv::format_double(row.generalization), std::to_string(row.n),
                                 csv::format_double(row.overlap),
                                 csv::format_double(row.cosine_sim), row.property, row.trial_id})
            << "\n";
    }
    if (!out) fail("IoFailure", "short write to " + path);
}

} // namespace inductlab
