#pragma once

#include <string>
#include <vector>

#include "inductlab/harness.hpp"

namespace inductlab {

struct ConditionSummary {
    std::vector<std::pair<std::string, std::string>> keys; // (name, value) per group key
    double mean_g = 0.0;
    double sd_g = 0.0; // sample standard deviation; 0 for a single row
    std::size_t count = 0;
};

/// Groups converged rows by the named keys ("set_label", "n", "category",
/// "property") and reports mean/SD/count of G per group, in lexicographic
/// group order. Diverged rows are excluded. Errors: EmptyResults.
std::vector<ConditionSummary> aggregate(const std::vector<ResultRow>& results,
                                        const std::vector<std::string>& group_by);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    int df = 0;
};

/// Paired two-sided Student t-test on x - y. All-zero differences give
/// t = 0, p = 1; nonzero constant differences floor p at 1e-15.
/// Errors: LengthMismatch (also covers |x| < 2).
TTestResult paired_t_test(const std::vector<double>& x, const std::vector<double>& y);

/// Two-sided p-value for Student's t via continued-fraction incomplete beta.
double student_t_two_sided_p(double t, int df);

struct BhResult {
    std::vector<bool> reject;       // aligned with the input order
    std::vector<double> adjusted_p; // BH step-up adjusted, aligned with input
};

/// Benjamini-Hochberg step-up at level alpha. Errors: InvalidP.
BhResult bh_correct(const std::vector<double>& p_values, double alpha);

/// Long-format export with columns `G,n,overlap,sim,property,trial` for
/// external mixed-effects fitting. Diverged rows are excluded.
void export_long(const std::vector<ResultRow>& results, const std::string& path,
                 const std::vector<std::string>& header_comments);

} // namespace inductlab
