#pragma once

#include <vector>

#include "leadsim/types.hpp"

namespace leadsim::stats {

/// Five-number-ish summary of one sample.
struct SampleStats {
    int n = 0;
    Scalar mean = 0;
    Scalar median = 0;
    Scalar min = 0;
    Scalar max = 0;
    Scalar sd = 0;  ///< sample standard deviation (0 when n < 2)
};

SampleStats describe(const std::vector<Scalar>& values);

/// Standard normal CDF.
Scalar normal_cdf(Scalar z);

/// Regularized incomplete beta function I_x(a, b), by Lentz's continued
/// fraction. Accurate to ~1e-12 over the tested domain.
Scalar regularized_incomplete_beta(Scalar a, Scalar b, Scalar x);

/// Student t CDF with dof degrees of freedom.
Scalar student_t_cdf(Scalar t, Scalar dof);

/// Midranks (average ranks for ties), 1-based, for the given values.
std::vector<Scalar> midranks(const std::vector<Scalar>& values);

/// Two-sample comparison result.
struct TestResult {
    Scalar statistic = 0;  ///< U for rank test, t for t test
    Scalar p_value = 1;    ///< two-sided
    Scalar cles = 0.5;     ///< common-language effect size, max(U, n1n2-U)/(n1n2)
    bool exact = false;    ///< p from exact permutation enumeration
    SampleStats group1;
    SampleStats group2;
};

/// Mann-Whitney U test (two-sided, midrank tie handling). When
/// min(n1, n2) <= exact_threshold, the p-value comes from exact enumeration
/// of rank-sum subsets (correct under ties); otherwise from the normal
/// approximation with tie correction and continuity correction. The
/// statistic is U for the first sample.
TestResult mann_whitney_u(const std::vector<Scalar>& x, const std::vector<Scalar>& y,
                          int exact_threshold = 8);

/// Common-language effect size from a U statistic.
Scalar cles_from_u(Scalar u, int n1, int n2);

/// Unpaired two-sample t test with pooled variance. Zero pooled variance:
/// p = 1 when the means agree, else p = 0.
TestResult unpaired_t(const std::vector<Scalar>& x, const std::vector<Scalar>& y);

/// Ordinary least squares y = slope * x + intercept.
struct Regression {
    Scalar slope = 0;
    Scalar intercept = 0;
    Scalar r2 = 0;
    int n = 0;
};

/// Throws std::invalid_argument for size mismatch, n < 2, or constant x.
Regression linear_regression(const std::vector<Scalar>& x, const std::vector<Scalar>& y);

}  // namespace leadsim::stats
