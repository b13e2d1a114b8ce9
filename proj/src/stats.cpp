#include "leadsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace leadsim::stats {

SampleStats describe(const std::vector<Scalar>& values) {
    SampleStats s;
    s.n = static_cast<int>(values.size());
    if (values.empty()) return s;
    std::vector<Scalar> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    s.min = sorted.front();
    s.max = sorted.back();
    const std::size_t n = sorted.size();
    s.median = n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2;
    s.mean = std::accumulate(sorted.begin(), sorted.end(), Scalar(0)) / static_cast<Scalar>(n);
    if (n >= 2) {
        Scalar ss = 0;
        for (Scalar v : sorted) ss += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(ss / static_cast<Scalar>(n - 1));
    }
    return s;
}

Scalar normal_cdf(Scalar z) { return Scalar(0.5) * std::erfc(-z / std::sqrt(Scalar(2))); }

namespace {

/// Continued-fraction core of the incomplete beta (Lentz's method).
Scalar beta_cf(Scalar a, Scalar b, Scalar x) {
    constexpr int kMaxIter = 300;
    constexpr Scalar kEps = std::numeric_limits<Scalar>::epsilon();
    constexpr Scalar kTiny = Scalar(1e-300);

    const Scalar qab = a + b;
    const Scalar qap = a + 1;
    const Scalar qam = a - 1;
    Scalar c = 1;
    Scalar d = 1 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1 / d;
    Scalar h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const Scalar m2 = Scalar(2 * m);
        Scalar aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1 / d;
        const Scalar del = d * c;
        h *= del;
        if (std::abs(del - 1) < kEps * 8) break;
    }
    return h;
}

}  // namespace

Scalar regularized_incomplete_beta(Scalar a, Scalar b, Scalar x) {
    if (a <= 0 || b <= 0)
        throw std::invalid_argument("regularized_incomplete_beta: a, b must be > 0");
    if (x <= 0) return 0;
    if (x >= 1) return 1;
    const Scalar ln_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const Scalar front = std::exp(ln_front);
    if (x < (a + 1) / (a + b + 2)) return front * beta_cf(a, b, x) / a;
    return 1 - front * beta_cf(b, a, 1 - x) / b;
}

Scalar student_t_cdf(Scalar t, Scalar dof) {
    if (dof <= 0) throw std::invalid_argument("student_t_cdf: dof must be > 0");
    if (t == 0) return 0.5;
    const Scalar x = dof / (dof + t * t);
    const Scalar tail = Scalar(0.5) * regularized_incomplete_beta(dof / 2, Scalar(0.5), x);
    return t > 0 ? 1 - tail : tail;
}

std::vector<Scalar> midranks(const std::vector<Scalar>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<Scalar> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        const Scalar avg = (static_cast<Scalar>(i + 1) + static_cast<Scalar>(j)) / 2;
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
        i = j;
    }
    return ranks;
}

Scalar cles_from_u(Scalar u, int n1, int n2) {
    const Scalar prod = static_cast<Scalar>(n1) * static_cast<Scalar>(n2);
    return std::max(u, prod - u) / prod;
}

namespace {

/// Exact two-sided p for the rank-sum statistic by counting size-n1 subsets
/// of the (doubled, hence integer) pooled ranks at or beyond the observed
/// sum. Counts fit in doubles for every size this is used at.
Scalar exact_rank_p(const std::vector<Scalar>& ranks, int n1, Scalar observed_r1) {
    const int n = static_cast<int>(ranks.size());
    std::vector<int> scaled(static_cast<std::size_t>(n));
    int total_scaled = 0;
    for (int i = 0; i < n; ++i) {
        scaled[static_cast<std::size_t>(i)] =
            static_cast<int>(std::llround(2 * ranks[static_cast<std::size_t>(i)]));
        total_scaled += scaled[static_cast<std::size_t>(i)];
    }

    // ways[k][s]: subsets of size k with scaled-rank sum s.
    const int smax = total_scaled;
    std::vector<std::vector<double>> ways(static_cast<std::size_t>(n1) + 1,
                                          std::vector<double>(static_cast<std::size_t>(smax) + 1, 0));
    ways[0][0] = 1;
    for (int i = 0; i < n; ++i) {
        const int r = scaled[static_cast<std::size_t>(i)];
        for (int k = std::min(n1, i + 1); k >= 1; --k) {
            auto& row = ways[static_cast<std::size_t>(k)];
            const auto& prev = ways[static_cast<std::size_t>(k - 1)];
            for (int s = smax; s >= r; --s) row[static_cast<std::size_t>(s)] += prev[static_cast<std::size_t>(s - r)];
        }
    }

    const int obs = static_cast<int>(std::llround(2 * observed_r1));
    double below = 0, above = 0, total = 0;
    for (int s = 0; s <= smax; ++s) {
        const double w = ways[static_cast<std::size_t>(n1)][static_cast<std::size_t>(s)];
        total += w;
        if (s <= obs) below += w;
        if (s >= obs) above += w;
    }
    const double p = 2 * std::min(below, above) / total;
    return std::min(Scalar(1), static_cast<Scalar>(p));
}

}  // namespace

TestResult mann_whitney_u(const std::vector<Scalar>& x, const std::vector<Scalar>& y,
                          int exact_threshold) {
    const int n1 = static_cast<int>(x.size());
    const int n2 = static_cast<int>(y.size());
    if (n1 < 1 || n2 < 1)
        throw std::invalid_argument("mann_whitney_u: both samples must be non-empty");

    std::vector<Scalar> pooled;
    pooled.reserve(static_cast<std::size_t>(n1 + n2));
    pooled.insert(pooled.end(), x.begin(), x.end());
    pooled.insert(pooled.end(), y.begin(), y.end());
    const std::vector<Scalar> ranks = midranks(pooled);

    Scalar r1 = 0;
    for (int i = 0; i < n1; ++i) r1 += ranks[static_cast<std::size_t>(i)];
    const Scalar u1 = r1 - static_cast<Scalar>(n1) * (n1 + 1) / 2;

    TestResult res;
    res.statistic = u1;
    res.cles = cles_from_u(u1, n1, n2);
    res.group1 = describe(x);
    res.group2 = describe(y);

    if (std::min(n1, n2) <= exact_threshold) {
        res.p_value = exact_rank_p(ranks, n1, r1);
        res.exact = true;
        return res;
    }

    // Normal approximation with tie correction and continuity correction.
    const Scalar n = static_cast<Scalar>(n1 + n2);
    const Scalar prod = static_cast<Scalar>(n1) * static_cast<Scalar>(n2);
    const Scalar mu = prod / 2;
    Scalar tie_term = 0;
    {
        std::vector<Scalar> sorted = pooled;
        std::sort(sorted.begin(), sorted.end());
        std::size_t i = 0;
        while (i < sorted.size()) {
            std::size_t j = i + 1;
            while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
            const Scalar t = static_cast<Scalar>(j - i);
            tie_term += t * t * t - t;
            i = j;
        }
    }
    const Scalar sigma2 = prod / 12 * ((n + 1) - tie_term / (n * (n - 1)));
    if (sigma2 <= 0) {
        res.p_value = 1;  // every pooled value identical
        return res;
    }
    const Scalar sigma = std::sqrt(sigma2);
    const Scalar diff = u1 - mu;
    const Scalar cc = diff > 0 ? Scalar(-0.5) : (diff < 0 ? Scalar(0.5) : Scalar(0));
    const Scalar z = (diff + cc) / sigma;
    res.p_value = std::min(Scalar(1), 2 * (1 - normal_cdf(std::abs(z))));
    return res;
}

TestResult unpaired_t(const std::vector<Scalar>& x, const std::vector<Scalar>& y) {
    const int n1 = static_cast<int>(x.size());
    const int n2 = static_cast<int>(y.size());
    if (n1 < 2 || n2 < 2)
        throw std::invalid_argument("unpaired_t: both samples need at least 2 values");

    TestResult res;
    res.group1 = describe(x);
    res.group2 = describe(y);
    const Scalar dof = static_cast<Scalar>(n1 + n2 - 2);
    const Scalar sp2 = ((n1 - 1) * res.group1.sd * res.group1.sd +
                        (n2 - 1) * res.group2.sd * res.group2.sd) /
                       dof;
    const Scalar mean_diff = res.group1.mean - res.group2.mean;
    if (sp2 <= 0) {
        res.statistic = 0;
        res.p_value = mean_diff == 0 ? Scalar(1) : Scalar(0);
        res.cles = mean_diff == 0 ? Scalar(0.5) : Scalar(1);
        return res;
    }
    const Scalar se = std::sqrt(sp2 * (Scalar(1) / n1 + Scalar(1) / n2));
    res.statistic = mean_diff / se;
    res.p_value = 2 * (1 - student_t_cdf(std::abs(res.statistic), dof));
    // Rank-based effect size for symmetry with the U test.
    res.cles = mann_whitney_u(x, y).cles;
    return res;
}

Regression linear_regression(const std::vector<Scalar>& x, const std::vector<Scalar>& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("linear_regression: size mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("linear_regression: need at least 2 points");

    const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
    const Scalar scale = std::max({Scalar(1), std::abs(*xmin), std::abs(*xmax)});
    if (*xmax - *xmin <= Scalar(1e-12) * scale)
        throw std::invalid_argument("linear_regression: x is constant");

    const Scalar mx = std::accumulate(x.begin(), x.end(), Scalar(0)) / static_cast<Scalar>(n);
    const Scalar my = std::accumulate(y.begin(), y.end(), Scalar(0)) / static_cast<Scalar>(n);
    Scalar sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0) throw std::invalid_argument("linear_regression: x is constant");

    Regression reg;
    reg.n = static_cast<int>(n);
    reg.slope = sxy / sxx;
    reg.intercept = my - reg.slope * mx;
    Scalar ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Scalar fit = reg.slope * x[i] + reg.intercept;
        ss_res += (y[i] - fit) * (y[i] - fit);
        ss_tot += (y[i] - my) * (y[i] - my);
    }
    reg.r2 = ss_tot > 0 ? 1 - ss_res / ss_tot : Scalar(1);
    return reg;
}

}  // namespace leadsim::stats
