#include "fcikit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "fcikit/error.hpp"

namespace fcikit {

namespace {

constexpr double kCorrClamp = 1.0 - 1e-12;
constexpr double kConditionLimit = 1e12;

// Cyclic Jacobi eigendecomposition for a small symmetric matrix.
// a is m*m row-major and is destroyed; eigenvalues land on its diagonal,
// eigenvectors in the columns of v.
void jacobi_eigen(std::vector<double>& a, int m, std::vector<double>& v) {
    v.assign(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) v[static_cast<std::size_t>(i) * m + i] = 1.0;
    auto A = [&](int r, int c) -> double& { return a[static_cast<std::size_t>(r) * m + c]; };
    auto V = [&](int r, int c) -> double& { return v[static_cast<std::size_t>(r) * m + c]; };

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < m; ++p)
            for (int q = p + 1; q < m; ++q) off += A(p, q) * A(p, q);
        if (off < 1e-28) return;
        for (int p = 0; p < m; ++p) {
            for (int q = p + 1; q < m; ++q) {
                const double apq = A(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < m; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < m; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < m; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
}

// Per-column standardized copies; the correlation of standardized columns is
// their mean product with the n-1 denominator.
std::vector<double> standardized_columns(const Dataset& data) {
    const int n = data.rows(), p = data.cols();
    std::vector<double> z(static_cast<std::size_t>(p) * n);
    for (int c = 0; c < p; ++c) {
        const double* col = data.column(c);
        double mean = 0.0;
        for (int r = 0; r < n; ++r) mean += col[r];
        mean /= n;
        double ss = 0.0;
        for (int r = 0; r < n; ++r) ss += (col[r] - mean) * (col[r] - mean);
        const double sd = std::sqrt(ss / (n - 1));
        if (sd == 0.0) throw ConstantColumnError(data.names()[c]);
        double* zc = z.data() + static_cast<std::size_t>(c) * n;
        for (int r = 0; r < n; ++r) zc[r] = (col[r] - mean) / sd;
    }
    return z;
}

void validate_input(const Dataset& data) {
    if (data.rows() < 2) throw TooFewRowsError(data.rows());
    if (data.has_missing()) throw Error("correlation_matrix: missing values present");
}

double pair_correlation(const std::vector<double>& z, int n, int i, int j) {
    const double* zi = z.data() + static_cast<std::size_t>(i) * n;
    const double* zj = z.data() + static_cast<std::size_t>(j) * n;
    double dot = 0.0;
    for (int r = 0; r < n; ++r) dot += zi[r] * zj[r];
    double r = dot / (n - 1);
    return std::clamp(r, -1.0, 1.0);
}

}  // namespace

CorrelationMatrix CorrelationMatrix::from_values(int dim, std::vector<double> values) {
    if (dim <= 0 || values.size() != static_cast<std::size_t>(dim) * dim)
        throw Error("CorrelationMatrix: bad dimensions");
    for (int i = 0; i < dim; ++i) {
        if (std::abs(values[static_cast<std::size_t>(i) * dim + i] - 1.0) > 1e-12)
            throw Error("CorrelationMatrix: diagonal not 1");
        values[static_cast<std::size_t>(i) * dim + i] = 1.0;
        for (int j = 0; j < dim; ++j) {
            const double v = values[static_cast<std::size_t>(i) * dim + j];
            if (v != values[static_cast<std::size_t>(j) * dim + i])
                throw Error("CorrelationMatrix: not symmetric");
            if (std::abs(v) > 1.0) throw Error("CorrelationMatrix: entry out of [-1,1]");
        }
    }
    return CorrelationMatrix(dim, std::move(values));
}

CorrelationMatrix correlation_matrix_serial(const Dataset& data) {
    validate_input(data);
    const int n = data.rows(), p = data.cols();
    const std::vector<double> z = standardized_columns(data);
    std::vector<double> vals(static_cast<std::size_t>(p) * p, 0.0);
    for (int i = 0; i < p; ++i) vals[static_cast<std::size_t>(i) * p + i] = 1.0;
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            const double r = pair_correlation(z, n, i, j);
            vals[static_cast<std::size_t>(i) * p + j] = r;
            vals[static_cast<std::size_t>(j) * p + i] = r;
        }
    }
    return CorrelationMatrix::from_values(p, std::move(vals));
}

CorrelationMatrix correlation_matrix(const Dataset& data) {
    validate_input(data);
    const int n = data.rows(), p = data.cols();
    const std::vector<double> z = standardized_columns(data);
    std::vector<double> vals(static_cast<std::size_t>(p) * p, 0.0);
    for (int i = 0; i < p; ++i) vals[static_cast<std::size_t>(i) * p + i] = 1.0;

    const int pairs = p * (p - 1) / 2;
#pragma omp parallel for schedule(dynamic, 4)
    for (int k = 0; k < pairs; ++k) {
        // unrank k -> (i, j), i < j
        int i = 0;
        int rem = k;
        while (rem >= p - 1 - i) {
            rem -= p - 1 - i;
            ++i;
        }
        const int j = i + 1 + rem;
        const double r = pair_correlation(z, n, i, j);
        vals[static_cast<std::size_t>(i) * p + j] = r;
        vals[static_cast<std::size_t>(j) * p + i] = r;
    }
    return CorrelationMatrix::from_values(p, std::move(vals));
}

double partial_correlation(const CorrelationMatrix& corr, int i, int j,
                           const std::vector<int>& cond) {
    const int p = corr.dim();
    auto check = [&](int v) {
        if (v < 0 || v >= p) throw Error("partial_correlation: index out of range");
    };
    check(i);
    check(j);
    if (i == j) throw Error("partial_correlation: i == j");
    for (int s : cond) {
        check(s);
        if (s == i || s == j) throw Error("partial_correlation: cond overlaps {i,j}");
    }
    if (cond.empty()) return corr(i, j);

    std::vector<int> order;
    order.reserve(cond.size() + 2);
    order.push_back(i);
    order.push_back(j);
    order.insert(order.end(), cond.begin(), cond.end());
    const int m = static_cast<int>(order.size());

    std::vector<double> sub(static_cast<std::size_t>(m) * m);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
            sub[static_cast<std::size_t>(r) * m + c] = corr(order[r], order[c]);

    std::vector<double> vecs;
    jacobi_eigen(sub, m, vecs);

    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int k = 0; k < m; ++k) {
        const double lam = std::abs(sub[static_cast<std::size_t>(k) * m + k]);
        lo = std::min(lo, lam);
        hi = std::max(hi, lam);
    }
    if (lo == 0.0) throw SingularSubmatrixError(std::numeric_limits<double>::infinity());
    const double condition = hi / lo;
    if (condition > kConditionLimit) throw SingularSubmatrixError(condition);

    // precision entries from the eigendecomposition
    auto precision = [&](int a, int b) {
        double acc = 0.0;
        for (int k = 0; k < m; ++k) {
            const double lam = sub[static_cast<std::size_t>(k) * m + k];
            acc += vecs[static_cast<std::size_t>(a) * m + k] *
                   vecs[static_cast<std::size_t>(b) * m + k] / lam;
        }
        return acc;
    };
    const double pii = precision(0, 0), pjj = precision(1, 1), pij = precision(0, 1);
    const double r = -pij / std::sqrt(pii * pjj);
    return std::clamp(r, -1.0, 1.0);
}

CiResult fisher_z_test(const CorrelationMatrix& corr, int n, int i, int j,
                       const std::vector<int>& cond, double alpha) {
    if (alpha <= 0.0 || alpha >= 1.0) throw Error("fisher_z_test: alpha out of (0,1)");
    const int dof = n - static_cast<int>(cond.size()) - 3;
    if (dof < 1) throw InsufficientSamplesError(n, static_cast<int>(cond.size()));

    double r = partial_correlation(corr, i, j, cond);
    r = std::clamp(r, -kCorrClamp, kCorrClamp);

    CiResult res;
    res.statistic = std::sqrt(static_cast<double>(dof)) * 0.5 * std::log((1.0 + r) / (1.0 - r));
    res.p_value = std::erfc(std::abs(res.statistic) / std::sqrt(2.0));
    res.independent = res.p_value > alpha;
    res.conditioning_size = static_cast<int>(cond.size());
    return res;
}

}  // namespace fcikit
