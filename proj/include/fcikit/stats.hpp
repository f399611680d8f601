#ifndef FCIKIT_STATS_HPP
#define FCIKIT_STATS_HPP

#include <vector>

#include "fcikit/dataset.hpp"

namespace fcikit {

/// Symmetric matrix of pairwise Pearson correlations.
/// Invariants: unit diagonal, exact symmetry, entries in [-1, 1].
class CorrelationMatrix {
public:
    static CorrelationMatrix from_values(int dim, std::vector<double> values);

    int dim() const { return dim_; }
    double operator()(int i, int j) const {
        return values_[static_cast<std::size_t>(i) * dim_ + j];
    }

private:
    CorrelationMatrix(int dim, std::vector<double> values)
        : dim_(dim), values_(std::move(values)) {}
    int dim_ = 0;
    std::vector<double> values_;
};

struct CiResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool independent = true;
    int conditioning_size = 0;
};

// Pearson correlation of every column pair. The default entry point runs the
// OpenMP kernel when built with OpenMP; the serial kernel is the reference
// implementation and produces bit-identical results.
CorrelationMatrix correlation_matrix(const Dataset& data);
CorrelationMatrix correlation_matrix_serial(const Dataset& data);

// Partial correlation of i and j given cond, from the precision matrix of the
// {i,j} u cond submatrix: r = -P_ij / sqrt(P_ii * P_jj).
double partial_correlation(const CorrelationMatrix& corr, int i, int j,
                           const std::vector<int>& cond);

// Fisher z-transform test of zero partial correlation:
// z = sqrt(n - |cond| - 3) * atanh(r), two-sided p against the standard normal.
CiResult fisher_z_test(const CorrelationMatrix& corr, int n, int i, int j,
                       const std::vector<int>& cond, double alpha);

}  // namespace fcikit

#endif
