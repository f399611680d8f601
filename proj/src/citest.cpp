#include "fcikit/citest.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "fcikit/error.hpp"

namespace fcikit {

CiResult CiTester::is_independent(int i, int j, const std::vector<int>& cond) const {
    // canonical query form keeps results bit-identical under (i, j) swaps
    int a = std::min(i, j), b = std::max(i, j);
    std::vector<int> s(cond);
    std::sort(s.begin(), s.end());
    const CiResult res = query(a, b, s);
    queries_.fetch_add(1, std::memory_order_relaxed);
    if (log_) {
        std::lock_guard<std::mutex> lock(log_mutex_);
        *log_ << a << ' ' << b << " {";
        for (std::size_t k = 0; k < s.size(); ++k) *log_ << (k ? " " : "") << s[k];
        *log_ << "} " << res.statistic << ' ' << res.p_value << ' '
              << (res.independent ? "indep" : "dep") << '\n';
    }
    return res;
}

FisherZTester::FisherZTester(const Dataset& data, double alpha)
    : names_(data.names()),
      corr_(correlation_matrix(data)),
      n_(data.rows()),
      alpha_(alpha) {
    if (alpha <= 0.0 || alpha >= 1.0) throw Error("FisherZTester: alpha out of (0,1)");
}

CiResult FisherZTester::query(int i, int j, const std::vector<int>& cond) const {
    try {
        return fisher_z_test(corr_, n_, i, j, cond, alpha_);
    } catch (const SingularSubmatrixError&) {
        // collinear submatrix: the pair is numerically coupled given cond, so
        // report a decisive rejection at the clamp boundary instead of aborting
        const int dof = n_ - static_cast<int>(cond.size()) - 3;
        CiResult res;
        res.statistic =
            std::sqrt(static_cast<double>(dof)) * 0.5 * std::log((2.0 - 1e-12) / 1e-12);
        res.p_value = std::erfc(res.statistic / std::sqrt(2.0));
        res.independent = false;
        res.conditioning_size = static_cast<int>(cond.size());
        return res;
    }
}

OracleTester::OracleTester(Dag truth) : dag_(std::move(truth)) {}

CiResult OracleTester::query(int i, int j, const std::vector<int>& cond) const {
    auto guard = [this](int v) {
        if (dag_.is_latent(v)) throw LatentQueriedError(dag_.nodes()[v]);
    };
    guard(i);
    guard(j);
    for (int s : cond) guard(s);

    const bool sep = d_separated(dag_, i, j, cond);
    CiResult res;
    res.statistic = 0.0;
    res.p_value = sep ? 1.0 : 0.0;
    res.independent = sep;
    res.conditioning_size = static_cast<int>(cond.size());
    return res;
}

}  // namespace fcikit
