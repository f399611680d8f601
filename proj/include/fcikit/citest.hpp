#ifndef FCIKIT_CITEST_HPP
#define FCIKIT_CITEST_HPP

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <string>
#include <vector>

#include "fcikit/dataset.hpp"
#include "fcikit/graph.hpp"
#include "fcikit/stats.hpp"

namespace fcikit {

/// Conditional-independence test over a fixed variable universe.
/// Queries are deterministic and symmetric in (i, j); implementations are
/// immutable after construction and safe for concurrent queries.
class CiTester {
public:
    virtual ~CiTester() = default;
    CiTester(const CiTester&) = delete;
    CiTester& operator=(const CiTester&) = delete;

    virtual const std::vector<std::string>& variable_names() const = 0;
    CiResult is_independent(int i, int j, const std::vector<int>& cond) const;

    std::uint64_t query_count() const { return queries_.load(); }
    void set_query_log(std::ostream* log) { log_ = log; }

protected:
    CiTester() = default;
    virtual CiResult query(int i, int j, const std::vector<int>& cond) const = 0;

private:
    mutable std::atomic<std::uint64_t> queries_{0};
    std::ostream* log_ = nullptr;
    mutable std::mutex log_mutex_;
};

/// Fisher Z test backed by a correlation matrix precomputed once from the data.
class FisherZTester final : public CiTester {
public:
    FisherZTester(const Dataset& data, double alpha);

    const std::vector<std::string>& variable_names() const override { return names_; }
    int sample_count() const { return n_; }
    double alpha() const { return alpha_; }
    const CorrelationMatrix& correlation() const { return corr_; }

private:
    CiResult query(int i, int j, const std::vector<int>& cond) const override;

    std::vector<std::string> names_;
    CorrelationMatrix corr_;
    int n_;
    double alpha_;
};

/// Exact tester over a ground-truth DAG: independent iff d-separated.
/// p-values are the degenerate {0, 1}. Querying a latent index throws.
class OracleTester final : public CiTester {
public:
    explicit OracleTester(Dag truth);

    const std::vector<std::string>& variable_names() const override {
        return dag_.nodes();
    }
    const Dag& dag() const { return dag_; }

private:
    CiResult query(int i, int j, const std::vector<int>& cond) const override;

    Dag dag_;
};

}  // namespace fcikit

#endif
