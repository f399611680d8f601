#ifndef FCIKIT_BOOTSTRAP_HPP
#define FCIKIT_BOOTSTRAP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fcikit/dataset.hpp"
#include "fcikit/fci.hpp"
#include "fcikit/graph.hpp"

namespace fcikit {

/// Canonical edge records mapped to empirical occurrence counts over B
/// replicates; every probability is count/replicates.
struct BootstrapTable {
    struct Entry {
        EdgeRecord edge;
        int count = 0;
        double probability = 0.0;
    };
    std::vector<Entry> entries;  // sorted by canonical pair, then descending probability
    int replicates = 0;
    std::uint64_t base_seed = 0;
    std::vector<std::string> names;
};

// Row indices for replicate r: n draws with replacement from [0, n), from a
// deterministic stream keyed by (base_seed, r).
std::vector<int> resample_indices(int n, std::uint64_t base_seed, int replicate);

// B resampled FCI runs aggregated into per-edge occurrence probabilities.
// Deterministic for fixed inputs regardless of thread count; a failing
// replicate aborts the whole run with its index. The default entry point runs
// replicates in parallel when built with OpenMP; the serial variant is the
// reference implementation and produces an identical table.
BootstrapTable bootstrap_fci(const Dataset& data, const std::vector<std::string>& names,
                             const FciOptions& opts, const BackgroundKnowledge& bk,
                             int replicates, std::uint64_t seed);
BootstrapTable bootstrap_fci_serial(const Dataset& data,
                                    const std::vector<std::string>& names,
                                    const FciOptions& opts, const BackgroundKnowledge& bk,
                                    int replicates, std::uint64_t seed);

// Retains entries with probability strictly greater than min_prob.
BootstrapTable filter_table(const BootstrapTable& table, double min_prob);

// Edge-probability table: header "edge,prob", edges rendered with the
// ->, o->, o-o, <-> glyphs, probabilities with two decimals.
std::string bootstrap_table_csv(const BootstrapTable& table);

}  // namespace fcikit

#endif
