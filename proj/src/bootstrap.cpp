#include "fcikit/bootstrap.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <random>

#include "fcikit/citest.hpp"
#include "fcikit/error.hpp"
#include "fcikit/rng.hpp"

namespace fcikit {

namespace {

std::vector<EdgeRecord> run_replicate(const Dataset& data,
                                      const std::vector<std::string>& names,
                                      const FciOptions& opts,
                                      const BackgroundKnowledge& bk,
                                      std::uint64_t base_seed, int replicate) {
    const Dataset resample =
        data.select_rows(resample_indices(data.rows(), base_seed, replicate));
    FisherZTester tester(resample, opts.alpha);
    return edge_records(fci(tester, names, opts, bk).pag);
}

BootstrapTable aggregate(std::vector<std::vector<EdgeRecord>>&& per_replicate,
                         const std::vector<std::string>& names, int replicates,
                         std::uint64_t seed) {
    std::map<EdgeRecord, int> counts;
    for (const auto& records : per_replicate)
        for (const auto& rec : records) ++counts[rec];

    BootstrapTable table;
    table.replicates = replicates;
    table.base_seed = seed;
    table.names = names;
    for (const auto& [rec, count] : counts)
        table.entries.push_back(
            {rec, count, static_cast<double>(count) / replicates});

    std::map<std::string, int> order;
    for (std::size_t i = 0; i < names.size(); ++i) order[names[i]] = static_cast<int>(i);
    std::sort(table.entries.begin(), table.entries.end(),
              [&](const BootstrapTable::Entry& lhs, const BootstrapTable::Entry& rhs) {
                  const auto lk = std::make_pair(order.at(lhs.edge.a), order.at(lhs.edge.b));
                  const auto rk = std::make_pair(order.at(rhs.edge.a), order.at(rhs.edge.b));
                  if (lk != rk) return lk < rk;
                  if (lhs.count != rhs.count) return lhs.count > rhs.count;
                  if (lhs.edge.mark_a != rhs.edge.mark_a)
                      return lhs.edge.mark_a < rhs.edge.mark_a;
                  return lhs.edge.mark_b < rhs.edge.mark_b;
              });
    return table;
}

void validate(const Dataset& data, int replicates) {
    if (data.has_missing()) throw Error("bootstrap_fci: missing values present");
    if (replicates < 1) throw Error("bootstrap_fci: need at least one replicate");
}

}  // namespace

std::vector<int> resample_indices(int n, std::uint64_t base_seed, int replicate) {
    std::mt19937_64 rng(stream_seed(base_seed, static_cast<std::uint64_t>(replicate)));
    std::vector<int> rows(n);
    for (int i = 0; i < n; ++i)
        rows[i] = static_cast<int>(bounded(rng, static_cast<std::uint64_t>(n)));
    return rows;
}

BootstrapTable bootstrap_fci(const Dataset& data, const std::vector<std::string>& names,
                             const FciOptions& opts, const BackgroundKnowledge& bk,
                             int replicates, std::uint64_t seed) {
    validate(data, replicates);
    std::vector<std::vector<EdgeRecord>> per_replicate(replicates);
    std::vector<std::string> failures(replicates);

#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < replicates; ++r) {
        try {
            per_replicate[r] = run_replicate(data, names, opts, bk, seed, r);
        } catch (const std::exception& ex) {
            failures[r] = ex.what();
        }
    }
    for (int r = 0; r < replicates; ++r)
        if (!failures[r].empty()) throw BootstrapReplicateError(r, failures[r]);
    return aggregate(std::move(per_replicate), names, replicates, seed);
}

BootstrapTable bootstrap_fci_serial(const Dataset& data,
                                    const std::vector<std::string>& names,
                                    const FciOptions& opts, const BackgroundKnowledge& bk,
                                    int replicates, std::uint64_t seed) {
    validate(data, replicates);
    std::vector<std::vector<EdgeRecord>> per_replicate(replicates);
    for (int r = 0; r < replicates; ++r) {
        try {
            per_replicate[r] = run_replicate(data, names, opts, bk, seed, r);
        } catch (const std::exception& ex) {
            throw BootstrapReplicateError(r, ex.what());
        }
    }
    return aggregate(std::move(per_replicate), names, replicates, seed);
}

BootstrapTable filter_table(const BootstrapTable& table, double min_prob) {
    if (min_prob < 0.0 || min_prob > 1.0) throw Error("filter_table: min_prob out of [0,1]");
    BootstrapTable out;
    out.replicates = table.replicates;
    out.base_seed = table.base_seed;
    out.names = table.names;
    for (const auto& entry : table.entries)
        if (entry.probability > min_prob) out.entries.push_back(entry);
    return out;
}

std::string bootstrap_table_csv(const BootstrapTable& table) {
    std::string out = "edge,prob\n";
    char buf[16];
    for (const auto& entry : table.entries) {
        std::snprintf(buf, sizeof(buf), "%.2f", entry.probability);
        out += csv_escape(render_edge(entry.edge));
        out += ',';
        out += buf;
        out += '\n';
    }
    return out;
}

}  // namespace fcikit
