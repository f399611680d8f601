#ifndef FCIKIT_FCI_HPP
#define FCIKIT_FCI_HPP

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fcikit/citest.hpp"
#include "fcikit/graph.hpp"

namespace fcikit {

/// Conditioning sets that separated removed pairs, keyed by unordered pair.
/// An entry exists iff the pair was rendered non-adjacent by a test.
class SepsetMap {
public:
    bool has(int i, int j) const;
    const std::vector<int>& get(int i, int j) const;
    void set(int i, int j, std::vector<int> sepset);
    const std::map<std::pair<int, int>, std::vector<int>>& entries() const {
        return entries_;
    }

private:
    std::map<std::pair<int, int>, std::vector<int>> entries_;
};

/// Exogeneity constraints: no arrowhead may ever point at an exogenous node,
/// and its incident edges are finalized outward-directed before the rules run.
struct BackgroundKnowledge {
    std::set<int> exogenous;
    std::vector<std::pair<int, int>> required_directed;

    static BackgroundKnowledge from_names(
        const std::vector<std::string>& universe,
        const std::vector<std::string>& exogenous_names,
        const std::vector<std::pair<std::string, std::string>>& required = {});

    bool arrowhead_forbidden_at(int v) const { return exogenous.count(v) != 0; }
    void validate(int node_count) const;
};

enum class RuleSet { R1ToR4, R1ToR4PlusR8ToR10 };

struct FciOptions {
    double alpha = 0.05;
    int max_depth = -1;  // -1 = unlimited
    bool stable_skeleton = true;
    RuleSet rule_set = RuleSet::R1ToR4PlusR8ToR10;
};

struct RemovalRecord {
    int a = 0;
    int b = 0;
    std::vector<int> sepset;
    std::string stage;  // "skeleton" or "pds"
};

struct FciLog {
    std::vector<RemovalRecord> removals;
    std::vector<std::string> suppressed;  // arrowheads blocked by background knowledge
    std::vector<std::string> conflicts;   // rule demanded a mark that contradicts a committed one
    std::vector<std::string> warnings;
    std::map<std::string, long> rule_firings;  // marks placed, keyed by rule name
    long tests = 0;
};

struct SkeletonResult {
    Pag pag;
    SepsetMap sepsets;
};

// PC-style adjacency phase (PC-stable by default: adjacency sets frozen per
// depth level). Subsets are enumerated in lexicographic order of sorted member
// indices and the first separating set is kept.
SkeletonResult skeleton_search(const CiTester& tester,
                               const std::vector<std::string>& names,
                               const FciOptions& opts, const BackgroundKnowledge& bk,
                               FciLog* log = nullptr);

// Unshielded-collider orientation: x *-> z <-* y whenever z is outside
// sepset(x, y). Arrowheads at exogenous nodes are suppressed and logged.
Pag orient_colliders(Pag pag, const SepsetMap& sepsets, const BackgroundKnowledge& bk,
                     FciLog* log = nullptr);

// Possible-D-SEP refinement: further removals conditioned on subsets of each
// endpoint's Possible-D-SEP set, then a circle reset and collider re-run.
SkeletonResult pds_refine(Pag pag, SepsetMap sepsets, const CiTester& tester,
                          const FciOptions& opts, const BackgroundKnowledge& bk,
                          FciLog* log = nullptr);

// Final orientation rules (R1-R4, plus the tail-completing R8-R10 under the
// no-selection-bias rule set), applied to fixpoint after exogenous-incident
// edges are finalized outward.
Pag apply_orientation_rules(Pag pag, const SepsetMap& sepsets,
                            const BackgroundKnowledge& bk, const FciOptions& opts,
                            FciLog* log = nullptr);

struct FciRun {
    Pag pag;
    SepsetMap sepsets;
    FciLog log;
};

FciRun fci(const CiTester& tester, const std::vector<std::string>& names,
           const FciOptions& opts, const BackgroundKnowledge& bk);

// Run report: options, test count, removal log with sepsets, suppression and
// conflict logs, final PAG.
std::string fci_report_json(const FciRun& run, const FciOptions& opts,
                            const BackgroundKnowledge& bk);

}  // namespace fcikit

#endif
