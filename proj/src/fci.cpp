#include "fcikit/fci.hpp"

#include <algorithm>
#include <functional>

#include <json.hpp>

#include "fcikit/error.hpp"

namespace fcikit {

namespace {

std::pair<int, int> ordered(int i, int j) { return {std::min(i, j), std::max(i, j)}; }

// Enumerates size-k subsets of the (ascending) pool in lexicographic order of
// member indices; stops early when fn returns true.
template <typename F>
bool for_each_subset(const std::vector<int>& pool, int k, F&& fn) {
    const int n = static_cast<int>(pool.size());
    if (k > n) return false;
    std::vector<int> pos(k);
    for (int i = 0; i < k; ++i) pos[i] = i;
    std::vector<int> subset(k);
    while (true) {
        for (int i = 0; i < k; ++i) subset[i] = pool[pos[i]];
        if (fn(subset)) return true;
        int i = k - 1;
        while (i >= 0 && pos[i] == n - k + i) --i;
        if (i < 0) return false;
        ++pos[i];
        for (int j = i + 1; j < k; ++j) pos[j] = pos[j - 1] + 1;
    }
}

// Engine-side view of a tester restricted to the search universe `names`.
struct TesterView {
    const CiTester& tester;
    std::vector<int> tidx;
    FciLog* log;

    TesterView(const CiTester& t, const std::vector<std::string>& names, FciLog* lg)
        : tester(t), log(lg) {
        const auto& universe = t.variable_names();
        tidx.reserve(names.size());
        for (const auto& name : names) {
            auto it = std::find(universe.begin(), universe.end(), name);
            if (it == universe.end())
                throw Error("tester universe does not cover variable: " + name);
            tidx.push_back(static_cast<int>(it - universe.begin()));
        }
    }

    bool independent(int x, int y, const std::vector<int>& cond) const {
        std::vector<int> tc;
        tc.reserve(cond.size());
        for (int s : cond) tc.push_back(tidx[s]);
        if (log) ++log->tests;
        return tester.is_independent(tidx[x], tidx[y], tc).independent;
    }
};

bool contains(const std::vector<int>& v, int x) {
    return std::find(v.begin(), v.end(), x) != v.end();
}

// Mark placement with background-knowledge and commitment guards. Returns
// whether the mark changed; blocked placements are logged, never applied.
bool try_set_mark(Pag& g, int at, int other, Mark want, const BackgroundKnowledge& bk,
                  FciLog* log, const char* rule) {
    const Mark cur = g.mark(at, other);
    if (cur == want) return false;
    if (want == Mark::Arrow && bk.arrowhead_forbidden_at(at)) {
        if (log)
            log->suppressed.push_back(std::string(rule) + ": arrowhead at exogenous " +
                                      g.nodes()[at] + " on edge {" + g.nodes()[at] + "," +
                                      g.nodes()[other] + "}");
        return false;
    }
    if (cur != Mark::Circle) {
        if (log)
            log->conflicts.push_back(std::string(rule) + ": " + mark_name(want) + " at " +
                                     g.nodes()[at] + " on edge {" + g.nodes()[at] + "," +
                                     g.nodes()[other] + "} conflicts with committed " +
                                     mark_name(cur));
        return false;
    }
    g.set_mark(at, other, want);
    if (log) ++log->rule_firings[rule];
    return true;
}

// Full directed orientation from -> to, applied atomically: if the arrowhead
// is inadmissible, the tail is not placed either.
bool try_orient_directed(Pag& g, int from, int to, const BackgroundKnowledge& bk,
                         FciLog* log, const char* rule) {
    if (bk.arrowhead_forbidden_at(to)) {
        if (log)
            log->suppressed.push_back(std::string(rule) + ": directed edge " +
                                      g.nodes()[from] + " -> " + g.nodes()[to] +
                                      " into exogenous node");
        return false;
    }
    const Mark at_to = g.mark(to, from);
    const Mark at_from = g.mark(from, to);
    if ((at_to != Mark::Circle && at_to != Mark::Arrow) ||
        (at_from != Mark::Circle && at_from != Mark::Tail)) {
        if (log)
            log->conflicts.push_back(std::string(rule) + ": cannot orient " +
                                     g.nodes()[from] + " -> " + g.nodes()[to] +
                                     " over committed marks");
        return false;
    }
    bool changed = false;
    if (at_to == Mark::Circle) {
        g.set_mark(to, from, Mark::Arrow);
        changed = true;
    }
    if (at_from == Mark::Circle) {
        g.set_mark(from, to, Mark::Tail);
        changed = true;
    }
    if (changed && log) ++log->rule_firings[rule];
    return changed;
}

}  // namespace

bool SepsetMap::has(int i, int j) const { return entries_.count(ordered(i, j)) != 0; }

const std::vector<int>& SepsetMap::get(int i, int j) const {
    auto it = entries_.find(ordered(i, j));
    if (it == entries_.end())
        throw Error("SepsetMap: no entry for pair " + std::to_string(i) + "," +
                    std::to_string(j));
    return it->second;
}

void SepsetMap::set(int i, int j, std::vector<int> sepset) {
    std::sort(sepset.begin(), sepset.end());
    entries_[ordered(i, j)] = std::move(sepset);
}

BackgroundKnowledge BackgroundKnowledge::from_names(
    const std::vector<std::string>& universe,
    const std::vector<std::string>& exogenous_names,
    const std::vector<std::pair<std::string, std::string>>& required) {
    BackgroundKnowledge bk;
    auto index_of = [&](const std::string& name) {
        auto it = std::find(universe.begin(), universe.end(), name);
        if (it == universe.end())
            throw Error("background knowledge names unknown variable: " + name);
        return static_cast<int>(it - universe.begin());
    };
    for (const auto& name : exogenous_names) bk.exogenous.insert(index_of(name));
    for (const auto& [from, to] : required)
        bk.required_directed.emplace_back(index_of(from), index_of(to));
    bk.validate(static_cast<int>(universe.size()));
    return bk;
}

void BackgroundKnowledge::validate(int node_count) const {
    for (int v : exogenous)
        if (v < 0 || v >= node_count) throw Error("background knowledge: index out of range");
    for (const auto& [from, to] : required_directed) {
        if (from < 0 || from >= node_count || to < 0 || to >= node_count || from == to)
            throw Error("background knowledge: bad required edge");
        if (exogenous.count(to) != 0)
            throw Error("background knowledge: required edge points into exogenous node");
    }
}

SkeletonResult skeleton_search(const CiTester& tester,
                               const std::vector<std::string>& names,
                               const FciOptions& opts, const BackgroundKnowledge& bk,
                               FciLog* log) {
    const int p = static_cast<int>(names.size());
    bk.validate(p);
    TesterView view(tester, names, log);

    Pag g = complete_pag(names);
    SepsetMap sepsets;

    for (int depth = 0;; ++depth) {
        if (opts.max_depth >= 0 && depth > opts.max_depth) break;

        std::vector<std::vector<int>> frozen(p);
        for (int v = 0; v < p; ++v) frozen[v] = g.adjacent_nodes(v);

        bool pool_large_enough = false;
        for (int v = 0; v < p; ++v)
            if (static_cast<int>(frozen[v].size()) - 1 >= depth) pool_large_enough = true;
        if (!pool_large_enough) break;

        const auto edges = g.edge_list();
        for (const auto& [x, y] : edges) {
            if (!g.adjacent(x, y)) continue;
            auto pool_of = [&](int from, int excl) {
                std::vector<int> pool =
                    opts.stable_skeleton ? frozen[from] : g.adjacent_nodes(from);
                pool.erase(std::remove(pool.begin(), pool.end(), excl), pool.end());
                return pool;
            };
            bool removed = false;
            for (const auto& pool : {pool_of(x, y), pool_of(y, x)}) {
                removed = for_each_subset(pool, depth, [&](const std::vector<int>& s) {
                    if (!view.independent(x, y, s)) return false;
                    g.remove_edge(x, y);
                    sepsets.set(x, y, s);
                    if (log) log->removals.push_back({x, y, s, "skeleton"});
                    return true;
                });
                if (removed) break;
            }
        }
    }
    return {std::move(g), std::move(sepsets)};
}

Pag orient_colliders(Pag pag, const SepsetMap& sepsets, const BackgroundKnowledge& bk,
                     FciLog* log) {
    bk.validate(pag.node_count());
    for (int z = 0; z < pag.node_count(); ++z) {
        const auto adj = pag.adjacent_nodes(z);
        for (std::size_t ix = 0; ix < adj.size(); ++ix) {
            for (std::size_t iy = ix + 1; iy < adj.size(); ++iy) {
                const int x = adj[ix], y = adj[iy];
                if (pag.adjacent(x, y)) continue;
                if (!sepsets.has(x, y))
                    throw MissingSepsetError(pag.nodes()[x], pag.nodes()[y]);
                if (contains(sepsets.get(x, y), z)) continue;
                try_set_mark(pag, z, x, Mark::Arrow, bk, log, "collider");
                try_set_mark(pag, z, y, Mark::Arrow, bk, log, "collider");
            }
        }
    }
    return pag;
}

SkeletonResult pds_refine(Pag pag, SepsetMap sepsets, const CiTester& tester,
                          const FciOptions& opts, const BackgroundKnowledge& bk,
                          FciLog* log) {
    const int p = pag.node_count();
    bk.validate(p);
    TesterView view(tester, pag.nodes(), log);

    // Possible-D-SEP pools on the collider-oriented graph, before any removal
    std::vector<std::vector<int>> pds(p);
    for (int v = 0; v < p; ++v) {
        const auto s = possible_d_sep(pag, v);
        pds[v].assign(s.begin(), s.end());
    }

    for (const auto& [x, y] : pag.edge_list()) {
        auto pool_of = [&](int from, int excl) {
            std::vector<int> pool = pds[from];
            pool.erase(std::remove_if(pool.begin(), pool.end(),
                                      [&](int v) { return v == excl || v == from; }),
                       pool.end());
            return pool;
        };
        const std::vector<int> pool_x = pool_of(x, y), pool_y = pool_of(y, x);
        const int largest = static_cast<int>(std::max(pool_x.size(), pool_y.size()));
        const int max_d = opts.max_depth < 0 ? largest : std::min(opts.max_depth, largest);

        bool removed = false;
        // size-0 subsets were exhausted during the skeleton phase
        for (int d = 1; d <= max_d && !removed; ++d) {
            for (const auto* pool : {&pool_x, &pool_y}) {
                removed = for_each_subset(*pool, d, [&](const std::vector<int>& s) {
                    if (!view.independent(x, y, s)) return false;
                    pag.remove_edge(x, y);
                    sepsets.set(x, y, s);
                    if (log) log->removals.push_back({x, y, s, "pds"});
                    return true;
                });
                if (removed) break;
            }
        }
    }

    // reset to circles and re-orient colliders against the enlarged sepset map
    for (const auto& [a, b] : pag.edge_list()) {
        pag.set_mark(a, b, Mark::Circle);
        pag.set_mark(b, a, Mark::Circle);
    }
    pag = orient_colliders(std::move(pag), sepsets, bk, log);
    return {std::move(pag), std::move(sepsets)};
}

namespace {

bool rule_r1(Pag& g, const BackgroundKnowledge& bk, FciLog* log) {
    bool changed = false;
    for (int b = 0; b < g.node_count(); ++b) {
        for (int a : g.adjacent_nodes(b)) {
            if (g.mark(b, a) != Mark::Arrow) continue;  // a *-> b
            for (int c : g.adjacent_nodes(b)) {
                if (c == a || g.adjacent(a, c)) continue;
                if (g.mark(b, c) != Mark::Circle) continue;  // b o-* c
                changed |= try_orient_directed(g, b, c, bk, log, "R1");
            }
        }
    }
    return changed;
}

bool rule_r2(Pag& g, const BackgroundKnowledge& bk, FciLog* log) {
    bool changed = false;
    for (int a = 0; a < g.node_count(); ++a) {
        for (int c : g.adjacent_nodes(a)) {
            if (g.mark(c, a) != Mark::Circle) continue;  // a *-o c
            for (int b : g.adjacent_nodes(a)) {
                if (b == c || !g.adjacent(b, c)) continue;
                const bool chain_left = g.mark(a, b) == Mark::Tail &&
                                        g.mark(b, a) == Mark::Arrow &&
                                        g.mark(c, b) == Mark::Arrow;  // a -> b *-> c
                const bool chain_right = g.mark(b, a) == Mark::Arrow &&
                                         g.mark(b, c) == Mark::Tail &&
                                         g.mark(c, b) == Mark::Arrow;  // a *-> b -> c
                if (!chain_left && !chain_right) continue;
                changed |= try_set_mark(g, c, a, Mark::Arrow, bk, log, "R2");
                break;
            }
        }
    }
    return changed;
}

bool rule_r3(Pag& g, const BackgroundKnowledge& bk, FciLog* log) {
    bool changed = false;
    for (int b = 0; b < g.node_count(); ++b) {
        for (int d : g.adjacent_nodes(b)) {
            if (g.mark(b, d) != Mark::Circle) continue;  // d *-o b
            const auto shared = g.adjacent_nodes(b);
            for (std::size_t ix = 0; ix < shared.size(); ++ix) {
                for (std::size_t iy = ix + 1; iy < shared.size(); ++iy) {
                    const int x = shared[ix], y = shared[iy];
                    if (x == d || y == d || g.adjacent(x, y)) continue;
                    if (!g.adjacent(x, d) || !g.adjacent(y, d)) continue;
                    if (g.mark(b, x) != Mark::Arrow || g.mark(b, y) != Mark::Arrow)
                        continue;  // x *-> b <-* y
                    if (g.mark(d, x) != Mark::Circle || g.mark(d, y) != Mark::Circle)
                        continue;  // x *-o d o-* y
                    changed |= try_set_mark(g, b, d, Mark::Arrow, bk, log, "R3");
                }
            }
        }
    }
    return changed;
}

// Discriminating-path search for R4: path <theta, ..., a, b, c> where every
// node strictly between theta and b is a collider on the path and a parent of
// c, and theta is not adjacent to c.
bool rule_r4(Pag& g, const SepsetMap& sepsets, const BackgroundKnowledge& bk,
             FciLog* log) {
    bool changed = false;
    for (int b = 0; b < g.node_count(); ++b) {
        for (int c : g.adjacent_nodes(b)) {
            if (g.mark(b, c) != Mark::Circle) continue;  // b o-* c

            std::vector<int> path{c, b};
            std::vector<char> on_path(g.node_count(), 0);
            on_path[c] = on_path[b] = 1;

            std::function<bool()> extend = [&]() -> bool {
                const int head = path.back();
                for (int d : g.adjacent_nodes(head)) {
                    if (on_path[d]) continue;
                    if (g.mark(head, d) != Mark::Arrow) continue;  // d *-> head
                    if (path.size() >= 3 && !g.adjacent(d, c)) {
                        // theta found; orient per membership of b in sepset(theta, c)
                        const int theta = d;
                        const int a = path[2];
                        if (!sepsets.has(theta, c)) {
                            if (log)
                                log->warnings.push_back(
                                    "R4: no sepset recorded for " + g.nodes()[theta] +
                                    "," + g.nodes()[c] + "; orientation skipped");
                            continue;
                        }
                        bool fired;
                        if (contains(sepsets.get(theta, c), b)) {
                            fired = try_orient_directed(g, b, c, bk, log, "R4");
                        } else {
                            fired = try_set_mark(g, a, b, Mark::Arrow, bk, log, "R4");
                            fired |= try_set_mark(g, b, c, Mark::Arrow, bk, log, "R4");
                            fired |= try_set_mark(g, c, b, Mark::Arrow, bk, log, "R4");
                        }
                        if (fired) return true;
                        continue;
                    }
                    if (!g.adjacent(d, c)) continue;  // too short to close, cannot pass
                    // d must be a parent of c and collider-capable to extend
                    if (g.mark(d, c) != Mark::Tail || g.mark(c, d) != Mark::Arrow) continue;
                    if (g.mark(d, head) != Mark::Arrow) continue;
                    path.push_back(d);
                    on_path[d] = 1;
                    const bool fired = extend();
                    path.pop_back();
                    on_path[d] = 0;
                    if (fired) return true;
                }
                return false;
            };
            changed |= extend();
        }
    }
    return changed;
}

bool rule_r8(Pag& g, const BackgroundKnowledge& bk, FciLog* log) {
    bool changed = false;
    for (int a = 0; a < g.node_count(); ++a) {
        for (int c : g.adjacent_nodes(a)) {
            if (g.mark(a, c) != Mark::Circle || g.mark(c, a) != Mark::Arrow)
                continue;  // a o-> c
            for (int b : g.adjacent_nodes(a)) {
                if (b == c || !g.adjacent(b, c)) continue;
                if (g.mark(b, c) != Mark::Tail || g.mark(c, b) != Mark::Arrow)
                    continue;  // b -> c
                const bool a_to_b = g.mark(a, b) == Mark::Tail &&
                                    (g.mark(b, a) == Mark::Arrow ||
                                     g.mark(b, a) == Mark::Circle);  // a -> b or a -o b
                if (!a_to_b) continue;
                changed |= try_set_mark(g, a, c, Mark::Tail, bk, log, "R8");
                break;
            }
        }
    }
    return changed;
}

// Uncovered possibly-directed paths from src to dst with at least min_edges
// edges; visitor receives the first hop and may stop the walk by returning true.
bool for_uncovered_pd_paths(const Pag& g, int src, int dst, int min_edges,
                            const std::function<bool(int)>& visitor) {
    std::vector<int> path{src};
    std::vector<char> on_path(g.node_count(), 0);
    on_path[src] = 1;

    std::function<bool()> walk = [&]() -> bool {
        const int u = path.back();
        for (int w : g.adjacent_nodes(u)) {
            if (on_path[w]) continue;
            if (g.mark(u, w) == Mark::Arrow) continue;  // not possibly directed
            if (path.size() >= 2 && g.adjacent(path[path.size() - 2], w))
                continue;  // covered triple
            if (w == dst) {
                if (static_cast<int>(path.size()) >= min_edges &&
                    visitor(path.size() >= 2 ? path[1] : w))
                    return true;
                continue;
            }
            path.push_back(w);
            on_path[w] = 1;
            const bool stop = walk();
            path.pop_back();
            on_path[w] = 0;
            if (stop) return true;
        }
        return false;
    };
    return walk();
}

bool rule_r9(Pag& g, const BackgroundKnowledge& bk, FciLog* log) {
    bool changed = false;
    for (int a = 0; a < g.node_count(); ++a) {
        for (int c : g.adjacent_nodes(a)) {
            if (g.mark(a, c) != Mark::Circle || g.mark(c, a) != Mark::Arrow)
                continue;  // a o-> c
            const bool found = for_uncovered_pd_paths(
                g, a, c, 2, [&](int first) { return !g.adjacent(first, c); });
            if (found) changed |= try_set_mark(g, a, c, Mark::Tail, bk, log, "R9");
        }
    }
    return changed;
}

bool rule_r10(Pag& g, const BackgroundKnowledge& bk, FciLog* log) {
    bool changed = false;
    for (int c = 0; c < g.node_count(); ++c) {
        std::vector<int> parents;
        for (int v : g.adjacent_nodes(c))
            if (g.mark(v, c) == Mark::Tail && g.mark(c, v) == Mark::Arrow)
                parents.push_back(v);
        if (parents.size() < 2) continue;
        for (int a : g.adjacent_nodes(c)) {
            if (g.mark(a, c) != Mark::Circle || g.mark(c, a) != Mark::Arrow)
                continue;  // a o-> c
            bool fired = false;
            for (std::size_t ib = 0; ib < parents.size() && !fired; ++ib) {
                for (std::size_t id = 0; id < parents.size() && !fired; ++id) {
                    if (ib == id) continue;
                    const int bnode = parents[ib], dnode = parents[id];
                    std::set<int> mu, omega;
                    for_uncovered_pd_paths(g, a, bnode, 1, [&](int first) {
                        mu.insert(first);
                        return false;
                    });
                    if (mu.empty()) continue;
                    for_uncovered_pd_paths(g, a, dnode, 1, [&](int first) {
                        omega.insert(first);
                        return false;
                    });
                    for (int m : mu) {
                        for (int w : omega) {
                            if (m == w || g.adjacent(m, w)) continue;
                            fired = true;
                            break;
                        }
                        if (fired) break;
                    }
                }
            }
            if (fired) changed |= try_set_mark(g, a, c, Mark::Tail, bk, log, "R10");
        }
    }
    return changed;
}

}  // namespace

Pag apply_orientation_rules(Pag pag, const SepsetMap& sepsets,
                            const BackgroundKnowledge& bk, const FciOptions& opts,
                            FciLog* log) {
    bk.validate(pag.node_count());

    // background knowledge first: exogenous-incident edges become e -> v,
    // except between two exogenous nodes, which stays circle-circle
    for (int e : bk.exogenous) {
        for (int v : pag.adjacent_nodes(e)) {
            if (bk.exogenous.count(v) != 0) {
                if (e < v && log)
                    log->warnings.push_back("edge between exogenous nodes " +
                                            pag.nodes()[e] + " and " + pag.nodes()[v] +
                                            " left circle-circle");
                continue;
            }
            try_orient_directed(pag, e, v, bk, log, "background-knowledge");
        }
    }
    for (const auto& [from, to] : bk.required_directed)
        if (pag.adjacent(from, to))
            try_orient_directed(pag, from, to, bk, log, "background-knowledge");

    bool changed = true;
    while (changed) {
        changed = false;
        changed |= rule_r1(pag, bk, log);
        changed |= rule_r2(pag, bk, log);
        changed |= rule_r3(pag, bk, log);
        changed |= rule_r4(pag, sepsets, bk, log);
        if (opts.rule_set == RuleSet::R1ToR4PlusR8ToR10) {
            changed |= rule_r8(pag, bk, log);
            changed |= rule_r9(pag, bk, log);
            changed |= rule_r10(pag, bk, log);
        }
    }
    return pag;
}

FciRun fci(const CiTester& tester, const std::vector<std::string>& names,
           const FciOptions& opts, const BackgroundKnowledge& bk) {
    if (opts.alpha <= 0.0 || opts.alpha >= 1.0) throw Error("fci: alpha out of (0,1)");
    if (opts.max_depth < -1) throw Error("fci: max_depth must be -1 or >= 0");

    FciLog log;
    SkeletonResult sk = skeleton_search(tester, names, opts, bk, &log);
    Pag oriented = orient_colliders(std::move(sk.pag), sk.sepsets, bk, &log);
    SkeletonResult refined =
        pds_refine(std::move(oriented), std::move(sk.sepsets), tester, opts, bk, &log);
    Pag final_pag =
        apply_orientation_rules(std::move(refined.pag), refined.sepsets, bk, opts, &log);
    return FciRun{std::move(final_pag), std::move(refined.sepsets), std::move(log)};
}

std::string fci_report_json(const FciRun& run, const FciOptions& opts,
                            const BackgroundKnowledge& bk) {
    nlohmann::json j;
    j["options"] = {
        {"alpha", opts.alpha},
        {"max_depth", opts.max_depth},
        {"stable_skeleton", opts.stable_skeleton},
        {"rule_set",
         opts.rule_set == RuleSet::R1ToR4PlusR8ToR10 ? "R1-R4+R8-R10" : "R1-R4"}};
    std::vector<std::string> exo;
    for (int v : bk.exogenous) exo.push_back(run.pag.nodes()[v]);
    j["exogenous"] = exo;
    j["test_count"] = run.log.tests;

    j["removals"] = nlohmann::json::array();
    for (const auto& rec : run.log.removals) {
        std::vector<std::string> sep;
        for (int s : rec.sepset) sep.push_back(run.pag.nodes()[s]);
        j["removals"].push_back({{"a", run.pag.nodes()[rec.a]},
                                 {"b", run.pag.nodes()[rec.b]},
                                 {"sepset", sep},
                                 {"stage", rec.stage}});
    }
    j["suppressed"] = run.log.suppressed;
    j["conflicts"] = run.log.conflicts;
    j["warnings"] = run.log.warnings;
    j["rule_firings"] = run.log.rule_firings;
    j["pag"] = nlohmann::json::parse(to_json(run.pag));
    return j.dump(2) + "\n";
}

}  // namespace fcikit
