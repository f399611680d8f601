#include "fcikit/sem.hpp"

#include <algorithm>
#include <random>

#include <json.hpp>

#include "fcikit/error.hpp"
#include "fcikit/rng.hpp"

namespace fcikit {

std::vector<std::string> SemModel::observed_names() const {
    std::vector<std::string> out;
    for (int v : dag.observed_indices()) out.push_back(dag.nodes()[v]);
    return out;
}

SemModel random_sem(int p_observed, int q_latent, double expected_degree,
                    std::uint64_t seed) {
    if (p_observed < 2) throw Error("random_sem: need at least two observed nodes");
    if (q_latent < 0) throw Error("random_sem: negative latent count");
    if (expected_degree < 0.0) throw Error("random_sem: negative expected degree");

    std::mt19937_64 rng(mix64(seed));
    const int total = p_observed + q_latent;
    const double edge_prob =
        total > 1 ? std::min(1.0, expected_degree / (total - 1)) : 0.0;

    std::vector<std::string> names;
    for (int i = 0; i < p_observed; ++i) names.push_back("X" + std::to_string(i + 1));
    std::set<int> latent;
    for (int i = 0; i < q_latent; ++i) {
        names.push_back("L" + std::to_string(i + 1));
        latent.insert(p_observed + i);
    }

    // random topological order over observed nodes; latents are roots
    std::vector<int> order(p_observed);
    for (int i = 0; i < p_observed; ++i) order[i] = i;
    for (int i = p_observed - 1; i > 0; --i) {
        const int j = static_cast<int>(bounded(rng, static_cast<std::uint64_t>(i + 1)));
        std::swap(order[i], order[j]);
    }

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> magnitude(0.3, 0.9);
    auto draw_weight = [&]() {
        const double mag = magnitude(rng);
        return unit(rng) < 0.5 ? -mag : mag;
    };

    std::vector<std::pair<int, int>> edges;
    std::map<std::pair<int, int>, double> weights;
    for (int a = 0; a < p_observed; ++a) {
        for (int b = a + 1; b < p_observed; ++b) {
            if (unit(rng) >= edge_prob) continue;
            const auto e = std::make_pair(order[a], order[b]);
            edges.push_back(e);
            weights[e] = draw_weight();
        }
    }
    for (int l = p_observed; l < total; ++l) {
        std::vector<int> children;
        for (int v = 0; v < p_observed; ++v)
            if (unit(rng) < edge_prob) children.push_back(v);
        while (children.size() < 2) {
            const int v = static_cast<int>(
                bounded(rng, static_cast<std::uint64_t>(p_observed)));
            if (std::find(children.begin(), children.end(), v) == children.end())
                children.push_back(v);
        }
        std::sort(children.begin(), children.end());
        for (int v : children) {
            const auto e = std::make_pair(l, v);
            edges.push_back(e);
            weights[e] = draw_weight();
        }
    }

    SemModel model{Dag(std::move(names), edges, latent), std::move(weights),
                   std::vector<double>(total, 1.0)};
    return model;
}

Dataset sample(const SemModel& model, int n, std::uint64_t seed) {
    if (n < 1) throw Error("sample: need at least one row");
    const int total = model.dag.node_count();
    for (int v = 0; v < total; ++v)
        if (model.noise_sd[v] <= 0.0) throw Error("sample: noise sd must be positive");

    std::mt19937_64 rng(mix64(seed));
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<std::vector<double>> columns(total, std::vector<double>(n, 0.0));
    for (int v : model.dag.topological_order()) {
        auto& col = columns[v];
        const double sd = model.noise_sd[v];
        for (int r = 0; r < n; ++r) col[r] = sd * gauss(rng);
        for (int parent : model.dag.parents(v)) {
            const double w = model.weights.at({parent, v});
            const auto& pcol = columns[parent];
            for (int r = 0; r < n; ++r) col[r] += w * pcol[r];
        }
    }

    std::vector<std::string> names;
    std::vector<std::vector<double>> observed;
    for (int v : model.dag.observed_indices()) {
        names.push_back(model.dag.nodes()[v]);
        observed.push_back(std::move(columns[v]));
    }
    return Dataset::from_columns(std::move(names), std::move(observed));
}

std::string sem_to_json(const SemModel& model) {
    nlohmann::json j;
    j["nodes"] = model.dag.nodes();
    std::vector<std::string> latent;
    for (int v : model.dag.latent()) latent.push_back(model.dag.nodes()[v]);
    j["latent"] = latent;
    j["edges"] = nlohmann::json::array();
    for (const auto& [edge, weight] : model.weights)
        j["edges"].push_back({{"from", model.dag.nodes()[edge.first]},
                              {"to", model.dag.nodes()[edge.second]},
                              {"weight", weight}});
    nlohmann::json noise = nlohmann::json::object();
    for (int v = 0; v < model.dag.node_count(); ++v)
        noise[model.dag.nodes()[v]] = model.noise_sd[v];
    j["noise_sd"] = noise;
    return j.dump(2) + "\n";
}

SemModel sem_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    const auto names = j.at("nodes").get<std::vector<std::string>>();
    auto index_of = [&](const std::string& name) {
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw Error("sem_from_json: unknown node " + name);
        return static_cast<int>(it - names.begin());
    };
    std::set<int> latent;
    for (const auto& name : j.at("latent").get<std::vector<std::string>>())
        latent.insert(index_of(name));
    std::vector<std::pair<int, int>> edges;
    std::map<std::pair<int, int>, double> weights;
    for (const auto& e : j.at("edges")) {
        const auto edge = std::make_pair(index_of(e.at("from").get<std::string>()),
                                         index_of(e.at("to").get<std::string>()));
        edges.push_back(edge);
        weights[edge] = e.at("weight").get<double>();
    }
    std::vector<double> noise(names.size(), 1.0);
    if (j.contains("noise_sd"))
        for (const auto& [name, sd] : j.at("noise_sd").items())
            noise[index_of(name)] = sd.get<double>();
    return SemModel{Dag(names, edges, latent), std::move(weights), std::move(noise)};
}

}  // namespace fcikit
