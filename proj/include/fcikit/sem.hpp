#ifndef FCIKIT_SEM_HPP
#define FCIKIT_SEM_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fcikit/dataset.hpp"
#include "fcikit/graph.hpp"

namespace fcikit {

/// Linear-Gaussian structural equation model over a weighted DAG with
/// designated latent confounders.
struct SemModel {
    Dag dag;
    std::map<std::pair<int, int>, double> weights;  // (parent, child) -> coefficient
    std::vector<double> noise_sd;                   // per node, strictly positive

    std::vector<std::string> observed_names() const;
};

// Random model: observed-observed edges follow a random topological order with
// inclusion probability expected_degree/(p+q-1); weights are uniform on
// +-[0.3, 0.9]; latents are root-side confounders with at least two observed
// children.
SemModel random_sem(int p_observed, int q_latent, double expected_degree,
                    std::uint64_t seed);

// Ancestral sampling x_v = sum_parents w * x_parent + eps_v with Gaussian
// noise; latent columns are dropped from the returned dataset.
Dataset sample(const SemModel& model, int n, std::uint64_t seed);

std::string sem_to_json(const SemModel& model);
SemModel sem_from_json(const std::string& text);

}  // namespace fcikit

#endif
