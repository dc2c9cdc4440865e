// Synthetic norm banks shared by the unit and acceptance suites.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "inductlab/model.hpp"
#include "inductlab/norms.hpp"
#include "inductlab/taxonomy.hpp"

namespace fixtures {

struct Bank {
    inductlab::PropertyNorms norms;
    inductlab::Taxonomy taxonomy;
    std::string norms_csv;
    std::string taxonomy_edges;
};

/// 3 categories x 10 concepts; 40 properties: 30 category-correlated with
/// 90% within-category incidence plus 10 idiosyncratic; two of the
/// categories share a taxonomy branch.
Bank acceptance_fixture(std::uint64_t seed);

/// Random small bank (<= 20 concepts, <= 10 properties) with a random
/// taxonomy over the concepts; used for invariant sweeps.
Bank random_bank(std::mt19937_64& rng);

/// Larger random bank with the requested property count, for split checks.
Bank wide_bank(std::uint64_t seed, int property_count);

/// Six animal categories at preset sizes (mammal 52, bird 36, insect 18,
/// fish 14, mollusk 8, reptile 7) with the six preset conflict concepts
/// wired to overlap a foreign category most.
Bank animal_preset_bank();

struct TrainedFixture {
    inductlab::PropertyJudgmentModel model;
    inductlab::OptimizerState state;
    inductlab::DatasetSplit split;
    inductlab::TrainHistory history;
};

/// Negatives -> dataset -> property-disjoint split -> train, with the
/// fixture's tuned configuration.
TrainedFixture train_on(const Bank& bank, std::uint64_t seed, int max_epochs);

/// The configuration train_on uses (kept in one place so tests agree).
inductlab::ModelConfig fixture_config(std::uint64_t seed, int max_epochs);

} // namespace fixtures
