#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "inductlab/induction.hpp"
#include "inductlab/norms.hpp"

namespace inductlab {

struct ExperimentConfig {
    std::vector<std::string> focus_categories; // empty = all categories large enough
    std::vector<int> n_range = {1, 2, 3, 4, 5};
    int repeats = 10;
    std::vector<std::string> nonce_properties; // empty = default_nonce_properties()
    std::vector<std::string> conflict_concepts; // empty = default_conflict_concepts()
    std::uint64_t seed = 0;
    int max_adapt_steps = 500;
};

/// The eight novel nonce properties, in canonical order.
const std::vector<std::string>& default_nonce_properties();

/// The six preset conflict concepts (used when the norms contain them).
const std::vector<std::string>& default_conflict_concepts();

/// Jaccard similarity of the unions of ground-truth properties of two
/// concept sets. Errors: EmptyConceptSet.
double property_overlap(const PropertyNorms& norms,
                        const std::vector<std::string>& set_a,
                        const std::vector<std::string>& set_g);

/// Per (category, n, repeat, property): a seeded adaptation sample of n
/// category concepts, the within-category remainder, the top m-n outside
/// concepts by mean embedding cosine similarity to the adaptation set
/// (ties lexicographic), and m-n seeded-random outside concepts. The pool is
/// the union of the focus categories. Errors: CategoryTooSmall.
std::vector<InductionTrial> build_taxonomic_trials(const PropertyNorms& norms,
                                                   const PropertyJudgmentModel& model,
                                                   const ExperimentConfig& config);

/// Per (conflict concept, property): singleton adaptation set, own-category
/// remainder as "within", and the argmax-property-overlap foreign category as
/// "outside". Concepts whose best-overlap category is their own are excluded
/// with a warning on stderr. Errors: ConceptMissing.
std::vector<InductionTrial> build_conflict_trials(const PropertyNorms& norms,
                                                  const ExperimentConfig& config);

struct ResultRow {
    std::string trial_id;
    std::string category;
    int n = 0;
    std::string property;
    std::string set_label;
    double generalization = 0.0;
    double overlap = 0.0;
    double cosine_sim = 0.0;
    bool adapt_ok = false;
    int adapt_steps = 0;
};

/// Runs every trial (each on a private model copy when jobs > 1) and emits
/// one row per (trial, generalization set), ordered by (trial_id, set label
/// position). Output bytes are independent of the job count.
std::vector<ResultRow> run_experiment(const PropertyJudgmentModel& model,
                                      const OptimizerState& state,
                                      const std::vector<InductionTrial>& trials,
                                      const PropertyNorms& norms,
                                      int jobs = 1);

/// Mean pairwise cosine similarity between the concept embeddings of two
/// concept sets.
double mean_cosine_similarity(const PropertyJudgmentModel& model,
                              const std::vector<std::string>& set_a,
                              const std::vector<std::string>& set_g);

// Results CSV: header `trial_id,category,n,property,set_label,G,overlap,
// cosine_sim,adapt_ok,adapt_steps`.
void write_results_csv(const std::vector<ResultRow>& rows, const std::string& path,
                       const std::vector<std::string>& header_comments);
std::vector<ResultRow> read_results_csv(const std::string& path);

// Trial batch CSV: header `trial_id,category,n,property,adaptation_concepts,
// set_label,set_concepts`, one row per (trial, set), lists ';'-separated.
void write_trial_batch(const std::vector<InductionTrial>& trials, const std::string& path,
                       const std::vector<std::string>& header_comments);
std::vector<InductionTrial> read_trial_batch(const std::string& path);

} // namespace inductlab
