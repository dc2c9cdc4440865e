#pragma once

#include <map>
#include <string>
#include <vector>

#include "inductlab/model.hpp"

namespace inductlab {

/// One property-induction trial: adapt to premise sentences asserting a
/// novel property of the adaptation concepts, then score how strongly the
/// adapted model projects the property onto each generalization set.
struct InductionTrial {
    std::string trial_id;
    std::string category; // focus category, informational
    std::vector<std::string> adaptation_set;
    std::vector<std::pair<std::string, std::vector<std::string>>> generalization_sets;
    std::string novel_property;
    int max_adapt_steps = 500;

    void validate() const; // adaptation/generalization disjointness, non-emptiness
};

struct AdaptOutcome {
    int steps_used = 0;
    bool converged = false;
};

/// Full-batch gradient steps on the premises (all labeled True) until every
/// premise scores p > 0.5, or max_steps is reached. A trial that hits the
/// cap is flagged as diverged, never silently kept.
AdaptOutcome adapt(PropertyJudgmentModel& model, OptimizerState& state,
                   const std::vector<LabeledSentence>& premises, int max_steps);

struct GenScore {
    double score = 0.0; // mean natural-log probability, <= 0
    std::map<std::string, double> per_concept_log_prob;
};

/// Generalization score: mean over the set of
/// log p(True | sentencize(concept, property)). The model is not mutated.
GenScore generalization_score(const PropertyJudgmentModel& model,
                              const std::vector<std::string>& concepts,
                              const std::string& novel_property);

/// Mean of precomputed log-probabilities; shared arithmetic for GenScore.
double mean_log_probability(const std::vector<double>& log_probs);

struct TrialResult {
    std::string trial_id;
    int adapt_steps_used = 0;
    bool adapt_ok = false;
    std::vector<std::pair<std::string, GenScore>> set_scores; // in trial set order
};

/// snapshot -> extend_vocab(nonce tokens) -> adapt -> score every set ->
/// restore. The post-trial model is bit-identical to the pre-trial model, so
/// consecutive trials are fully independent. Nonce rows are seeded from the
/// trial_id for reproducibility.
TrialResult run_trial(PropertyJudgmentModel& model, OptimizerState& state,
                      const InductionTrial& trial);

} // namespace inductlab
