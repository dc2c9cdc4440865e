#include "inductlab/induction.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "inductlab/error.hpp"
#include "inductlab/rng.hpp"

namespace inductlab {

void InductionTrial::validate() const {
    require(!adaptation_set.empty(), "EmptyConceptSet",
            "trial " + trial_id + " has an empty adaptation set");
    const std::set<std::string> adapt(adaptation_set.begin(), adaptation_set.end());
    for (const auto& [label, concepts] : generalization_sets) {
        require(!concepts.empty(), "EmptyGeneralizationSet",
                "trial " + trial_id + " set " + label + " is empty");
        for (const auto& c : concepts)
            require(!adapt.count(c), "AdaptationOverlap",
                    "trial " + trial_id + ": " + c + " is in both the adaptation set and " + label);
    }
}

AdaptOutcome adapt(PropertyJudgmentModel& model, OptimizerState& state,
                   const std::vector<LabeledSentence>& premises, int max_steps) {
    if (premises.empty()) fail("EmptyBatch", "adapt requires premise sentences");

    auto all_correct = [&] {
        for (const auto& premise : premises)
            if (predict_probability(model, premise.concept_name, premise.property) <= 0.5)
                return false;
        return true;
    };

    AdaptOutcome outcome;
    TensorSet grads;
    while (true) {
        if (all_correct()) {
            outcome.converged = true;
            return outcome;
        }
        if (outcome.steps_used >= max_steps) return outcome; // diverged, caller flags it
        loss_and_grads(model, premises, grads);
        adamw_step(model, state, grads);
        ++outcome.steps_used;
    }
}

double mean_log_probability(const std::vector<double>& log_probs) {
    if (log_probs.empty()) fail("EmptyGeneralizationSet", "no log-probabilities to average");
    double sum = 0.0;
    for (double lp : log_probs) sum += lp;
    return sum / static_cast<double>(log_probs.size());
}

GenScore generalization_score(const PropertyJudgmentModel& model,
                              const std::vector<std::string>& concepts,
                              const std::string& novel_property) {
    if (concepts.empty()) fail("EmptyGeneralizationSet", "generalization set is empty");
    GenScore result;
    std::vector<double> log_probs;
    log_probs.reserve(concepts.size());
    for (const auto& concept_name : concepts) {
        const double p = predict_probability(model, concept_name, novel_property);
        const double lp = std::log(p);
        result.per_concept_log_prob.emplace(concept_name, lp);
        log_probs.push_back(lp);
    }
    result.score = mean_log_probability(log_probs);
    return result;
}

TrialResult run_trial(PropertyJudgmentModel& model, OptimizerState& state,
                      const InductionTrial& trial) {
    trial.validate();

    const Snapshot before = snapshot(model, state);
    const std::size_t base_vocab = model.vocab.size();

    TrialResult result;
    result.trial_id = trial.trial_id;
    try {
        std::vector<std::string> nonce_tokens;
        for (const auto& token : tokenize(trial.novel_property))
            if (!model.has_token(token)) nonce_tokens.push_back(token);
        if (!nonce_tokens.empty())
            extend_vocab(model, state, nonce_tokens,
                         derive_seed(model.config.seed, "trial-nonce", fnv1a(trial.trial_id)));
        for (const auto& concept_name : trial.adaptation_set)
            ensure_tokens(model, state, concept_name);

        std::vector<LabeledSentence> premises;
        premises.reserve(trial.adaptation_set.size());
        for (const auto& concept_name : trial.adaptation_set)
            premises.push_back({sentencize(concept_name, trial.novel_property), concept_name,
                                trial.novel_property, true});

        const AdaptOutcome outcome = adapt(model, state, premises, trial.max_adapt_steps);
        result.adapt_steps_used = outcome.steps_used;
        result.adapt_ok = outcome.converged;

        for (const auto& [label, concepts] : trial.generalization_sets) {
            for (const auto& concept_name : concepts) ensure_tokens(model, state, concept_name);
            result.set_scores.emplace_back(
                label, generalization_score(model, concepts, trial.novel_property));
        }
    } catch (...) {
        truncate_vocab(model, state, base_vocab);
        restore(model, state, before);
        throw;
    }

    // The model is reset bit-exactly so consecutive trials are independent.
    truncate_vocab(model, state, base_vocab);
    restore(model, state, before);
    return result;
}

} // namespace inductlab
