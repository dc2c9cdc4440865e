#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "inductlab/error.hpp"
#include "inductlab/harness.hpp"

using namespace inductlab;

namespace {

std::string file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// Small bank plus an initialized (untrained) model covering its tokens.
struct Workbench {
    fixtures::Bank bank;
    PropertyJudgmentModel model;
    OptimizerState state;
};

Workbench make_workbench() {
    Workbench w;
    w.bank = fixtures::acceptance_fixture(2026);
    std::vector<std::string> vocab{"has", "can", "is", "a"};
    std::set<std::string> seen(vocab.begin(), vocab.end());
    for (const auto& concept_name : w.bank.norms.concepts)
        for (const auto& token : tokenize(concept_name))
            if (seen.insert(token).second) vocab.push_back(token);
    ModelConfig config = fixtures::fixture_config(3, 1);
    auto pair = init_model(config, vocab);
    w.model = std::move(pair.first);
    w.state = std::move(pair.second);
    return w;
}

} // namespace

TEST_CASE("default nonce properties are the canonical eight") {
    const auto& properties = default_nonce_properties();
    REQUIRE(properties.size() == 8);
    CHECK(properties[0] == "can dax");
    CHECK(properties[7] == "is vorpal");
    CHECK(properties == std::vector<std::string>{"can dax", "can fep", "has blickets",
                                                 "has feps", "is a tove", "is a wug", "is mimsy",
                                                 "is vorpal"});
}

TEST_CASE("property_overlap is the Jaccard similarity of property unions") {
    std::istringstream in(
        "concept,property,category\n"
        "a,has p1,one\na,has p2,one\na,has p3,one\n"
        "b,has p2,one\nb,has p3,one\nb,has p4,one\n"
        "c,has p9,two\n");
    const auto norms = load_norms(in);
    CHECK(property_overlap(norms, {"a"}, {"a"}) == 1.0);
    CHECK(property_overlap(norms, {"a"}, {"c"}) == 0.0);
    CHECK(property_overlap(norms, {"a"}, {"b"}) == doctest::Approx(0.5));
    CHECK(property_overlap(norms, {"a"}, {"b"}) == property_overlap(norms, {"b"}, {"a"}));
    CHECK_THROWS_WITH_AS(property_overlap(norms, {}, {"a"}),
                         doctest::Contains("EmptyConceptSet"), Error);
}

TEST_CASE("taxonomic trials have the documented shape") {
    Workbench w = make_workbench();
    ExperimentConfig config;
    config.n_range = {1, 2, 3};
    config.repeats = 2;
    config.seed = 11;
    const auto trials = build_taxonomic_trials(w.bank.norms, w.model, config);
    CHECK(trials.size() == 3u * 3u * 2u * 8u); // categories x n x repeats x properties

    for (const auto& trial : trials) {
        const std::size_t m = 10;
        const std::size_t n = trial.adaptation_set.size();
        REQUIRE(trial.generalization_sets.size() == 3);
        std::set<std::string> adapt(trial.adaptation_set.begin(), trial.adaptation_set.end());
        CHECK(adapt.size() == n);
        for (const auto& [label, concepts] : trial.generalization_sets) {
            CHECK(concepts.size() == m - n);
            std::set<std::string> unique(concepts.begin(), concepts.end());
            CHECK(unique.size() == concepts.size());
            if (label != "within") {
                for (const auto& concept_name : concepts)
                    CHECK(w.bank.norms.categories.at(concept_name) != trial.category);
            } else {
                for (const auto& concept_name : concepts) {
                    CHECK(w.bank.norms.categories.at(concept_name) == trial.category);
                    CHECK_FALSE(adapt.count(concept_name));
                }
            }
        }
    }

    const auto again = build_taxonomic_trials(w.bank.norms, w.model, config);
    REQUIRE(again.size() == trials.size());
    for (std::size_t i = 0; i < trials.size(); ++i) {
        CHECK(again[i].trial_id == trials[i].trial_id);
        CHECK(again[i].adaptation_set == trials[i].adaptation_set);
        CHECK(again[i].generalization_sets == trials[i].generalization_sets);
    }
}

TEST_CASE("taxonomic trials reject undersized categories") {
    Workbench w = make_workbench();
    ExperimentConfig config;
    config.n_range = {10}; // category size is 10, needs 11
    const auto call = [&] { build_taxonomic_trials(w.bank.norms, w.model, config); };
    CHECK_THROWS_WITH_AS(call(), doctest::Contains("CategoryTooSmall"), Error);
}

TEST_CASE("conflict trials use the argmax-overlap foreign category") {
    const auto bank = fixtures::animal_preset_bank();
    ExperimentConfig config;
    const auto trials = build_conflict_trials(bank.norms, config);
    CHECK(trials.size() == 48); // 6 concepts x 8 properties
    for (const auto& trial : trials) {
        CHECK(trial.adaptation_set.size() == 1);
        REQUIRE(trial.generalization_sets.size() == 2);
        CHECK(trial.generalization_sets[0].first == "within");
        CHECK(trial.generalization_sets[1].first == "outside");
    }
    // dolphin conflicts toward fish in the preset bank.
    const auto& first = trials.front();
    CHECK(first.adaptation_set[0] == "dolphin");
    CHECK(bank.norms.categories.at(first.generalization_sets[1].second.front()) == "fish");
}

TEST_CASE("conflict concepts without a foreign argmax are skipped with a warning") {
    std::istringstream in(
        "concept,property,category\n"
        "dolphin,has own1,mammal\ndolphin,has own2,mammal\n"
        "ape,has own1,mammal\nape,has own2,mammal\n"
        "carp,has fin1,fish\n");
    const auto norms = load_norms(in);
    ExperimentConfig config;
    config.conflict_concepts = {"dolphin"};
    const auto trials = build_conflict_trials(norms, config);
    CHECK(trials.empty());

    config.conflict_concepts = {"orca"};
    CHECK_THROWS_WITH_AS(build_conflict_trials(norms, config),
                         doctest::Contains("ConceptMissing"), Error);
}

TEST_CASE("run_experiment emits one row per trial and set, in order") {
    Workbench w = make_workbench();
    ExperimentConfig config;
    config.n_range = {1, 2};
    config.repeats = 1;
    config.nonce_properties = {"can dax", "is a wug"};
    config.seed = 5;
    const auto trials = build_taxonomic_trials(w.bank.norms, w.model, config);
    REQUIRE(trials.size() == 3u * 2u * 1u * 2u);

    const auto rows = run_experiment(w.model, w.state, trials, w.bank.norms, 1);
    CHECK(rows.size() == trials.size() * 3);
    for (std::size_t i = 0; i < trials.size(); ++i) {
        CHECK(rows[3 * i].trial_id == trials[i].trial_id);
        CHECK(rows[3 * i].set_label == "within");
        CHECK(rows[3 * i + 1].set_label == "outside_similar");
        CHECK(rows[3 * i + 2].set_label == "outside_random");
        CHECK(rows[3 * i].n == static_cast<int>(trials[i].adaptation_set.size()));
    }
}

TEST_CASE("parallel execution does not change a single byte of the results") {
    Workbench w = make_workbench();
    ExperimentConfig config;
    config.n_range = {1, 2};
    config.repeats = 1;
    config.nonce_properties = {"can dax"};
    config.seed = 9;
    const auto trials = build_taxonomic_trials(w.bank.norms, w.model, config);

    const auto sequential = run_experiment(w.model, w.state, trials, w.bank.norms, 1);
    const auto parallel = run_experiment(w.model, w.state, trials, w.bank.norms, 4);
    write_results_csv(sequential, "harness_seq.csv", {});
    write_results_csv(parallel, "harness_par.csv", {});
    CHECK(file_bytes("harness_seq.csv") == file_bytes("harness_par.csv"));
    std::remove("harness_seq.csv");
    std::remove("harness_par.csv");
}

TEST_CASE("results CSV round-trips and supports the empty table") {
    std::vector<ResultRow> empty;
    write_results_csv(empty, "harness_empty.csv", {"# empty"});
    const auto loaded = read_results_csv("harness_empty.csv");
    CHECK(loaded.empty());
    std::remove("harness_empty.csv");

    Workbench w = make_workbench();
    ExperimentConfig config;
    config.n_range = {1};
    config.repeats = 1;
    config.nonce_properties = {"can dax"};
    const auto trials = build_taxonomic_trials(w.bank.norms, w.model, config);
    const auto rows = run_experiment(w.model, w.state, trials, w.bank.norms, 1);
    write_results_csv(rows, "harness_rows.csv", {"# rows"});
    const auto back = read_results_csv("harness_rows.csv");
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].trial_id == rows[i].trial_id);
        CHECK(back[i].generalization == rows[i].generalization);
        CHECK(back[i].overlap == rows[i].overlap);
        CHECK(back[i].adapt_ok == rows[i].adapt_ok);
    }
    std::remove("harness_rows.csv");
}

TEST_CASE("trial batch CSV round-trips") {
    Workbench w = make_workbench();
    ExperimentConfig config;
    config.n_range = {2};
    config.repeats = 1;
    config.nonce_properties = {"is vorpal"};
    const auto trials = build_taxonomic_trials(w.bank.norms, w.model, config);
    write_trial_batch(trials, "harness_trials.csv", {"# trials"});
    const auto loaded = read_trial_batch("harness_trials.csv");
    REQUIRE(loaded.size() == trials.size());
    for (std::size_t i = 0; i < trials.size(); ++i) {
        CHECK(loaded[i].trial_id == trials[i].trial_id);
        CHECK(loaded[i].adaptation_set == trials[i].adaptation_set);
        CHECK(loaded[i].generalization_sets == trials[i].generalization_sets);
        CHECK(loaded[i].novel_property == trials[i].novel_property);
    }
    std::remove("harness_trials.csv");
}

TEST_CASE("mean cosine similarity of a set with itself is one") {
    Workbench w = make_workbench();
    const std::string& concept_name = w.bank.norms.concepts.front();
    CHECK(mean_cosine_similarity(w.model, {concept_name}, {concept_name}) ==
          doctest::Approx(1.0).epsilon(1e-12));
}
