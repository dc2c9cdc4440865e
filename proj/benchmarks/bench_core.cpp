#include <benchmark/benchmark.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "inductlab/harness.hpp"
#include "inductlab/induction.hpp"
#include "inductlab/model.hpp"
#include "inductlab/norms.hpp"
#include "inductlab/taxonomy.hpp"

using namespace inductlab;

namespace {

Taxonomy random_taxonomy(int nodes) {
    std::mt19937_64 rng(7);
    std::ostringstream edges;
    for (int i = 1; i < nodes; ++i)
        edges << "n" << i << "\tn" << (rng() % static_cast<std::uint64_t>(i)) << "\n";
    std::istringstream in(edges.str());
    return Taxonomy::load(in);
}

void bm_wu_palmer(benchmark::State& state) {
    const Taxonomy t = random_taxonomy(500);
    std::mt19937_64 rng(11);
    for (auto _ : state) {
        const std::string a = "n" + std::to_string(rng() % 500);
        const std::string b = "n" + std::to_string(rng() % 500);
        benchmark::DoNotOptimize(t.wu_palmer(a, b));
    }
}
BENCHMARK(bm_wu_palmer);

void bm_gwup_five(benchmark::State& state) {
    const Taxonomy t = random_taxonomy(500);
    std::mt19937_64 rng(13);
    std::vector<std::string> nodes(5);
    for (auto _ : state) {
        for (auto& n : nodes) n = "n" + std::to_string(rng() % 500);
        benchmark::DoNotOptimize(t.gwup(nodes));
    }
}
BENCHMARK(bm_gwup_five);

void bm_generate_negatives(benchmark::State& state) {
    const auto bank = fixtures::animal_preset_bank();
    for (auto _ : state)
        benchmark::DoNotOptimize(generate_negatives(bank.norms, bank.taxonomy));
}
BENCHMARK(bm_generate_negatives);

void bm_loss_and_grads_batch32(benchmark::State& state) {
    const auto bank = fixtures::acceptance_fixture(1);
    const auto dataset = build_dataset(bank.norms, generate_negatives(bank.norms, bank.taxonomy));
    auto trained = fixtures::train_on(bank, 1, 0);
    std::vector<LabeledSentence> batch(dataset.begin(), dataset.begin() + 32);
    TensorSet grads;
    for (auto _ : state)
        benchmark::DoNotOptimize(loss_and_grads(trained.model, batch, grads));
}
BENCHMARK(bm_loss_and_grads_batch32);

void bm_adamw_step(benchmark::State& state) {
    const auto bank = fixtures::acceptance_fixture(1);
    const auto dataset = build_dataset(bank.norms, generate_negatives(bank.norms, bank.taxonomy));
    auto trained = fixtures::train_on(bank, 1, 0);
    std::vector<LabeledSentence> batch(dataset.begin(), dataset.begin() + 32);
    TensorSet grads;
    loss_and_grads(trained.model, batch, grads);
    for (auto _ : state) adamw_step(trained.model, trained.state, grads);
}
BENCHMARK(bm_adamw_step);

void bm_run_trial(benchmark::State& state) {
    const auto bank = fixtures::acceptance_fixture(1);
    auto trained = fixtures::train_on(bank, 1, 30);
    for (const auto& concept_name : bank.norms.concepts)
        ensure_tokens(trained.model, trained.state, concept_name);

    ExperimentConfig config;
    config.repeats = 1;
    config.seed = 5;
    const auto trials = build_taxonomic_trials(bank.norms, trained.model, config);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            run_trial(trained.model, trained.state, trials[i % trials.size()]));
        ++i;
    }
}
BENCHMARK(bm_run_trial);

} // namespace

BENCHMARK_MAIN();
