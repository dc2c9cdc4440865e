#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "inductlab/norms.hpp"

namespace inductlab {

struct ModelConfig {
    int embed_dim = 64;
    std::vector<int> hidden_dims = {128, 128};
    std::uint64_t seed = 0;
    double learning_rate = 1e-3;
    double weight_decay = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int max_epochs = 50;
    int batch_size = 32;

    void validate() const; // throws Error on out-of-range values
};

struct Layer {
    int in = 0;
    int out = 0;
    std::vector<double> w; // row-major, out x in
    std::vector<double> b; // out
};

/// Parameter-shaped value container, shared by gradients and optimizer
/// moments so shapes mirror the model by construction.
struct TensorSet {
    std::vector<double> embeddings;
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    void zero();
};

struct OptimizerState {
    TensorSet m;
    TensorSet v;
    std::uint64_t step_count = 0;
};

/// Token-embedding + feedforward property-judgment classifier.
///
/// The encoder is two-slot: mean of the concept-token rows concatenated with
/// the mean of the property-token rows (dimension 2 * embed_dim), feeding
/// rectified hidden layers and a sigmoid scalar output. Vocabulary rows are
/// append-only; extending the vocabulary never perturbs existing rows.
///
/// Single-writer: training and adaptation mutate the model and must be
/// serialized. Read-only forwards on a frozen model are safe concurrently.
struct PropertyJudgmentModel {
    ModelConfig config;
    std::vector<std::string> vocab; // row order
    std::unordered_map<std::string, int> token_index;
    std::vector<double> embeddings; // vocab.size() x embed_dim
    std::vector<Layer> layers;      // hidden layers then the scalar output layer

    int input_dim() const { return 2 * config.embed_dim; }
    bool has_token(std::string_view token) const;
};

/// Lowercases, splits on whitespace, strips trailing punctuation (.,!?;:).
std::vector<std::string> tokenize(std::string_view text);

/// Seeded Gaussian init: embeddings N(0, 0.1^2), layer weights N(0, 2/fan_in),
/// zero biases, zero moments. Deterministic given (config, vocab).
std::pair<PropertyJudgmentModel, OptimizerState>
init_model(const ModelConfig& config, const std::vector<std::string>& vocab);

/// Concatenation of the concept-token mean and the property-token mean.
/// Throws UnknownToken for tokens not in the vocabulary.
std::vector<double> encode(const PropertyJudgmentModel& model,
                           const std::string& concept_name, const std::string& property);

/// Sigmoid of the final logit, nudged off the closed endpoints so the output
/// stays strictly inside (0, 1).
double forward(const PropertyJudgmentModel& model, std::span<const double> input);

double predict_probability(const PropertyJudgmentModel& model,
                           const std::string& concept_name, const std::string& property);

/// Mean binary cross-entropy over the batch plus exact gradients for every
/// parameter, including the embedding rows touched by the batch.
double loss_and_grads(const PropertyJudgmentModel& model,
                      std::span<const LabeledSentence> batch, TensorSet& grads);

/// Decoupled-weight-decay Adam with bias correction. Decay applies to
/// weights and embeddings, never to biases. step_count advances by one.
void adamw_step(PropertyJudgmentModel& model, OptimizerState& state, const TensorSet& grads);

struct EvalMetrics {
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double accuracy = 0.0;
};

/// Positive-class F1 with the decision threshold fixed at p > 0.5.
EvalMetrics evaluate_f1(const PropertyJudgmentModel& model,
                        std::span<const LabeledSentence> examples);

/// Appends rows for new tokens (init Gaussian from `seed`) with zeroed
/// moments. Existing rows are bit-unchanged. Throws TokenExists.
void extend_vocab(PropertyJudgmentModel& model, OptimizerState& state,
                  const std::vector<std::string>& new_tokens, std::uint64_t seed);

/// Appends any tokens of `text` missing from the vocabulary, each seeded by
/// its own name so the result is independent of encounter order.
void ensure_tokens(PropertyJudgmentModel& model, OptimizerState& state, std::string_view text);

/// Mean of the concept's token embedding rows (pre-contextualized).
std::vector<double> concept_embedding(const PropertyJudgmentModel& model,
                                      const std::string& concept_name);

struct Snapshot {
    std::vector<std::string> vocab;
    std::vector<double> embeddings;
    std::vector<Layer> layers;
    OptimizerState state;
};

Snapshot snapshot(const PropertyJudgmentModel& model, const OptimizerState& state);

/// Makes every parameter and moment bit-identical to capture time. Throws
/// ShapeMismatch when the snapshot comes from a different architecture or a
/// different vocabulary size.
void restore(PropertyJudgmentModel& model, OptimizerState& state, const Snapshot& snap);

/// Drops appended rows beyond `vocab_size`. Rows are append-only, so this
/// exactly undoes extend_vocab.
void truncate_vocab(PropertyJudgmentModel& model, OptimizerState& state, std::size_t vocab_size);

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double val_f1 = 0.0;
    bool best = false;
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
    int best_epoch = -1;
    double best_val_f1 = 0.0;
};

/// Seeded-shuffled mini-batch epochs; retains (and finally restores) the
/// parameter/optimizer snapshot with the best validation F1.
TrainHistory train(PropertyJudgmentModel& model, OptimizerState& state,
                   const DatasetSplit& split);

// Bit-exact checkpoint serialization (config, vocab, tensors, moments).
void save_checkpoint(const PropertyJudgmentModel& model, const OptimizerState& state,
                     const std::string& path);
void write_checkpoint(const PropertyJudgmentModel& model, const OptimizerState& state,
                      std::ostream& out);
std::pair<PropertyJudgmentModel, OptimizerState> load_checkpoint(const std::string& path);
std::pair<PropertyJudgmentModel, OptimizerState> read_checkpoint(std::istream& in);

} // namespace inductlab
