#include "inductlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>

#include "inductlab/error.hpp"
#include "inductlab/rng.hpp"

namespace inductlab {

namespace {

double stable_sigmoid(double z) {
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// -[y log p + (1-y) log(1-p)] computed from the logit, finite for any z.
double stable_bce(double z, bool label) {
    const double y = label ? 1.0 : 0.0;
    return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - y * z;
}

void check_shapes(const PropertyJudgmentModel& model, const TensorSet& t, const char* what) {
    bool ok = t.embeddings.size() == model.embeddings.size() &&
              t.weights.size() == model.layers.size() && t.biases.size() == model.layers.size();
    for (std::size_t l = 0; ok && l < model.layers.size(); ++l)
        ok = t.weights[l].size() == model.layers[l].w.size() &&
             t.biases[l].size() == model.layers[l].b.size();
    if (!ok) fail("ShapeMismatch", std::string(what) + " does not mirror the parameter shapes");
}

TensorSet zeros_like(const PropertyJudgmentModel& model) {
    TensorSet t;
    t.embeddings.assign(model.embeddings.size(), 0.0);
    t.weights.resize(model.layers.size());
    t.biases.resize(model.layers.size());
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        t.weights[l].assign(model.layers[l].w.size(), 0.0);
        t.biases[l].assign(model.layers[l].b.size(), 0.0);
    }
    return t;
}

std::vector<int> token_rows(const PropertyJudgmentModel& model, const std::string& text) {
    std::vector<int> rows;
    for (const auto& token : tokenize(text)) {
        auto it = model.token_index.find(token);
        if (it == model.token_index.end())
            fail("UnknownToken", "token not in vocabulary: " + token);
        rows.push_back(it->second);
    }
    if (rows.empty()) fail("UnknownToken", "no tokens survive tokenization of: " + text);
    return rows;
}

void mean_rows(const PropertyJudgmentModel& model, const std::vector<int>& rows, double* out) {
    const int dim = model.config.embed_dim;
    std::fill(out, out + dim, 0.0);
    for (const int r : rows) {
        const double* row = model.embeddings.data() + static_cast<std::size_t>(r) * dim;
        for (int j = 0; j < dim; ++j) out[j] += row[j];
    }
    const double inv = 1.0 / static_cast<double>(rows.size());
    for (int j = 0; j < dim; ++j) out[j] *= inv;
}

// Forward pass retaining pre-activations for backprop. Returns the logit.
double forward_logit(const PropertyJudgmentModel& model, std::span<const double> input,
                     std::vector<std::vector<double>>* activations) {
    std::vector<double> current(input.begin(), input.end());
    if (activations) activations->push_back(current);
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const Layer& layer = model.layers[l];
        std::vector<double> next(static_cast<std::size_t>(layer.out), 0.0);
        for (int o = 0; o < layer.out; ++o) {
            const double* w = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
            double acc = layer.b[static_cast<std::size_t>(o)];
            for (int i = 0; i < layer.in; ++i) acc += w[i] * current[static_cast<std::size_t>(i)];
            next[static_cast<std::size_t>(o)] = acc;
        }
        const bool is_output = l + 1 == model.layers.size();
        if (!is_output)
            for (auto& v : next) v = v > 0.0 ? v : 0.0;
        if (activations && !is_output) activations->push_back(next);
        current = std::move(next);
    }
    return current[0];
}

} // namespace

void ModelConfig::validate() const {
    require(embed_dim >= 1, "DimensionMismatch", "embed_dim must be >= 1");
    for (int h : hidden_dims)
        require(h >= 1, "DimensionMismatch", "hidden dims must be >= 1");
    require(learning_rate > 0.0, "DimensionMismatch", "learning_rate must be positive");
    require(beta1 > 0.0 && beta1 < 1.0, "DimensionMismatch", "beta1 must be in (0,1)");
    require(beta2 > 0.0 && beta2 < 1.0, "DimensionMismatch", "beta2 must be in (0,1)");
    require(max_epochs >= 0, "DimensionMismatch", "max_epochs must be non-negative");
    require(batch_size >= 1, "DimensionMismatch", "batch_size must be >= 1");
}

void TensorSet::zero() {
    std::fill(embeddings.begin(), embeddings.end(), 0.0);
    for (auto& w : weights) std::fill(w.begin(), w.end(), 0.0);
    for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
}

bool PropertyJudgmentModel::has_token(std::string_view token) const {
    return token_index.find(std::string(token)) != token_index.end();
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        while (!current.empty()) {
            const char c = current.back();
            if (c == '.' || c == ',' || c == '!' || c == '?' || c == ';' || c == ':')
                current.pop_back();
            else
                break;
        }
        if (!current.empty()) tokens.push_back(current);
        current.clear();
    };
    for (char raw : text) {
        const auto c = static_cast<unsigned char>(raw);
        if (std::isspace(c)) {
            flush();
        } else {
            current.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    flush();
    return tokens;
}

std::pair<PropertyJudgmentModel, OptimizerState>
init_model(const ModelConfig& config, const std::vector<std::string>& vocab) {
    config.validate();
    if (vocab.empty()) fail("EmptyVocab", "init_model requires a non-empty vocabulary");

    PropertyJudgmentModel model;
    model.config = config;
    model.vocab.reserve(vocab.size());
    for (const auto& token : vocab) {
        if (!model.token_index.emplace(token, static_cast<int>(model.vocab.size())).second)
            fail("DuplicateToken", "vocabulary repeats token: " + token);
        model.vocab.push_back(token);
    }

    GaussianStream embed_rng(derive_seed(config.seed, "init-embeddings"));
    model.embeddings.resize(model.vocab.size() * static_cast<std::size_t>(config.embed_dim));
    for (auto& v : model.embeddings) v = embed_rng.next(0.0, 0.1);

    std::vector<int> dims;
    dims.push_back(2 * config.embed_dim);
    for (int h : config.hidden_dims) dims.push_back(h);
    dims.push_back(1);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Layer layer;
        layer.in = dims[l];
        layer.out = dims[l + 1];
        GaussianStream rng(derive_seed(config.seed, "init-layer", l));
        const double std = std::sqrt(2.0 / static_cast<double>(layer.in));
        layer.w.resize(static_cast<std::size_t>(layer.in) * layer.out);
        for (auto& v : layer.w) v = rng.next(0.0, std);
        layer.b.assign(static_cast<std::size_t>(layer.out), 0.0);
        model.layers.push_back(std::move(layer));
    }

    OptimizerState state;
    state.m = zeros_like(model);
    state.v = zeros_like(model);
    state.step_count = 0;
    return {std::move(model), std::move(state)};
}

std::vector<double> encode(const PropertyJudgmentModel& model,
                           const std::string& concept_name, const std::string& property) {
    const int dim = model.config.embed_dim;
    std::vector<double> input(static_cast<std::size_t>(2 * dim), 0.0);
    mean_rows(model, token_rows(model, concept_name), input.data());
    mean_rows(model, token_rows(model, property), input.data() + dim);
    return input;
}

double forward(const PropertyJudgmentModel& model, std::span<const double> input) {
    if (static_cast<int>(input.size()) != model.input_dim())
        fail("DimensionMismatch", "input dimension " + std::to_string(input.size()) +
                                      " != " + std::to_string(model.input_dim()));
    double p = stable_sigmoid(forward_logit(model, input, nullptr));
    // Keep the output strictly inside (0, 1) even when the logit saturates.
    if (p >= 1.0) p = std::nextafter(1.0, 0.0);
    if (p <= 0.0) p = std::nextafter(0.0, 1.0);
    return p;
}

double predict_probability(const PropertyJudgmentModel& model,
                           const std::string& concept_name, const std::string& property) {
    return forward(model, encode(model, concept_name, property));
}

double loss_and_grads(const PropertyJudgmentModel& model,
                      std::span<const LabeledSentence> batch, TensorSet& grads) {
    if (batch.empty()) fail("EmptyBatch", "loss_and_grads requires a non-empty batch");
    if (grads.embeddings.size() != model.embeddings.size() ||
        grads.weights.size() != model.layers.size())
        grads = zeros_like(model);
    else
        grads.zero();

    const int dim = model.config.embed_dim;
    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    double total_loss = 0.0;

    std::vector<std::vector<double>> activations;
    std::vector<double> delta, prev_delta;
    for (const auto& example : batch) {
        const auto concept_rows = token_rows(model, example.concept_name);
        const auto property_rows = token_rows(model, example.property);
        std::vector<double> input(static_cast<std::size_t>(2 * dim), 0.0);
        mean_rows(model, concept_rows, input.data());
        mean_rows(model, property_rows, input.data() + dim);

        activations.clear();
        const double z = forward_logit(model, input, &activations);
        total_loss += stable_bce(z, example.label) * inv_batch;

        // dL/dz of the batch-mean loss.
        const double y = example.label ? 1.0 : 0.0;
        delta.assign(1, (stable_sigmoid(z) - y) * inv_batch);

        for (std::size_t l = model.layers.size(); l-- > 0;) {
            const Layer& layer = model.layers[l];
            const auto& below = activations[l];
            auto& gw = grads.weights[l];
            auto& gb = grads.biases[l];
            prev_delta.assign(static_cast<std::size_t>(layer.in), 0.0);
            for (int o = 0; o < layer.out; ++o) {
                const double d = delta[static_cast<std::size_t>(o)];
                gb[static_cast<std::size_t>(o)] += d;
                const double* w = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
                double* gwr = gw.data() + static_cast<std::size_t>(o) * layer.in;
                for (int i = 0; i < layer.in; ++i) {
                    gwr[i] += d * below[static_cast<std::size_t>(i)];
                    prev_delta[static_cast<std::size_t>(i)] += d * w[i];
                }
            }
            if (l > 0) {
                // Rectifier gate: gradient flows only where the activation fired.
                for (int i = 0; i < layer.in; ++i)
                    if (below[static_cast<std::size_t>(i)] <= 0.0)
                        prev_delta[static_cast<std::size_t>(i)] = 0.0;
            }
            delta = prev_delta;
        }

        // delta now spans the encoder output: concept half then property half.
        const double inv_c = 1.0 / static_cast<double>(concept_rows.size());
        for (const int r : concept_rows) {
            double* g = grads.embeddings.data() + static_cast<std::size_t>(r) * dim;
            for (int j = 0; j < dim; ++j) g[j] += delta[static_cast<std::size_t>(j)] * inv_c;
        }
        const double inv_p = 1.0 / static_cast<double>(property_rows.size());
        for (const int r : property_rows) {
            double* g = grads.embeddings.data() + static_cast<std::size_t>(r) * dim;
            for (int j = 0; j < dim; ++j)
                g[j] += delta[static_cast<std::size_t>(dim + j)] * inv_p;
        }
    }
    return total_loss;
}

namespace {

void adamw_update(std::vector<double>& params, const std::vector<double>& grads,
                  std::vector<double>& m, std::vector<double>& v, const ModelConfig& cfg,
                  double bias_corr1, double bias_corr2, bool decay) {
    const double lr = cfg.learning_rate;
    for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grads[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
        const double m_hat = m[i] / bias_corr1;
        const double v_hat = v[i] / bias_corr2;
        double update = lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
        if (decay) update += lr * cfg.weight_decay * params[i];
        params[i] -= update;
    }
}

} // namespace

void adamw_step(PropertyJudgmentModel& model, OptimizerState& state, const TensorSet& grads) {
    check_shapes(model, grads, "gradients");
    check_shapes(model, state.m, "first moment");
    check_shapes(model, state.v, "second moment");

    const ModelConfig& cfg = model.config;
    state.step_count += 1;
    const auto step = static_cast<double>(state.step_count);
    const double bias_corr1 = 1.0 - std::pow(cfg.beta1, step);
    const double bias_corr2 = 1.0 - std::pow(cfg.beta2, step);

    adamw_update(model.embeddings, grads.embeddings, state.m.embeddings, state.v.embeddings,
                 cfg, bias_corr1, bias_corr2, /*decay=*/true);
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        adamw_update(model.layers[l].w, grads.weights[l], state.m.weights[l],
                     state.v.weights[l], cfg, bias_corr1, bias_corr2, /*decay=*/true);
        adamw_update(model.layers[l].b, grads.biases[l], state.m.biases[l],
                     state.v.biases[l], cfg, bias_corr1, bias_corr2, /*decay=*/false);
    }
}

EvalMetrics evaluate_f1(const PropertyJudgmentModel& model,
                        std::span<const LabeledSentence> examples) {
    if (examples.empty()) fail("EmptyEvalSet", "evaluate_f1 requires examples");
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (const auto& example : examples) {
        const bool predicted =
            predict_probability(model, example.concept_name, example.property) > 0.5;
        if (predicted && example.label) ++tp;
        else if (predicted && !example.label) ++fp;
        else if (!predicted && !example.label) ++tn;
        else ++fn;
    }
    EvalMetrics metrics;
    metrics.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    metrics.recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    metrics.f1 = (2 * tp + fp + fn)
                     ? 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn)
                     : 0.0;
    metrics.accuracy = static_cast<double>(tp + tn) / static_cast<double>(examples.size());
    return metrics;
}

void extend_vocab(PropertyJudgmentModel& model, OptimizerState& state,
                  const std::vector<std::string>& new_tokens, std::uint64_t seed) {
    for (const auto& token : new_tokens)
        if (model.has_token(token)) fail("TokenExists", "token already in vocabulary: " + token);

    const int dim = model.config.embed_dim;
    GaussianStream rng(seed);
    for (const auto& token : new_tokens) {
        if (!model.token_index.emplace(token, static_cast<int>(model.vocab.size())).second)
            fail("TokenExists", "token repeated in extension: " + token);
        model.vocab.push_back(token);
        for (int j = 0; j < dim; ++j) model.embeddings.push_back(rng.next(0.0, 0.1));
        state.m.embeddings.resize(model.embeddings.size(), 0.0);
        state.v.embeddings.resize(model.embeddings.size(), 0.0);
    }
}

void ensure_tokens(PropertyJudgmentModel& model, OptimizerState& state, std::string_view text) {
    for (const auto& token : tokenize(text)) {
        if (model.has_token(token)) continue;
        // Each row is seeded by its own name, so the embedding a token
        // receives does not depend on when it was first encountered.
        extend_vocab(model, state, {token},
                     derive_seed(model.config.seed, "auto-embed", fnv1a(token)));
    }
}

std::vector<double> concept_embedding(const PropertyJudgmentModel& model,
                                      const std::string& concept_name) {
    std::vector<double> out(static_cast<std::size_t>(model.config.embed_dim), 0.0);
    mean_rows(model, token_rows(model, concept_name), out.data());
    return out;
}

Snapshot snapshot(const PropertyJudgmentModel& model, const OptimizerState& state) {
    return Snapshot{model.vocab, model.embeddings, model.layers, state};
}

void restore(PropertyJudgmentModel& model, OptimizerState& state, const Snapshot& snap) {
    if (snap.vocab.size() != model.vocab.size())
        fail("ShapeMismatch", "snapshot vocabulary size " + std::to_string(snap.vocab.size()) +
                                  " != model vocabulary size " +
                                  std::to_string(model.vocab.size()));
    if (snap.layers.size() != model.layers.size())
        fail("ShapeMismatch", "snapshot layer count differs");
    for (std::size_t l = 0; l < snap.layers.size(); ++l)
        if (snap.layers[l].in != model.layers[l].in || snap.layers[l].out != model.layers[l].out)
            fail("ShapeMismatch", "snapshot layer " + std::to_string(l) + " shape differs");

    model.vocab = snap.vocab;
    model.token_index.clear();
    for (std::size_t i = 0; i < model.vocab.size(); ++i)
        model.token_index.emplace(model.vocab[i], static_cast<int>(i));
    model.embeddings = snap.embeddings;
    model.layers = snap.layers;
    state = snap.state;
}

void truncate_vocab(PropertyJudgmentModel& model, OptimizerState& state, std::size_t vocab_size) {
    if (vocab_size > model.vocab.size())
        fail("ShapeMismatch", "cannot truncate vocabulary upward");
    for (std::size_t i = vocab_size; i < model.vocab.size(); ++i)
        model.token_index.erase(model.vocab[i]);
    model.vocab.resize(vocab_size);
    const std::size_t n = vocab_size * static_cast<std::size_t>(model.config.embed_dim);
    model.embeddings.resize(n);
    state.m.embeddings.resize(n);
    state.v.embeddings.resize(n);
}

TrainHistory train(PropertyJudgmentModel& model, OptimizerState& state,
                   const DatasetSplit& split) {
    TrainHistory history;
    const ModelConfig& cfg = model.config;
    if (cfg.max_epochs == 0 || split.train.empty()) return history;

    // Validation sentences may contain tokens unseen in training; give them
    // deterministic rows up front so per-epoch evaluation never mutates state.
    for (const auto& s : split.val) {
        ensure_tokens(model, state, s.concept_name);
        ensure_tokens(model, state, s.property);
    }

    std::vector<std::size_t> order(split.train.size());
    std::iota(order.begin(), order.end(), 0);

    Snapshot best;
    TensorSet grads;
    std::vector<LabeledSentence> batch;
    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        std::mt19937_64 rng(derive_seed(cfg.seed, "epoch-shuffle", static_cast<std::uint64_t>(epoch)));
        std::shuffle(order.begin(), order.end(), rng);

        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            batch.clear();
            for (std::size_t i = start; i < end; ++i) batch.push_back(split.train[order[i]]);
            const double loss = loss_and_grads(model, batch, grads);
            adamw_step(model, state, grads);
            loss_sum += loss * static_cast<double>(batch.size());
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = loss_sum / static_cast<double>(split.train.size());
        stats.val_f1 = split.val.empty() ? 0.0 : evaluate_f1(model, split.val).f1;
        // Ties go to the later epoch: equal validation F1, more training.
        if (history.best_epoch < 0 || stats.val_f1 >= history.best_val_f1) {
            history.best_epoch = epoch;
            history.best_val_f1 = stats.val_f1;
            stats.best = true;
            best = snapshot(model, state);
        }
        history.epochs.push_back(stats);
    }

    if (history.best_epoch >= 0) {
        truncate_vocab(model, state, best.vocab.size());
        restore(model, state, best);
    }
    return history;
}

// ---------------------------------------------------------------------------
// Checkpoint serialization: little-endian, fixed layout, bit-exact round trip.

namespace {

constexpr std::uint32_t kMagic = 0x494c434bU; // "ILCK"
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    put_u64(out, bits);
}

void put_string(std::ostream& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void put_vec(std::ostream& out, const std::vector<double>& v) {
    put_u64(out, v.size());
    for (double d : v) put_f64(out, d);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) fail("IoFailure", "truncated checkpoint");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) fail("IoFailure", "truncated checkpoint");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& in) {
    const std::uint64_t bits = get_u64(in);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

std::string get_string(std::istream& in) {
    const std::uint32_t n = get_u32(in);
    std::string s(n, '\0');
    in.read(s.data(), n);
    if (!in) fail("IoFailure", "truncated checkpoint");
    return s;
}

std::vector<double> get_vec(std::istream& in) {
    const std::uint64_t n = get_u64(in);
    std::vector<double> v(n);
    for (auto& d : v) d = get_f64(in);
    return v;
}

void put_tensor_set(std::ostream& out, const TensorSet& t) {
    put_vec(out, t.embeddings);
    put_u32(out, static_cast<std::uint32_t>(t.weights.size()));
    for (std::size_t l = 0; l < t.weights.size(); ++l) {
        put_vec(out, t.weights[l]);
        put_vec(out, t.biases[l]);
    }
}

TensorSet get_tensor_set(std::istream& in) {
    TensorSet t;
    t.embeddings = get_vec(in);
    const std::uint32_t layers = get_u32(in);
    t.weights.resize(layers);
    t.biases.resize(layers);
    for (std::uint32_t l = 0; l < layers; ++l) {
        t.weights[l] = get_vec(in);
        t.biases[l] = get_vec(in);
    }
    return t;
}

} // namespace

void write_checkpoint(const PropertyJudgmentModel& model, const OptimizerState& state,
                      std::ostream& out) {
    put_u32(out, kMagic);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(model.config.embed_dim));
    put_u32(out, static_cast<std::uint32_t>(model.config.hidden_dims.size()));
    for (int h : model.config.hidden_dims) put_u32(out, static_cast<std::uint32_t>(h));
    put_u64(out, model.config.seed);
    put_f64(out, model.config.learning_rate);
    put_f64(out, model.config.weight_decay);
    put_f64(out, model.config.beta1);
    put_f64(out, model.config.beta2);
    put_f64(out, model.config.eps);
    put_u32(out, static_cast<std::uint32_t>(model.config.max_epochs));
    put_u32(out, static_cast<std::uint32_t>(model.config.batch_size));

    put_u32(out, static_cast<std::uint32_t>(model.vocab.size()));
    for (const auto& token : model.vocab) put_string(out, token);
    put_vec(out, model.embeddings);
    put_u32(out, static_cast<std::uint32_t>(model.layers.size()));
    for (const auto& layer : model.layers) {
        put_u32(out, static_cast<std::uint32_t>(layer.in));
        put_u32(out, static_cast<std::uint32_t>(layer.out));
        put_vec(out, layer.w);
        put_vec(out, layer.b);
    }
    put_u64(out, state.step_count);
    put_tensor_set(out, state.m);
    put_tensor_set(out, state.v);
    if (!out) fail("IoFailure", "checkpoint write failed");
}

std::pair<PropertyJudgmentModel, OptimizerState> read_checkpoint(std::istream& in) {
    if (get_u32(in) != kMagic) fail("IoFailure", "not a checkpoint file");
    if (get_u32(in) != kVersion) fail("IoFailure", "unsupported checkpoint version");

    PropertyJudgmentModel model;
    model.config.embed_dim = static_cast<int>(get_u32(in));
    model.config.hidden_dims.resize(get_u32(in));
    for (auto& h : model.config.hidden_dims) h = static_cast<int>(get_u32(in));
    model.config.seed = get_u64(in);
    model.config.learning_rate = get_f64(in);
    model.config.weight_decay = get_f64(in);
    model.config.beta1 = get_f64(in);
    model.config.beta2 = get_f64(in);
    model.config.eps = get_f64(in);
    model.config.max_epochs = static_cast<int>(get_u32(in));
    model.config.batch_size = static_cast<int>(get_u32(in));

    const std::uint32_t vocab_size = get_u32(in);
    model.vocab.reserve(vocab_size);
    for (std::uint32_t i = 0; i < vocab_size; ++i) {
        model.vocab.push_back(get_string(in));
        model.token_index.emplace(model.vocab.back(), static_cast<int>(i));
    }
    model.embeddings = get_vec(in);
    const std::uint32_t layer_count = get_u32(in);
    for (std::uint32_t l = 0; l < layer_count; ++l) {
        Layer layer;
        layer.in = static_cast<int>(get_u32(in));
        layer.out = static_cast<int>(get_u32(in));
        layer.w = get_vec(in);
        layer.b = get_vec(in);
        model.layers.push_back(std::move(layer));
    }

    OptimizerState state;
    state.step_count = get_u64(in);
    state.m = get_tensor_set(in);
    state.v = get_tensor_set(in);
    return {std::move(model), std::move(state)};
}

void save_checkpoint(const PropertyJudgmentModel& model, const OptimizerState& state,
                     const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("IoFailure", "cannot write checkpoint " + path);
    write_checkpoint(model, state, out);
}

std::pair<PropertyJudgmentModel, OptimizerState> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("IoFailure", "cannot open checkpoint " + path);
    return read_checkpoint(in);
}

} // namespace inductlab
