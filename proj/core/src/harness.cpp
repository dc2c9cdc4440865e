#include "inductlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <thread>

#include "inductlab/csv.hpp"
#include "inductlab/error.hpp"
#include "inductlab/rng.hpp"

namespace inductlab {

namespace {

// Uniform in [0, n) by rejection, so draws do not depend on the standard
// library's distribution implementation.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

std::vector<std::string> sample_without_replacement(std::vector<std::string> pool,
                                                    std::size_t n, std::mt19937_64& rng) {
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + bounded(rng, pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(n);
    return pool;
}

// concept -> property-id set, for fast Jaccard overlaps.
struct PropertyIndex {
    std::map<std::string, std::vector<int>> by_concept;

    explicit PropertyIndex(const PropertyNorms& norms) {
        int property_id = 0;
        for (const auto& property : norms.properties) {
            for (const auto& concept_name : norms.positives.at(property))
                by_concept[concept_name].push_back(property_id);
            ++property_id;
        }
        for (auto& [concept_name, ids] : by_concept) std::sort(ids.begin(), ids.end());
    }

    std::set<int> property_union(const std::vector<std::string>& concepts) const {
        std::set<int> out;
        for (const auto& concept_name : concepts) {
            auto it = by_concept.find(concept_name);
            if (it != by_concept.end()) out.insert(it->second.begin(), it->second.end());
        }
        return out;
    }

    double jaccard(const std::vector<std::string>& set_a,
                   const std::vector<std::string>& set_g) const {
        if (set_a.empty() || set_g.empty())
            fail("EmptyConceptSet", "property_overlap requires non-empty concept sets");
        const auto pa = property_union(set_a);
        const auto pg = property_union(set_g);
        std::size_t intersection = 0;
        for (int id : pa) intersection += pg.count(id);
        const std::size_t unioned = pa.size() + pg.size() - intersection;
        return unioned == 0 ? 0.0
                            : static_cast<double>(intersection) / static_cast<double>(unioned);
    }
};

double cosine(const std::vector<double>& u, const std::vector<double>& v) {
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

std::vector<std::string> categories_in_order(const PropertyNorms& norms) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& concept_name : norms.concepts) {
        const auto& category = norms.categories.at(concept_name);
        if (seen.insert(category).second) out.push_back(category);
    }
    return out;
}

std::string zero_padded(std::size_t value, int width) {
    std::string digits = std::to_string(value);
    while (static_cast<int>(digits.size()) < width) digits.insert(digits.begin(), '0');
    return digits;
}

} // namespace

const std::vector<std::string>& default_nonce_properties() {
    static const std::vector<std::string> properties = {
        "can dax", "can fep",  "has blickets", "has feps",
        "is a tove", "is a wug", "is mimsy",   "is vorpal",
    };
    return properties;
}

const std::vector<std::string>& default_conflict_concepts() {
    static const std::vector<std::string> concepts = {
        "dolphin", "whale", "turtle", "slug", "snail", "hippo",
    };
    return concepts;
}

double property_overlap(const PropertyNorms& norms,
                        const std::vector<std::string>& set_a,
                        const std::vector<std::string>& set_g) {
    return PropertyIndex(norms).jaccard(set_a, set_g);
}

double mean_cosine_similarity(const PropertyJudgmentModel& model,
                              const std::vector<std::string>& set_a,
                              const std::vector<std::string>& set_g) {
    if (set_a.empty() || set_g.empty())
        fail("EmptyConceptSet", "cosine similarity requires non-empty concept sets");
    std::vector<std::vector<double>> a_rows;
    a_rows.reserve(set_a.size());
    for (const auto& concept_name : set_a) a_rows.push_back(concept_embedding(model, concept_name));
    double sum = 0.0;
    for (const auto& concept_name : set_g) {
        const auto g_row = concept_embedding(model, concept_name);
        for (const auto& a_row : a_rows) sum += cosine(a_row, g_row);
    }
    return sum / static_cast<double>(set_a.size() * set_g.size());
}

std::vector<InductionTrial> build_taxonomic_trials(const PropertyNorms& norms,
                                                   const PropertyJudgmentModel& model,
                                                   const ExperimentConfig& config) {
    const auto categories =
        config.focus_categories.empty() ? categories_in_order(norms) : config.focus_categories;
    const auto& nonce =
        config.nonce_properties.empty() ? default_nonce_properties() : config.nonce_properties;
    require(config.repeats >= 1, "InvalidConfig", "repeats must be >= 1");

    int max_n = 0;
    for (int n : config.n_range) max_n = std::max(max_n, n);

    std::vector<std::string> pool; // union of the focus categories, in norms order
    std::set<std::string> focus(categories.begin(), categories.end());
    for (const auto& concept_name : norms.concepts)
        if (focus.count(norms.categories.at(concept_name))) pool.push_back(concept_name);

    std::map<std::string, std::vector<std::string>> members;
    for (const auto& category : categories) {
        members[category] = norms.concepts_in_category(category);
        if (static_cast<int>(members[category].size()) < max_n + 1)
            fail("CategoryTooSmall", category + " has " +
                                         std::to_string(members[category].size()) +
                                         " concepts; need at least " + std::to_string(max_n + 1));
    }

    // Cache embeddings for cosine ranking of the similar-outside set.
    std::map<std::string, std::vector<double>> embedding;
    for (const auto& concept_name : pool)
        embedding[concept_name] = concept_embedding(model, concept_name);

    std::vector<InductionTrial> trials;
    std::size_t serial = 0;
    for (const auto& category : categories) {
        const auto& category_members = members[category];
        std::vector<std::string> outside_pool;
        for (const auto& concept_name : pool)
            if (norms.categories.at(concept_name) != category) outside_pool.push_back(concept_name);

        for (int n : config.n_range) {
            for (int repeat = 0; repeat < config.repeats; ++repeat) {
                for (const auto& property : nonce) {
                    const std::string key = category + "|" + std::to_string(n) + "|" +
                                            std::to_string(repeat) + "|" + property;
                    std::mt19937_64 rng(derive_seed(config.seed, "taxonomic-trial", fnv1a(key)));

                    auto adaptation = sample_without_replacement(category_members,
                                                                 static_cast<std::size_t>(n), rng);
                    std::set<std::string> adapted(adaptation.begin(), adaptation.end());
                    std::vector<std::string> within;
                    for (const auto& concept_name : category_members)
                        if (!adapted.count(concept_name)) within.push_back(concept_name);
                    const std::size_t set_size = within.size(); // m - n

                    if (outside_pool.size() < set_size)
                        fail("CategoryTooSmall",
                             "outside pool smaller than the within set for " + category);

                    // Top m-n outside concepts by mean cosine similarity to the
                    // adaptation set; ties lexicographic.
                    std::vector<std::pair<double, std::string>> ranked;
                    ranked.reserve(outside_pool.size());
                    for (const auto& candidate : outside_pool) {
                        double sum = 0.0;
                        for (const auto& a : adaptation)
                            sum += cosine(embedding.at(candidate), embedding.at(a));
                        ranked.emplace_back(-sum / static_cast<double>(adaptation.size()),
                                            candidate);
                    }
                    std::sort(ranked.begin(), ranked.end());
                    std::vector<std::string> outside_similar;
                    for (std::size_t i = 0; i < set_size; ++i)
                        outside_similar.push_back(ranked[i].second);

                    auto outside_random = sample_without_replacement(outside_pool, set_size, rng);

                    InductionTrial trial;
                    trial.trial_id = "tax-" + zero_padded(serial, 6);
                    trial.category = category;
                    trial.adaptation_set = std::move(adaptation);
                    trial.generalization_sets = {
                        {"within", std::move(within)},
                        {"outside_similar", std::move(outside_similar)},
                        {"outside_random", std::move(outside_random)},
                    };
                    trial.novel_property = property;
                    trial.max_adapt_steps = config.max_adapt_steps;
                    trials.push_back(std::move(trial));
                    ++serial;
                }
            }
        }
    }
    return trials;
}

std::vector<InductionTrial> build_conflict_trials(const PropertyNorms& norms,
                                                  const ExperimentConfig& config) {
    const auto& conflict = config.conflict_concepts.empty() ? default_conflict_concepts()
                                                            : config.conflict_concepts;
    const auto& nonce =
        config.nonce_properties.empty() ? default_nonce_properties() : config.nonce_properties;
    const auto categories = categories_in_order(norms);
    const PropertyIndex index(norms);

    std::vector<InductionTrial> trials;
    std::size_t serial = 0;
    for (const auto& concept_name : conflict) {
        auto cat_it = norms.categories.find(concept_name);
        if (cat_it == norms.categories.end())
            fail("ConceptMissing", concept_name + " is not a norm-bank concept");
        const std::string& own_category = cat_it->second;

        std::vector<std::string> within;
        for (const auto& member : norms.concepts_in_category(own_category))
            if (member != concept_name) within.push_back(member);
        if (within.empty()) {
            std::cerr << "warning: " << concept_name
                      << " is alone in its category; skipping conflict trials\n";
            continue;
        }

        const double own_overlap = index.jaccard({concept_name}, within);
        double best_overlap = -1.0;
        std::string best_category;
        for (const auto& category : categories) {
            if (category == own_category) continue;
            const auto members = norms.concepts_in_category(category);
            if (members.empty()) continue;
            const double overlap = index.jaccard({concept_name}, members);
            if (overlap > best_overlap) {
                best_overlap = overlap;
                best_category = category;
            }
        }
        if (best_category.empty() || best_overlap <= own_overlap) {
            std::cerr << "warning: " << concept_name
                      << " overlaps its own category most; not a conflict case\n";
            continue;
        }

        const auto outside = norms.concepts_in_category(best_category);
        for (const auto& property : nonce) {
            InductionTrial trial;
            trial.trial_id = "conflict-" + zero_padded(serial, 4);
            trial.category = own_category;
            trial.adaptation_set = {concept_name};
            trial.generalization_sets = {{"within", within}, {"outside", outside}};
            trial.novel_property = property;
            trial.max_adapt_steps = config.max_adapt_steps;
            trials.push_back(std::move(trial));
            ++serial;
        }
    }
    return trials;
}

std::vector<ResultRow> run_experiment(const PropertyJudgmentModel& model,
                                      const OptimizerState& state,
                                      const std::vector<InductionTrial>& trials,
                                      const PropertyNorms& norms,
                                      int jobs) {
    for (const auto& trial : trials) trial.validate();
    const PropertyIndex index(norms);

    std::vector<std::vector<ResultRow>> per_trial(trials.size());
    auto run_range = [&](PropertyJudgmentModel& worker_model, OptimizerState& worker_state,
                         std::atomic<std::size_t>& cursor) {
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= trials.size()) break;
            const InductionTrial& trial = trials[i];
            const TrialResult result = run_trial(worker_model, worker_state, trial);
            auto& rows = per_trial[i];
            for (const auto& [label, score] : result.set_scores) {
                ResultRow row;
                row.trial_id = trial.trial_id;
                row.category = trial.category;
                row.n = static_cast<int>(trial.adaptation_set.size());
                row.property = trial.novel_property;
                row.set_label = label;
                row.generalization = score.score;
                const auto& concepts = [&]() -> const std::vector<std::string>& {
                    for (const auto& [set_label, set_concepts] : trial.generalization_sets)
                        if (set_label == label) return set_concepts;
                    fail("EmptyConceptSet", "set label vanished: " + label);
                }();
                row.overlap = index.jaccard(trial.adaptation_set, concepts);
                row.cosine_sim = mean_cosine_similarity(model, trial.adaptation_set, concepts);
                row.adapt_ok = result.adapt_ok;
                row.adapt_steps = result.adapt_steps_used;
                rows.push_back(std::move(row));
            }
        }
    };

    jobs = std::max(1, jobs);
    std::atomic<std::size_t> cursor{0};
    if (jobs == 1) {
        PropertyJudgmentModel worker_model = model;
        OptimizerState worker_state = state;
        run_range(worker_model, worker_state, cursor);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(jobs));
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
        for (int j = 0; j < jobs; ++j) {
            workers.emplace_back([&, j] {
                try {
                    PropertyJudgmentModel worker_model = model;
                    OptimizerState worker_state = state;
                    run_range(worker_model, worker_state, cursor);
                } catch (...) {
                    errors[static_cast<std::size_t>(j)] = std::current_exception();
                }
            });
        }
        for (auto& worker : workers) worker.join();
        for (const auto& error : errors)
            if (error) std::rethrow_exception(error);
    }

    std::vector<ResultRow> rows;
    for (auto& trial_rows : per_trial)
        for (auto& row : trial_rows) rows.push_back(std::move(row));
    return rows;
}

void write_results_csv(const std::vector<ResultRow>& rows, const std::string& path,
                       const std::vector<std::string>& header_comments) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("IoFailure", "cannot write " + path);
    for (const auto& comment : header_comments) out << comment << "\n";
    out << "trial_id,category,n,property,set_label,G,overlap,cosine_sim,adapt_ok,adapt_steps\n";
    for (const auto& row : rows) {
        out << csv::join_record({row.trial_id, row.category, std::to_string(row.n), row.property,
                                 row.set_label, csv::format_double(row.generalization),
                                 csv::format_double(row.overlap),
                                 csv::format_double(row.cosine_sim),
                                 row.adapt_ok ? "true" : "false",
                                 std::to_string(row.adapt_steps)})
            << "\n";
    }
    if (!out) fail("IoFailure", "short write to " + path);
}

std::vector<ResultRow> read_results_csv(const std::string& path) {
    const auto table = csv::read_file(path);
    const std::vector<std::string> expected = {"trial_id", "category", "n",
                                               "property", "set_label", "G",
                                               "overlap",  "cosine_sim", "adapt_ok",
                                               "adapt_steps"};
    if (table.header != expected) fail("MalformedRow", "unexpected results header in " + path);
    std::vector<ResultRow> rows;
    rows.reserve(table.rows.size());
    for (const auto& fields : table.rows) {
        ResultRow row;
        row.trial_id = fields[0];
        row.category = fields[1];
        row.n = std::stoi(fields[2]);
        row.property = fields[3];
        row.set_label = fields[4];
        row.generalization = std::stod(fields[5]);
        row.overlap = std::stod(fields[6]);
        row.cosine_sim = std::stod(fields[7]);
        row.adapt_ok = fields[8] == "true";
        row.adapt_steps = std::stoi(fields[9]);
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

std::string join_concepts(const std::vector<std::string>& concepts) {
    std::string out;
    for (std::size_t i = 0; i < concepts.size(); ++i) {
        if (i) out.push_back(';');
        out += concepts[i];
    }
    return out;
}

std::vector<std::string> split_concepts(const std::string& joined) {
    std::vector<std::string> out;
    std::string current;
    for (char c : joined) {
        if (c == ';') {
            if (!current.empty()) out.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

} // namespace

void write_trial_batch(const std::vector<InductionTrial>& trials, const std::string& path,
                       const std::vector<std::string>& header_comments) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("IoFailure", "cannot write " + path);
    for (const auto& comment : header_comments) out << comment << "\n";
    out << "trial_id,category,n,property,adaptation_concepts,set_label,set_concepts\n";
    for (const auto& trial : trials)
        for (const auto& [label, concepts] : trial.generalization_sets)
            out << csv::join_record({trial.trial_id, trial.category,
                                     std::to_string(trial.adaptation_set.size()),
                                     trial.novel_property, join_concepts(trial.adaptation_set),
                                     label, join_concepts(concepts)})
                << "\n";
    if (!out) fail("IoFailure", "short write to " + path);
}

std::vector<InductionTrial> read_trial_batch(const std::string& path) {
    const auto table = csv::read_file(path);
    const std::vector<std::string> expected = {"trial_id", "category", "n", "property",
                                               "adaptation_concepts", "set_label", "set_concepts"};
    if (table.header != expected) fail("MalformedRow", "unexpected trial header in " + path);

    std::vector<InductionTrial> trials;
    for (const auto& fields : table.rows) {
        if (trials.empty() || trials.back().trial_id != fields[0]) {
            InductionTrial trial;
            trial.trial_id = fields[0];
            trial.category = fields[1];
            trial.novel_property = fields[3];
            trial.adaptation_set = split_concepts(fields[4]);
            if (trial.adaptation_set.size() != static_cast<std::size_t>(std::stoi(fields[2])))
                fail("MalformedRow", "n does not match the adaptation list for " + fields[0]);
            trials.push_back(std::move(trial));
        }
        trials.back().generalization_sets.emplace_back(fields[5], split_concepts(fields[6]));
    }
    for (const auto& trial : trials) trial.validate();
    return trials;
}

} // namespace inductlab
