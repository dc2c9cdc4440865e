#include "fixtures.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "inductlab/rng.hpp"

namespace fixtures {

using namespace inductlab;

namespace {

std::string zero2(int v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d", v);
    return buf;
}

Bank finish(std::string norms_csv, std::string taxonomy_edges) {
    Bank bank;
    bank.norms_csv = std::move(norms_csv);
    bank.taxonomy_edges = std::move(taxonomy_edges);
    std::istringstream norms_in(bank.norms_csv);
    bank.norms = load_norms(norms_in);
    std::istringstream tax_in(bank.taxonomy_edges);
    bank.taxonomy = Taxonomy::load(tax_in);
    return bank;
}

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

} // namespace

Bank acceptance_fixture(std::uint64_t seed) {
    const std::vector<std::string> categories = {"avian", "marine", "terran"};
    // Two-token concepts with a shared category head, like the compound
    // concepts of real norm banks (swordfish, polar bear). The individual
    // token leads and interleaves the categories alphabetically (x00a, x00m,
    // x00t, x01a, ...) so lexicographic tie-breaks in negative sampling
    // spread the load evenly across categories instead of always hitting
    // the alphabetically first one.
    std::map<std::string, std::vector<std::string>> members;
    for (std::size_t j = 0; j < categories.size(); ++j)
        for (int i = 0; i < 10; ++i)
            members[categories[j]].push_back("x" + zero2(i) + categories[j].substr(0, 1) + " " +
                                             categories[j].substr(0, 3));

    std::ostringstream tax;
    tax << "avian\troot\nmarine\troot\nterran\troot\n";
    for (const auto& category : categories)
        for (const auto& concept_name : members[category])
            tax << concept_name << "\t" << category << "\n";

    std::mt19937_64 rng(derive_seed(seed, "acceptance-fixture"));
    const char* predicates[3] = {"has", "can", "is"};

    std::ostringstream csv;
    csv << "concept,property,category\n";
    std::vector<std::string> all;
    for (const auto& category : categories)
        for (const auto& concept_name : members[category]) all.push_back(concept_name);

    // 30 category-correlated properties: each pinned to a home category and
    // possessed by 9 of its 10 members (one seeded dropout).
    for (int i = 0; i < 30; ++i) {
        const auto& home = categories[static_cast<std::size_t>(i % 3)];
        const std::string property =
            std::string(predicates[i % 3]) + " trait" + zero2(i + 1);
        const std::size_t dropout = bounded(rng, 10);
        for (std::size_t j = 0; j < members[home].size(); ++j) {
            if (j == dropout) continue;
            csv << members[home][j] << "," << property << "," << home << "\n";
        }
    }
    // 10 idiosyncratic properties: concept-specific one-offs held by one or
    // two random concepts.
    for (int i = 0; i < 10; ++i) {
        const std::string property =
            std::string(predicates[i % 3]) + " quirk" + zero2(i + 1);
        const std::size_t count = 1 + bounded(rng, 2);
        auto shuffled = all;
        for (std::size_t j = 0; j < count; ++j)
            std::swap(shuffled[j], shuffled[j + bounded(rng, shuffled.size() - j)]);
        std::vector<std::string> chosen(shuffled.begin(),
                                        shuffled.begin() + static_cast<long>(count));
        std::sort(chosen.begin(), chosen.end()); // keep file order stable
        for (const auto& concept_name : chosen) {
            const char tag = concept_name[3]; // x00a -> 'a'
            const auto& category =
                tag == 'a' ? categories[0] : (tag == 'm' ? categories[1] : categories[2]);
            csv << concept_name << "," << property << "," << category << "\n";
        }
    }
    return finish(csv.str(), tax.str());
}

Bank random_bank(std::mt19937_64& rng) {
    const int n_concepts = 6 + static_cast<int>(bounded(rng, 15)); // 6..20
    const int n_properties =
        3 + static_cast<int>(bounded(rng, static_cast<std::uint64_t>(
                                               std::min(8, n_concepts - 2)))); // 3..10, <= n
    const int n_categories = 2 + static_cast<int>(bounded(rng, 2));            // 2..3

    std::vector<std::string> concepts;
    for (int i = 0; i < n_concepts; ++i) concepts.push_back("c" + zero2(i));

    // Random internal scaffold of 3..6 nodes, concepts attached as leaves.
    const int n_internal = 3 + static_cast<int>(bounded(rng, 4));
    std::ostringstream tax;
    for (int i = 1; i < n_internal; ++i)
        tax << "i" << zero2(i) << "\ti" << zero2(static_cast<int>(bounded(rng, i))) << "\n";
    for (const auto& concept_name : concepts)
        tax << concept_name << "\ti" << zero2(static_cast<int>(bounded(rng, n_internal))) << "\n";

    // Partition a shuffled concept list into one slice per property so every
    // concept appears, then pad slices with extras while the negative pool
    // stays large enough (k <= |C| - k).
    auto order = concepts;
    for (std::size_t j = 0; j + 1 < order.size(); ++j)
        std::swap(order[j], order[j + bounded(rng, order.size() - j)]);

    std::vector<std::vector<std::string>> positive_sets(
        static_cast<std::size_t>(n_properties));
    for (std::size_t i = 0; i < order.size(); ++i)
        positive_sets[i % positive_sets.size()].push_back(order[i]);
    const auto max_k = static_cast<std::size_t>(n_concepts) / 2;
    for (auto& positives : positive_sets) {
        while (positives.size() < max_k && bounded(rng, 3) == 0) {
            const auto& extra = concepts[bounded(rng, concepts.size())];
            if (std::find(positives.begin(), positives.end(), extra) == positives.end())
                positives.push_back(extra);
        }
        std::sort(positives.begin(), positives.end());
    }

    std::ostringstream csv;
    csv << "concept,property,category\n";
    for (int p = 0; p < n_properties; ++p) {
        const std::string property = "has prop" + zero2(p);
        for (const auto& concept_name : positive_sets[static_cast<std::size_t>(p)])
            csv << concept_name << "," << property << ",cat"
                << (fnv1a(concept_name) % static_cast<std::uint64_t>(n_categories)) << "\n";
    }
    return finish(csv.str(), tax.str());
}

Bank wide_bank(std::uint64_t seed, int property_count) {
    std::mt19937_64 rng(derive_seed(seed, "wide-bank"));
    const int n_concepts = 50;
    std::vector<std::string> concepts;
    for (int i = 0; i < n_concepts; ++i) concepts.push_back("w" + zero2(i));

    std::ostringstream tax;
    tax << "left\troot\nright\troot\n";
    for (int i = 0; i < n_concepts; ++i)
        tax << concepts[static_cast<std::size_t>(i)] << "\t" << (i % 2 ? "left" : "right") << "\n";

    std::ostringstream csv;
    csv << "concept,property,category\n";
    for (int p = 0; p < property_count; ++p) {
        char name[24];
        std::snprintf(name, sizeof name, "has wide%04d", p);
        const std::size_t k = 1 + bounded(rng, 8);
        auto shuffled = concepts;
        for (std::size_t j = 0; j < k; ++j)
            std::swap(shuffled[j], shuffled[j + bounded(rng, shuffled.size() - j)]);
        std::vector<std::string> chosen(shuffled.begin(), shuffled.begin() + static_cast<long>(k));
        std::sort(chosen.begin(), chosen.end());
        for (const auto& concept_name : chosen)
            csv << concept_name << "," << name << ",cat" << (concept_name.back() % 2) << "\n";
    }
    return finish(csv.str(), tax.str());
}

Bank animal_preset_bank() {
    const std::vector<std::pair<std::string, int>> sizes = {
        {"mammal", 52}, {"bird", 36}, {"insect", 18},
        {"fish", 14},   {"mollusk", 8}, {"reptile", 7},
    };
    // conflict concept -> (own category, member slot, foreign category)
    struct Conflict {
        std::string name;
        std::string own;
        std::string foreign;
    };
    const std::vector<Conflict> conflicts = {
        {"dolphin", "mammal", "fish"}, {"whale", "mammal", "fish"},
        {"hippo", "mammal", "fish"},   {"turtle", "reptile", "fish"},
        {"slug", "mollusk", "insect"}, {"snail", "mollusk", "insect"},
    };

    std::map<std::string, std::vector<std::string>> members;
    for (const auto& [category, size] : sizes) {
        for (int i = 1; i <= size; ++i) {
            char name[24];
            std::snprintf(name, sizeof name, "%s%03d", category.c_str(), i);
            members[category].emplace_back(name);
        }
    }
    std::map<std::string, std::string> category_of;
    for (const auto& [category, list] : members)
        for (const auto& concept_name : list) category_of[concept_name] = category;
    // Replace the first slots of the owning categories with the real names.
    std::map<std::string, int> replaced;
    for (const auto& conflict : conflicts) {
        auto& list = members[conflict.own];
        list[static_cast<std::size_t>(replaced[conflict.own]++)] = conflict.name;
    }
    category_of.clear();
    for (const auto& [category, list] : members)
        for (const auto& concept_name : list) category_of[concept_name] = category;

    std::map<std::string, std::string> foreign_of;
    for (const auto& conflict : conflicts) foreign_of[conflict.name] = conflict.foreign;

    // Ten properties per category. Regular members carry all ten of their
    // own; a conflict concept keeps two own properties and carries eight of
    // its foreign category's, which makes the foreign overlap dominate.
    std::map<std::string, std::vector<std::string>> props;
    for (const auto& [category, size] : sizes) {
        for (int i = 1; i <= 10; ++i)
            props[category].push_back("has " + category + "ness" + zero2(i));
    }

    std::ostringstream csv;
    csv << "concept,property,category\n";
    for (const auto& [category, size] : sizes) {
        for (const auto& concept_name : members[category]) {
            const auto foreign_it = foreign_of.find(concept_name);
            if (foreign_it == foreign_of.end()) {
                for (const auto& property : props[category])
                    csv << concept_name << "," << property << "," << category << "\n";
            } else {
                for (int i = 0; i < 2; ++i)
                    csv << concept_name << "," << props[category][static_cast<std::size_t>(i)]
                        << "," << category << "\n";
                for (int i = 0; i < 8; ++i)
                    csv << concept_name << ","
                        << props[foreign_it->second][static_cast<std::size_t>(i)] << ","
                        << category << "\n";
            }
        }
    }

    std::ostringstream tax;
    for (const auto& [category, size] : sizes) tax << category << "\tanimal\n";
    tax << "animal\troot\n";
    for (const auto& [category, list] : members)
        for (const auto& concept_name : list) tax << concept_name << "\t" << category << "\n";
    return finish(csv.str(), tax.str());
}

ModelConfig fixture_config(std::uint64_t seed, int max_epochs) {
    ModelConfig config;
    config.embed_dim = 16;
    config.hidden_dims = {32, 32};
    config.seed = seed;
    config.learning_rate = 1e-3;
    config.weight_decay = 1e-2;
    config.max_epochs = max_epochs;
    config.batch_size = 32;
    return config;
}

TrainedFixture train_on(const Bank& bank, std::uint64_t seed, int max_epochs) {
    const auto negatives = generate_negatives(bank.norms, bank.taxonomy);
    const auto dataset = build_dataset(bank.norms, negatives);
    const DatasetSplit split = split_property_disjoint(dataset, 0.8, 0.1, 0.1, seed);

    std::vector<std::string> vocab;
    std::set<std::string> seen;
    for (const auto& s : split.train) {
        for (const auto& token : tokenize(s.concept_name))
            if (seen.insert(token).second) vocab.push_back(token);
        for (const auto& token : tokenize(s.property))
            if (seen.insert(token).second) vocab.push_back(token);
    }

    TrainedFixture fixture;
    auto [model, state] = init_model(fixture_config(seed, max_epochs), vocab);
    fixture.history = train(model, state, split);
    fixture.model = std::move(model);
    fixture.state = std::move(state);
    fixture.split = std::move(split);
    return fixture;
}

} // namespace fixtures
