#include "inductlab/norms.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "inductlab/csv.hpp"
#include "inductlab/error.hpp"
#include "inductlab/rng.hpp"

namespace inductlab {

std::size_t PropertyNorms::pair_count() const {
    std::size_t total = 0;
    for (const auto& [property, concepts] : positives) total += concepts.size();
    return total;
}

std::vector<std::string> PropertyNorms::concepts_in_category(const std::string& category) const {
    std::vector<std::string> out;
    for (const auto& concept_name : concepts)
        if (categories.at(concept_name) == category) out.push_back(concept_name);
    return out;
}

PropertyNorms load_norms(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("IoFailure", "cannot open norms file " + path);
    return load_norms(in);
}

PropertyNorms load_norms(std::istream& in) {
    PropertyNorms norms;
    std::set<std::pair<std::string, std::string>> seen_pairs;
    std::set<std::string> seen_concepts;
    std::set<std::string> seen_properties;

    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto fields = csv::split_record(line);
        if (!header_seen) {
            if (fields != std::vector<std::string>{"concept", "property", "category"})
                fail("MalformedRow", "expected header concept,property,category");
            header_seen = true;
            continue;
        }
        if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty())
            fail("MalformedRow", "bad row: " + line);
        const auto& concept_name = fields[0];
        const auto& property = fields[1];
        const auto& category = fields[2];

        if (!seen_pairs.emplace(concept_name, property).second)
            fail("DuplicatePair", "(" + concept_name + ", " + property + ") appears twice");
        auto [cat_it, inserted] = norms.categories.emplace(concept_name, category);
        if (!inserted && cat_it->second != category)
            fail("InconsistentCategory",
                 concept_name + " labeled both " + cat_it->second + " and " + category);
        if (seen_concepts.insert(concept_name).second) norms.concepts.push_back(concept_name);
        if (seen_properties.insert(property).second) norms.properties.push_back(property);
        norms.positives[property].push_back(concept_name);
    }
    if (!header_seen) fail("MalformedRow", "norms file has no header row");
    return norms;
}

std::map<std::string, std::vector<std::string>>
generate_negatives(const PropertyNorms& norms, const Taxonomy& taxonomy) {
    std::vector<int> concept_ids(norms.concepts.size());
    for (std::size_t i = 0; i < norms.concepts.size(); ++i) {
        if (!taxonomy.contains(norms.concepts[i]))
            fail("ConceptNotInTaxonomy", norms.concepts[i] + " missing from the taxonomy");
        concept_ids[i] = taxonomy.index_of(norms.concepts[i]);
    }

    std::map<std::string, std::vector<std::string>> negatives;
    std::vector<std::pair<double, std::size_t>> scored; // (-score, concept_name position)
    for (const auto& property : norms.properties) {
        const auto& positives = norms.positives.at(property);
        const std::size_t k = positives.size();

        std::set<std::string> positive_set(positives.begin(), positives.end());
        if (norms.concepts.size() - positive_set.size() < k)
            fail("InsufficientCandidates",
                 property + " needs " + std::to_string(k) + " negatives but only " +
                     std::to_string(norms.concepts.size() - positive_set.size()) +
                     " concepts remain");

        int base_lcs = taxonomy.index_of(positives.front());
        int sum_depths = taxonomy.depth_at(base_lcs);
        for (std::size_t i = 1; i < positives.size(); ++i) {
            const int id = taxonomy.index_of(positives[i]);
            base_lcs = taxonomy.lcs_pair(base_lcs, id);
            sum_depths += taxonomy.depth_at(id);
        }

        scored.clear();
        for (std::size_t i = 0; i < norms.concepts.size(); ++i) {
            if (positive_set.count(norms.concepts[i])) continue;
            const double score = taxonomy.gwup_extended(base_lcs, sum_depths,
                                                        static_cast<int>(k), concept_ids[i]);
            scored.emplace_back(-score, i);
        }
        // Descending score; equal scores resolve lexicographically by identifier.
        std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first < b.first;
            return norms.concepts[a.second] < norms.concepts[b.second];
        });

        auto& out = negatives[property];
        out.reserve(k);
        for (std::size_t i = 0; i < k; ++i) out.push_back(norms.concepts[scored[i].second]);
    }
    return negatives;
}

std::string sentencize(const std::string& concept_name, const std::string& property) {
    if (concept_name.empty()) fail("EmptyConcept", "sentencize requires a concept");
    if (property.empty()) fail("EmptyProperty", "sentencize requires a property");
    auto lower = [](const std::string& s) {
        std::string out = s;
        std::transform(out.begin(), out.end(), out.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        return out;
    };
    const std::string c = lower(concept_name);
    const std::string p = lower(property);
    const char first = c.front();
    const bool vowel =
        first == 'a' || first == 'e' || first == 'i' || first == 'o' || first == 'u';
    std::string out = vowel ? "an " : "a ";
    out += c;
    out.push_back(' ');
    out += p;
    out.push_back('.');
    return out;
}

std::vector<LabeledSentence>
build_dataset(const PropertyNorms& norms,
              const std::map<std::string, std::vector<std::string>>& negatives) {
    std::vector<LabeledSentence> dataset;
    dataset.reserve(2 * norms.pair_count());
    for (const auto& property : norms.properties) {
        const auto& positives = norms.positives.at(property);
        const auto neg_it = negatives.find(property);
        if (neg_it == negatives.end() || neg_it->second.size() != positives.size())
            fail("MismatchedNegatives",
                 "negatives for " + property + " missing or not matched one-to-one");
        for (std::size_t j = 0; j < positives.size(); ++j) {
            dataset.push_back({sentencize(positives[j], property), positives[j], property, true});
            dataset.push_back(
                {sentencize(neg_it->second[j], property), neg_it->second[j], property, false});
        }
    }
    return dataset;
}

DatasetSplit split_property_disjoint(const std::vector<LabeledSentence>& dataset,
                                     double train_ratio, double val_ratio, double test_ratio,
                                     std::uint64_t seed) {
    if (dataset.empty()) fail("TooFewProperties", "dataset is empty");
    if (std::abs(train_ratio + val_ratio + test_ratio - 1.0) > 1e-9)
        fail("InvalidRatios", "split ratios must sum to 1");

    std::vector<std::string> property_order;
    std::map<std::string, std::vector<std::size_t>> by_property; // property -> sentence indices
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        auto [it, inserted] = by_property.emplace(dataset[i].property, std::vector<std::size_t>{});
        if (inserted) property_order.push_back(dataset[i].property);
        it->second.push_back(i);
    }
    if (property_order.size() < 3)
        fail("TooFewProperties",
             "need at least 3 properties, got " + std::to_string(property_order.size()));

    std::mt19937_64 rng(derive_seed(seed, "property-split"));
    std::shuffle(property_order.begin(), property_order.end(), rng);

    const double total = static_cast<double>(dataset.size());
    const double targets[3] = {train_ratio * total, val_ratio * total, test_ratio * total};
    double assigned[3] = {0.0, 0.0, 0.0};

    DatasetSplit split;
    split.seed = seed;
    std::vector<LabeledSentence>* partitions[3] = {&split.train, &split.val, &split.test};
    for (const auto& property : property_order) {
        int best = 0;
        double best_deficit = targets[0] - assigned[0];
        for (int p = 1; p < 3; ++p) {
            const double deficit = targets[p] - assigned[p];
            if (deficit > best_deficit) {
                best = p;
                best_deficit = deficit;
            }
        }
        const auto& indices = by_property.at(property);
        for (const std::size_t i : indices) partitions[best]->push_back(dataset[i]);
        assigned[best] += static_cast<double>(indices.size());
    }
    return split;
}

void write_dataset_csv(const DatasetSplit& split, const std::string& path,
                       const std::vector<std::string>& header_comments) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("IoFailure", "cannot write " + path);
    for (const auto& comment : header_comments) out << comment << "\n";
    out << "sentence,concept,property,label,split\n";
    auto emit = [&](const std::vector<LabeledSentence>& part, const char* name) {
        for (const auto& s : part)
            out << csv::join_record(
                       {s.text, s.concept_name, s.property, s.label ? "true" : "false", name})
                << "\n";
    };
    emit(split.train, "train");
    emit(split.val, "val");
    emit(split.test, "test");
    if (!out) fail("IoFailure", "short write to " + path);
}

DatasetSplit read_dataset_csv(const std::string& path) {
    const auto table = csv::read_file(path);
    if (table.header != std::vector<std::string>{"sentence", "concept", "property", "label", "split"})
        fail("MalformedRow", "unexpected dataset header in " + path);
    DatasetSplit split;
    for (const auto& row : table.rows) {
        LabeledSentence s{row[0], row[1], row[2], row[3] == "true"};
        if (row[3] != "true" && row[3] != "false")
            fail("MalformedRow", "label must be true/false, got " + row[3]);
        if (row[4] == "train") split.train.push_back(std::move(s));
        else if (row[4] == "val") split.val.push_back(std::move(s));
        else if (row[4] == "test") split.test.push_back(std::move(s));
        else fail("MalformedRow", "split must be train/val/test, got " + row[4]);
    }
    return split;
}

} // namespace inductlab
