#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "inductlab/taxonomy.hpp"

namespace inductlab {

/// Cleaned property-norm data: concepts with category labels, property
/// phrases, and the positive concept_name-property pairs. Orderings follow first
/// appearance in the source file so every downstream step is deterministic.
struct PropertyNorms {
    std::vector<std::string> concepts;
    std::map<std::string, std::string> categories; // concept_name -> category
    std::vector<std::string> properties;
    std::map<std::string, std::vector<std::string>> positives; // property -> concepts

    std::size_t concept_count() const { return concepts.size(); }
    std::size_t property_count() const { return properties.size(); }
    std::size_t pair_count() const;

    /// Concepts carrying the given category label, in concept_name order.
    std::vector<std::string> concepts_in_category(const std::string& category) const;
};

/// Reads a `concept,property,category` CSV (one positive pair per row).
/// Errors: DuplicatePair, InconsistentCategory, MalformedRow.
PropertyNorms load_norms(const std::string& path);
PropertyNorms load_norms(std::istream& in);

/// Negative samples per property: for a property with k positives, the top-k
/// concepts from C - Q_P ranked by gwup(Q_P + candidate) descending, ties
/// broken lexicographically by concept_name identifier. Deterministic.
/// Errors: InsufficientCandidates, ConceptNotInTaxonomy.
std::map<std::string, std::vector<std::string>>
generate_negatives(const PropertyNorms& norms, const Taxonomy& taxonomy);

/// "{article} {concept} {property}." lowercase; article is "an" when the
/// concept starts with a vowel letter, "a" otherwise.
std::string sentencize(const std::string& concept_name, const std::string& property);

struct LabeledSentence {
    std::string text;
    std::string concept_name;
    std::string property;
    bool label = false;
};

/// Pairs positives and negatives with their labels, property by property:
/// for the j-th positive of each property, the positive sentence (True) then
/// the j-th negative sentence (False). Output size is 2x the positive pairs.
/// Errors: MismatchedNegatives.
std::vector<LabeledSentence>
build_dataset(const PropertyNorms& norms,
              const std::map<std::string, std::vector<std::string>>& negatives);

struct DatasetSplit {
    std::vector<LabeledSentence> train;
    std::vector<LabeledSentence> val;
    std::vector<LabeledSentence> test;
    std::uint64_t seed = 0;
};

/// Property-disjoint split: properties are shuffled by seed, then each whole
/// property is assigned to the partition currently furthest below its
/// sentence-count target. Errors: TooFewProperties (< 3 properties).
DatasetSplit split_property_disjoint(const std::vector<LabeledSentence>& dataset,
                                     double train_ratio, double val_ratio, double test_ratio,
                                     std::uint64_t seed);

/// Dataset CSV (header `sentence,concept,property,label,split`) read/write.
void write_dataset_csv(const DatasetSplit& split, const std::string& path,
                       const std::vector<std::string>& header_comments);
DatasetSplit read_dataset_csv(const std::string& path);

} // namespace inductlab
