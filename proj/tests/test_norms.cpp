#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "inductlab/error.hpp"
#include "inductlab/norms.hpp"
#include "oracles.hpp"

using namespace inductlab;

namespace {

PropertyNorms norms_from(const char* csv) {
    std::istringstream in(csv);
    return load_norms(in);
}

Taxonomy taxonomy_from(const char* edges) {
    std::istringstream in(edges);
    return Taxonomy::load(in);
}

} // namespace

TEST_CASE("load_norms ingests a toy file") {
    const auto norms = norms_from("concept,property,category\ncat,has fur,mammal\n");
    CHECK(norms.concept_count() == 1);
    CHECK(norms.property_count() == 1);
    CHECK(norms.pair_count() == 1);
    CHECK(norms.categories.at("cat") == "mammal");
}

TEST_CASE("load_norms rejects inconsistent inputs") {
    CHECK_THROWS_WITH_AS(
        norms_from("concept,property,category\ncat,has fur,mammal\ncat,has fur,mammal\n"),
        doctest::Contains("DuplicatePair"), Error);
    CHECK_THROWS_WITH_AS(
        norms_from("concept,property,category\ncat,has fur,mammal\ncat,can purr,fish\n"),
        doctest::Contains("InconsistentCategory"), Error);
    CHECK_THROWS_WITH_AS(norms_from("concept,property,category\ncat,has fur\n"),
                         doctest::Contains("MalformedRow"), Error);
    CHECK_THROWS_WITH_AS(norms_from("bad,header,row\n"), doctest::Contains("MalformedRow"),
                         Error);
}

TEST_CASE("generate_negatives picks the taxonomically closest candidate") {
    // x,y under a; z under b: the sibling of x outranks the distant z.
    const auto full = norms_from(
        "concept,property,category\nx,has p,one\ny,has q,one\nz,has s,two\n");
    const auto taxonomy = taxonomy_from("x\ta\ny\ta\nz\tb\na\tr\nb\tr\n");
    const auto negatives = generate_negatives(full, taxonomy);
    CHECK(negatives.at("has p") == std::vector<std::string>{"y"});
    CHECK(negatives.at("has q") == std::vector<std::string>{"x"});
    // For z both candidates tie at gwup = 1/3; lexicographic order decides.
    CHECK(negatives.at("has s") == std::vector<std::string>{"x"});
}

TEST_CASE("generate_negatives forced and error cases") {
    const auto taxonomy = taxonomy_from("x\ta\ny\ta\nz\tb\na\tr\nb\tr\n");
    // Property possessed by all concepts but one: the remainder is forced.
    const auto forced = norms_from(
        "concept,property,category\nx,has p,one\ny,has q,one\n");
    CHECK(generate_negatives(forced, taxonomy).at("has p") == std::vector<std::string>{"y"});
    CHECK(generate_negatives(forced, taxonomy).at("has q") == std::vector<std::string>{"x"});

    const auto saturated = norms_from(
        "concept,property,category\nx,has p,one\ny,has p,one\nz,has p,two\n");
    CHECK_THROWS_WITH_AS(generate_negatives(saturated, taxonomy),
                         doctest::Contains("InsufficientCandidates"), Error);

    const auto missing = norms_from("concept,property,category\nq,has p,one\n");
    CHECK_THROWS_WITH_AS(generate_negatives(missing, taxonomy),
                         doctest::Contains("ConceptNotInTaxonomy"), Error);
}

TEST_CASE("generate_negatives agrees with the brute-force oracle on random banks") {
    std::mt19937_64 rng(20260811);
    for (int round = 0; round < 25; ++round) {
        const auto bank = fixtures::random_bank(rng);
        oracle::RawTree raw;
        std::istringstream edges(bank.taxonomy_edges);
        std::string line;
        while (std::getline(edges, line)) {
            const auto tab = line.find('\t');
            raw.parent[line.substr(0, tab)] = line.substr(tab + 1);
        }
        const auto negatives = generate_negatives(bank.norms, bank.taxonomy);
        for (const auto& property : bank.norms.properties) {
            const auto expected =
                oracle::negatives(raw, bank.norms.concepts, bank.norms.positives.at(property));
            CHECK(negatives.at(property) == expected);
        }
    }
}

TEST_CASE("negatives never intersect positives and match their count") {
    std::mt19937_64 rng(99);
    for (int round = 0; round < 10; ++round) {
        const auto bank = fixtures::random_bank(rng);
        const auto negatives = generate_negatives(bank.norms, bank.taxonomy);
        for (const auto& property : bank.norms.properties) {
            const auto& pos = bank.norms.positives.at(property);
            const auto& neg = negatives.at(property);
            CHECK(neg.size() == pos.size());
            const std::set<std::string> pos_set(pos.begin(), pos.end());
            for (const auto& concept_name : neg) CHECK_FALSE(pos_set.count(concept_name));
        }
    }
}

TEST_CASE("sentencize renders the documented template") {
    CHECK(sentencize("robin", "can fly") == "a robin can fly.");
    CHECK(sentencize("ostrich", "has feathers") == "an ostrich has feathers.");
    CHECK(sentencize("cat", "has fur") == "a cat has fur.");
    CHECK(sentencize("Cat", "Has Fur") == "a cat has fur.");
    CHECK_THROWS_WITH_AS(sentencize("", "has fur"), doctest::Contains("EmptyConcept"), Error);
    CHECK_THROWS_WITH_AS(sentencize("cat", ""), doctest::Contains("EmptyProperty"), Error);
}

TEST_CASE("sentence parses back into concept and property") {
    // Given the template, the text between the article and the property is
    // the concept; checked for a two-token property.
    const std::string text = sentencize("zebra", "has stripes");
    CHECK(text == "a zebra has stripes.");
    const auto space = text.find(' ');
    const auto rest = text.substr(space + 1);
    CHECK(rest.substr(0, rest.find(' ')) == "zebra");
    CHECK(rest.substr(rest.find(' ') + 1) == "has stripes.");
}

TEST_CASE("build_dataset pairs positives with negatives") {
    const auto norms = norms_from("concept,property,category\nx,has p,one\n");
    std::map<std::string, std::vector<std::string>> negatives{{"has p", {"y"}}};
    const auto dataset = build_dataset(norms, negatives);
    REQUIRE(dataset.size() == 2);
    CHECK(dataset[0].label);
    CHECK(dataset[0].concept_name == "x");
    CHECK_FALSE(dataset[1].label);
    CHECK(dataset[1].concept_name == "y");

    CHECK_THROWS_WITH_AS(build_dataset(norms, {}), doctest::Contains("MismatchedNegatives"),
                         Error);
}

TEST_CASE("dataset size doubles the positive pairs on a random bank") {
    std::mt19937_64 rng(5);
    const auto bank = fixtures::random_bank(rng);
    const auto negatives = generate_negatives(bank.norms, bank.taxonomy);
    const auto dataset = build_dataset(bank.norms, negatives);
    CHECK(dataset.size() == 2 * bank.norms.pair_count());
}

TEST_CASE("split is property-disjoint and deterministic") {
    std::mt19937_64 rng(17);
    const auto bank = fixtures::random_bank(rng);
    const auto dataset = build_dataset(bank.norms, generate_negatives(bank.norms, bank.taxonomy));

    const auto split = split_property_disjoint(dataset, 0.8, 0.1, 0.1, 42);
    auto properties_of = [](const std::vector<LabeledSentence>& part) {
        std::set<std::string> out;
        for (const auto& s : part) out.insert(s.property);
        return out;
    };
    const auto train_props = properties_of(split.train);
    const auto val_props = properties_of(split.val);
    const auto test_props = properties_of(split.test);
    for (const auto& p : val_props) CHECK_FALSE(train_props.count(p));
    for (const auto& p : test_props) CHECK_FALSE(train_props.count(p));
    for (const auto& p : test_props) CHECK_FALSE(val_props.count(p));

    // Equal positive and negative counts per property within each partition.
    for (const auto* part : {&split.train, &split.val, &split.test}) {
        std::map<std::string, int> balance;
        for (const auto& s : *part) balance[s.property] += s.label ? 1 : -1;
        for (const auto& [property, delta] : balance) CHECK(delta == 0);
    }

    const auto again = split_property_disjoint(dataset, 0.8, 0.1, 0.1, 42);
    CHECK(again.train.size() == split.train.size());
    for (std::size_t i = 0; i < split.train.size(); ++i)
        CHECK(again.train[i].text == split.train[i].text);

    const auto other_seed = split_property_disjoint(dataset, 0.8, 0.1, 0.1, 43);
    CHECK(other_seed.seed == 43);
}

TEST_CASE("three equal properties land one per partition at equal ratios") {
    const auto norms = norms_from(
        "concept,property,category\nx,has p,one\nx,has q,one\nx,has r,one\n");
    std::map<std::string, std::vector<std::string>> negatives{
        {"has p", {"y"}}, {"has q", {"y"}}, {"has r", {"y"}}};
    const auto dataset = build_dataset(norms, negatives);
    const auto split = split_property_disjoint(dataset, 1.0 / 3, 1.0 / 3, 1.0 / 3, 1);
    CHECK(split.train.size() == 2);
    CHECK(split.val.size() == 2);
    CHECK(split.test.size() == 2);
}

TEST_CASE("split refuses fewer than three properties") {
    const auto norms = norms_from("concept,property,category\nx,has p,one\n");
    std::map<std::string, std::vector<std::string>> negatives{{"has p", {"y"}}};
    const auto dataset = build_dataset(norms, negatives);
    CHECK_THROWS_WITH_AS(split_property_disjoint(dataset, 0.8, 0.1, 0.1, 1),
                         doctest::Contains("TooFewProperties"), Error);
}

TEST_CASE("split rejects ratios that do not sum to one") {
    const auto norms = norms_from(
        "concept,property,category\nx,has p,one\nx,has q,one\nx,has r,one\n");
    std::map<std::string, std::vector<std::string>> negatives{
        {"has p", {"y"}}, {"has q", {"y"}}, {"has r", {"y"}}};
    const auto dataset = build_dataset(norms, negatives);
    CHECK_THROWS_WITH_AS(split_property_disjoint(dataset, 0.8, 0.1, 0.2, 1),
                         doctest::Contains("InvalidRatios"), Error);
}

TEST_CASE("dataset CSV round-trips through write and read") {
    std::mt19937_64 rng(23);
    const auto bank = fixtures::random_bank(rng);
    const auto dataset = build_dataset(bank.norms, generate_negatives(bank.norms, bank.taxonomy));
    const auto split = split_property_disjoint(dataset, 0.8, 0.1, 0.1, 7);

    const std::string path = "norms_roundtrip.csv";
    write_dataset_csv(split, path, {"# test"});
    const auto loaded = read_dataset_csv(path);
    REQUIRE(loaded.train.size() == split.train.size());
    REQUIRE(loaded.val.size() == split.val.size());
    REQUIRE(loaded.test.size() == split.test.size());
    for (std::size_t i = 0; i < split.train.size(); ++i) {
        CHECK(loaded.train[i].text == split.train[i].text);
        CHECK(loaded.train[i].label == split.train[i].label);
    }
    std::remove(path.c_str());
}
