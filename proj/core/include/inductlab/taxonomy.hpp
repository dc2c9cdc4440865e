#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace inductlab {

/// Rooted tree over concept senses. Immutable after load; all queries are
/// read-only and safe from any number of concurrent callers.
///
/// Depth convention: depth(root) = 1, so Wu-Palmer similarity is strictly
/// positive even when the least common subsumer is the root.
class Taxonomy {
public:
    Taxonomy() = default; // empty; fill via load

    /// Parses a line-oriented edge listing: one `child<TAB>parent` per line,
    /// blank lines and '#'-prefixed comment lines ignored. Duplicate
    /// identical edges are idempotent.
    static Taxonomy load(std::istream& in);
    static Taxonomy load_file(const std::string& path);

    std::size_t node_count() const noexcept { return names_.size(); }
    bool contains(std::string_view node) const;
    const std::string& root() const { return names_[root_]; }

    /// Nodes flagged as norm-bank concepts (leaves of interest). A node is a
    /// leaf concept when no edge lists it as a parent.
    const std::vector<std::string>& leaf_concepts() const { return leaf_concepts_; }

    /// Path length from the root, counting both endpoints: depth(root) = 1.
    int depth(std::string_view node) const;

    /// Deepest node that is an ancestor-or-self of every member of `nodes`.
    std::string lcs(const std::vector<std::string>& nodes) const;

    /// 2 * depth(lcs) / (depth(a) + depth(b)); symmetric, 1 iff a == b.
    double wu_palmer(std::string_view a, std::string_view b) const;

    /// n * depth(lcs(nodes)) / sum of depths; reduces to wu_palmer for n = 2.
    double gwup(const std::vector<std::string>& nodes) const;

    // Index-based variants for hot paths (negative sampling scores every
    // candidate against every property's positive set).
    int index_of(std::string_view node) const;
    const std::string& name_of(int index) const { return names_[static_cast<std::size_t>(index)]; }
    int depth_at(int index) const { return depths_[static_cast<std::size_t>(index)]; }
    int parent_at(int index) const { return parents_[static_cast<std::size_t>(index)]; }
    int lcs_pair(int a, int b) const;

    double gwup_extended(int base_lcs, int sum_depths, int n_base, int candidate) const;

private:
    std::vector<std::string> names_;
    std::vector<int> parents_; // -1 for root
    std::vector<int> depths_;
    std::unordered_map<std::string, int> index_;
    std::vector<std::string> leaf_concepts_;
    int root_ = -1;
};

} // namespace inductlab
