#include "inductlab/taxonomy.hpp"

#include <algorithm>
#include <fstream>

#include "inductlab/error.hpp"

namespace inductlab {

namespace {

int intern_node(std::vector<std::string>& names, std::unordered_map<std::string, int>& index,
           const std::string& name) {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    const int id = static_cast<int>(names.size());
    names.push_back(name);
    index.emplace(name, id);
    return id;
}

} // namespace

Taxonomy Taxonomy::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("IoFailure", "cannot open taxonomy file " + path);
    return load(in);
}

Taxonomy Taxonomy::load(std::istream& in) {
    Taxonomy t;
    std::string line;
    std::vector<bool> is_parent;
    bool any_edge = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
            fail("MalformedRow", "expected child<TAB>parent, got: " + line);
        const std::string child = line.substr(0, tab);
        const std::string parent = line.substr(tab + 1);
        if (child.find('\t') != std::string::npos || parent.find('\t') != std::string::npos)
            fail("MalformedRow", "identifiers must not contain tabs: " + line);
        any_edge = true;
        const int c = intern_node(t.names_, t.index_, child);
        const int p = intern_node(t.names_, t.index_, parent);
        t.parents_.resize(t.names_.size(), -1);
        is_parent.resize(t.names_.size(), false);
        if (t.parents_[static_cast<std::size_t>(c)] == -1) {
            t.parents_[static_cast<std::size_t>(c)] = p;
        } else if (t.parents_[static_cast<std::size_t>(c)] != p) {
            fail("ConflictingParent", child + " listed under both " +
                                          t.names_[static_cast<std::size_t>(
                                              t.parents_[static_cast<std::size_t>(c)])] +
                                          " and " + parent);
        }
        is_parent[static_cast<std::size_t>(p)] = true;
    }
    if (!any_edge) fail("EmptyInput", "taxonomy source has no edges");

    for (std::size_t i = 0; i < t.names_.size(); ++i) {
        if (t.parents_[i] != -1) continue;
        if (t.root_ != -1)
            fail("MultipleRoots", t.names_[static_cast<std::size_t>(t.root_)] + " and " +
                                      t.names_[i] + " both lack a parent");
        t.root_ = static_cast<int>(i);
    }
    if (t.root_ == -1) fail("CycleDetected", "every node has a parent; no root exists");

    // Depths in one pass; a node whose chain never reaches the root sits on a cycle.
    t.depths_.assign(t.names_.size(), 0);
    const auto n = static_cast<int>(t.names_.size());
    for (int i = 0; i < n; ++i) {
        int steps = 0;
        int cursor = i;
        std::vector<int> chain;
        while (cursor != -1 && t.depths_[static_cast<std::size_t>(cursor)] == 0) {
            chain.push_back(cursor);
            cursor = t.parents_[static_cast<std::size_t>(cursor)];
            if (++steps > n)
                fail("CycleDetected", "parent chain from " + t.names_[static_cast<std::size_t>(i)] +
                                          " never reaches the root");
        }
        int base = cursor == -1 ? 0 : t.depths_[static_cast<std::size_t>(cursor)];
        for (auto it = chain.rbegin(); it != chain.rend(); ++it)
            t.depths_[static_cast<std::size_t>(*it)] = ++base;
    }

    for (std::size_t i = 0; i < t.names_.size(); ++i)
        if (!is_parent[i]) t.leaf_concepts_.push_back(t.names_[i]);
    std::sort(t.leaf_concepts_.begin(), t.leaf_concepts_.end());
    return t;
}

bool Taxonomy::contains(std::string_view node) const {
    return index_.find(std::string(node)) != index_.end();
}

int Taxonomy::index_of(std::string_view node) const {
    auto it = index_.find(std::string(node));
    if (it == index_.end()) fail("UnknownNode", "node not in taxonomy: " + std::string(node));
    return it->second;
}

int Taxonomy::depth(std::string_view node) const {
    return depths_[static_cast<std::size_t>(index_of(node))];
}

int Taxonomy::lcs_pair(int a, int b) const {
    while (a != b) {
        if (depths_[static_cast<std::size_t>(a)] >= depths_[static_cast<std::size_t>(b)])
            a = parents_[static_cast<std::size_t>(a)];
        else
            b = parents_[static_cast<std::size_t>(b)];
    }
    return a;
}

std::string Taxonomy::lcs(const std::vector<std::string>& nodes) const {
    if (nodes.empty()) fail("EmptySet", "lcs of an empty node set");
    int acc = index_of(nodes.front());
    for (std::size_t i = 1; i < nodes.size(); ++i)
        acc = lcs_pair(acc, index_of(nodes[i]));
    return names_[static_cast<std::size_t>(acc)];
}

double Taxonomy::wu_palmer(std::string_view a, std::string_view b) const {
    const int ia = index_of(a);
    const int ib = index_of(b);
    const int lcs = lcs_pair(ia, ib);
    return 2.0 * depths_[static_cast<std::size_t>(lcs)] /
           (depths_[static_cast<std::size_t>(ia)] + depths_[static_cast<std::size_t>(ib)]);
}

double Taxonomy::gwup(const std::vector<std::string>& nodes) const {
    if (nodes.empty()) fail("EmptySet", "gwup of an empty node set");
    int acc = index_of(nodes.front());
    long sum_depths = depths_[static_cast<std::size_t>(acc)];
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const int id = index_of(nodes[i]);
        acc = lcs_pair(acc, id);
        sum_depths += depths_[static_cast<std::size_t>(id)];
    }
    return static_cast<double>(nodes.size()) * depths_[static_cast<std::size_t>(acc)] /
           static_cast<double>(sum_depths);
}

double Taxonomy::gwup_extended(int base_lcs, int sum_depths, int n_base, int candidate) const {
    const int lcs = lcs_pair(base_lcs, candidate);
    return static_cast<double>(n_base + 1) * depths_[static_cast<std::size_t>(lcs)] /
           static_cast<double>(sum_depths + depths_[static_cast<std::size_t>(candidate)]);
}

} // namespace inductlab
