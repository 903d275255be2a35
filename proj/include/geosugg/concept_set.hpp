#pragma once

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <set>
#include <string>

namespace geosugg {

/// Unordered set of ontology class ids. Stored sorted so every artifact
/// lists concepts in a reproducible order.
using ConceptSet = std::set<std::string>;

inline ConceptSet set_union(const ConceptSet& a, const ConceptSet& b) {
    ConceptSet out = a;
    out.insert(b.begin(), b.end());
    return out;
}

inline ConceptSet set_difference(const ConceptSet& a, const ConceptSet& b) {
    ConceptSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(out, out.end()));
    return out;
}

inline std::size_t intersection_size(const ConceptSet& a, const ConceptSet& b) {
    std::size_t n = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++n;
            ++ia;
            ++ib;
        }
    }
    return n;
}

inline bool is_subset(const ConceptSet& sub, const ConceptSet& super) {
    return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

}  // namespace geosugg
