#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "geosugg/concept_set.hpp"
#include "geosugg/errors.hpp"
#include "geosugg/ontology.hpp"
#include "geosugg/text.hpp"

namespace geosugg {

/// Maps query text to ontology concepts by contiguous lemma-phrase lookup.
/// Immutable once built; safe to share between threads.
class ConceptMatcher {
public:
    explicit ConceptMatcher(LemmaIndex index) : index_(std::move(index)) {
        if (index_.empty()) throw validation_error("concept matcher needs a non-empty lemma index");
    }

    static ConceptMatcher from_ontology(const Ontology& ont, LemmaIndexOptions options = {}) {
        return ConceptMatcher(build_lemma_index(ont, options));
    }

    const LemmaIndex& index() const { return index_; }
    std::string_view normalizer() const { return normalizer_id; }

    /// Every indexed phrase occurring as a contiguous run of the normalized
    /// tokens contributes its classes; overlapping matches all count.
    ConceptSet match_tokens(const std::vector<std::string>& tokens) const {
        ConceptSet out;
        std::vector<std::string> window;
        for (std::size_t start = 0; start < tokens.size(); ++start) {
            window.clear();
            for (std::size_t len = 1; len <= index_.max_phrase_length && start + len <= tokens.size(); ++len) {
                window.push_back(tokens[start + len - 1]);
                if (auto it = index_.entries.find(window); it != index_.entries.end())
                    out.insert(it->second.begin(), it->second.end());
            }
        }
        return out;
    }

    ConceptSet match_query(std::string_view query_text) const { return match_tokens(normalize(query_text)); }

private:
    LemmaIndex index_;
};

/// Union of the concepts of the first `upto` queries (1-based, inclusive).
template <typename Session>
ConceptSet session_concepts(const Session& session, const ConceptMatcher& matcher, std::size_t upto) {
    if (upto < 1 || upto > session.queries.size())
        throw std::out_of_range("session_concepts: index " + std::to_string(upto) + " outside 1.." +
                                std::to_string(session.queries.size()));
    ConceptSet out;
    for (std::size_t i = 0; i < upto; ++i) {
        auto c = matcher.match_query(session.queries[i].query_text);
        out.insert(c.begin(), c.end());
    }
    return out;
}

}  // namespace geosugg
