#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "geosugg/errors.hpp"
#include "geosugg/text.hpp"

namespace geosugg {

struct AnnotationPhrase {
    std::string surface;
    std::vector<std::string> lemmas;

    bool operator==(const AnnotationPhrase&) const = default;
};

struct OntClass {
    std::string id;
    std::string label;
    std::set<std::string> parent_ids;
    std::vector<AnnotationPhrase> annotations;
    std::optional<std::string> facet;

    bool operator==(const OntClass&) const = default;
};

/**
 * Rooted DAG of annotated classes. Parent links point from a class to its
 * superclasses; the root is the only class without parents.
 *
 * Instances are only produced through make(), which enforces every
 * structural invariant, and are immutable afterwards.
 */
class Ontology {
public:
    using ClassMap = std::map<std::string, OntClass>;

    static Ontology make(std::string root_id, ClassMap classes) {
        Ontology ont;
        ont.root_id_ = std::move(root_id);
        ont.classes_ = std::move(classes);
        ont.validate();
        return ont;
    }

    const std::string& root_id() const { return root_id_; }
    const ClassMap& classes() const { return classes_; }
    std::size_t size() const { return classes_.size(); }

    bool contains(const std::string& id) const { return classes_.count(id) != 0; }

    const OntClass& at(const std::string& id) const {
        auto it = classes_.find(id);
        if (it == classes_.end()) throw std::out_of_range("unknown class: " + id);
        return it->second;
    }

    /// child ids per class, derived from parent links
    std::map<std::string, std::set<std::string>> children() const {
        std::map<std::string, std::set<std::string>> out;
        for (const auto& [id, cls] : classes_) {
            out[id];
            for (const auto& p : cls.parent_ids) out[p].insert(id);
        }
        return out;
    }

    /// All proper ancestors of `id`.
    std::set<std::string> ancestors(const std::string& id) const {
        std::set<std::string> seen;
        std::vector<std::string> stack(at(id).parent_ids.begin(), at(id).parent_ids.end());
        while (!stack.empty()) {
            std::string cur = std::move(stack.back());
            stack.pop_back();
            if (!seen.insert(cur).second) continue;
            for (const auto& p : at(cur).parent_ids) stack.push_back(p);
        }
        return seen;
    }

    bool operator==(const Ontology&) const = default;

private:
    Ontology() = default;

    void validate() const {
        auto root_it = classes_.find(root_id_);
        if (root_it == classes_.end())
            throw validation_error("root class '" + root_id_ + "' is not defined");
        if (!root_it->second.parent_ids.empty())
            throw validation_error("root class '" + root_id_ + "' must not have parents");

        for (const auto& [id, cls] : classes_) {
            if (cls.id != id) throw validation_error("class key mismatch for '" + id + "'");
            if (id != root_id_ && cls.parent_ids.empty())
                throw validation_error("class '" + id + "' has no parents (second root)");
            for (const auto& p : cls.parent_ids) {
                if (!classes_.count(p))
                    throw validation_error("class '" + id + "' lists undefined parent '" + p + "'");
            }
            for (const auto& phrase : cls.annotations) {
                if (phrase.lemmas.empty())
                    throw validation_error("class '" + id + "' has an annotation without lemmas");
                for (const auto& lemma : phrase.lemmas) {
                    const bool bad = lemma.empty() || std::any_of(lemma.begin(), lemma.end(), [](char c) {
                                         return c == ' ' || c == '\t' || c == '\n' || c == '\r' ||
                                                (c >= 'A' && c <= 'Z');
                                     });
                    if (bad)
                        throw validation_error("class '" + id + "' has malformed lemma '" + lemma +
                                               "' (lemmas are lowercase single tokens)");
                }
            }
        }

        // Three-colour DFS over parent links.
        enum class Mark { none, active, done };
        std::unordered_map<std::string, Mark> mark;
        for (const auto& [start, _] : classes_) {
            if (mark[start] == Mark::done) continue;
            std::vector<std::pair<const OntClass*, std::set<std::string>::const_iterator>> stack;
            const OntClass* first = &classes_.at(start);
            mark[start] = Mark::active;
            stack.emplace_back(first, first->parent_ids.begin());
            while (!stack.empty()) {
                auto& [cls, it] = stack.back();
                if (it == cls->parent_ids.end()) {
                    mark[cls->id] = Mark::done;
                    stack.pop_back();
                    continue;
                }
                const std::string& next = *it++;
                Mark& m = mark[next];
                if (m == Mark::active)
                    throw validation_error("cycle through class '" + next + "'");
                if (m == Mark::none) {
                    m = Mark::active;
                    const OntClass* nc = &classes_.at(next);
                    stack.emplace_back(nc, nc->parent_ids.begin());
                }
            }
        }
    }

    std::string root_id_;
    ClassMap classes_;
};

// ---------------------------------------------------------------------------
// JSON schema:
// {"root": id, "classes": [{"id", "label", "parents": [..], "facet": str|null,
//                            "annotations": [{"surface", "lemmas": [..]}]}]}

namespace detail {

template <typename T>
T required(const nlohmann::json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw parse_error(where + ": missing field '" + key + "'");
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(where + ": field '" + key + "' has wrong type (" + e.what() + ")");
    }
}

inline AnnotationPhrase phrase_from_json(const nlohmann::json& j, const std::string& where,
                                         bool derive_missing_lemmas) {
    if (!j.is_object()) throw parse_error(where + ": annotation must be an object");
    AnnotationPhrase phrase;
    phrase.surface = required<std::string>(j, "surface", where);
    if (j.contains("lemmas") || !derive_missing_lemmas) {
        phrase.lemmas = required<std::vector<std::string>>(j, "lemmas", where);
    } else {
        phrase.lemmas = normalize(phrase.surface);
    }
    return phrase;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline nlohmann::json parse_json_text(const std::string& text, const std::string& where) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(where + ": " + e.what());
    }
}

}  // namespace detail

inline Ontology ontology_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw parse_error("ontology: top level must be an object");
    auto root = detail::required<std::string>(j, "root", "ontology");
    auto it = j.find("classes");
    if (it == j.end() || !it->is_array()) throw parse_error("ontology: 'classes' must be an array");

    Ontology::ClassMap classes;
    for (const auto& cj : *it) {
        if (!cj.is_object()) throw parse_error("ontology: class entries must be objects");
        OntClass cls;
        cls.id = detail::required<std::string>(cj, "id", "class");
        const std::string where = "class '" + cls.id + "'";
        cls.label = cj.value("label", cls.id);
        if (cj.contains("parents")) {
            auto parents = detail::required<std::vector<std::string>>(cj, "parents", where);
            cls.parent_ids.insert(parents.begin(), parents.end());
        }
        if (auto f = cj.find("facet"); f != cj.end() && !f->is_null()) {
            if (!f->is_string()) throw parse_error(where + ": 'facet' must be a string or null");
            cls.facet = f->get<std::string>();
        }
        if (auto a = cj.find("annotations"); a != cj.end()) {
            if (!a->is_array()) throw parse_error(where + ": 'annotations' must be an array");
            for (const auto& pj : *a) cls.annotations.push_back(detail::phrase_from_json(pj, where, false));
        }
        const std::string id = cls.id;
        if (!classes.emplace(id, std::move(cls)).second)
            throw validation_error("duplicate class id '" + id + "'");
    }
    return Ontology::make(std::move(root), std::move(classes));
}

inline nlohmann::json ontology_to_json(const Ontology& ont) {
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& [id, cls] : ont.classes()) {
        nlohmann::json annotations = nlohmann::json::array();
        for (const auto& p : cls.annotations)
            annotations.push_back({{"surface", p.surface}, {"lemmas", p.lemmas}});
        classes.push_back({{"id", cls.id},
                           {"label", cls.label},
                           {"parents", cls.parent_ids},
                           {"facet", cls.facet ? nlohmann::json(*cls.facet) : nlohmann::json(nullptr)},
                           {"annotations", std::move(annotations)}});
    }
    return {{"root", ont.root_id()}, {"classes", std::move(classes)}};
}

inline Ontology load_ontology(const std::string& path) {
    auto j = detail::parse_json_text(detail::read_file(path), path);
    return ontology_from_json(j);
}

/**
 * Merges synonym phrases from a lexicon document into the ontology:
 * {"classes": {"<class id>": [{"surface": str, "lemmas": [str]?}, ...]}}.
 * Missing lemmas are derived from the surface form with normalize().
 */
inline Ontology apply_lexicon(const Ontology& ont, const nlohmann::json& lexicon) {
    auto it = lexicon.find("classes");
    if (!lexicon.is_object() || it == lexicon.end() || !it->is_object())
        throw parse_error("lexicon: expected an object with a 'classes' object");
    Ontology::ClassMap classes = ont.classes();
    for (const auto& [id, phrases] : it->items()) {
        auto cls = classes.find(id);
        if (cls == classes.end()) throw validation_error("lexicon refers to unknown class '" + id + "'");
        if (!phrases.is_array()) throw parse_error("lexicon: entry for '" + id + "' must be an array");
        for (const auto& pj : phrases) {
            auto phrase = detail::phrase_from_json(pj, "lexicon '" + id + "'", true);
            if (std::find(cls->second.annotations.begin(), cls->second.annotations.end(), phrase) ==
                cls->second.annotations.end())
                cls->second.annotations.push_back(std::move(phrase));
        }
    }
    return Ontology::make(ont.root_id(), std::move(classes));
}

inline Ontology apply_lexicon_file(const Ontology& ont, const std::string& path) {
    return apply_lexicon(ont, detail::parse_json_text(detail::read_file(path), path));
}

// ---------------------------------------------------------------------------

/**
 * Drops every class whose facet is in `excluded_facets`; the root is always
 * kept. An excluded parent is replaced by its nearest kept ancestors, so a
 * class whose whole ancestry up to the root was excluded ends up directly
 * under the root. Replacement ancestors already implied by another parent
 * are not added.
 */
inline Ontology subset_by_facet(const Ontology& ont, const std::set<std::string>& excluded_facets) {
    if (excluded_facets.empty()) return ont;

    auto kept = [&](const OntClass& c) {
        return c.id == ont.root_id() || !c.facet || !excluded_facets.count(*c.facet);
    };

    Ontology::ClassMap out;
    for (const auto& [id, cls] : ont.classes()) {
        if (!kept(cls)) continue;
        OntClass copy = cls;
        copy.parent_ids.clear();

        std::set<std::string> direct;
        std::set<std::string> lifted;
        std::set<std::string> visited;
        std::vector<std::string> stack;
        for (const auto& p : cls.parent_ids) {
            if (kept(ont.at(p)))
                direct.insert(p);
            else
                stack.push_back(p);
        }
        while (!stack.empty()) {
            std::string cur = std::move(stack.back());
            stack.pop_back();
            if (!visited.insert(cur).second) continue;
            for (const auto& p : ont.at(cur).parent_ids) {
                if (kept(ont.at(p)))
                    lifted.insert(p);
                else
                    stack.push_back(p);
            }
        }

        std::set<std::string> candidates = direct;
        candidates.insert(lifted.begin(), lifted.end());
        copy.parent_ids = direct;
        for (const auto& l : lifted) {
            if (direct.count(l)) continue;
            const bool implied = std::any_of(candidates.begin(), candidates.end(), [&](const std::string& other) {
                return other != l && ont.ancestors(other).count(l);
            });
            if (!implied) copy.parent_ids.insert(l);
        }
        out.emplace(id, std::move(copy));
    }
    return Ontology::make(ont.root_id(), std::move(out));
}

// ---------------------------------------------------------------------------

struct OntologyMetrics {
    std::size_t class_count = 0;
    std::size_t subclass_relation_count = 0;
    std::size_t longest_root_to_leaf_path = 0;
    double mean_node_degree = 0.0;

    bool operator==(const OntologyMetrics&) const = default;
};

/// Counts exclude the root class; every child-to-parent link is a relation,
/// including links to the root. Degree is in-degree plus out-degree.
inline OntologyMetrics compute_metrics(const Ontology& ont) {
    OntologyMetrics m;
    m.class_count = ont.size() - 1;

    std::map<std::string, std::size_t> child_count;
    for (const auto& [id, cls] : ont.classes()) {
        m.subclass_relation_count += cls.parent_ids.size();
        for (const auto& p : cls.parent_ids) ++child_count[p];
    }

    std::map<std::string, std::size_t> depth;
    std::function<std::size_t(const std::string&)> longest = [&](const std::string& id) -> std::size_t {
        if (auto it = depth.find(id); it != depth.end()) return it->second;
        std::size_t d = 0;
        for (const auto& p : ont.at(id).parent_ids) d = std::max(d, longest(p) + 1);
        depth.emplace(id, d);
        return d;
    };
    for (const auto& [id, _] : ont.classes())
        m.longest_root_to_leaf_path = std::max(m.longest_root_to_leaf_path, longest(id));

    if (m.class_count > 0) {
        std::size_t degree_sum = 0;
        for (const auto& [id, cls] : ont.classes()) {
            if (id == ont.root_id()) continue;
            degree_sum += cls.parent_ids.size() + child_count[id];
        }
        m.mean_node_degree = static_cast<double>(degree_sum) / static_cast<double>(m.class_count);
    }
    return m;
}

// ---------------------------------------------------------------------------

/// Normalized lemma sequence -> owning class ids.
struct LemmaIndex {
    std::map<std::vector<std::string>, std::set<std::string>> entries;
    std::size_t max_phrase_length = 0;
    /// classes that carry no annotations of their own
    std::vector<std::string> unannotated;

    bool empty() const { return entries.empty(); }
};

struct LemmaIndexOptions {
    /// also index each class label as one more phrase
    bool index_labels = true;
};

inline LemmaIndex build_lemma_index(const Ontology& ont, LemmaIndexOptions options = {}) {
    LemmaIndex index;
    auto add = [&](const std::vector<std::string>& words, const std::string& owner) {
        std::vector<std::string> key;
        for (const auto& w : words) {
            auto toks = normalize(w);
            key.insert(key.end(), toks.begin(), toks.end());
        }
        if (key.empty()) return;
        index.max_phrase_length = std::max(index.max_phrase_length, key.size());
        index.entries[std::move(key)].insert(owner);
    };

    for (const auto& [id, cls] : ont.classes()) {
        if (id == ont.root_id()) continue;
        if (cls.annotations.empty()) index.unannotated.push_back(id);
        for (const auto& phrase : cls.annotations) add(phrase.lemmas, id);
        if (options.index_labels) add({cls.label}, id);
    }
    return index;
}

}  // namespace geosugg
