#include "hmmtag/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace hmmtag {

namespace {

constexpr double kRowSumTolerance = 1e-9;

void check_tag_name(const std::string& name) {
    if (name.empty()) throw ModelError("empty tag name");
    for (char c : name) {
        if (c == '/' || c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\\')
            throw ModelError("tag name '" + name + "' contains a reserved character");
    }
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Zero cells become epsilon, then the row is renormalised to sum 1.
void floor_and_normalize(std::vector<double>& row, double epsilon) {
    double sum = 0.0;
    for (double& cell : row) {
        if (cell == 0.0) cell = epsilon;
        sum += cell;
    }
    if (sum <= 0.0) throw ModelError("transition row with no mass");
    for (double& cell : row) cell /= sum;
}

}  // namespace

const std::string& HmmModel::boundary_tag() {
    static const std::string tag = "<s>";
    return tag;
}

HmmModel::HmmModel(ModelData data) : data_(std::move(data)) {
    const auto& tags = data_.tags;
    if (tags.size() < 2) throw ModelError("model needs the boundary tag and at least one real tag");
    if (!std::is_sorted(tags.begin(), tags.end()))
        throw ModelError("tag list must be sorted");
    if (std::adjacent_find(tags.begin(), tags.end()) != tags.end())
        throw ModelError("duplicate tag name");
    for (std::size_t i = 0; i < tags.size(); ++i) {
        check_tag_name(tags[i]);
        tag_ids_.emplace(tags[i], static_cast<int>(i));
        if (tags[i] == boundary_tag()) boundary_id_ = static_cast<int>(i);
    }
    if (boundary_id_ < 0) throw ModelError("boundary tag missing from tagset");

    const std::size_t k = tags.size();
    if (data_.transitions.size() != k * k)
        throw ModelError("transition table size does not match tagset");
    for (std::size_t i = 0; i < k; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            double cell = data_.transitions[i * k + j];
            if (!(cell > 0.0)) throw ModelError("transition cell must be positive");
            sum += cell;
        }
        if (std::fabs(sum - 1.0) > kRowSumTolerance)
            throw ModelError("transition row for '" + tags[i] + "' does not sum to 1");
    }

    if (!(data_.epsilon > 0.0) || data_.epsilon * static_cast<double>(k) >= 1.0)
        throw ModelError("epsilon must satisfy 0 < epsilon << 1/|tagset|");

    if (data_.open_class.empty()) throw ModelError("open class set is empty");
    int prev = -1;
    for (int id : data_.open_class) {
        if (id <= prev) throw ModelError("open class ids must be ascending and unique");
        if (id < 0 || id >= static_cast<int>(k)) throw ModelError("open class id out of range");
        if (id == boundary_id_) throw ModelError("boundary tag cannot be open class");
        prev = id;
    }

    for (const auto& [word, entry] : data_.lexicon) {
        if (word.empty()) throw ModelError("empty word in lexicon");
        for (char c : word)
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
                throw ModelError("lexicon word contains whitespace");
        if (entry.scores.empty()) throw ModelError("word '" + word + "' has no tags");
        int prev_tag = -1;
        for (const auto& [tag, score] : entry.scores) {
            if (tag <= prev_tag) throw ModelError("entry tags must be ascending and unique");
            if (tag < 0 || tag >= static_cast<int>(k)) throw ModelError("entry tag out of range");
            if (tag == boundary_id_) throw ModelError("boundary tag in lexicon");
            if (!(score >= 0.0)) throw ModelError("negative lexical score");
            prev_tag = tag;
        }
        if (entry.eq_class < -1 ||
            entry.eq_class >= static_cast<int>(data_.eq_classes.size()))
            throw ModelError("equivalence class index out of range");
    }

    for (std::size_t c = 0; c < data_.eq_classes.size(); ++c) {
        const auto& members = data_.eq_classes[c];
        if (members.size() < 2) throw ModelError("equivalence class needs at least two members");
        if (!std::is_sorted(members.begin(), members.end()))
            throw ModelError("equivalence class members must be sorted");
        const LexiconEntry* shared = nullptr;
        for (const auto& member : members) {
            auto it = data_.lexicon.find(member);
            if (it == data_.lexicon.end())
                throw ModelError("equivalence class member '" + member + "' not in lexicon");
            if (it->second.eq_class != static_cast<int>(c))
                throw ModelError("equivalence class index mismatch for '" + member + "'");
            if (shared && !(shared->scores == it->second.scores))
                throw ModelError("equivalence class members disagree on scores");
            shared = &it->second;
        }
    }
}

int HmmModel::tag_id(std::string_view name) const {
    auto it = tag_ids_.find(name);
    return it == tag_ids_.end() ? -1 : it->second;
}

const LexiconEntry* HmmModel::find_word(const std::string& word) const {
    auto it = data_.lexicon.find(word);
    return it == data_.lexicon.end() ? nullptr : &it->second;
}

CountTable count(const TaggedCorpus& corpus) {
    if (corpus.sentences.empty()) throw ModelError("count: empty corpus");
    CountTable t;
    const std::string& boundary = HmmModel::boundary_tag();
    for (const auto& sentence : corpus.sentences) {
        if (sentence.empty()) throw ModelError("count: empty sentence");
        const std::string* prev = &boundary;
        for (const auto& token : sentence) {
            if (token.tag == boundary)
                throw ModelError("count: corpus uses the reserved boundary tag");
            if (token.word.empty()) throw ModelError("count: empty word");
            ++t.tag_count[token.tag];
            ++t.emission_count[token.tag][token.word];
            ++t.word_count[token.word];
            ++t.transition_count[*prev][token.tag];
            ++t.total_tokens;
            prev = &token.tag;
        }
        ++t.transition_count[*prev][boundary];
        ++t.sentence_count;
    }
    t.tag_count[boundary] = t.sentence_count;
    return t;
}

HmmModel estimate(const CountTable& counts, const std::set<std::string>& open_class,
                  Estimator estimator, double epsilon) {
    const std::string& boundary = HmmModel::boundary_tag();

    ModelData data;
    data.estimator = estimator;
    data.epsilon = epsilon;
    for (const auto& [tag, n] : counts.tag_count) {
        if (n < 0) throw ModelError("estimate: negative tag count");
        data.tags.push_back(tag);
    }
    if (!counts.tag_count.count(boundary)) data.tags.push_back(boundary);
    std::sort(data.tags.begin(), data.tags.end());

    const std::size_t k = data.tags.size();
    auto id_of = [&](const std::string& name) {
        auto it = std::lower_bound(data.tags.begin(), data.tags.end(), name);
        if (it == data.tags.end() || *it != name)
            throw ModelError("estimate: counts reference unknown tag '" + name + "'");
        return static_cast<std::size_t>(it - data.tags.begin());
    };

    for (const auto& [from, row] : counts.transition_count)
        for (const auto& [to, n] : row)
            if (n > 0 && !std::binary_search(data.tags.begin(), data.tags.end(), from))
                throw ModelError("estimate: transitions from '" + from + "' but f(" + from +
                                 ") = 0");

    data.transitions.assign(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const std::string& from = data.tags[i];
        auto fit = counts.tag_count.find(from);
        std::int64_t f_i = fit == counts.tag_count.end() ? 0 : fit->second;
        std::vector<double> row(k, 0.0);
        auto rit = counts.transition_count.find(from);
        if (rit != counts.transition_count.end()) {
            for (const auto& [to, n] : rit->second) {
                if (n < 0) throw ModelError("estimate: negative transition count");
                if (n == 0) continue;
                if (f_i == 0)
                    throw ModelError("estimate: transitions from '" + from +
                                     "' but f(" + from + ") = 0");
                row[id_of(to)] = static_cast<double>(n) / static_cast<double>(f_i);
            }
        }
        floor_and_normalize(row, epsilon);
        std::copy(row.begin(), row.end(), data.transitions.begin() + i * k);
    }

    for (const auto& [tag, words] : counts.emission_count) {
        if (tag == boundary) throw ModelError("estimate: boundary tag cannot emit");
        std::size_t tid = id_of(tag);
        auto fit = counts.tag_count.find(tag);
        std::int64_t f_i = fit == counts.tag_count.end() ? 0 : fit->second;
        for (const auto& [word, n] : words) {
            if (n <= 0) continue;
            std::int64_t denom = f_i;
            if (estimator == Estimator::WordNormalized) {
                auto wit = counts.word_count.find(word);
                denom = wit == counts.word_count.end() ? 0 : wit->second;
            }
            if (denom <= 0)
                throw ModelError("estimate: emission for '" + word + "' lacks a denominator");
            data.lexicon[word].scores.emplace_back(
                static_cast<int>(tid), static_cast<double>(n) / static_cast<double>(denom));
        }
    }
    for (auto& [word, entry] : data.lexicon)
        std::sort(entry.scores.begin(), entry.scores.end());

    for (const auto& name : open_class) {
        if (name == boundary) throw ModelError("estimate: boundary tag cannot be open class");
        data.open_class.push_back(static_cast<int>(id_of(name)));
    }
    std::sort(data.open_class.begin(), data.open_class.end());

    return HmmModel(std::move(data));
}

HmmModel apply_equivalence_classes(const HmmModel& model, const CountTable& counts,
                                   double threshold) {
    if (!(threshold > 0.0) || !(threshold < 1.0))
        throw ModelError("equivalence classes: threshold must lie in (0,1)");
    if (!model.eq_classes().empty())
        throw ModelError("equivalence classes: model already pooled");
    if (counts.total_tokens <= 0) throw ModelError("equivalence classes: empty counts");
    const double n_total = static_cast<double>(counts.total_tokens);

    // Group sub-threshold words by their exact tag set.
    std::map<std::vector<int>, std::vector<std::string>> groups;
    for (const auto& [word, entry] : model.lexicon()) {
        auto wit = counts.word_count.find(word);
        if (wit == counts.word_count.end())
            throw ModelError("equivalence classes: counts lack word '" + word + "'");
        if (static_cast<double>(wit->second) / n_total >= threshold) continue;
        std::vector<int> tagset;
        tagset.reserve(entry.scores.size());
        for (const auto& [tag, score] : entry.scores) tagset.push_back(tag);
        groups[std::move(tagset)].push_back(word);
    }

    ModelData data = model.data();
    for (auto& [tagset, words] : groups) {
        std::sort(words.begin(), words.end(), [&](const std::string& a, const std::string& b) {
            auto fa = counts.word_count.at(a), fb = counts.word_count.at(b);
            return fa != fb ? fa < fb : a < b;
        });
        std::vector<std::vector<std::string>> classes;
        std::vector<std::string> current;
        std::int64_t mass = 0;
        for (const auto& word : words) {
            current.push_back(word);
            mass += counts.word_count.at(word);
            if (static_cast<double>(mass) / n_total >= threshold) {
                classes.push_back(std::move(current));
                current.clear();
                mass = 0;
            }
        }
        // A tail that cannot reach the threshold joins the last class formed.
        if (!current.empty()) {
            if (!classes.empty()) {
                auto& last = classes.back();
                last.insert(last.end(), current.begin(), current.end());
            } else {
                classes.push_back(std::move(current));
            }
        }

        for (auto& members : classes) {
            if (members.size() < 2) continue;  // nothing to pool
            std::sort(members.begin(), members.end());

            std::vector<std::pair<int, double>> pooled;
            std::int64_t pooled_word_count = 0;
            for (const auto& member : members) pooled_word_count += counts.word_count.at(member);
            for (int tag : tagset) {
                const std::string& tag_name = model.tag_name(tag);
                std::int64_t num = 0;
                auto eit = counts.emission_count.find(tag_name);
                if (eit != counts.emission_count.end()) {
                    for (const auto& member : members) {
                        auto mit = eit->second.find(member);
                        if (mit != eit->second.end()) num += mit->second;
                    }
                }
                std::int64_t denom = model.estimator() == Estimator::TagNormalized
                                         ? counts.tag_count.at(tag_name)
                                         : pooled_word_count;
                pooled.emplace_back(tag, static_cast<double>(num) / static_cast<double>(denom));
            }

            int class_id = static_cast<int>(data.eq_classes.size());
            for (const auto& member : members) {
                auto& entry = data.lexicon.at(member);
                entry.scores = pooled;
                entry.eq_class = class_id;
            }
            data.eq_classes.push_back(members);
        }
    }
    return HmmModel(std::move(data));
}

std::string save_model(const HmmModel& model) {
    if (model.lexicon().empty()) throw ModelError("save: empty lexicon");
    std::string out = "hmmtag model v1\n";
    out += "epsilon " + format_double(model.epsilon()) + "\n";
    out += std::string("estimator ") +
           (model.estimator() == Estimator::TagNormalized ? "tag" : "word") + "\n";
    out += "tags " + std::to_string(model.num_tags()) + "\n";
    for (const auto& tag : model.tags()) out += tag + "\n";
    out += "open_class " + std::to_string(model.open_class().size()) + "\n";
    for (int id : model.open_class()) out += model.tag_name(id) + "\n";
    out += "transitions\n";
    const int k = model.num_tags();
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            if (j) out.push_back(' ');
            out += format_double(model.transition(i, j));
        }
        out.push_back('\n');
    }
    out += "lexicon " + std::to_string(model.lexicon().size()) + "\n";
    for (const auto& [word, entry] : model.lexicon()) {
        out += word;
        out += entry.origin == WordOrigin::Trained ? " t " : " u ";
        out += std::to_string(entry.eq_class);
        out += " " + std::to_string(entry.scores.size());
        for (const auto& [tag, score] : entry.scores) {
            out += " " + model.tag_name(tag) + " " + format_double(score);
        }
        out.push_back('\n');
    }
    out += "eqclasses " + std::to_string(model.eq_classes().size()) + "\n";
    for (const auto& members : model.eq_classes()) {
        out += std::to_string(members.size());
        for (const auto& member : members) out += " " + member;
        out.push_back('\n');
    }
    out += "end\n";
    return out;
}

namespace {

class TokenReader {
public:
    explicit TokenReader(std::string_view text) : in_(std::string(text)) {}

    std::string word(const char* what) {
        std::string w;
        if (!(in_ >> w)) throw ModelError(std::string("load: truncated file, expected ") + what);
        return w;
    }

    long long integer(const char* what) {
        std::string w = word(what);
        char* end = nullptr;
        long long v = std::strtoll(w.c_str(), &end, 10);
        if (end == w.c_str() || *end)
            throw ModelError(std::string("load: bad integer for ") + what);
        return v;
    }

    double real(const char* what) {
        std::string w = word(what);
        char* end = nullptr;
        double v = std::strtod(w.c_str(), &end);
        if (end == w.c_str() || *end)
            throw ModelError(std::string("load: bad number for ") + what);
        return v;
    }

    void expect(const char* literal) {
        if (word(literal) != literal)
            throw ModelError(std::string("load: expected '") + literal + "'");
    }

private:
    std::istringstream in_;
};

}  // namespace

HmmModel load_model(std::string_view text) {
    TokenReader in(text);
    in.expect("hmmtag");
    in.expect("model");
    in.expect("v1");

    ModelData data;
    in.expect("epsilon");
    data.epsilon = in.real("epsilon");
    in.expect("estimator");
    std::string est = in.word("estimator");
    if (est == "tag") data.estimator = Estimator::TagNormalized;
    else if (est == "word") data.estimator = Estimator::WordNormalized;
    else throw ModelError("load: unknown estimator '" + est + "'");

    in.expect("tags");
    long long k = in.integer("tag count");
    if (k < 2 || k > 1000000) throw ModelError("load: implausible tag count");
    for (long long i = 0; i < k; ++i) data.tags.push_back(in.word("tag name"));
    if (!std::is_sorted(data.tags.begin(), data.tags.end()))
        throw ModelError("load: tag list must be sorted");

    auto tag_id = [&](const std::string& name) {
        auto it = std::lower_bound(data.tags.begin(), data.tags.end(), name);
        if (it == data.tags.end() || *it != name)
            throw ModelError("load: unknown tag '" + name + "'");
        return static_cast<int>(it - data.tags.begin());
    };

    in.expect("open_class");
    long long n_open = in.integer("open class count");
    for (long long i = 0; i < n_open; ++i)
        data.open_class.push_back(tag_id(in.word("open class tag")));
    std::sort(data.open_class.begin(), data.open_class.end());

    in.expect("transitions");
    data.transitions.resize(static_cast<std::size_t>(k) * k);
    for (auto& cell : data.transitions) cell = in.real("transition cell");

    in.expect("lexicon");
    long long n_words = in.integer("lexicon size");
    for (long long i = 0; i < n_words; ++i) {
        std::string word = in.word("lexicon word");
        std::string origin = in.word("origin flag");
        LexiconEntry entry;
        if (origin == "t") entry.origin = WordOrigin::Trained;
        else if (origin == "u") entry.origin = WordOrigin::UnknownAugmented;
        else throw ModelError("load: bad origin flag '" + origin + "'");
        entry.eq_class = static_cast<int>(in.integer("class index"));
        long long n_entries = in.integer("entry count");
        for (long long e = 0; e < n_entries; ++e) {
            int tag = tag_id(in.word("entry tag"));
            double score = in.real("entry score");
            entry.scores.emplace_back(tag, score);
        }
        std::sort(entry.scores.begin(), entry.scores.end());
        if (!data.lexicon.emplace(std::move(word), std::move(entry)).second)
            throw ModelError("load: duplicate lexicon word");
    }

    in.expect("eqclasses");
    long long n_classes = in.integer("class count");
    for (long long c = 0; c < n_classes; ++c) {
        long long n_members = in.integer("member count");
        std::vector<std::string> members;
        for (long long m = 0; m < n_members; ++m) members.push_back(in.word("member"));
        data.eq_classes.push_back(std::move(members));
    }
    in.expect("end");

    return HmmModel(std::move(data));
}

}  // namespace hmmtag
