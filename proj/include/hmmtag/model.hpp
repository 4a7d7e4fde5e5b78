#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hmmtag/corpus.hpp"

namespace hmmtag {

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Lexical scores are f(i,w)/f(i) under TagNormalized and f(i,w)/f(w)
/// under WordNormalized. Decoding consumes the scores as given either way.
enum class Estimator { TagNormalized, WordNormalized };

enum class WordOrigin { Trained, UnknownAugmented };

/// Raw frequencies from a tagged corpus. The boundary tag carries the
/// sentence count as its f(i) and owns the start transitions; every
/// sentence-final tag transitions into it. For real tags f(i) equals
/// the sum of f(i,w) over the tag's words.
struct CountTable {
    std::map<std::string, std::int64_t> tag_count;                               // f(i)
    std::map<std::string, std::map<std::string, std::int64_t>> transition_count; // f(i,j)
    std::map<std::string, std::map<std::string, std::int64_t>> emission_count;   // f(i,w)
    std::map<std::string, std::int64_t> word_count;                              // f(w)
    std::int64_t total_tokens = 0;
    std::int64_t sentence_count = 0;
};

struct LexiconEntry {
    std::vector<std::pair<int, double>> scores;  // (tag id, score), ascending tag id
    WordOrigin origin = WordOrigin::Trained;
    int eq_class = -1;                           // index into eq_classes(), -1 none
    bool operator==(const LexiconEntry&) const = default;
};

struct ModelData {
    std::vector<std::string> tags;       // sorted, boundary included
    std::vector<double> transitions;     // k*k row-major, every cell > 0
    std::map<std::string, LexiconEntry> lexicon;
    std::vector<int> open_class;         // ascending tag ids, boundary excluded
    std::vector<std::vector<std::string>> eq_classes;  // member words, sorted
    Estimator estimator = Estimator::TagNormalized;
    double epsilon = 1e-6;
    bool operator==(const ModelData&) const = default;
};

/// Immutable first-order tagging model over a closed tagset. Tag ids are
/// indices into the sorted tag list, so lexicographic order and id order
/// coincide; every tie-break in decoding leans on that.
class HmmModel {
public:
    static const std::string& boundary_tag();  // "<s>", reserved

    explicit HmmModel(ModelData data);  // validates, throws ModelError

    int num_tags() const { return static_cast<int>(data_.tags.size()); }
    const std::vector<std::string>& tags() const { return data_.tags; }
    const std::string& tag_name(int id) const { return data_.tags[id]; }
    int tag_id(std::string_view name) const;  // -1 when absent
    int boundary_id() const { return boundary_id_; }

    double transition(int from, int to) const {
        return data_.transitions[static_cast<std::size_t>(from) * data_.tags.size() + to];
    }
    const std::vector<double>& transitions() const { return data_.transitions; }

    const std::map<std::string, LexiconEntry>& lexicon() const { return data_.lexicon; }
    const LexiconEntry* find_word(const std::string& word) const;

    const std::vector<int>& open_class() const { return data_.open_class; }
    const std::vector<std::vector<std::string>>& eq_classes() const { return data_.eq_classes; }
    Estimator estimator() const { return data_.estimator; }
    double epsilon() const { return data_.epsilon; }

    const ModelData& data() const { return data_; }

    friend bool operator==(const HmmModel& a, const HmmModel& b) { return a.data_ == b.data_; }

private:
    ModelData data_;
    std::map<std::string, int, std::less<>> tag_ids_;
    int boundary_id_ = -1;
};

/// Tally a tagged corpus. Rejects empty corpora, empty sentences and any
/// use of the reserved boundary tag name.
CountTable count(const TaggedCorpus& corpus);

/// Relative-frequency model. Transition rows are f(i,j)/f(i) with zero
/// cells floored at epsilon and the row renormalised to sum 1. open_class
/// must be a non-empty subset of the real tags.
HmmModel estimate(const CountTable& counts, const std::set<std::string>& open_class,
                  Estimator estimator, double epsilon);

/// Pool rare words that share a tag set. Words with relative frequency
/// below threshold are merged, ascending by frequency, until each class
/// reaches the threshold; a tail that cannot reach it joins the last class
/// formed for that tag set (or stays alone). Members share pooled scores.
/// counts must be the table the model was estimated from.
HmmModel apply_equivalence_classes(const HmmModel& model, const CountTable& counts,
                                   double threshold);

/// Versioned text form. load(save(m)) reproduces m bit for bit.
std::string save_model(const HmmModel& model);
HmmModel load_model(std::string_view text);

}  // namespace hmmtag
