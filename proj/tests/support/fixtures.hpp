#pragma once

// Small hand-checked inputs shared across test files. The expected numbers
// derived from these live next to the assertions that use them.

#include <string>

#include "hmmtag/corpus.hpp"
#include "hmmtag/model.hpp"

namespace fixtures {

// Tag totals: D=3, N=5, V=4, 5 sentences, 12 tokens.
// Transitions: B>D 3, B>N 2, D>N 3, N>V 4, N>B 1, V>B 4.
// Emissions: D:the 3; N:cat 2,dog 2,barks 1; V:sleeps 2,barks 2.
inline const std::string kFiveSentenceCorpus =
    "the/D cat/N sleeps/V\n"
    "the/D dog/N barks/V\n"
    "the/D cat/N barks/V\n"
    "dog/N sleeps/V\n"
    "barks/N\n";

inline hmmtag::TaggedCorpus five_sentence_corpus() {
    return hmmtag::parse_tagged(kFiveSentenceCorpus);
}

inline hmmtag::HmmModel five_sentence_model(
    hmmtag::Estimator estimator = hmmtag::Estimator::TagNormalized, double epsilon = 1e-6) {
    return hmmtag::estimate(hmmtag::count(five_sentence_corpus()), {"N", "V"}, estimator,
                            epsilon);
}

// Two real tags, three words, no zero cells, built directly so decode tests
// do not depend on estimation. Tag ids: <s>=0, X=1, Y=2.
inline hmmtag::HmmModel tiny_model() {
    hmmtag::ModelData data;
    data.tags = {hmmtag::HmmModel::boundary_tag(), "X", "Y"};
    data.transitions = {
        0.02, 0.58, 0.40,  // from <s>
        0.30, 0.10, 0.60,  // from X
        0.50, 0.25, 0.25,  // from Y
    };
    data.lexicon["n"] = {{{1, 0.7}}, hmmtag::WordOrigin::Trained, -1};
    data.lexicon["v"] = {{{2, 0.9}}, hmmtag::WordOrigin::Trained, -1};
    data.lexicon["b"] = {{{1, 0.3}, {2, 0.1}}, hmmtag::WordOrigin::Trained, -1};
    data.open_class = {1, 2};
    return hmmtag::HmmModel(std::move(data));
}

}  // namespace fixtures
