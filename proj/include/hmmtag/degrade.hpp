#pragma once

#include <string>
#include <string_view>

#include "hmmtag/model.hpp"

namespace hmmtag {

/// Controlled loss of lexical information. Tag sets never change, only
/// the scores within each word's entry:
///   D0 identity
///   D1 scores proportional to 1/rank, ranked by descending original score
///   D2 scores proportional to the overall tag frequencies f(i)
///   D3 uniform over the word's tags
/// D1-D3 renormalise each entry to sum 1.
enum class LexiconDegradation { D0, D1, D2, D3 };

/// T0 identity; T1 replaces every row, boundary included, by the uniform
/// distribution over the full tagset.
enum class TransitionDegradation { T0, T1 };

struct DegradationSpec {
    LexiconDegradation lexicon = LexiconDegradation::D0;
    TransitionDegradation transitions = TransitionDegradation::T0;
    bool operator==(const DegradationSpec&) const = default;
};

/// Parses labels of the form D2T1. Throws ModelError on anything else.
DegradationSpec parse_degradation(std::string_view label);
std::string to_string(DegradationSpec spec);

/// counts must be the table the model was estimated from (D2 reads f(i)).
HmmModel degrade_lexicon(const HmmModel& model, const CountTable& counts,
                         LexiconDegradation level);
HmmModel degrade_transitions(const HmmModel& model, TransitionDegradation level);
HmmModel apply_degradation(const HmmModel& model, const CountTable& counts,
                           DegradationSpec spec);

}  // namespace hmmtag
