#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "hmmtag/corpus.hpp"
#include "hmmtag/decode.hpp"
#include "hmmtag/model.hpp"

namespace hmmtag {

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct IterationTrace;  // defined in reestimate.hpp

/// Token-level accuracy split by ambiguity. A token is ambiguous when the
/// model hypothesises more than one tag for its word. Unambiguous tokens
/// count as correct by construction, so with a = ambiguous fraction and
/// p = accuracy on ambiguous tokens the overall accuracy is 1 - a + p*a
/// in exact count arithmetic.
struct AccuracyReport {
    std::int64_t total_tokens = 0;
    std::int64_t ambiguous_tokens = 0;
    std::int64_t ambiguous_correct = 0;

    double ambiguous_fraction() const;
    double ambiguous_accuracy() const;  // 1 when there are no ambiguous tokens
    double overall_accuracy() const;
};

double overall_from_ambiguous(double ambiguous_fraction, double ambiguous_accuracy);

AccuracyReport accuracy(const TaggedCorpus& gold, const TagSequence& predicted,
                        const HmmModel& model);

/// Tag every token with the tag maximising f(i,w), ties to the smaller
/// tag; words with no emission counts get the lexicographically first
/// open-class tag. Transitions are never consulted.
AccuracyReport most_frequent_baseline(const HmmModel& model, const CountTable& counts,
                                      const TaggedCorpus& gold);

/// Shape of an accuracy-by-iteration curve. Classical: best at or near the
/// end. EarlyMaximum: best within iterations 2..4, then a falling trend.
/// InitialMaximum: the first iteration is never improved upon.
enum class Pattern { Classical, EarlyMaximum, InitialMaximum };

char pattern_letter(Pattern p);  // C, E, I

struct PatternLabel {
    Pattern pattern = Pattern::Classical;
    int peak_iteration = 1;
    double peak_accuracy = 0.0;
};

struct PatternThresholds {
    double delta = 0.001;      // final must trail the peak by more than this
    int early_min = 2;         // EarlyMaximum peak window, inclusive
    int early_max = 4;
};

/// Requires a trace of at least 5 iterations, each with an accuracy.
PatternLabel classify_pattern(const IterationTrace& trace,
                              const PatternThresholds& thresholds = {});

/// Mean over tokens of the chosen (maximum) hypothesis posterior.
double avg_hypothesis_probability(const PosteriorLattice& lattice);

enum class KlWeighting { OutputFrequency, Uniform };

/// Model self-consistency on a corpus: tag it with Viterbi, re-train a
/// model from the output, and measure the per-component KL divergence, in
/// bits, from the original to the re-trained model. Rows and emission
/// distributions are restricted to the shared tagset/vocabulary and
/// renormalised; zero lexical cells are floored at the model's epsilon.
/// Tag weights follow the Viterbi output frequencies unless Uniform.
struct KlDistance {
    double transition_bits = 0.0;
    double lexical_bits = 0.0;
};

KlDistance model_kl_distance(const HmmModel& model, const RawCorpus& corpus,
                             KlWeighting weighting = KlWeighting::OutputFrequency);

namespace detail {
/// KL divergence in bits between two aligned distributions.
double kl_bits(const std::vector<double>& p, const std::vector<double>& q);
}

}  // namespace hmmtag
