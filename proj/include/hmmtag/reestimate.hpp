#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hmmtag/corpus.hpp"
#include "hmmtag/decode.hpp"
#include "hmmtag/eval.hpp"
#include "hmmtag/model.hpp"

namespace hmmtag {

/// Measurements taken while entering one re-estimation iteration, before
/// the parameter update.
struct BwStats {
    int iteration = 1;  // 1-based
    double log_likelihood = 0.0;
    double plogp = 0.0;
    double perplexity = 1.0;
    int added_entries = 0;  // lexicon entries created this iteration
};

/// Expected counts from one forward-backward sweep. transition and
/// occupancy are indexed by tag id; emission maps word -> tag -> mass.
/// Boundary transitions are included: row boundary gets each sentence's
/// first-position posteriors, column boundary each last-position's.
struct BwExpectations {
    std::vector<double> transition;  // k*k row-major
    std::vector<double> occupancy;   // k
    std::map<std::string, std::map<int, double>> emission;
    PosteriorLattice lattice;
    double log_likelihood = 0.0;
};

BwExpectations accumulate_expectations(const HmmModel& model, const RawCorpus& corpus);

using UnknownWordMass = std::map<std::string, std::map<int, double>>;

struct BwStepResult {
    HmmModel model;
    BwStats stats;
    UnknownWordMass unknown_words;  // expected mass for words absent from the lexicon
};

/// One re-estimation iteration. New transitions are expected(i,j) over the
/// row total with the estimation-time epsilon floor and renormalisation;
/// new lexical scores are expected(i,w)/expected(i). Words the corpus never
/// realises keep their entries, and a tag with no expected mass keeps its
/// row. A word never gains a tag it did not have.
BwStepResult bw_step(const HmmModel& model, const RawCorpus& corpus, int iteration = 1);

/// Add entries for the given out-of-lexicon words, scores normalised per
/// word over its open-class mass. Empty mass is a no-op; re-adding words
/// already augmented is a usage error.
HmmModel augment_unknowns(const HmmModel& model, const UnknownWordMass& unknown_words);

struct StopPolicy {
    enum class Kind { FixedCount, PerplexityDelta };
    Kind kind = Kind::FixedCount;
    double threshold = 0.0;  // minimum perplexity improvement to continue

    static StopPolicy fixed_count() { return {Kind::FixedCount, 0.0}; }
    static StopPolicy perplexity_delta(double threshold) {
        return {Kind::PerplexityDelta, threshold};
    }
};

struct IterationRecord {
    BwStats stats;
    std::optional<AccuracyReport> accuracy;  // present when gold was supplied
};

struct IterationTrace {
    std::vector<IterationRecord> iterations;
};

struct BwRunResult {
    IterationTrace trace;
    HmmModel final_model;
};

/// Run up to max_iterations of re-estimation. Accuracy and the stats of
/// iteration k describe the model entering k, so iteration 1 reports the
/// initial model. Unknown words join the lexicon at the end of iteration 1.
/// gold, when given, must align with the corpus token for token.
BwRunResult bw_run(const HmmModel& model, const RawCorpus& corpus, int max_iterations,
                   StopPolicy stop, const TaggedCorpus* gold = nullptr);

/// Columns: iteration,log_likelihood,plogp,perplexity,added_entries,
/// ambiguous_accuracy (blank without gold).
std::string trace_csv(const IterationTrace& trace);

}  // namespace hmmtag
