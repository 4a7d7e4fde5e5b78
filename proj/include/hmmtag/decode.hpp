#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hmmtag/corpus.hpp"
#include "hmmtag/model.hpp"

namespace hmmtag {

class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Per-token tag posteriors, ascending tag id. Probabilities at one
/// position sum to 1.
struct TokenPosterior {
    std::vector<std::pair<int, double>> probs;
};

struct SentenceLattice {
    std::vector<TokenPosterior> positions;
    double log_likelihood = 0.0;  // log2, boundary transitions included
};

struct PosteriorLattice {
    std::vector<SentenceLattice> sentences;
    std::int64_t token_count() const;
};

using TagSequence = std::vector<std::vector<std::string>>;

/// Candidate tags for one word: the lexicon entry when present, otherwise
/// one hypothesis per open-class tag with equal scores 1/|open class|.
std::vector<std::pair<int, double>> hypothesize(const HmmModel& model, const std::string& word);

/// Scaled forward-backward over the hypothesis lattice of one sentence.
SentenceLattice forward_backward(const HmmModel& model, const RawSentence& sentence);

/// Most probable tag path, computed in log space. Ties at each decision
/// go to the lexicographically smallest tag.
std::vector<std::string> viterbi(const HmmModel& model, const RawSentence& sentence);
TagSequence viterbi_corpus(const HmmModel& model, const RawCorpus& corpus);

struct FbTagging {
    TagSequence tags;
    PosteriorLattice lattice;
};

/// Per-token maximum-posterior decoding; ties go to the smaller tag.
FbTagging fb_tag(const HmmModel& model, const RawCorpus& corpus);

/// Corpus log-likelihood, log base 2, summed over sentences.
double log_likelihood(const HmmModel& model, const RawCorpus& corpus);

/// plogp is the per-token mean of sum_h p*log2(p) over each token's
/// hypothesis posteriors (0*log0 = 0); perplexity = 2^-plogp.
struct PerplexityMeasure {
    double plogp = 0.0;
    double perplexity = 1.0;
};

PerplexityMeasure perplexity(const PosteriorLattice& lattice);

namespace detail {

/// One scaled forward-backward pass, kept around so that re-estimation can
/// read alphas and betas without recomputing them.
struct FbPass {
    std::vector<std::vector<int>> tags;       // hypothesis tag ids per position
    std::vector<std::vector<double>> scores;  // matching lexical scores
    std::vector<std::vector<double>> alpha;   // scaled so each position sums to 1
    std::vector<std::vector<double>> beta;    // scaled to pair with alpha
    std::vector<double> scale;                // per-position normalisers
    double end_scale = 0.0;                   // final boundary mass
    double log_likelihood = 0.0;              // log2
};

FbPass fb_pass(const HmmModel& model, const RawSentence& sentence);

}  // namespace detail

}  // namespace hmmtag
