#pragma once

// Ground-truth model generator for the experiment-level tests.
//
// The tagset splits into big anchor tags, whose exclusive vocabularies keep
// every re-estimation run oriented, and (A, B) twin pairs that share their
// entire vocabulary: every word either half of a pair can emit reads as both.
// With no exclusive words on either twin, a run started from uniform
// transitions and a lexicon without per-word preferences sees the same
// posterior at every shared-word position, so each re-estimation step
// rebuilds the A and B columns in exact proportion and the distinction is
// unrecoverable. The true transitions do distinguish the twins (a boosted
// licenser cell and a partly distinct successor row for B), so runs that
// keep them can still pull the readings apart and climb.
//
// The last two anchors form a confusable duo: the smaller one's incoming
// cells sit at a fixed ratio to the bigger one's in every row, and its
// successor row is mostly a copy, so context separates the two only weakly.
// Ambiguous words spanning the duo relearn their per-word preferences over
// many sweeps rather than one or two, which is what stretches a damaged
// lexicon's recovery into a steady classical climb.
//
// Every real row leaves the same constant mass to the boundary, matching the
// geometric sentence lengths the corpus sampler draws, so a sampled corpus
// reproduces the model under relative-frequency training.

#include <cstdint>

#include "hmmtag/corpus.hpp"
#include "hmmtag/model.hpp"

namespace truth {

struct TruthSpec {
    int anchors = 4;              // big tags with exclusive vocabulary
    int pairs = 3;                // (A, B) twin pairs sharing their words
    int anchor_vocab = 230;       // exclusive words per anchor tag
    int pair_words = 10;          // shared words per pair
    int cc_words = 20;            // ambiguous words spanning two separated anchors
    double cc_mass = 0.09;        // token share of those
    double cc_majority = 0.72;
    int soft_cc_words = 12;       // ambiguous words spanning the confusable duo
    double soft_cc_mass = 0.06;
    double soft_cc_majority = 0.65;
    double conf_ratio = 0.8;      // duo minor incoming cells relative to major
    double conf_blend = 0.25;      // duo minor row: own successors vs major's
    double duo_share = 0.3;        // duo's fixed slice of each row's anchor mass
    double majority = 0.8;         // majority side share of a shared word
    double shadow = 0.6;          // B incoming mass relative to its twin A
    double licenser_boost = 2.75;   // one elevated incoming cell per B tag
    double outgoing_blend = 0.5;   // B row: own successor profile vs A's
    double pair_share = 0.09;      // row weight going to pair tags
    double mean_sentence_len = 12.0;
};

hmmtag::HmmModel truth_model(std::uint64_t seed, const TruthSpec& spec = {});

// Samples like generate_synthetic but modulates each transition choice by a
// fixed +/- factor keyed on the tag two steps back, so the corpus carries
// second-order structure no first-order model can represent. Re-estimation
// from an already well-fitted model then trades tag fidelity for sequence
// likelihood, which is what the decay-after-peak experiments need. theta 0
// reduces to exact first-order sampling.
hmmtag::TaggedCorpus generate_drifted(const hmmtag::HmmModel& truth, int n_sentences,
                                      int mean_length, std::uint64_t seed, double theta,
                                      double phi);

}  // namespace truth
