#include "hmmtag/decode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hmmtag {

std::int64_t PosteriorLattice::token_count() const {
    std::int64_t n = 0;
    for (const auto& s : sentences) n += static_cast<std::int64_t>(s.positions.size());
    return n;
}

std::vector<std::pair<int, double>> hypothesize(const HmmModel& model, const std::string& word) {
    if (const LexiconEntry* entry = model.find_word(word)) return entry->scores;
    std::vector<std::pair<int, double>> hyps;
    const auto& open = model.open_class();
    double score = 1.0 / static_cast<double>(open.size());
    hyps.reserve(open.size());
    for (int tag : open) hyps.emplace_back(tag, score);
    return hyps;
}

namespace detail {

FbPass fb_pass(const HmmModel& model, const RawSentence& sentence) {
    if (sentence.empty()) throw DecodeError("empty sentence");
    const std::size_t n = sentence.size();
    const int boundary = model.boundary_id();

    FbPass pass;
    pass.tags.resize(n);
    pass.scores.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        if (sentence[t].empty()) throw DecodeError("empty word");
        for (const auto& [tag, score] : hypothesize(model, sentence[t])) {
            pass.tags[t].push_back(tag);
            pass.scores[t].push_back(score);
        }
    }

    pass.alpha.resize(n);
    pass.scale.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t m = pass.tags[t].size();
        pass.alpha[t].assign(m, 0.0);
        double total = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            double incoming;
            if (t == 0) {
                incoming = model.transition(boundary, pass.tags[t][j]);
            } else {
                incoming = 0.0;
                const auto& prev_tags = pass.tags[t - 1];
                const auto& prev_alpha = pass.alpha[t - 1];
                for (std::size_t i = 0; i < prev_tags.size(); ++i)
                    incoming += prev_alpha[i] * model.transition(prev_tags[i], pass.tags[t][j]);
            }
            double cell = incoming * pass.scores[t][j];
            pass.alpha[t][j] = cell;
            total += cell;
        }
        if (!(total > 0.0))
            throw DecodeError("no probability mass at token '" + sentence[t] + "'");
        pass.scale[t] = total;
        for (double& cell : pass.alpha[t]) cell /= total;
    }

    double end_total = 0.0;
    for (std::size_t i = 0; i < pass.tags[n - 1].size(); ++i)
        end_total += pass.alpha[n - 1][i] * model.transition(pass.tags[n - 1][i], boundary);
    if (!(end_total > 0.0)) throw DecodeError("no probability mass into the final boundary");
    pass.end_scale = end_total;

    pass.beta.resize(n);
    pass.beta[n - 1].resize(pass.tags[n - 1].size());
    for (std::size_t i = 0; i < pass.tags[n - 1].size(); ++i)
        pass.beta[n - 1][i] = model.transition(pass.tags[n - 1][i], boundary) / end_total;
    for (std::size_t t = n - 1; t-- > 0;) {
        const auto& next_tags = pass.tags[t + 1];
        const auto& next_scores = pass.scores[t + 1];
        const auto& next_beta = pass.beta[t + 1];
        pass.beta[t].assign(pass.tags[t].size(), 0.0);
        for (std::size_t i = 0; i < pass.tags[t].size(); ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < next_tags.size(); ++j)
                sum += model.transition(pass.tags[t][i], next_tags[j]) * next_scores[j] *
                       next_beta[j];
            pass.beta[t][i] = sum / pass.scale[t + 1];
        }
    }

    double ll = std::log2(end_total);
    for (double c : pass.scale) ll += std::log2(c);
    pass.log_likelihood = ll;
    return pass;
}

}  // namespace detail

SentenceLattice forward_backward(const HmmModel& model, const RawSentence& sentence) {
    detail::FbPass pass = detail::fb_pass(model, sentence);
    SentenceLattice lattice;
    lattice.log_likelihood = pass.log_likelihood;
    lattice.positions.resize(sentence.size());
    for (std::size_t t = 0; t < sentence.size(); ++t) {
        auto& probs = lattice.positions[t].probs;
        const std::size_t m = pass.tags[t].size();
        probs.reserve(m);
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double g = pass.alpha[t][i] * pass.beta[t][i];
            probs.emplace_back(pass.tags[t][i], g);
            total += g;
        }
        for (auto& [tag, p] : probs) p /= total;
    }
    return lattice;
}

std::vector<std::string> viterbi(const HmmModel& model, const RawSentence& sentence) {
    if (sentence.empty()) throw DecodeError("empty sentence");
    const std::size_t n = sentence.size();
    const int boundary = model.boundary_id();
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();

    std::vector<std::vector<int>> tags(n);
    std::vector<std::vector<double>> delta(n);
    std::vector<std::vector<int>> back(n);

    for (std::size_t t = 0; t < n; ++t) {
        if (sentence[t].empty()) throw DecodeError("empty word");
        auto hyps = hypothesize(model, sentence[t]);
        delta[t].assign(hyps.size(), kNegInf);
        back[t].assign(hyps.size(), -1);
        for (std::size_t j = 0; j < hyps.size(); ++j) {
            tags[t].push_back(hyps[j].first);
            double emit = hyps[j].second;
            if (!(emit > 0.0)) continue;
            if (t == 0) {
                delta[t][j] = std::log(model.transition(boundary, hyps[j].first)) + std::log(emit);
            } else {
                // Hypotheses are in ascending tag order; strict > keeps the
                // lexicographically smallest predecessor on ties.
                double best = kNegInf;
                int best_i = -1;
                for (std::size_t i = 0; i < tags[t - 1].size(); ++i) {
                    if (delta[t - 1][i] == kNegInf) continue;
                    double cand = delta[t - 1][i] +
                                  std::log(model.transition(tags[t - 1][i], hyps[j].first));
                    if (cand > best) {
                        best = cand;
                        best_i = static_cast<int>(i);
                    }
                }
                if (best_i < 0) continue;
                delta[t][j] = best + std::log(emit);
                back[t][j] = best_i;
            }
        }
    }

    double best = kNegInf;
    int best_j = -1;
    for (std::size_t j = 0; j < tags[n - 1].size(); ++j) {
        if (delta[n - 1][j] == kNegInf) continue;
        double cand = delta[n - 1][j] + std::log(model.transition(tags[n - 1][j], boundary));
        if (cand > best) {
            best = cand;
            best_j = static_cast<int>(j);
        }
    }
    if (best_j < 0) throw DecodeError("no viable path");

    std::vector<std::string> out(n);
    int j = best_j;
    for (std::size_t t = n; t-- > 0;) {
        out[t] = model.tag_name(tags[t][j]);
        j = back[t][j];
    }
    return out;
}

TagSequence viterbi_corpus(const HmmModel& model, const RawCorpus& corpus) {
    TagSequence out;
    out.reserve(corpus.sentences.size());
    for (const auto& sentence : corpus.sentences) out.push_back(viterbi(model, sentence));
    return out;
}

FbTagging fb_tag(const HmmModel& model, const RawCorpus& corpus) {
    FbTagging result;
    result.tags.reserve(corpus.sentences.size());
    result.lattice.sentences.reserve(corpus.sentences.size());
    for (const auto& sentence : corpus.sentences) {
        SentenceLattice lattice = forward_backward(model, sentence);
        std::vector<std::string> tags;
        tags.reserve(lattice.positions.size());
        for (const auto& position : lattice.positions) {
            double best = -1.0;
            int best_tag = -1;
            for (const auto& [tag, p] : position.probs) {
                if (p > best) {  // ascending tag order, ties to the smaller tag
                    best = p;
                    best_tag = tag;
                }
            }
            tags.push_back(model.tag_name(best_tag));
        }
        result.tags.push_back(std::move(tags));
        result.lattice.sentences.push_back(std::move(lattice));
    }
    return result;
}

double log_likelihood(const HmmModel& model, const RawCorpus& corpus) {
    double total = 0.0;
    for (const auto& sentence : corpus.sentences) {
        const std::size_t n = sentence.size();
        if (n == 0) throw DecodeError("empty sentence");
        const int boundary = model.boundary_id();
        std::vector<int> prev_tags;
        std::vector<double> prev_alpha;
        for (std::size_t t = 0; t < n; ++t) {
            auto hyps = hypothesize(model, sentence[t]);
            std::vector<int> cur_tags;
            std::vector<double> cur_alpha;
            double scale = 0.0;
            for (const auto& [tag, score] : hyps) {
                double incoming;
                if (t == 0) {
                    incoming = model.transition(boundary, tag);
                } else {
                    incoming = 0.0;
                    for (std::size_t i = 0; i < prev_tags.size(); ++i)
                        incoming += prev_alpha[i] * model.transition(prev_tags[i], tag);
                }
                double cell = incoming * score;
                cur_tags.push_back(tag);
                cur_alpha.push_back(cell);
                scale += cell;
            }
            if (!(scale > 0.0))
                throw DecodeError("no probability mass at token '" + sentence[t] + "'");
            for (double& cell : cur_alpha) cell /= scale;
            total += std::log2(scale);
            prev_tags = std::move(cur_tags);
            prev_alpha = std::move(cur_alpha);
        }
        double end_total = 0.0;
        for (std::size_t i = 0; i < prev_tags.size(); ++i)
            end_total += prev_alpha[i] * model.transition(prev_tags[i], model.boundary_id());
        if (!(end_total > 0.0)) throw DecodeError("no probability mass into the final boundary");
        total += std::log2(end_total);
    }
    return total;
}

PerplexityMeasure perplexity(const PosteriorLattice& lattice) {
    std::int64_t tokens = lattice.token_count();
    if (tokens == 0) return {};
    double sum = 0.0;
    for (const auto& sentence : lattice.sentences) {
        for (const auto& position : sentence.positions) {
            for (const auto& [tag, p] : position.probs) {
                if (p > 0.0) sum += p * std::log2(p);
            }
        }
    }
    PerplexityMeasure m;
    m.plogp = sum / static_cast<double>(tokens);
    m.perplexity = std::exp2(-m.plogp);
    return m;
}

}  // namespace hmmtag
