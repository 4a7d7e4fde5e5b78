#include "hmmtag/eval.hpp"

#include <algorithm>
#include <cmath>

#include "hmmtag/reestimate.hpp"

namespace hmmtag {

double AccuracyReport::ambiguous_fraction() const {
    if (total_tokens == 0) return 0.0;
    return static_cast<double>(ambiguous_tokens) / static_cast<double>(total_tokens);
}

double AccuracyReport::ambiguous_accuracy() const {
    if (ambiguous_tokens == 0) return 1.0;
    return static_cast<double>(ambiguous_correct) / static_cast<double>(ambiguous_tokens);
}

double AccuracyReport::overall_accuracy() const {
    if (total_tokens == 0) return 1.0;
    return static_cast<double>(total_tokens - ambiguous_tokens + ambiguous_correct) /
           static_cast<double>(total_tokens);
}

double overall_from_ambiguous(double ambiguous_fraction, double ambiguous_accuracy) {
    return 1.0 - ambiguous_fraction + ambiguous_accuracy * ambiguous_fraction;
}

AccuracyReport accuracy(const TaggedCorpus& gold, const TagSequence& predicted,
                        const HmmModel& model) {
    if (gold.sentences.size() != predicted.size())
        throw EvalError("accuracy: sentence counts differ");
    AccuracyReport report;
    for (std::size_t s = 0; s < predicted.size(); ++s) {
        const auto& gold_sentence = gold.sentences[s];
        const auto& pred_sentence = predicted[s];
        if (gold_sentence.size() != pred_sentence.size())
            throw EvalError("accuracy: sentence " + std::to_string(s + 1) +
                            " lengths differ");
        for (std::size_t t = 0; t < pred_sentence.size(); ++t) {
            ++report.total_tokens;
            if (hypothesize(model, gold_sentence[t].word).size() > 1) {
                ++report.ambiguous_tokens;
                if (pred_sentence[t] == gold_sentence[t].tag) ++report.ambiguous_correct;
            }
        }
    }
    return report;
}

AccuracyReport most_frequent_baseline(const HmmModel& model, const CountTable& counts,
                                      const TaggedCorpus& gold) {
    if (gold.sentences.empty()) throw EvalError("baseline: empty corpus");
    const std::string& fallback = model.tag_name(model.open_class().front());

    // f(i,w) by word, so each token is one lookup.
    std::map<std::string, std::pair<std::string, std::int64_t>> best_tag;
    for (const auto& [tag, words] : counts.emission_count) {
        for (const auto& [word, n] : words) {
            if (n <= 0) continue;
            auto it = best_tag.find(word);
            if (it == best_tag.end()) {
                best_tag.emplace(word, std::make_pair(tag, n));
            } else if (n > it->second.second) {  // ties keep the smaller tag
                it->second = {tag, n};
            }
        }
    }

    AccuracyReport report;
    for (const auto& sentence : gold.sentences) {
        for (const auto& token : sentence) {
            ++report.total_tokens;
            if (hypothesize(model, token.word).size() <= 1) continue;
            ++report.ambiguous_tokens;
            auto it = best_tag.find(token.word);
            const std::string& predicted = it == best_tag.end() ? fallback : it->second.first;
            if (predicted == token.tag) ++report.ambiguous_correct;
        }
    }
    return report;
}

char pattern_letter(Pattern p) {
    switch (p) {
        case Pattern::Classical: return 'C';
        case Pattern::EarlyMaximum: return 'E';
        case Pattern::InitialMaximum: return 'I';
    }
    return '?';
}

PatternLabel classify_pattern(const IterationTrace& trace, const PatternThresholds& thresholds) {
    const auto& iterations = trace.iterations;
    if (iterations.size() < 5)
        throw EvalError("classify: need at least 5 iterations, got " +
                        std::to_string(iterations.size()));
    std::vector<double> acc;
    acc.reserve(iterations.size());
    for (const auto& record : iterations) {
        if (!record.accuracy) throw EvalError("classify: trace lacks accuracies");
        acc.push_back(record.accuracy->ambiguous_accuracy());
    }

    std::size_t peak = 0;
    for (std::size_t i = 1; i < acc.size(); ++i)
        if (acc[i] > acc[peak]) peak = i;
    const double a_max = acc[peak];
    const double a_final = acc.back();
    const int k_star = static_cast<int>(peak) + 1;

    PatternLabel label;
    label.peak_iteration = k_star;
    label.peak_accuracy = a_max;

    const bool final_trails = a_final < a_max - thresholds.delta;
    if (k_star == 1 && final_trails) {
        label.pattern = Pattern::InitialMaximum;
        return label;
    }
    if (k_star >= thresholds.early_min && k_star <= thresholds.early_max && final_trails) {
        // Least-squares slope over iterations k*..N.
        const std::size_t n = acc.size() - peak;
        if (n >= 2) {
            double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
            for (std::size_t i = peak; i < acc.size(); ++i) {
                double x = static_cast<double>(i + 1);
                sx += x;
                sy += acc[i];
                sxx += x * x;
                sxy += x * acc[i];
            }
            double denom = static_cast<double>(n) * sxx - sx * sx;
            double slope = (static_cast<double>(n) * sxy - sx * sy) / denom;
            if (slope < 0.0) {
                label.pattern = Pattern::EarlyMaximum;
                return label;
            }
        }
    }
    label.pattern = Pattern::Classical;
    return label;
}

double avg_hypothesis_probability(const PosteriorLattice& lattice) {
    std::int64_t tokens = lattice.token_count();
    if (tokens == 0) throw EvalError("avg hypothesis probability: empty lattice");
    double sum = 0.0;
    for (const auto& sentence : lattice.sentences) {
        for (const auto& position : sentence.positions) {
            double best = 0.0;
            for (const auto& [tag, p] : position.probs) best = std::max(best, p);
            sum += best;
        }
    }
    return sum / static_cast<double>(tokens);
}

namespace detail {

double kl_bits(const std::vector<double>& p, const std::vector<double>& q) {
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) sum += p[i] * std::log2(p[i] / q[i]);
    }
    return sum;
}

}  // namespace detail

namespace {

// Restrict to the given cells, renormalise, and floor zero cells at epsilon
// (renormalising again). Returns an empty vector when there is no mass.
std::vector<double> restricted_distribution(const std::vector<double>& raw, double epsilon) {
    double sum = 0.0;
    for (double v : raw) sum += v;
    if (!(sum > 0.0)) return {};
    std::vector<double> out(raw.size());
    bool floored = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        out[i] = raw[i] / sum;
        if (out[i] == 0.0) {
            out[i] = epsilon;
            floored = true;
        }
    }
    if (floored) {
        double s2 = 0.0;
        for (double v : out) s2 += v;
        for (double& v : out) v /= s2;
    }
    return out;
}

}  // namespace

KlDistance model_kl_distance(const HmmModel& model, const RawCorpus& corpus,
                             KlWeighting weighting) {
    if (corpus.sentences.empty()) throw EvalError("kl distance: empty corpus");

    TagSequence tagged = viterbi_corpus(model, corpus);
    TaggedCorpus retagged;
    retagged.sentences.reserve(corpus.sentences.size());
    for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
        TaggedSentence sentence;
        sentence.reserve(corpus.sentences[s].size());
        for (std::size_t t = 0; t < corpus.sentences[s].size(); ++t)
            sentence.push_back({corpus.sentences[s][t], tagged[s][t]});
        retagged.sentences.push_back(std::move(sentence));
    }

    CountTable counts = count(retagged);

    // Open class only matters for validity of the re-trained model.
    std::set<std::string> open;
    for (int id : model.open_class())
        if (counts.tag_count.count(model.tag_name(id))) open.insert(model.tag_name(id));
    if (open.empty())
        for (const auto& [tag, n] : counts.tag_count)
            if (tag != HmmModel::boundary_tag()) open.insert(tag);
    HmmModel retrained = estimate(counts, open, model.estimator(), model.epsilon());

    // Shared tagset, boundary included; weights from the output frequencies.
    std::vector<std::pair<int, int>> shared_tags;  // (id in model, id in retrained)
    std::vector<double> weight;
    double weight_total = 0.0;
    for (int i = 0; i < model.num_tags(); ++i) {
        int j = retrained.tag_id(model.tag_name(i));
        if (j < 0) continue;
        shared_tags.emplace_back(i, j);
        double w = 0.0;
        if (i != model.boundary_id()) {
            auto it = counts.tag_count.find(model.tag_name(i));
            if (it != counts.tag_count.end()) w = static_cast<double>(it->second);
        }
        weight.push_back(w);
        weight_total += w;
    }
    for (double& w : weight) w /= weight_total;

    KlDistance kl;

    std::vector<double> p_raw(shared_tags.size()), q_raw(shared_tags.size());
    for (std::size_t a = 0; a < shared_tags.size(); ++a) {
        for (std::size_t b = 0; b < shared_tags.size(); ++b) {
            p_raw[b] = model.transition(shared_tags[a].first, shared_tags[b].first);
            q_raw[b] = retrained.transition(shared_tags[a].second, shared_tags[b].second);
        }
        std::vector<double> p = restricted_distribution(p_raw, model.epsilon());
        std::vector<double> q = restricted_distribution(q_raw, model.epsilon());
        double w = weighting == KlWeighting::Uniform
                       ? 1.0 / static_cast<double>(shared_tags.size())
                       : weight[a];
        if (w > 0.0) kl.transition_bits += w * detail::kl_bits(p, q);
    }

    // Shared vocabulary, per-tag emission distributions.
    std::vector<std::string> shared_words;
    for (const auto& [word, entry] : model.lexicon())
        if (retrained.find_word(word)) shared_words.push_back(word);

    std::vector<std::pair<std::size_t, double>> lexical_terms;
    for (std::size_t a = 0; a < shared_tags.size(); ++a) {
        if (shared_tags[a].first == model.boundary_id()) continue;
        std::vector<double> p_scores(shared_words.size(), 0.0);
        std::vector<double> q_scores(shared_words.size(), 0.0);
        for (std::size_t wi = 0; wi < shared_words.size(); ++wi) {
            const LexiconEntry* pe = model.find_word(shared_words[wi]);
            for (const auto& [tag, score] : pe->scores)
                if (tag == shared_tags[a].first) p_scores[wi] = score;
            const LexiconEntry* qe = retrained.find_word(shared_words[wi]);
            for (const auto& [tag, score] : qe->scores)
                if (tag == shared_tags[a].second) q_scores[wi] = score;
        }
        std::vector<double> p = restricted_distribution(p_scores, model.epsilon());
        std::vector<double> q = restricted_distribution(q_scores, model.epsilon());
        if (p.empty() || q.empty()) continue;  // tag unseen on one side
        lexical_terms.emplace_back(a, detail::kl_bits(p, q));
    }
    for (const auto& [a, bits] : lexical_terms) {
        double w = weighting == KlWeighting::Uniform
                       ? 1.0 / static_cast<double>(lexical_terms.size())
                       : weight[a];
        kl.lexical_bits += w * bits;
    }

    return kl;
}

}  // namespace hmmtag
