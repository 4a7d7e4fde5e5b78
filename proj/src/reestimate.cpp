#include "hmmtag/reestimate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace hmmtag {

BwExpectations accumulate_expectations(const HmmModel& model, const RawCorpus& corpus) {
    if (corpus.sentences.empty()) throw ModelError("re-estimation: empty corpus");
    const int k = model.num_tags();
    const int boundary = model.boundary_id();

    BwExpectations exp;
    exp.transition.assign(static_cast<std::size_t>(k) * k, 0.0);
    exp.occupancy.assign(static_cast<std::size_t>(k), 0.0);
    exp.lattice.sentences.reserve(corpus.sentences.size());

    for (const auto& sentence : corpus.sentences) {
        detail::FbPass pass = detail::fb_pass(model, sentence);
        const std::size_t n = sentence.size();

        SentenceLattice lattice;
        lattice.log_likelihood = pass.log_likelihood;
        lattice.positions.resize(n);

        for (std::size_t t = 0; t < n; ++t) {
            auto& probs = lattice.positions[t].probs;
            const auto& tags = pass.tags[t];
            probs.reserve(tags.size());
            double total = 0.0;
            for (std::size_t i = 0; i < tags.size(); ++i) {
                double g = pass.alpha[t][i] * pass.beta[t][i];
                probs.emplace_back(tags[i], g);
                total += g;
            }
            for (auto& [tag, g] : probs) {
                g /= total;
                exp.occupancy[tag] += g;
                exp.emission[sentence[t]][tag] += g;
            }
        }

        // Boundary transitions: into the first position, out of the last.
        for (const auto& [tag, g] : lattice.positions.front().probs)
            exp.transition[static_cast<std::size_t>(boundary) * k + tag] += g;
        for (const auto& [tag, g] : lattice.positions.back().probs)
            exp.transition[static_cast<std::size_t>(tag) * k + boundary] += g;

        for (std::size_t t = 0; t + 1 < n; ++t) {
            const auto& cur_tags = pass.tags[t];
            const auto& next_tags = pass.tags[t + 1];
            for (std::size_t i = 0; i < cur_tags.size(); ++i) {
                double a_i = pass.alpha[t][i];
                if (a_i == 0.0) continue;
                for (std::size_t j = 0; j < next_tags.size(); ++j) {
                    double xi = a_i * model.transition(cur_tags[i], next_tags[j]) *
                                pass.scores[t + 1][j] * pass.beta[t + 1][j] /
                                pass.scale[t + 1];
                    exp.transition[static_cast<std::size_t>(cur_tags[i]) * k + next_tags[j]] += xi;
                }
            }
        }

        exp.log_likelihood += pass.log_likelihood;
        exp.lattice.sentences.push_back(std::move(lattice));
    }
    return exp;
}

BwStepResult bw_step(const HmmModel& model, const RawCorpus& corpus, int iteration) {
    BwExpectations exp = accumulate_expectations(model, corpus);
    const int k = model.num_tags();

    ModelData data = model.data();

    for (int i = 0; i < k; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < k; ++j)
            row_sum += exp.transition[static_cast<std::size_t>(i) * k + j];
        if (!(row_sum > 0.0)) continue;  // tag never occupied, row kept as is
        std::vector<double> row(static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j)
            row[j] = exp.transition[static_cast<std::size_t>(i) * k + j] / row_sum;
        double sum = 0.0;
        for (double& cell : row) {
            if (cell == 0.0) cell = model.epsilon();
            sum += cell;
        }
        for (int j = 0; j < k; ++j)
            data.transitions[static_cast<std::size_t>(i) * k + j] = row[j] / sum;
    }

    // Pooled words re-estimate from pooled mass; members share the result.
    std::vector<std::map<int, double>> class_mass(model.eq_classes().size());
    for (std::size_t c = 0; c < model.eq_classes().size(); ++c) {
        for (const auto& member : model.eq_classes()[c]) {
            auto it = exp.emission.find(member);
            if (it == exp.emission.end()) continue;
            for (const auto& [tag, mass] : it->second) class_mass[c][tag] += mass;
        }
    }

    for (auto& [word, entry] : data.lexicon) {
        const std::map<int, double>* mass = nullptr;
        if (entry.eq_class >= 0) {
            mass = &class_mass[entry.eq_class];
        } else {
            auto it = exp.emission.find(word);
            if (it != exp.emission.end()) mass = &it->second;
        }
        if (!mass || mass->empty()) continue;  // word unseen, entry kept as is
        for (auto& [tag, score] : entry.scores) {
            auto mit = mass->find(tag);
            double numerator = mit == mass->end() ? 0.0 : mit->second;
            if (exp.occupancy[tag] > 0.0) score = numerator / exp.occupancy[tag];
        }
    }

    BwStepResult result{HmmModel(std::move(data)),
                        BwStats{iteration, exp.log_likelihood, 0.0, 1.0, 0},
                        UnknownWordMass{}};
    PerplexityMeasure pm = perplexity(exp.lattice);
    result.stats.plogp = pm.plogp;
    result.stats.perplexity = pm.perplexity;

    for (const auto& [word, mass] : exp.emission)
        if (!model.find_word(word)) result.unknown_words.emplace(word, mass);

    return result;
}

HmmModel augment_unknowns(const HmmModel& model, const UnknownWordMass& unknown_words) {
    if (unknown_words.empty()) return model;
    for (const auto& [word, mass] : unknown_words) {
        if (const LexiconEntry* entry = model.find_word(word)) {
            if (entry->origin == WordOrigin::UnknownAugmented)
                throw ModelError("augment: word '" + word + "' was already added");
            throw ModelError("augment: word '" + word + "' is already in the lexicon");
        }
        if (mass.empty()) throw ModelError("augment: word '" + word + "' has no mass");
    }

    ModelData data = model.data();
    for (const auto& [word, mass] : unknown_words) {
        LexiconEntry entry;
        entry.origin = WordOrigin::UnknownAugmented;
        double total = 0.0;
        for (const auto& [tag, m] : mass) total += m;
        if (!(total > 0.0)) throw ModelError("augment: word '" + word + "' has zero mass");
        for (const auto& [tag, m] : mass) entry.scores.emplace_back(tag, m / total);
        data.lexicon.emplace(word, std::move(entry));
    }
    return HmmModel(std::move(data));
}

BwRunResult bw_run(const HmmModel& model, const RawCorpus& corpus, int max_iterations,
                   StopPolicy stop, const TaggedCorpus* gold) {
    if (max_iterations < 1) throw ModelError("re-estimation: need at least one iteration");
    if (gold) {
        if (gold->sentences.size() != corpus.sentences.size())
            throw ModelError("re-estimation: gold sentence count differs");
        for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
            if (gold->sentences[s].size() != corpus.sentences[s].size())
                throw ModelError("re-estimation: gold sentence " + std::to_string(s + 1) +
                                 " length differs");
            for (std::size_t t = 0; t < corpus.sentences[s].size(); ++t)
                if (gold->sentences[s][t].word != corpus.sentences[s][t])
                    throw ModelError("re-estimation: gold word mismatch in sentence " +
                                     std::to_string(s + 1));
        }
    }

    BwRunResult result{IterationTrace{}, model};
    double prev_perplexity = 0.0;
    for (int iteration = 1; iteration <= max_iterations; ++iteration) {
        IterationRecord record;
        if (gold) {
            FbTagging tagging = fb_tag(result.final_model, corpus);
            record.accuracy = accuracy(*gold, tagging.tags, result.final_model);
        }

        BwStepResult step = bw_step(result.final_model, corpus, iteration);
        record.stats = step.stats;
        if (iteration == 1 && !step.unknown_words.empty()) {
            record.stats.added_entries = static_cast<int>(step.unknown_words.size());
            result.final_model = augment_unknowns(step.model, step.unknown_words);
        } else {
            result.final_model = step.model;
        }
        result.trace.iterations.push_back(std::move(record));

        if (stop.kind == StopPolicy::Kind::PerplexityDelta && iteration >= 2 &&
            prev_perplexity - step.stats.perplexity < stop.threshold)
            break;
        prev_perplexity = step.stats.perplexity;
    }
    return result;
}

std::string trace_csv(const IterationTrace& trace) {
    std::string out =
        "iteration,log_likelihood,plogp,perplexity,added_entries,ambiguous_accuracy\n";
    char buf[256];
    for (const auto& record : trace.iterations) {
        const BwStats& s = record.stats;
        std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%.10g,%d,", s.iteration,
                      s.log_likelihood, s.plogp, s.perplexity, s.added_entries);
        out += buf;
        if (record.accuracy) {
            std::snprintf(buf, sizeof buf, "%.10g", record.accuracy->ambiguous_accuracy());
            out += buf;
        }
        out.push_back('\n');
    }
    return out;
}

}  // namespace hmmtag
