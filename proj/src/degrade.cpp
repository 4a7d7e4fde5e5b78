#include "hmmtag/degrade.hpp"

#include <algorithm>

namespace hmmtag {

DegradationSpec parse_degradation(std::string_view label) {
    if (label.size() != 4 || label[0] != 'D' || label[2] != 'T' ||
        label[1] < '0' || label[1] > '3' || (label[3] != '0' && label[3] != '1'))
        throw ModelError("bad degradation label '" + std::string(label) +
                         "', expected D0..D3 and T0..T1, e.g. D2T1");
    DegradationSpec spec;
    spec.lexicon = static_cast<LexiconDegradation>(label[1] - '0');
    spec.transitions = static_cast<TransitionDegradation>(label[3] - '0');
    return spec;
}

std::string to_string(DegradationSpec spec) {
    std::string out = "D0T0";
    out[1] = static_cast<char>('0' + static_cast<int>(spec.lexicon));
    out[3] = static_cast<char>('0' + static_cast<int>(spec.transitions));
    return out;
}

HmmModel degrade_lexicon(const HmmModel& model, const CountTable& counts,
                         LexiconDegradation level) {
    if (level == LexiconDegradation::D0) return model;
    ModelData data = model.data();
    for (auto& [word, entry] : data.lexicon) {
        auto& scores = entry.scores;
        const std::size_t m = scores.size();
        switch (level) {
            case LexiconDegradation::D0:
                break;
            case LexiconDegradation::D1: {
                // 1/rank by descending original score; equal scores rank in
                // tag order, entries are already tag-ascending.
                std::vector<std::size_t> order(m);
                for (std::size_t i = 0; i < m; ++i) order[i] = i;
                std::stable_sort(order.begin(), order.end(),
                                 [&](std::size_t a, std::size_t b) {
                                     return scores[a].second > scores[b].second;
                                 });
                double total = 0.0;
                for (std::size_t r = 0; r < m; ++r) {
                    scores[order[r]].second = 1.0 / static_cast<double>(r + 1);
                    total += scores[order[r]].second;
                }
                for (auto& [tag, score] : scores) score /= total;
                break;
            }
            case LexiconDegradation::D2: {
                double total = 0.0;
                for (auto& [tag, score] : scores) {
                    auto it = counts.tag_count.find(model.tag_name(tag));
                    if (it == counts.tag_count.end())
                        throw ModelError("degrade: counts lack tag '" + model.tag_name(tag) + "'");
                    score = static_cast<double>(it->second);
                    total += score;
                }
                if (!(total > 0.0))
                    throw ModelError("degrade: zero tag frequencies for '" + word + "'");
                for (auto& [tag, score] : scores) score /= total;
                break;
            }
            case LexiconDegradation::D3: {
                double uniform = 1.0 / static_cast<double>(m);
                for (auto& [tag, score] : scores) score = uniform;
                break;
            }
        }
    }
    // Pooled entries are rewritten in place, so classes stay consistent.
    return HmmModel(std::move(data));
}

HmmModel degrade_transitions(const HmmModel& model, TransitionDegradation level) {
    if (level == TransitionDegradation::T0) return model;
    ModelData data = model.data();
    const std::size_t k = data.tags.size();
    double uniform = 1.0 / static_cast<double>(k);
    for (std::size_t i = 0; i < k; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) sum += (data.transitions[i * k + j] = uniform);
        // Nudge the diagonal so each row sums to 1 exactly.
        data.transitions[i * k + i] += 1.0 - sum;
    }
    return HmmModel(std::move(data));
}

HmmModel apply_degradation(const HmmModel& model, const CountTable& counts,
                           DegradationSpec spec) {
    return degrade_transitions(degrade_lexicon(model, counts, spec.lexicon), spec.transitions);
}

}  // namespace hmmtag
