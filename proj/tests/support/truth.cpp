#include "support/truth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmmtag/rng.hpp"

namespace truth {

using hmmtag::HmmModel;
using hmmtag::ModelData;
using hmmtag::SampleRng;

namespace {

// Stationary token-tag distribution of the sentence process: a step either
// moves between real tags or passes through the boundary and restarts.
std::vector<double> stationary(const std::vector<double>& transitions, int k) {
    const int real = k - 1;
    std::vector<double> restart(real);
    double boundary_real = 0.0;
    for (int j = 1; j < k; ++j) boundary_real += transitions[j];
    for (int j = 1; j < k; ++j) restart[j - 1] = transitions[j] / boundary_real;

    std::vector<double> pi(real, 1.0 / real), next(real);
    for (int round = 0; round < 400; ++round) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int i = 1; i < k; ++i) {
            double to_boundary = transitions[static_cast<std::size_t>(i) * k];
            for (int j = 1; j < k; ++j) {
                double step = transitions[static_cast<std::size_t>(i) * k + j] +
                              to_boundary * restart[j - 1];
                next[j - 1] += pi[i - 1] * step;
            }
        }
        double total = 0.0;
        for (double v : next) total += v;
        for (int j = 0; j < real; ++j) pi[j] = next[j] / total;
    }
    return pi;
}

// Sharp but fully positive distribution over n targets.
std::vector<double> sharp_profile(SampleRng& rng, int n) {
    std::vector<double> w(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double u = 0.05 + rng.uniform();
        w[i] = u * u * u;
        total += w[i];
    }
    for (double& v : w) v = 0.9 * v / total + 0.1 / n;
    return w;
}

}  // namespace

HmmModel truth_model(std::uint64_t seed, const TruthSpec& spec) {
    SampleRng rng(seed);
    const int anchors = spec.anchors;
    const int pairs = spec.pairs;
    if (anchors < 2) throw std::runtime_error("truth_model: need at least two anchor tags");
    if (pairs < 1) throw std::runtime_error("truth_model: need at least one twin pair");
    const int real = anchors + 2 * pairs;
    if (real > 10) throw std::runtime_error("truth_model: t10+ would break tag-name order");
    const int k = real + 1;
    const double hazard = 1.0 / spec.mean_sentence_len;
    // Tag ids: anchor a -> 1 + a, A_j -> 1 + anchors + j, B_j -> 1 + anchors + pairs + j.
    const auto id_a = [&](int j) { return 1 + anchors + j; };
    const auto id_b = [&](int j) { return 1 + anchors + pairs + j; };

    ModelData data;
    data.tags.push_back(HmmModel::boundary_tag());
    char buf[32];
    for (int i = 0; i < real; ++i) {
        std::snprintf(buf, sizeof buf, "t%d", i);
        data.tags.push_back(buf);
    }

    // The last two anchors are the confusable duo: context tells them apart
    // only through what little of the minor's successor row survives the copy.
    const int conf_major = anchors - 2;
    const int conf_minor = anchors - 1;
    const int n_outside = anchors - 2;
    if (n_outside < 1)
        throw std::runtime_error("truth_model: need an anchor outside the confusable duo");

    // Per-model target shares for the anchors outside the duo. Row profiles
    // vary around these, so contexts stay informative while the tags' sizes,
    // and with them the ambiguous fraction, hold still across seeds.
    std::vector<double> target(n_outside);
    {
        double total = 0.0;
        for (double& t : target) total += t = 1.5 + rng.uniform();
        for (double& t : target) t /= total;
    }

    // Every source row strongly prefers one outside anchor. Contexts then
    // carry real evidence about which of the big tags follows, which is what
    // lets ambiguous words spanning them beat a frequency baseline.
    std::vector<std::vector<double>> anchor_prof(k);
    for (int x = 0; x < k; ++x) {
        int pref = static_cast<int>(rng.uniform() * n_outside) % n_outside;
        double ratio = 8.0 + 8.0 * rng.uniform();
        anchor_prof[x].assign(n_outside, 1.0);
        anchor_prof[x][pref] = ratio;
    }

    // Column multipliers steering the outside anchors' stationary shares to
    // the targets. Row profiles keep their cross-row variation, so contexts
    // stay informative while the sizes land where they were drawn.
    std::vector<double> column(n_outside, 1.0);

    std::vector<int> licenser(pairs, -1);  // anchor id whose row favours B_j over A_j

    // Raw successor weights per source row. Block masses are pinned: the
    // anchors outside the duo share (1 - duo_share) of the anchor slice, the
    // duo takes the rest at conf_ratio, and the pair block always weighs
    // pair_share * (1 + shadow), licenser boosts redistributing within it.
    // Rows therefore sum to the same total and only shapes vary.
    const auto assemble = [&](int x) {
        std::vector<double> w(real, 0.0);
        double outside_total = 0.0;
        for (int a = 0; a < n_outside; ++a) outside_total += column[a] * anchor_prof[x][a];
        for (int a = 0; a < n_outside; ++a)
            w[a] = (1.0 - spec.pair_share) * (1.0 - spec.duo_share) * column[a] *
                   anchor_prof[x][a] / outside_total;
        double duo = (1.0 - spec.pair_share) * spec.duo_share;
        w[conf_major] = duo / (1.0 + spec.conf_ratio);
        w[conf_minor] = spec.conf_ratio * w[conf_major];
        double got = 0.0;
        for (int j = 0; j < pairs; ++j) {
            double g = x == licenser[j] ? spec.licenser_boost : 1.0;
            w[anchors + j] = 1.0;
            w[anchors + pairs + j] = spec.shadow * g;
            got += 1.0 + spec.shadow * g;
        }
        double scale = spec.pair_share * (1.0 + spec.shadow) / got;
        for (int j = 0; j < pairs; ++j) {
            w[anchors + j] *= scale;
            w[anchors + pairs + j] *= scale;
        }
        return w;
    };

    const auto build = [&] {
        std::vector<std::vector<double>> weights(k);
        for (int x = 0; x <= anchors + pairs; ++x) weights[x] = assemble(x);
        {
            std::vector<double>& w = weights[1 + conf_minor];
            const std::vector<double>& major = weights[1 + conf_major];
            for (int i = 0; i < real; ++i)
                w[i] = spec.conf_blend * w[i] + (1.0 - spec.conf_blend) * major[i];
        }
        for (int j = 0; j < pairs; ++j) {
            std::vector<double> fresh = assemble(id_b(j));
            const std::vector<double>& twin = weights[id_a(j)];
            std::vector<double>& w = weights[id_b(j)];
            w.resize(real);
            for (int i = 0; i < real; ++i)
                w[i] = spec.outgoing_blend * fresh[i] + (1.0 - spec.outgoing_blend) * twin[i];
        }
        data.transitions.assign(static_cast<std::size_t>(k) * k, 0.0);
        for (int x = 0; x < k; ++x) {
            double total = 0.0;
            for (double v : weights[x]) total += v;
            double to_boundary = x == 0 ? 1e-8 : hazard;
            double rest = 1.0 - to_boundary;
            data.transitions[static_cast<std::size_t>(x) * k] = to_boundary;
            for (int i = 0; i < real; ++i)
                data.transitions[static_cast<std::size_t>(x) * k + 1 + i] =
                    rest * weights[x][i] / total;
        }
    };

    std::vector<double> pi;
    const auto settle = [&](int sweeps) {
        build();
        pi = stationary(data.transitions, k);
        for (int sweep = 0; sweep < sweeps; ++sweep) {
            double outside_pi = 0.0;
            for (int a = 0; a < n_outside; ++a) outside_pi += pi[a];
            for (int a = 0; a < n_outside; ++a)
                column[a] *= target[a] * outside_pi / pi[a];
            build();
            pi = stationary(data.transitions, k);
        }
    };

    settle(4);
    std::vector<int> order;
    for (int i = 0; i < n_outside; ++i) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return pi[a] > pi[b]; });
    for (int j = 0; j < pairs; ++j) {
        licenser[j] = 1 + order[j % order.size()];
    }
    settle(2);

    std::map<std::string, std::map<int, double>> lex;  // word -> tag id -> P(w | tag)
    std::vector<double> consumed(anchors, 0.0);        // anchor conditional mass spoken for

    // Shared pair words. Word masses follow a zipf curve; the majority side
    // alternates down the ranks so that the sides sum exactly to the twins'
    // stationary masses, with one word split fractionally to balance.
    for (int j = 0; j < pairs; ++j) {
        double pa = pi[id_a(j) - 1], pb = pi[id_b(j) - 1];
        double target = pa / (pa + pb);  // zipf-weighted mean of the A-side shares
        std::vector<double> zipf(spec.pair_words);
        double z = 0.0;
        for (int r = 0; r < spec.pair_words; ++r) z += zipf[r] = 1.0 / (r + 2.0);
        for (double& v : zipf) v /= z;
        std::vector<double> a_side(spec.pair_words, 1.0 - spec.majority);
        double shortfall = target - (1.0 - spec.majority);
        if (shortfall < 0.0)
            throw std::runtime_error("truth_model: majority too low for the twin ratio");
        for (int r = 0; r < spec.pair_words && shortfall > 0.0; ++r) {
            double step = zipf[r] * (2.0 * spec.majority - 1.0);
            if (step <= shortfall) {
                a_side[r] = spec.majority;
                shortfall -= step;
            } else {
                a_side[r] += shortfall / zipf[r];
                shortfall = 0.0;
            }
        }
        if (shortfall > 1e-12)
            throw std::runtime_error("truth_model: majority too high for the twin ratio");
        for (int r = 0; r < spec.pair_words; ++r) {
            std::snprintf(buf, sizeof buf, "s%dw%02d", j, r);
            double mass = (pa + pb) * zipf[r];
            lex[buf][id_a(j)] = mass * a_side[r] / pa;
            lex[buf][id_b(j)] = mass * (1.0 - a_side[r]) / pb;
        }
    }

    // Filler ambiguity between two well-separated anchors: context pins these
    // in a sweep or two. The duo is kept out of this family.
    std::vector<int> separated;
    for (int i = 0; i < n_outside; ++i) separated.push_back(i);
    const int n_sep = static_cast<int>(separated.size());
    double z_cc = 0.0;
    for (int r = 0; r < spec.cc_words; ++r) z_cc += 1.0 / (r + 2.0);
    for (int r = 0; r < spec.cc_words; ++r) {
        std::snprintf(buf, sizeof buf, "c%02d", r);
        int u1 = std::min(n_sep - 1, static_cast<int>(rng.uniform() * n_sep));
        int u2 = (u1 + 1 +
                  std::min(n_sep - 2, static_cast<int>(rng.uniform() * (n_sep - 1)))) %
                 n_sep;
        int i1 = separated[u1], i2 = separated[u2];
        double mass = spec.cc_mass * (1.0 / (r + 2.0)) / z_cc;
        lex[buf][1 + i1] = mass * spec.cc_majority / pi[i1];
        lex[buf][1 + i2] = mass * (1.0 - spec.cc_majority) / pi[i2];
        consumed[i1] += mass * spec.cc_majority / pi[i1];
        consumed[i2] += mass * (1.0 - spec.cc_majority) / pi[i2];
    }

    // Slow ambiguity across the confusable duo. The majority side alternates
    // down the ranks, so under a count-backed lexicon half of these start on
    // the wrong side and only the duo's weak context can win them back.
    double z_soft = 0.0;
    for (int r = 0; r < spec.soft_cc_words; ++r) z_soft += 1.0 / (r + 2.0);
    for (int r = 0; r < spec.soft_cc_words; ++r) {
        std::snprintf(buf, sizeof buf, "d%02d", r);
        int hi = r % 2 == 0 ? conf_major : conf_minor;
        int lo = r % 2 == 0 ? conf_minor : conf_major;
        double mass = spec.soft_cc_mass * (1.0 / (r + 2.0)) / z_soft;
        lex[buf][1 + hi] = mass * spec.soft_cc_majority / pi[hi];
        lex[buf][1 + lo] = mass * (1.0 - spec.soft_cc_majority) / pi[lo];
        consumed[hi] += mass * spec.soft_cc_majority / pi[hi];
        consumed[lo] += mass * (1.0 - spec.soft_cc_majority) / pi[lo];
    }

    // Exclusive anchor vocabulary takes whatever conditional mass is left.
    // Type counts follow stationary mass, keeping per-type frequencies and
    // hence the unseen-word rate comparable across anchors and seeds.
    double pi_anchor_total = 0.0;
    for (int i = 0; i < anchors; ++i) pi_anchor_total += pi[i];
    for (int i = 0; i < anchors; ++i) {
        double rest = 1.0 - consumed[i];
        if (rest <= 0.3) throw std::runtime_error("truth_model: ambiguous mass too large");
        int n_types = std::max(
            40, static_cast<int>(anchors * spec.anchor_vocab * pi[i] / pi_anchor_total + 0.5));
        // The flattened tail keeps even the last ranks frequent enough to be
        // seen in a 50k-token sample, so held-out text has almost no unknown
        // words and per-word preferences are learnable for the whole lexicon.
        double z_open = 0.0;
        for (int r = 0; r < n_types; ++r) z_open += std::pow(r + 1.5, -0.7);
        for (int r = 0; r < n_types; ++r) {
            std::snprintf(buf, sizeof buf, "x%02dw%03d", i, r);
            lex[buf][1 + i] = rest * std::pow(r + 1.5, -0.7) / z_open;
        }
    }

    for (const auto& [word, scores] : lex) {
        hmmtag::LexiconEntry entry;
        for (const auto& [tag, p] : scores) entry.scores.emplace_back(tag, p);
        data.lexicon.emplace(word, std::move(entry));
    }

    for (int i = 0; i < anchors; ++i) data.open_class.push_back(1 + i);
    data.estimator = hmmtag::Estimator::TagNormalized;
    data.epsilon = 1e-6;
    return HmmModel(std::move(data));
}

hmmtag::TaggedCorpus generate_drifted(const HmmModel& truth, int n_sentences,
                                      int mean_length, std::uint64_t seed, double theta,
                                      double phi) {
    const int k = truth.num_tags();
    const int boundary = truth.boundary_id();

    // Each tag keeps two emission variants: a fixed word-hash parity decides
    // which half of its vocabulary a variant favours, and the previous tag
    // picks the variant. Both the parity and the variant choice are seed
    // independent, so the mismatch bites every corpus the same way.
    double up_e = std::exp(phi), down_e = std::exp(-phi);
    std::vector<std::array<std::vector<double>, 2>> emit_cum(k);
    std::vector<std::vector<const std::string*>> emit_word(k);
    for (const auto& [word, entry] : truth.lexicon())
        for (const auto& [tag, score] : entry.scores) {
            if (score <= 0.0) continue;
            int h = static_cast<int>(hmmtag::derive_seed(static_cast<std::uint64_t>(tag), word) & 1);
            for (int v = 0; v < 2; ++v) {
                double w = score * (h == v ? up_e : down_e);
                double prior = emit_cum[tag][v].empty() ? 0.0 : emit_cum[tag][v].back();
                emit_cum[tag][v].push_back(prior + w);
            }
            emit_word[tag].push_back(&word);
        }

    // Fixed sign pattern: which (two-back, next) combinations are favoured.
    auto sign = [](int two_back, int next) {
        return hmmtag::splitmix64(static_cast<std::uint64_t>(two_back) * 131 + next) & 1 ? 1.0
                                                                                         : -1.0;
    };
    double up = std::exp(theta), down = std::exp(-theta);

    hmmtag::SampleRng rng(seed);
    hmmtag::TaggedCorpus corpus;
    corpus.sentences.reserve(static_cast<std::size_t>(n_sentences));
    std::vector<double> cum;
    std::vector<int> real_tags;
    for (int j = 0; j < k; ++j)
        if (j != boundary) real_tags.push_back(j);
    for (int s = 0; s < n_sentences; ++s) {
        int length = rng.geometric_length(mean_length);
        hmmtag::TaggedSentence sentence;
        sentence.reserve(static_cast<std::size_t>(length));
        int prev2 = boundary, prev = boundary;
        for (int t = 0; t < length; ++t) {
            cum.clear();
            double running = 0.0;
            for (int j : real_tags) {
                double w = truth.transition(prev, j) * (sign(prev2, j) > 0 ? up : down);
                cum.push_back(running += w);
            }
            int tag = real_tags[rng.categorical(cum)];
            int v = static_cast<int>(
                hmmtag::splitmix64(static_cast<std::uint64_t>(prev) * 269 + tag) & 1);
            const std::string& word = *emit_word[tag][rng.categorical(emit_cum[tag][v])];
            sentence.push_back({word, truth.tag_name(tag)});
            prev2 = prev;
            prev = tag;
        }
        corpus.sentences.push_back(std::move(sentence));
    }
    return corpus;
}

}  // namespace truth
