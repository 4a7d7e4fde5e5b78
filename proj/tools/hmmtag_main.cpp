#include <cstdio>
#include <exception>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "hmmtag/degrade.hpp"
#include "hmmtag/eval.hpp"
#include "hmmtag/experiment.hpp"
#include "hmmtag/fileio.hpp"
#include "hmmtag/reestimate.hpp"

namespace {

using namespace hmmtag;

Estimator parse_estimator(const std::string& name) {
    if (name == "tag") return Estimator::TagNormalized;
    if (name == "claws" || name == "word") return Estimator::WordNormalized;
    throw ModelError("unknown estimator '" + name + "', expected tag or claws");
}

std::set<std::string> open_class_set(const std::string& flag, const CountTable& counts) {
    std::set<std::string> open;
    if (flag.empty()) {
        for (const auto& [tag, n] : counts.tag_count)
            if (tag != HmmModel::boundary_tag()) open.insert(tag);
        return open;
    }
    std::size_t start = 0;
    while (start <= flag.size()) {
        std::size_t comma = flag.find(',', start);
        std::string tag = comma == std::string::npos ? flag.substr(start)
                                                     : flag.substr(start, comma - start);
        if (!tag.empty()) open.insert(tag);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (open.empty()) throw ModelError("--open-class lists no tags");
    return open;
}

int cmd_train(const std::string& corpus_path, const std::string& out,
              const std::string& estimator, double epsilon, double eqclass_threshold,
              const std::string& open_class) {
    TaggedCorpus corpus = load_tagged_corpus(corpus_path);
    CountTable counts = count(corpus);
    HmmModel model =
        estimate(counts, open_class_set(open_class, counts), parse_estimator(estimator), epsilon);
    if (eqclass_threshold > 0.0)
        model = apply_equivalence_classes(model, counts, eqclass_threshold);
    save_model_file(model, out);
    std::printf("trained on %lld tokens, %d tags, %zu lexicon words\n",
                static_cast<long long>(counts.total_tokens), model.num_tags() - 1,
                model.lexicon().size());
    return 0;
}

int cmd_tag(const std::string& model_path, const std::string& corpus_path,
            const std::string& decoder, const std::string& out) {
    HmmModel model = load_model_file(model_path);
    RawCorpus corpus = load_raw_corpus(corpus_path);
    TagSequence tags;
    if (decoder == "fb") {
        tags = fb_tag(model, corpus).tags;
    } else if (decoder == "viterbi") {
        tags = viterbi_corpus(model, corpus);
    } else {
        throw DecodeError("unknown decoder '" + decoder + "', expected fb or viterbi");
    }
    TaggedCorpus tagged;
    tagged.sentences.reserve(corpus.sentences.size());
    for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
        TaggedSentence sentence;
        for (std::size_t t = 0; t < corpus.sentences[s].size(); ++t)
            sentence.push_back({corpus.sentences[s][t], tags[s][t]});
        tagged.sentences.push_back(std::move(sentence));
    }
    write_file(out, emit_tagged(tagged));
    return 0;
}

int cmd_generate(const std::string& model_path, int sentences, int mean_length,
                 std::uint64_t seed, const std::string& out) {
    HmmModel truth = load_model_file(model_path);
    TaggedCorpus corpus = generate_synthetic(truth, sentences, mean_length, seed);
    write_file(out, emit_tagged(corpus));
    std::printf("generated %zu sentences, %lld tokens\n", corpus.sentences.size(),
                static_cast<long long>(corpus.token_count()));
    return 0;
}

int cmd_degrade(const std::string& model_path, const std::string& train_path,
                const std::string& spec_label, const std::string& out) {
    HmmModel model = load_model_file(model_path);
    CountTable counts = count(load_tagged_corpus(train_path));
    DegradationSpec spec = parse_degradation(spec_label);
    save_model_file(apply_degradation(model, counts, spec), out);
    return 0;
}

int cmd_bw(const std::string& model_path, const std::string& corpus_path,
           const std::string& gold_path, int iterations, double perplexity_delta,
           const std::string& trace_path, const std::string& out) {
    HmmModel model = load_model_file(model_path);
    RawCorpus corpus = load_raw_corpus(corpus_path);
    TaggedCorpus gold;
    const TaggedCorpus* gold_ptr = nullptr;
    if (!gold_path.empty()) {
        gold = load_tagged_corpus(gold_path);
        gold_ptr = &gold;
    }
    StopPolicy stop = perplexity_delta > 0.0 ? StopPolicy::perplexity_delta(perplexity_delta)
                                             : StopPolicy::fixed_count();
    BwRunResult run = bw_run(model, corpus, iterations, stop, gold_ptr);
    if (!trace_path.empty()) write_file(trace_path, trace_csv(run.trace));
    if (!out.empty()) save_model_file(run.final_model, out);
    std::printf("%zu iterations, final log-likelihood %.6f, final perplexity %.6f\n",
                run.trace.iterations.size(), run.trace.iterations.back().stats.log_likelihood,
                run.trace.iterations.back().stats.perplexity);
    return 0;
}

int cmd_eval(const std::string& model_path, const std::string& gold_path,
             const std::string& predicted_path, const std::string& baseline_train) {
    HmmModel model = load_model_file(model_path);
    TaggedCorpus gold = load_tagged_corpus(gold_path);
    TaggedCorpus predicted = load_tagged_corpus(predicted_path);
    TagSequence tags;
    tags.reserve(predicted.sentences.size());
    for (const auto& sentence : predicted.sentences) {
        std::vector<std::string> row;
        for (const auto& token : sentence) row.push_back(token.tag);
        tags.push_back(std::move(row));
    }
    AccuracyReport report = accuracy(gold, tags, model);
    std::printf("tokens,ambiguous,ambiguous_correct,ambiguous_fraction,ambiguous_accuracy,overall\n");
    std::printf("%lld,%lld,%lld,%.6f,%.6f,%.6f\n",
                static_cast<long long>(report.total_tokens),
                static_cast<long long>(report.ambiguous_tokens),
                static_cast<long long>(report.ambiguous_correct),
                report.ambiguous_fraction(), report.ambiguous_accuracy(),
                report.overall_accuracy());
    if (!baseline_train.empty()) {
        CountTable counts = count(load_tagged_corpus(baseline_train));
        AccuracyReport base = most_frequent_baseline(model, counts, gold);
        std::printf("baseline_ambiguous_accuracy,%.6f\n", base.ambiguous_accuracy());
        std::printf("baseline_overall,%.6f\n", base.overall_accuracy());
    }
    return 0;
}

int cmd_diagnose(const std::string& model_path, const std::string& corpus_path,
                 const std::string& gold_path) {
    HmmModel model = load_model_file(model_path);
    RawCorpus corpus = load_raw_corpus(corpus_path);
    FbTagging tagging = fb_tag(model, corpus);
    PerplexityMeasure pm = perplexity(tagging.lattice);
    double avg_prob = avg_hypothesis_probability(tagging.lattice);
    double ll = 0.0;
    for (const auto& sentence : tagging.lattice.sentences) ll += sentence.log_likelihood;
    KlDistance kl = model_kl_distance(model, corpus);
    std::printf("log_likelihood,plogp,perplexity,avg_hypothesis_probability,"
                "transition_kl_bits,lexical_kl_bits\n");
    std::printf("%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", ll, pm.plogp, pm.perplexity,
                avg_prob, kl.transition_bits, kl.lexical_bits);
    if (!gold_path.empty()) {
        TaggedCorpus gold = load_tagged_corpus(gold_path);
        AccuracyReport report = accuracy(gold, tagging.tags, model);
        std::printf("ambiguous_fraction,ambiguous_accuracy,overall\n");
        std::printf("%.6f,%.6f,%.6f\n", report.ambiguous_fraction(),
                    report.ambiguous_accuracy(), report.overall_accuracy());
    }
    return 0;
}

int cmd_experiment(const std::string& config_path) {
    ExperimentConfig config = load_experiment_config(config_path);
    ExperimentReport report = run_experiment(config);
    write_experiment_reports(report, config);
    for (const auto& cell : report.cells) {
        if (cell.ok) {
            std::printf("%s %s %s: best %.4f at iteration %d%s%c\n", cell.corpus_name.c_str(),
                        cell.relation.c_str(), to_string(cell.spec).c_str(), cell.best_accuracy,
                        cell.best_iteration, cell.pattern ? ", pattern " : "",
                        cell.pattern ? pattern_letter(cell.pattern->pattern) : ' ');
        } else {
            std::printf("%s %s %s: error: %s\n", cell.corpus_name.c_str(),
                        cell.relation.c_str(), to_string(cell.spec).c_str(), cell.error.c_str());
        }
    }
    std::printf("reports written to %s\n", config.out_dir.c_str());
    return report.all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"first-order part-of-speech tagging laboratory"};
    app.require_subcommand(1);

    std::string corpus, model, out, gold, predicted, trace, config, train;
    std::string estimator = "tag", decoder = "fb", spec = "D0T0", open_class;
    double epsilon = 1e-6, eqclass_threshold = 0.0, perplexity_delta = 0.0;
    int iterations = 10, sentences = 1000, mean_length = 10;
    std::uint64_t seed = 1;

    auto* train_cmd = app.add_subcommand("train", "estimate a model from a tagged corpus");
    train_cmd->add_option("--corpus", corpus, "tagged training corpus")->required();
    train_cmd->add_option("--out", out, "model file to write")->required();
    train_cmd->add_option("--estimator", estimator, "tag or claws (default tag)");
    train_cmd->add_option("--epsilon", epsilon, "transition smoothing floor (default 1e-6)");
    train_cmd->add_option("--eqclass-threshold", eqclass_threshold,
                          "pool rare words below this relative frequency (0 = off)");
    train_cmd->add_option("--open-class", open_class,
                          "comma-separated open-class tags (default: all tags)");

    auto* tag_cmd = app.add_subcommand("tag", "tag a raw corpus");
    tag_cmd->add_option("--model", model, "model file")->required();
    tag_cmd->add_option("--corpus", corpus, "raw corpus")->required();
    tag_cmd->add_option("--decoder", decoder, "fb or viterbi (default fb)");
    tag_cmd->add_option("--out", out, "tagged corpus to write")->required();

    auto* gen_cmd = app.add_subcommand("generate", "sample a tagged corpus from a model");
    gen_cmd->add_option("--model", model, "generating model file")->required();
    gen_cmd->add_option("--sentences", sentences, "sentence count (default 1000)");
    gen_cmd->add_option("--mean-length", mean_length, "mean sentence length (default 10)");
    gen_cmd->add_option("--seed", seed, "random seed (default 1)");
    gen_cmd->add_option("--out", out, "tagged corpus to write")->required();

    auto* degrade_cmd = app.add_subcommand("degrade", "strip information out of a model");
    degrade_cmd->add_option("--model", model, "model file")->required();
    degrade_cmd->add_option("--train-corpus", train, "corpus the model was trained on")
        ->required();
    degrade_cmd->add_option("--spec", spec, "degradation, e.g. D2T1 (default D0T0)");
    degrade_cmd->add_option("--out", out, "degraded model file")->required();

    auto* bw_cmd = app.add_subcommand("bw", "re-estimate a model on a raw corpus");
    bw_cmd->add_option("--model", model, "initial model file")->required();
    bw_cmd->add_option("--corpus", corpus, "raw corpus")->required();
    bw_cmd->add_option("--gold", gold, "aligned tagged corpus for accuracy tracking");
    bw_cmd->add_option("--iterations", iterations, "iteration budget (default 10)");
    bw_cmd->add_option("--perplexity-delta", perplexity_delta,
                       "stop when perplexity improves by less than this (0 = fixed count)");
    bw_cmd->add_option("--trace", trace, "iteration trace CSV to write");
    bw_cmd->add_option("--out", out, "final model file");

    auto* eval_cmd = app.add_subcommand("eval", "score a tagged corpus against gold");
    eval_cmd->add_option("--model", model, "model file (defines ambiguity)")->required();
    eval_cmd->add_option("--gold", gold, "gold tagged corpus")->required();
    eval_cmd->add_option("--predicted", predicted, "predicted tagged corpus")->required();
    eval_cmd->add_option("--baseline-train", train,
                         "also report the most-frequent-tag baseline from this corpus");

    auto* diag_cmd = app.add_subcommand("diagnose", "perplexity and self-consistency measures");
    diag_cmd->add_option("--model", model, "model file")->required();
    diag_cmd->add_option("--corpus", corpus, "raw corpus")->required();
    diag_cmd->add_option("--gold", gold, "aligned tagged corpus for accuracy");

    auto* exp_cmd = app.add_subcommand("experiment", "run a declarative degradation grid");
    exp_cmd->add_option("--config", config, "experiment config JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_cmd->parsed())
            return cmd_train(corpus, out, estimator, epsilon, eqclass_threshold, open_class);
        if (tag_cmd->parsed()) return cmd_tag(model, corpus, decoder, out);
        if (gen_cmd->parsed()) return cmd_generate(model, sentences, mean_length, seed, out);
        if (degrade_cmd->parsed()) return cmd_degrade(model, train, spec, out);
        if (bw_cmd->parsed())
            return cmd_bw(model, corpus, gold, iterations, perplexity_delta, trace, out);
        if (eval_cmd->parsed()) return cmd_eval(model, gold, predicted, train);
        if (diag_cmd->parsed()) return cmd_diagnose(model, corpus, gold);
        if (exp_cmd->parsed()) return cmd_experiment(config);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
