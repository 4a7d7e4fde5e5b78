#include "hmmtag/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "hmmtag/fileio.hpp"

namespace hmmtag {

namespace {

using nlohmann::json;

std::string resolve(const std::string& base_dir, const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_absolute() || base_dir.empty()) return path;
    return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

std::string stem_of(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", fraction * 100.0);
    return buf;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::string& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ExperimentError(std::string("config: ") + e.what());
    }

    ExperimentConfig config;
    try {
        config.train_corpus = resolve(base_dir, j.at("train_corpus").get<std::string>());
        for (const auto& test : j.at("tests")) {
            TestCorpusRef ref;
            ref.path = resolve(base_dir, test.at("corpus").get<std::string>());
            ref.relation = test.value("relation", std::string("unspecified"));
            ref.name = stem_of(ref.path);
            config.tests.push_back(std::move(ref));
        }
        for (const auto& label : j.at("grid"))
            config.grid.push_back(parse_degradation(label.get<std::string>()));
        config.iterations = j.at("iterations").get<int>();
        std::string est = j.value("estimator", std::string("tag"));
        if (est == "tag") config.estimator = Estimator::TagNormalized;
        else if (est == "claws" || est == "word") config.estimator = Estimator::WordNormalized;
        else throw ExperimentError("config: unknown estimator '" + est + "'");
        config.epsilon = j.value("epsilon", 1e-6);
        if (j.contains("eqclass_threshold") && !j.at("eqclass_threshold").is_null())
            config.eqclass_threshold = j.at("eqclass_threshold").get<double>();
        if (j.contains("open_class"))
            for (const auto& tag : j.at("open_class"))
                config.open_class.push_back(tag.get<std::string>());
        config.seed = j.value("seed", std::uint64_t{0});
        config.out_dir = resolve(base_dir, j.at("out_dir").get<std::string>());
    } catch (const json::exception& e) {
        throw ExperimentError(std::string("config: ") + e.what());
    }

    if (config.tests.empty()) throw ExperimentError("config: no test corpora");
    if (config.grid.empty()) throw ExperimentError("config: empty grid");
    if (config.iterations < 1) throw ExperimentError("config: iterations must be >= 1");
    std::set<std::string> names;
    for (const auto& test : config.tests)
        if (!names.insert(test.name).second)
            throw ExperimentError("config: duplicate test corpus stem '" + test.name + "'");
    for (const auto& spec : config.grid)
        if (std::count(config.grid.begin(), config.grid.end(), spec) > 1)
            throw ExperimentError("config: duplicate grid cell " + to_string(spec));
    return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::string base = std::filesystem::path(path).parent_path().string();
    return parse_experiment_config(read_file(path), base);
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    TaggedCorpus train = load_tagged_corpus(config.train_corpus);
    CountTable counts = count(train);

    std::set<std::string> open_class(config.open_class.begin(), config.open_class.end());
    if (open_class.empty()) {
        for (const auto& [tag, n] : counts.tag_count)
            if (tag != HmmModel::boundary_tag()) open_class.insert(tag);
    }
    HmmModel trained = estimate(counts, open_class, config.estimator, config.epsilon);
    if (config.eqclass_threshold)
        trained = apply_equivalence_classes(trained, counts, *config.eqclass_threshold);

    ExperimentReport report;
    report.all_ok = true;
    for (const auto& test : config.tests) {
        TaggedCorpus gold = load_tagged_corpus(test.path);
        report.baselines.emplace(test.name, most_frequent_baseline(trained, counts, gold));
        RawCorpus raw = strip_tags(gold);
        for (const auto& spec : config.grid) {
            CellOutcome cell;
            cell.corpus_name = test.name;
            cell.relation = test.relation;
            cell.spec = spec;
            try {
                HmmModel degraded = apply_degradation(trained, counts, spec);
                BwRunResult run = bw_run(degraded, raw, config.iterations,
                                         StopPolicy::fixed_count(), &gold);
                cell.trace = std::move(run.trace);
                double best = -1.0;
                for (std::size_t i = 0; i < cell.trace.iterations.size(); ++i) {
                    double a = cell.trace.iterations[i].accuracy->ambiguous_accuracy();
                    if (a > best) {
                        best = a;
                        cell.best_iteration = static_cast<int>(i) + 1;
                    }
                }
                cell.best_accuracy = best;
                if (cell.trace.iterations.size() >= 5)
                    cell.pattern = classify_pattern(cell.trace);
                cell.ok = true;
            } catch (const std::exception& e) {
                cell.ok = false;
                cell.error = e.what();
                report.all_ok = false;
            }
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

void write_experiment_reports(const ExperimentReport& report, const ExperimentConfig& config) {
    std::filesystem::create_directories(config.out_dir);
    auto out_path = [&](const std::string& name) {
        return (std::filesystem::path(config.out_dir) / name).string();
    };

    // grid.csv: one row per degradation plus the baseline, one column per corpus.
    std::string grid = "spec";
    for (const auto& test : config.tests) grid += "," + test.name;
    grid.push_back('\n');
    for (const auto& spec : config.grid) {
        grid += to_string(spec);
        for (const auto& test : config.tests) {
            const CellOutcome* found = nullptr;
            for (const auto& cell : report.cells)
                if (cell.corpus_name == test.name && cell.spec == spec) found = &cell;
            grid.push_back(',');
            grid += found && found->ok ? percent(found->best_accuracy) : "error";
        }
        grid.push_back('\n');
    }
    grid += "F";
    for (const auto& test : config.tests) {
        grid.push_back(',');
        grid += percent(report.baselines.at(test.name).ambiguous_accuracy());
    }
    grid.push_back('\n');
    write_file(out_path("grid.csv"), grid);

    // runs.csv: best accuracy, where it happened, and the curve pattern.
    std::string runs = "corpus,relation,spec,best_accuracy,best_iteration,pattern\n";
    for (const auto& cell : report.cells) {
        runs += cell.corpus_name + "," + cell.relation + "," + to_string(cell.spec) + ",";
        if (cell.ok) {
            runs += percent(cell.best_accuracy) + "," + std::to_string(cell.best_iteration) + ",";
            runs.push_back(cell.pattern ? pattern_letter(cell.pattern->pattern) : '-');
        } else {
            runs += "error,-,-";
        }
        runs.push_back('\n');
    }
    write_file(out_path("runs.csv"), runs);

    std::string status = "corpus,spec,status\n";
    for (const auto& cell : report.cells) {
        status += cell.corpus_name + "," + to_string(cell.spec) + "," +
                  (cell.ok ? "ok" : cell.error) + "\n";
    }
    write_file(out_path("status.csv"), status);

    for (const auto& cell : report.cells) {
        if (!cell.ok) continue;
        write_file(out_path("trace_" + cell.corpus_name + "_" + to_string(cell.spec) + ".csv"),
                   trace_csv(cell.trace));
    }
}

}  // namespace hmmtag
