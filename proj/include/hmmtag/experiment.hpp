#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hmmtag/degrade.hpp"
#include "hmmtag/eval.hpp"
#include "hmmtag/model.hpp"
#include "hmmtag/reestimate.hpp"

namespace hmmtag {

class ExperimentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TestCorpusRef {
    std::string path;
    std::string name;      // file stem, unique across tests
    std::string relation;  // free-form label, e.g. same / similar / different
};

/// Declarative grid: train once, then one re-estimation run per
/// (test corpus, degradation) cell. Relative paths resolve against the
/// config file's directory.
struct ExperimentConfig {
    std::string train_corpus;
    std::vector<TestCorpusRef> tests;
    std::vector<DegradationSpec> grid;
    int iterations = 10;
    Estimator estimator = Estimator::TagNormalized;
    double epsilon = 1e-6;
    std::optional<double> eqclass_threshold;
    std::vector<std::string> open_class;  // empty = every real tag
    std::uint64_t seed = 0;               // reserved for seeded sub-tasks
    std::string out_dir;
};

ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::string& base_dir);
ExperimentConfig load_experiment_config(const std::string& path);

struct CellOutcome {
    std::string corpus_name;
    std::string relation;
    DegradationSpec spec;
    bool ok = false;
    std::string error;
    double best_accuracy = 0.0;  // ambiguous-token accuracy
    int best_iteration = 0;      // first iteration attaining it
    std::optional<PatternLabel> pattern;
    IterationTrace trace;
};

struct ExperimentReport {
    std::vector<CellOutcome> cells;                    // tests x grid, config order
    std::map<std::string, AccuracyReport> baselines;   // most-frequent-tag, per corpus
    bool all_ok = false;
};

ExperimentReport run_experiment(const ExperimentConfig& config);

/// Writes grid.csv (best accuracies plus the baseline row), runs.csv
/// (best/at/pattern per cell), status.csv and one trace_<corpus>_<spec>.csv
/// per cell under config.out_dir. Reruns are byte-identical.
void write_experiment_reports(const ExperimentReport& report, const ExperimentConfig& config);

}  // namespace hmmtag
