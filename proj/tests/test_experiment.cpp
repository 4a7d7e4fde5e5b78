#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <string>

#include "hmmtag/experiment.hpp"
#include "hmmtag/fileio.hpp"
#include "support/oracles.hpp"

using namespace hmmtag;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_corpora(const TempDir& dir) {
    HmmModel truth = oracle::random_model(2024, {.n_tags = 4, .n_words = 30});
    write_file(dir.file("train.txt"), emit_tagged(generate_synthetic(truth, 700, 6, 1)));
    write_file(dir.file("heldout.txt"), emit_tagged(generate_synthetic(truth, 150, 6, 2)));
}

std::string config_json() {
    return R"({
        "train_corpus": "train.txt",
        "tests": [{"corpus": "heldout.txt", "relation": "different"}],
        "grid": ["D0T0", "D3T1"],
        "iterations": 5,
        "estimator": "tag",
        "out_dir": "out"
    })";
}

}  // namespace

TEST_CASE("experiment configs parse with defaults and validation") {
    ExperimentConfig c = parse_experiment_config(config_json(), "/base");
    CHECK(c.train_corpus == "/base/train.txt");
    REQUIRE(c.tests.size() == 1);
    CHECK(c.tests[0].name == "heldout");
    CHECK(c.tests[0].relation == "different");
    REQUIRE(c.grid.size() == 2);
    CHECK(to_string(c.grid[1]) == "D3T1");
    CHECK(c.iterations == 5);
    CHECK(c.epsilon == 1e-6);
    CHECK(!c.eqclass_threshold.has_value());
    CHECK(c.open_class.empty());
    CHECK(c.out_dir == "/base/out");

    CHECK_THROWS_AS(parse_experiment_config("{}", "."), ExperimentError);
    CHECK_THROWS_AS(parse_experiment_config("not json", "."), ExperimentError);

    std::string bad = config_json();
    bad.replace(bad.find("\"tag\""), 5, "\"zzz\"");
    CHECK_THROWS_AS(parse_experiment_config(bad, "."), ExperimentError);

    bad = config_json();
    bad.replace(bad.find("\"D3T1\""), 6, "\"D0T0\"");  // duplicate cell
    CHECK_THROWS_AS(parse_experiment_config(bad, "."), ExperimentError);

    bad = config_json();
    bad.replace(bad.find("\"iterations\": 5"), 15, "\"iterations\": 0");
    CHECK_THROWS_AS(parse_experiment_config(bad, "."), ExperimentError);
}

TEST_CASE("run_experiment fills every cell and the reports are reproducible") {
    TempDir dir("hmmtag_unit_experiment");
    write_corpora(dir);
    write_file(dir.file("config.json"), config_json());

    ExperimentConfig config = load_experiment_config(dir.file("config.json"));
    ExperimentReport report = run_experiment(config);

    CHECK(report.all_ok);
    REQUIRE(report.cells.size() == 2);
    CHECK(report.baselines.count("heldout") == 1);
    for (const auto& cell : report.cells) {
        CHECK(cell.ok);
        CHECK(cell.corpus_name == "heldout");
        REQUIRE(cell.trace.iterations.size() == 5);
        REQUIRE(cell.pattern.has_value());

        double best = 0.0;
        int best_at = 0;
        for (std::size_t i = 0; i < cell.trace.iterations.size(); ++i) {
            REQUIRE(cell.trace.iterations[i].accuracy.has_value());
            double a = cell.trace.iterations[i].accuracy->ambiguous_accuracy();
            if (a > best) {
                best = a;
                best_at = static_cast<int>(i) + 1;
            }
        }
        CHECK(cell.best_accuracy == best);
        CHECK(cell.best_iteration == best_at);
    }

    // The same report written twice is byte-identical.
    ExperimentConfig first = config;
    first.out_dir = dir.file("out_a");
    write_experiment_reports(report, first);
    ExperimentConfig second = config;
    second.out_dir = dir.file("out_b");
    write_experiment_reports(report, second);

    for (const char* name :
         {"grid.csv", "runs.csv", "status.csv", "trace_heldout_D0T0.csv",
          "trace_heldout_D3T1.csv"}) {
        std::string a = read_file((fs::path(first.out_dir) / name).string());
        std::string b = read_file((fs::path(second.out_dir) / name).string());
        CHECK(a == b);
        CHECK(!a.empty());
    }

    std::string grid = read_file((fs::path(first.out_dir) / "grid.csv").string());
    CHECK(grid.find("D0T0") != std::string::npos);
    CHECK(grid.find("F") != std::string::npos);  // baseline row
}

TEST_CASE("file io round trips and reports missing paths") {
    TempDir dir("hmmtag_unit_fileio");
    write_file(dir.file("x.txt"), "payload\n");
    CHECK(read_file(dir.file("x.txt")) == "payload\n");
    CHECK_THROWS_AS(read_file(dir.file("absent.txt")), IoError);

    HmmModel m = oracle::random_model(5, {.n_tags = 3, .n_words = 9});
    save_model_file(m, dir.file("m.model"));
    CHECK(load_model_file(dir.file("m.model")) == m);
}

TEST_CASE("command line round trip: train, tag, evaluate") {
    TempDir dir("hmmtag_unit_cli");
    write_corpora(dir);
    const std::string cli = HMMTAG_CLI_PATH;
    auto run = [&](const std::string& args) {
        std::string cmd = "\"" + cli + "\" " + args + " > " + dir.file("stdout.txt") +
                          " 2> " + dir.file("stderr.txt");
        return std::system(cmd.c_str());
    };

    CHECK(run("train --corpus " + dir.file("train.txt") + " --out " +
              dir.file("m.model")) == 0);
    HmmModel m = load_model_file(dir.file("m.model"));
    CHECK(m.num_tags() == 5);  // four real tags plus the boundary

    // Strip the held-out corpus to raw text, then tag it both ways.
    write_file(dir.file("heldout.raw"),
               emit_raw(strip_tags(load_tagged_corpus(dir.file("heldout.txt")))));
    CHECK(run("tag --model " + dir.file("m.model") + " --corpus " +
              dir.file("heldout.raw") + " --decoder fb --out " + dir.file("fb.txt")) == 0);
    CHECK(run("tag --model " + dir.file("m.model") + " --corpus " +
              dir.file("heldout.raw") + " --decoder viterbi --out " +
              dir.file("vit.txt")) == 0);

    TaggedCorpus gold = load_tagged_corpus(dir.file("heldout.txt"));
    TaggedCorpus fb = load_tagged_corpus(dir.file("fb.txt"));
    REQUIRE(fb.sentences.size() == gold.sentences.size());
    CHECK(fb.token_count() == gold.token_count());

    CHECK(run("eval --model " + dir.file("m.model") + " --gold " +
              dir.file("heldout.txt") + " --predicted " + dir.file("fb.txt")) == 0);
    CHECK(run("eval --model missing.model --gold x --predicted y") != 0);
}
