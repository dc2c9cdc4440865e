// Command-line entry point for the property-induction laboratory.
//
// Subcommands: build-data, train, eval, experiment, analyze.
// Exit codes: 0 ok, 2 input validation, 3 training, 4 experiment (strict),
// 5 analysis.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "inductlab/csv.hpp"
#include "inductlab/error.hpp"
#include "inductlab/harness.hpp"
#include "inductlab/induction.hpp"
#include "inductlab/model.hpp"
#include "inductlab/norms.hpp"
#include "inductlab/stats.hpp"
#include "inductlab/taxonomy.hpp"
#include "inductlab/version.hpp"

namespace {

using namespace inductlab;

// Reruns with the same flags must produce byte-identical outputs, so the
// recorded command line omits --jobs (parallelism cannot change content).
std::string recorded_command_line(int argc, char** argv) {
    std::string out;
    for (int i = 0; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--jobs" || arg == "-j") {
            ++i; // skip its value as well
            continue;
        }
        if (arg.rfind("--jobs=", 0) == 0) continue;
        if (!out.empty()) out.push_back(' ');
        out += arg;
    }
    return out;
}

std::vector<std::string> header_comments(const std::string& command_line,
                                         const std::string& seed_text) {
    return {
        std::string("# inductlab ") + kVersion,
        "# command: " + command_line,
        "# seed: " + seed_text,
    };
}

int report_error(const Error& e, int code) {
    std::cerr << "error: " << e.what() << "\n";
    return code;
}

std::string format_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%9.4f", v);
    return buf;
}

void ensure_concept_tokens(PropertyJudgmentModel& model, OptimizerState& state,
                           const PropertyNorms& norms) {
    for (const auto& concept_name : norms.concepts) ensure_tokens(model, state, concept_name);
}

// ---------------------------------------------------------------------------

struct BuildDataArgs {
    std::string norms_path;
    std::string taxonomy_path;
    std::string out_path;
    std::uint64_t seed = 0;
};

int cmd_build_data(const BuildDataArgs& args, const std::string& command_line) {
    try {
        const PropertyNorms norms = load_norms(args.norms_path);
        const Taxonomy taxonomy = Taxonomy::load_file(args.taxonomy_path);
        const auto negatives = generate_negatives(norms, taxonomy);
        const auto dataset = build_dataset(norms, negatives);
        const DatasetSplit split =
            split_property_disjoint(dataset, 0.8, 0.1, 0.1, args.seed);
        write_dataset_csv(split, args.out_path,
                          header_comments(command_line, std::to_string(args.seed)));

        auto properties_of = [](const std::vector<LabeledSentence>& part) {
            std::set<std::string> properties;
            for (const auto& s : part) properties.insert(s.property);
            return properties.size();
        };
        std::cout << "concepts:   " << norms.concept_count() << "\n"
                  << "properties: " << norms.property_count() << "\n"
                  << "pairs:      " << norms.pair_count() << "\n"
                  << "sentences:  " << dataset.size() << "\n"
                  << "train:      " << split.train.size() << " sentences, "
                  << properties_of(split.train) << " properties\n"
                  << "val:        " << split.val.size() << " sentences, "
                  << properties_of(split.val) << " properties\n"
                  << "test:       " << split.test.size() << " sentences, "
                  << properties_of(split.test) << " properties\n";
        return 0;
    } catch (const Error& e) {
        return report_error(e, 2);
    }
}

// ---------------------------------------------------------------------------

struct TrainArgs {
    std::string data_path;
    std::string checkpoint_path;
    std::string metrics_path;
    ModelConfig config;
};

std::vector<std::string> vocabulary_from(const std::vector<LabeledSentence>& sentences) {
    std::vector<std::string> vocab;
    std::set<std::string> seen;
    for (const auto& s : sentences) {
        for (const auto& token : tokenize(s.concept_name))
            if (seen.insert(token).second) vocab.push_back(token);
        for (const auto& token : tokenize(s.property))
            if (seen.insert(token).second) vocab.push_back(token);
    }
    return vocab;
}

int cmd_train(const TrainArgs& args, const std::string& command_line) {
    DatasetSplit split;
    try {
        split = read_dataset_csv(args.data_path);
        if (split.train.empty()) fail("EmptyBatch", "dataset has no training sentences");
    } catch (const Error& e) {
        return report_error(e, 2);
    }

    try {
        auto [model, state] = init_model(args.config, vocabulary_from(split.train));
        const TrainHistory history = train(model, state, split);
        if (args.config.max_epochs == 0)
            std::cerr << "warning: --epochs 0; checkpoint equals the initialized model\n";

        save_checkpoint(model, state, args.checkpoint_path);

        if (!args.metrics_path.empty()) {
            std::ofstream out(args.metrics_path, std::ios::binary);
            if (!out) fail("IoFailure", "cannot write " + args.metrics_path);
            for (const auto& line :
                 header_comments(command_line, std::to_string(args.config.seed)))
                out << line << "\n";
            out << "epoch,train_loss,val_f1,best\n";
            for (const auto& epoch : history.epochs)
                out << epoch.epoch << "," << csv::format_double(epoch.train_loss) << ","
                    << csv::format_double(epoch.val_f1) << "," << (epoch.best ? "true" : "false")
                    << "\n";
        }

        if (!split.test.empty()) {
            for (const auto& s : split.test) {
                ensure_tokens(model, state, s.concept_name);
                ensure_tokens(model, state, s.property);
            }
            const EvalMetrics metrics = evaluate_f1(model, split.test);
            std::cout << "best epoch: " << history.best_epoch
                      << " (val F1 " << history.best_val_f1 << ")\n";
            std::cout << "test F1: " << metrics.f1 << " (chance F1 0.66)\n";
        }
        return 0;
    } catch (const Error& e) {
        return report_error(e, 3);
    }
}

// ---------------------------------------------------------------------------

struct EvalArgs {
    std::string checkpoint_path;
    std::string data_path;
    std::string partition = "test";
};

int cmd_eval(const EvalArgs& args) {
    try {
        auto [model, state] = load_checkpoint(args.checkpoint_path);
        const DatasetSplit split = read_dataset_csv(args.data_path);
        const std::vector<LabeledSentence>* part = nullptr;
        if (args.partition == "train") part = &split.train;
        else if (args.partition == "val") part = &split.val;
        else if (args.partition == "test") part = &split.test;
        else fail("MalformedRow", "--split must be train, val, or test");
        if (part->empty()) fail("EmptyEvalSet", "partition " + args.partition + " is empty");

        for (const auto& s : *part) {
            ensure_tokens(model, state, s.concept_name);
            ensure_tokens(model, state, s.property);
        }
        const EvalMetrics metrics = evaluate_f1(model, *part);
        std::cout << "partition: " << args.partition << "\n"
                  << "f1:        " << metrics.f1 << " (chance F1 0.66)\n"
                  << "precision: " << metrics.precision << "\n"
                  << "recall:    " << metrics.recall << "\n"
                  << "accuracy:  " << metrics.accuracy << "\n";
        return 0;
    } catch (const Error& e) {
        return report_error(e, 2);
    }
}

// ---------------------------------------------------------------------------

struct ExperimentArgs {
    std::string checkpoint_path;
    std::string norms_path;
    std::string mode = "taxonomic";
    std::string out_path;
    std::string summary_path;
    std::string long_path;
    std::string trials_out_path;
    std::string trials_in_path;
    std::vector<std::string> categories;
    std::uint64_t seed = 0;
    int repeats = 10;
    int n_max = 5;
    int max_adapt_steps = 500;
    int jobs = 1;
    bool strict = false;
};

void print_summary(const std::vector<ConditionSummary>& summaries) {
    std::cout << "set_label          n   mean_G      sd_G   count\n";
    for (const auto& summary : summaries) {
        std::string label, n;
        for (const auto& [key, value] : summary.keys) {
            if (key == "set_label") label = value;
            if (key == "n") n = value;
        }
        std::printf("%-17s %2s %s %s %7zu\n", label.c_str(), n.c_str(),
                    format_g(summary.mean_g).c_str(), format_g(summary.sd_g).c_str(),
                    summary.count);
    }
}

void write_summary_csv(const std::vector<ConditionSummary>& summaries, const std::string& path,
                       const std::vector<std::string>& comments) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("IoFailure", "cannot write " + path);
    for (const auto& line : comments) out << line << "\n";
    out << "set_label,n,mean_G,sd_G,count\n";
    for (const auto& summary : summaries) {
        std::string label, n;
        for (const auto& [key, value] : summary.keys) {
            if (key == "set_label") label = value;
            if (key == "n") n = value;
        }
        out << csv::join_record({label, n, csv::format_double(summary.mean_g),
                                 csv::format_double(summary.sd_g),
                                 std::to_string(summary.count)})
            << "\n";
    }
}

std::string sibling_output(const std::string& results_path, const char* suffix) {
    std::string stem = results_path;
    if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".csv")
        stem.resize(stem.size() - 4);
    return stem + suffix;
}

int cmd_experiment(ExperimentArgs args, const std::string& command_line) {
    if (args.summary_path.empty()) args.summary_path = sibling_output(args.out_path, "_summary.csv");
    if (args.long_path.empty()) args.long_path = sibling_output(args.out_path, "_long.csv");
    PropertyJudgmentModel model;
    OptimizerState state;
    PropertyNorms norms;
    std::vector<InductionTrial> trials;
    try {
        std::tie(model, state) = load_checkpoint(args.checkpoint_path);
        norms = load_norms(args.norms_path);
        ensure_concept_tokens(model, state, norms);

        ExperimentConfig config;
        config.focus_categories = args.categories;
        config.n_range.clear();
        for (int n = 1; n <= args.n_max; ++n) config.n_range.push_back(n);
        config.repeats = args.repeats;
        config.seed = args.seed;
        config.max_adapt_steps = args.max_adapt_steps;

        if (!args.trials_in_path.empty()) {
            trials = read_trial_batch(args.trials_in_path);
        } else if (args.mode == "taxonomic") {
            trials = build_taxonomic_trials(norms, model, config);
        } else if (args.mode == "conflict") {
            trials = build_conflict_trials(norms, config);
        } else {
            fail("MalformedRow", "--mode must be taxonomic or conflict");
        }
        if (!args.trials_out_path.empty())
            write_trial_batch(trials, args.trials_out_path,
                              header_comments(command_line, std::to_string(args.seed)));
    } catch (const Error& e) {
        return report_error(e, 2);
    }

    try {
        std::cout << "trials: " << trials.size() << "\n";
        const auto rows = run_experiment(model, state, trials, norms, args.jobs);
        const auto comments = header_comments(command_line, std::to_string(args.seed));
        write_results_csv(rows, args.out_path, comments);

        const bool any_converged =
            std::any_of(rows.begin(), rows.end(), [](const ResultRow& r) { return r.adapt_ok; });
        std::vector<ConditionSummary> summaries;
        if (any_converged) summaries = aggregate(rows, {"set_label", "n"});
        print_summary(summaries);
        write_summary_csv(summaries, args.summary_path, comments);
        export_long(rows, args.long_path, comments);

        std::size_t diverged = 0;
        for (const auto& row : rows)
            if (!row.adapt_ok) ++diverged;
        if (diverged > 0) {
            std::cerr << "warning: " << diverged << " result rows from diverged trials\n";
            if (args.strict) {
                std::cerr << "error: AdaptationDiverged: --strict run had diverged trials\n";
                return 4;
            }
        }
        return 0;
    } catch (const Error& e) {
        return report_error(e, 4);
    }
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
    std::string results_path;
    std::string out_dir = ".";
    double alpha = 0.05;
};

int cmd_analyze(const AnalyzeArgs& args, const std::string& command_line) {
    try {
        const auto rows = read_results_csv(args.results_path);
        if (rows.empty()) fail("EmptyResults", "results file has no rows");

        const auto comments = header_comments(command_line, "n/a");
        const std::filesystem::path out_dir(args.out_dir);
        std::filesystem::create_directories(out_dir);

        const auto summaries = aggregate(rows, {"set_label", "n"});
        print_summary(summaries);
        write_summary_csv(summaries, (out_dir / "analysis_summary.csv").string(), comments);

        // Paired comparisons: within vs every other set label, paired by trial.
        std::map<std::string, std::map<std::string, double>> by_trial; // trial -> label -> G
        std::set<std::string> labels;
        for (const auto& row : rows) {
            if (!row.adapt_ok) continue;
            by_trial[row.trial_id][row.set_label] = row.generalization;
            labels.insert(row.set_label);
        }
        if (!labels.count("within"))
            fail("EmptyResults", "results carry no 'within' rows to compare against");

        struct Comparison {
            std::string other;
            TTestResult test;
            double mean_within = 0.0;
            double mean_other = 0.0;
            std::size_t pairs = 0;
        };
        std::vector<Comparison> comparisons;
        std::vector<double> p_values;
        for (const auto& label : labels) {
            if (label == "within") continue;
            std::vector<double> within_g, other_g;
            for (const auto& [trial, scores] : by_trial) {
                const auto w = scores.find("within");
                const auto o = scores.find(label);
                if (w == scores.end() || o == scores.end()) continue;
                within_g.push_back(w->second);
                other_g.push_back(o->second);
            }
            if (within_g.size() < 2) continue;
            Comparison comparison;
            comparison.other = label;
            comparison.test = paired_t_test(within_g, other_g);
            for (double g : within_g) comparison.mean_within += g;
            for (double g : other_g) comparison.mean_other += g;
            comparison.mean_within /= static_cast<double>(within_g.size());
            comparison.mean_other /= static_cast<double>(other_g.size());
            comparison.pairs = within_g.size();
            p_values.push_back(comparison.test.p);
            comparisons.push_back(std::move(comparison));
        }

        std::ofstream tests_out(out_dir / "analysis_tests.csv", std::ios::binary);
        if (!tests_out) fail("IoFailure", "cannot write analysis_tests.csv");
        for (const auto& line : comments) tests_out << line << "\n";
        tests_out << "comparison,pairs,mean_within,mean_other,t,df,p,p_adjusted,reject\n";
        if (!comparisons.empty()) {
            const BhResult bh = bh_correct(p_values, args.alpha);
            std::cout << "\npaired t-tests (within vs other, BH-corrected at alpha="
                      << args.alpha << "):\n";
            for (std::size_t i = 0; i < comparisons.size(); ++i) {
                const auto& c = comparisons[i];
                std::printf("  within vs %-16s t=%8.3f df=%4d p=%g p_adj=%g%s\n",
                            c.other.c_str(), c.test.t, c.test.df, c.test.p, bh.adjusted_p[i],
                            bh.reject[i] ? " *" : "");
                tests_out << csv::join_record(
                                 {"within_vs_" + c.other, std::to_string(c.pairs),
                                  csv::format_double(c.mean_within),
                                  csv::format_double(c.mean_other), csv::format_double(c.test.t),
                                  std::to_string(c.test.df), csv::format_double(c.test.p),
                                  csv::format_double(bh.adjusted_p[i]),
                                  bh.reject[i] ? "true" : "false"})
                          << "\n";
            }
        }

        export_long(rows, (out_dir / "analysis_long.csv").string(), comments);
        return 0;
    } catch (const Error& e) {
        return report_error(e, 5);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"property-induction laboratory"};
    app.set_version_flag("--version", inductlab::kVersion);
    app.set_config("--config", "", "key = value defaults file; flags take precedence");
    app.require_subcommand(1);
    const std::string command_line = recorded_command_line(argc, argv);

    BuildDataArgs build_args;
    auto* build = app.add_subcommand("build-data",
                                     "generate the labeled sentence dataset with splits");
    build->add_option("--norms", build_args.norms_path, "norms CSV (concept,property,category)")
        ->required();
    build->add_option("--taxonomy", build_args.taxonomy_path, "taxonomy edge list")->required();
    build->add_option("--out", build_args.out_path, "output dataset CSV")->required();
    build->add_option("--seed", build_args.seed, "split seed");

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "train the property-judgment model");
    train_cmd->add_option("--data", train_args.data_path, "dataset CSV from build-data")
        ->required();
    train_cmd->add_option("--out", train_args.checkpoint_path, "output checkpoint")->required();
    train_cmd->add_option("--metrics", train_args.metrics_path, "per-epoch metrics CSV");
    train_cmd->add_option("--embed-dim", train_args.config.embed_dim, "embedding width");
    train_cmd->add_option("--hidden", train_args.config.hidden_dims, "hidden layer widths");
    train_cmd->add_option("--lr", train_args.config.learning_rate, "AdamW learning rate");
    train_cmd->add_option("--weight-decay", train_args.config.weight_decay, "decoupled decay");
    train_cmd->add_option("--epochs", train_args.config.max_epochs, "training epochs");
    train_cmd->add_option("--batch-size", train_args.config.batch_size, "minibatch size");
    train_cmd->add_option("--seed", train_args.config.seed, "init/shuffle seed");

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a dataset partition");
    eval_cmd->add_option("--checkpoint", eval_args.checkpoint_path, "model checkpoint")
        ->required();
    eval_cmd->add_option("--data", eval_args.data_path, "dataset CSV")->required();
    eval_cmd->add_option("--split", eval_args.partition, "train, val, or test");

    ExperimentArgs exp_args;
    auto* exp_cmd = app.add_subcommand("experiment", "run induction trials");
    exp_cmd->add_option("--checkpoint", exp_args.checkpoint_path, "trained checkpoint")
        ->required();
    exp_cmd->add_option("--norms", exp_args.norms_path, "norms CSV")->required();
    exp_cmd->add_option("--mode", exp_args.mode, "taxonomic or conflict");
    exp_cmd->add_option("--out", exp_args.out_path, "results CSV")->required();
    exp_cmd->add_option("--summary", exp_args.summary_path, "aggregate summary CSV (default: <out>_summary.csv)");
    exp_cmd->add_option("--long", exp_args.long_path, "long-format export CSV (default: <out>_long.csv)");
    exp_cmd->add_option("--trials-out", exp_args.trials_out_path, "write the trial batch CSV");
    exp_cmd->add_option("--trials", exp_args.trials_in_path, "run a trial batch CSV as-is");
    exp_cmd->add_option("--categories", exp_args.categories, "focus categories (default: all)");
    exp_cmd->add_option("--seed", exp_args.seed, "sampling seed");
    exp_cmd->add_option("--repeats", exp_args.repeats, "repeats per (category, n, property)");
    exp_cmd->add_option("--n-max", exp_args.n_max, "adaptation set sizes 1..n-max");
    exp_cmd->add_option("--max-adapt-steps", exp_args.max_adapt_steps, "adaptation step cap");
    exp_cmd->add_option("--jobs,-j", exp_args.jobs, "worker threads (does not change output)");
    exp_cmd->add_flag("--strict", exp_args.strict, "exit 4 when any trial diverges");

    AnalyzeArgs analyze_args;
    auto* analyze_cmd = app.add_subcommand("analyze", "statistics over a results CSV");
    analyze_cmd->add_option("--results", analyze_args.results_path, "results CSV")->required();
    analyze_cmd->add_option("--out-dir", analyze_args.out_dir, "directory for analysis outputs");
    analyze_cmd->add_option("--alpha", analyze_args.alpha, "FDR level");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help / --version
        app.exit(e);
        return 2;
    }

    if (build->parsed()) return cmd_build_data(build_args, command_line);
    if (train_cmd->parsed()) return cmd_train(train_args, command_line);
    if (eval_cmd->parsed()) return cmd_eval(eval_args);
    if (exp_cmd->parsed()) return cmd_experiment(exp_args, command_line);
    if (analyze_cmd->parsed()) return cmd_analyze(analyze_args, command_line);
    return 2;
}
