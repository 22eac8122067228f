#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "annblock/blocker.hpp"
#include "annblock/config.hpp"
#include "annblock/csv.hpp"
#include "annblock/errors.hpp"
#include "annblock/synth.hpp"

namespace {

using namespace annblock;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;

std::vector<std::string> split_columns(const std::string& spec) {
    std::vector<std::string> cols;
    std::string cur;
    for (char c : spec) {
        if (c == ',') {
            cols.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cols.push_back(cur);
    return cols;
}

struct BlockArgs {
    std::string input;
    std::string key_cols;
    std::string id_col;
    std::string query;
    std::string ann;
    std::string config_path;
    std::string output;
    std::string block_col;
    bool dense = false;
    std::optional<std::int64_t> seed;
    std::optional<int> edge_k;
};

int cmd_block(const BlockArgs& args) {
    RunConfig config;
    if (!args.config_path.empty()) {
        config = load_config(args.config_path);
    }
    if (!args.ann.empty()) {
        config.ann.algorithm = algorithm_from_string(args.ann);
    }
    if (args.seed) {
        config.ann.random_seed = static_cast<std::uint64_t>(*args.seed);
    }
    if (args.edge_k) {
        config.edge_k = *args.edge_k;
    }

    Blocker blocker;
    BlockingResult result;
    Corpus corpus_x;
    bool have_corpus = false;

    if (args.dense) {
        if (!args.key_cols.empty()) {
            throw ValidationError("--key-cols cannot be used together with --dense");
        }
        DenseMatrix x = load_dense(args.input);
        if (!args.query.empty()) {
            DenseMatrix y = load_dense(args.query);
            result = blocker.block(x, &y, config);
        } else {
            result = blocker.block(x, nullptr, config);
        }
    } else {
        if (args.key_cols.empty()) {
            throw ValidationError("--key-cols is required unless --dense is given");
        }
        std::vector<std::string> cols = split_columns(args.key_cols);
        corpus_x = load_csv(args.input, cols, args.id_col);
        have_corpus = true;
        if (!args.query.empty()) {
            Corpus corpus_y = load_csv(args.query, cols, args.id_col);
            result = blocker.block(corpus_x, &corpus_y, config);
        } else {
            result = blocker.block(corpus_x, nullptr, config);
        }
    }

    if (!args.output.empty()) {
        write_result_csv(args.output, result);
    }
    if (!args.block_col.empty()) {
        if (result.mode != BlockingMode::dedup) {
            throw ValidationError(
                "--block-col is supported for deduplication runs only; use the library "
                "API for linkage exports");
        }
        if (!have_corpus) {
            throw ValidationError("--block-col requires CSV input");
        }
        std::ofstream out(args.block_col, std::ios::binary);
        if (!out) {
            throw IoError("cannot write file: " + args.block_col);
        }
        out << "id,block\n";
        for (const auto& [id, block] : export_block_column(result, corpus_x)) {
            out << csv::escape_field(id) << ',' << block << '\n';
        }
    }
    std::cout << format_summary(result);
    return kExitOk;
}

struct EvalArgs {
    std::string result;
    std::string truth;
    std::string mode;
    std::string json_path;
};

int cmd_eval(const EvalArgs& args) {
    BlockingMode mode;
    if (args.mode == "dedup") {
        mode = BlockingMode::dedup;
    } else if (args.mode == "linkage") {
        mode = BlockingMode::linkage;
    } else {
        throw ValidationError("--mode must be dedup or linkage");
    }

    BlockingResult result = read_result_csv(args.result, mode);
    TrueBlocks truth = load_truth_csv(args.truth, mode);

    // The CLI universe may extend past the result rows: grow the membership
    // arrays so every truth index is addressable.
    for (const auto& e : truth.entries) {
        if (e.x >= result.m) {
            result.m = e.x + 1;
            result.x_blocks.resize(result.m, -1);
        }
        std::size_t y_bound = mode == BlockingMode::dedup ? e.x : e.y;
        if (y_bound >= result.n) {
            result.n = y_bound + 1;
            if (mode == BlockingMode::dedup) {
                result.m = std::max(result.m, result.n);
                result.x_blocks.resize(result.m, -1);
            } else {
                result.y_blocks.resize(result.n, -1);
            }
        }
    }
    if (mode == BlockingMode::dedup) {
        result.n = result.m;
    }

    ConfusionCounts counts = confusion(result, truth);
    MetricReport report = metrics(counts);

    std::cout << format_metrics(report);
    std::cout << format_confusion(counts);

    if (!args.json_path.empty()) {
        nlohmann::json doc;
        doc["confusion"] = {{"tp", counts.tp}, {"fp", counts.fp}, {"tn", counts.tn},
                            {"fn", counts.fn}};
        doc["metrics"] = {{"recall", report.recall},
                          {"precision", report.precision},
                          {"fpr", report.fpr},
                          {"fnr", report.fnr},
                          {"accuracy", report.accuracy},
                          {"specificity", report.specificity},
                          {"f1_score", report.f1_score}};
        if (!report.flagged.empty()) {
            doc["metrics"]["flagged"] = report.flagged;
        }
        std::ofstream out(args.json_path, std::ios::binary);
        if (!out) {
            throw IoError("cannot write file: " + args.json_path);
        }
        out << doc.dump(2) << '\n';
    }
    return kExitOk;
}

struct GenArgs {
    std::size_t n = 500;
    double dup_fraction = 1.0;
    int ops = 2;
    std::int64_t seed = 42;
    std::string out_prefix;
};

int cmd_gen(const GenArgs& args) {
    CorruptionSpec spec;
    spec.n_originals = args.n;
    spec.dup_fraction = args.dup_fraction;
    spec.ops_per_dup = args.ops;
    spec.seed = static_cast<std::uint64_t>(args.seed);

    auto [corpus, truth] = generate(spec);
    write_corpus_csv(args.out_prefix + "_data.csv", corpus);
    write_truth_csv(args.out_prefix + "_truth.csv", truth);
    std::cout << "wrote " << corpus.size() << " records and " << truth.entries.size()
              << " truth rows to " << args.out_prefix << "_{data,truth}.csv\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ANN-based record blocking for entity resolution"};
    app.require_subcommand(1);

    BlockArgs block_args;
    CLI::App* block = app.add_subcommand(
        "block", "Block records from CSV or dense-matrix input");
    block->add_option("--input", block_args.input, "Reference dataset (CSV, or dense matrix with --dense)")
        ->required();
    block->add_option("--key-cols", block_args.key_cols,
                      "Comma-separated key columns concatenated into the blocking key");
    block->add_option("--id-col", block_args.id_col, "Id column carried into exports");
    block->add_option("--query", block_args.query,
                      "Query dataset; enables record linkage mode");
    block->add_option("--ann", block_args.ann, "Backend: exact, lsh or hnsw");
    block->add_option("--config", block_args.config_path, "TOML config file");
    block->add_option("--output", block_args.output, "Result CSV path");
    block->add_option("--block-col", block_args.block_col,
                      "Write an (id, block) CSV for the deduplicated dataset");
    block->add_flag("--dense", block_args.dense,
                    "Treat inputs as headerless dense matrix CSVs");
    block->add_option("--seed", block_args.seed, "Random seed for lsh/hnsw");
    block->add_option("--edge-k", block_args.edge_k,
                      "Neighbours per query that create graph edges");

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "Score a blocking result against truth");
    eval->add_option("--result", eval_args.result, "Result CSV from the block subcommand")
        ->required();
    eval->add_option("--truth", eval_args.truth, "Truth CSV (x,block or x,y,block)")
        ->required();
    eval->add_option("--mode", eval_args.mode, "dedup or linkage")->required();
    eval->add_option("--json", eval_args.json_path, "Also write the report as JSON");

    GenArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic dataset with duplicates");
    gen->add_option("--n", gen_args.n, "Number of original records")->required();
    gen->add_option("--dup-fraction", gen_args.dup_fraction,
                    "Fraction of originals that get a duplicate");
    gen->add_option("--ops", gen_args.ops, "Corruption operations per duplicate");
    gen->add_option("--seed", gen_args.seed, "Random seed");
    gen->add_option("--out-prefix", gen_args.out_prefix, "Output path prefix")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (block->parsed()) return cmd_block(block_args);
        if (eval->parsed()) return cmd_eval(eval_args);
        if (gen->parsed()) return cmd_gen(gen_args);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitOk;
}
