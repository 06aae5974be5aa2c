// Command-line front end: simulate / discover / evaluate / counterfactual /
// bench. Exit codes: 0 success, 1 configuration error, 2 data error,
// 3 partial failures in a benchmark report.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "causal/bench.hpp"
#include "causal/counterfactual.hpp"
#include "causal/csv.hpp"
#include "causal/discovery.hpp"
#include "causal/errors.hpp"
#include "causal/gbn.hpp"
#include "causal/metrics.hpp"

namespace fs = std::filesystem;
using namespace causal;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << content;
}

Pdag load_graph_as_pdag(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return pdag_from_json(text);
    } catch (const ParseError&) {
        return pag_from_json(text).to_pdag();
    }
}

int run_simulate(std::uint64_t seed, const std::string& out_dir) {
    simulate_benchmark_dataset(seed, out_dir);
    std::cout << "wrote simulated benchmark dataset to " << out_dir << "\n";
    return 0;
}

int run_discover(const std::string& algo, const std::string& data_path, DiscoveryOptions opts,
                 const std::string& out_path) {
    if (algo != "pc" && algo != "ges" && algo != "fci") {
        throw ConfigError("unknown algorithm id '" + algo + "'");
    }
    if (algo != "ges" && (opts.alpha <= 0.0 || opts.alpha >= 1.0)) {
        throw ConfigError("alpha must lie strictly inside (0,1) for a single run");
    }
    const Dataset data = read_csv(data_path);
    std::string json;
    if (algo == "pc") {
        json = to_json(pc(data, opts).graph);
    } else if (algo == "ges") {
        json = to_json(ges(data, opts));
    } else {
        json = to_json(fci(data, opts).graph);
    }
    if (out_path.empty()) {
        std::cout << json << "\n";
    } else {
        write_file(out_path, json);
        std::cout << "wrote " << out_path << "\n";
    }
    return 0;
}

int run_evaluate(const std::string& graph_path, const std::string& truth_path,
                 const std::string& data_path) {
    const Pdag learned = load_graph_as_pdag(graph_path);
    Dag truth = dag_from_json(read_file(truth_path));
    truth = reindex_by_names(truth, learned.node_names());

    const ConfusionCounts c = edge_confusion(learned, truth);
    const PrfScores s = prf(c);
    std::printf("f_score %.6g\nprecision %.6g\nrecall %.6g\nfpr %.6g\n", s.f_score, s.precision,
                s.recall, s.fpr);
    std::printf("shd %d\n", shd(learned, Pdag::from_dag(truth)));
    const DagExtension ext = extend_to_dag(learned);
    std::printf("sid %d%s\n", sid(truth, ext.dag),
                ext.used_fallback ? "  (skeleton-order extension)" : "");
    if (!data_path.empty()) {
        const Dataset data = read_csv(data_path);
        std::printf("nrmse_av %.6g\n", nrmse_av(learned, data));
    }
    return 0;
}

int run_counterfactual(const std::string& query_path, const std::string& model_path,
                       const std::string& graph_path) {
    const GbnModel model = gbn_from_json(read_file(model_path));
    const std::string base_dir = fs::path(query_path).parent_path().string();
    const CounterfactualQuery query =
        load_counterfactual_query(read_file(query_path), model, base_dir);
    const Pdag learned = load_graph_as_pdag(graph_path);
    const CeResult res = counterfactual_error(query, learned);
    std::printf("counterfactual_error %.6g\n", res.ce);
    std::printf("effective_sample_size %.6g\n", res.ess);
    if (res.missing_edges > 0) {
        std::printf("note: %d replaced edge(s) absent from the learned graph\n",
                    res.missing_edges);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"causal structure learning and benchmarking"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate the simulated benchmark dataset");
    std::uint64_t sim_seed = 0;
    std::string sim_out = "simdata";
    sim->add_option("--seed", sim_seed, "rng seed")->required();
    sim->add_option("--out", sim_out, "output directory");

    // discover
    auto* disc = app.add_subcommand("discover", "run one structure-learning algorithm");
    std::string disc_algo, disc_data, disc_out;
    DiscoveryOptions disc_opts;
    int disc_max_cond = -1;
    disc->add_option("--algo", disc_algo, "pc | ges | fci")->required();
    disc->add_option("--data", disc_data, "CSV dataset")->required();
    disc->add_option("--alpha", disc_opts.alpha, "significance level (pc/fci)");
    disc->add_option("--penalty", disc_opts.penalty_multiplier, "BIC penalty multiplier (ges)");
    disc->add_option("--max-cond-size", disc_max_cond, "conditioning set cap");
    disc->add_flag("!--no-stable", disc_opts.stable_skeleton, "order-dependent skeleton");
    disc->add_option("--out", disc_out, "output graph JSON (stdout when omitted)");

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "score a learned graph against a truth DAG");
    std::string eval_graph, eval_truth, eval_data;
    eval->add_option("--graph", eval_graph, "learned graph JSON")->required();
    eval->add_option("--truth", eval_truth, "truth DAG JSON")->required();
    eval->add_option("--data", eval_data, "CSV dataset for predictive NRMSE");

    // counterfactual
    auto* cf = app.add_subcommand("counterfactual", "counterfactual error of a learned graph");
    std::string cf_query, cf_model, cf_graph;
    cf->add_option("--query", cf_query, "counterfactual query JSON")->required();
    cf->add_option("--model", cf_model, "data-generating model JSON")->required();
    cf->add_option("--graph", cf_graph, "learned graph JSON")->required();

    // bench
    auto* bench = app.add_subcommand("bench", "run the full benchmark pipeline");
    std::string b_config, b_grid, b_truth, b_out, b_metrics;
    std::vector<std::string> b_algos;
    std::uint64_t b_seed = 0;
    double b_timeout = 0.0;
    bool b_simulate = false;
    std::string b_manifest;
    bench->add_option("--config", b_config, "config JSON file");
    bench->add_option("--seed", b_seed, "global rng seed");
    bench->add_flag("--simulate", b_simulate, "simulate the benchmark dataset");
    bench->add_option("--manifest", b_manifest, "dataset manifest JSON");
    bench->add_option("--algo", b_algos, "algorithm id (repeatable)");
    bench->add_option("--grid", b_grid, "threshold grid start:step:end");
    bench->add_option("--truth", b_truth, "truth DAG JSON");
    bench->add_option("--out", b_out, "output directory");
    bench->add_option("--metrics", b_metrics, "comma list: structural,predictive,counterfactual");
    bench->add_option("--timeout", b_timeout, "per-algorithm budget in seconds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*sim) return run_simulate(sim_seed, sim_out);
        if (*disc) {
            if (disc_max_cond >= 0) disc_opts.max_cond_size = disc_max_cond;
            return run_discover(disc_algo, disc_data, disc_opts, disc_out);
        }
        if (*eval) return run_evaluate(eval_graph, eval_truth, eval_data);
        if (*cf) return run_counterfactual(cf_query, cf_model, cf_graph);
        if (*bench) {
            BenchConfig cfg;
            if (!b_config.empty()) {
                cfg = bench_config_from_json(read_file(b_config),
                                             fs::path(b_config).parent_path().string());
            }
            if (bench->count("--seed")) cfg.seed = b_seed;
            if (b_simulate) cfg.simulate = true;
            if (!b_manifest.empty()) cfg.manifest_path = b_manifest;
            if (!b_algos.empty()) {
                cfg.algorithms.clear();
                for (const std::string& id : b_algos) cfg.algorithms.push_back({id, {}});
            }
            if (!b_grid.empty()) cfg.grid = parse_grid_spec(b_grid);
            if (cfg.grid.empty()) cfg.grid = parse_grid_spec("0.01:0.01:0.99");
            if (!b_truth.empty()) cfg.truth_path = b_truth;
            if (!b_out.empty()) cfg.out_dir = b_out;
            if (!b_metrics.empty()) {
                cfg.metrics.clear();
                std::istringstream in(b_metrics);
                std::string tok;
                while (std::getline(in, tok, ',')) {
                    if (!tok.empty()) cfg.metrics.insert(tok);
                }
            }
            if (b_timeout > 0.0) cfg.timeout_seconds = b_timeout;
            return run_benchmark(cfg);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const DegeneracyError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
