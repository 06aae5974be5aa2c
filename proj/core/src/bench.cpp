#include "causal/bench.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "causal/counterfactual.hpp"
#include "causal/csv.hpp"
#include "causal/errors.hpp"
#include "causal/gbn.hpp"
#include "causal/rng.hpp"

namespace fs = std::filesystem;

namespace causal {

namespace {

constexpr const char* kVersion = "0.1.0";

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

std::vector<std::string> gene_names(int m) {
    std::vector<std::string> names;
    names.reserve(m);
    for (int i = 1; i <= m; ++i) names.push_back("G" + std::to_string(i));
    return names;
}

DiscoveryOptions options_from_json(const nlohmann::json& j) {
    DiscoveryOptions opts;
    if (j.contains("alpha")) opts.alpha = j.at("alpha").get<double>();
    if (j.contains("stable_skeleton")) opts.stable_skeleton = j.at("stable_skeleton").get<bool>();
    if (j.contains("max_cond_size")) opts.max_cond_size = j.at("max_cond_size").get<int>();
    if (j.contains("penalty_multiplier")) {
        opts.penalty_multiplier = j.at("penalty_multiplier").get<double>();
    }
    return opts;
}

/// Reindexes a truth graph whose node names may be ordered differently from
/// the dataset columns.
Dag align_to_columns(const Dag& g, const std::vector<std::string>& columns) {
    try {
        return reindex_by_names(g, columns);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("truth graph does not match the dataset: ") + e.what());
    }
}

}  // namespace

std::vector<double> parse_grid_spec(const std::string& spec) {
    double start = 0.0, step = 0.0, end = 0.0;
    char c1 = 0, c2 = 0;
    std::istringstream in(spec);
    if (!(in >> start >> c1 >> step >> c2 >> end) || c1 != ':' || c2 != ':') {
        throw ConfigError("grid spec must be start:step:end, got '" + spec + "'");
    }
    if (!(step > 0.0) || end < start) throw ConfigError("invalid grid spec '" + spec + "'");
    std::vector<double> grid;
    for (int k = 0;; ++k) {
        const double v = start + k * step;
        if (v > end + step * 1e-9) break;
        grid.push_back(v);
    }
    return grid;
}

BenchConfig bench_config_from_json(const std::string& text, const std::string& base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid config JSON: ") + e.what());
    }
    BenchConfig cfg;
    auto resolve = [&base_dir](const std::string& p) {
        return (p.empty() || p.front() == '/' || base_dir.empty()) ? p : base_dir + "/" + p;
    };
    try {
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("simulate")) cfg.simulate = j.at("simulate").get<bool>();
        if (j.contains("manifest")) cfg.manifest_path = resolve(j.at("manifest").get<std::string>());
        if (j.contains("algorithms")) {
            for (const auto& a : j.at("algorithms")) {
                AlgoSpec spec;
                if (a.is_string()) {
                    spec.id = a.get<std::string>();
                } else {
                    spec.id = a.at("id").get<std::string>();
                    spec.opts = options_from_json(a);
                }
                cfg.algorithms.push_back(std::move(spec));
            }
        }
        if (j.contains("grid")) {
            if (j.at("grid").is_string()) {
                cfg.grid = parse_grid_spec(j.at("grid").get<std::string>());
            } else if (j.at("grid").is_array()) {
                cfg.grid = j.at("grid").get<std::vector<double>>();
            } else {
                const auto& g = j.at("grid");
                std::ostringstream spec;
                spec << g.at("start").get<double>() << ':' << g.at("step").get<double>() << ':'
                     << g.at("end").get<double>();
                cfg.grid = parse_grid_spec(spec.str());
            }
        }
        if (j.contains("truth")) cfg.truth_path = resolve(j.at("truth").get<std::string>());
        if (j.contains("metrics")) {
            cfg.metrics.clear();
            for (const auto& mtr : j.at("metrics")) cfg.metrics.insert(mtr.get<std::string>());
        }
        if (j.contains("out")) cfg.out_dir = resolve(j.at("out").get<std::string>());
        if (j.contains("timeout_seconds")) {
            cfg.timeout_seconds = j.at("timeout_seconds").get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid config JSON: ") + e.what());
    }
    return cfg;
}

void validate_config(const BenchConfig& config) {
    if (config.algorithms.empty()) throw ConfigError("config needs at least one algorithm");
    for (const AlgoSpec& a : config.algorithms) {
        if (a.id != "pc" && a.id != "ges" && a.id != "fci") {
            throw ConfigError("unknown algorithm id '" + a.id + "'");
        }
    }
    if (config.grid.empty()) throw ConfigError("config needs a nonempty threshold grid");
    for (std::size_t i = 0; i < config.grid.size(); ++i) {
        if (config.grid[i] < 0.0 || config.grid[i] > 1.0) {
            throw ConfigError("grid values must lie in [0,1]");
        }
        if (i > 0 && !(config.grid[i] > config.grid[i - 1])) {
            throw ConfigError("grid values must be strictly increasing");
        }
    }
    if (config.simulate && !config.seed) {
        throw ConfigError("a seed is mandatory when simulating");
    }
    if (config.simulate && config.manifest_path) {
        throw ConfigError("choose either simulate or a manifest, not both");
    }
    if (!config.simulate && !config.manifest_path) {
        throw ConfigError("config needs a dataset source (simulate or manifest)");
    }
    for (const std::string& mtr : config.metrics) {
        if (mtr != "structural" && mtr != "predictive" && mtr != "counterfactual") {
            throw ConfigError("unknown metric toggle '" + mtr + "'");
        }
    }
    if (!(config.timeout_seconds > 0.0)) throw ConfigError("timeout must be positive");
}

std::string Manifest::resolve(const std::string& path) const {
    return (path.empty() || path.front() == '/' || base_dir.empty()) ? path
                                                                     : base_dir + "/" + path;
}

Manifest load_manifest(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid manifest JSON: ") + e.what());
    }
    Manifest man;
    man.base_dir = fs::path(path).parent_path().string();
    try {
        man.observational = j.at("observational").get<std::string>();
        if (j.contains("interventions")) {
            for (const auto& e : j.at("interventions")) {
                man.interventions.push_back({e.at("node").get<std::string>(),
                                             e.at("value").get<double>(),
                                             e.at("path").get<std::string>()});
            }
        }
        if (j.contains("truth")) man.truth = j.at("truth").get<std::string>();
        if (j.contains("model")) man.model = j.at("model").get<std::string>();
        if (j.contains("counterfactual")) {
            man.counterfactual = j.at("counterfactual").get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid manifest JSON: ") + e.what());
    }
    if (!fs::exists(man.resolve(man.observational))) {
        throw ParseError("manifest references missing file '" + man.observational + "'");
    }
    for (const auto& e : man.interventions) {
        if (!fs::exists(man.resolve(e.path))) {
            throw ParseError("manifest references missing file '" + e.path + "'");
        }
    }
    return man;
}

Manifest simulate_benchmark_dataset(std::uint64_t seed, const std::string& out_dir) {
    fs::create_directories(out_dir);
    GbnModel model = random_gbn(10, 0.3, seed);
    model.set_node_names(gene_names(10));

    Manifest man;
    man.base_dir = out_dir;
    man.observational = "observational.csv";
    write_csv(sample_observational(model, 10000, derive_seed(seed, 1)),
              out_dir + "/observational.csv");
    for (NodeId v = 0; v < model.num_nodes(); ++v) {
        const std::string name = model.node_names()[v];
        const std::string file = "ko_" + name + ".csv";
        write_csv(sample_interventional(model, {v, 0.0}, 1000, derive_seed(seed, 100 + v)),
                  out_dir + "/" + file);
        man.interventions.push_back({name, 0.0, file});
    }
    write_file(out_dir + "/truth.json", to_json(model.dag()));
    write_file(out_dir + "/model.json", to_json(model));
    man.truth = "truth.json";
    man.model = "model.json";

    nlohmann::json j;
    j["observational"] = man.observational;
    j["interventions"] = nlohmann::json::array();
    for (const auto& e : man.interventions) {
        j["interventions"].push_back({{"node", e.node}, {"value", e.value}, {"path", e.path}});
    }
    j["truth"] = *man.truth;
    j["model"] = *man.model;
    write_file(out_dir + "/manifest.json", j.dump(2));
    return man;
}

CounterfactualQuery simulated_counterfactual_query(const GbnModel& model, const Dataset& obs,
                                                   std::uint64_t seed) {
    const Dag& dag = model.dag();
    // Pick an intervened edge every learner has a fair chance to recover.
    // Preference order: compelled orientation in the equivalence class, then
    // the strongest signal |w| * sd(parent) / noise_sd(child), over nodes
    // with children.
    const Pdag cpdag = dag_to_cpdag(dag);
    const Gaussian truth_joint = joint_gaussian(model);
    NodeId node = -1;
    NodeId parent = -1;
    double best_rank = -1.0;
    for (NodeId v = 0; v < dag.num_nodes(); ++v) {
        if (dag.parents(v).empty() || dag.children(v).empty()) continue;
        for (NodeId p : dag.parents(v)) {
            const double signal = std::abs(model.weight(p, v)) *
                                  std::sqrt(truth_joint.cov(p, p)) / model.noise_sd(v);
            const double rank = (cpdag.has_directed(p, v) ? 1e6 : 1.0) * signal;
            if (rank > best_rank) {
                best_rank = rank;
                node = v;
                parent = p;
            }
        }
    }
    if (node < 0) {
        throw ConfigError("no node with both parents and children; "
                          "pick a different simulation seed for counterfactual metrics");
    }
    const Gaussian joint = joint_gaussian(model);
    const double scale = std::max(std::abs(joint.mean(parent)), 1.0);
    const double delta = 0.5 * model.noise_sd(node) / scale;

    FactorReplacement repl;
    repl.node = node;
    repl.new_weights = model.parent_weights(node);
    repl.new_weights[parent] += delta;
    repl.new_intercept = model.intercept(node);
    repl.new_noise_sd = model.noise_sd(node);

    const GbnModel shifted =
        model.with_factor(node, repl.new_weights, repl.new_intercept, repl.new_noise_sd);
    Dataset cf_int = sample_observational(shifted, 10000, derive_seed(seed, 777));

    std::vector<NodeId> targets(dag.children(node).begin(), dag.children(node).end());
    return CounterfactualQuery{model, std::move(repl), std::move(targets), obs,
                               std::move(cf_int), true};
}

namespace {

/// File-backed version for the benchmark pipeline. Also records the query in
/// the dataset manifest so the directory can be replayed without resimulating.
CounterfactualQuery make_benchmark_query(const GbnModel& model, const Dataset& obs,
                                         std::uint64_t seed, const std::string& out_dir,
                                         std::string* query_file) {
    CounterfactualQuery query = simulated_counterfactual_query(model, obs, seed);
    write_csv(query.interventional, out_dir + "/cf_int.csv");
    write_file(out_dir + "/cf_query.json",
               counterfactual_query_to_json(query, "observational.csv", "cf_int.csv"));
    *query_file = "cf_query.json";
    const std::string manifest_path = out_dir + "/manifest.json";
    if (fs::exists(manifest_path)) {
        nlohmann::json j = nlohmann::json::parse(read_file(manifest_path));
        j["counterfactual"] = *query_file;
        write_file(manifest_path, j.dump(2));
    }
    return query;
}

std::string json_escape(const std::string& s) {
    return nlohmann::json(s).dump();
}

}  // namespace

int run_benchmark(const BenchConfig& config) {
    validate_config(config);
    fs::create_directories(config.out_dir);
    fs::create_directories(config.out_dir + "/graphs");

    Manifest man;
    if (config.simulate) {
        man = simulate_benchmark_dataset(*config.seed, config.out_dir + "/data");
    } else {
        man = load_manifest(*config.manifest_path);
    }

    const Dataset obs = read_csv(man.resolve(man.observational));

    std::optional<Dag> truth;
    if (config.truth_path) {
        truth = align_to_columns(dag_from_json(read_file(*config.truth_path)), obs.names());
    } else if (man.truth) {
        truth = align_to_columns(dag_from_json(read_file(man.resolve(*man.truth))), obs.names());
    }

    std::optional<GbnModel> base_model;
    if (man.model) base_model = gbn_from_json(read_file(man.resolve(*man.model)));

    const bool want_structural = config.metrics.count("structural") > 0;
    const bool want_predictive = config.metrics.count("predictive") > 0;
    const bool want_counterfactual = config.metrics.count("counterfactual") > 0;

    std::optional<CounterfactualQuery> query;
    if (want_counterfactual) {
        if (config.simulate && base_model) {
            std::string query_file;
            query = make_benchmark_query(*base_model, obs, *config.seed,
                                         config.out_dir + "/data", &query_file);
            man.counterfactual = query_file;
        } else if (man.counterfactual && base_model) {
            query = load_counterfactual_query(read_file(man.resolve(*man.counterfactual)),
                                              *base_model, man.base_dir);
        }
    }

    MetricReport report;
    std::map<std::string, double> wall_times;
    std::map<std::string, long> ci_counts;
    bool any_failure = false;

    for (const AlgoSpec& algo : config.algorithms) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto deadline =
            t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                     std::chrono::duration<double>(config.timeout_seconds));
        try {
            SweepResult sweep =
                threshold_sweep(obs, algo.id, config.grid, truth ? &*truth : nullptr,
                                algo.opts, deadline);
            ci_counts[algo.id] = sweep.ci_tests;

            std::vector<std::optional<double>> per_threshold_nrmse(sweep.entries.size());
            std::size_t selected = 0;
            if (sweep.selected) {
                selected = *sweep.selected;
            } else {
                // Without a reference graph, predictive accuracy picks the
                // operating point.
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < sweep.entries.size(); ++i) {
                    if (deadline < std::chrono::steady_clock::now()) {
                        throw TimeoutError("algorithm '" + algo.id +
                                           "' exceeded its wall-clock budget");
                    }
                    const double v = nrmse_av(sweep.entries[i].graph, obs);
                    per_threshold_nrmse[i] = v;
                    if (v < best) {
                        best = v;
                        selected = i;
                    }
                }
            }

            for (std::size_t i = 0; i < sweep.entries.size(); ++i) {
                const SweepEntry& entry = sweep.entries[i];
                MetricRow row;
                row.algorithm = algo.id;
                row.threshold = entry.threshold;
                row.selected = i == selected;
                if (truth && want_structural) {
                    const PrfScores s = prf(edge_confusion(entry.graph, *truth));
                    row.f_score = s.f_score;
                    row.precision = s.precision;
                    row.recall = s.recall;
                    row.fpr = s.fpr;
                    row.shd = shd(entry.graph, Pdag::from_dag(*truth));
                    if (row.selected) {
                        row.auc = auc(sweep, *truth);
                        row.sid = sid(*truth, extend_to_dag(entry.graph).dag);
                    }
                }
                if (want_predictive) {
                    if (per_threshold_nrmse[i]) {
                        row.nrmse_av = per_threshold_nrmse[i];
                    } else if (row.selected) {
                        row.nrmse_av = nrmse_av(entry.graph, obs);
                    }
                }
                if (row.selected && query) {
                    row.counterfactual_error = counterfactual_error(*query, entry.graph).ce;
                }
                if (row.selected) {
                    const SweepEntry& sel = sweep.entries[selected];
                    write_file(config.out_dir + "/graphs/" + algo.id + ".json",
                               sel.pag ? to_json(*sel.pag) : to_json(sel.graph));
                }
                report.rows.push_back(std::move(row));
            }
        } catch (const TimeoutError&) {
            MetricRow row;
            row.algorithm = algo.id;
            row.status = "timeout";
            row.selected = false;
            report.rows.push_back(std::move(row));
            any_failure = true;
        } catch (const std::exception& e) {
            MetricRow row;
            row.algorithm = algo.id;
            row.status = std::string("error: ") + e.what();
            report.rows.push_back(std::move(row));
            any_failure = true;
        }
        wall_times[algo.id] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    // Reference row: the truth evaluated as if it were a learned graph.
    if (truth) {
        try {
            MetricRow row;
            row.algorithm = "true_graph";
            row.selected = true;
            if (want_structural) {
                const Pdag truth_pdag = Pdag::from_dag(*truth);
                const PrfScores s = prf(edge_confusion(truth_pdag, *truth));
                row.f_score = s.f_score;
                row.precision = s.precision;
                row.recall = s.recall;
                row.fpr = s.fpr;
                row.shd = 0;
                row.sid = 0;
                row.auc = 1.0;
            }
            if (want_predictive) row.nrmse_av = nrmse_av(Pdag::from_dag(*truth), obs);
            if (query) {
                row.counterfactual_error =
                    counterfactual_error(*query, Pdag::from_dag(*truth)).ce;
            }
            report.rows.push_back(std::move(row));
        } catch (const std::exception& e) {
            MetricRow row;
            row.algorithm = "true_graph";
            row.status = std::string("error: ") + e.what();
            report.rows.push_back(std::move(row));
            any_failure = true;
        }
    }

    write_file(config.out_dir + "/report.csv", to_csv(report));
    write_file(config.out_dir + "/report.md", to_markdown(report));

    std::ostringstream meta;
    meta << "{\n  \"version\": " << json_escape(kVersion) << ",\n";
    meta << "  \"seed\": " << (config.seed ? std::to_string(*config.seed) : "null") << ",\n";
    meta << "  \"source\": " << json_escape(config.simulate ? "simulate" : *config.manifest_path)
         << ",\n";
    meta << "  \"grid\": [";
    for (std::size_t i = 0; i < config.grid.size(); ++i) {
        if (i) meta << ", ";
        meta << config.grid[i];
    }
    meta << "],\n  \"wall_times_seconds\": {";
    bool first = true;
    for (const auto& [k, v] : wall_times) {
        if (!first) meta << ", ";
        first = false;
        meta << json_escape(k) << ": " << v;
    }
    meta << "},\n  \"ci_tests\": {";
    first = true;
    for (const auto& [k, v] : ci_counts) {
        if (!first) meta << ", ";
        first = false;
        meta << json_escape(k) << ": " << v;
    }
    meta << "}\n}\n";
    write_file(config.out_dir + "/metadata.json", meta.str());

    return any_failure ? 3 : 0;
}

}  // namespace causal
