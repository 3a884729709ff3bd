// fairsel: fairness-aware unsupervised feature selection.
//
// Exit codes: 0 success, 1 configuration error, 2 data error, 3 numeric
// failure. Every command emits a run manifest next to its main output.

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fairsel/dataset.hpp"
#include "fairsel/errors.hpp"
#include "fairsel/eval.hpp"
#include "fairsel/fufs.hpp"
#include "fairsel/io.hpp"
#include "fairsel/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kDefaultFractions[] = {0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40};

struct SourceFlags {
    std::string data_path;
    std::vector<std::string> protected_columns;
    std::string label_column;
    bool no_standardize = false;
    bool synthetic = false;
    fairsel::SyntheticSpec spec;
};

void add_source_flags(CLI::App* cmd, SourceFlags& flags) {
    cmd->add_option("--data", flags.data_path, "CSV dataset path (instances as rows)");
    cmd->add_option("--protected", flags.protected_columns, "protected column names")
        ->delimiter(',');
    cmd->add_option("--label", flags.label_column, "ground-truth label column");
    cmd->add_flag("--no-standardize", flags.no_standardize, "skip per-feature z-scoring");
    cmd->add_flag("--synthetic", flags.synthetic, "use the synthetic generator");
    cmd->add_option("--synth-n", flags.spec.n, "synthetic instance count");
    cmd->add_option("--synth-utility", flags.spec.n_utility, "utility feature count");
    cmd->add_option("--synth-sensitive", flags.spec.n_sensitive, "sensitive feature count");
    cmd->add_option("--synth-noise", flags.spec.n_noise, "noise feature count");
    cmd->add_option("--synth-separation", flags.spec.cluster_separation, "cluster separation");
    cmd->add_option("--synth-corr", flags.spec.sensitive_correlation,
                    "sensitive/protected correlation in [0,1]");
    cmd->add_option("--synth-seed", flags.spec.seed, "generator seed");
}

fairsel::DataSource source_from_flags(const SourceFlags& flags) {
    fairsel::DataSource source;
    if (flags.synthetic && !flags.data_path.empty())
        throw fairsel::ConfigError("--data and --synthetic are mutually exclusive");
    if (flags.synthetic) {
        source.synthetic = fairsel::DataSource::Synthetic{flags.spec, !flags.no_standardize};
        return source;
    }
    if (flags.data_path.empty())
        throw fairsel::ConfigError("need a data source: --data PATH or --synthetic");
    if (flags.protected_columns.empty())
        throw fairsel::ConfigError("--data requires --protected with at least one column");
    fairsel::DataSource::Csv csv;
    csv.path = flags.data_path;
    csv.protected_columns = flags.protected_columns;
    if (!flags.label_column.empty()) csv.label_column = flags.label_column;
    csv.standardize = !flags.no_standardize;
    source.csv = std::move(csv);
    return source;
}

int thread_budget(std::size_t jobs) {
    int budget = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("FAIRSEL_THREADS")) {
        const int capped = std::atoi(env);
        if (capped >= 1) budget = std::min(budget, capped);
    }
    return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(budget), jobs));
}

std::string format_value(double v) {
    std::ostringstream out;
    out.precision(10);
    out << v;
    return out.str();
}

void write_manifest(const fs::path& path, const fairsel::RunManifest& manifest,
                    const json& command) {
    json j = fairsel::manifest_to_json(manifest);
    j["command"] = command;
    fairsel::write_json_file(path.string(), j);
}

fs::path sibling(const fs::path& out, const std::string& suffix) {
    fs::path p = out;
    p.replace_extension();
    return p.concat(suffix);
}

struct EvalParams {
    std::vector<double> fractions{std::begin(kDefaultFractions), std::end(kDefaultFractions)};
    int restarts = 50;
    std::uint64_t seed = 0;
    int clusters = 0;  // 0: take from labels
    std::optional<double> group_threshold;
};

int resolve_clusters(const fairsel::Dataset& data, int requested) {
    if (requested > 0) return requested;
    if (data.labels) return data.n_clusters();
    throw fairsel::ConfigError("no ground-truth labels; pass --clusters");
}

int feature_count(double fraction, Eigen::Index d) {
    const int count = static_cast<int>(std::ceil(fraction * static_cast<double>(d)));
    return std::clamp(count, 1, static_cast<int>(d));
}

struct FractionRow {
    double fraction = 0.0;
    fairsel::EvalReport report;
};

std::vector<FractionRow> evaluate_ranking(const fairsel::Dataset& data,
                                          const std::vector<int>& ranking,
                                          const EvalParams& params,
                                          const fairsel::EvalOptions& opts) {
    const int clusters = resolve_clusters(data, params.clusters);
    std::vector<FractionRow> rows;
    for (const double fraction : params.fractions) {
        const int count = feature_count(fraction, data.d());
        const std::vector<int> top(ranking.begin(), ranking.begin() + count);
        rows.push_back(
            {fraction, evaluate_selection(data, top, clusters, params.restarts, params.seed, opts)});
    }
    return rows;
}

void write_fraction_csv(std::ostream& out, const std::vector<FractionRow>& rows) {
    out << "fraction,acc,nmi,balance,proportion\n";
    for (const auto& row : rows) {
        out << format_value(row.fraction) << ','
            << (row.report.acc ? format_value(*row.report.acc) : "") << ','
            << (row.report.nmi ? format_value(*row.report.nmi) : "") << ','
            << format_value(row.report.balance) << ',' << format_value(row.report.proportion)
            << '\n';
    }
}

void print_best_per_metric(const std::vector<FractionRow>& rows, bool utility) {
    if (rows.empty()) return;
    auto best = [&](auto getter, bool maximize, const char* name) {
        double best_value = getter(rows.front());
        double best_fraction = rows.front().fraction;
        for (const auto& row : rows) {
            const double value = getter(row);
            if (maximize ? value > best_value : value < best_value) {
                best_value = value;
                best_fraction = row.fraction;
            }
        }
        std::cout << "best " << name << " " << format_value(best_value) << " at fraction "
                  << format_value(best_fraction) << '\n';
    };
    if (utility) {
        best([](const FractionRow& r) { return *r.report.acc; }, true, "acc");
        best([](const FractionRow& r) { return *r.report.nmi; }, true, "nmi");
    }
    best([](const FractionRow& r) { return r.report.balance; }, true, "balance");
    best([](const FractionRow& r) { return r.report.proportion; }, false, "proportion");
}

// ---------------------------------------------------------------- select --

struct SelectArgs {
    SourceFlags source;
    std::string config_path;
    std::string manifest_path;
    std::string out_path = "selection.json";
    fairsel::FufsConfig cfg;
    CLI::App* cmd = nullptr;
};

int run_select(const SelectArgs& args) {
    const auto start = std::chrono::steady_clock::now();

    fairsel::FufsConfig cfg;
    fairsel::DataSource source;
    if (!args.manifest_path.empty()) {
        if (!args.config_path.empty())
            throw fairsel::ConfigError("--manifest and --config are mutually exclusive");
        const fairsel::RunManifest manifest =
            fairsel::manifest_from_json(fairsel::read_json_file(args.manifest_path));
        cfg = manifest.config;
        source = manifest.source;
    } else {
        if (!args.config_path.empty())
            fairsel::apply_config_json(cfg, fairsel::read_json_file(args.config_path));
        source = source_from_flags(args.source);
    }

    // Flags override file values.
    for (const auto& [flag, apply] :
         std::initializer_list<std::pair<const char*, std::function<void()>>>{
             {"--alpha", [&] { cfg.alpha = args.cfg.alpha; }},
             {"--beta", [&] { cfg.beta = args.cfg.beta; }},
             {"--k", [&] { cfg.k = args.cfg.k; }},
             {"--l", [&] { cfg.l = args.cfg.l; }},
             {"--seed", [&] { cfg.seed = args.cfg.seed; }},
             {"--ablate-g", [&] { cfg.ablate_g = args.cfg.ablate_g; }}}) {
        if (args.cmd->count(flag)) apply();
    }

    const fairsel::Dataset data = fairsel::load_from_source(source);
    for (const auto& warning : cfg.validate(data.d()))
        std::cerr << "warning: " << warning << '\n';

    const fairsel::SelectionResult result = fairsel::optimize(data, cfg);
    fairsel::write_json_file(args.out_path, fairsel::selection_to_json(result));

    fairsel::RunManifest manifest;
    manifest.config = cfg;
    manifest.config.k = cfg.resolved_k(data.d());
    manifest.config.l = cfg.resolved_l(data.d());
    manifest.source = source;
    const fs::path manifest_out = sibling(args.out_path, ".manifest.json");
    manifest.outputs = {args.out_path, manifest_out.string()};
    manifest.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(manifest_out, manifest, json{{"name", "select"}});

    std::cout << "selected " << result.selected.size() << " features; converged="
              << (result.converged ? "true" : "false") << " after " << result.iterations
              << " iterations\n";
    return 0;
}

// -------------------------------------------------------------- evaluate --

struct EvaluateArgs {
    SourceFlags source;
    std::string selection_path;
    std::string out_path = "evaluation.csv";
    EvalParams params;
    std::vector<std::string> metrics{"acc", "nmi", "balance", "proportion"};
    double group_threshold = 0.0;
    CLI::App* cmd = nullptr;
};

int run_evaluate(const EvaluateArgs& args) {
    const auto start = std::chrono::steady_clock::now();
    if (args.params.fractions.empty()) throw fairsel::ConfigError("empty fraction grid");

    bool want_utility = false, want_fairness = false;
    for (const auto& metric : args.metrics) {
        if (metric == "acc" || metric == "nmi")
            want_utility = true;
        else if (metric == "balance" || metric == "proportion")
            want_fairness = true;
        else
            throw fairsel::ConfigError("unknown metric '" + metric + "'");
    }

    const fairsel::DataSource source = source_from_flags(args.source);
    const fairsel::Dataset data = fairsel::load_from_source(source);
    const fairsel::SelectionResult selection =
        fairsel::selection_from_json(fairsel::read_json_file(args.selection_path));
    if (selection.indicators.m.size() != data.d())
        throw fairsel::DataError("selection has " + std::to_string(selection.indicators.m.size()) +
                                 " features but dataset has " + std::to_string(data.d()));
    if (want_utility && !data.labels)
        throw fairsel::DataError("dataset has no labels; acc/nmi unavailable");

    EvalParams params = args.params;
    if (args.cmd->count("--group-threshold")) params.group_threshold = args.group_threshold;
    fairsel::EvalOptions opts;
    opts.utility = want_utility;
    opts.fairness = want_fairness;
    opts.group_threshold = params.group_threshold;

    const std::vector<int> ranking = fairsel::rank_by_score(selection.indicators.m);
    const std::vector<FractionRow> rows = evaluate_ranking(data, ranking, params, opts);

    std::ofstream out(args.out_path);
    if (!out) throw fairsel::DataError("cannot write file: " + args.out_path);
    write_fraction_csv(out, rows);
    print_best_per_metric(rows, want_utility);

    fairsel::RunManifest manifest;
    manifest.source = source;
    const fs::path manifest_out = sibling(args.out_path, ".manifest.json");
    manifest.outputs = {args.out_path, manifest_out.string()};
    manifest.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json command{{"name", "evaluate"},
                 {"selection", args.selection_path},
                 {"fractions", params.fractions},
                 {"restarts", params.restarts},
                 {"seed", params.seed},
                 {"metrics", args.metrics}};
    if (params.clusters > 0) command["clusters"] = params.clusters;
    if (params.group_threshold) command["group_threshold"] = *params.group_threshold;
    write_manifest(manifest_out, manifest, command);
    return 0;
}

// ------------------------------------------------------------- gradcheck --

struct GradcheckArgs {
    int d = 8;
    int n = 15;
    int p = 1;
    std::uint64_t seed = 11;
    double epsilon = 1e-5;
    double alpha = 1.0;
    double beta = 0.1;
};

int run_gradcheck(const GradcheckArgs& args) {
    if (args.d < 1 || args.n < 2 || args.p < 1)
        throw fairsel::ConfigError("gradcheck needs d >= 1, n >= 2, p >= 1");
    if (args.epsilon <= 0.0) throw fairsel::ConfigError("epsilon must be > 0");

    std::mt19937_64 rng(args.seed);
    fairsel::Dataset data;
    data.x.resize(args.d, args.n);
    data.p_mat.resize(args.p, args.n);
    for (Eigen::Index j = 0; j < args.n; ++j) {
        for (Eigen::Index i = 0; i < args.d; ++i) data.x(i, j) = fairsel::standard_normal(rng);
        for (Eigen::Index i = 0; i < args.p; ++i) data.p_mat(i, j) = fairsel::standard_normal(rng);
    }
    fairsel::IndicatorPair pair;
    pair.m.resize(args.d);
    pair.g.resize(args.d);
    for (Eigen::Index i = 0; i < args.d; ++i) pair.m(i) = 0.1 + 0.8 * fairsel::uniform01(rng);
    for (Eigen::Index i = 0; i < args.d; ++i) pair.g(i) = 0.1 + 0.8 * fairsel::uniform01(rng);

    fairsel::FufsConfig cfg;
    cfg.alpha = args.alpha;
    cfg.beta = args.beta;
    const fairsel::KernelCache cache = fairsel::make_kernel_cache(data, cfg);
    const auto [gm, gg] = fairsel::gradient(data, pair, cfg, cache);

    auto objective_at = [&](const fairsel::IndicatorPair& at) {
        return fairsel::objective(data, at, cfg, cache).total;
    };
    auto rel_err = [](double analytic, double fd) {
        return std::abs(analytic - fd) / std::max({1.0, std::abs(analytic), std::abs(fd)});
    };

    double max_rel = 0.0;
    std::string worst = "none";
    for (Eigen::Index i = 0; i < args.d; ++i) {
        for (const bool is_m : {true, false}) {
            fairsel::IndicatorPair plus = pair, minus = pair;
            (is_m ? plus.m(i) : plus.g(i)) += args.epsilon;
            (is_m ? minus.m(i) : minus.g(i)) -= args.epsilon;
            const double fd = (objective_at(plus) - objective_at(minus)) / (2.0 * args.epsilon);
            const double analytic = is_m ? gm(i) : gg(i);
            const double err = rel_err(analytic, fd);
            if (err > max_rel) {
                max_rel = err;
                worst = std::string(is_m ? "m[" : "g[") + std::to_string(i) + "]";
            }
        }
    }

    std::cout << "max relative error " << max_rel << " (worst coordinate " << worst << ")\n";
    if (max_rel >= 1e-4) {
        std::cerr << "gradcheck failed at " << worst << ": relative error " << max_rel << '\n';
        return 3;
    }
    return 0;
}

// ----------------------------------------------------------------- sweep --

struct SweepArgs {
    SourceFlags source;
    std::string config_path;
    std::string out_path = "sweep.csv";
    std::vector<double> alpha_grid;
    std::vector<double> beta_grid;
    double fixed_alpha = 1.0;
    double fixed_beta = 0.1;
    EvalParams params;
    bool ablate_g = false;
    CLI::App* cmd = nullptr;
};

struct SweepRow {
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<FractionRow> fractions;
};

int run_sweep(const SweepArgs& args) {
    const auto start = std::chrono::steady_clock::now();
    if (args.params.fractions.empty()) throw fairsel::ConfigError("empty fraction grid");

    std::vector<std::pair<double, double>> points;
    for (const double alpha : args.alpha_grid) points.emplace_back(alpha, args.fixed_beta);
    for (const double beta : args.beta_grid) points.emplace_back(args.fixed_alpha, beta);
    if (points.empty())
        throw fairsel::ConfigError("empty grid: pass --alpha-grid and/or --beta-grid");
    std::sort(points.begin(), points.end());

    fairsel::FufsConfig base;
    if (!args.config_path.empty())
        fairsel::apply_config_json(base, fairsel::read_json_file(args.config_path));
    if (args.cmd->count("--seed")) base.seed = args.params.seed;

    const fairsel::DataSource source = source_from_flags(args.source);
    const fairsel::Dataset data = fairsel::load_from_source(source);
    for (const auto& warning : base.validate(data.d()))
        std::cerr << "warning: " << warning << '\n';

    fairsel::EvalOptions opts;
    opts.utility = data.labels.has_value();
    opts.group_threshold = args.params.group_threshold;

    auto run_grid = [&](bool ablated) {
        std::vector<SweepRow> rows(points.size());
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        std::exception_ptr error;
        std::mutex error_mutex;

        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < points.size(); i = next.fetch_add(1)) {
                if (failed.load()) return;
                try {
                    fairsel::FufsConfig cfg = base;
                    cfg.alpha = points[i].first;
                    cfg.beta = points[i].second;
                    cfg.ablate_g = ablated;
                    const fairsel::SelectionResult result = fairsel::optimize(data, cfg);
                    const std::vector<int> ranking = fairsel::rank_by_score(result.indicators.m);
                    rows[i] = {points[i].first, points[i].second,
                               evaluate_ranking(data, ranking, args.params, opts)};
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed.store(true);
                    return;
                }
            }
        };

        const int threads = thread_budget(points.size());
        if (threads <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }
        if (error) std::rethrow_exception(error);
        return rows;
    };

    auto write_rows = [](const std::string& path, const std::vector<SweepRow>& rows) {
        std::ofstream out(path);
        if (!out) throw fairsel::DataError("cannot write file: " + path);
        out << "alpha,beta,fraction,acc,nmi,balance,proportion\n";
        for (const auto& row : rows) {
            for (const auto& fr : row.fractions) {
                out << format_value(row.alpha) << ',' << format_value(row.beta) << ','
                    << format_value(fr.fraction) << ','
                    << (fr.report.acc ? format_value(*fr.report.acc) : "") << ','
                    << (fr.report.nmi ? format_value(*fr.report.nmi) : "") << ','
                    << format_value(fr.report.balance) << ','
                    << format_value(fr.report.proportion) << '\n';
            }
        }
    };

    write_rows(args.out_path, run_grid(false));
    std::vector<std::string> outputs{args.out_path};
    if (args.ablate_g) {
        const fs::path ablated_out = sibling(args.out_path, ".ablated.csv");
        write_rows(ablated_out.string(), run_grid(true));
        outputs.push_back(ablated_out.string());
    }

    fairsel::RunManifest manifest;
    manifest.config = base;
    manifest.source = source;
    const fs::path manifest_out = sibling(args.out_path, ".manifest.json");
    outputs.push_back(manifest_out.string());
    manifest.outputs = outputs;
    manifest.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(manifest_out, manifest,
                   json{{"name", "sweep"},
                        {"alpha_grid", args.alpha_grid},
                        {"beta_grid", args.beta_grid},
                        {"fixed_alpha", args.fixed_alpha},
                        {"fixed_beta", args.fixed_beta},
                        {"fractions", args.params.fractions},
                        {"restarts", args.params.restarts},
                        {"seed", args.params.seed},
                        {"ablate_g", args.ablate_g}});
    return 0;
}

// ----------------------------------------------------------------- synth --

struct SynthArgs {
    fairsel::SyntheticSpec spec;
    std::string out_path = "synthetic.csv";
};

int run_synth(const SynthArgs& args) {
    const auto start = std::chrono::steady_clock::now();
    const fairsel::SyntheticDataset synthetic = fairsel::generate_synthetic(args.spec);
    fairsel::write_csv(synthetic.data, args.out_path);

    json roles = json::array();
    for (const auto role : synthetic.roles) roles.push_back(fairsel::to_string(role));
    const fs::path roles_out = sibling(args.out_path, ".roles.json");
    fairsel::write_json_file(roles_out.string(), json{{"roles", roles}});

    fairsel::RunManifest manifest;
    // the emitted CSV holds raw generator output
    manifest.source.synthetic = fairsel::DataSource::Synthetic{args.spec, false};
    const fs::path manifest_out = sibling(args.out_path, ".manifest.json");
    manifest.outputs = {args.out_path, roles_out.string(), manifest_out.string()};
    manifest.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(manifest_out, manifest, json{{"name", "synth"}});

    std::cout << "wrote " << args.out_path << " (" << synthetic.data.d() << " features, "
              << synthetic.data.n() << " instances) and " << roles_out.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fairness-aware unsupervised feature selection via centered kernel alignment"};
    app.require_subcommand(1);

    SelectArgs select_args;
    CLI::App* select = app.add_subcommand("select", "run the selector and write a selection JSON");
    add_source_flags(select, select_args.source);
    select->add_option("--config", select_args.config_path, "config JSON path");
    select->add_option("--manifest", select_args.manifest_path, "replay a run manifest");
    select->add_option("--out", select_args.out_path, "output selection JSON path");
    select->add_option("--alpha", select_args.cfg.alpha, "fairness weight");
    select->add_option("--beta", select_args.cfg.beta, "sparsity weight");
    select->add_option("--k", select_args.cfg.k, "number of features to select");
    select->add_option("--l", select_args.cfg.l, "number of sensitive features to flag");
    select->add_option("--seed", select_args.cfg.seed, "optimizer seed");
    select->add_flag("--ablate-g", select_args.cfg.ablate_g, "disable the decomposition indicator");
    select_args.cmd = select;

    EvaluateArgs eval_args;
    CLI::App* evaluate = app.add_subcommand("evaluate", "evaluate a selection over a fraction grid");
    add_source_flags(evaluate, eval_args.source);
    evaluate->add_option("--selection", eval_args.selection_path, "selection JSON from `select`")
        ->required();
    evaluate->add_option("--out", eval_args.out_path, "output CSV path");
    evaluate->add_option("--fractions", eval_args.params.fractions, "feature fractions to evaluate")
        ->delimiter(',');
    evaluate->add_option("--restarts", eval_args.params.restarts, "k-means restarts")
        ->check(CLI::PositiveNumber);
    evaluate->add_option("--seed", eval_args.params.seed, "k-means seed");
    evaluate->add_option("--clusters", eval_args.params.clusters, "cluster count override");
    evaluate->add_option("--metrics", eval_args.metrics, "subset of acc,nmi,balance,proportion")
        ->delimiter(',');
    evaluate->add_option("--group-threshold", eval_args.group_threshold,
                         "protected-group threshold override");
    eval_args.cmd = evaluate;

    GradcheckArgs grad_args;
    CLI::App* gradcheck =
        app.add_subcommand("gradcheck", "compare analytic gradients against finite differences");
    gradcheck->add_option("--d", grad_args.d, "feature count");
    gradcheck->add_option("--n", grad_args.n, "instance count");
    gradcheck->add_option("--p", grad_args.p, "protected row count");
    gradcheck->add_option("--seed", grad_args.seed, "instance seed");
    gradcheck->add_option("--epsilon", grad_args.epsilon, "finite-difference step");
    gradcheck->add_option("--alpha", grad_args.alpha, "fairness weight");
    gradcheck->add_option("--beta", grad_args.beta, "sparsity weight");

    SweepArgs sweep_args;
    CLI::App* sweep = app.add_subcommand("sweep", "hyperparameter sweep with per-point evaluation");
    add_source_flags(sweep, sweep_args.source);
    sweep->add_option("--config", sweep_args.config_path, "base config JSON path");
    sweep->add_option("--out", sweep_args.out_path, "output CSV path");
    sweep->add_option("--alpha-grid", sweep_args.alpha_grid, "alpha values (beta fixed)")
        ->delimiter(',');
    sweep->add_option("--beta-grid", sweep_args.beta_grid, "beta values (alpha fixed)")
        ->delimiter(',');
    sweep->add_option("--alpha", sweep_args.fixed_alpha, "fixed alpha for the beta grid");
    sweep->add_option("--beta", sweep_args.fixed_beta, "fixed beta for the alpha grid");
    sweep->add_option("--fractions", sweep_args.params.fractions, "feature fractions")
        ->delimiter(',');
    sweep->add_option("--restarts", sweep_args.params.restarts, "k-means restarts")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--seed", sweep_args.params.seed, "optimizer and k-means seed");
    sweep->add_option("--clusters", sweep_args.params.clusters, "cluster count override");
    sweep->add_flag("--ablate-g", sweep_args.ablate_g,
                    "also run with the decomposition indicator disabled");
    sweep_args.cmd = sweep;

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "emit a synthetic dataset CSV plus roles JSON");
    synth->add_option("--synth-n", synth_args.spec.n, "instance count");
    synth->add_option("--synth-utility", synth_args.spec.n_utility, "utility feature count");
    synth->add_option("--synth-sensitive", synth_args.spec.n_sensitive, "sensitive feature count");
    synth->add_option("--synth-noise", synth_args.spec.n_noise, "noise feature count");
    synth->add_option("--synth-separation", synth_args.spec.cluster_separation,
                      "cluster separation");
    synth->add_option("--synth-corr", synth_args.spec.sensitive_correlation,
                      "sensitive/protected correlation");
    synth->add_option("--seed", synth_args.spec.seed, "generator seed");
    synth->add_option("--out", synth_args.out_path, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (select->parsed()) return run_select(select_args);
        if (evaluate->parsed()) return run_evaluate(eval_args);
        if (gradcheck->parsed()) return run_gradcheck(grad_args);
        if (sweep->parsed()) return run_sweep(sweep_args);
        if (synth->parsed()) return run_synth(synth_args);
    } catch (const fairsel::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const fairsel::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const fairsel::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
