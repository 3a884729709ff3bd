#include "fairsel/io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

#include "fairsel/errors.hpp"

namespace fairsel {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& known, const char* what) {
    for (const auto& [key, value] : j.items())
        if (!known.count(key))
            throw ConfigError(std::string(what) + ": unknown key '" + key + "'");
}

json kernel_to_json(const KernelSpec& spec) {
    json j;
    j["family"] = spec.family == KernelFamily::rbf ? "rbf" : "linear";
    if (spec.fixed_bandwidth)
        j["bandwidth"] = *spec.fixed_bandwidth;
    else
        j["bandwidth"] = "median_heuristic";
    return j;
}

KernelSpec kernel_from_json(const json& j) {
    reject_unknown_keys(j, {"family", "bandwidth"}, "kernel");
    KernelSpec spec;
    if (j.contains("family")) {
        const std::string family = j.at("family").get<std::string>();
        if (family == "rbf")
            spec.family = KernelFamily::rbf;
        else if (family == "linear")
            spec.family = KernelFamily::linear;
        else
            throw ConfigError("kernel: unknown family '" + family + "'");
    }
    if (j.contains("bandwidth")) {
        const json& b = j.at("bandwidth");
        if (b.is_string()) {
            if (b.get<std::string>() != "median_heuristic")
                throw ConfigError("kernel: unknown bandwidth '" + b.get<std::string>() + "'");
        } else if (b.is_number()) {
            spec.fixed_bandwidth = b.get<double>();
        } else {
            throw ConfigError("kernel: bandwidth must be a number or 'median_heuristic'");
        }
    }
    return spec;
}

json breakdown_to_json(const ObjectiveBreakdown& b) {
    return json{{"utility_term", b.utility_term},
                {"fairness_m_term", b.fairness_m_term},
                {"fairness_g_term", b.fairness_g_term},
                {"sparsity_term", b.sparsity_term},
                {"total", b.total}};
}

ObjectiveBreakdown breakdown_from_json(const json& j) {
    ObjectiveBreakdown b;
    b.utility_term = j.at("utility_term").get<double>();
    b.fairness_m_term = j.at("fairness_m_term").get<double>();
    b.fairness_g_term = j.at("fairness_g_term").get<double>();
    b.sparsity_term = j.at("sparsity_term").get<double>();
    b.total = j.at("total").get<double>();
    return b;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

json config_to_json(const FufsConfig& cfg) {
    json j;
    j["alpha"] = cfg.alpha;
    j["beta"] = cfg.beta;
    j["k"] = cfg.k;
    j["l"] = cfg.l;
    j["eta"] = cfg.eta;
    j["step_policy"] = cfg.step_policy == StepPolicy::fixed ? "fixed" : "backtracking";
    j["max_iter"] = cfg.max_iter;
    j["tol"] = cfg.tol;
    j["seed"] = cfg.seed;
    j["kernel"] = kernel_to_json(cfg.kernel);
    j["init"] = cfg.init == InitPolicy::uniform_half ? "uniform_half" : "seeded_random";
    j["ablate_g"] = cfg.ablate_g;
    return j;
}

void apply_config_json(FufsConfig& cfg, const json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    reject_unknown_keys(j,
                        {"alpha", "beta", "k", "l", "eta", "step_policy", "max_iter", "tol",
                         "seed", "kernel", "init", "ablate_g"},
                        "config");
    try {
        if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
        if (j.contains("beta")) cfg.beta = j.at("beta").get<double>();
        if (j.contains("k")) cfg.k = j.at("k").get<int>();
        if (j.contains("l")) cfg.l = j.at("l").get<int>();
        if (j.contains("eta")) cfg.eta = j.at("eta").get<double>();
        if (j.contains("step_policy")) {
            const std::string policy = j.at("step_policy").get<std::string>();
            if (policy == "fixed")
                cfg.step_policy = StepPolicy::fixed;
            else if (policy == "backtracking")
                cfg.step_policy = StepPolicy::backtracking;
            else
                throw ConfigError("config: unknown step_policy '" + policy + "'");
        }
        if (j.contains("max_iter")) cfg.max_iter = j.at("max_iter").get<int>();
        if (j.contains("tol")) cfg.tol = j.at("tol").get<double>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("kernel")) cfg.kernel = kernel_from_json(j.at("kernel"));
        if (j.contains("init")) {
            const std::string init = j.at("init").get<std::string>();
            if (init == "uniform_half")
                cfg.init = InitPolicy::uniform_half;
            else if (init == "seeded_random")
                cfg.init = InitPolicy::seeded_random;
            else
                throw ConfigError("config: unknown init '" + init + "'");
        }
        if (j.contains("ablate_g")) cfg.ablate_g = j.at("ablate_g").get<bool>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

FufsConfig config_from_json(const json& j) {
    FufsConfig cfg;
    apply_config_json(cfg, j);
    return cfg;
}

json synthetic_to_json(const SyntheticSpec& spec) {
    return json{{"n", spec.n},
                {"n_utility", spec.n_utility},
                {"n_sensitive", spec.n_sensitive},
                {"n_noise", spec.n_noise},
                {"cluster_separation", spec.cluster_separation},
                {"sensitive_correlation", spec.sensitive_correlation},
                {"seed", spec.seed}};
}

SyntheticSpec synthetic_from_json(const json& j) {
    reject_unknown_keys(j,
                        {"n", "n_utility", "n_sensitive", "n_noise", "cluster_separation",
                         "sensitive_correlation", "seed"},
                        "synthetic");
    SyntheticSpec spec;
    try {
        if (j.contains("n")) spec.n = j.at("n").get<int>();
        if (j.contains("n_utility")) spec.n_utility = j.at("n_utility").get<int>();
        if (j.contains("n_sensitive")) spec.n_sensitive = j.at("n_sensitive").get<int>();
        if (j.contains("n_noise")) spec.n_noise = j.at("n_noise").get<int>();
        if (j.contains("cluster_separation"))
            spec.cluster_separation = j.at("cluster_separation").get<double>();
        if (j.contains("sensitive_correlation"))
            spec.sensitive_correlation = j.at("sensitive_correlation").get<double>();
        if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("synthetic: ") + e.what());
    }
    return spec;
}

json source_to_json(const DataSource& source) {
    json j;
    if (source.csv) {
        json c;
        c["path"] = source.csv->path;
        c["protected_columns"] = source.csv->protected_columns;
        if (source.csv->label_column)
            c["label_column"] = *source.csv->label_column;
        else
            c["label_column"] = nullptr;
        c["standardize"] = source.csv->standardize;
        j["csv"] = c;
    }
    if (source.synthetic) {
        json s = synthetic_to_json(source.synthetic->spec);
        s["standardize"] = source.synthetic->standardize;
        j["synthetic"] = std::move(s);
    }
    return j;
}

DataSource source_from_json(const json& j) {
    DataSource source;
    reject_unknown_keys(j, {"csv", "synthetic"}, "dataset");
    if (j.contains("csv")) {
        const json& c = j.at("csv");
        DataSource::Csv csv;
        csv.path = c.at("path").get<std::string>();
        csv.protected_columns = c.at("protected_columns").get<std::vector<std::string>>();
        if (c.contains("label_column") && !c.at("label_column").is_null())
            csv.label_column = c.at("label_column").get<std::string>();
        if (c.contains("standardize")) csv.standardize = c.at("standardize").get<bool>();
        source.csv = std::move(csv);
    }
    if (j.contains("synthetic")) {
        json s = j.at("synthetic");
        DataSource::Synthetic synthetic;
        if (s.contains("standardize")) {
            synthetic.standardize = s.at("standardize").get<bool>();
            s.erase("standardize");
        }
        synthetic.spec = synthetic_from_json(s);
        source.synthetic = synthetic;
    }
    if (!source.csv && !source.synthetic)
        throw ConfigError("dataset: need either 'csv' or 'synthetic'");
    if (source.csv && source.synthetic)
        throw ConfigError("dataset: 'csv' and 'synthetic' are mutually exclusive");
    return source;
}

json selection_to_json(const SelectionResult& result) {
    json j;
    j["m"] = to_std(result.indicators.m);
    j["g"] = to_std(result.indicators.g);
    j["selected"] = result.selected;
    j["flagged_sensitive"] = result.flagged_sensitive;
    json traj = json::array();
    for (const auto& b : result.trajectory) traj.push_back(breakdown_to_json(b));
    j["trajectory"] = std::move(traj);
    j["iterations"] = result.iterations;
    j["converged"] = result.converged;
    return j;
}

SelectionResult selection_from_json(const json& j) {
    SelectionResult result;
    try {
        result.indicators.m = to_eigen(j.at("m").get<std::vector<double>>());
        result.indicators.g = to_eigen(j.at("g").get<std::vector<double>>());
        result.selected = j.at("selected").get<std::vector<int>>();
        result.flagged_sensitive = j.at("flagged_sensitive").get<std::vector<int>>();
        for (const auto& entry : j.at("trajectory"))
            result.trajectory.push_back(breakdown_from_json(entry));
        result.iterations = j.at("iterations").get<int>();
        result.converged = j.at("converged").get<bool>();
    } catch (const json::exception& e) {
        throw DataError(std::string("selection json: ") + e.what());
    }
    return result;
}

json report_to_json(const EvalReport& report) {
    json j;
    if (report.acc) j["acc"] = *report.acc;
    if (report.nmi) j["nmi"] = *report.nmi;
    j["balance"] = report.balance;
    j["proportion"] = report.proportion;
    j["restarts"] = report.restarts;
    json per = json::array();
    for (const auto& metrics : report.per_restart) {
        json m;
        if (metrics.acc) m["acc"] = *metrics.acc;
        if (metrics.nmi) m["nmi"] = *metrics.nmi;
        m["balance"] = metrics.balance;
        m["proportion"] = metrics.proportion;
        per.push_back(std::move(m));
    }
    j["per_restart"] = std::move(per);
    return j;
}

json manifest_to_json(const RunManifest& manifest) {
    json snapshot = config_to_json(manifest.config);
    snapshot["dataset"] = source_to_json(manifest.source);
    return json{{"config_snapshot", std::move(snapshot)},
                {"tool_version", manifest.tool_version},
                {"wall_time_seconds", manifest.wall_time_seconds},
                {"outputs", manifest.outputs}};
}

RunManifest manifest_from_json(const json& j) {
    RunManifest manifest;
    try {
        json snapshot = j.at("config_snapshot");
        manifest.source = source_from_json(snapshot.at("dataset"));
        snapshot.erase("dataset");
        manifest.config = config_from_json(snapshot);
        manifest.tool_version = j.value("tool_version", std::string(kToolVersion));
        manifest.wall_time_seconds = j.value("wall_time_seconds", 0.0);
        if (j.contains("outputs")) manifest.outputs = j.at("outputs").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("manifest: ") + e.what());
    }
    return manifest;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw DataError("write failed: " + path);
}

Dataset load_from_source(const DataSource& source, std::vector<FeatureRole>* roles) {
    if (source.synthetic) {
        SyntheticDataset synthetic = generate_synthetic(source.synthetic->spec);
        if (roles) *roles = synthetic.roles;
        if (source.synthetic->standardize) {
            standardize_rows(synthetic.data.x);
            standardize_rows(synthetic.data.p_mat);
        }
        return std::move(synthetic.data);
    }
    if (roles) roles->clear();
    const auto& csv = *source.csv;
    return load_csv(csv.path, csv.protected_columns, csv.label_column, csv.standardize);
}

}  // namespace fairsel
