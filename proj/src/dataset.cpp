#include "fairsel/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fairsel/errors.hpp"
#include "fairsel/rng.hpp"

namespace fairsel {

int Dataset::n_clusters() const {
    if (!labels) return 0;
    return labels->size() == 0 ? 0 : labels->maxCoeff() + 1;
}

void Dataset::validate() const {
    if (x.rows() < 1) throw DataError("dataset: need at least one feature row");
    if (p_mat.rows() < 1) throw DataError("dataset: need at least one protected row");
    if (x.cols() != p_mat.cols())
        throw DataError("dataset: x and p_mat disagree on instance count");
    if (x.cols() < 2) throw DataError("dataset: need at least 2 instances");
    if (!x.allFinite() || !p_mat.allFinite())
        throw DataError("dataset: non-finite entries");
    if (!feature_names.empty() && static_cast<Eigen::Index>(feature_names.size()) != x.rows())
        throw DataError("dataset: feature_names length mismatch");
    if (!protected_names.empty() && static_cast<Eigen::Index>(protected_names.size()) != p_mat.rows())
        throw DataError("dataset: protected_names length mismatch");
    if (labels) {
        if (labels->size() != x.cols()) throw DataError("dataset: labels length mismatch");
        const int c = labels->maxCoeff() + 1;
        std::vector<bool> seen(static_cast<std::size_t>(c), false);
        for (Eigen::Index i = 0; i < labels->size(); ++i) {
            const int v = (*labels)(i);
            if (v < 0) throw DataError("dataset: negative cluster id");
            seen[static_cast<std::size_t>(v)] = true;
        }
        if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
            throw DataError("dataset: cluster ids must cover 0..c-1");
    }
}

std::string to_string(FeatureRole role) {
    switch (role) {
        case FeatureRole::utility: return "utility";
        case FeatureRole::sensitive: return "sensitive";
        case FeatureRole::noise: return "noise";
    }
    return "unknown";
}

void SyntheticSpec::validate() const {
    if (n < 4) throw ConfigError("synthetic: n must be >= 4");
    if (n_utility < 0 || n_sensitive < 0 || n_noise < 0)
        throw ConfigError("synthetic: feature counts must be non-negative");
    if (d() < 2) throw ConfigError("synthetic: total feature count must be >= 2");
    if (cluster_separation <= 0.0) throw ConfigError("synthetic: cluster_separation must be > 0");
    if (sensitive_correlation < 0.0 || sensitive_correlation > 1.0)
        throw ConfigError("synthetic: sensitive_correlation must lie in [0,1]");
}

void standardize_rows(Eigen::MatrixXd& mat) {
    const double n = static_cast<double>(mat.cols());
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
        auto row = mat.row(r);
        row.array() -= row.mean();
        const double sd = std::sqrt(row.squaredNorm() / n);
        if (sd > 0.0) row /= sd;
    }
}

namespace {

struct Cell {
    std::string text;
    bool numeric = false;
    double value = 0.0;
};

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

Cell parse_cell(const std::string& raw) {
    Cell c;
    c.text = trim(raw);
    if (c.text.empty()) return c;
    const char* begin = c.text.data();
    const char* end = begin + c.text.size();
    auto [ptr, ec] = std::from_chars(begin, end, c.value);
    c.numeric = (ec == std::errc() && ptr == end && std::isfinite(c.value));
    return c;
}

}  // namespace

Dataset load_csv(const std::string& path,
                 const std::vector<std::string>& protected_columns,
                 const std::optional<std::string>& label_column,
                 bool standardize) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    std::vector<std::string> header = split_line(line);
    for (auto& h : header) h = trim(h);

    auto column_index = [&](const std::string& name) -> int {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw DataError("unknown column name: " + name);
        return static_cast<int>(it - header.begin());
    };

    std::vector<int> protected_idx;
    for (const auto& name : protected_columns) protected_idx.push_back(column_index(name));
    std::optional<int> label_idx;
    if (label_column) label_idx = column_index(*label_column);

    std::vector<std::vector<Cell>> rows;
    int file_row = 1;  // header was row 1
    while (std::getline(in, line)) {
        ++file_row;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields = split_line(line);
        if (fields.size() != header.size())
            throw DataError("row " + std::to_string(file_row) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        std::vector<Cell> cells;
        cells.reserve(fields.size());
        for (const auto& f : fields) cells.push_back(parse_cell(f));
        rows.push_back(std::move(cells));
    }

    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    if (n < 2) throw DataError("fewer than 2 instances in " + path);

    auto is_protected = [&](int col) {
        return std::find(protected_idx.begin(), protected_idx.end(), col) != protected_idx.end();
    };

    Dataset out;

    // Non-protected feature columns, in header order.
    std::vector<int> feature_cols;
    for (int col = 0; col < static_cast<int>(header.size()); ++col) {
        if (is_protected(col) || (label_idx && col == *label_idx)) continue;
        feature_cols.push_back(col);
    }
    if (feature_cols.empty()) throw DataError("no non-protected feature columns in " + path);

    out.x.resize(static_cast<Eigen::Index>(feature_cols.size()), n);
    for (std::size_t r = 0; r < feature_cols.size(); ++r) {
        const int col = feature_cols[r];
        out.feature_names.push_back(header[static_cast<std::size_t>(col)]);
        for (Eigen::Index i = 0; i < n; ++i) {
            const Cell& cell = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)];
            if (!cell.numeric)
                throw DataError("non-numeric cell '" + cell.text + "' at row " +
                                std::to_string(i + 2) + ", column '" +
                                header[static_cast<std::size_t>(col)] + "'");
            out.x(static_cast<Eigen::Index>(r), i) = cell.value;
        }
    }

    // Protected columns: numeric ones map to a single row, categorical ones
    // are one-hot encoded with one row per distinct value.
    std::vector<Eigen::VectorXd> protected_rows;
    for (const int col : protected_idx) {
        const std::string& name = header[static_cast<std::size_t>(col)];
        bool all_numeric = true;
        for (Eigen::Index i = 0; i < n; ++i)
            all_numeric &= rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)].numeric;

        if (all_numeric) {
            Eigen::VectorXd row(n);
            for (Eigen::Index i = 0; i < n; ++i)
                row(i) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)].value;
            protected_rows.push_back(std::move(row));
            out.protected_names.push_back(name);
        } else {
            std::set<std::string> categories;
            for (Eigen::Index i = 0; i < n; ++i)
                categories.insert(rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)].text);
            for (const auto& cat : categories) {
                Eigen::VectorXd row(n);
                for (Eigen::Index i = 0; i < n; ++i)
                    row(i) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)].text == cat
                                 ? 1.0
                                 : 0.0;
                protected_rows.push_back(std::move(row));
                out.protected_names.push_back(name + "=" + cat);
            }
        }
    }
    out.p_mat.resize(static_cast<Eigen::Index>(protected_rows.size()), n);
    for (std::size_t r = 0; r < protected_rows.size(); ++r)
        out.p_mat.row(static_cast<Eigen::Index>(r)) = protected_rows[r].transpose();

    if (label_idx) {
        std::map<double, int> distinct;  // sorted value -> contiguous id
        std::vector<double> raw(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            const Cell& cell = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(*label_idx)];
            if (!cell.numeric)
                throw DataError("non-numeric cell '" + cell.text + "' at row " +
                                std::to_string(i + 2) + ", column '" + *label_column + "'");
            raw[static_cast<std::size_t>(i)] = cell.value;
            distinct.emplace(cell.value, 0);
        }
        int next = 0;
        for (auto& [value, id] : distinct) id = next++;
        Eigen::VectorXi labels(n);
        for (Eigen::Index i = 0; i < n; ++i)
            labels(i) = distinct.at(raw[static_cast<std::size_t>(i)]);
        out.labels = std::move(labels);
    }

    if (standardize) {
        standardize_rows(out.x);
        standardize_rows(out.p_mat);
    }

    out.validate();
    return out;
}

void write_csv(const Dataset& data, const std::string& path) {
    std::ofstream outfile(path);
    if (!outfile) throw DataError("cannot write file: " + path);
    outfile.precision(17);

    std::vector<std::string> feature_names = data.feature_names;
    if (feature_names.empty())
        for (Eigen::Index i = 0; i < data.d(); ++i)
            feature_names.push_back("f" + std::to_string(i));
    std::vector<std::string> protected_names = data.protected_names;
    if (protected_names.empty())
        for (Eigen::Index i = 0; i < data.p(); ++i)
            protected_names.push_back("protected_" + std::to_string(i));

    for (std::size_t i = 0; i < feature_names.size(); ++i) {
        if (i) outfile << ',';
        outfile << feature_names[i];
    }
    for (const auto& name : protected_names) outfile << ',' << name;
    if (data.labels) outfile << ",label";
    outfile << '\n';

    for (Eigen::Index i = 0; i < data.n(); ++i) {
        for (Eigen::Index r = 0; r < data.d(); ++r) {
            if (r) outfile << ',';
            outfile << data.x(r, i);
        }
        for (Eigen::Index r = 0; r < data.p(); ++r) outfile << ',' << data.p_mat(r, i);
        if (data.labels) outfile << ',' << (*data.labels)(i);
        outfile << '\n';
    }
    if (!outfile) throw DataError("write failed: " + path);
}

SyntheticDataset generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);

    const Eigen::Index n = spec.n;
    const Eigen::Index d = spec.d();

    // Two balanced clusters; binary protected attribute as a shuffled exact
    // half split, independent of the cluster labels.
    Eigen::VectorXi labels(n);
    for (Eigen::Index i = 0; i < n; ++i) labels(i) = i < (n + 1) / 2 ? 0 : 1;

    std::vector<int> prot(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) prot[static_cast<std::size_t>(i)] = i < (n + 1) / 2 ? 0 : 1;
    for (Eigen::Index i = n - 1; i > 0; --i) {
        const auto j = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(i + 1)));
        std::swap(prot[static_cast<std::size_t>(i)], prot[static_cast<std::size_t>(j)]);
    }

    SyntheticDataset out;
    out.data.x.resize(d, n);
    out.data.p_mat.resize(1, n);
    for (Eigen::Index i = 0; i < n; ++i) out.data.p_mat(0, i) = prot[static_cast<std::size_t>(i)];
    out.data.labels = labels;

    Eigen::Index row = 0;
    for (int f = 0; f < spec.n_utility; ++f, ++row) {
        out.roles.push_back(FeatureRole::utility);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double mean = (labels(i) == 0 ? -0.5 : 0.5) * spec.cluster_separation;
            out.data.x(row, i) = mean + standard_normal(rng);
        }
    }
    for (int f = 0; f < spec.n_sensitive; ++f, ++row) {
        out.roles.push_back(FeatureRole::sensitive);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double signal = prot[static_cast<std::size_t>(i)] == 0 ? -1.0 : 1.0;
            out.data.x(row, i) = spec.sensitive_correlation * signal +
                                 (1.0 - spec.sensitive_correlation) * standard_normal(rng);
        }
    }
    for (int f = 0; f < spec.n_noise; ++f, ++row) {
        out.roles.push_back(FeatureRole::noise);
        for (Eigen::Index i = 0; i < n; ++i) out.data.x(row, i) = standard_normal(rng);
    }

    for (Eigen::Index i = 0; i < d; ++i)
        out.data.feature_names.push_back(to_string(out.roles[static_cast<std::size_t>(i)]) + "_" +
                                         std::to_string(i));
    out.data.protected_names.push_back("protected");

    out.data.validate();
    return out;
}

}  // namespace fairsel
