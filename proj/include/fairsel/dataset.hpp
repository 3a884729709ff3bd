#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fairsel {

/// Column-per-instance data model: x holds the d non-protected feature rows,
/// p_mat the p protected rows, both over the same n instances. Labels, when
/// present, are contiguous cluster ids 0..c-1 with every id occurring.
struct Dataset {
    Eigen::MatrixXd x;      // d x n
    Eigen::MatrixXd p_mat;  // p x n
    std::optional<Eigen::VectorXi> labels;
    std::vector<std::string> feature_names;    // empty or size d
    std::vector<std::string> protected_names;  // empty or size p

    Eigen::Index d() const { return x.rows(); }
    Eigen::Index n() const { return x.cols(); }
    Eigen::Index p() const { return p_mat.rows(); }

    /// Number of distinct label values (0 when labels are absent).
    int n_clusters() const;

    /// Throws DataError if any structural invariant is violated.
    void validate() const;
};

enum class FeatureRole { utility, sensitive, noise };

std::string to_string(FeatureRole role);

/// Recipe for a synthetic dataset with known fair/unfair feature structure:
/// two balanced clusters, a binary protected attribute independent of them,
/// and utility / sensitive / noise feature blocks.
struct SyntheticSpec {
    int n = 100;
    int n_utility = 10;
    int n_sensitive = 10;
    int n_noise = 10;
    double cluster_separation = 3.0;
    double sensitive_correlation = 0.9;
    std::uint64_t seed = 0;

    int d() const { return n_utility + n_sensitive + n_noise; }
    void validate() const;
};

struct SyntheticDataset {
    Dataset data;
    std::vector<FeatureRole> roles;  // size d, true role of each feature row
};

/// Loads a CSV with a header row, one instance per row. Columns named in
/// `protected_columns` populate p_mat (categorical ones are one-hot encoded,
/// one row per category); `label_column`, when given, is mapped to contiguous
/// cluster ids. All other columns become feature rows of x. With standardize,
/// every feature row of x and p_mat is z-scored (zero-variance rows are left
/// at zero after centering).
Dataset load_csv(const std::string& path,
                 const std::vector<std::string>& protected_columns,
                 const std::optional<std::string>& label_column = std::nullopt,
                 bool standardize = true);

/// Writes the dataset back to CSV (instances as rows) with enough precision
/// for an exact reload round trip.
void write_csv(const Dataset& data, const std::string& path);

/// Deterministic synthetic generator; see SyntheticSpec.
///   utility_i   = (cluster ? +1 : -1) * separation/2 + N(0,1)
///   sensitive_i = corr * (protected ? +1 : -1) + (1 - corr) * N(0,1)
///   noise_i     = N(0,1)
SyntheticDataset generate_synthetic(const SyntheticSpec& spec);

/// Standardize each row to mean 0, standard deviation 1 (population
/// convention). Rows with zero variance end up all zero.
void standardize_rows(Eigen::MatrixXd& mat);

}  // namespace fairsel
