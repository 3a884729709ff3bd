#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "fairsel/dataset.hpp"

namespace fairsel {

struct ClusterAssignment {
    Eigen::VectorXi labels;  // n entries in 0..c-1, every cluster non-empty
    double inertia = 0.0;
};

struct RestartMetrics {
    std::optional<double> acc;
    std::optional<double> nmi;
    double balance = 0.0;
    double proportion = 0.0;
};

/// Metric means over k-means restarts. acc/nmi are present only when ground
/// truth labels were available.
struct EvalReport {
    std::optional<double> acc;
    std::optional<double> nmi;
    double balance = 0.0;
    double proportion = 0.0;
    int restarts = 0;
    std::vector<RestartMetrics> per_restart;
};

/// Lloyd's algorithm with k-means++ seeding, one independent RNG substream
/// per restart index. Runs to an assignment fixpoint or 300 iterations; an
/// empty cluster is repaired by reseeding it with the point farthest from its
/// centroid. Columns of `points` are instances.
std::vector<ClusterAssignment> kmeans(const Eigen::MatrixXd& points, int c, int restarts,
                                      std::uint64_t seed);

/// Clustering accuracy: best one-to-one cluster-to-class matching on the
/// confusion matrix (Hungarian assignment), as a fraction of n.
double clustering_accuracy(const Eigen::VectorXi& pred, const Eigen::VectorXi& truth);

/// Mutual information of the two partitions normalized by the arithmetic mean
/// of their entropies. 1 for identical partitions, 0 for independent ones.
double normalized_mutual_information(const Eigen::VectorXi& pred, const Eigen::VectorXi& truth);

/// Minimum protected-group fraction over all clusters: higher is fairer.
double balance(const Eigen::VectorXi& pred, const Eigen::VectorXi& groups);

/// Sum over clusters of the dominant group's fraction: lower is fairer.
double proportion(const Eigen::VectorXi& pred, const Eigen::VectorXi& groups);

/// Group labels from a protected row: values used directly when there are at
/// most two distinct ones, otherwise a threshold split (median by default).
Eigen::VectorXi discretize_protected(const Eigen::VectorXd& row,
                                     std::optional<double> threshold = std::nullopt);

struct EvalOptions {
    bool utility = true;   // acc/nmi (requires dataset labels)
    bool fairness = true;  // balance/proportion
    std::optional<double> group_threshold;
};

/// Restricts x to the selected feature rows, clusters with `restarts` k-means
/// runs and averages the per-restart metrics. Groups come from the first
/// protected row.
EvalReport evaluate_selection(const Dataset& data, const std::vector<int>& selected, int c,
                              int restarts, std::uint64_t seed, const EvalOptions& opts = {});

}  // namespace fairsel
