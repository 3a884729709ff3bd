#include "fairsel/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "fairsel/errors.hpp"
#include "fairsel/rng.hpp"

namespace fairsel {

namespace {

constexpr int kMaxLloydIterations = 300;

Eigen::VectorXi assign_to_nearest(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centroids) {
    const Eigen::Index n = points.cols();
    Eigen::VectorXi assign(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        int best_c = 0;
        for (Eigen::Index c = 0; c < centroids.cols(); ++c) {
            const double dist = (points.col(i) - centroids.col(c)).squaredNorm();
            if (dist < best) {
                best = dist;
                best_c = static_cast<int>(c);
            }
        }
        assign(i) = best_c;
    }
    return assign;
}

Eigen::MatrixXd kmeanspp_seed(const Eigen::MatrixXd& points, int c, std::mt19937_64& rng) {
    const Eigen::Index n = points.cols();
    Eigen::MatrixXd centroids(points.rows(), c);
    centroids.col(0) = points.col(static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(n))));

    Eigen::VectorXd dist_sq =
        (points.colwise() - centroids.col(0)).colwise().squaredNorm().transpose();
    for (int t = 1; t < c; ++t) {
        const double total = dist_sq.sum();
        Eigen::Index chosen;
        if (total <= 0.0) {
            chosen = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(n)));
        } else {
            const double r = uniform01(rng) * total;
            double acc = 0.0;
            chosen = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += dist_sq(i);
                if (acc >= r) {
                    chosen = i;
                    break;
                }
            }
        }
        centroids.col(t) = points.col(chosen);
        dist_sq = dist_sq.cwiseMin(
            (points.colwise() - centroids.col(t)).colwise().squaredNorm().transpose());
    }
    return centroids;
}

ClusterAssignment lloyd(const Eigen::MatrixXd& points, int c, std::mt19937_64& rng) {
    const Eigen::Index n = points.cols();
    Eigen::MatrixXd centroids = kmeanspp_seed(points, c, rng);
    Eigen::VectorXi assign = assign_to_nearest(points, centroids);

    for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
        // Recompute centroids.
        centroids.setZero();
        Eigen::VectorXi counts = Eigen::VectorXi::Zero(c);
        for (Eigen::Index i = 0; i < n; ++i) {
            centroids.col(assign(i)) += points.col(i);
            counts(assign(i)) += 1;
        }
        for (int k = 0; k < c; ++k)
            if (counts(k) > 0) centroids.col(k) /= static_cast<double>(counts(k));

        // Repair empty clusters with the point farthest from its centroid.
        for (int k = 0; k < c; ++k) {
            if (counts(k) > 0) continue;
            double worst = -1.0;
            Eigen::Index worst_i = -1;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (counts(assign(i)) <= 1) continue;  // do not empty another cluster
                const double dist = (points.col(i) - centroids.col(assign(i))).squaredNorm();
                if (dist > worst) {
                    worst = dist;
                    worst_i = i;
                }
            }
            if (worst_i < 0) continue;  // only singleton clusters left
            counts(assign(worst_i)) -= 1;
            assign(worst_i) = k;
            counts(k) = 1;
            centroids.col(k) = points.col(worst_i);
        }

        const Eigen::VectorXi next = assign_to_nearest(points, centroids);
        if (next == assign) break;
        assign = next;
    }

    // Inertia against the final centroids.
    centroids.setZero();
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(c);
    for (Eigen::Index i = 0; i < n; ++i) {
        centroids.col(assign(i)) += points.col(i);
        counts(assign(i)) += 1;
    }
    for (int k = 0; k < c; ++k)
        if (counts(k) > 0) centroids.col(k) /= static_cast<double>(counts(k));
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        inertia += (points.col(i) - centroids.col(assign(i))).squaredNorm();

    return {std::move(assign), inertia};
}

// Max-sum assignment on a square score matrix (Hungarian algorithm, potential
// form). Returns the column matched to each row.
std::vector<int> hungarian_max(const Eigen::MatrixXd& score) {
    const int n = static_cast<int>(score.rows());
    const double big = score.cwiseAbs().maxCoeff() + 1.0;
    // Minimize cost = big - score with the classic O(n^3) potentials method
    // (1-indexed internals).
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0),
        v(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> match(static_cast<std::size_t>(n) + 1, 0),
        way(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n) + 1,
                                 std::numeric_limits<double>::infinity());
        std::vector<bool> used(static_cast<std::size_t>(n) + 1, false);
        do {
            used[static_cast<std::size_t>(j0)] = true;
            const int i0 = match[static_cast<std::size_t>(j0)];
            double delta = std::numeric_limits<double>::infinity();
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur = (big - score(i0 - 1, j - 1)) - u[static_cast<std::size_t>(i0)] -
                                   v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (match[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= n; ++j)
        if (match[static_cast<std::size_t>(j)] > 0)
            row_to_col[static_cast<std::size_t>(match[static_cast<std::size_t>(j)] - 1)] = j - 1;
    return row_to_col;
}

void check_same_length(const Eigen::VectorXi& a, const Eigen::VectorXi& b, const char* what) {
    if (a.size() != b.size()) throw DataError(std::string(what) + ": length mismatch");
    if (a.size() == 0) throw DataError(std::string(what) + ": empty labels");
}

double entropy_nats(const std::map<int, int>& counts, double n) {
    double h = 0.0;
    for (const auto& [label, count] : counts) {
        const double p = count / n;
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

}  // namespace

std::vector<ClusterAssignment> kmeans(const Eigen::MatrixXd& points, int c, int restarts,
                                      std::uint64_t seed) {
    if (c < 2) throw ConfigError("kmeans: need c >= 2");
    if (points.cols() < c) throw DataError("kmeans: fewer instances than clusters");
    if (restarts < 1) throw ConfigError("kmeans: need at least one restart");

    std::vector<ClusterAssignment> out;
    out.reserve(static_cast<std::size_t>(restarts));
    for (int r = 0; r < restarts; ++r) {
        std::mt19937_64 rng = substream(seed, static_cast<std::uint64_t>(r));
        out.push_back(lloyd(points, c, rng));
    }
    return out;
}

double clustering_accuracy(const Eigen::VectorXi& pred, const Eigen::VectorXi& truth) {
    check_same_length(pred, truth, "clustering_accuracy");
    const int c = std::max(pred.maxCoeff(), truth.maxCoeff()) + 1;
    Eigen::MatrixXd confusion = Eigen::MatrixXd::Zero(c, c);
    for (Eigen::Index i = 0; i < pred.size(); ++i) confusion(pred(i), truth(i)) += 1.0;

    const std::vector<int> mapping = hungarian_max(confusion);
    double matched = 0.0;
    for (int i = 0; i < c; ++i) matched += confusion(i, mapping[static_cast<std::size_t>(i)]);
    return matched / static_cast<double>(pred.size());
}

double normalized_mutual_information(const Eigen::VectorXi& pred, const Eigen::VectorXi& truth) {
    check_same_length(pred, truth, "normalized_mutual_information");
    const double n = static_cast<double>(pred.size());

    std::map<std::pair<int, int>, int> joint;
    std::map<int, int> count_pred, count_truth;
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
        joint[{pred(i), truth(i)}] += 1;
        count_pred[pred(i)] += 1;
        count_truth[truth(i)] += 1;
    }

    const double h_pred = entropy_nats(count_pred, n);
    const double h_truth = entropy_nats(count_truth, n);
    const double denom = 0.5 * (h_pred + h_truth);
    if (denom < 1e-15) return 1.0;  // both partitions trivial, hence identical

    double mi = 0.0;
    for (const auto& [pair, count] : joint) {
        const double p_joint = count / n;
        const double p_prod = (count_pred[pair.first] / n) * (count_truth[pair.second] / n);
        mi += p_joint * std::log(p_joint / p_prod);
    }
    return std::clamp(mi / denom, 0.0, 1.0);
}

double balance(const Eigen::VectorXi& pred, const Eigen::VectorXi& groups) {
    check_same_length(pred, groups, "balance");
    std::map<int, std::map<int, int>> per_cluster;  // cluster -> group -> count
    std::map<int, int> cluster_sizes;
    std::map<int, int> group_ids;
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
        per_cluster[pred(i)][groups(i)] += 1;
        cluster_sizes[pred(i)] += 1;
        group_ids[groups(i)] = 1;
    }

    double result = 1.0;
    for (const auto& [cluster, counts] : per_cluster) {
        const double size = cluster_sizes[cluster];
        for (const auto& [group, unused] : group_ids) {
            const auto it = counts.find(group);
            const double frac = it == counts.end() ? 0.0 : it->second / size;
            result = std::min(result, frac);
        }
    }
    return result;
}

double proportion(const Eigen::VectorXi& pred, const Eigen::VectorXi& groups) {
    check_same_length(pred, groups, "proportion");
    std::map<int, std::map<int, int>> per_cluster;
    std::map<int, int> cluster_sizes;
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
        per_cluster[pred(i)][groups(i)] += 1;
        cluster_sizes[pred(i)] += 1;
    }

    double result = 0.0;
    for (const auto& [cluster, counts] : per_cluster) {
        const double size = cluster_sizes[cluster];
        int dominant = 0;
        for (const auto& [group, count] : counts) dominant = std::max(dominant, count);
        result += dominant / size;
    }
    return result;
}

Eigen::VectorXi discretize_protected(const Eigen::VectorXd& row, std::optional<double> threshold) {
    std::map<double, int> distinct;
    for (Eigen::Index i = 0; i < row.size(); ++i) distinct.emplace(row(i), 0);

    Eigen::VectorXi groups(row.size());
    if (!threshold && distinct.size() <= 2) {
        int next = 0;
        for (auto& [value, id] : distinct) id = next++;
        for (Eigen::Index i = 0; i < row.size(); ++i) groups(i) = distinct.at(row(i));
        return groups;
    }

    double thr;
    if (threshold) {
        thr = *threshold;
    } else {
        std::vector<double> sorted(row.data(), row.data() + row.size());
        std::sort(sorted.begin(), sorted.end());
        const std::size_t half = sorted.size() / 2;
        thr = (sorted.size() % 2 == 1) ? sorted[half] : 0.5 * (sorted[half - 1] + sorted[half]);
    }
    for (Eigen::Index i = 0; i < row.size(); ++i) groups(i) = row(i) > thr ? 1 : 0;
    return groups;
}

EvalReport evaluate_selection(const Dataset& data, const std::vector<int>& selected, int c,
                              int restarts, std::uint64_t seed, const EvalOptions& opts) {
    if (selected.empty()) throw DataError("evaluate_selection: empty feature selection");
    for (const int idx : selected)
        if (idx < 0 || idx >= data.d())
            throw DataError("evaluate_selection: feature index out of range: " +
                            std::to_string(idx));
    if (opts.utility && !data.labels)
        throw DataError("evaluate_selection: utility metrics need ground-truth labels");

    Eigen::MatrixXd sub(static_cast<Eigen::Index>(selected.size()), data.n());
    for (std::size_t r = 0; r < selected.size(); ++r)
        sub.row(static_cast<Eigen::Index>(r)) = data.x.row(selected[r]);

    const Eigen::VectorXi groups =
        discretize_protected(data.p_mat.row(0).transpose(), opts.group_threshold);
    const std::vector<ClusterAssignment> runs = kmeans(sub, c, restarts, seed);

    EvalReport report;
    report.restarts = restarts;
    report.per_restart.reserve(runs.size());
    for (const auto& run : runs) {
        RestartMetrics metrics;
        if (opts.utility) {
            metrics.acc = clustering_accuracy(run.labels, *data.labels);
            metrics.nmi = normalized_mutual_information(run.labels, *data.labels);
        }
        if (opts.fairness) {
            metrics.balance = balance(run.labels, groups);
            metrics.proportion = proportion(run.labels, groups);
        }
        report.per_restart.push_back(metrics);
    }

    const double denom = static_cast<double>(restarts);
    if (opts.utility) {
        double acc_sum = 0.0, nmi_sum = 0.0;
        for (const auto& metrics : report.per_restart) {
            acc_sum += *metrics.acc;
            nmi_sum += *metrics.nmi;
        }
        report.acc = acc_sum / denom;
        report.nmi = nmi_sum / denom;
    }
    if (opts.fairness) {
        double bal_sum = 0.0, prop_sum = 0.0;
        for (const auto& metrics : report.per_restart) {
            bal_sum += metrics.balance;
            prop_sum += metrics.proportion;
        }
        report.balance = bal_sum / denom;
        report.proportion = prop_sum / denom;
    }
    return report;
}

}  // namespace fairsel
