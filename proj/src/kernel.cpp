#include "fairsel/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fairsel/errors.hpp"

namespace fairsel {

namespace {

// Pairwise squared distances between columns: |x_i|^2 + |x_j|^2 - 2 x_i.x_j,
// clamped at zero against cancellation, zero diagonal.
Eigen::MatrixXd pairwise_sqdist(const Eigen::MatrixXd& data) {
    const Eigen::VectorXd sq = data.colwise().squaredNorm();
    Eigen::MatrixXd d2 = -2.0 * (data.transpose() * data);
    d2.colwise() += sq;
    d2.rowwise() += sq.transpose();
    d2 = d2.cwiseMax(0.0);
    d2.diagonal().setZero();
    return d2;
}

}  // namespace

double resolve_bandwidth(const Eigen::MatrixXd& data) {
    const Eigen::Index n = data.cols();
    if (n < 2) throw DataError("resolve_bandwidth: need at least 2 instances");

    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            dists.push_back((data.col(i) - data.col(j)).norm());

    std::sort(dists.begin(), dists.end());
    const std::size_t half = dists.size() / 2;
    const double median = (dists.size() % 2 == 1)
                              ? dists[half]
                              : 0.5 * (dists[half - 1] + dists[half]);
    return median < 1e-12 ? 1.0 : median;
}

GramMatrix gram(const Eigen::MatrixXd& data, const KernelSpec& spec) {
    if (data.cols() < 2) throw DataError("gram: need at least 2 instances");
    if (!data.allFinite()) throw NumericError("gram: non-finite input entries");

    GramMatrix out;
    if (spec.family == KernelFamily::linear) {
        Eigen::MatrixXd k = data.transpose() * data;
        out.values = 0.5 * (k + k.transpose());
        return out;
    }

    double sigma = spec.fixed_bandwidth ? *spec.fixed_bandwidth : resolve_bandwidth(data);
    if (sigma <= 0.0) throw ConfigError("gram: rbf bandwidth must be positive");

    Eigen::MatrixXd k = (-pairwise_sqdist(data) / (2.0 * sigma * sigma)).array().exp();
    k = 0.5 * (k + k.transpose());
    k.diagonal().setOnes();
    out.values = std::move(k);
    out.bandwidth_used = sigma;
    return out;
}

GramMatrix center(const GramMatrix& k) {
    const Eigen::VectorXd row_mean = k.values.rowwise().mean();
    const double grand_mean = row_mean.mean();

    // Symmetric input keeps this exactly symmetric: the same mean vector is
    // subtracted along both rows and columns.
    Eigen::MatrixXd c = k.values;
    c.colwise() -= row_mean;
    c.rowwise() -= row_mean.transpose();
    c.array() += grand_mean;
    return {std::move(c), k.bandwidth_used};
}

double centered_alignment(const GramMatrix& k1, const GramMatrix& k2) {
    if (k1.n() != k2.n()) throw DataError("centered_alignment: dimension mismatch");
    return center(k1).values.cwiseProduct(k2.values).sum();
}

}  // namespace fairsel
