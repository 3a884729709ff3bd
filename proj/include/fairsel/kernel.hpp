#pragma once

#include <Eigen/Dense>
#include <optional>

namespace fairsel {

enum class KernelFamily { rbf, linear };

/// Kernel family plus bandwidth policy. A missing fixed_bandwidth means the
/// median heuristic (median pairwise distance between instance columns).
struct KernelSpec {
    KernelFamily family = KernelFamily::rbf;
    std::optional<double> fixed_bandwidth;  // rbf only; must be > 0 when set

    static KernelSpec rbf_median() { return {KernelFamily::rbf, std::nullopt}; }
    static KernelSpec rbf_fixed(double sigma) { return {KernelFamily::rbf, sigma}; }
    static KernelSpec linear() { return {KernelFamily::linear, std::nullopt}; }
};

/// Symmetric n x n Gram matrix. bandwidth_used carries the resolved sigma for
/// rbf kernels so dependent matrices can be built with the same scale.
struct GramMatrix {
    Eigen::MatrixXd values;
    std::optional<double> bandwidth_used;

    Eigen::Index n() const { return values.rows(); }
};

/// Median of the n(n-1)/2 pairwise Euclidean distances between the columns of
/// `data`. Falls back to 1.0 when all points coincide (median < 1e-12).
double resolve_bandwidth(const Eigen::MatrixXd& data);

/// Gram matrix of the instance columns of `data` under `spec`.
/// rbf: K_ij = exp(-|x_i - x_j|^2 / (2 sigma^2)); linear: K_ij = x_i . x_j.
GramMatrix gram(const Eigen::MatrixXd& data, const KernelSpec& spec);

/// Centered Gram matrix H K H with H = I - (1/n) 1 1^T, computed by explicit
/// row/column mean subtraction. Row and column sums of the result vanish.
GramMatrix center(const GramMatrix& k);

/// Centered kernel alignment Tr(H k1 H k2), the Frobenius inner product of
/// center(k1) with k2. Symmetric in its arguments.
double centered_alignment(const GramMatrix& k1, const GramMatrix& k2);

}  // namespace fairsel
