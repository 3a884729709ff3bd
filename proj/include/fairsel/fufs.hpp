#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fairsel/dataset.hpp"
#include "fairsel/kernel.hpp"

namespace fairsel {

/// Relaxed selection indicator m and decomposition indicator g, both in
/// [0,1]^d. m weights features kept, g flags unselected features that absorb
/// correlation with the protected attributes.
struct IndicatorPair {
    Eigen::VectorXd m;
    Eigen::VectorXd g;
};

enum class StepPolicy { fixed, backtracking };
enum class InitPolicy { uniform_half, seeded_random };

struct BacktrackingParams {
    double shrink = 0.5;
    int max_backtracks = 20;
    double armijo_c = 1e-4;
};

struct FufsConfig {
    double alpha = 1.0;  // fairness weight
    double beta = 0.1;   // sparsity weight
    int k = 0;           // features to select; 0 means auto (10% of d, at least 1)
    int l = -1;          // sensitive features to flag from g; -1 means same as k
    double eta = 1.0;    // initial learning rate
    StepPolicy step_policy = StepPolicy::backtracking;
    BacktrackingParams backtracking;
    int max_iter = 500;
    double tol = 1e-6;  // relative objective-change stopping threshold
    std::uint64_t seed = 0;
    KernelSpec kernel = KernelSpec::rbf_median();
    InitPolicy init = InitPolicy::uniform_half;
    bool ablate_g = false;  // drop the decomposition indicator entirely

    int resolved_k(Eigen::Index d) const;
    int resolved_l(Eigen::Index d) const;

    /// Throws ConfigError on invalid values; returns human-readable warnings
    /// (e.g. k + l > d) without failing.
    std::vector<std::string> validate(Eigen::Index d) const;
};

/// The four objective terms and their sum:
///   total = -Tr(HKHK^M) + a Tr(HK^M HK^P) - a Tr(HK^G HK^P) + b(|m|_1 + |g|_1)
struct ObjectiveBreakdown {
    double utility_term = 0.0;
    double fairness_m_term = 0.0;
    double fairness_g_term = 0.0;
    double sparsity_term = 0.0;
    double total = 0.0;
};

struct SelectionResult {
    IndicatorPair indicators;
    std::vector<int> selected;           // top-k of m, descending, ties by index
    std::vector<int> flagged_sensitive;  // top-l of g excluding selected
    std::vector<ObjectiveBreakdown> trajectory;
    int iterations = 0;
    bool converged = false;
};

/// Fixed per-run quantities: the resolved bandwidth, centered base kernels and
/// the gradient coefficient matrices. K^M and K^G are rebuilt per step from
/// the indicators and always reuse sigma_x so the objective stays a fixed
/// function of (m, g).
struct KernelCache {
    double sigma_x = 0.0;  // bandwidth for K, K^M, K^G (rbf)
    double sigma_p = 0.0;  // bandwidth for K^P (rbf)
    Eigen::MatrixXd k_centered;   // H K H
    Eigen::MatrixXd kp_centered;  // H K^P H
    Eigen::MatrixXd coeff_m;      // -HKH + alpha HK^P H
    Eigen::MatrixXd coeff_g;      // -alpha HK^P H
};

KernelCache make_kernel_cache(const Dataset& data, const FufsConfig& cfg);

/// M = diag(m) X: row i of x scaled by m_i.
Eigen::MatrixXd build_m_matrix(const Dataset& data, const Eigen::VectorXd& m);

/// G = diag(g)(I - diag(m)) X: row i of x scaled by g_i (1 - m_i).
Eigen::MatrixXd build_g_matrix(const Dataset& data, const IndicatorPair& pair);

ObjectiveBreakdown objective(const Dataset& data, const IndicatorPair& pair,
                             const FufsConfig& cfg, const KernelCache& cache);

/// Analytic gradients (d/dm, d/dg) of the objective. For the rbf kernel, with
/// sigma the bandwidth of the cache, W = coeff (.) K (elementwise) and
/// s_k = sum_ij W_ij (X_ki - X_kj)^2:
///   dL/dm_k = -(m_k / s^2) s_k[W_M] + (g_k^2 (1-m_k) / s^2) s_k[W_G] + beta
///   dL/dg_k = -(g_k (1-m_k)^2 / s^2) s_k[W_G] + beta
/// The m-gradient carries both the K^M path and the K^G path (G depends on m
/// through the (1 - m_i) factor). Linear-kernel forms are the bilinear
/// analogues. Verified against central finite differences.
std::pair<Eigen::VectorXd, Eigen::VectorXd> gradient(const Dataset& data,
                                                     const IndicatorPair& pair,
                                                     const FufsConfig& cfg,
                                                     const KernelCache& cache);

/// Elementwise clamp to [0,1].
Eigen::VectorXd project_box(const Eigen::VectorXd& v);

/// Alternating projected gradient descent: per iteration a g-block step then
/// an m-block step, each a full-vector move with the gradient frozen at the
/// block start, projected to the box, kernels refreshed afterwards. Stops on
/// relative objective change < tol or max_iter. `on_iteration`, when set, sees
/// the indicators after every iteration (diagnostics only).
SelectionResult optimize(const Dataset& data, const FufsConfig& cfg,
                         const std::function<void(const IndicatorPair&)>& on_iteration = {});

/// All d features ordered by descending final m, ties by ascending index.
std::vector<std::pair<int, double>> rank_features(const SelectionResult& result);

/// Indices of `scores` in descending score order, ties by ascending index.
std::vector<int> rank_by_score(const Eigen::VectorXd& scores);

}  // namespace fairsel
