#include "fairsel/fufs.hpp"

#include <algorithm>
#include <cmath>

#include "fairsel/errors.hpp"
#include "fairsel/rng.hpp"

namespace fairsel {

int FufsConfig::resolved_k(Eigen::Index d) const {
    if (k > 0) return k;
    return std::max(1, static_cast<int>(std::ceil(0.1 * static_cast<double>(d))));
}

int FufsConfig::resolved_l(Eigen::Index d) const {
    if (l >= 0) return std::min(l, static_cast<int>(d));
    return resolved_k(d);
}

std::vector<std::string> FufsConfig::validate(Eigen::Index d) const {
    if (alpha < 0.0) throw ConfigError("alpha must be >= 0");
    if (beta < 0.0) throw ConfigError("beta must be >= 0");
    if (k != 0 && (k < 1 || k > d))
        throw ConfigError("k must lie in [1, d]; got k=" + std::to_string(k) +
                          " with d=" + std::to_string(d));
    if (l < -1 || l > static_cast<int>(d))
        throw ConfigError("l must lie in [0, d]; got l=" + std::to_string(l) +
                          " with d=" + std::to_string(d));
    if (eta <= 0.0) throw ConfigError("eta must be > 0");
    if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
    if (tol <= 0.0) throw ConfigError("tol must be > 0");
    if (kernel.fixed_bandwidth && *kernel.fixed_bandwidth <= 0.0)
        throw ConfigError("fixed kernel bandwidth must be > 0");

    std::vector<std::string> warnings;
    if (resolved_k(d) + resolved_l(d) > d)
        warnings.push_back("k + l exceeds d (" + std::to_string(resolved_k(d)) + " + " +
                           std::to_string(resolved_l(d)) + " > " + std::to_string(d) +
                           "); selected and flagged sets cannot both be filled");
    return warnings;
}

Eigen::MatrixXd build_m_matrix(const Dataset& data, const Eigen::VectorXd& m) {
    if (m.size() != data.d()) throw DataError("build_m_matrix: indicator length mismatch");
    return m.asDiagonal() * data.x;
}

Eigen::MatrixXd build_g_matrix(const Dataset& data, const IndicatorPair& pair) {
    if (pair.m.size() != data.d() || pair.g.size() != data.d())
        throw DataError("build_g_matrix: indicator length mismatch");
    const Eigen::VectorXd scale = pair.g.array() * (1.0 - pair.m.array());
    return scale.asDiagonal() * data.x;
}

KernelCache make_kernel_cache(const Dataset& data, const FufsConfig& cfg) {
    KernelCache cache;
    const GramMatrix k = gram(data.x, cfg.kernel);
    const GramMatrix kp = gram(data.p_mat, cfg.kernel);
    if (cfg.kernel.family == KernelFamily::rbf) {
        cache.sigma_x = *k.bandwidth_used;
        cache.sigma_p = *kp.bandwidth_used;
    }
    cache.k_centered = center(k).values;
    cache.kp_centered = center(kp).values;
    cache.coeff_m = -cache.k_centered + cfg.alpha * cache.kp_centered;
    cache.coeff_g = -cfg.alpha * cache.kp_centered;
    return cache;
}

namespace {

// Kernel spec for the indicator-dependent matrices: same family as the run,
// bandwidth pinned to the one resolved on the full X.
KernelSpec dependent_spec(const FufsConfig& cfg, const KernelCache& cache) {
    if (cfg.kernel.family == KernelFamily::linear) return KernelSpec::linear();
    return KernelSpec::rbf_fixed(cache.sigma_x);
}

struct MgKernels {
    GramMatrix km;
    GramMatrix kg;
};

MgKernels build_mg_kernels(const Dataset& data, const IndicatorPair& pair,
                           const FufsConfig& cfg, const KernelCache& cache) {
    const KernelSpec spec = dependent_spec(cfg, cache);
    return {gram(build_m_matrix(data, pair.m), spec),
            gram(build_g_matrix(data, pair), spec)};
}

ObjectiveBreakdown objective_with(const IndicatorPair& pair, const FufsConfig& cfg,
                                  const KernelCache& cache, const MgKernels& mg) {
    ObjectiveBreakdown b;
    b.utility_term = -cache.k_centered.cwiseProduct(mg.km.values).sum();
    b.fairness_m_term = cfg.alpha * cache.kp_centered.cwiseProduct(mg.km.values).sum();
    b.fairness_g_term =
        cfg.ablate_g ? 0.0 : -cfg.alpha * cache.kp_centered.cwiseProduct(mg.kg.values).sum();
    b.sparsity_term = cfg.beta * (pair.m.sum() + pair.g.sum());
    b.total = b.utility_term + b.fairness_m_term + b.fairness_g_term + b.sparsity_term;
    if (!std::isfinite(b.total)) throw NumericError("objective: non-finite value");
    return b;
}

// s_k = sum_ij W_ij (X_ki - X_kj)^2, expanded through row/column sums of W
// and the quadratic form X W X^T so no n x n temporary per feature is needed.
Eigen::VectorXd weighted_sqdist_sums(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w) {
    const Eigen::VectorXd row_sums = w.rowwise().sum();
    const Eigen::VectorXd col_sums = w.colwise().sum();
    const Eigen::MatrixXd xsq = x.cwiseProduct(x);
    const Eigen::VectorXd cross = (x * w).cwiseProduct(x).rowwise().sum();
    return xsq * row_sums + xsq * col_sums - 2.0 * cross;
}

// s_k = sum_ij W_ij X_ki X_kj (linear-kernel building block).
Eigen::VectorXd weighted_outer_sums(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w) {
    return (x * w).cwiseProduct(x).rowwise().sum();
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gradient_with(const Dataset& data,
                                                          const IndicatorPair& pair,
                                                          const FufsConfig& cfg,
                                                          const KernelCache& cache,
                                                          const MgKernels& mg) {
    const Eigen::Index d = data.d();
    const Eigen::ArrayXd m = pair.m.array();
    const Eigen::ArrayXd g = pair.g.array();
    Eigen::VectorXd grad_m = Eigen::VectorXd::Constant(d, cfg.beta);
    Eigen::VectorXd grad_g = Eigen::VectorXd::Constant(d, cfg.beta);

    if (cfg.kernel.family == KernelFamily::rbf) {
        const double inv_sigma_sq = 1.0 / (cache.sigma_x * cache.sigma_x);
        const Eigen::VectorXd s_m =
            weighted_sqdist_sums(data.x, cache.coeff_m.cwiseProduct(mg.km.values));
        grad_m.array() -= m * inv_sigma_sq * s_m.array();
        if (cfg.alpha != 0.0) {
            const Eigen::VectorXd s_g =
                weighted_sqdist_sums(data.x, cache.coeff_g.cwiseProduct(mg.kg.values));
            grad_m.array() += g.square() * (1.0 - m) * inv_sigma_sq * s_g.array();
            grad_g.array() -= g * (1.0 - m).square() * inv_sigma_sq * s_g.array();
        }
    } else {
        const Eigen::VectorXd s_m = weighted_outer_sums(data.x, cache.coeff_m);
        grad_m.array() += 2.0 * m * s_m.array();
        if (cfg.alpha != 0.0) {
            const Eigen::VectorXd s_g = weighted_outer_sums(data.x, cache.coeff_g);
            grad_m.array() -= 2.0 * g.square() * (1.0 - m) * s_g.array();
            grad_g.array() += 2.0 * g * (1.0 - m).square() * s_g.array();
        }
    }

    if (!grad_m.allFinite() || !grad_g.allFinite())
        throw NumericError("gradient: non-finite value");
    return {std::move(grad_m), std::move(grad_g)};
}

IndicatorPair initial_indicators(Eigen::Index d, const FufsConfig& cfg) {
    IndicatorPair pair;
    if (cfg.init == InitPolicy::uniform_half) {
        pair.m = Eigen::VectorXd::Constant(d, 0.5);
        pair.g = Eigen::VectorXd::Constant(d, 0.5);
    } else {
        std::mt19937_64 rng(cfg.seed);
        pair.m.resize(d);
        pair.g.resize(d);
        for (Eigen::Index i = 0; i < d; ++i) pair.m(i) = uniform01(rng);
        for (Eigen::Index i = 0; i < d; ++i) pair.g(i) = uniform01(rng);
    }
    if (cfg.ablate_g) pair.g.setZero();  // g frozen at zero removes it from the model
    return pair;
}

std::vector<int> top_indices(const std::vector<int>& ranked, int count,
                             const std::vector<int>& exclude) {
    std::vector<int> out;
    for (const int idx : ranked) {
        if (static_cast<int>(out.size()) == count) break;
        if (std::find(exclude.begin(), exclude.end(), idx) != exclude.end()) continue;
        out.push_back(idx);
    }
    return out;
}

}  // namespace

ObjectiveBreakdown objective(const Dataset& data, const IndicatorPair& pair,
                             const FufsConfig& cfg, const KernelCache& cache) {
    return objective_with(pair, cfg, cache, build_mg_kernels(data, pair, cfg, cache));
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gradient(const Dataset& data,
                                                     const IndicatorPair& pair,
                                                     const FufsConfig& cfg,
                                                     const KernelCache& cache) {
    return gradient_with(data, pair, cfg, cache, build_mg_kernels(data, pair, cfg, cache));
}

Eigen::VectorXd project_box(const Eigen::VectorXd& v) {
    return v.cwiseMax(0.0).cwiseMin(1.0);
}

std::vector<int> rank_by_score(const Eigen::VectorXd& scores) {
    std::vector<int> order(static_cast<std::size_t>(scores.size()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores(a) > scores(b); });
    return order;
}

SelectionResult optimize(const Dataset& data, const FufsConfig& cfg,
                         const std::function<void(const IndicatorPair&)>& on_iteration) {
    data.validate();
    cfg.validate(data.d());

    const KernelCache cache = make_kernel_cache(data, cfg);
    const KernelSpec dep_spec = dependent_spec(cfg, cache);
    IndicatorPair pair = initial_indicators(data.d(), cfg);
    MgKernels mg = build_mg_kernels(data, pair, cfg, cache);
    ObjectiveBreakdown current = objective_with(pair, cfg, cache, mg);

    // Dependent kernels for the current `pair`; the g-block leaves K^M alone.
    auto candidate_kernels = [&](bool m_changed) {
        MgKernels out;
        out.km = m_changed ? gram(build_m_matrix(data, pair.m), dep_spec) : mg.km;
        out.kg = gram(build_g_matrix(data, pair), dep_spec);
        return out;
    };

    // One block step for the given indicator vector; refreshes the dependent
    // kernels and `current` on acceptance. With backtracking the step shrinks
    // until the Armijo condition holds, otherwise the block does not move.
    auto block_step = [&](Eigen::VectorXd& v, const Eigen::VectorXd& grad, bool m_block) {
        if (cfg.step_policy == StepPolicy::fixed) {
            v = project_box(v - cfg.eta * grad);
            mg = candidate_kernels(m_block);
            current = objective_with(pair, cfg, cache, mg);
            return;
        }
        double eta = cfg.eta;
        const Eigen::VectorXd base = v;
        for (int attempt = 0; attempt <= cfg.backtracking.max_backtracks; ++attempt) {
            const Eigen::VectorXd candidate = project_box(base - eta * grad);
            v = candidate;
            MgKernels cand_mg = candidate_kernels(m_block);
            const ObjectiveBreakdown cand_obj = objective_with(pair, cfg, cache, cand_mg);
            const double armijo =
                current.total + cfg.backtracking.armijo_c * grad.dot(candidate - base);
            if (cand_obj.total <= armijo) {
                mg = std::move(cand_mg);
                current = cand_obj;
                return;
            }
            eta *= cfg.backtracking.shrink;
        }
        v = base;  // every step rejected
    };

    SelectionResult result;
    result.trajectory.reserve(static_cast<std::size_t>(std::min(cfg.max_iter, 1024)));

    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        const double previous_total = current.total;

        if (!cfg.ablate_g) {
            const auto [gm_unused, gg] = gradient_with(data, pair, cfg, cache, mg);
            block_step(pair.g, gg, false);
        }
        {
            const auto [gm, gg_unused] = gradient_with(data, pair, cfg, cache, mg);
            block_step(pair.m, gm, true);
        }

        result.trajectory.push_back(current);
        if (on_iteration) on_iteration(pair);
        const double rel_change =
            std::abs(current.total - previous_total) / (std::abs(previous_total) + 1e-12);
        if (rel_change < cfg.tol) {
            result.converged = true;
            break;
        }
    }

    result.iterations = static_cast<int>(result.trajectory.size());
    result.indicators = pair;

    const std::vector<int> m_ranked = rank_by_score(pair.m);
    const std::vector<int> g_ranked = rank_by_score(pair.g);
    const int k = cfg.resolved_k(data.d());
    const int l = cfg.resolved_l(data.d());
    result.selected = top_indices(m_ranked, k, {});
    result.flagged_sensitive = top_indices(g_ranked, l, result.selected);
    return result;
}

std::vector<std::pair<int, double>> rank_features(const SelectionResult& result) {
    std::vector<std::pair<int, double>> out;
    for (const int idx : rank_by_score(result.indicators.m))
        out.emplace_back(idx, result.indicators.m(idx));
    return out;
}

}  // namespace fairsel
