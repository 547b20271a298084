#pragma once

#include "bahadur/innovations.hpp"
#include "bahadur/marginal.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bahadur {

enum class MapKind { ar1, arch1, tar };

std::string_view to_string(MapKind kind);
MapKind map_kind_from_string(std::string_view name);

/// Iterated random function X_n = G(X_{n-1}, eps_n) of location-scale form
/// G(x, e) = location(x) + scale(x) * e:
///
///   ar1    G(x, e) = a x + e
///   arch1  G(x, e) = e sqrt(c0 + c1 x^2)
///   tar    G(x, e) = phi_plus max(x, 0) - phi_minus max(-x, 0) + e
///
/// Construction rejects parameters that are not contracting on average.
class IteratedMapModel {
public:
    static IteratedMapModel ar1(double a, InnovationModel innovation, std::int64_t burn_in = 1000);
    static IteratedMapModel arch1(double c0, double c1, InnovationModel innovation, std::int64_t burn_in = 1000);
    static IteratedMapModel tar(double phi_plus, double phi_minus, InnovationModel innovation,
                                std::int64_t burn_in = 1000);

    MapKind kind() const noexcept { return kind_; }
    const InnovationModel& innovation() const noexcept { return innovation_; }
    std::int64_t burn_in() const noexcept { return burn_in_; }
    double param1() const noexcept { return p1_; }  // a, c0 or phi_plus
    double param2() const noexcept { return p2_; }  // unused, c1 or phi_minus

    double location(double x) const noexcept;
    double scale(double x) const noexcept;
    double apply(double x, double eps) const noexcept { return location(x) + scale(x) * eps; }

    /// G(-x, -e) = -G(x, e); with a symmetric innovation the stationary law is symmetric.
    bool odd_symmetric() const noexcept;

    /// E log L_eps, where L_eps is the Lipschitz constant of G(., eps).
    double log_lipschitz_mean() const;

    std::string describe() const;

private:
    IteratedMapModel(MapKind kind, double p1, double p2, InnovationModel innovation, std::int64_t burn_in);

    MapKind kind_;
    double p1_, p2_;
    InnovationModel innovation_;
    std::int64_t burn_in_;
};

/// A state after burn_in iterations from 0.
double burned_in_state(const IteratedMapModel& model, RandomStream& stream);

/// X_1..X_n after burn-in. Throws NonFinite on overflow.
Eigen::VectorXd simulate_chain(const IteratedMapModel& model, std::int64_t n, std::uint64_t seed);

/// X and X' driven by the same eps_1..eps_n from independent burned-in
/// starts X_0, X'_0. distances[k] = |X_k - X'_k|^alpha for k = 0..n.
struct CoupledPaths {
    Eigen::VectorXd primary;
    Eigen::VectorXd shadow;
    Eigen::VectorXd distances;
};

CoupledPaths simulate_coupled(const IteratedMapModel& model, std::int64_t n, double alpha, std::uint64_t seed);

struct GmcReport {
    Eigen::VectorXd mean_distance;  // lag 0..n_max
    std::int64_t usable_lags = 0;
    double slope = 0.0;
    double intercept = 0.0;
    double r_hat = 0.0;
    bool degenerate = false;  // fewer than 5 usable lags
};

/// Geometric-moment contraction: fits log mean |X_k - X'_k|^alpha on k over
/// the lags where the mean exceeds 10 machine epsilons.
GmcReport estimate_gmc(const IteratedMapModel& model, double alpha, std::int64_t n_max, std::int64_t replicates,
                       std::uint64_t seed);

/// X_1..X_n and the m-dependent coupling: Xt_k iterates G over eps_{k-m+1..k}
/// from its own independent burned-in state.
struct MDependentPaths {
    Eigen::VectorXd original;
    Eigen::VectorXd coupled;
    std::int64_t m = 0;
};

MDependentPaths simulate_m_dependent(const IteratedMapModel& model, std::int64_t n, std::int64_t m,
                                     std::uint64_t seed);

/// 1-based positions j, j+m, ..., j + A_n(j) m used by block j.
std::vector<std::int64_t> block_indices(std::int64_t n, std::int64_t m, std::int64_t j);

/// Ft_{n,j}(x): fraction of the block-j values <= x. Throws IndexError
/// unless 1 <= j <= m.
double block_ecdf(const Eigen::VectorXd& values, std::int64_t m, std::int64_t j, double x);

/// Stationary marginal of the chain: F(x) = E F_eps((x - location(X)) / scale(X))
/// over `replicates` independent burned-in states X.
MarginalOracle build_chain_oracle(const IteratedMapModel& model, std::int64_t replicates, std::uint64_t seed);

}  // namespace bahadur
