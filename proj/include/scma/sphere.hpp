#pragma once

#include <Eigen/Core>
#include <functional>
#include <utility>
#include <vector>

#include "scma/codebook.hpp"
#include "scma/rng.hpp"

namespace scma {

// Regularized augmentation [H; alpha I] of the 1 x L effective row, factored
// by modified Gram-Schmidt. The diagonal of r is real positive, so the
// real-sign enumeration rule is well defined. `offset` is the residual
// |Q2^† y~|^2: for binary u,
//   |y_reduced - r u|^2 + offset = |y - h_row u|^2 + alpha^2 L.
struct AugmentedSystem {
    Eigen::VectorXcd y_reduced;  // L
    Eigen::MatrixXcd r;          // L x L upper triangular
    Eigen::MatrixXcd q1;         // (L+1) x L, kept for residual checks
    double alpha = 0.0;
    int depth = 0;
    double offset = 0.0;
};

AugmentedSystem augment_and_factor(const Eigen::RowVectorXcd& h_row, Cplx y_n,
                                   double alpha);

struct RadiusPolicy {
    enum class Mode { Infinite, ChiSquare };
    Mode mode = Mode::Infinite;
    double epsilon = 1e-3;
    double sigma2 = 1.0;
};

// Infinite mode: +inf. Chi-square mode: (sigma^2/2) F^-1(1-eps; 2) + alpha^2 L
// with the closed form F^-1(1-eps; 2) = -2 ln(eps).
double initial_radius(const RadiusPolicy& policy, int depth, double alpha);

struct Candidate {
    std::vector<std::int8_t> u;  // entries in {-1,+1}, index 0 = leaf level
    double dist = 0.0;           // |y - h_row u|^2 + alpha^2 L
};

// Entries stay in discovery order (entries[0] is the Babai point when the
// radius never pruned it); current_radius equals the max stored distance once
// the list is full. Ties at capacity keep the incumbent.
struct CandidateList {
    int capacity = 0;
    std::vector<Candidate> entries;
    double current_radius = 0.0;
};

struct SearchStats {
    std::vector<long long> visited;  // per level, index 0 = leaf (k = 1)
    long long radius_updates = 0;    // step-6 max-scan events
    long long leaves = 0;
    long long sibling_order_violations = 0;  // SE orders children by DI; stays 0
    long long flops_estimate() const;        // sum_k (2k+7) visited[k]
};

// Admissibility callback; u is valid at indices [level, L). Return false to
// prune the subtree below this node.
using LevelPruner = std::function<bool(int level, const std::vector<std::int8_t>& u)>;

// Depth-first Schnorr-Euchner search over {-1,+1}^L from level L down to 1.
// First child at each level is sign(Re(yhat_l)) (sign(0) = +1), the sibling
// step is -2 sign(Re(yhat_l)); nodes with accumulated distance above the
// radius are pruned; full leaves enter the candidate list, shrinking the
// radius once the list is full.
std::pair<CandidateList, SearchStats> lsd_search(const AugmentedSystem& sys,
                                                 const RadiusPolicy& policy, int t_max,
                                                 const LevelPruner& pruner = nullptr);

// M-PAM entry u = gamma^T u' with gamma = [2^(log M - 1), ..., 2, 1] and
// u' in {-1,+1}. Returns the block-diagonal expansion (Gamma, u') for a
// vector of PAM entries.
std::pair<Eigen::MatrixXd, Eigen::VectorXi> pam_to_bpsk(const Eigen::VectorXi& u_pam,
                                                        int m_pam);

// Empirical P{ |z|^2 + alpha^2 L > C } for z ~ CN(0, sigma^2); must come out
// at most epsilon up to binomial noise.
double chi2_coverage_test(double sigma2, double epsilon, long trials, double alpha,
                          int depth, Rng& rng);

}  // namespace scma
