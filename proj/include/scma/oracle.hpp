#pragma once

#include <Eigen/Core>
#include <vector>

#include "scma/codebook.hpp"
#include "scma/factor_graph.hpp"
#include "scma/mpa.hpp"

namespace scma {

// Full-enumeration references. These never share code with the search or
// message-passing paths they are used to check.

struct OracleResult {
    Eigen::VectorXi ml_point;  // argmin of |y - h_row u|^2 over {-1,+1}^L
    // all 2^L points sorted by ascending distance (plain, unregularized)
    std::vector<std::pair<double, Eigen::VectorXi>> ranking;
};

OracleResult brute_force_ml(Cplx y_n, const Eigen::RowVectorXcd& h_row);

// Exact per-(user, symbol) log-marginals on one resource: direct max*/max over
// all M^{d_c} combinations of -f_n + sum of priors, normalized to max 0.
Eigen::ArrayXXd exact_marginal_oracle(Cplx y_n, const Codebook& cb,
                                      const FactorGraph& graph, int n,
                                      const Eigen::MatrixXcd& h_est, double noise_var,
                                      const Eigen::ArrayXXd& priors, MaxStarMode mode);

}  // namespace scma
