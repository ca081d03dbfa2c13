#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace scma {

// Indicator matrix F (N x K) with the derived neighbor lists. xi[n] holds the
// layers colliding on resource n (ascending); zeta[k] holds the resources of
// layer k. Regular graphs only: every row sums to d_c, every column to P.
struct FactorGraph {
    Eigen::MatrixXi f;
    std::vector<std::vector<int>> xi;
    std::vector<std::vector<int>> zeta;
    int d_c = 0;

    int resources() const { return static_cast<int>(xi.size()); }
    int users() const { return static_cast<int>(zeta.size()); }
    int p_dims() const { return zeta.empty() ? 0 : static_cast<int>(zeta[0].size()); }
    double overload() const { return static_cast<double>(users()) / resources(); }

    int pos_in_xi(int n, int k) const;
    int pos_in_zeta(int k, int n) const;

    static FactorGraph from_indicator(const Eigen::MatrixXi& f);
    static FactorGraph from_mappings(const std::vector<Eigen::MatrixXi>& mappings);
    // plain text: one row per resource, 0/1 separated by spaces
    static FactorGraph from_file(const std::string& path);
};

}  // namespace scma
