#include "scma/oracle.hpp"

#include <algorithm>
#include <stdexcept>

namespace scma {

OracleResult brute_force_ml(Cplx y_n, const Eigen::RowVectorXcd& h_row) {
    const int l = static_cast<int>(h_row.size());
    if (l > 20) throw std::invalid_argument("brute_force_ml: enumeration bound is L <= 20");
    OracleResult res;
    res.ranking.reserve(1L << l);
    for (long c = 0; c < (1L << l); ++c) {
        Eigen::VectorXi u(l);
        Cplx s = 0.0;
        for (int i = 0; i < l; ++i) {
            u(i) = ((c >> i) & 1) ? 1 : -1;
            s += h_row(i) * static_cast<double>(u(i));
        }
        res.ranking.emplace_back(std::norm(y_n - s), std::move(u));
    }
    std::stable_sort(res.ranking.begin(), res.ranking.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    res.ml_point = res.ranking.front().second;
    return res;
}

Eigen::ArrayXXd exact_marginal_oracle(Cplx y_n, const Codebook& cb,
                                      const FactorGraph& graph, int n,
                                      const Eigen::MatrixXcd& h_est, double noise_var,
                                      const Eigen::ArrayXXd& priors, MaxStarMode mode) {
    const auto& users = graph.xi[n];
    const int d_c = static_cast<int>(users.size());
    const int m_points = cb.m_points;
    if (std::pow(static_cast<double>(m_points), d_c) > 1e6)
        throw std::invalid_argument("exact_marginal_oracle: instance too large");

    Eigen::ArrayXXd out(d_c, m_points);
    out.setConstant(kNegInf);
    std::vector<int> sym(d_c, 0);
    const long total = static_cast<long>(std::pow(static_cast<double>(m_points), d_c));
    for (long c = 0; c < total; ++c) {
        Cplx s = 0.0;
        double prior_sum = 0.0;
        for (int j = 0; j < d_c; ++j) {
            s += h_est(n, users[j]) * cb.component(n, users[j], sym[j]);
            prior_sum += priors(users[j], sym[j]);
        }
        const double metric = -std::norm(y_n - s) / noise_var + prior_sum;
        for (int j = 0; j < d_c; ++j) out(j, sym[j]) = max_star(out(j, sym[j]), metric, mode);
        for (int j = 0; j < d_c; ++j) {
            if (++sym[j] < m_points) break;
            sym[j] = 0;
        }
    }
    for (int j = 0; j < d_c; ++j) out.row(j) -= out.row(j).maxCoeff();
    return out;
}

}  // namespace scma
