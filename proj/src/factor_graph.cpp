#include "scma/factor_graph.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace scma {

int FactorGraph::pos_in_xi(int n, int k) const {
    for (size_t j = 0; j < xi[n].size(); ++j)
        if (xi[n][j] == k) return static_cast<int>(j);
    throw std::out_of_range("layer not connected to resource");
}

int FactorGraph::pos_in_zeta(int k, int n) const {
    for (size_t j = 0; j < zeta[k].size(); ++j)
        if (zeta[k][j] == n) return static_cast<int>(j);
    throw std::out_of_range("resource not connected to layer");
}

FactorGraph FactorGraph::from_indicator(const Eigen::MatrixXi& f) {
    const int n_res = static_cast<int>(f.rows());
    const int k_layers = static_cast<int>(f.cols());
    if (n_res == 0 || k_layers == 0)
        throw std::invalid_argument("indicator matrix is empty");
    for (int n = 0; n < n_res; ++n)
        for (int k = 0; k < k_layers; ++k)
            if (f(n, k) != 0 && f(n, k) != 1)
                throw std::invalid_argument("indicator matrix must be binary");

    FactorGraph g;
    g.f = f;
    const int total = f.sum();
    // regularity targets d_c = K P / N per row and P per column
    g.d_c = (total + n_res / 2) / n_res;
    for (int n = 0; n < n_res; ++n) {
        if (f.row(n).sum() != g.d_c)
            throw std::invalid_argument("irregular graph: resource " + std::to_string(n) +
                                        " has row sum " + std::to_string(f.row(n).sum()) +
                                        ", expected " + std::to_string(g.d_c));
    }
    const int p = (total + k_layers / 2) / k_layers;
    for (int k = 0; k < k_layers; ++k) {
        if (f.col(k).sum() != p)
            throw std::invalid_argument("irregular graph: layer " + std::to_string(k) +
                                        " has column sum " + std::to_string(f.col(k).sum()));
    }

    g.xi.resize(n_res);
    g.zeta.resize(k_layers);
    for (int n = 0; n < n_res; ++n)
        for (int k = 0; k < k_layers; ++k)
            if (f(n, k) == 1) {
                g.xi[n].push_back(k);
                g.zeta[k].push_back(n);
            }
    return g;
}

FactorGraph FactorGraph::from_mappings(const std::vector<Eigen::MatrixXi>& mappings) {
    if (mappings.empty()) throw std::invalid_argument("no mapping matrices");
    const int n_res = static_cast<int>(mappings[0].rows());
    Eigen::MatrixXi f = Eigen::MatrixXi::Zero(n_res, static_cast<int>(mappings.size()));
    for (size_t k = 0; k < mappings.size(); ++k) {
        const auto& v = mappings[k];
        if (v.rows() != n_res)
            throw std::invalid_argument("mapping matrices must share the resource count");
        // f_k = diag(V_k V_k^T)
        const Eigen::MatrixXi vvt = v * v.transpose();
        for (int n = 0; n < n_res; ++n) f(n, static_cast<int>(k)) = vvt(n, n);
    }
    return from_indicator(f);
}

FactorGraph FactorGraph::from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open indicator file " + path);
    std::vector<std::vector<int>> rows;
    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::vector<int> row;
        int v;
        while (ls >> v) row.push_back(v);
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("indicator file is empty");
    Eigen::MatrixXi f(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (size_t n = 0; n < rows.size(); ++n) {
        if (rows[n].size() != rows[0].size())
            throw std::runtime_error("ragged indicator file");
        for (size_t k = 0; k < rows[n].size(); ++k) f(static_cast<int>(n), static_cast<int>(k)) = rows[n][k];
    }
    return from_indicator(f);
}

}  // namespace scma
