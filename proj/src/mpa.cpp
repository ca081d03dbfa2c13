#include "scma/mpa.hpp"

#include <cmath>
#include <stdexcept>

namespace scma {

void MessageTable::init(const FactorGraph& graph, int m_points,
                        const Eigen::ArrayXXd& priors_in) {
    const int n_res = graph.resources();
    const int k_layers = graph.users();
    const int p = graph.p_dims();
    if (priors_in.rows() != k_layers || priors_in.cols() != m_points)
        throw std::invalid_argument("MessageTable: priors must be K x M");
    priors = priors_in;
    res_to_layer = Eigen::ArrayXXd::Zero(n_res * graph.d_c, m_points);
    layer_to_res.resize(k_layers * p, m_points);
    for (int k = 0; k < k_layers; ++k)
        for (int j = 0; j < p; ++j) layer_to_res.row(k * p + j) = priors.row(k);
}

long ResourceAlphabet::combos() const {
    long c = 1;
    for (const auto& s : symbols) c *= static_cast<long>(s.size());
    return c;
}

ResourceAlphabet full_alphabet(int d_c, int m_points) {
    ResourceAlphabet a;
    a.symbols.resize(d_c);
    a.members.resize(d_c);
    for (int j = 0; j < d_c; ++j) {
        a.symbols[j].resize(m_points);
        a.members[j].resize(m_points);
        for (int m = 0; m < m_points; ++m) {
            a.symbols[j][m] = m;
            a.members[j][m] = {m};
        }
    }
    return a;
}

ResourceAlphabet projected_alphabet(const Codebook& cb, const FactorGraph& graph, int n,
                                    double tol) {
    ResourceAlphabet a;
    const int d_c = static_cast<int>(graph.xi[n].size());
    a.symbols.resize(d_c);
    a.members.resize(d_c);
    for (int j = 0; j < d_c; ++j) {
        const auto groups = projection_groups(cb, graph.xi[n][j], n, tol);
        for (const auto& g : groups) {
            a.symbols[j].push_back(g.front());
            a.members[j].push_back(g);
        }
    }
    return a;
}

DistanceTables build_distance_tables(const Codebook& cb, const FactorGraph& graph,
                                     const Eigen::VectorXcd& y,
                                     const Eigen::MatrixXcd& h_est, double noise_var,
                                     bool projected) {
    if (noise_var <= 0.0)
        throw std::invalid_argument("build_distance_tables: noise_var must be positive");
    DistanceTables t;
    const int n_res = graph.resources();
    t.f.resize(n_res);
    t.alphabet.resize(n_res);
    for (int n = 0; n < n_res; ++n) {
        const int d_c = static_cast<int>(graph.xi[n].size());
        t.alphabet[n] = projected ? projected_alphabet(cb, graph, n)
                                  : full_alphabet(d_c, cb.m_points);
        const auto& alph = t.alphabet[n];
        // per (user, symbol) channel-weighted component
        std::vector<std::vector<Cplx>> comp(d_c);
        for (int j = 0; j < d_c; ++j) {
            const int k = graph.xi[n][j];
            comp[j].reserve(alph.symbols[j].size());
            for (int m : alph.symbols[j]) comp[j].push_back(h_est(n, k) * cb.component(n, k, m));
        }
        const long total = alph.combos();
        t.f[n].resize(total);
        std::vector<int> idx(d_c, 0);
        for (long c = 0; c < total; ++c) {
            Cplx s = 0.0;
            for (int j = 0; j < d_c; ++j) s += comp[j][idx[j]];
            t.f[n](c) = std::norm(y(n) - s) / noise_var;
            for (int j = 0; j < d_c; ++j) {
                if (++idx[j] < static_cast<int>(alph.symbols[j].size())) break;
                idx[j] = 0;
            }
        }
    }
    return t;
}

namespace {

void normalize_row(Eigen::ArrayXXd& rows, int row) {
    const double m = rows.row(row).maxCoeff();
    if (m != kNegInf && m != 0.0) rows.row(row) -= m;
}

}  // namespace

void resource_update(MessageTable& table, const FactorGraph& graph,
                     const DistanceTables& tables, int n, int k, MaxStarMode mode) {
    const auto& alph = tables.alphabet[n];
    const int d_c = static_cast<int>(graph.xi[n].size());
    const int jt = graph.pos_in_xi(n, k);
    const int m_points = static_cast<int>(table.priors.cols());

    // incoming messages projected onto the enumeration alphabet
    std::vector<std::vector<double>> in(d_c);
    for (int j = 0; j < d_c; ++j) {
        const int u = graph.xi[n][j];
        const int edge = u * graph.p_dims() + graph.pos_in_zeta(u, n);
        in[j].resize(alph.symbols[j].size());
        for (size_t a = 0; a < alph.symbols[j].size(); ++a) {
            double v = kNegInf;
            for (int m : alph.members[j][a]) v = max_star(v, table.layer_to_res(edge, m), mode);
            in[j][a] = v;
        }
    }

    std::vector<double> acc(alph.symbols[jt].size(), kNegInf);
    const long total = alph.combos();
    std::vector<int> idx(d_c, 0);
    for (long c = 0; c < total; ++c) {
        double v = -tables.f[n](c);
        for (int j = 0; j < d_c; ++j)
            if (j != jt) v += in[j][idx[j]];
        acc[idx[jt]] = max_star(acc[idx[jt]], v, mode);
        for (int j = 0; j < d_c; ++j) {
            if (++idx[j] < static_cast<int>(alph.symbols[j].size())) break;
            idx[j] = 0;
        }
    }

    const int edge = n * graph.d_c + jt;
    for (int m = 0; m < m_points; ++m) table.res_to_layer(edge, m) = kNegInf;
    for (size_t a = 0; a < acc.size(); ++a)
        for (int m : alph.members[jt][a]) table.res_to_layer(edge, m) = acc[a];
    normalize_row(table.res_to_layer, edge);
}

void layer_update(MessageTable& table, const FactorGraph& graph, int k, int n) {
    const int p = graph.p_dims();
    const int row = k * p + graph.pos_in_zeta(k, n);
    Eigen::ArrayXd msg = table.priors.row(k);
    for (int q = 0; q < p; ++q) {
        const int l = graph.zeta[k][q];
        if (l == n) continue;
        msg += table.res_to_layer.row(l * graph.d_c + graph.pos_in_xi(l, k)).array().transpose();
    }
    table.layer_to_res.row(row) = msg;
    normalize_row(table.layer_to_res, row);
}

Eigen::ArrayXd posterior(const MessageTable& table, const FactorGraph& graph, int k) {
    Eigen::ArrayXd out = table.priors.row(k);
    for (int n : graph.zeta[k])
        out += table.res_to_layer.row(n * graph.d_c + graph.pos_in_xi(n, k)).array().transpose();
    return out;
}

Eigen::ArrayXd bit_llr_from_codeword(const Eigen::ArrayXd& codeword_llr, int bits,
                                     MaxStarMode mode) {
    Eigen::ArrayXd llr(bits);
    for (int i = 0; i < bits; ++i) {
        double pos = kNegInf, neg = kNegInf;
        for (int m = 0; m < codeword_llr.size(); ++m) {
            if ((m >> i) & 1)
                pos = max_star(pos, codeword_llr(m), mode);
            else
                neg = max_star(neg, codeword_llr(m), mode);
        }
        if (pos == kNegInf && neg == kNegInf)
            llr(i) = 0.0;
        else if (pos == kNegInf)
            llr(i) = -kLlrSaturation;
        else if (neg == kNegInf)
            llr(i) = kLlrSaturation;
        else
            llr(i) = pos - neg;
    }
    return llr;
}

LlrOutput run_mpa(const Eigen::VectorXcd& y, const Codebook& cb, const FactorGraph& graph,
                  const Eigen::MatrixXcd& h_est, double noise_var,
                  const Eigen::ArrayXXd& priors, int iterations, MaxStarMode mode,
                  bool projected) {
    if (iterations < 1) throw std::invalid_argument("run_mpa: iterations must be >= 1");
    const auto tables = build_distance_tables(cb, graph, y, h_est, noise_var, projected);
    MessageTable table;
    table.init(graph, cb.m_points, priors);
    for (int it = 0; it < iterations; ++it) {
        for (int n = 0; n < graph.resources(); ++n)
            for (int k : graph.xi[n]) resource_update(table, graph, tables, n, k, mode);
        for (int k = 0; k < graph.users(); ++k)
            for (int n : graph.zeta[k]) layer_update(table, graph, k, n);
    }
    LlrOutput out;
    out.codeword_llr.resize(graph.users(), cb.m_points);
    out.bit_llr.resize(graph.users(), cb.bits_per_symbol());
    for (int k = 0; k < graph.users(); ++k) {
        const Eigen::ArrayXd post = posterior(table, graph, k);
        out.codeword_llr.row(k) = post;
        out.bit_llr.row(k) = bit_llr_from_codeword(post, cb.bits_per_symbol(), mode);
    }
    return out;
}

Eigen::ArrayXXd codeword_priors_from_bits(const Eigen::ArrayXXd& bit_priors, int m_points) {
    const int k_layers = static_cast<int>(bit_priors.rows());
    Eigen::ArrayXXd priors = Eigen::ArrayXXd::Zero(k_layers, m_points);
    for (int k = 0; k < k_layers; ++k)
        for (int m = 0; m < m_points; ++m)
            for (int i = 0; i < bit_priors.cols(); ++i)
                if ((m >> i) & 1) priors(k, m) += bit_priors(k, i);
    return priors;
}

}  // namespace scma
