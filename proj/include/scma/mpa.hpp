#pragma once

#include <Eigen/Core>
#include <limits>
#include <vector>

#include "scma/channel.hpp"
#include "scma/codebook.hpp"
#include "scma/factor_graph.hpp"

namespace scma {

enum class MaxStarMode { Exact, MaxLog };

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Jacobian logarithm log(e^a + e^b). Total on [-inf, inf): never NaN.
inline double max_star(double a, double b, MaxStarMode mode) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = a > b ? a : b;
    if (mode == MaxStarMode::MaxLog) return m;
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

// Log-domain edge messages. Edges are indexed from the resource side as
// n*d_c + j (j = position in xi_n) and from the layer side as k*P + p
// (p = position in zeta_k).
struct MessageTable {
    Eigen::ArrayXXd res_to_layer;  // (N*d_c) x M
    Eigen::ArrayXXd layer_to_res;  // (K*P) x M
    Eigen::ArrayXXd priors;        // K x M

    void init(const FactorGraph& graph, int m_points, const Eigen::ArrayXXd& priors_in);
};

// Per-resource enumeration alphabet. Plain MPA enumerates all M symbols per
// colliding user; LNP codebooks enumerate one representative per projection
// group (identical components make the marginalization exact either way).
struct ResourceAlphabet {
    std::vector<std::vector<int>> symbols;               // [j][a] representative index
    std::vector<std::vector<std::vector<int>>> members;  // [j][a] all group members
    long combos() const;
};

ResourceAlphabet full_alphabet(int d_c, int m_points);
ResourceAlphabet projected_alphabet(const Codebook& cb, const FactorGraph& graph, int n,
                                    double tol = 1e-9);

// f_n(x) = |y_n - sum_k h_nk x_nk|^2 / sigma^2 for every combination, mixed
// radix with the first user in xi_n fastest. Computed once per received
// vector and shared across iterations.
struct DistanceTables {
    std::vector<Eigen::ArrayXd> f;
    std::vector<ResourceAlphabet> alphabet;
};

DistanceTables build_distance_tables(const Codebook& cb, const FactorGraph& graph,
                                     const Eigen::VectorXcd& y,
                                     const Eigen::MatrixXcd& h_est, double noise_var,
                                     bool projected = false);

void resource_update(MessageTable& table, const FactorGraph& graph,
                     const DistanceTables& tables, int n, int k, MaxStarMode mode);

void layer_update(MessageTable& table, const FactorGraph& graph, int k, int n);

Eigen::ArrayXd posterior(const MessageTable& table, const FactorGraph& graph, int k);

// L(b_i) = max*_{m: bit i set} I(m) - max*_{m: bit i clear} I(m); an empty
// side saturates at +-50 to keep downstream decoders in range.
Eigen::ArrayXd bit_llr_from_codeword(const Eigen::ArrayXd& codeword_llr, int bits,
                                     MaxStarMode mode);

inline constexpr double kLlrSaturation = 50.0;

struct LlrOutput {
    Eigen::ArrayXXd codeword_llr;  // K x M
    Eigen::ArrayXXd bit_llr;       // K x log2(M)
};

// Flooding schedule: all resource updates, then all layer updates, repeated
// `iterations` times; then posteriors and per-bit LLRs.
LlrOutput run_mpa(const Eigen::VectorXcd& y, const Codebook& cb, const FactorGraph& graph,
                  const Eigen::MatrixXcd& h_est, double noise_var,
                  const Eigen::ArrayXXd& priors, int iterations, MaxStarMode mode,
                  bool projected = false);

// Codeword log-priors from per-bit prior LLRs: L(x^m) = sum_i bit_i(m) La(b_i).
Eigen::ArrayXXd codeword_priors_from_bits(const Eigen::ArrayXXd& bit_priors, int m_points);

}  // namespace scma
