#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "scma/channel.hpp"
#include "scma/codebook.hpp"
#include "scma/factor_graph.hpp"
#include "scma/mpa.hpp"
#include "scma/sphere.hpp"

namespace scma {

enum class DecoderKind { MaxLogMpa, LogMpa, LsdMpa, NpLsdMpa, Lnp, LsdLnp };

DecoderKind decoder_kind_from_string(const std::string& s);
std::string to_string(DecoderKind k);

// A decoder variant bundles the dispatch switches the kinds map to. Tests may
// flip individual switches; make_variant fills them per kind.
struct DecoderVariant {
    DecoderKind kind = DecoderKind::MaxLogMpa;
    int t_max = 0;
    double epsilon = 1e-3;
    double alpha = 0.0;  // 0 selects the noise-matched default alpha = sigma
    MaxStarMode mode = MaxStarMode::MaxLog;

    bool use_lists = false;
    bool cross_prune = false;  // -inf LLR pruning across subcarriers
    bool dup_prune = false;    // one branch per projection group
    bool projected = false;    // exact updates on the projected alphabet
    RadiusPolicy::Mode radius_mode = RadiusPolicy::Mode::Infinite;
};

DecoderVariant make_variant(DecoderKind kind, int t_max = 0, double epsilon = 1e-3,
                            double alpha = 0.0);

struct ExclusionMask {
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> excluded;  // K x M

    static ExclusionMask none(int k_layers, int m_points);
    bool any() const { return excluded.any(); }
};

// Candidates of one subcarrier mapped to per-user codeword indices.
struct ResourceCandidates {
    std::vector<std::vector<int>> symbols;  // [candidate][position in xi_n]
    Eigen::ArrayXd f;                       // f_n(x) per candidate
};

ResourceCandidates map_candidates(const CandidateList& list, int span_dim, double alpha,
                                  double noise_var);

// Resource update marginalized over the candidate list instead of the full
// combination space. A symbol with no surviving candidate gets the -inf
// sentinel; when grouping is active the list holds representatives and finite
// values are replicated to members. An edge whose symbols are all excluded
// degenerates to a uniform message.
void approx_resource_update(const ResourceCandidates& cands, MessageTable& table,
                            const FactorGraph& graph, int n, int k, MaxStarMode mode,
                            const ResourceAlphabet* groups, long long* degeneracies);

// Rejects a partial path once its just-completed layer symbol is excluded.
// With grouping, a representative stands for all members, so it is dropped
// only when the whole group is excluded. An empty mask admits everything.
// Holds references: mask and groups must outlive the returned pruner.
LevelPruner cross_subcarrier_pruner(const ExclusionMask& mask, const FactorGraph& graph,
                                    int resource, int span_dim,
                                    const ResourceAlphabet* groups = nullptr);

// Expands only the lowest-indexed member of each projection group; the
// sibling branches share its metric and are pruned.
LevelPruner lnp_duplicate_pruner(const ResourceAlphabet& groups, int span_dim);

inline int span_symbol(const std::vector<std::int8_t>& u, int level, int span_dim) {
    int m = 0;
    for (int d = 0; d < span_dim; ++d)
        if (u[level + d] > 0) m |= (1 << d);
    return m;
}

struct DetectDiagnostics {
    SearchStats search;                // merged over subcarriers
    long long searches = 0;            // subcarrier searches run
    long long degeneracies = 0;
    long long radius_fallbacks = 0;    // empty list under chi-square radius
    std::vector<int> max_branching;    // per xi position: distinct admitted symbols
    long long list_total = 0;          // candidates kept across subcarriers

    void merge(const DetectDiagnostics& other);
};

struct DetectResult {
    LlrOutput llr;
    DetectDiagnostics diag;
};

// One detection pass over a received vector: for list variants a single LSD
// pass per subcarrier in descending order (masks propagate during this pass),
// then `iterations` MPA rounds on the frozen lists; exact variants run the
// full (or projected) updates directly.
DetectResult detect(const DecoderVariant& variant, const Eigen::VectorXcd& y,
                    const Codebook& cb, const FactorGraph& graph,
                    const Eigen::MatrixXcd& h_est, double noise_var,
                    const Eigen::ArrayXXd& priors, int iterations,
                    const ExclusionMask* initial_mask = nullptr);

}  // namespace scma
