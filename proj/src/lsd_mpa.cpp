#include "scma/lsd_mpa.hpp"

#include <cmath>
#include <stdexcept>

namespace scma {

DecoderKind decoder_kind_from_string(const std::string& s) {
    if (s == "maxlog-mpa") return DecoderKind::MaxLogMpa;
    if (s == "log-mpa") return DecoderKind::LogMpa;
    if (s == "lsd-mpa") return DecoderKind::LsdMpa;
    if (s == "np-lsd-mpa") return DecoderKind::NpLsdMpa;
    if (s == "lnp") return DecoderKind::Lnp;
    if (s == "lsd-lnp") return DecoderKind::LsdLnp;
    throw std::invalid_argument("unknown decoder kind: " + s);
}

std::string to_string(DecoderKind k) {
    switch (k) {
        case DecoderKind::MaxLogMpa: return "maxlog-mpa";
        case DecoderKind::LogMpa: return "log-mpa";
        case DecoderKind::LsdMpa: return "lsd-mpa";
        case DecoderKind::NpLsdMpa: return "np-lsd-mpa";
        case DecoderKind::Lnp: return "lnp";
        case DecoderKind::LsdLnp: return "lsd-lnp";
    }
    return "maxlog-mpa";
}

DecoderVariant make_variant(DecoderKind kind, int t_max, double epsilon, double alpha) {
    DecoderVariant v;
    v.kind = kind;
    v.t_max = t_max;
    v.epsilon = epsilon;
    v.alpha = alpha;
    switch (kind) {
        case DecoderKind::MaxLogMpa:
            break;
        case DecoderKind::LogMpa:
            v.mode = MaxStarMode::Exact;
            break;
        case DecoderKind::Lnp:
            v.projected = true;
            break;
        case DecoderKind::LsdMpa:
            v.use_lists = true;
            v.radius_mode = RadiusPolicy::Mode::Infinite;
            break;
        case DecoderKind::NpLsdMpa:
        case DecoderKind::LsdLnp:
            v.use_lists = true;
            v.cross_prune = true;
            v.dup_prune = true;
            v.radius_mode = RadiusPolicy::Mode::ChiSquare;
            break;
    }
    return v;
}

void DetectDiagnostics::merge(const DetectDiagnostics& other) {
    if (search.visited.empty()) search.visited.assign(other.search.visited.size(), 0);
    for (size_t l = 0; l < other.search.visited.size(); ++l)
        search.visited[l] += other.search.visited[l];
    search.radius_updates += other.search.radius_updates;
    search.leaves += other.search.leaves;
    search.sibling_order_violations += other.search.sibling_order_violations;
    searches += other.searches;
    degeneracies += other.degeneracies;
    radius_fallbacks += other.radius_fallbacks;
    list_total += other.list_total;
    if (max_branching.size() < other.max_branching.size())
        max_branching.resize(other.max_branching.size(), 0);
    for (size_t j = 0; j < other.max_branching.size(); ++j)
        max_branching[j] = std::max(max_branching[j], other.max_branching[j]);
}

ExclusionMask ExclusionMask::none(int k_layers, int m_points) {
    ExclusionMask m;
    m.excluded = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
        k_layers, m_points, false);
    return m;
}

ResourceCandidates map_candidates(const CandidateList& list, int span_dim, double alpha,
                                  double noise_var) {
    ResourceCandidates rc;
    const int n_cand = static_cast<int>(list.entries.size());
    rc.f.resize(n_cand);
    rc.symbols.resize(n_cand);
    for (int c = 0; c < n_cand; ++c) {
        const auto& e = list.entries[c];
        const int l = static_cast<int>(e.u.size());
        const int d_c = l / span_dim;
        rc.symbols[c].resize(d_c);
        for (int j = 0; j < d_c; ++j) {
            int m = 0;
            for (int d = 0; d < span_dim; ++d)
                if (e.u[j * span_dim + d] > 0) m |= (1 << d);
            rc.symbols[c][j] = m;
        }
        // the stored distance is |y - H'u|^2 + alpha^2 L
        rc.f(c) = (e.dist - alpha * alpha * l) / noise_var;
    }
    return rc;
}

void approx_resource_update(const ResourceCandidates& cands, MessageTable& table,
                            const FactorGraph& graph, int n, int k, MaxStarMode mode,
                            const ResourceAlphabet* groups, long long* degeneracies) {
    if (cands.symbols.empty())
        throw std::invalid_argument("approx_resource_update: empty candidate list");
    const int d_c = static_cast<int>(graph.xi[n].size());
    const int jt = graph.pos_in_xi(n, k);
    const int m_points = static_cast<int>(table.priors.cols());

    // incoming messages per (position, symbol), projected onto groups when the
    // list holds representatives
    Eigen::ArrayXXd in(d_c, m_points);
    in.setConstant(kNegInf);
    for (int j = 0; j < d_c; ++j) {
        const int u = graph.xi[n][j];
        const int edge = u * graph.p_dims() + graph.pos_in_zeta(u, n);
        if (groups) {
            for (size_t a = 0; a < groups->symbols[j].size(); ++a) {
                double v = kNegInf;
                for (int m : groups->members[j][a])
                    v = max_star(v, table.layer_to_res(edge, m), mode);
                in(j, groups->symbols[j][a]) = v;
            }
        } else {
            for (int m = 0; m < m_points; ++m) in(j, m) = table.layer_to_res(edge, m);
        }
    }

    Eigen::ArrayXd acc(m_points);
    acc.setConstant(kNegInf);
    for (size_t c = 0; c < cands.symbols.size(); ++c) {
        double v = -cands.f(static_cast<int>(c));
        for (int j = 0; j < d_c; ++j)
            if (j != jt) v += in(j, cands.symbols[c][j]);
        const int m = cands.symbols[c][jt];
        acc(m) = max_star(acc(m), v, mode);
    }

    const int edge = n * graph.d_c + jt;
    Eigen::ArrayXd out(m_points);
    out.setConstant(kNegInf);
    if (groups) {
        for (size_t a = 0; a < groups->symbols[jt].size(); ++a) {
            const double v = acc(groups->symbols[jt][a]);
            for (int m : groups->members[jt][a]) out(m) = v;
        }
    } else {
        out = acc;
    }

    const double mx = out.maxCoeff();
    if (mx == kNegInf) {
        // every symbol excluded: keep MPA well-posed with a uniform message
        out.setZero();
        if (degeneracies) ++(*degeneracies);
    } else {
        out -= mx;
    }
    table.res_to_layer.row(edge) = out;
}

LevelPruner cross_subcarrier_pruner(const ExclusionMask& mask, const FactorGraph& graph,
                                    int resource, int span_dim,
                                    const ResourceAlphabet* groups) {
    const std::vector<int> users = graph.xi[resource];
    // member lists per (position, symbol); singletons without grouping
    std::vector<std::vector<std::vector<int>>> members(users.size());
    const int m_points = static_cast<int>(mask.excluded.cols());
    for (size_t j = 0; j < users.size(); ++j) {
        members[j].resize(m_points);
        if (groups) {
            for (size_t a = 0; a < groups->members[j].size(); ++a)
                for (int m : groups->members[j][a])
                    members[j][m] = groups->members[j][a];
        } else {
            for (int m = 0; m < m_points; ++m) members[j][m] = {m};
        }
    }
    return [&mask, users, span_dim, members = std::move(members)](
               int level, const std::vector<std::int8_t>& u) {
        if (level % span_dim != 0) return true;
        const int j = level / span_dim;
        const int m = span_symbol(u, level, span_dim);
        for (int member : members[j][m])
            if (!mask.excluded(users[j], member)) return true;
        return false;
    };
}

LevelPruner lnp_duplicate_pruner(const ResourceAlphabet& groups, int span_dim) {
    std::vector<std::vector<int>> rep_of(groups.symbols.size());
    for (size_t j = 0; j < groups.symbols.size(); ++j) {
        int m_points = 0;
        for (const auto& g : groups.members[j])
            for (int m : g) m_points = std::max(m_points, m + 1);
        rep_of[j].assign(m_points, 0);
        for (size_t a = 0; a < groups.members[j].size(); ++a)
            for (int m : groups.members[j][a]) rep_of[j][m] = groups.symbols[j][a];
    }
    return [span_dim, rep_of = std::move(rep_of)](int level,
                                                  const std::vector<std::int8_t>& u) {
        if (level % span_dim != 0) return true;
        const int j = level / span_dim;
        const int m = span_symbol(u, level, span_dim);
        return m == rep_of[j][m];
    };
}

namespace {

struct ListPass {
    std::vector<ResourceCandidates> cands;       // per resource
    std::vector<ResourceAlphabet> groups;        // per resource (dup_prune only)
    DetectDiagnostics diag;
};

ListPass run_list_pass(const DecoderVariant& v, const Eigen::VectorXcd& y,
                       const Codebook& cb, const FactorGraph& graph,
                       const Eigen::MatrixXcd& h_est, double noise_var,
                       ExclusionMask& mask, double alpha) {
    const int n_res = graph.resources();
    const int d_c = graph.d_c;
    const int span = cb.d_lattice;
    const int depth = d_c * span;

    ListPass pass;
    pass.cands.resize(n_res);
    pass.diag.search.visited.assign(depth, 0);
    pass.diag.max_branching.assign(d_c, 0);

    if (v.dup_prune) {
        pass.groups.resize(n_res);
        for (int n = 0; n < n_res; ++n) pass.groups[n] = projected_alphabet(cb, graph, n);
    }

    // member lists for the mask update: which symbols a candidate covers
    std::vector<std::vector<std::vector<int>>> group_of(v.dup_prune ? n_res : 0);
    if (v.dup_prune) {
        for (int n = 0; n < n_res; ++n) {
            group_of[n].resize(d_c);
            for (int j = 0; j < d_c; ++j) {
                group_of[n][j].assign(cb.m_points, 0);
                for (size_t a = 0; a < pass.groups[n].members[j].size(); ++a)
                    for (int m : pass.groups[n].members[j][a])
                        group_of[n][j][m] = static_cast<int>(a);
            }
        }
    }

    RadiusPolicy policy;
    policy.mode = v.radius_mode;
    policy.epsilon = v.epsilon;
    policy.sigma2 = noise_var;

    std::vector<std::uint32_t> admitted(d_c, 0);

    // descending resource order: exclusions found on later-indexed resources
    // prune the searches on earlier ones
    for (int n = n_res - 1; n >= 0; --n) {
        const EffectiveRow row = effective_row(cb, graph, h_est, n);
        const AugmentedSystem sys = augment_and_factor(row.h_row, y(n), alpha);

        LevelPruner dup, cross;
        if (v.dup_prune) dup = lnp_duplicate_pruner(pass.groups[n], span);
        if (v.cross_prune)
            cross = cross_subcarrier_pruner(mask, graph, n, span,
                                            v.dup_prune ? &pass.groups[n] : nullptr);
        admitted.assign(d_c, 0);
        LevelPruner pruner = [&](int level, const std::vector<std::int8_t>& u) -> bool {
            if (dup && !dup(level, u)) return false;
            if (cross && !cross(level, u)) return false;
            if (level % span == 0)
                admitted[level / span] |= (1u << span_symbol(u, level, span));
            return true;
        };

        auto [list, stats] = lsd_search(sys, policy, v.t_max, pruner);
        if (list.entries.empty()) {
            // radius missed every leaf; redo with an open radius so MPA has a
            // candidate to work with
            ++pass.diag.radius_fallbacks;
            RadiusPolicy open;
            open.mode = RadiusPolicy::Mode::Infinite;
            auto [list2, stats2] = lsd_search(sys, open, v.t_max, pruner);
            list = std::move(list2);
            for (size_t l = 0; l < stats.visited.size(); ++l)
                stats.visited[l] += stats2.visited[l];
            stats.radius_updates += stats2.radius_updates;
            stats.leaves += stats2.leaves;
            stats.sibling_order_violations += stats2.sibling_order_violations;
        }

        for (int j = 0; j < d_c; ++j) {
            int count = 0;
            for (int m = 0; m < cb.m_points; ++m)
                if (admitted[j] & (1u << m)) ++count;
            pass.diag.max_branching[j] = std::max(pass.diag.max_branching[j], count);
        }

        for (size_t l = 0; l < stats.visited.size(); ++l)
            pass.diag.search.visited[l] += stats.visited[l];
        pass.diag.search.radius_updates += stats.radius_updates;
        pass.diag.search.leaves += stats.leaves;
        pass.diag.search.sibling_order_violations += stats.sibling_order_violations;
        ++pass.diag.searches;
        pass.diag.list_total += static_cast<long long>(list.entries.size());

        pass.cands[n] = map_candidates(list, span, alpha, noise_var);

        if (v.cross_prune) {
            for (int j = 0; j < d_c; ++j) {
                const int k = graph.xi[n][j];
                std::vector<bool> covered(cb.m_points, false);
                for (const auto& sym : pass.cands[n].symbols) {
                    const int m = sym[j];
                    if (v.dup_prune) {
                        for (int member : pass.groups[n].members[j][group_of[n][j][m]])
                            covered[member] = true;
                    } else {
                        covered[m] = true;
                    }
                }
                for (int m = 0; m < cb.m_points; ++m)
                    if (!covered[m]) mask.excluded(k, m) = true;
            }
        }
    }
    return pass;
}

}  // namespace

DetectResult detect(const DecoderVariant& variant, const Eigen::VectorXcd& y,
                    const Codebook& cb, const FactorGraph& graph,
                    const Eigen::MatrixXcd& h_est, double noise_var,
                    const Eigen::ArrayXXd& priors, int iterations,
                    const ExclusionMask* initial_mask) {
    if (noise_var <= 0.0) throw std::invalid_argument("detect: noise_var must be > 0");
    if (iterations < 1) throw std::invalid_argument("detect: iterations must be >= 1");

    const double alpha = variant.alpha > 0.0 ? variant.alpha : std::sqrt(noise_var);

    if (variant.projected || variant.kind == DecoderKind::LsdLnp) {
        // projection-based variants need codewords that actually overlap
        for (int n = 0; n < graph.resources(); ++n)
            for (int k : graph.xi[n])
                if (static_cast<int>(projection_groups(cb, k, n).size()) >= cb.m_points)
                    throw std::invalid_argument(
                        "detect: " + to_string(variant.kind) +
                        " requires a low-projection codebook");
    }

    DetectResult res;

    if (!variant.use_lists) {
        res.llr = run_mpa(y, cb, graph, h_est, noise_var, priors, iterations, variant.mode,
                          variant.projected);
        return res;
    }

    if (variant.t_max < 1) throw std::invalid_argument("detect: t_max must be >= 1");
    if (variant.dup_prune) {
        // under duplicate pruning the search space is the representative grid
        long cap = 0;
        for (int n = 0; n < graph.resources(); ++n)
            cap = std::max(cap, projected_alphabet(cb, graph, n).combos());
        if (variant.t_max > cap)
            throw std::invalid_argument("detect: t_max exceeds the projected search space");
    } else {
        const long full =
            static_cast<long>(std::pow(static_cast<double>(cb.m_points), graph.d_c));
        if (variant.t_max > full)
            throw std::invalid_argument("detect: t_max exceeds M^dc");
    }

    ExclusionMask mask = initial_mask ? *initial_mask
                                      : ExclusionMask::none(cb.k_layers, cb.m_points);
    ListPass pass =
        run_list_pass(variant, y, cb, graph, h_est, noise_var, mask, alpha);

    MessageTable table;
    table.init(graph, cb.m_points, priors);
    for (int it = 0; it < iterations; ++it) {
        for (int n = 0; n < graph.resources(); ++n)
            for (int k : graph.xi[n])
                approx_resource_update(pass.cands[n], table, graph, n, k, variant.mode,
                                       variant.dup_prune ? &pass.groups[n] : nullptr,
                                       &pass.diag.degeneracies);
        for (int k = 0; k < graph.users(); ++k)
            for (int n : graph.zeta[k]) layer_update(table, graph, k, n);
    }

    res.llr.codeword_llr.resize(graph.users(), cb.m_points);
    res.llr.bit_llr.resize(graph.users(), cb.bits_per_symbol());
    for (int k = 0; k < graph.users(); ++k) {
        const Eigen::ArrayXd post = posterior(table, graph, k);
        res.llr.codeword_llr.row(k) = post;
        res.llr.bit_llr.row(k) =
            bit_llr_from_codeword(post, cb.bits_per_symbol(), variant.mode);
    }
    res.diag = std::move(pass.diag);
    return res;
}

}  // namespace scma
