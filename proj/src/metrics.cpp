#include "scma/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace scma {

namespace {

long long ipow(long long base, int exp) {
    long long r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

}  // namespace

long long flops_from_visited(const std::vector<long long>& n_k) {
    long long f = 0;
    for (size_t l = 0; l < n_k.size(); ++l)
        f += (2 * (static_cast<long long>(l) + 1) + 7) * n_k[l];
    return f;
}

ComplexityReport analytic_complexity(DecoderKind kind, const ComplexityParams& p) {
    ComplexityReport r;
    const long long n = p.n, k = p.k, d = p.d_c, m = p.m, it = p.it;
    const long long md = ipow(m, p.d_c);
    // N (N/K d^2 - d) M written with integers: K P = N d so N^2 d^2 / K = K P^2
    const long long p_dims = n * d / k;
    const long long layer = it * (k * p_dims * p_dims - n * d) * m;
    const long long post = n * d * m;

    switch (kind) {
        case DecoderKind::MaxLogMpa:
        case DecoderKind::LogMpa:
            r.resource_update_flops = it * n * (3 * d * d + 3 * d) * md;
            r.layer_update_flops = layer;
            r.posterior_flops = post;
            r.summations = it * n * (2 * d * d - d) * md + layer + post;
            r.multiplications = it * n * (d * d + 3 * d) * md;
            r.comparisons = it * n * d * md;
            break;
        case DecoderKind::Lnp: {
            if (p.projections < 1)
                throw std::invalid_argument("analytic_complexity: projections required");
            const long long mp = p.projections;
            const long long mpd = ipow(mp, p.d_c);
            r.resource_update_flops = it * n * (3 * d * d + 3 * d) * mpd;
            r.layer_update_flops = it * (k * p_dims * p_dims - n * d) * mp;
            r.posterior_flops = n * d * mp;
            r.summations = it * n * (2 * d * d - d) * mpd + r.layer_update_flops +
                           r.posterior_flops;
            r.multiplications = it * n * (d * d + 3 * d) * mpd;
            r.comparisons = it * n * d * mpd;
            break;
        }
        case DecoderKind::LsdMpa:
        case DecoderKind::NpLsdMpa:
        case DecoderKind::LsdLnp: {
            const long long l_depth = p.depth;
            r.lsd_pre = 2 * l_depth * l_depth * l_depth + 2 * l_depth * l_depth + l_depth;
            r.lsd_search = flops_from_visited(p.n_k);
            r.sphere_total = n * (r.lsd_pre + r.lsd_search);
            r.resource_update_flops =
                it * n * d * d * p.t_max + n * p.n_hat_l * p.t_max;
            r.layer_update_flops = layer;
            r.posterior_flops = post;
            r.summations = it * n * (d * d - d) * p.t_max + layer + post;
            r.multiplications = 0;  // distances are reused from the search
            r.comparisons = it * n * d * p.t_max + n * p.n_hat_l * p.t_max;
            // MGS square roots, one per diagonal entry per subcarrier
            r.sqrt_ops = n * l_depth;
            break;
        }
    }
    return r;
}

ComplexityReport analytic_complexity_pm(const ComplexityParams& p) {
    ComplexityReport r;
    const long long n = p.n, k = p.k, d = p.d_c, m = p.m, it = p.it;
    const long long md = ipow(m, p.d_c);
    const long long p_dims = n * d / k;
    const long long t = p.pm_rs % p.n;
    const long long c_pm = (n - t) * ipow(m, p.d_c - p.pm_rs / p.n) +
                           t * ipow(m, p.d_c - (p.pm_rs + p.n - 1) / p.n);
    r.resource_update_flops = p.pm_refresh * n * (3 * d * d + 3 * d) * md +
                              (it - p.pm_refresh) * (3 * d * d + 3 * d) * c_pm;
    r.layer_update_flops = it * (k * p_dims * p_dims - n * d) * m;
    r.posterior_flops = n * d * m;
    r.summations = p.pm_refresh * n * (2 * d * d - d) * md +
                   (it - p.pm_refresh) * (2 * d * d - d) * c_pm +
                   r.layer_update_flops + r.posterior_flops;
    r.multiplications = p.pm_refresh * n * (d * d + 3 * d) * md +
                        (it - p.pm_refresh) * (d * d + 3 * d) * c_pm;
    r.comparisons = p.pm_refresh * n * d * md + (it - p.pm_refresh) * d * c_pm;
    return r;
}

void RunAggregate::add_detect(const DetectDiagnostics& d) {
    if (visited.empty()) visited.assign(d.search.visited.size(), 0);
    if (!d.search.visited.empty()) {
        if (visited.size() != d.search.visited.size())
            throw std::invalid_argument("RunAggregate: mismatched tree depth");
        for (size_t l = 0; l < visited.size(); ++l) visited[l] += d.search.visited[l];
    }
    radius_updates += d.search.radius_updates;
    degeneracies += d.degeneracies;
    radius_fallbacks += d.radius_fallbacks;
    if (max_branching.size() < d.max_branching.size())
        max_branching.resize(d.max_branching.size(), 0);
    for (size_t j = 0; j < d.max_branching.size(); ++j)
        max_branching[j] = std::max(max_branching[j], d.max_branching[j]);
    searches += d.searches;
}

void RunAggregate::merge(const RunAggregate& other) {
    bits += other.bits;
    bit_errors += other.bit_errors;
    frames += other.frames;
    searches += other.searches;
    if (visited.empty()) visited.assign(other.visited.size(), 0);
    for (size_t l = 0; l < other.visited.size(); ++l) visited[l] += other.visited[l];
    radius_updates += other.radius_updates;
    degeneracies += other.degeneracies;
    radius_fallbacks += other.radius_fallbacks;
    if (max_branching.size() < other.max_branching.size())
        max_branching.resize(other.max_branching.size(), 0);
    for (size_t j = 0; j < other.max_branching.size(); ++j)
        max_branching[j] = std::max(max_branching[j], other.max_branching[j]);
}

double RunAggregate::mean_visited(int level) const {
    if (searches == 0 || level >= static_cast<int>(visited.size())) return 0.0;
    return static_cast<double>(visited[level]) / static_cast<double>(searches);
}

}  // namespace scma
