#pragma once

#include <string>
#include <vector>

#include "scma/lsd_mpa.hpp"

namespace scma {

// Inputs for the closed-form complexity rows. n_k holds the (average) visited
// node counts per tree level, leaf first; n_hat_l counts the radius updates.
struct ComplexityParams {
    int n = 0;
    int k = 0;
    int d_c = 0;
    int m = 0;
    int it = 0;
    int t_max = 0;
    int depth = 0;                    // L = d_c log2 M
    long long n_hat_l = 0;
    std::vector<long long> n_k;
    int pm_refresh = 1;               // iterations before partial marginalization
    int pm_rs = 0;                    // reference-symbol budget R_s
    int projections = 0;              // per-resource alphabet for the LNP row
};

// FLOP convention: complex multiply = 6 real ops, complex add = 2; a square
// root costs 6 flops.
struct ComplexityReport {
    long long resource_update_flops = 0;
    long long layer_update_flops = 0;
    long long posterior_flops = 0;
    long long lsd_pre = 0;      // per subcarrier: 2L^3 + 2L^2 + L
    long long lsd_search = 0;   // sum_k (2k+7) N_k
    long long sphere_total = 0; // N * (lsd_pre + lsd_search)
    long long summations = 0;
    long long multiplications = 0;
    long long comparisons = 0;
    long long sqrt_ops = 0;
};

long long flops_from_visited(const std::vector<long long>& n_k);

ComplexityReport analytic_complexity(DecoderKind kind, const ComplexityParams& p);

// Partial-marginalization MPA is kept as an analytic row only: after
// pm_refresh full iterations the resource work drops to
// C_PM = (N-T) M^(dc - floor(Rs/N)) + T M^(dc - ceil(Rs/N)), T = Rs mod N.
ComplexityReport analytic_complexity_pm(const ComplexityParams& p);

struct BerRecord {
    std::string decoder;
    double ebno_db = 0.0;
    long long bits = 0;
    long long bit_errors = 0;
    long frames = 0;

    double ber() const { return bits > 0 ? static_cast<double>(bit_errors) / bits : 0.0; }
};

// Mergeable per-run measurement; merge is commutative and associative.
struct RunAggregate {
    long long bits = 0;
    long long bit_errors = 0;
    long frames = 0;
    long searches = 0;
    std::vector<long long> visited;  // per level
    long long radius_updates = 0;
    long long degeneracies = 0;
    long long radius_fallbacks = 0;
    std::vector<int> max_branching;

    void add_detect(const DetectDiagnostics& d);
    void merge(const RunAggregate& other);
    long long flops_estimate() const { return flops_from_visited(visited); }
    double mean_visited(int level) const;
};

}  // namespace scma
