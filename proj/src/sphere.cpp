#include "scma/sphere.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace scma {

AugmentedSystem augment_and_factor(const Eigen::RowVectorXcd& h_row, Cplx y_n,
                                   double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("augment_and_factor: alpha must be > 0");
    const int l = static_cast<int>(h_row.size());

    Eigen::MatrixXcd a(l + 1, l);
    a.row(0) = h_row;
    a.bottomRows(l) = alpha * Eigen::MatrixXcd::Identity(l, l);

    AugmentedSystem sys;
    sys.alpha = alpha;
    sys.depth = l;
    sys.q1.resize(l + 1, l);
    sys.r = Eigen::MatrixXcd::Zero(l, l);

    // modified Gram-Schmidt; column norms land on the diagonal, so r(i,i) is
    // real positive (alpha > 0 keeps the columns independent)
    for (int i = 0; i < l; ++i) {
        const double nrm = a.col(i).norm();
        sys.r(i, i) = nrm;
        sys.q1.col(i) = a.col(i) / nrm;
        for (int j = i + 1; j < l; ++j) {
            const Cplx rij = sys.q1.col(i).dot(a.col(j));  // q_i^† a_j
            sys.r(i, j) = rij;
            a.col(j) -= rij * sys.q1.col(i);
        }
    }

    Eigen::VectorXcd y_tilde = Eigen::VectorXcd::Zero(l + 1);
    y_tilde(0) = y_n;
    sys.y_reduced = sys.q1.adjoint() * y_tilde;
    sys.offset = std::max(0.0, y_tilde.squaredNorm() - sys.y_reduced.squaredNorm());
    return sys;
}

double initial_radius(const RadiusPolicy& policy, int depth, double alpha) {
    if (policy.mode == RadiusPolicy::Mode::Infinite)
        return std::numeric_limits<double>::infinity();
    if (policy.epsilon <= 0.0 || policy.epsilon >= 1.0)
        throw std::invalid_argument("initial_radius: need 0 < epsilon < 1");
    // chi-square(2) inverse CDF in closed form: F^-1(1-eps; 2) = -2 ln(eps)
    return policy.sigma2 / 2.0 * (-2.0 * std::log(policy.epsilon)) +
           alpha * alpha * depth;
}

long long SearchStats::flops_estimate() const {
    long long f = 0;
    for (size_t l = 0; l < visited.size(); ++l)
        f += (2 * (static_cast<long long>(l) + 1) + 7) * visited[l];
    return f;
}

namespace {

// scan for the worst entry; T_max comparisons, matching the step-6 accounting
int worst_entry(const CandidateList& list) {
    int w = 0;
    for (size_t i = 1; i < list.entries.size(); ++i)
        if (list.entries[i].dist > list.entries[w].dist) w = static_cast<int>(i);
    return w;
}

}  // namespace

std::pair<CandidateList, SearchStats> lsd_search(const AugmentedSystem& sys,
                                                 const RadiusPolicy& policy, int t_max,
                                                 const LevelPruner& pruner) {
    if (t_max < 1) throw std::invalid_argument("lsd_search: t_max must be >= 1");
    const int l_max = sys.depth;

    CandidateList list;
    list.capacity = t_max;
    list.current_radius = initial_radius(policy, l_max, sys.alpha);

    SearchStats stats;
    stats.visited.assign(l_max, 0);

    std::vector<std::int8_t> u(l_max, 0);
    std::vector<Cplx> yhat(l_max);
    std::vector<double> tacc(l_max, 0.0);   // distance accumulated above level l
    std::vector<int> tried(l_max, 0);
    std::vector<std::int8_t> step(l_max, 0);
    std::vector<double> di_first(l_max, 0.0);

    auto enter = [&](int l) {
        Cplx v = sys.y_reduced(l);
        for (int j = l + 1; j < l_max; ++j) v -= sys.r(l, j) * static_cast<double>(u[j]);
        yhat[l] = v;
        const std::int8_t first = v.real() >= 0.0 ? 1 : -1;  // sign(0) = +1
        u[l] = first;
        step[l] = static_cast<std::int8_t>(-2 * first);
        tried[l] = 0;
    };

    int l = l_max - 1;
    tacc[l] = sys.offset;
    enter(l);

    while (true) {
        ++stats.visited[l];
        ++tried[l];
        const double di = std::norm(yhat[l] - sys.r(l, l) * static_cast<double>(u[l]));
        if (tried[l] == 1)
            di_first[l] = di;
        else if (di < di_first[l] - 1e-12)
            ++stats.sibling_order_violations;

        const double t_new = tacc[l] + di;
        bool admit = t_new <= list.current_radius;
        if (admit && pruner) admit = pruner(l, u);

        bool descend = false;
        if (admit) {
            if (l == 0) {
                ++stats.leaves;
                if (static_cast<int>(list.entries.size()) < t_max) {
                    list.entries.push_back({u, t_new});
                    if (static_cast<int>(list.entries.size()) == t_max) {
                        list.current_radius = list.entries[worst_entry(list)].dist;
                        ++stats.radius_updates;
                    }
                } else if (t_new < list.current_radius) {
                    list.entries[worst_entry(list)] = {u, t_new};
                    list.current_radius = list.entries[worst_entry(list)].dist;
                    ++stats.radius_updates;
                }
            } else {
                tacc[l - 1] = t_new;
                --l;
                enter(l);
                descend = true;
            }
        }

        if (!descend) {
            // next sibling, backtracking through exhausted levels
            while (tried[l] == 2) {
                ++l;
                if (l == l_max) return {list, stats};
            }
            u[l] = static_cast<std::int8_t>(u[l] + step[l]);
        }
    }
}

std::pair<Eigen::MatrixXd, Eigen::VectorXi> pam_to_bpsk(const Eigen::VectorXi& u_pam,
                                                        int m_pam) {
    if (m_pam < 2 || (m_pam & (m_pam - 1)) != 0)
        throw std::invalid_argument("pam_to_bpsk: m_pam must be a power of two");
    int bits = 0;
    while ((1 << bits) < m_pam) ++bits;
    const int n = static_cast<int>(u_pam.size());

    Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(n, n * bits);
    Eigen::VectorXi u_prime(n * bits);
    for (int e = 0; e < n; ++e) {
        int v = u_pam(e);
        if (v % 2 == 0 || std::abs(v) > m_pam - 1)
            throw std::invalid_argument("pam_to_bpsk: entries must be odd in [-(M-1), M-1]");
        for (int i = 0; i < bits; ++i) {
            const int w = 1 << (bits - 1 - i);
            gamma(e, e * bits + i) = w;
            const int s = v > 0 ? 1 : -1;  // v stays odd, never 0
            u_prime(e * bits + i) = s;
            v -= s * w;
        }
    }
    return {gamma, u_prime};
}

double chi2_coverage_test(double sigma2, double epsilon, long trials, double alpha,
                          int depth, Rng& rng) {
    if (trials < 10000)
        throw std::invalid_argument("chi2_coverage_test: trials must be >= 1e4");
    RadiusPolicy policy{RadiusPolicy::Mode::ChiSquare, epsilon, sigma2};
    const double c = initial_radius(policy, depth, alpha);
    long exceed = 0;
    for (long t = 0; t < trials; ++t) {
        const Cplx z = rng.cgaussian(sigma2);
        if (std::norm(z) + alpha * alpha * depth > c) ++exceed;
    }
    return static_cast<double>(exceed) / static_cast<double>(trials);
}

}  // namespace scma
