// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Run through ctest or directly; takes a few minutes at -O2.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "scma/metrics.hpp"
#include "scma/oracle.hpp"
#include "scma/sim.hpp"
#include "scma/turbo.hpp"

using namespace scma;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", number,
                name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

struct Instance {
    Eigen::MatrixXcd h;
    Eigen::VectorXcd y;
    std::vector<int> sent;
};

Instance make_instance(const Codebook& cb, const FactorGraph& graph, double noise_var,
                       std::uint64_t seed) {
    Instance inst;
    Rng rng(seed);
    inst.h.resize(cb.n_resources, cb.k_layers);
    for (int n = 0; n < cb.n_resources; ++n)
        for (int k = 0; k < cb.k_layers; ++k) inst.h(n, k) = rng.cgaussian(1.0);
    inst.sent.resize(cb.k_layers);
    for (int k = 0; k < cb.k_layers; ++k)
        inst.sent[k] = static_cast<int>(rng.raw() % cb.m_points);
    ChannelRealization ch{inst.h, noise_var};
    inst.y = transmit(cb, inst.sent, ch, rng);
    (void)graph;
    return inst;
}

long long total_visited(const DetectDiagnostics& d) {
    long long t = 0;
    for (auto v : d.search.visited) t += v;
    return t;
}

// ---------------------------------------------------------------- criterion 1
void criterion_oracle_equivalence() {
    const auto cb = build_codebook(6, 4, 2, 4, RotationStyle::OptimalDiversity);
    const auto graph = FactorGraph::from_mappings(default_mappings(6, 4, 2));
    const double noise_var = 0.25;
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        const Instance inst = make_instance(cb, graph, noise_var, 10000 + rep);
        const Eigen::ArrayXXd priors = Eigen::ArrayXXd::Zero(6, 4);
        const auto exact = detect(make_variant(DecoderKind::MaxLogMpa), inst.y, cb, graph,
                                  inst.h, noise_var, priors, 5);
        const auto lsd = detect(make_variant(DecoderKind::LsdMpa, 64), inst.y, cb, graph,
                                inst.h, noise_var, priors, 5);
        worst = std::max(worst,
                         (lsd.llr.bit_llr - exact.llr.bit_llr).abs().maxCoeff());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[160];
    std::snprintf(buf, sizeof(buf), "max |LLR diff| = %.2e over 200 instances, %.1f s",
                  worst, secs);
    report(1, "full-list LSD-MPA equals Max-log-MPA", worst <= 1e-9 && secs < 60.0, buf);
}

// ---------------------------------------------------------------- criterion 2
void criterion_ml_equivalence() {
    Rng rng(0x2222);
    int mismatches = 0;
    // codebook-derived rows at L = 6; the full-diversity rotation keeps all
    // per-resource distances distinct, so the ML argmin is unique (the lnp
    // rotation ties whole projection groups by construction)
    const auto cb = build_codebook(6, 4, 2, 4, RotationStyle::OptimalDiversity);
    const auto graph = FactorGraph::from_mappings(default_mappings(6, 4, 2));
    for (int rep = 0; rep < 500; ++rep) {
        const Instance inst = make_instance(cb, graph, 0.3, 20000 + rep);
        const int n = rep % 4;
        const auto row = effective_row(cb, graph, inst.h, n);
        const auto sys = augment_and_factor(row.h_row, inst.y(n), 0.5);
        auto [list, stats] = lsd_search(sys, RadiusPolicy{}, 1);
        const auto oracle = brute_force_ml(inst.y(n), row.h_row);
        for (int i = 0; i < 6; ++i)
            if (static_cast<int>(list.entries[0].u[i]) != oracle.ml_point(i)) {
                ++mismatches;
                break;
            }
    }
    // plain random rows at L = 8
    for (int rep = 0; rep < 500; ++rep) {
        Eigen::RowVectorXcd h(8);
        for (int i = 0; i < 8; ++i) h(i) = rng.cgaussian(1.0);
        Eigen::VectorXcd u(8);
        for (int i = 0; i < 8; ++i) u(i) = rng.bit() ? 1.0 : -1.0;
        const Cplx y = (h * u)(0, 0) + rng.cgaussian(0.5);
        const auto sys = augment_and_factor(h, y, 0.7);
        auto [list, stats] = lsd_search(sys, RadiusPolicy{}, 1);
        const auto oracle = brute_force_ml(y, h);
        for (int i = 0; i < 8; ++i)
            if (static_cast<int>(list.entries[0].u[i]) != oracle.ml_point(i)) {
                ++mismatches;
                break;
            }
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "%d mismatches in 1000 instances", mismatches);
    report(2, "sphere search finds the ML point", mismatches == 0, buf);
}

// ---------------------------------------------------------------- criterion 3
void criterion_top_t() {
    Rng rng(0x3333);
    int bad = 0;
    const int t_max = 8, l = 6;
    for (int rep = 0; rep < 500; ++rep) {
        Eigen::RowVectorXcd h(l);
        for (int i = 0; i < l; ++i) h(i) = rng.cgaussian(1.0);
        const Cplx y = rng.cgaussian(4.0);
        const double alpha = 0.6;
        const auto sys = augment_and_factor(h, y, alpha);
        auto [list, stats] = lsd_search(sys, RadiusPolicy{}, t_max);
        const auto oracle = brute_force_ml(y, h);
        std::set<std::vector<std::int8_t>> got, want;
        for (const auto& e : list.entries) got.insert(e.u);
        for (int i = 0; i < t_max; ++i) {
            std::vector<std::int8_t> u(l);
            for (int j = 0; j < l; ++j)
                u[j] = static_cast<std::int8_t>(oracle.ranking[i].second(j));
            want.insert(std::move(u));
        }
        if (got != want) ++bad;
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "%d set mismatches in 500 instances", bad);
    report(3, "candidate list equals the exhaustive best-T set", bad == 0, buf);
}

// ---------------------------------------------------------------- criterion 4
void criterion_radius_coverage() {
    Rng rng(0x4444);
    const double rate = chi2_coverage_test(1.0, 0.001, 1000000, 0.8, 6, rng);
    char buf[120];
    std::snprintf(buf, sizeof(buf), "empirical tail %.5f vs bound 0.0013", rate);
    report(4, "chi-square radius covers the true point", rate <= 0.0013, buf);
}

// ---------------------------------------------------------------- criterion 5
void criterion_node_ordering() {
    const auto cb = build_codebook(6, 4, 2, 4, RotationStyle::Lnp);
    const auto graph = FactorGraph::from_mappings(default_mappings(6, 4, 2));
    const Eigen::ArrayXXd priors = Eigen::ArrayXXd::Zero(6, 4);
    const double lo_db = 6.0, hi_db = 12.0;
    long violations = 0;
    double mean_lo = 0.0, mean_hi = 0.0;
    const int frames = 10000;
    for (int f = 0; f < frames; ++f) {
        for (double ebno : {lo_db, hi_db}) {
            const double noise_var = noise_var_for_ebno(ebno, 1.0, 4);
            const Instance inst =
                make_instance(cb, graph, noise_var, 50000 + f);
            const auto np = detect(make_variant(DecoderKind::NpLsdMpa, 16), inst.y, cb,
                                   graph, inst.h, noise_var, priors, 5);
            const auto open = detect(make_variant(DecoderKind::LsdMpa, 16), inst.y, cb,
                                     graph, inst.h, noise_var, priors, 5);
            if (total_visited(np.diag) > total_visited(open.diag)) ++violations;
            (ebno == lo_db ? mean_lo : mean_hi) +=
                static_cast<double>(total_visited(np.diag));
        }
    }
    mean_lo /= frames;
    mean_hi /= frames;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "%ld violations / %d pairs; mean NP nodes %.1f @6dB -> %.1f @12dB",
                  violations, 2 * frames, mean_lo, mean_hi);
    report(5, "pruned search never visits more nodes; counts fall with SNR",
           violations == 0 && mean_hi < mean_lo, buf);
}

// ---------------------------------------------------------------- criterion 6
double ber_crossing(const std::vector<BerRecord>& records, const std::string& decoder,
                    double target) {
    std::vector<std::pair<double, double>> pts;  // (ebno, log10 ber)
    for (const auto& r : records)
        if (r.decoder == decoder && r.bit_errors > 0)
            pts.push_back({r.ebno_db, std::log10(r.ber())});
    for (size_t i = 1; i < pts.size(); ++i) {
        const double t = std::log10(target);
        if ((pts[i - 1].second - t) * (pts[i].second - t) <= 0.0 &&
            pts[i - 1].second != pts[i].second) {
            const double w = (t - pts[i - 1].second) / (pts[i].second - pts[i - 1].second);
            return pts[i - 1].first + w * (pts[i].first - pts[i - 1].first);
        }
    }
    return std::nan("");
}

void criterion_ber_gap() {
    SimConfig cfg;
    cfg.decoders = {"maxlog-mpa", "np-lsd-mpa"};
    cfg.t_max = 16;
    cfg.ebno_db = {18.0, 20.0, 22.0, 24.0, 26.0};
    cfg.frames = 60000;
    cfg.target_errors = 400;
    cfg.fd_ts = 0.05;
    cfg.seed = 6001;
    cfg.out_dir = (std::filesystem::temp_directory_path() / "scma_acc_bergap").string();
    const auto res = run_scenario(cfg);
    const double x_mpa = ber_crossing(res.ber, "maxlog-mpa", 1e-3);
    const double x_np = ber_crossing(res.ber, "np-lsd-mpa", 1e-3);
    const double gap = std::abs(x_np - x_mpa);
    bool monotone = true;  // BER falls with SNR across the tested grid
    for (const auto& name : cfg.decoders) {
        double prev = 1.0;
        for (const auto& r : res.ber)
            if (r.decoder == name) {
                if (r.ber() > prev) monotone = false;
                prev = r.ber();
            }
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "1e-3 crossings: maxlog %.2f dB, np-lsd %.2f dB, gap %.3f dB%s", x_mpa,
                  x_np, gap, monotone ? "" : "; curve not monotone");
    report(6, "NP-LSD-MPA within 0.3 dB of Max-log-MPA at BER 1e-3",
           std::isfinite(gap) && gap <= 0.3 && monotone, buf);
    std::filesystem::remove_all(cfg.out_dir);
}

// ---------------------------------------------------------------- criterion 7
void criterion_complexity() {
    bool ok = true;
    std::string detail;

    ComplexityParams a;
    a.n = 4; a.k = 6; a.d_c = 3; a.m = 4; a.it = 5; a.depth = 6;
    const auto mpa_a = analytic_complexity(DecoderKind::MaxLogMpa, a);
    ok &= mpa_a.resource_update_flops == 46080 && mpa_a.layer_update_flops == 240 &&
          mpa_a.posterior_flops == 48;

    ComplexityParams b;
    b.n = 6; b.k = 12; b.d_c = 4; b.m = 16; b.it = 10; b.depth = 16;
    const auto mpa_b = analytic_complexity(DecoderKind::MaxLogMpa, b);
    ok &= mpa_b.resource_update_flops == 235929600LL && mpa_b.layer_update_flops == 3840 &&
          mpa_b.posterior_flops == 384;

    ComplexityParams pa = a;
    pa.pm_refresh = 2; pa.pm_rs = 5;
    ok &= analytic_complexity_pm(pa).resource_update_flops == 24048;
    ComplexityParams pb = b;
    pb.pm_refresh = 2; pb.pm_rs = 5;
    ok &= analytic_complexity_pm(pb).resource_update_flops == 88473600LL;

    ComplexityParams la = a;
    la.t_max = 16; la.n_hat_l = 10; la.n_k = {8, 10, 12, 14, 9, 5};
    const auto lsd_a = analytic_complexity(DecoderKind::LsdMpa, la);
    ok &= lsd_a.resource_update_flops == 3520 && lsd_a.lsd_pre == 510;
    ComplexityParams lb = b;
    lb.t_max = 600; lb.n_hat_l = 25; lb.n_k.assign(16, 3);
    const auto lsd_b = analytic_complexity(DecoderKind::LsdMpa, lb);
    ok &= lsd_b.resource_update_flops == 666000 && lsd_b.lsd_pre == 8720;

    // measured flops match the level-weighted formula on the measured counts
    Rng rng(0x7777);
    std::vector<long long> visited(6, 0);
    long long flops_sum = 0;
    for (int rep = 0; rep < 200; ++rep) {
        Eigen::RowVectorXcd h(6);
        for (int i = 0; i < 6; ++i) h(i) = rng.cgaussian(1.0);
        const auto sys = augment_and_factor(h, rng.cgaussian(2.0), 0.5);
        auto [list, stats] = lsd_search(sys, RadiusPolicy{}, 8);
        for (int i = 0; i < 6; ++i) visited[i] += stats.visited[i];
        flops_sum += stats.flops_estimate();
    }
    ok &= flops_sum == flops_from_visited(visited);

    std::ostringstream os;
    os << "table rows frozen for both parameter sets; measured " << flops_sum
       << " == formula " << flops_from_visited(visited);
    report(7, "complexity accounting reproduces the closed forms", ok, os.str());
}

// ---------------------------------------------------------------- criterion 8
void criterion_lnp_counts() {
    const auto cb = build_codebook(12, 6, 2, 16, RotationStyle::Lnp);
    const auto graph = FactorGraph::from_mappings(default_mappings(12, 6, 2));
    bool groups_ok = true;
    for (int k = 0; k < cb.k_layers; ++k)
        for (int n : graph.zeta[k])
            groups_ok &= projection_groups(cb, k, n).size() == 9;

    // branching with an open radius, duplicate pruning only
    DecoderVariant v = make_variant(DecoderKind::LsdLnp, 6561);
    v.cross_prune = false;
    v.radius_mode = RadiusPolicy::Mode::Infinite;
    const double noise_var = noise_var_for_ebno(10.0, 1.0, 16);
    std::vector<int> max_branching(graph.d_c, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const Instance inst = make_instance(cb, graph, noise_var, 80000 + rep);
        const auto res = detect(v, inst.y, cb, graph, inst.h, noise_var,
                                Eigen::ArrayXXd::Zero(12, 16), 1);
        for (size_t j = 0; j < res.diag.max_branching.size(); ++j)
            max_branching[j] = std::max(max_branching[j], res.diag.max_branching[j]);
    }
    bool branch_ok = true;
    for (int c : max_branching) branch_ok &= c == 9;

    std::ostringstream os;
    os << "9 groups per edge: " << (groups_ok ? "yes" : "no") << "; branching per user =";
    for (int c : max_branching) os << ' ' << c;
    report(8, "16-point LNP projects to 9 values and branches 9-wide", groups_ok && branch_ok,
           os.str());
}

// ---------------------------------------------------------------- criterion 9
void criterion_mpa_exactness() {
    double worst = 0.0;

    // true single-resource systems, P = 1
    for (int d_c : {1, 2, 3}) {
        for (int m_points : {2, 4}) {
            std::vector<Eigen::MatrixXi> maps(d_c, Eigen::MatrixXi::Ones(1, 1));
            const auto cb = build_codebook_with_mappings(maps, m_points,
                                                         m_points == 2
                                                             ? RotationStyle::Identity
                                                             : RotationStyle::Lnp);
            const auto graph = FactorGraph::from_mappings(maps);
            for (int rep = 0; rep < 20; ++rep) {
                Rng rng(90000 + 100 * d_c + 10 * m_points + rep);
                Eigen::MatrixXcd h(1, d_c);
                for (int k = 0; k < d_c; ++k) h(0, k) = rng.cgaussian(1.0);
                Eigen::ArrayXXd priors(d_c, m_points);
                for (int k = 0; k < d_c; ++k)
                    for (int m = 0; m < m_points; ++m) priors(k, m) = 0.7 * rng.gaussian();
                std::vector<int> sent(d_c);
                for (int k = 0; k < d_c; ++k)
                    sent[k] = static_cast<int>(rng.raw() % m_points);
                ChannelRealization ch{h, 0.5};
                const auto y = transmit(cb, sent, ch, rng);
                const auto out = run_mpa(y, cb, graph, h, 0.5, priors, 1,
                                         MaxStarMode::Exact);
                const auto want = exact_marginal_oracle(y(0), cb, graph, 0, h, 0.5, priors,
                                                        MaxStarMode::Exact);
                for (int k = 0; k < d_c; ++k) {
                    Eigen::ArrayXd got = out.codeword_llr.row(k).transpose();
                    got -= got.maxCoeff();
                    worst = std::max(worst, (got - want.row(k).transpose()).abs().maxCoeff());
                }
            }
        }
    }

    // M = 16, d_c = 3: per-resource first-pass marginals on the 150% graph
    {
        const auto cb = build_codebook(6, 4, 2, 16, RotationStyle::Lnp);
        const auto graph = FactorGraph::from_mappings(default_mappings(6, 4, 2));
        for (int rep = 0; rep < 5; ++rep) {
            Rng rng(95000 + rep);
            Eigen::MatrixXcd h(4, 6);
            for (int n = 0; n < 4; ++n)
                for (int k = 0; k < 6; ++k) h(n, k) = rng.cgaussian(1.0);
            Eigen::ArrayXXd priors(6, 16);
            for (int k = 0; k < 6; ++k)
                for (int m = 0; m < 16; ++m) priors(k, m) = 0.4 * rng.gaussian();
            std::vector<int> sent(6);
            for (int k = 0; k < 6; ++k) sent[k] = static_cast<int>(rng.raw() % 16);
            ChannelRealization ch{h, 0.5};
            const auto y = transmit(cb, sent, ch, rng);
            const auto tables = build_distance_tables(cb, graph, y, h, 0.5);
            MessageTable table;
            table.init(graph, 16, priors);
            for (int n = 0; n < 4; ++n) {
                const auto want = exact_marginal_oracle(y(n), cb, graph, n, h, 0.5, priors,
                                                        MaxStarMode::Exact);
                for (int j = 0; j < 3; ++j) {
                    const int k = graph.xi[n][j];
                    resource_update(table, graph, tables, n, k, MaxStarMode::Exact);
                    Eigen::ArrayXd got = table.res_to_layer.row(n * 3 + j).transpose();
                    got += priors.row(k).transpose().array();
                    got -= got.maxCoeff();
                    worst = std::max(worst,
                                     (got - want.row(j).transpose()).abs().maxCoeff());
                }
            }
        }
    }

    char buf[120];
    std::snprintf(buf, sizeof(buf), "max |marginal diff| = %.2e", worst);
    report(9, "exact MPA matches brute-force marginals on cycle-free instances",
           worst <= 1e-9, buf);
}

// --------------------------------------------------------------- criterion 10
void criterion_turbo() {
    TurboConfig cfg;

    // noiseless round trip at the full interleaver size
    Rng rng(0xaaaa);
    std::vector<std::uint8_t> bits(cfg.info_length);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.bit());
    const auto coded = turbo_encode(bits, cfg);
    std::vector<double> clean(coded.size());
    for (size_t i = 0; i < coded.size(); ++i) clean[i] = coded[i] ? 30.0 : -30.0;
    const bool round_trip = turbo_decode(clean, {}, cfg).info_bits == bits;

    // AWGN at 4 dB with >= 1e6 info bits
    const double ebno = std::pow(10.0, 0.4);
    const double s2c = 1.0 / (2.0 * 0.5 * ebno);
    const double s2u = 1.0 / (2.0 * ebno);
    long coded_err = 0, uncoded_err = 0, total = 0;
    const int frames = (1000000 + cfg.info_length - 1) / cfg.info_length;
    for (int f = 0; f < frames; ++f) {
        Rng frng(derive_stream_seed(0xbbbb, f));
        for (auto& b : bits) b = static_cast<std::uint8_t>(frng.bit());
        const auto cw = turbo_encode(bits, cfg);
        std::vector<double> llr(cw.size());
        for (size_t i = 0; i < cw.size(); ++i) {
            const double x = cw[i] ? 1.0 : -1.0;
            llr[i] = 2.0 * (x + std::sqrt(s2c) * frng.gaussian()) / s2c;
        }
        const auto dec = turbo_decode(llr, {}, cfg);
        for (int i = 0; i < cfg.info_length; ++i) {
            coded_err += dec.info_bits[i] != bits[i];
            const double x = bits[i] ? 1.0 : -1.0;
            const double y = x + std::sqrt(s2u) * frng.gaussian();
            uncoded_err += (y > 0.0 ? 1 : 0) != bits[i];
            ++total;
        }
    }

    // IDD: 3 outer loops never worse than 1 on paired frames, measured in the
    // waterfall region
    SimConfig sim;
    sim.coded = true;
    sim.decoders = {"maxlog-mpa"};
    sim.ebno_db = {6.0};
    sim.frames = 4;
    sim.target_errors = 0;
    sim.seed = 777;
    sim.out_dir = (std::filesystem::temp_directory_path() / "scma_acc_idd").string();
    sim.outer_loops = 1;
    const auto one = run_scenario(sim);
    sim.outer_loops = 3;
    const auto three = run_scenario(sim);
    std::filesystem::remove_all(sim.out_dir);
    const bool idd_ok = three.ber[0].bit_errors <= one.ber[0].bit_errors;

    std::ostringstream os;
    os << "round trip " << (round_trip ? "exact" : "BROKEN") << "; AWGN 4 dB coded "
       << coded_err << " vs uncoded " << uncoded_err << " errors over " << total
       << " bits; IDD errors " << three.ber[0].bit_errors << " (3 loops) vs "
       << one.ber[0].bit_errors << " (1 loop)";
    report(10, "turbo code sanity and IDD gain",
           round_trip && coded_err < uncoded_err && idd_ok, os.str());
}

// --------------------------------------------------------------- criterion 11
std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void criterion_determinism() {
    SimConfig cfg;
    cfg.decoders = {"np-lsd-mpa"};
    cfg.ebno_db = {8.0};
    cfg.frames = 500;
    cfg.target_errors = 0;
    cfg.seed = 4242;
    const auto dir1 = std::filesystem::temp_directory_path() / "scma_acc_det1";
    const auto dir2 = std::filesystem::temp_directory_path() / "scma_acc_det2";
    cfg.out_dir = dir1.string();
    run_scenario(cfg);
    cfg.out_dir = dir2.string();
    run_scenario(cfg);
    bool ok = true;
    for (const char* f : {"ber.csv", "nodes.csv", "flops.csv"}) {
        const auto a = slurp(dir1 / f), b = slurp(dir2 / f);
        ok &= !a.empty() && a == b;
    }
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
    report(11, "fixed seed reproduces byte-identical CSV output", ok,
           ok ? "ber/nodes/flops identical" : "outputs differ");
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion_oracle_equivalence();
    criterion_ml_equivalence();
    criterion_top_t();
    criterion_radius_coverage();
    criterion_node_ordering();
    criterion_ber_gap();
    criterion_complexity();
    criterion_lnp_counts();
    criterion_mpa_exactness();
    criterion_turbo();
    criterion_determinism();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d of 11 criteria passed in %.1f s\n", 11 - g_failures, secs);
    return g_failures;
}
