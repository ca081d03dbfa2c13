#include "scma/turbo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "scma/rng.hpp"

namespace scma {

namespace {

// RSC with feedback 1+D^2+D^3 and feedforward 1+D+D^3; state packs the last
// three feedback-node values, most recent in the low bit.
struct Rsc {
    static int feedback_bit(int state, int input) {
        return input ^ ((state >> 1) & 1) ^ ((state >> 2) & 1);
    }
    static int parity(int state, int w) { return w ^ (state & 1) ^ ((state >> 2) & 1); }
    static int next_state(int state, int w) { return ((state << 1) | w) & 7; }
    // input that drives the feedback node to zero
    static int terminating_input(int state) { return ((state >> 1) & 1) ^ ((state >> 2) & 1); }
};

constexpr int kStates = 8;

struct Transition {
    int next;
    int parity;
};

// trellis[s][b] for information bit b
std::array<std::array<Transition, 2>, kStates> build_trellis() {
    std::array<std::array<Transition, 2>, kStates> t{};
    for (int s = 0; s < kStates; ++s)
        for (int b = 0; b < 2; ++b) {
            const int w = Rsc::feedback_bit(s, b);
            t[s][b] = {Rsc::next_state(s, w), Rsc::parity(s, w)};
        }
    return t;
}

const auto kTrellis = build_trellis();

inline double clip(double v, double lim) { return std::clamp(v, -lim, lim); }

// One max-log BCJR pass. sys/par/apr are per-section LLRs; `terminated` fixes
// the final state at zero. Returns per-section posterior LLRs for the
// systematic and the parity bit.
struct BcjrOut {
    std::vector<double> sys_post;
    std::vector<double> par_post;
};

BcjrOut bcjr(const std::vector<double>& sys, const std::vector<double>& par,
             const std::vector<double>& apr, bool terminated) {
    const int t_len = static_cast<int>(sys.size());
    std::vector<std::array<double, kStates>> alpha(t_len + 1), beta(t_len + 1);
    alpha[0].fill(kNegInf);
    alpha[0][0] = 0.0;
    for (int t = 0; t < t_len; ++t) {
        alpha[t + 1].fill(kNegInf);
        for (int s = 0; s < kStates; ++s) {
            if (alpha[t][s] == kNegInf) continue;
            for (int b = 0; b < 2; ++b) {
                const auto& tr = kTrellis[s][b];
                const double g = (b ? sys[t] + apr[t] : 0.0) + (tr.parity ? par[t] : 0.0);
                double& a = alpha[t + 1][tr.next];
                a = std::max(a, alpha[t][s] + g);
            }
        }
    }
    beta[t_len].fill(terminated ? kNegInf : 0.0);
    if (terminated) beta[t_len][0] = 0.0;
    for (int t = t_len - 1; t >= 0; --t) {
        beta[t].fill(kNegInf);
        for (int s = 0; s < kStates; ++s)
            for (int b = 0; b < 2; ++b) {
                const auto& tr = kTrellis[s][b];
                if (beta[t + 1][tr.next] == kNegInf) continue;
                const double g = (b ? sys[t] + apr[t] : 0.0) + (tr.parity ? par[t] : 0.0);
                beta[t][s] = std::max(beta[t][s], g + beta[t + 1][tr.next]);
            }
    }

    BcjrOut out;
    out.sys_post.resize(t_len);
    out.par_post.resize(t_len);
    for (int t = 0; t < t_len; ++t) {
        double s1 = kNegInf, s0 = kNegInf, p1 = kNegInf, p0 = kNegInf;
        for (int s = 0; s < kStates; ++s) {
            if (alpha[t][s] == kNegInf) continue;
            for (int b = 0; b < 2; ++b) {
                const auto& tr = kTrellis[s][b];
                if (beta[t + 1][tr.next] == kNegInf) continue;
                const double g = (b ? sys[t] + apr[t] : 0.0) + (tr.parity ? par[t] : 0.0);
                const double m = alpha[t][s] + g + beta[t + 1][tr.next];
                (b ? s1 : s0) = std::max(b ? s1 : s0, m);
                (tr.parity ? p1 : p0) = std::max(tr.parity ? p1 : p0, m);
            }
        }
        out.sys_post[t] = s1 - s0;
        out.par_post[t] = (p1 == kNegInf || p0 == kNegInf) ? (p1 == kNegInf ? -1e9 : 1e9)
                                                           : p1 - p0;
    }
    return out;
}

}  // namespace

std::vector<int> make_interleaver(int n, std::uint64_t seed) {
    std::vector<int> pi(n);
    std::iota(pi.begin(), pi.end(), 0);
    Rng rng(derive_stream_seed(seed, 0x696c76U));
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.raw() % static_cast<std::uint64_t>(i + 1));
        std::swap(pi[i], pi[j]);
    }
    return pi;
}

std::vector<std::uint8_t> turbo_encode(const std::vector<std::uint8_t>& bits,
                                       const TurboConfig& cfg) {
    const int b_len = cfg.info_length;
    if (static_cast<int>(bits.size()) != b_len)
        throw std::invalid_argument("turbo_encode: expected exactly info_length bits");
    const auto pi = make_interleaver(b_len, cfg.interleaver_seed);

    std::vector<std::uint8_t> p1(b_len), p2(b_len);
    int s1 = 0, s2 = 0;
    for (int t = 0; t < b_len; ++t) {
        const int w1 = Rsc::feedback_bit(s1, bits[t]);
        p1[t] = static_cast<std::uint8_t>(Rsc::parity(s1, w1));
        s1 = Rsc::next_state(s1, w1);
        const int w2 = Rsc::feedback_bit(s2, bits[pi[t]]);
        p2[t] = static_cast<std::uint8_t>(Rsc::parity(s2, w2));
        s2 = Rsc::next_state(s2, w2);
    }

    std::vector<std::uint8_t> coded(cfg.coded_length());
    for (int t = 0; t < b_len; ++t) {
        coded[2 * t] = bits[t];
        coded[2 * t + 1] = (t % 2 == 1) ? p1[t] : p2[t];
    }
    // terminate encoder 1; tail systematic/parity pairs are sent unpunctured
    for (int j = 0; j < 3; ++j) {
        const int b = Rsc::terminating_input(s1);
        const int w = Rsc::feedback_bit(s1, b);  // always 0 by construction
        coded[2 * b_len + 2 * j] = static_cast<std::uint8_t>(b);
        coded[2 * b_len + 2 * j + 1] = static_cast<std::uint8_t>(Rsc::parity(s1, w));
        s1 = Rsc::next_state(s1, w);
    }
    return coded;
}

TurboDecodeResult turbo_decode(const std::vector<double>& channel_llrs,
                               const std::vector<double>& prior_llrs,
                               const TurboConfig& cfg) {
    const int b_len = cfg.info_length;
    const int c_len = cfg.coded_length();
    if (static_cast<int>(channel_llrs.size()) != c_len)
        throw std::invalid_argument("turbo_decode: bad coded length");
    if (!prior_llrs.empty() && static_cast<int>(prior_llrs.size()) != c_len)
        throw std::invalid_argument("turbo_decode: bad prior length");

    std::vector<double> in(c_len);
    for (int i = 0; i < c_len; ++i)
        in[i] = channel_llrs[i] + (prior_llrs.empty() ? 0.0 : prior_llrs[i]);

    const auto pi = make_interleaver(b_len, cfg.interleaver_seed);

    // trellis observations; punctured parities enter as zero LLRs
    std::vector<double> sys1(b_len + 3, 0.0), par1(b_len + 3, 0.0);
    std::vector<double> sys2(b_len, 0.0), par2(b_len, 0.0);
    for (int t = 0; t < b_len; ++t) {
        sys1[t] = in[2 * t];
        if (t % 2 == 1) par1[t] = in[2 * t + 1];
        sys2[t] = in[2 * pi[t]];
        if (t % 2 == 0) par2[t] = in[2 * t + 1];
    }
    for (int j = 0; j < 3; ++j) {
        sys1[b_len + j] = in[2 * b_len + 2 * j];
        par1[b_len + j] = in[2 * b_len + 2 * j + 1];
    }

    std::vector<double> apr1(b_len + 3, 0.0), apr2(b_len, 0.0);
    std::vector<double> ext1(b_len, 0.0), ext2(b_len, 0.0);
    BcjrOut out1, out2;
    for (int it = 0; it < cfg.inner_iterations; ++it) {
        out1 = bcjr(sys1, par1, apr1, true);
        for (int t = 0; t < b_len; ++t)
            ext1[t] = clip(out1.sys_post[t] - sys1[t] - apr1[t], cfg.llr_clip);
        // section t of decoder 2 concerns information bit pi[t]
        for (int t = 0; t < b_len; ++t) apr2[t] = ext1[pi[t]];
        out2 = bcjr(sys2, par2, apr2, false);
        for (int t = 0; t < b_len; ++t)
            ext2[t] = clip(out2.sys_post[t] - sys2[t] - apr2[t], cfg.llr_clip);
        for (int t = 0; t < b_len; ++t) apr1[pi[t]] = ext2[t];
    }

    TurboDecodeResult res;
    res.info_bits.resize(b_len);
    for (int t = 0; t < b_len; ++t) {
        const double post = sys1[t] + apr1[t] + ext1[t];
        res.info_bits[t] = post > 0.0 ? 1 : 0;
    }

    // extrinsic per transmitted coded bit: posterior minus this bit's input
    res.coded_extrinsic.assign(c_len, 0.0);
    for (int t = 0; t < b_len; ++t) {
        res.coded_extrinsic[2 * t] = clip(sys1[t] + apr1[t] + ext1[t] - in[2 * t], cfg.llr_clip);
        const double par_post = (t % 2 == 1) ? out1.par_post[t] : out2.par_post[t];
        res.coded_extrinsic[2 * t + 1] = clip(par_post - in[2 * t + 1], cfg.llr_clip);
    }
    for (int j = 0; j < 3; ++j) {
        res.coded_extrinsic[2 * b_len + 2 * j] =
            clip(out1.sys_post[b_len + j] - in[2 * b_len + 2 * j], cfg.llr_clip);
        res.coded_extrinsic[2 * b_len + 2 * j + 1] =
            clip(out1.par_post[b_len + j] - in[2 * b_len + 2 * j + 1], cfg.llr_clip);
    }
    return res;
}

int uses_for_coded_frame(const TurboConfig& cfg, int bits_per_symbol) {
    return (cfg.coded_length() + bits_per_symbol - 1) / bits_per_symbol;
}

IddResult idd_run(const std::vector<Eigen::VectorXcd>& ys,
                  const std::vector<Eigen::MatrixXcd>& h_ests, double noise_var,
                  const DecoderVariant& variant, const Codebook& cb,
                  const FactorGraph& graph, int detector_iterations,
                  const TurboConfig& cfg, int outer_loops) {
    if (outer_loops < 1) throw std::invalid_argument("idd_run: outer_loops must be >= 1");
    const int bits = cb.bits_per_symbol();
    const int uses = uses_for_coded_frame(cfg, bits);
    if (static_cast<int>(ys.size()) != uses || static_cast<int>(h_ests.size()) != uses)
        throw std::invalid_argument("idd_run: need one received vector per use");
    const int c_len = cfg.coded_length();
    const int k_layers = cb.k_layers;

    IddResult res;
    res.info_bits.resize(k_layers);

    // decoder extrinsics, padded to a whole number of uses
    Eigen::ArrayXXd decoder_ext = Eigen::ArrayXXd::Zero(k_layers, uses * bits);

    for (int loop = 0; loop < outer_loops; ++loop) {
        Eigen::ArrayXXd detector_ext(k_layers, uses * bits);
        for (int u = 0; u < uses; ++u) {
            Eigen::ArrayXXd bit_priors(k_layers, bits);
            for (int k = 0; k < k_layers; ++k)
                bit_priors.row(k) = decoder_ext.row(k).segment(u * bits, bits);
            const Eigen::ArrayXXd priors = codeword_priors_from_bits(bit_priors, cb.m_points);
            DetectResult det = detect(variant, ys[u], cb, graph, h_ests[u], noise_var,
                                      priors, detector_iterations);
            for (int k = 0; k < k_layers; ++k)
                for (int i = 0; i < bits; ++i)
                    detector_ext(k, u * bits + i) =
                        clip(det.llr.bit_llr(k, i) - bit_priors(k, i), kLlrSaturation);
            res.diag.merge(det.diag);
        }

        for (int k = 0; k < k_layers; ++k) {
            std::vector<double> chan(c_len);
            for (int i = 0; i < c_len; ++i) chan[i] = detector_ext(k, i);
            const TurboDecodeResult dec = turbo_decode(chan, {}, cfg);
            res.info_bits[k] = dec.info_bits;
            for (int i = 0; i < c_len; ++i) decoder_ext(k, i) = dec.coded_extrinsic[i];
            for (int i = c_len; i < uses * bits; ++i) decoder_ext(k, i) = 0.0;
        }
    }
    return res;
}

}  // namespace scma
