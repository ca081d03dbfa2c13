#include "scma/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace scma {

namespace {
constexpr double kPi = std::numbers::pi;
}

JakesFader::JakesFader(int n_resources, int k_layers, double fd_ts, std::uint64_t seed)
    : n_res_(n_resources), k_layers_(k_layers), fd_ts_(fd_ts) {
    if (fd_ts < 0.0 || fd_ts >= 0.5)
        throw std::invalid_argument("JakesFader: need 0 <= fd_ts < 0.5");
    const int total = n_resources * k_layers * kOscillators;
    cos_alpha_.resize(total);
    sin_alpha_.resize(total);
    phi_.resize(total);
    psi_.resize(total);
    for (int e = 0; e < n_resources * k_layers; ++e) {
        Rng rng(derive_stream_seed(seed, 0x4a6b6573ULL, static_cast<std::uint64_t>(e)));
        const double theta = (2.0 * rng.uniform() - 1.0) * kPi;
        for (int o = 0; o < kOscillators; ++o) {
            const int i = e * kOscillators + o;
            const double alpha = (2.0 * kPi * (o + 1) - kPi + theta) / (4.0 * kOscillators);
            cos_alpha_[i] = std::cos(alpha);
            sin_alpha_[i] = std::sin(alpha);
            phi_[i] = (2.0 * rng.uniform() - 1.0) * kPi;
            psi_[i] = (2.0 * rng.uniform() - 1.0) * kPi;
        }
    }
}

Eigen::MatrixXcd JakesFader::gains(long step) const {
    Eigen::MatrixXcd h(n_res_, k_layers_);
    const double t = 2.0 * kPi * fd_ts_ * static_cast<double>(step);
    const double norm = 1.0 / std::sqrt(static_cast<double>(kOscillators));
    for (int n = 0; n < n_res_; ++n) {
        for (int k = 0; k < k_layers_; ++k) {
            const int e = n * k_layers_ + k;
            double re = 0.0, im = 0.0;
            for (int o = 0; o < kOscillators; ++o) {
                const int i = e * kOscillators + o;
                re += std::cos(t * cos_alpha_[i] + phi_[i]);
                im += std::cos(t * sin_alpha_[i] + psi_[i]);
            }
            h(n, k) = Cplx(norm * re, norm * im);
        }
    }
    return h;
}

std::vector<ChannelRealization> jakes_fading(int frames, double fd_ts, std::uint64_t seed,
                                             int n_resources, int k_layers,
                                             double noise_var) {
    JakesFader fader(n_resources, k_layers, fd_ts, seed);
    std::vector<ChannelRealization> out;
    out.reserve(frames);
    for (int t = 0; t < frames; ++t)
        out.push_back({fader.gains(t), noise_var});
    return out;
}

Eigen::VectorXcd transmit(const Codebook& cb, const std::vector<int>& symbols,
                          const ChannelRealization& ch, Rng& rng) {
    if (static_cast<int>(symbols.size()) != cb.k_layers)
        throw std::invalid_argument("transmit: one symbol per layer required");
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(cb.n_resources);
    for (int k = 0; k < cb.k_layers; ++k)
        y += ch.h.col(k).cwiseProduct(cb.layers[k].codewords.col(symbols[k]));
    if (ch.noise_var > 0.0)
        for (int n = 0; n < cb.n_resources; ++n) y(n) += rng.cgaussian(ch.noise_var);
    return y;
}

EffectiveRow effective_row(const Codebook& cb, const FactorGraph& graph,
                           const Eigen::MatrixXcd& h_est, int n) {
    EffectiveRow row;
    row.resource = n;
    row.span_dim = cb.d_lattice;
    row.users = graph.xi[n];
    const int d_c = static_cast<int>(row.users.size());
    row.h_row.resize(d_c * cb.d_lattice);
    for (int j = 0; j < d_c; ++j) {
        const int k = row.users[j];
        row.h_row.segment(j * cb.d_lattice, cb.d_lattice) =
            h_est(n, k) * cb.generator_row(n, k);
    }
    return row;
}

Eigen::MatrixXcd corrupt_csi(const Eigen::MatrixXcd& h_true, const CsiErrorModel& model,
                             Rng& rng) {
    if (model.xi < 0.0 || model.xi >= 1.0)
        throw std::invalid_argument("corrupt_csi: need 0 <= xi < 1");
    if (model.xi == 0.0) return h_true;
    // conditional law of the estimate given the true gain: h_est = (1-xi) h + e,
    // e ~ CN(0, xi(1-xi)); jointly this gives var(h_est) = 1-xi and
    // E[h_est^* (h - h_est)] = 0
    Eigen::MatrixXcd h_est = (1.0 - model.xi) * h_true;
    const double evar = model.xi * (1.0 - model.xi);
    for (int n = 0; n < h_est.rows(); ++n)
        for (int k = 0; k < h_est.cols(); ++k) h_est(n, k) += rng.cgaussian(evar);
    return h_est;
}

double noise_var_for_ebno(double ebno_db, double code_rate, int m_points) {
    const double bits = std::log2(static_cast<double>(m_points));
    return 1.0 / (code_rate * bits * std::pow(10.0, ebno_db / 10.0));
}

}  // namespace scma
