#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "scma/codebook.hpp"
#include "scma/factor_graph.hpp"
#include "scma/rng.hpp"

namespace scma {

struct ChannelRealization {
    Eigen::MatrixXcd h;      // N x K gains, E|h|^2 = 1
    double noise_var = 1.0;  // total complex noise variance per subcarrier
};

struct CsiErrorModel {
    double xi = 0.0;  // error variance, 0 <= xi < 1
};

// Per-subcarrier linear model y_n = h_row * u + z with u the stacked {-1,+1}
// lattice coordinates of the colliding layers (xi_n order, d_lattice
// coordinates each).
struct EffectiveRow {
    int resource = 0;
    Eigen::RowVectorXcd h_row;  // 1 x L
    int span_dim = 0;           // coordinates per user
    std::vector<int> users;     // xi_n order
};

// Sum-of-sinusoids Rayleigh fader (16 oscillators per gain) with Jakes
// autocorrelation J0(2*pi*fd_ts*dt) across time steps. Gains are a pure
// function of the step index, so workers can evaluate any step directly.
class JakesFader {
  public:
    JakesFader(int n_resources, int k_layers, double fd_ts, std::uint64_t seed);

    Eigen::MatrixXcd gains(long step) const;

    static constexpr int kOscillators = 16;

  private:
    int n_res_;
    int k_layers_;
    double fd_ts_;
    // per (n,k): arrival angles and phases for both quadratures
    std::vector<double> cos_alpha_, sin_alpha_, phi_, psi_;
};

std::vector<ChannelRealization> jakes_fading(int frames, double fd_ts, std::uint64_t seed,
                                             int n_resources, int k_layers,
                                             double noise_var);

// y = sum_k diag(h_k) x_k + z, one codeword index per layer
Eigen::VectorXcd transmit(const Codebook& cb, const std::vector<int>& symbols,
                          const ChannelRealization& ch, Rng& rng);

EffectiveRow effective_row(const Codebook& cb, const FactorGraph& graph,
                           const Eigen::MatrixXcd& h_est, int n);

// Estimated CSI with variance 1-xi such that h = h_est + dh, dh ~ CN(0, xi)
// independent of h_est.
Eigen::MatrixXcd corrupt_csi(const Eigen::MatrixXcd& h_true, const CsiErrorModel& model,
                             Rng& rng);

// sigma^2 = 1 / (R * log2(M) * 10^(EbN0/10)) with unit layer energy
double noise_var_for_ebno(double ebno_db, double code_rate, int m_points);

}  // namespace scma
