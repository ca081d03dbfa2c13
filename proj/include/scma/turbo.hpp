#pragma once

#include <cstdint>
#include <vector>

#include "scma/lsd_mpa.hpp"

namespace scma {

// Rate-1/2 parallel concatenated turbo code built from two identical RSC
// encoders, feedforward 1+D+D^3 (octal 13) and feedback 1+D^2+D^3 (octal 15).
// Parity streams are punctured alternately (odd steps keep encoder 1, even
// steps encoder 2); encoder 1 is trellis-terminated with 3 tail pairs, so the
// coded length is 2*info_length + 6.
struct TurboConfig {
    int info_length = 4096;
    int inner_iterations = 4;
    std::uint64_t interleaver_seed = 0x73636d61;
    double llr_clip = 50.0;

    int coded_length() const { return 2 * info_length + 6; }
};

std::vector<int> make_interleaver(int n, std::uint64_t seed);

std::vector<std::uint8_t> turbo_encode(const std::vector<std::uint8_t>& bits,
                                       const TurboConfig& cfg);

struct TurboDecodeResult {
    std::vector<std::uint8_t> info_bits;
    // posterior minus input per transmitted coded bit, for IDD feedback
    std::vector<double> coded_extrinsic;
};

// Max-log BCJR component decoders with inner_iterations extrinsic exchanges.
// channel_llrs and prior_llrs are per coded bit (log P(1)/P(0)); prior may be
// empty (all zero).
TurboDecodeResult turbo_decode(const std::vector<double>& channel_llrs,
                               const std::vector<double>& prior_llrs,
                               const TurboConfig& cfg);

// One frame of iterative detection and decoding: every layer carries its own
// turbo-coded stream over ceil(coded/bits) SCMA uses.
struct IddResult {
    std::vector<std::vector<std::uint8_t>> info_bits;  // per layer
    DetectDiagnostics diag;
};

IddResult idd_run(const std::vector<Eigen::VectorXcd>& ys,
                  const std::vector<Eigen::MatrixXcd>& h_ests, double noise_var,
                  const DecoderVariant& variant, const Codebook& cb,
                  const FactorGraph& graph, int detector_iterations,
                  const TurboConfig& cfg, int outer_loops);

int uses_for_coded_frame(const TurboConfig& cfg, int bits_per_symbol);

}  // namespace scma
