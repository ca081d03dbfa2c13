#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace scma {

// splitmix64; used to derive independent per-frame streams from one master
// seed so that results do not depend on how frames are split across workers.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t stream,
                                        std::uint64_t substream = 0) {
    return splitmix64(splitmix64(splitmix64(master) ^ stream) ^ substream);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return uni_(eng_); }

    double gaussian() { return norm_(eng_); }

    // z ~ CN(0, var): real and imaginary parts each N(0, var/2)
    std::complex<double> cgaussian(double var) {
        const double s = std::sqrt(var / 2.0);
        return {s * norm_(eng_), s * norm_(eng_)};
    }

    int bit() { return eng_() & 1u; }

    std::uint64_t raw() { return eng_(); }

    std::mt19937_64& engine() { return eng_; }

  private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> norm_{0.0, 1.0};
    std::uniform_real_distribution<double> uni_{0.0, 1.0};
};

inline Rng frame_rng(std::uint64_t master, std::uint64_t frame, std::uint64_t purpose = 0) {
    return Rng(derive_stream_seed(master, frame, purpose));
}

}  // namespace scma
