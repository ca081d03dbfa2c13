#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "scma/metrics.hpp"
#include "scma/turbo.hpp"

namespace scma {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimConfig {
    // codebook
    int k_layers = 6;
    int n_resources = 4;
    int p_dims = 2;
    int m_points = 4;
    std::string style = "lnp";
    std::string codebook_path;  // import instead of building
    std::string f_matrix_path;  // custom indicator matrix

    std::vector<std::string> decoders = {"maxlog-mpa"};
    int t_max = 0;       // 0: default for the codebook size
    double epsilon = 1e-3;
    double alpha = 0.0;  // 0: noise-matched
    int iterations = 0;  // 0: 5 for M=4, 10 for M=16
    int outer_loops = 3;

    std::vector<double> ebno_db = {8.0};
    long frames = 1000;
    long target_errors = 200;  // 0 disables early stop
    double fd_ts = 0.01;
    double csi_xi = 0.0;
    bool coded = false;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    int workers = 1;

    int effective_iterations() const { return iterations > 0 ? iterations : (m_points <= 4 ? 5 : 10); }
    int effective_t_max(DecoderKind kind, int d_c) const;
    void validate() const;
};

// flat key = value text; '#' starts a comment; lists are comma separated
SimConfig parse_config_file(const std::string& path);
void apply_config_value(SimConfig& cfg, const std::string& key, const std::string& value,
                        const std::string& context);

struct NodeRow {
    std::string decoder;
    double ebno_db;
    int level;  // 1-based, leaf = 1
    double mean_visited;
};

struct FlopRow {
    std::string decoder;
    double ebno_db;
    double summations;
    double multiplications;
    double comparisons;
    double sqrts;
};

struct ScenarioResult {
    std::vector<BerRecord> ber;
    std::vector<NodeRow> nodes;
    std::vector<FlopRow> flops;
    std::vector<RunAggregate> aggregates;  // one per (decoder, ebno) point
};

// Runs the grid and writes ber.csv / nodes.csv / flops.csv under out_dir.
// Deterministic for a fixed seed: per-frame randomness is derived from
// (seed, frame index), so the worker count does not change any result.
ScenarioResult run_scenario(const SimConfig& cfg);

Codebook codebook_from_config(const SimConfig& cfg);

}  // namespace scma
