// scma_sim: link-level SCMA simulation driver.
//
//   scma_sim run --decoder maxlog-mpa,np-lsd-mpa --ebno 4,6,8 --frames 20000
//   scma_sim codebook-export --m 16 --style lnp --out cb.txt
//   scma_sim codebook-load --in cb.txt

#include <CLI11.hpp>
#include <iostream>

#include "scma/sim.hpp"

namespace {

int run_command(const scma::SimConfig& cfg) {
    const auto result = scma::run_scenario(cfg);
    for (const auto& r : result.ber)
        std::cout << r.decoder << " @ " << r.ebno_db << " dB: " << r.bit_errors << "/"
                  << r.bits << " errors, ber=" << r.ber() << " (" << r.frames
                  << " frames)\n";
    std::cout << "wrote " << cfg.out_dir << "/{ber,nodes,flops}.csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SCMA uplink simulator: Max-log-MPA and list-sphere-decoding MPA"};
    app.require_subcommand(1);

    // ---- run ----------------------------------------------------------
    auto* run = app.add_subcommand("run", "run a BER/complexity scenario");
    std::string config_path, decoder_list, ebno_list, style, codebook_path, out_dir;
    long frames = -1, target_errors = -1;
    int t_max = -1, it = -1, outer = -1, workers = -1;
    int k = -1, n = -1, p = -1, m = -1;
    double epsilon = -1.0, alpha = -1.0, fdts = -1.0, csi_xi = -1.0;
    std::int64_t seed = -1;
    int coded = -1;

    run->add_option("--config", config_path, "config file (key = value lines)");
    run->add_option("--decoder", decoder_list, "comma-separated decoder list");
    run->add_option("--ebno", ebno_list, "comma-separated Eb/N0 grid in dB");
    run->add_option("--frames", frames, "frames per point");
    run->add_option("--target-errors", target_errors, "stop a point after this many bit errors (0 = off)");
    run->add_option("--tmax", t_max, "candidate list capacity");
    run->add_option("--epsilon", epsilon, "radius tail probability");
    run->add_option("--alpha", alpha, "regularization weight (0 = noise-matched)");
    run->add_option("--it", it, "MPA iterations (0 = per-codebook default)");
    run->add_option("--outer", outer, "IDD outer loops");
    run->add_option("--coded", coded, "1 = turbo-coded frames, 0 = uncoded");
    run->add_option("--fdts", fdts, "normalized Doppler per use");
    run->add_option("--csi-xi", csi_xi, "CSI error variance");
    run->add_option("--seed", seed, "master seed");
    run->add_option("--codebook", codebook_path, "codebook file to load");
    run->add_option("--out", out_dir, "output directory for CSV files");
    run->add_option("--workers", workers, "worker threads");
    run->add_option("--k", k, "layers");
    run->add_option("--n", n, "resources");
    run->add_option("--p", p, "nonzero dimensions per layer");
    run->add_option("--m", m, "codebook size");
    run->add_option("--style", style, "rotation style: lnp | optimal-diversity | identity");

    // ---- codebook-export ----------------------------------------------
    auto* cb_export = app.add_subcommand("codebook-export", "build a codebook and write it");
    int ek = 6, en = 4, ep = 2, em = 4;
    std::string estyle = "lnp", epath = "codebook.txt";
    cb_export->add_option("--k", ek, "layers");
    cb_export->add_option("--n", en, "resources");
    cb_export->add_option("--p", ep, "nonzero dimensions per layer");
    cb_export->add_option("--m", em, "codebook size");
    cb_export->add_option("--style", estyle, "rotation style");
    cb_export->add_option("--out", epath, "output path")->required();

    // ---- codebook-load -------------------------------------------------
    auto* cb_load = app.add_subcommand("codebook-load", "load a codebook and print a summary");
    std::string lpath;
    cb_load->add_option("--in", lpath, "codebook file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            scma::SimConfig cfg;
            if (!config_path.empty()) cfg = scma::parse_config_file(config_path);
            auto set = [&](const std::string& key, const std::string& value) {
                scma::apply_config_value(cfg, key, value, "--" + key);
            };
            if (!decoder_list.empty()) set("decoder", decoder_list);
            if (!ebno_list.empty()) set("ebno", ebno_list);
            if (frames >= 0) cfg.frames = frames;
            if (target_errors >= 0) cfg.target_errors = target_errors;
            if (t_max >= 0) cfg.t_max = t_max;
            if (epsilon >= 0.0) cfg.epsilon = epsilon;
            if (alpha >= 0.0) cfg.alpha = alpha;
            if (it >= 0) cfg.iterations = it;
            if (outer >= 0) cfg.outer_loops = outer;
            if (coded >= 0) cfg.coded = coded != 0;
            if (fdts >= 0.0) cfg.fd_ts = fdts;
            if (csi_xi >= 0.0) cfg.csi_xi = csi_xi;
            if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
            if (!codebook_path.empty()) cfg.codebook_path = codebook_path;
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            if (workers >= 1) cfg.workers = workers;
            if (k >= 0) cfg.k_layers = k;
            if (n >= 0) cfg.n_resources = n;
            if (p >= 0) cfg.p_dims = p;
            if (m >= 0) cfg.m_points = m;
            if (!style.empty()) cfg.style = style;
            return run_command(cfg);
        }
        if (cb_export->parsed()) {
            const auto cb = scma::build_codebook(ek, en, ep, em,
                                                 scma::rotation_style_from_string(estyle));
            scma::save_codebook(cb, epath);
            std::cout << "wrote " << epath << "\n";
            return 0;
        }
        if (cb_load->parsed()) {
            const auto cb = scma::load_codebook(lpath);
            std::cout << "codebook: K=" << cb.k_layers << " N=" << cb.n_resources
                      << " P=" << cb.p_dims << " M=" << cb.m_points << " style="
                      << scma::to_string(cb.style) << "\n";
            return 0;
        }
    } catch (const scma::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
