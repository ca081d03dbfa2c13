#include "scma/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace scma {

int SimConfig::effective_t_max(DecoderKind kind, int d_c) const {
    if (t_max > 0) return t_max;
    if (kind == DecoderKind::LsdLnp) return m_points <= 4 ? 8 : 120;
    if (m_points <= 4) return 16;
    return d_c >= 4 ? 600 : 150;
}

void SimConfig::validate() const {
    if (ebno_db.empty()) throw ConfigError("ebno grid is empty");
    if (decoders.empty()) throw ConfigError("decoder list is empty");
    for (const auto& d : decoders) {
        try {
            decoder_kind_from_string(d);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (frames < 0) throw ConfigError("frames must be >= 0");
    if (target_errors < 0) throw ConfigError("target_errors must be >= 0");
    if (fd_ts < 0.0 || fd_ts >= 0.5) throw ConfigError("fd_ts must be in [0, 0.5)");
    if (csi_xi < 0.0 || csi_xi >= 1.0) throw ConfigError("csi_xi must be in [0, 1)");
    if (epsilon <= 0.0 || epsilon >= 1.0) throw ConfigError("epsilon must be in (0, 1)");
    if (alpha < 0.0) throw ConfigError("alpha must be >= 0");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (outer_loops < 1) throw ConfigError("outer must be >= 1");
    if (p_dims < 1 || p_dims > n_resources) throw ConfigError("need 1 <= P <= N");
    if (!codebook_path.empty() && !std::filesystem::exists(codebook_path))
        throw ConfigError("codebook file does not exist: " + codebook_path);
    if (!f_matrix_path.empty() && !std::filesystem::exists(f_matrix_path))
        throw ConfigError("indicator file does not exist: " + f_matrix_path);
}

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

bool parse_bool(const std::string& v, const std::string& context) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(context + ": expected a boolean, got '" + v + "'");
}

template <typename T>
T parse_num(const std::string& v, const std::string& context) {
    std::istringstream is(v);
    T out;
    if (!(is >> out)) throw ConfigError(context + ": expected a number, got '" + v + "'");
    return out;
}

}  // namespace

void apply_config_value(SimConfig& cfg, const std::string& key, const std::string& value,
                        const std::string& context) {
    if (key == "k") cfg.k_layers = parse_num<int>(value, context);
    else if (key == "n") cfg.n_resources = parse_num<int>(value, context);
    else if (key == "p") cfg.p_dims = parse_num<int>(value, context);
    else if (key == "m") cfg.m_points = parse_num<int>(value, context);
    else if (key == "style") cfg.style = value;
    else if (key == "codebook") cfg.codebook_path = value;
    else if (key == "f_matrix") cfg.f_matrix_path = value;
    else if (key == "decoder") cfg.decoders = split_list(value);
    else if (key == "tmax") cfg.t_max = parse_num<int>(value, context);
    else if (key == "epsilon") cfg.epsilon = parse_num<double>(value, context);
    else if (key == "alpha") cfg.alpha = parse_num<double>(value, context);
    else if (key == "it") cfg.iterations = parse_num<int>(value, context);
    else if (key == "outer") cfg.outer_loops = parse_num<int>(value, context);
    else if (key == "ebno") {
        cfg.ebno_db.clear();
        for (const auto& t : split_list(value))
            cfg.ebno_db.push_back(parse_num<double>(t, context));
    }
    else if (key == "frames") cfg.frames = parse_num<long>(value, context);
    else if (key == "target_errors") cfg.target_errors = parse_num<long>(value, context);
    else if (key == "fdts") cfg.fd_ts = parse_num<double>(value, context);
    else if (key == "csi_xi") cfg.csi_xi = parse_num<double>(value, context);
    else if (key == "coded") cfg.coded = parse_bool(value, context);
    else if (key == "seed") cfg.seed = parse_num<std::uint64_t>(value, context);
    else if (key == "out") cfg.out_dir = value;
    else if (key == "workers") cfg.workers = parse_num<int>(value, context);
    else throw ConfigError(context + ": unknown key '" + key + "'");
}

SimConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    SimConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        apply_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)),
                           path + ":" + std::to_string(lineno));
    }
    return cfg;
}

Codebook codebook_from_config(const SimConfig& cfg) {
    if (!cfg.codebook_path.empty()) return load_codebook(cfg.codebook_path);
    const RotationStyle style = rotation_style_from_string(cfg.style);
    if (!cfg.f_matrix_path.empty()) {
        const FactorGraph g = FactorGraph::from_file(cfg.f_matrix_path);
        std::vector<Eigen::MatrixXi> mappings;
        for (int k = 0; k < g.users(); ++k) {
            Eigen::MatrixXi v = Eigen::MatrixXi::Zero(g.resources(), g.p_dims());
            int j = 0;
            for (int n : g.zeta[k]) v(n, j++) = 1;
            mappings.push_back(std::move(v));
        }
        return build_codebook_with_mappings(mappings, cfg.m_points, style);
    }
    return build_codebook(cfg.k_layers, cfg.n_resources, cfg.p_dims, cfg.m_points, style);
}

namespace {

// one uncoded frame = one SCMA use
void run_uncoded_frame(long frame, const SimConfig& cfg, const Codebook& cb,
                       const FactorGraph& graph, const JakesFader& fader,
                       const DecoderVariant& variant, double noise_var, int iterations,
                       RunAggregate& agg) {
    Rng bits_rng = frame_rng(cfg.seed, static_cast<std::uint64_t>(frame), 1);
    Rng noise_rng = frame_rng(cfg.seed, static_cast<std::uint64_t>(frame), 2);
    Rng csi_rng = frame_rng(cfg.seed, static_cast<std::uint64_t>(frame), 3);

    std::vector<int> symbols(cb.k_layers);
    for (int k = 0; k < cb.k_layers; ++k)
        symbols[k] = static_cast<int>(bits_rng.raw() % static_cast<std::uint64_t>(cb.m_points));

    const Eigen::MatrixXcd h = fader.gains(frame);
    const ChannelRealization ch{h, noise_var};
    const Eigen::VectorXcd y = transmit(cb, symbols, ch, noise_rng);
    const Eigen::MatrixXcd h_est =
        cfg.csi_xi > 0.0 ? corrupt_csi(h, CsiErrorModel{cfg.csi_xi}, csi_rng) : h;

    const Eigen::ArrayXXd priors = Eigen::ArrayXXd::Zero(cb.k_layers, cb.m_points);
    const DetectResult det =
        detect(variant, y, cb, graph, h_est, noise_var, priors, iterations);

    for (int k = 0; k < cb.k_layers; ++k)
        for (int i = 0; i < cb.bits_per_symbol(); ++i) {
            const int sent = (symbols[k] >> i) & 1;
            const int got = det.llr.bit_llr(k, i) > 0.0 ? 1 : 0;
            if (sent != got) ++agg.bit_errors;
            ++agg.bits;
        }
    agg.add_detect(det.diag);
    ++agg.frames;
}

void run_coded_frame(long frame, const SimConfig& cfg, const Codebook& cb,
                     const FactorGraph& graph, const JakesFader& fader,
                     const DecoderVariant& variant, double noise_var, int iterations,
                     const TurboConfig& tc, RunAggregate& agg) {
    Rng bits_rng = frame_rng(cfg.seed, static_cast<std::uint64_t>(frame), 1);
    Rng noise_rng = frame_rng(cfg.seed, static_cast<std::uint64_t>(frame), 2);
    Rng csi_rng = frame_rng(cfg.seed, static_cast<std::uint64_t>(frame), 3);

    const int bits = cb.bits_per_symbol();
    const int uses = uses_for_coded_frame(tc, bits);

    std::vector<std::vector<std::uint8_t>> info(cb.k_layers), coded(cb.k_layers);
    for (int k = 0; k < cb.k_layers; ++k) {
        info[k].resize(tc.info_length);
        for (auto& b : info[k]) b = static_cast<std::uint8_t>(bits_rng.bit());
        coded[k] = turbo_encode(info[k], tc);
        coded[k].resize(uses * bits, 0);  // pad to whole uses
    }

    std::vector<Eigen::VectorXcd> ys(uses);
    std::vector<Eigen::MatrixXcd> h_ests(uses);
    std::vector<int> symbols(cb.k_layers);
    for (int u = 0; u < uses; ++u) {
        const long step = frame * uses + u;
        const Eigen::MatrixXcd h = fader.gains(step);
        for (int k = 0; k < cb.k_layers; ++k) {
            int m = 0;
            for (int i = 0; i < bits; ++i)
                if (coded[k][u * bits + i]) m |= (1 << i);
            symbols[k] = m;
        }
        const ChannelRealization ch{h, noise_var};
        ys[u] = transmit(cb, symbols, ch, noise_rng);
        h_ests[u] = cfg.csi_xi > 0.0 ? corrupt_csi(h, CsiErrorModel{cfg.csi_xi}, csi_rng)
                                     : h;
    }

    const IddResult idd = idd_run(ys, h_ests, noise_var, variant, cb, graph, iterations,
                                  tc, cfg.outer_loops);
    for (int k = 0; k < cb.k_layers; ++k)
        for (int t = 0; t < tc.info_length; ++t) {
            if (idd.info_bits[k][t] != info[k][t]) ++agg.bit_errors;
            ++agg.bits;
        }
    agg.add_detect(idd.diag);
    ++agg.frames;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

ScenarioResult run_scenario(const SimConfig& cfg) {
    cfg.validate();
    const Codebook cb = codebook_from_config(cfg);
    const FactorGraph graph = [&] {
        std::vector<Eigen::MatrixXi> maps;
        for (const auto& layer : cb.layers) maps.push_back(layer.mapping);
        return FactorGraph::from_mappings(maps);
    }();
    const int iterations = cfg.effective_iterations();
    const double code_rate = cfg.coded ? 0.5 : 1.0;
    const TurboConfig tc{};

    ScenarioResult result;
    const JakesFader fader(cb.n_resources, cb.k_layers, cfg.fd_ts,
                           derive_stream_seed(cfg.seed, 0x6368616eULL));

    constexpr long kBatch = 128;

    for (const auto& name : cfg.decoders) {
        const DecoderKind kind = decoder_kind_from_string(name);
        for (double ebno : cfg.ebno_db) {
            const double noise_var = noise_var_for_ebno(ebno, code_rate, cb.m_points);
            const DecoderVariant variant =
                make_variant(kind, cfg.effective_t_max(kind, graph.d_c), cfg.epsilon,
                             cfg.alpha);

            RunAggregate total;
            long frame = 0;
            while (frame < cfg.frames) {
                const long batch_end = std::min(cfg.frames, frame + kBatch);
                const int nw = std::min<long>(cfg.workers, batch_end - frame);
                std::vector<RunAggregate> parts(nw);
                std::vector<std::thread> pool;
                for (int w = 0; w < nw; ++w) {
                    pool.emplace_back([&, w] {
                        for (long f = frame + w; f < batch_end; f += nw) {
                            if (cfg.coded)
                                run_coded_frame(f, cfg, cb, graph, fader, variant,
                                                noise_var, iterations, tc, parts[w]);
                            else
                                run_uncoded_frame(f, cfg, cb, graph, fader, variant,
                                                  noise_var, iterations, parts[w]);
                        }
                    });
                }
                for (auto& t : pool) t.join();
                for (const auto& p : parts) total.merge(p);
                frame = batch_end;
                if (cfg.target_errors > 0 && total.bit_errors >= cfg.target_errors) break;
            }

            result.ber.push_back({name, ebno, total.bits, total.bit_errors, total.frames});
            const long long per_search = total.searches > 0 ? total.searches : 1;
            for (size_t l = 0; l < total.visited.size(); ++l)
                result.nodes.push_back({name, ebno, static_cast<int>(l) + 1,
                                        static_cast<double>(total.visited[l]) /
                                            static_cast<double>(per_search)});

            // per-use operation counts from the closed forms; list decoders use
            // the measured mean radius-update count
            ComplexityParams cp;
            cp.n = cb.n_resources;
            cp.k = cb.k_layers;
            cp.d_c = graph.d_c;
            cp.m = cb.m_points;
            cp.it = iterations;
            cp.t_max = variant.t_max;
            cp.depth = graph.d_c * cb.d_lattice;
            if (kind == DecoderKind::Lnp || kind == DecoderKind::LsdLnp) {
                int mp = 0;
                for (int n = 0; n < graph.resources(); ++n)
                    for (int k : graph.xi[n])
                        mp = std::max(mp, static_cast<int>(projection_groups(cb, k, n).size()));
                cp.projections = mp;
            }
            cp.n_hat_l = total.searches > 0 ? total.radius_updates / total.searches : 0;
            const ComplexityReport rep =
                kind == DecoderKind::LsdLnp
                    ? analytic_complexity(DecoderKind::LsdMpa, cp)
                    : analytic_complexity(kind, cp);
            result.flops.push_back({name, ebno, static_cast<double>(rep.summations),
                                    static_cast<double>(rep.multiplications),
                                    static_cast<double>(rep.comparisons),
                                    static_cast<double>(rep.sqrt_ops)});
            result.aggregates.push_back(total);
        }
    }

    std::filesystem::create_directories(cfg.out_dir);
    {
        std::ofstream os(cfg.out_dir + "/ber.csv");
        os << "decoder,ebno_db,bits,errors,ber,frames\n";
        for (const auto& r : result.ber)
            os << r.decoder << ',' << format_double(r.ebno_db) << ',' << r.bits << ','
               << r.bit_errors << ',' << format_double(r.ber()) << ',' << r.frames << '\n';
    }
    {
        std::ofstream os(cfg.out_dir + "/nodes.csv");
        os << "decoder,ebno_db,level,mean_visited\n";
        for (const auto& r : result.nodes)
            os << r.decoder << ',' << format_double(r.ebno_db) << ',' << r.level << ','
               << format_double(r.mean_visited) << '\n';
    }
    {
        std::ofstream os(cfg.out_dir + "/flops.csv");
        os << "decoder,ebno_db,summations,multiplications,comparisons,sqrts\n";
        for (const auto& r : result.flops)
            os << r.decoder << ',' << format_double(r.ebno_db) << ','
               << format_double(r.summations) << ',' << format_double(r.multiplications)
               << ',' << format_double(r.comparisons) << ',' << format_double(r.sqrts)
               << '\n';
    }
    return result;
}

}  // namespace scma
