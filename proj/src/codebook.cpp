#include "scma/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace scma {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

bool is_power_of_two(int x) { return x > 0 && (x & (x - 1)) == 0; }

int int_log2(int x) {
    int l = 0;
    while ((1 << l) < x) ++l;
    return l;
}

}  // namespace

RotationStyle rotation_style_from_string(const std::string& s) {
    if (s == "identity") return RotationStyle::Identity;
    if (s == "opt" || s == "optimal-diversity") return RotationStyle::OptimalDiversity;
    if (s == "lnp") return RotationStyle::Lnp;
    throw std::invalid_argument("unknown rotation style: " + s);
}

std::string to_string(RotationStyle s) {
    switch (s) {
        case RotationStyle::Identity: return "identity";
        case RotationStyle::OptimalDiversity: return "optimal-diversity";
        case RotationStyle::Lnp: return "lnp";
    }
    return "identity";
}

Eigen::MatrixXd build_rotation_2d(RotationStyle style) {
    // [[a, -b], [b, a]] with unit column norms.
    double a = 1.0, b = 0.0;
    switch (style) {
        case RotationStyle::Identity:
            break;
        case RotationStyle::OptimalDiversity:
            // atan(2)/2 keeps every projection of the +-1 lattice distinct
            a = std::cos(0.5 * std::atan(2.0));
            b = std::sin(0.5 * std::atan(2.0));
            break;
        case RotationStyle::Lnp:
            // a = -b forces |a| = 1/sqrt(2); projections collapse to 3 values
            a = kInvSqrt2;
            b = -kInvSqrt2;
            break;
    }
    Eigen::MatrixXd m(2, 2);
    m << a, -b, b, a;
    return m;
}

Eigen::MatrixXd build_rotation_4d(RotationStyle style) {
    // [[a,-b,c,-d],[b,a,d,c],[-c,d,a,-b],[-d,-c,b,a]]
    double a = 1.0, b = 0.0, c = 0.0, d = 0.0;
    switch (style) {
        case RotationStyle::Identity:
            break;
        case RotationStyle::Lnp:
            a = kInvSqrt2;
            c = kInvSqrt2;
            break;
        default:
            throw std::invalid_argument("build_rotation_4d: unsupported style");
    }
    Eigen::MatrixXd m(4, 4);
    m << a, -b, c, -d,
         b, a, d, c,
         -c, d, a, -b,
         -d, -c, b, a;
    return m;
}

SelectionPair make_selection(int p, int d) {
    SelectionPair sel;
    sel.e_real = Eigen::MatrixXi::Zero(p, d);
    sel.e_imag = Eigen::MatrixXi::Zero(p, d);
    if (d == p) {
        // one real coordinate per complex dimension
        for (int i = 0; i < p; ++i) sel.e_real(i, i) = 1;
    } else if (d == 2 * p) {
        // coordinate pairs (2i, 2i+1) become (real, imag) of dimension i
        for (int i = 0; i < p; ++i) {
            sel.e_real(i, 2 * i) = 1;
            sel.e_imag(i, 2 * i + 1) = 1;
        }
    } else {
        throw std::invalid_argument("make_selection: need D == P or D == 2P");
    }
    return sel;
}

ConstellationOperator identity_operator(int p) {
    ConstellationOperator op;
    op.permutation.resize(p);
    for (int i = 0; i < p; ++i) op.permutation[i] = i;
    op.conjugate.assign(p, false);
    return op;
}

Eigen::VectorXd lattice_point(int label, int d) {
    Eigen::VectorXd u(d);
    for (int i = 0; i < d; ++i) u(i) = ((label >> i) & 1) ? 1.0 : -1.0;
    return u;
}

int label_of_point(const Eigen::VectorXd& u) {
    int label = 0;
    for (int i = 0; i < u.size(); ++i)
        if (u(i) > 0.0) label |= (1 << i);
    return label;
}

std::vector<Eigen::VectorXcd> build_mother_constellation(int m_points, int p,
                                                         const Eigen::MatrixXd& rot,
                                                         const SelectionPair& sel) {
    if (!is_power_of_two(m_points))
        throw std::invalid_argument("m_points must be a power of two");
    const int d = int_log2(m_points);
    if (rot.rows() != d || rot.cols() != d)
        throw std::invalid_argument("rotation dimension must equal log2(m_points)");
    if (sel.e_real.rows() != p || sel.e_real.cols() != d ||
        sel.e_imag.rows() != p || sel.e_imag.cols() != d)
        throw std::invalid_argument("selection matrices must be P x log2(m_points)");

    std::vector<Eigen::VectorXcd> pts(m_points);
    double energy = 0.0;
    for (int m = 0; m < m_points; ++m) {
        const Eigen::VectorXd w = rot * lattice_point(m, d);
        Eigen::VectorXcd x = Eigen::VectorXcd::Zero(p);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < d; ++j)
                x(i) += Cplx(sel.e_real(i, j) * w(j), sel.e_imag(i, j) * w(j));
        energy += x.squaredNorm();
        pts[m] = std::move(x);
    }
    const double scale = std::sqrt(static_cast<double>(m_points) / energy);
    for (auto& x : pts) x *= scale;
    return pts;
}

std::vector<Eigen::VectorXcd> apply_operator(const std::vector<Eigen::VectorXcd>& mother,
                                             const ConstellationOperator& op) {
    const Cplx rot = std::polar(1.0, op.phase);
    std::vector<Eigen::VectorXcd> out(mother.size());
    for (size_t m = 0; m < mother.size(); ++m) {
        const auto& x = mother[m];
        Eigen::VectorXcd y(x.size());
        for (int i = 0; i < x.size(); ++i) {
            Cplx v = x(op.permutation.empty() ? i : op.permutation[i]);
            if (!op.conjugate.empty() && op.conjugate[i]) v = std::conj(v);
            y(i) = rot * v;
        }
        out[m] = std::move(y);
    }
    return out;
}

namespace {

Eigen::MatrixXi mapping_from_rows(const std::vector<int>& rows, int n_resources) {
    Eigen::MatrixXi v = Eigen::MatrixXi::Zero(n_resources, static_cast<int>(rows.size()));
    for (int j = 0; j < static_cast<int>(rows.size()); ++j) v(rows[j], j) = 1;
    return v;
}

// All P-subsets of {0..N-1} in lexicographic order.
std::vector<std::vector<int>> subsets_lex(int n, int p) {
    std::vector<std::vector<int>> out;
    std::vector<int> idx(p);
    for (int i = 0; i < p; ++i) idx[i] = i;
    while (true) {
        out.push_back(idx);
        int i = p - 1;
        while (i >= 0 && idx[i] == n - p + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < p; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

// Lexicographically first choice of k_layers subsets giving equal row sums.
bool pick_regular(const std::vector<std::vector<int>>& all, size_t next,
                  std::vector<int>& load, int d_c, int remaining,
                  std::vector<std::vector<int>>& chosen) {
    if (remaining == 0) return true;
    if (all.size() - next < static_cast<size_t>(remaining)) return false;
    for (size_t i = next; i < all.size(); ++i) {
        bool fits = true;
        for (int r : all[i])
            if (load[r] + 1 > d_c) { fits = false; break; }
        if (!fits) continue;
        for (int r : all[i]) ++load[r];
        chosen.push_back(all[i]);
        if (pick_regular(all, i + 1, load, d_c, remaining - 1, chosen)) return true;
        chosen.pop_back();
        for (int r : all[i]) --load[r];
    }
    return false;
}

}  // namespace

std::vector<Eigen::MatrixXi> default_mappings(int k_layers, int n_resources, int p) {
    if (k_layers < 1 || p < 1 || p > n_resources)
        throw std::invalid_argument("default_mappings: bad dimensions");
    if (k_layers > binomial(n_resources, p))
        throw std::invalid_argument("default_mappings: K exceeds C(N,P)");
    if ((static_cast<long long>(k_layers) * p) % n_resources != 0)
        throw std::invalid_argument("default_mappings: K*P/N must be an integer");
    const int d_c = k_layers * p / n_resources;

    std::vector<std::vector<int>> rows;
    if (n_resources == 6 && k_layers == 12 && p == 2) {
        // the 200% overloading pattern: all 2-subsets of {0..5} minus the
        // matching {0,5},{1,2},{3,4}
        rows = {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 3}, {1, 4},
                {1, 5}, {2, 3}, {2, 4}, {2, 5}, {3, 5}, {4, 5}};
    } else if (k_layers == binomial(n_resources, p)) {
        rows = subsets_lex(n_resources, p);
    } else {
        const auto all = subsets_lex(n_resources, p);
        std::vector<int> load(n_resources, 0);
        if (!pick_regular(all, 0, load, d_c, k_layers, rows))
            throw std::invalid_argument("default_mappings: no regular assignment exists");
    }

    std::vector<Eigen::MatrixXi> maps;
    maps.reserve(k_layers);
    for (const auto& r : rows) maps.push_back(mapping_from_rows(r, n_resources));
    return maps;
}

Eigen::RowVectorXcd Codebook::generator_row(int n, int k) const {
    const auto& layer = layers[k];
    Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(d_lattice);
    for (int j = 0; j < p_dims; ++j)
        if (layer.mapping(n, j) == 1) row = layer.generator.row(j);
    return row;
}

Codebook build_codebook_with_mappings(const std::vector<Eigen::MatrixXi>& mappings,
                                      int m_points, RotationStyle style) {
    if (mappings.empty())
        throw std::invalid_argument("build_codebook: at least one mapping required");
    const int k_layers = static_cast<int>(mappings.size());
    const int n_resources = static_cast<int>(mappings[0].rows());
    const int p = static_cast<int>(mappings[0].cols());
    if ((static_cast<long long>(k_layers) * p) % n_resources != 0)
        throw std::invalid_argument("build_codebook: K*P/N must be an integer");
    if (!is_power_of_two(m_points))
        throw std::invalid_argument("build_codebook: m_points must be a power of two");
    const int d = int_log2(m_points);

    Eigen::MatrixXd rot;
    if (d == 1) {
        rot = Eigen::MatrixXd::Identity(1, 1);
    } else if (d == 2) {
        rot = build_rotation_2d(style);
    } else if (d == 4) {
        rot = build_rotation_4d(style);
    } else {
        throw std::invalid_argument("build_codebook: supported sizes are M in {2,4,16}");
    }

    const SelectionPair sel = make_selection(p, d);
    const int d_c = k_layers * p / n_resources;

    Codebook cb;
    cb.k_layers = k_layers;
    cb.n_resources = n_resources;
    cb.p_dims = p;
    cb.m_points = m_points;
    cb.d_lattice = d;
    cb.style = style;
    cb.layers.resize(k_layers);

    // base complex map from lattice coordinates to the P nonzero dimensions
    Eigen::MatrixXcd base = Eigen::MatrixXcd::Zero(p, d);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < d; ++j)
            base(i, j) = Cplx(sel.e_real(i, j), sel.e_imag(i, j));
    Eigen::MatrixXcd g0 = base * rot;

    // unit average codeword energy; rotation is unitary and u has constant
    // modulus, so every codeword ends up with energy exactly 1
    double energy = 0.0;
    for (int m = 0; m < m_points; ++m) energy += (g0 * lattice_point(m, d)).squaredNorm();
    g0 *= std::sqrt(static_cast<double>(m_points) / energy);

    for (int k = 0; k < k_layers; ++k) {
        auto& layer = cb.layers[k];
        layer.phase = k * 2.0 * std::numbers::pi / (m_points * d_c);
        layer.mapping = mappings[k];
        layer.generator = std::polar(1.0, layer.phase) * g0;
        layer.codewords = Eigen::MatrixXcd::Zero(n_resources, m_points);
        const Eigen::MatrixXcd expand =
            layer.mapping.cast<double>().cast<Cplx>() * layer.generator;
        for (int m = 0; m < m_points; ++m)
            layer.codewords.col(m) = expand * lattice_point(m, d);
    }
    return cb;
}

Codebook build_codebook(int k_layers, int n_resources, int p, int m_points,
                        RotationStyle style) {
    return build_codebook_with_mappings(default_mappings(k_layers, n_resources, p),
                                        m_points, style);
}

std::vector<std::vector<int>> projection_groups(const Codebook& cb, int k, int n,
                                                double tol) {
    bool occupied = false;
    for (int j = 0; j < cb.p_dims; ++j)
        if (cb.layers[k].mapping(n, j) == 1) occupied = true;
    if (!occupied)
        throw std::invalid_argument("projection_groups: resource not used by layer");

    std::vector<std::vector<int>> groups;
    std::vector<Cplx> reps;
    for (int m = 0; m < cb.m_points; ++m) {
        const Cplx c = cb.component(n, k, m);
        bool placed = false;
        for (size_t g = 0; g < reps.size(); ++g) {
            if (std::abs(c - reps[g]) < tol) {
                groups[g].push_back(m);
                placed = true;
                break;
            }
        }
        if (!placed) {
            reps.push_back(c);
            groups.push_back({m});
        }
    }
    return groups;
}

void save_codebook(const Codebook& cb, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_codebook: cannot open " + path);
    os << cb.k_layers << ' ' << cb.n_resources << ' ' << cb.p_dims << ' '
       << cb.m_points << ' ' << to_string(cb.style) << '\n';
    char buf[96];
    for (const auto& layer : cb.layers) {
        for (int j = 0; j < cb.p_dims; ++j) {
            int row = -1;
            for (int n = 0; n < cb.n_resources; ++n)
                if (layer.mapping(n, j) == 1) row = n;
            os << row << (j + 1 < cb.p_dims ? ' ' : '\n');
        }
        for (int n = 0; n < cb.n_resources; ++n) {
            for (int m = 0; m < cb.m_points; ++m) {
                const Cplx c = layer.codewords(n, m);
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g", c.real(), c.imag());
                os << buf << (m + 1 < cb.m_points ? ' ' : '\n');
            }
        }
    }
}

Codebook load_codebook(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_codebook: cannot open " + path);
    Codebook cb;
    std::string style;
    if (!(is >> cb.k_layers >> cb.n_resources >> cb.p_dims >> cb.m_points >> style))
        throw std::runtime_error("load_codebook: bad header");
    cb.style = rotation_style_from_string(style);
    cb.d_lattice = int_log2(cb.m_points);
    cb.layers.resize(cb.k_layers);
    for (auto& layer : cb.layers) {
        layer.mapping = Eigen::MatrixXi::Zero(cb.n_resources, cb.p_dims);
        for (int j = 0; j < cb.p_dims; ++j) {
            int row;
            if (!(is >> row) || row < 0 || row >= cb.n_resources)
                throw std::runtime_error("load_codebook: bad mapping row");
            layer.mapping(row, j) = 1;
        }
        layer.codewords = Eigen::MatrixXcd::Zero(cb.n_resources, cb.m_points);
        for (int n = 0; n < cb.n_resources; ++n) {
            for (int m = 0; m < cb.m_points; ++m) {
                std::string tok;
                if (!(is >> tok)) throw std::runtime_error("load_codebook: truncated table");
                const auto comma = tok.find(',');
                if (comma == std::string::npos)
                    throw std::runtime_error("load_codebook: malformed entry " + tok);
                layer.codewords(n, m) = Cplx(std::stod(tok.substr(0, comma)),
                                             std::stod(tok.substr(comma + 1)));
            }
        }
        // recover the generator from the codeword table: column differences
        // along single-coordinate label flips give 2 * generator column
        layer.generator = Eigen::MatrixXcd::Zero(cb.p_dims, cb.d_lattice);
        for (int j = 0; j < cb.p_dims; ++j) {
            int row = -1;
            for (int n = 0; n < cb.n_resources; ++n)
                if (layer.mapping(n, j) == 1) row = n;
            for (int bit = 0; bit < cb.d_lattice; ++bit) {
                const int m1 = 1 << bit;  // label with only bit set vs label 0
                layer.generator(j, bit) =
                    (layer.codewords(row, m1) - layer.codewords(row, 0)) / 2.0;
            }
        }
    }
    return cb;
}

}  // namespace scma
