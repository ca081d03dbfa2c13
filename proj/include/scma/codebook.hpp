#pragma once

#include <Eigen/Core>
#include <complex>
#include <string>
#include <vector>

namespace scma {

using Cplx = std::complex<double>;

// Rotation applied to the real lattice coordinates of the mother constellation.
// "Lnp" picks the angles that collapse per-resource projections (3 values for
// 4-point, 9 for 16-point); "OptimalDiversity" keeps all projections distinct.
enum class RotationStyle { Identity, OptimalDiversity, Lnp };

RotationStyle rotation_style_from_string(const std::string& s);
std::string to_string(RotationStyle s);

// 2x2 rotation acting on D=2 lattice coordinates. Unitary to 1e-12.
Eigen::MatrixXd build_rotation_2d(RotationStyle style);

// 4x4 rotation for 16-point codebooks (a=c=1/sqrt(2), b=d=0).
Eigen::MatrixXd build_rotation_4d(RotationStyle style);

// E_r/E_i route each real lattice coordinate into the real or imaginary part
// of one of the P complex dimensions. Each column of [e_real; e_imag] has
// exactly one 1; rows select disjoint coordinate sets.
struct SelectionPair {
    Eigen::MatrixXi e_real;  // P x D
    Eigen::MatrixXi e_imag;  // P x D
};

SelectionPair make_selection(int p, int d);

// Per-layer constellation operator: permute dimensions, conjugate flagged
// dimensions, then rotate by a common phase.
struct ConstellationOperator {
    double phase = 0.0;
    std::vector<int> permutation;    // size P, bijection
    std::vector<bool> conjugate;     // size P
};

ConstellationOperator identity_operator(int p);

// Binary label -> lattice point u in {-1,+1}^d. Bit i of the label drives
// coordinate i (0 -> -1, 1 -> +1).
Eigen::VectorXd lattice_point(int label, int d);
int label_of_point(const Eigen::VectorXd& u);

// All m_points mother constellation points x = (E_r + i E_i) * rot * u,
// scaled to unit average energy.
std::vector<Eigen::VectorXcd> build_mother_constellation(int m_points, int p,
                                                         const Eigen::MatrixXd& rot,
                                                         const SelectionPair& sel);

std::vector<Eigen::VectorXcd> apply_operator(const std::vector<Eigen::VectorXcd>& mother,
                                             const ConstellationOperator& op);

struct CodebookLayer {
    Eigen::MatrixXcd generator;   // P x D, codeword(m) = mapping * generator * u(m)
    Eigen::MatrixXi mapping;      // N x P binary
    Eigen::MatrixXcd codewords;   // N x M, column m is the sparse codeword
    double phase = 0.0;
};

struct Codebook {
    int k_layers = 0;
    int n_resources = 0;
    int p_dims = 0;
    int m_points = 0;
    int d_lattice = 0;  // log2(m_points)
    RotationStyle style = RotationStyle::Identity;
    std::vector<CodebookLayer> layers;

    int bits_per_symbol() const { return d_lattice; }
    Cplx component(int n, int k, int m) const { return layers[k].codewords(n, m); }
    // Row n of mapping*generator: the 1xD map from lattice coordinates to the
    // layer's component on resource n (zero row when the layer skips n).
    Eigen::RowVectorXcd generator_row(int n, int k) const;
};

// Sparse mapping patterns for all layers. Reproduces the reference indicator
// matrices for (K=6,N=4,P=2) and (K=12,N=6,P=2); other shapes take the
// lexicographically first regular assignment of P-subsets.
std::vector<Eigen::MatrixXi> default_mappings(int k_layers, int n_resources, int p);

Codebook build_codebook(int k_layers, int n_resources, int p, int m_points,
                        RotationStyle style);

// Same construction with caller-supplied mapping matrices (e.g. from a custom
// indicator file); dimensions are inferred from the mappings.
Codebook build_codebook_with_mappings(const std::vector<Eigen::MatrixXi>& mappings,
                                      int m_points, RotationStyle style);

// Partition of {0..M-1} whose classes share the component value on resource n
// (within tol). Representative = smallest index. Requires f_{n,k} = 1.
std::vector<std::vector<int>> projection_groups(const Codebook& cb, int k, int n,
                                                double tol = 1e-9);

// Text export/import: header "K N P M style", then per layer the mapping row
// pattern and the N x M component table as "re,im" pairs, row-major.
// Round-trips losslessly.
void save_codebook(const Codebook& cb, const std::string& path);
Codebook load_codebook(const std::string& path);

}  // namespace scma
