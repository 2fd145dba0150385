// Tensor-product Hilbert spaces and full-space operator algebra.

#pragma once

#include "ssblab/lattice.hpp"
#include "ssblab/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ssblab {

// Mixed-radix product space. Factor 0 is the most significant digit of a basis
// index, so |s_0 s_1 ... s_{n-1}> has index sum_f s_f * stride(f).
class TensorSpace {
public:
    TensorSpace() = default;
    explicit TensorSpace(std::vector<int> local_dims);
    static TensorSpace uniform(int factors, int local_dim);

    int factors() const noexcept { return static_cast<int>(dims_.size()); }
    int local_dim(int factor) const { return dims_.at(static_cast<std::size_t>(factor)); }
    const std::vector<int>& local_dims() const noexcept { return dims_; }
    Eigen::Index dim() const noexcept { return dim_; }
    Eigen::Index stride(int factor) const { return strides_.at(static_cast<std::size_t>(factor)); }

    int digit(Eigen::Index basis_index, int factor) const;
    std::vector<int> digits(Eigen::Index basis_index) const;
    Eigen::Index compose(const std::vector<int>& digits) const;

    bool operator==(const TensorSpace& other) const noexcept { return dims_ == other.dims_; }

private:
    std::vector<int> dims_;
    std::vector<Eigen::Index> strides_;
    Eigen::Index dim_ = 1;
};

// A one-site operator a placed on a set of sites (every site by default).
struct LocalOperatorField {
    Mat site_op;
    std::vector<int> placement;  // empty: all of the lattice
    std::string label;

    LocalOperatorField(Mat op, std::string label = {}, std::vector<int> placement = {});

    int local_dim() const noexcept { return static_cast<int>(site_op.rows()); }
    bool covers_all(const lattice::Lattice& lattice) const;
};

// Family {a(x)} of full-space operators indexed by site. Spin fields come from
// embedding a LocalOperatorField; boson fields psi(x) are assembled from modes.
struct SiteOperators {
    std::vector<SpMat> at_site;
    std::string label;

    int sites() const noexcept { return static_cast<int>(at_site.size()); }
    Eigen::Index dim() const { return at_site.empty() ? 0 : at_site.front().rows(); }
    SiteOperators adjoint() const;
};

namespace ops {

Mat identity(int q);
// Spin-1/2 matrices with eigenvalues +-1 (Pauli normalisation). Local state 0 is up.
Mat s1();
Mat s2();
Mat s3();
// Truncated oscillator ladder on {0..n_max}.
Mat annihilation(int n_max);
Mat creation(int n_max);
// Orthonormal traceless basis of q x q matrices under <A,B> = tr(A^dag B).
std::vector<Mat> gell_mann_basis(int q);

}  // namespace ops

// a placed at tensor factor x: I (x) ... (x) a (x) ... (x) I.
SpMat embed_local(const Mat& site_op, int site, const TensorSpace& space);
SpMat embed_local(const LocalOperatorField& field, int site, const TensorSpace& space);

SiteOperators embed_field(const LocalOperatorField& field, const lattice::Lattice& lattice,
                          const TensorSpace& space);

// (1/|Lambda|) sum_x a(x). Requires the field to cover the whole lattice.
SpMat build_intensive(const LocalOperatorField& field, const lattice::Lattice& lattice,
                      const TensorSpace& space);
SpMat build_intensive(const SiteOperators& field, const lattice::Lattice& lattice);

// a_k = |Lambda|^{-1} sum_x a(x) e^{ikx}.
SpMat momentum_transform(const LocalOperatorField& field, int k_index,
                         const lattice::Lattice& lattice, const TensorSpace& space);
SpMat momentum_transform(const SiteOperators& field, int k_index, const lattice::Lattice& lattice);
SpMat momentum_transform(const SiteOperators& field, std::span<const double> k,
                         const lattice::Lattice& lattice);

// Prod_x a(x) over all sites (used for the spin-flip parity).
SpMat product_over_sites(const Mat& site_op, const TensorSpace& space);

// Permutation implementing x -> x + shift on a site-basis space.
SpMat translation_operator(const lattice::Lattice& lattice, const TensorSpace& space,
                           std::span<const int> shift);

double operator_norm_bound(const SpMat& op);  // max absolute row sum
double commutator_norm(const SpMat& a, const SpMat& b);
bool is_diagonal(const SpMat& op);
bool is_hermitian(const SpMat& op, double tol = 1e-12);

}  // namespace ssblab
