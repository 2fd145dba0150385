// Tensor-product embedding and lattice operator constructions.

#include "ssblab/operators.hpp"

#include "ssblab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ssblab {

TensorSpace::TensorSpace(std::vector<int> local_dims) : dims_(std::move(local_dims)) {
    strides_.assign(dims_.size(), 1);
    Eigen::Index running = 1;
    for (std::size_t f = dims_.size(); f-- > 0;) {
        if (dims_[f] < 1) {
            throw DimensionError("TensorSpace: factor " + std::to_string(f) +
                                 " has non-positive dimension");
        }
        strides_[f] = running;
        running *= dims_[f];
        if (running > (Eigen::Index{1} << 26)) {
            throw DimensionError("TensorSpace: total dimension exceeds 2^26");
        }
    }
    dim_ = running;
}

TensorSpace TensorSpace::uniform(int factors, int local_dim) {
    return TensorSpace(std::vector<int>(static_cast<std::size_t>(factors), local_dim));
}

int TensorSpace::digit(Eigen::Index basis_index, int factor) const {
    const auto f = static_cast<std::size_t>(factor);
    return static_cast<int>((basis_index / strides_[f]) % dims_[f]);
}

std::vector<int> TensorSpace::digits(Eigen::Index basis_index) const {
    std::vector<int> out(dims_.size());
    for (std::size_t f = 0; f < dims_.size(); ++f) {
        out[f] = static_cast<int>((basis_index / strides_[f]) % dims_[f]);
    }
    return out;
}

Eigen::Index TensorSpace::compose(const std::vector<int>& digits) const {
    if (digits.size() != dims_.size()) {
        throw DimensionError("TensorSpace: digit tuple has wrong length");
    }
    Eigen::Index idx = 0;
    for (std::size_t f = 0; f < dims_.size(); ++f) {
        idx += digits[f] * strides_[f];
    }
    return idx;
}

LocalOperatorField::LocalOperatorField(Mat op, std::string label_, std::vector<int> placement_)
    : site_op(std::move(op)), placement(std::move(placement_)), label(std::move(label_)) {
    if (site_op.rows() != site_op.cols() || site_op.rows() == 0) {
        throw DimensionError("LocalOperatorField: site operator must be square and non-empty");
    }
}

bool LocalOperatorField::covers_all(const lattice::Lattice& lattice) const {
    if (placement.empty()) return true;
    std::vector<bool> seen(static_cast<std::size_t>(lattice.volume()), false);
    for (int x : placement) {
        if (x >= 0 && x < lattice.volume()) seen[static_cast<std::size_t>(x)] = true;
    }
    for (bool s : seen) {
        if (!s) return false;
    }
    return true;
}

SiteOperators SiteOperators::adjoint() const {
    SiteOperators out;
    out.label = label + "^dag";
    out.at_site.reserve(at_site.size());
    for (const auto& op : at_site) out.at_site.emplace_back(op.adjoint());
    return out;
}

namespace ops {

Mat identity(int q) { return Mat::Identity(q, q); }

Mat s1() {
    Mat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Mat s2() {
    Mat m(2, 2);
    m << 0, -kI, kI, 0;
    return m;
}

Mat s3() {
    Mat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Mat annihilation(int n_max) {
    Mat a = Mat::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Mat creation(int n_max) { return annihilation(n_max).adjoint(); }

std::vector<Mat> gell_mann_basis(int q) {
    std::vector<Mat> basis;
    const double r = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < q; ++j) {
        for (int k = j + 1; k < q; ++k) {
            Mat sym = Mat::Zero(q, q);
            sym(j, k) = r;
            sym(k, j) = r;
            basis.push_back(sym);
            Mat asym = Mat::Zero(q, q);
            asym(j, k) = -kI * r;
            asym(k, j) = kI * r;
            basis.push_back(asym);
        }
    }
    for (int l = 1; l < q; ++l) {
        Mat diag = Mat::Zero(q, q);
        const double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
        for (int j = 0; j < l; ++j) diag(j, j) = norm;
        diag(l, l) = -l * norm;
        basis.push_back(diag);
    }
    return basis;
}

}  // namespace ops

SpMat embed_local(const Mat& site_op, int site, const TensorSpace& space) {
    if (site < 0 || site >= space.factors()) {
        throw DimensionError("embed_local: site " + std::to_string(site) +
                             " is not a factor of the space");
    }
    const int q = space.local_dim(site);
    if (site_op.rows() != q || site_op.cols() != q) {
        throw DimensionError("embed_local: operator is " + std::to_string(site_op.rows()) + "x" +
                             std::to_string(site_op.cols()) + " but site " + std::to_string(site) +
                             " has local dimension " + std::to_string(q));
    }
    const Eigen::Index dim = space.dim();
    const Eigen::Index stride = space.stride(site);
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(dim));
    for (Eigen::Index col = 0; col < dim; ++col) {
        const int s = space.digit(col, site);
        for (int sp = 0; sp < q; ++sp) {
            const cplx v = site_op(sp, s);
            if (v != cplx{0.0, 0.0}) {
                trips.emplace_back(col + (sp - s) * stride, col, v);
            }
        }
    }
    SpMat out(dim, dim);
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

SpMat embed_local(const LocalOperatorField& field, int site, const TensorSpace& space) {
    return embed_local(field.site_op, site, space);
}

SiteOperators embed_field(const LocalOperatorField& field, const lattice::Lattice& lattice,
                          const TensorSpace& space) {
    if (space.factors() != lattice.volume()) {
        throw DimensionError("embed_field: space has " + std::to_string(space.factors()) +
                             " factors for a lattice of " + std::to_string(lattice.volume()) +
                             " sites");
    }
    SiteOperators out;
    out.label = field.label;
    out.at_site.reserve(static_cast<std::size_t>(lattice.volume()));
    std::vector<bool> placed(static_cast<std::size_t>(lattice.volume()), field.placement.empty());
    for (int x : field.placement) {
        if (x < 0 || x >= lattice.volume()) {
            throw DimensionError("embed_field: placement site " + std::to_string(x) +
                                 " outside lattice");
        }
        placed[static_cast<std::size_t>(x)] = true;
    }
    for (int x = 0; x < lattice.volume(); ++x) {
        if (placed[static_cast<std::size_t>(x)]) {
            out.at_site.push_back(embed_local(field.site_op, x, space));
        } else {
            out.at_site.emplace_back(space.dim(), space.dim());
        }
    }
    return out;
}

SpMat build_intensive(const LocalOperatorField& field, const lattice::Lattice& lattice,
                      const TensorSpace& space) {
    if (!field.covers_all(lattice)) {
        throw DomainError("build_intensive: field placement must cover the whole lattice");
    }
    return build_intensive(embed_field(field, lattice, space), lattice);
}

SpMat build_intensive(const SiteOperators& field, const lattice::Lattice& lattice) {
    return momentum_transform(field, 0, lattice);
}

SpMat momentum_transform(const LocalOperatorField& field, int k_index,
                         const lattice::Lattice& lattice, const TensorSpace& space) {
    return momentum_transform(embed_field(field, lattice, space), k_index, lattice);
}

SpMat momentum_transform(const SiteOperators& field, int k_index, const lattice::Lattice& lattice) {
    if (field.sites() != lattice.volume()) {
        throw DimensionError("momentum_transform: field has " + std::to_string(field.sites()) +
                             " sites for a lattice of " + std::to_string(lattice.volume()));
    }
    if (k_index < 0 || k_index >= lattice.volume()) {
        throw DomainError("momentum_transform: momentum index out of range");
    }
    const Eigen::Index dim = field.dim();
    SpMat out(dim, dim);
    const double inv_vol = 1.0 / lattice.volume();
    for (int x = 0; x < lattice.volume(); ++x) {
        out += (lattice.phase(k_index, x) * inv_vol) * field.at_site[static_cast<std::size_t>(x)];
    }
    out.prune(cplx{0.0, 0.0}, 1e-15);
    return out;
}

SpMat momentum_transform(const SiteOperators& field, std::span<const double> k,
                         const lattice::Lattice& lattice) {
    return momentum_transform(field, lattice.momentum_index(k), lattice);
}

SpMat product_over_sites(const Mat& site_op, const TensorSpace& space) {
    SpMat out(space.dim(), space.dim());
    out.setIdentity();
    for (int x = 0; x < space.factors(); ++x) {
        out = embed_local(site_op, x, space) * out;
    }
    return out;
}

SpMat translation_operator(const lattice::Lattice& lattice, const TensorSpace& space,
                           std::span<const int> shift) {
    if (space.factors() != lattice.volume()) {
        throw DimensionError("translation_operator: space is not a site-basis space");
    }
    const Eigen::Index dim = space.dim();
    std::vector<int> target(static_cast<std::size_t>(lattice.volume()));
    for (int x = 0; x < lattice.volume(); ++x) {
        target[static_cast<std::size_t>(x)] = lattice.shifted(x, shift);
    }
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(dim));
    std::vector<int> out_digits(static_cast<std::size_t>(lattice.volume()));
    for (Eigen::Index col = 0; col < dim; ++col) {
        const std::vector<int> in = space.digits(col);
        for (std::size_t x = 0; x < in.size(); ++x) {
            out_digits[static_cast<std::size_t>(target[x])] = in[x];
        }
        trips.emplace_back(space.compose(out_digits), col, 1.0);
    }
    SpMat out(dim, dim);
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

double operator_norm_bound(const SpMat& op) {
    Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(op.rows());
    for (int c = 0; c < op.outerSize(); ++c) {
        for (SpMat::InnerIterator it(op, c); it; ++it) row_sums(it.row()) += std::abs(it.value());
    }
    return row_sums.size() == 0 ? 0.0 : row_sums.maxCoeff();
}

double commutator_norm(const SpMat& a, const SpMat& b) {
    const SpMat comm = SpMat(a * b) - SpMat(b * a);
    return comm.norm();
}

bool is_diagonal(const SpMat& op) {
    for (int c = 0; c < op.outerSize(); ++c) {
        for (SpMat::InnerIterator it(op, c); it; ++it) {
            if (it.row() != it.col() && it.value() != cplx{0.0, 0.0}) return false;
        }
    }
    return true;
}

bool is_hermitian(const SpMat& op, double tol) {
    if (op.rows() != op.cols()) return false;
    const SpMat diff = op - SpMat(op.adjoint());
    return diff.norm() <= tol * std::max(1.0, op.norm());
}

}  // namespace ssblab
