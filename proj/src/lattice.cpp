// Periodic hypercubic lattice geometry.

#include "ssblab/lattice.hpp"

#include "ssblab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace ssblab::lattice {

Lattice::Lattice(int dimension, int linear_size) : d_(dimension), L_(linear_size) {
    if (d_ < 1) {
        throw DomainError("Lattice: dimension must be >= 1, got " + std::to_string(d_));
    }
    if (L_ < 1) {
        throw DomainError("Lattice: linear size must be >= 1, got " + std::to_string(L_));
    }
    strides_.assign(static_cast<std::size_t>(d_), 1);
    long long vol = 1;
    for (int mu = d_ - 1; mu >= 0; --mu) {
        strides_[static_cast<std::size_t>(mu)] = static_cast<int>(vol);
        vol *= L_;
        if (vol > (1LL << 30)) {
            throw DomainError("Lattice: volume L^d overflows");
        }
    }
    volume_ = static_cast<int>(vol);
}

Coord Lattice::coord(int site) const {
    if (site < 0 || site >= volume_) {
        throw DomainError("Lattice: site " + std::to_string(site) + " outside lattice");
    }
    Coord c(static_cast<std::size_t>(d_));
    for (int mu = 0; mu < d_; ++mu) {
        c[static_cast<std::size_t>(mu)] = (site / strides_[static_cast<std::size_t>(mu)]) % L_;
    }
    return c;
}

int Lattice::index(std::span<const int> c) const {
    if (static_cast<int>(c.size()) != d_) {
        throw DimensionError("Lattice: coordinate tuple has wrong dimension");
    }
    int idx = 0;
    for (int mu = 0; mu < d_; ++mu) {
        int v = c[static_cast<std::size_t>(mu)] % L_;
        if (v < 0) v += L_;
        idx += v * strides_[static_cast<std::size_t>(mu)];
    }
    return idx;
}

int Lattice::neighbor(int site, int direction, int step) const {
    if (direction < 0 || direction >= d_) {
        throw DomainError("Lattice: direction out of range");
    }
    Coord c = coord(site);
    c[static_cast<std::size_t>(direction)] += step;
    return index(c);
}

int Lattice::shifted(int site, std::span<const int> shift) const {
    Coord c = coord(site);
    if (static_cast<int>(shift.size()) != d_) {
        throw DimensionError("Lattice: shift has wrong dimension");
    }
    for (int mu = 0; mu < d_; ++mu) {
        c[static_cast<std::size_t>(mu)] += shift[static_cast<std::size_t>(mu)];
    }
    return index(c);
}

int Lattice::separation(int x, int y) const {
    Coord cx = coord(x);
    Coord cy = coord(y);
    for (int mu = 0; mu < d_; ++mu) {
        cx[static_cast<std::size_t>(mu)] -= cy[static_cast<std::size_t>(mu)];
    }
    return index(cx);
}

double Lattice::min_image_distance(int separation_index) const {
    const Coord c = coord(separation_index);
    double sq = 0.0;
    for (int v : c) {
        const int w = std::min(v, L_ - v);
        sq += static_cast<double>(w) * w;
    }
    return std::sqrt(sq);
}

std::vector<double> Lattice::momentum(int k_index) const {
    const Coord n = coord(k_index);
    std::vector<double> k(n.size());
    for (std::size_t mu = 0; mu < n.size(); ++mu) {
        k[mu] = 2.0 * std::numbers::pi * n[mu] / L_;
    }
    return k;
}

int Lattice::momentum_index(std::span<const double> k, double tol) const {
    if (static_cast<int>(k.size()) != d_) {
        throw DimensionError("Lattice: momentum has wrong dimension");
    }
    Coord n(static_cast<std::size_t>(d_));
    for (int mu = 0; mu < d_; ++mu) {
        const double scaled = k[static_cast<std::size_t>(mu)] * L_ / (2.0 * std::numbers::pi);
        const double nearest = std::round(scaled);
        if (std::abs(scaled - nearest) > tol) {
            throw DomainError("Lattice: momentum component " +
                              std::to_string(k[static_cast<std::size_t>(mu)]) +
                              " is not on the 2*pi*n/L grid");
        }
        n[static_cast<std::size_t>(mu)] = static_cast<int>(nearest);
    }
    return index(n);
}

int Lattice::negate_momentum(int k_index) const {
    Coord n = coord(k_index);
    for (int& v : n) v = -v;
    return index(n);
}

cplx Lattice::phase(int k_index, int site) const {
    const Coord n = coord(k_index);
    const Coord x = coord(site);
    long long dot = 0;
    for (std::size_t mu = 0; mu < n.size(); ++mu) {
        dot += static_cast<long long>(n[mu]) * x[mu];
    }
    // Reduce mod L before scaling so phases at large volumes stay exact.
    const double arg = 2.0 * std::numbers::pi * static_cast<double>(dot % L_) / L_;
    return {std::cos(arg), std::sin(arg)};
}

}  // namespace ssblab::lattice
