// Periodic hypercubic lattice geometry and its momentum grid.
//
// Sites are enumerated row-major over coordinates: the last coordinate runs
// fastest. Momenta are labelled by integer tuples n in {0..L-1}^d with
// k = 2*pi*n/L, enumerated in the same row-major order, so a momentum index
// and a site index share one indexing scheme.

#pragma once

#include "ssblab/types.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace ssblab::lattice {

using Coord = std::vector<int>;

class Lattice {
public:
    Lattice(int dimension, int linear_size);

    int dimension() const noexcept { return d_; }
    int linear_size() const noexcept { return L_; }
    int volume() const noexcept { return volume_; }

    Coord coord(int site) const;
    int index(std::span<const int> coord) const;  // coordinates taken mod L

    int neighbor(int site, int direction, int step = 1) const;
    int shifted(int site, std::span<const int> shift) const;

    // Site-to-site separation x - y, wrapped to a site index of Z_L^d.
    int separation(int x, int y) const;
    // Euclidean length of the minimum-image displacement for a separation index.
    double min_image_distance(int separation_index) const;

    std::vector<double> momentum(int k_index) const;
    int momentum_index(std::span<const double> k, double tol = 1e-9) const;  // throws off-grid
    int negate_momentum(int k_index) const;

    // e^{i k.x} for momentum index k and site x.
    cplx phase(int k_index, int site) const;

    bool operator==(const Lattice& other) const noexcept {
        return d_ == other.d_ && L_ == other.L_;
    }

private:
    int d_;
    int L_;
    int volume_;
    std::vector<int> strides_;
};

}  // namespace ssblab::lattice
