// Independent reference computations for the test suites.
//
// Nothing here calls into the library's operator, environment or entropy code:
// operators are assembled from Kronecker products, g from the defining double
// sum, and the first-order integrand in real space.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline const double kPi = std::acos(-1.0);

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// op on factor `site` of n factors of dimension q (factor 0 leftmost).
inline Mat embed(const Mat& op, int site, int n, int q) {
    Mat out = Mat::Identity(1, 1);
    for (int f = 0; f < n; ++f) out = kron(out, f == site ? op : Mat(Mat::Identity(q, q)));
    return out;
}

inline Mat pauli_x() { Mat m(2, 2); m << 0, 1, 1, 0; return m; }
inline Mat pauli_z() { Mat m(2, 2); m << 1, 0, 0, -1; return m; }

inline Mat lower(int n_max) {
    Mat a = Mat::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

// Periodic chain: H = -J sum_x z_x z_{x+1} - h sum_x x_x (L bonds).
inline Mat ising_chain(int L, double J, double h) {
    Mat H = Mat::Zero(1 << L, 1 << L);
    for (int x = 0; x < L; ++x) {
        H -= J * embed(pauli_z(), x, L, 2) * embed(pauli_z(), (x + 1) % L, L, 2);
        H -= h * embed(pauli_x(), x, L, 2);
    }
    return H;
}

// Minimum-image distance on a periodic 1-d ring.
inline double ring_distance(int x, int y, int L) {
    int r = ((x - y) % L + L) % L;
    return std::min(r, L - r);
}

// g_{k1 k2} = gbar sum_{x,y in C} f(x - y) e^{i k1 x} e^{-i k2 y} on a ring.
inline Mat g_matrix(int L, const std::vector<int>& contact, double gbar,
                    const std::function<double(int, int)>& f) {
    Mat g = Mat::Zero(L, L);
    for (int k1 = 0; k1 < L; ++k1)
        for (int k2 = 0; k2 < L; ++k2) {
            cplx acc = 0;
            for (int x : contact)
                for (int y : contact)
                    acc += f(x, y) * std::polar(1.0, 2 * kPi * (k1 * x - k2 * y) / L);
            g(k1, k2) = gbar * acc;
        }
    return g;
}

// gbar sum_{x,y in C} f(x - y) <da(x) phi | da(y) phi>: the first-order
// integrand written in real space.
inline double real_space_integrand(const Vec& phi, const std::vector<Mat>& a_site,
                                   const std::vector<int>& contact, double gbar,
                                   const std::function<double(int, int)>& f) {
    std::vector<Vec> u(a_site.size());
    for (std::size_t x = 0; x < a_site.size(); ++x) {
        Vec w = a_site[x] * phi;
        u[x] = w - phi.dot(w) * phi;
    }
    cplx acc = 0;
    for (int x : contact)
        for (int y : contact) acc += f(x, y) * u[x].dot(u[y]);
    return gbar * acc.real();
}

// Dense Lindbladian on vec(rho) (column stacking) for jumps {(rate, L)}:
// d rho/dt = -i[H, rho] + sum rate (2 L rho L^dag - {L^dag L, rho}).
inline Mat liouvillian(const Mat& H, const std::vector<std::pair<double, Mat>>& jumps) {
    const Eigen::Index d = H.rows();
    const Mat I = Mat::Identity(d, d);
    const cplx i(0, 1);
    Mat out = -i * (kron(I, H) - kron(H.transpose(), I));
    for (const auto& [rate, L] : jumps) {
        const Mat LdL = L.adjoint() * L;
        out += rate * (2.0 * kron(L.conjugate(), L) - kron(I, LdL) - kron(LdL.transpose(), I));
    }
    return out;
}

// Same generator written directly from the momentum-space correlation matrix:
// lambda^2 sum g_{k1 k2} (2 a_{k2} rho a_{k1}^dag - {a_{k1}^dag a_{k2}, rho}).
inline Mat liouvillian_g(const Mat& H, const std::vector<Mat>& a_k, const Mat& g, double lambda) {
    const Eigen::Index d = H.rows();
    const Mat I = Mat::Identity(d, d);
    Mat out = liouvillian(H, {});
    for (std::size_t k1 = 0; k1 < a_k.size(); ++k1)
        for (std::size_t k2 = 0; k2 < a_k.size(); ++k2) {
            const cplx c = lambda * lambda * g(k1, k2);
            if (std::abs(c) == 0.0) continue;
            const Mat prod = a_k[k1].adjoint() * a_k[k2];
            out += c * (2.0 * kron(a_k[k1].conjugate(), a_k[k2]) - kron(I, prod) - kron(prod.transpose(), I));
        }
    return out;
}

inline Mat evolve_exact(const Mat& liou, const Mat& rho0, double t) {
    const Eigen::Index d = rho0.rows();
    Vec v = Eigen::Map<const Vec>(rho0.data(), d * d);
    Vec w = (liou * t).exp() * v;
    return Eigen::Map<Mat>(w.data(), d, d);
}

inline double purity(const Mat& rho) { return (rho * rho).trace().real(); }

// Closed form of the boson first-order rate for |N> in k = 0 with f = const:
// lambda^2 [n0 (g+00 + g-00) + sum_k g-_kk / |Lambda|].
inline double boson_number_rate(double lambda, double n0, double g00_plus, double g00_minus,
                                double trace_g_minus, int volume) {
    return lambda * lambda * (n0 * (g00_plus + g00_minus) + trace_g_minus / volume);
}

}  // namespace oracle
