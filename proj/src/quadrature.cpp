#include "ecosub/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "ecosub/errors.hpp"

namespace ecosub {

// Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
GaussRule gauss_hermite(int n) {
    if (n < 1) throw InvalidInput("gauss_hermite: n must be >= 1");
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(static_cast<double>(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double v0 = es.eigenvectors()(0, i);
        r.nodes[i] = es.eigenvalues()(i);
        r.weights[i] = v0 * v0;
        total += r.weights[i];
    }
    for (double& w : r.weights) w /= total;
    // Exact symmetry so that odd moments cancel.
    for (int i = 0; i < n / 2; ++i) {
        double x = 0.5 * (r.nodes[n - 1 - i] - r.nodes[i]);
        double w = 0.5 * (r.weights[i] + r.weights[n - 1 - i]);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    return r;
}

}  // namespace ecosub
