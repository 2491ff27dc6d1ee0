// Copyright 2026 The QSF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "qsf/error.hpp"
#include "qsf/spectral.hpp"
#include "test_util.hpp"

using namespace qsf;
using qsf::testing::random_adjacency;
using qsf::testing::random_circuit;
using qsf::testing::rel_close;

namespace {

double offdiag_oracle(const Eigen::MatrixXcd &u, const Eigen::MatrixXd &l) {
    const Eigen::Index n = u.rows();
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            Complex e = 0.0;
            for (Eigen::Index a = 0; a < n; ++a) {
                for (Eigen::Index b = 0; b < n; ++b) {
                    e += std::conj(u(a, i)) * l(a, b) * u(b, j);
                }
            }
            s += std::norm(e);
        }
    }
    return s;
}

LaplacianMatrix laplacian_of(const Eigen::MatrixXd &a) { return normalized_laplacian(a); }

Eigen::MatrixXd complete_graph(int n) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Ones(n, n);
    a.diagonal().setZero();
    return a;
}

} // namespace

TEST_SUITE("spectral-approx") {

TEST_CASE("off-diagonal loss examples") {
    const LaplacianMatrix k2 = laplacian_of(complete_graph(2));
    CHECK(offdiag_loss(Eigen::MatrixXcd::Identity(2, 2), k2) == doctest::Approx(2.0));

    const JacobiResult eig = jacobi_eigendecomposition(k2.entries);
    CHECK(offdiag_loss(eig.eigenvectors.cast<Complex>(), k2) < 1e-18);

    Rng rng(3);
    const LaplacianMatrix l8 = laplacian_of(random_adjacency(8, 0.4, rng));
    const Eigen::MatrixXcd u = circuit_unitary(random_circuit(3, 2, rng));
    CHECK(rel_close(offdiag_loss(u, l8), offdiag_oracle(u, l8.entries), 1e-12, 1e-14));
}

TEST_CASE("Jacobi eigensolver") {
    Eigen::MatrixXd d = Eigen::Vector3d(3.0, -1.0, 2.0).asDiagonal();
    const JacobiResult rd = jacobi_eigendecomposition(d);
    CHECK(rd.eigenvalues(0) == -1.0);
    CHECK(rd.eigenvalues(1) == 2.0);
    CHECK(rd.eigenvalues(2) == 3.0);

    const JacobiResult k2 = jacobi_eigendecomposition(laplacian_of(complete_graph(2)).entries);
    CHECK(k2.eigenvalues(0) == doctest::Approx(0.0));
    CHECK(k2.eigenvalues(1) == doctest::Approx(2.0));

    Eigen::MatrixXd p3 = Eigen::MatrixXd::Zero(3, 3);
    p3(0, 1) = p3(1, 0) = p3(1, 2) = p3(2, 1) = 1.0;
    const JacobiResult rp = jacobi_eigendecomposition(laplacian_of(p3).entries);
    CHECK(rp.eigenvalues(0) == doctest::Approx(0.0));
    CHECK(rp.eigenvalues(1) == doctest::Approx(1.0));
    CHECK(rp.eigenvalues(2) == doctest::Approx(2.0));

    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS((void)jacobi_eigendecomposition(bad), DimensionError);
}

TEST_CASE("Jacobi diagonalizes random Laplacians to round-off") {
    Rng rng(5);
    for (int n : {2, 4, 8, 16}) {
        for (int trial = 0; trial < 5; ++trial) {
            const LaplacianMatrix l = laplacian_of(random_adjacency(n, 0.3, rng));
            const JacobiResult r = jacobi_eigendecomposition(l.entries);
            const Eigen::MatrixXd v = r.eigenvectors;
            CHECK((v.transpose() * v - Eigen::MatrixXd::Identity(n, n)).norm() <= 1e-12);
            CHECK(offdiag_loss(v.cast<Complex>(), l) < 1e-18);
            CHECK(std::abs(r.eigenvalues.sum() - l.entries.trace()) <= 1e-9);
            CHECK(std::is_sorted(r.eigenvalues.begin(), r.eigenvalues.end()));
        }
    }
}

TEST_CASE("zero Laplacian has zero loss for any circuit") {
    Rng rng(6);
    LaplacianMatrix zero;
    zero.entries = Eigen::MatrixXd::Zero(8, 8);
    CHECK(offdiag_loss(circuit_unitary(random_circuit(3, 2, rng)), zero) == 0.0);
}

TEST_CASE("adjoint eigenspace gradient matches central differences") {
    Rng rng(7);
    for (int n = 1; n <= 4; ++n) {
        const LaplacianMatrix l = laplacian_of(random_adjacency(1 << n, 0.5, rng));
        const QsfCircuit c = random_circuit(n, 2, rng);
        const LossAndGradient adj = eigenspace_loss_gradient(c, l);
        const LossAndGradient fd = eigenspace_loss_gradient_fd(c, l);
        CHECK(adj.loss == doctest::Approx(fd.loss));
        REQUIRE(adj.gradient.size() == fd.gradient.size());
        for (std::size_t p = 0; p < adj.gradient.size(); ++p) {
            CHECK(rel_close(adj.gradient[p], fd.gradient[p], 1e-4, 1e-7));
        }
    }
}

TEST_CASE("trace is conserved and the loss goes down") {
    Rng rng(8);
    const Eigen::MatrixXd a = random_adjacency(8, 0.4, rng);
    const LaplacianMatrix l = laplacian_of(a);
    EigenApproxConfig cfg;
    cfg.n_layers = 4;
    cfg.iterations = 100;
    const EigenApproxResult r = optimize_eigenspace(l, qubit_connection_matrix(a, 3), cfg);
    REQUIRE(r.trace.losses.size() == 100);
    REQUIRE(r.conjugated_traces.size() == 100);
    for (double t : r.conjugated_traces) {
        CHECK(std::abs(t - l.entries.trace()) <= 1e-9);
    }
    CHECK(r.trace.losses.back() <= r.trace.losses.front());
    double running = r.trace.losses.front();
    for (double v : r.trace.losses) {
        running = std::min(running, v);
        CHECK(running <= r.trace.losses.front());
    }
}

TEST_CASE("three-qubit random graph converges with 20 layers") {
    const Eigen::MatrixXd a = erdos_renyi(8, 0.3, 11).adjacency;
    const LaplacianMatrix l = laplacian_of(a);
    EigenApproxConfig cfg;
    cfg.seed = 11;
    const EigenApproxResult r = optimize_eigenspace(l, qubit_connection_matrix(a, 3), cfg);
    const double final_loss = r.trace.losses.back();
    MESSAGE("final loss " << final_loss << " from " << r.trace.losses.front());
    CHECK(final_loss < 0.05);
}

TEST_CASE("recovered eigenvalues") {
    Rng rng(9);
    const LaplacianMatrix l = laplacian_of(random_adjacency(4, 0.6, rng));
    QsfCircuit identity;
    identity.n_qubits = 2;
    const Eigen::VectorXd diag = recovered_eigenvalues(identity, l);
    Eigen::VectorXd sorted_diag = l.entries.diagonal();
    std::sort(sorted_diag.begin(), sorted_diag.end());
    CHECK((diag - sorted_diag).norm() <= 1e-15);

    const QsfCircuit c = random_circuit(2, 2, rng);
    CHECK(std::abs(recovered_eigenvalues(c, l).sum() - l.entries.trace()) <= 1e-9);

    const Eigen::MatrixXd k4 = complete_graph(4);
    const LaplacianMatrix lk4 = laplacian_of(k4);
    EigenApproxConfig cfg;
    cfg.n_layers = 8;
    const EigenApproxResult r = optimize_eigenspace(lk4, qubit_connection_matrix(k4, 2), cfg);
    const Eigen::VectorXd got = recovered_eigenvalues(r.circuit, lk4);
    const Eigen::VectorXd want = jacobi_eigendecomposition(lk4.entries).eigenvalues;
    for (Eigen::Index i = 0; i < 4; ++i) {
        CHECK(std::abs(got(i) - want(i)) <= 0.05);
    }
}

TEST_CASE("eigen optimizer input validation") {
    const LaplacianMatrix l = laplacian_of(complete_graph(4));
    EigenApproxConfig cfg;
    cfg.iterations = 1;
    CHECK_THROWS_AS((void)optimize_eigenspace(l, qubit_connection_matrix(complete_graph(4), 3), cfg),
                    DimensionError);
}

} // TEST_SUITE
