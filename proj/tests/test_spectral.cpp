#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "cmc/spectral.hpp"

using namespace cmc;

namespace {

std::vector<double> dense_spectrum(const SurfaceMesh& m) {
    const OperatorPair op = assemble_jacobi(m);
    const Eigen::MatrixXd A = Eigen::MatrixXd(op.stiffness - op.potential_mass);
    const Eigen::MatrixXd M = op.mass.asDiagonal();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, M);
    return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

void expect_matches_dense(const SurfaceMesh& m, int k) {
    const auto dense = dense_spectrum(m);
    EigenOptions opt;
    opt.k = k;
    const auto r = morse_index(m, opt);
    ASSERT_EQ(static_cast<int>(r.eigenvalues.size()), k);
    for (int i = 0; i < k; ++i)
        EXPECT_NEAR(r.eigenvalues[static_cast<size_t>(i)], dense[static_cast<size_t>(i)], 1e-8 * (1 + std::fabs(dense[static_cast<size_t>(i)])))
            << i;
    int neg = 0;
    for (double x : dense) neg += x < -r.threshold;
    EXPECT_EQ(r.index, neg);
    EXPECT_EQ(r.inertia_index, neg);
}

} // namespace

TEST(Spectral, OperatorsAreSymmetric) {
    const auto op = assemble_jacobi(build_mesh(classical_surface(Family::enneper), {DomainShape::disk, {2.0}, {8, 48}}));
    EXPECT_LT(symmetry_residual(op.stiffness), 1e-12);
    EXPECT_LT(symmetry_residual(op.potential_mass), 1e-12);
    EXPECT_GT(op.mass.minCoeff(), 0);
}

TEST(Spectral, DirichletConditionsRemoveBoundaryDofs) {
    const auto m = build_mesh(classical_surface(Family::plane), {DomainShape::disk, {1.0}, {6, 36}});
    const auto op = assemble_jacobi(m);
    const auto bnd = boundary_mask(m);
    int interior = 0;
    for (char b : bnd) interior += !b;
    EXPECT_EQ(op.n(), interior);
}

TEST(Spectral, ConstantsAreInTheStiffnessKernelAwayFromBoundary) {
    const auto m = build_mesh(classical_surface(Family::catenoid), {DomainShape::annulus, {0.2, 5.0}, {12, 16}});
    const auto op = assemble_jacobi(m);
    const VecX one = VecX::Ones(op.n());
    const VecX s = op.stiffness * one;
    // rows whose vertex has no boundary neighbour sum to zero
    const auto bnd = boundary_mask(m);
    const auto vt = vertex_triangles(m);
    for (int d = 0; d < op.n(); ++d) {
        const int v = op.dof_vertex[static_cast<size_t>(d)];
        bool touches = false;
        for (int t : vt[static_cast<size_t>(v)])
            for (int w : m.triangles[static_cast<size_t>(t)]) touches = touches || bnd[static_cast<size_t>(w)];
        if (!touches) EXPECT_NEAR(s(d), 0.0, 1e-12);
    }
}

TEST(Spectral, LanczosMatchesDenseSolver) {
    expect_matches_dense(build_mesh(classical_surface(Family::plane), {DomainShape::disk, {1.0}, {8, 48}}), 6);
    expect_matches_dense(build_mesh(classical_surface(Family::catenoid), {DomainShape::annulus, {std::exp(-3.0), std::exp(3.0)}, {16, 16}}), 6);
    expect_matches_dense(build_mesh(classical_surface(Family::enneper), {DomainShape::disk, {3.0}, {10, 60}}), 6);
}

TEST(Spectral, OneSidedSpectrumIsPartOfTheFullSpectrum) {
    const auto m = build_mesh(classical_surface(Family::scherk_doubly_periodic), {DomainShape::sphere, {0.1}, {10, 10}});
    const auto dense = dense_spectrum(m);
    EigenOptions opt;
    opt.k = 4;
    const auto r = morse_index_one_sided(m, opt);
    for (double x : r.eigenvalues) {
        double best = 1e300;
        for (double y : dense) best = std::min(best, std::fabs(x - y));
        EXPECT_LT(best, 1e-8 * (1 + std::fabs(x))) << x;
    }
}

TEST(Spectral, EigenvaluesScaleInverselyWithArea) {
    const auto m = build_mesh(classical_surface(Family::catenoid), {DomainShape::annulus, {std::exp(-3.0), std::exp(3.0)}, {24, 24}});
    EigenOptions opt;
    opt.k = 3;
    const auto a = morse_index(m, opt);
    const auto b = morse_index(scaled(m, 2.0), opt);
    for (size_t i = 0; i < 3; ++i) EXPECT_NEAR(b.eigenvalues[i], a.eigenvalues[i] / 4, 1e-8 * std::fabs(a.eigenvalues[i]));
    EXPECT_EQ(a.index, b.index);
}

TEST(Spectral, FlatDiskGroundStateApproachesBesselZero) {
    // first Dirichlet eigenvalue of the unit disk is j_{0,1}^2
    const double j01 = 2.404825557695773;
    EigenOptions opt;
    opt.k = 1;
    const auto coarse = morse_index(build_mesh(classical_surface(Family::plane), {DomainShape::disk, {1.0}, {16, 96}}), opt);
    const auto fine = morse_index(build_mesh(classical_surface(Family::plane), {DomainShape::disk, {1.0}, {32, 192}}), opt);
    EXPECT_EQ(fine.index, 0);
    EXPECT_LT(std::fabs(fine.eigenvalues[0] - j01 * j01), std::fabs(coarse.eigenvalues[0] - j01 * j01));
    EXPECT_NEAR(fine.eigenvalues[0] / (j01 * j01), 1.0, 0.02);
}

TEST(Spectral, CatenoidHasIndexOne) {
    const auto r = morse_index(build_mesh(classical_surface(Family::catenoid), {DomainShape::annulus, {std::exp(-3.0), std::exp(3.0)}, {48, 48}}));
    EXPECT_EQ(r.index, 1);
    EXPECT_EQ(r.inertia_index, 1);
    EXPECT_FALSE(r.saturated);
}

TEST(Spectral, QuadraticFormIsPositiveOnFlatDisk) {
    const auto m = build_mesh(classical_surface(Family::plane), {DomainShape::disk, {1.0}, {6, 36}});
    const auto op = assemble_jacobi(m);
    const VecX one = VecX::Ones(op.n());
    EXPECT_GT(quadratic_form(op, one), 0.0);
}
