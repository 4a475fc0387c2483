#include <gtest/gtest.h>

#include <numbers>

#include "test_util.hpp"

using namespace cohcost;
using namespace testutil;

TEST(ComplexMatrix, RejectsNonFiniteEntries) {
  std::vector<cplx> d = {1.0, std::nan(""), 0.0, 1.0};
  EXPECT_THROW(ComplexMatrix(2, 2, d), ValidationError);
  EXPECT_THROW(ComplexMatrix(2, 2, std::vector<cplx>(3)), ValidationError);
}

TEST(ComplexMatrix, ProductMatchesTextbookProduct) {
  Rng rng(5);
  ComplexMatrix a = ginibre(4, 3, rng), b = ginibre(3, 5, rng);
  EXPECT_LT(max_diff(a * b, naive_mul(a, b)), 1e-14);
}

TEST(HermitianEig, DiagonalInput) {
  Spectrum sp = hermitian_eig(ComplexMatrix::diagonal(std::vector<double>{3, 1, 2}));
  EXPECT_DOUBLE_EQ(sp.values[0], 1.0);
  EXPECT_DOUBLE_EQ(sp.values[1], 2.0);
  EXPECT_DOUBLE_EQ(sp.values[2], 3.0);
  EXPECT_NEAR(std::abs(sp.vectors(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(sp.vectors(2, 1)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(sp.vectors(0, 2)), 1.0, 1e-15);
}

TEST(HermitianEig, PauliX) {
  Spectrum sp = hermitian_eig(pauli_x());
  EXPECT_NEAR(sp.values[0], -1.0, 1e-15);
  EXPECT_NEAR(sp.values[1], 1.0, 1e-15);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(sp.vectors(0, 0)), r, 1e-14);
  EXPECT_NEAR(std::abs(sp.vectors(0, 0) + sp.vectors(1, 0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(sp.vectors(0, 1) - sp.vectors(1, 1)), 0.0, 1e-14);
}

TEST(HermitianEig, TwoByTwoClosedForm) {
  Rng rng(17);
  for (int t = 0; t < 200; ++t) {
    double a = uniform(rng, -3, 3), d = uniform(rng, -3, 3);
    cplx b = complex_normal(rng);
    ComplexMatrix h = ComplexMatrix::from_rows({{a, b}, {std::conj(b), d}});
    double mean = (a + d) / 2, rad = std::sqrt((a - d) * (a - d) / 4 + std::norm(b));
    Spectrum sp = hermitian_eig(h);
    EXPECT_NEAR(sp.values[0], mean - rad, 1e-12);
    EXPECT_NEAR(sp.values[1], mean + rad, 1e-12);
  }
}

TEST(HermitianEig, ReconstructsSeededSixBySix) {
  Rng rng(7);
  ComplexMatrix h = random_hermitian(6, rng);
  Spectrum sp = hermitian_eig(h);
  ComplexMatrix back = sp.vectors * ComplexMatrix::diagonal(sp.values) * sp.vectors.adjoint();
  EXPECT_LT(operator_norm(back - h), 1e-10);
}

TEST(HermitianEig, ReconstructionPropertyOverRandomInstances) {
  Rng rng(2024);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = uniform_index(rng, 1, 12);
    ComplexMatrix h = random_hermitian(n, rng) * std::pow(10.0, uniform(rng, -2, 2));
    Spectrum sp = hermitian_eig(h);
    ComplexMatrix back = naive_mul(naive_mul(sp.vectors, ComplexMatrix::diagonal(sp.values)), sp.vectors.adjoint());
    const double hn = operator_norm(h);
    ASSERT_LE(operator_norm(back - h), 1e-9 * (1.0 + hn));
    ASSERT_LE(operator_norm(naive_mul(sp.vectors.adjoint(), sp.vectors) - ComplexMatrix::identity(n)), 1e-10);
    for (std::size_t k = 1; k < n; ++k) ASSERT_LE(sp.values[k - 1], sp.values[k]);
  }
}

TEST(HermitianEig, RejectsNonHermitianAndNonSquare) {
  EXPECT_THROW(hermitian_eig(ComplexMatrix::from_rows({{0.0, 1.0}, {0.0, 0.0}})), ValidationError);
  EXPECT_THROW(hermitian_eig(ComplexMatrix(2, 3)), ValidationError);
}

TEST(HermitianEig, SweepBudgetExhaustionReportsOffDiagonalNorm) {
  Rng rng(1);
  ComplexMatrix h = random_hermitian(5, rng);
  try {
    hermitian_eig(h, JacobiOptions{1e-13, 1});
    FAIL() << "expected a convergence error";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.off_diagonal_norm(), 0.0);
  }
}

TEST(FuncHermitian, IdentityFunction) {
  Rng rng(3);
  ComplexMatrix h = random_hermitian(4, rng);
  EXPECT_LT(max_diff(func_hermitian(h, [](double x) { return cplx(x); }), h), 1e-12);
}

TEST(FuncHermitian, ExponentialOfPauliX) {
  ComplexMatrix u = expm_hermitian(pauli_x() * (std::numbers::pi / 2), 1.0);
  EXPECT_LT(max_diff(u, pauli_x() * cplx(0.0, -1.0)), 1e-10);
}

TEST(FuncHermitian, ClampedSquareRoot) {
  ComplexMatrix r = psd_sqrt(ComplexMatrix::diagonal(std::vector<double>{4, 9}));
  EXPECT_LT(max_diff(r, ComplexMatrix::diagonal(std::vector<double>{2, 3})), 1e-14);
}

TEST(PsdSqrt, IdentityAndProjector) {
  EXPECT_LT(max_diff(psd_sqrt(ComplexMatrix::identity(3)), ComplexMatrix::identity(3)), 1e-14);
  CVector plus = {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  ComplexMatrix p = outer(plus, plus);
  EXPECT_LT(max_diff(psd_sqrt(p), p), 1e-12);
}

TEST(PsdSqrt, WishartResidual) {
  Rng rng(3);
  ComplexMatrix p = random_wishart(4, 4, rng);
  ComplexMatrix r = psd_sqrt(p);
  EXPECT_LT(operator_norm(naive_mul(r, r) - p), 1e-9);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = uniform_index(rng, 1, 6);
    ComplexMatrix q = random_wishart(n, uniform_index(rng, 1, n), rng);
    ComplexMatrix s = psd_sqrt(q);
    ASSERT_LT(operator_norm(naive_mul(s, s) - q), 1e-9);
  }
}

TEST(PsdSqrt, RejectsNegativeEigenvalue) {
  try {
    psd_sqrt(ComplexMatrix::diagonal(std::vector<double>{1.0, -1e-6}));
    FAIL() << "expected a not-PSD error";
  } catch (const NotPsdError& e) {
    EXPECT_NEAR(e.eigenvalue(), -1e-6, 1e-15);
  }
  EXPECT_NO_THROW(psd_sqrt(ComplexMatrix::diagonal(std::vector<double>{1.0, -1e-11})));
}

TEST(Kron, Conventions) {
  EXPECT_LT(max_diff(kron(ComplexMatrix::identity(2), ComplexMatrix::identity(3)), ComplexMatrix::identity(6)), 1e-300);
  EXPECT_LT(max_diff(kron(pauli_z(), ComplexMatrix::identity(2)),
                     ComplexMatrix::diagonal(std::vector<double>{1, 1, -1, -1})),
            1e-300);
  ComplexMatrix p0 = ComplexMatrix::diagonal(std::vector<double>{1, 0});
  ComplexMatrix p1 = ComplexMatrix::diagonal(std::vector<double>{0, 1});
  ComplexMatrix k = kron(p0, p1);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(k(i, j), cplx(i == 1 && j == 1 ? 1.0 : 0.0));
}

TEST(Kron, Associativity) {
  Rng rng(9);
  ComplexMatrix a = ginibre(2, 3, rng), b = ginibre(3, 2, rng), c = ginibre(2, 2, rng);
  ComplexMatrix l = kron(kron(a, b), c), r = kron(a, kron(b, c));
  ASSERT_EQ(l.rows(), r.rows());
  EXPECT_LT(max_diff(l, r), 1e-13);
}

TEST(PartialTrace, ProductRuleAndLinearity) {
  Rng rng(12);
  for (int t = 0; t < 100; ++t) {
    ComplexMatrix a = ginibre(2, 2, rng), b = ginibre(3, 3, rng), c = ginibre(2, 2, rng), d = ginibre(3, 3, rng);
    ComplexMatrix ab = kron(a, b), cd = kron(c, d);
    ASSERT_LT(max_diff(partial_trace(ab, Keep::S, 2, 3), a * b.trace()), 1e-12);
    ASSERT_LT(max_diff(partial_trace(ab, Keep::E, 2, 3), b * a.trace()), 1e-12);
    cplx w(0.3, -1.2);
    ASSERT_LT(max_diff(partial_trace(ab * w + cd, Keep::S, 2, 3),
                       partial_trace(ab, Keep::S, 2, 3) * w + partial_trace(cd, Keep::S, 2, 3)),
              1e-12);
  }
}

TEST(PartialTrace, BellStateAndSwap) {
  CVector bell = {1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0)};
  EXPECT_LT(max_diff(partial_trace(outer(bell, bell), Keep::E, 2, 2), ComplexMatrix::identity(2) * 0.5), 1e-15);

  Rng rng(4);
  ComplexMatrix rho = random_density(3, rng).mat(), sigma = random_density(3, rng).mat();
  ComplexMatrix swap(9, 9);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) swap(j * 3 + i, i * 3 + j) = 1.0;
  ComplexMatrix out = swap * kron(rho, sigma) * swap.adjoint();
  EXPECT_LT(max_diff(partial_trace(out, Keep::S, 3, 3), sigma), 1e-14);
}

TEST(PartialTrace, MultipartiteAgreesWithBipartite) {
  Rng rng(8);
  ComplexMatrix m = random_density(12, rng).mat();
  EXPECT_LT(max_diff(partial_trace(m, {2, 2, 3}, {0, 1}), partial_trace(m, Keep::S, 4, 3)), 1e-14);
  EXPECT_LT(max_diff(partial_trace(m, {2, 2, 3}, {2}), partial_trace(m, Keep::E, 4, 3)), 1e-14);
  CVector psi = random_vector(12, rng);
  EXPECT_LT(max_diff(reduced_state(psi, {2, 6}, {1}), reduced_state(psi, Keep::E, 2, 6)), 1e-14);
  EXPECT_LT(max_diff(reduced_state(psi, Keep::S, 2, 6), partial_trace(outer(psi, psi), Keep::S, 2, 6)), 1e-14);
}

TEST(Norms, Examples) {
  EXPECT_DOUBLE_EQ(operator_norm(ComplexMatrix::diagonal(std::vector<double>{-0.5, 0.5})), 0.5);
  Rng rng(2);
  ComplexMatrix rho = random_density(3, rng).mat();
  EXPECT_EQ(trace_norm(rho - rho), 0.0);
  EXPECT_LT(max_diff(commutator(pauli_x(), pauli_z()), pauli_y() * cplx(0.0, -2.0)), 1e-15);
}

TEST(Norms, LargeMatrixPathMatchesKnownSpectrum) {
  const std::size_t n = 200;
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = double(i) / double(n) - 0.3;
  d[17] = -1.7;
  Rng rng(6);
  ComplexMatrix q = random_unitary_matrix(n, rng);
  ComplexMatrix m = q * ComplexMatrix::diagonal(d) * q.adjoint();
  EXPECT_NEAR(operator_norm(m), 1.7, 1e-8);
}

TEST(Norms, TraceNormOfHermitianIsSumOfAbsoluteEigenvalues) {
  Rng rng(10);
  for (int t = 0; t < 50; ++t) {
    ComplexMatrix h = random_hermitian(4, rng);
    Spectrum sp = hermitian_eig(h);
    double s = 0.0;
    for (double v : sp.values) s += std::abs(v);
    ASSERT_NEAR(trace_norm(h), s, 1e-10);
    ASSERT_NEAR(trace_norm_hermitian(h), s, 1e-10);
  }
}
