/*
   Copyright 2026 The ontic-sim Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/


#include <gtest/gtest.h>

#include "oracle.hpp"
#include "ontic/gates.hpp"
#include "ontic/qcore.hpp"
#include "ontic/random.hpp"

using namespace ontic;

namespace {

Matrix diag2(double a, double b)
{
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

} // namespace

TEST(HilbertSpace, DimensionsMultiply)
{
    HilbertSpace s({{"a", 2}, {"b", 3}});
    EXPECT_EQ(s.dim(), 6u);
    EXPECT_EQ(s.size(), 2u);
    EXPECT_EQ(s.position("b"), 1u);
    EXPECT_EQ(HilbertSpace::single("a", 2).concat(HilbertSpace::single("b", 3)), s);
}

TEST(HilbertSpace, RejectsBadFactors)
{
    try {
        HilbertSpace({{"a", 2}, {"a", 3}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::LabelClash);
    }
    EXPECT_THROW(HilbertSpace({{"a", 0}}), Error);
    try {
        HilbertSpace::single("a", 2).concat(HilbertSpace::single("a", 2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::LabelClash);
    }
    try {
        (void)HilbertSpace::single("a", 2).position("z");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownSubsystem);
    }
}

TEST(HilbertSpace, SelectAndRestrict)
{
    HilbertSpace s({{"a", 2}, {"b", 3}, {"c", 4}});
    EXPECT_EQ(s.select({"c", "a"}).labels(), (std::vector<std::string>{"c", "a"}));
    EXPECT_EQ(s.restrict_to({"c", "a"}).labels(), (std::vector<std::string>{"a", "c"}));
}

TEST(Tensor, MaximallyMixedProduct)
{
    const auto a = DensityMatrix::maximally_mixed(gates::qubit("a"));
    const auto b = DensityMatrix::maximally_mixed(gates::qubit("b"));
    const auto ab = tensor(a, b);
    EXPECT_EQ(ab.dim(), 4u);
    EXPECT_LT(max_abs(ab.matrix() - Matrix::Identity(4, 4) / 4.0), 1e-15);
}

TEST(Tensor, PureProductIsBasisProjector)
{
    const auto ud = tensor(DensityMatrix::from_pure(gates::up("a")), DensityMatrix::from_pure(gates::down("b")));
    Matrix expected = Matrix::Zero(4, 4);
    expected(1, 1) = 1.0;  // |↑↓⟩ = |01⟩
    EXPECT_LT(max_abs(ud.matrix() - expected), 1e-15);
}

TEST(Tensor, MatchesOracleKron)
{
    Rng rng(3);
    const auto a = random_density(rng, HilbertSpace::single("a", 2));
    const auto b = random_density(rng, HilbertSpace::single("b", 3));
    const auto ab = tensor(a, b);
    EXPECT_EQ(ab.dim(), 6u);
    EXPECT_LT(max_abs(ab.matrix() - oracle::kron(a.matrix(), b.matrix())), 1e-15);
}

TEST(PartialTrace, ProductRecoversFactor)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        const auto a = random_density(rng, HilbertSpace::single("A", 3));
        const auto b = random_density(rng, HilbertSpace::single("B", 2));
        const auto reduced = partial_trace(tensor(a, b), {"A"});
        EXPECT_LT(max_abs(reduced.matrix() - a.matrix()), 1e-14);
        EXPECT_EQ(reduced.space(), a.space());
    }
}

TEST(PartialTrace, ImproperMixtureEigenvalues)
{
    // c1 |ΨA1, ΨB1⟩ + c2 |ΨA2, ΨB2⟩ with |c1|² = 0.36 and random orthonormal sets
    Rng rng(11);
    const HilbertSpace a_space = HilbertSpace::single("A", 3);
    const HilbertSpace b_space = HilbertSpace::single("B", 2);
    const Matrix ua = random_unitary(rng, a_space).matrix();
    const Matrix ub = random_unitary(rng, b_space).matrix();
    const Vector phi = 0.6 * oracle::kron(Vector(ua.col(0)), Vector(ub.col(0))) +
                       0.8 * oracle::kron(Vector(ua.col(1)), Vector(ub.col(1)));
    const auto rho = DensityMatrix::from_pure(PureState(a_space.concat(b_space), phi));
    const RealVector ev = hermitian_eigenvalues(partial_trace(rho, {"A"}).matrix());
    EXPECT_NEAR(ev(0), 0.0, 1e-12);
    EXPECT_NEAR(ev(1), 0.36, 1e-12);
    EXPECT_NEAR(ev(2), 0.64, 1e-12);
}

TEST(PartialTrace, BellGivesMaximallyMixed)
{
    const auto rho = DensityMatrix::from_pure(gates::bell("a", "b"));
    EXPECT_LT(max_abs(partial_trace(rho, {"a"}).matrix() - Matrix::Identity(2, 2) / 2.0), 1e-15);
    EXPECT_LT(max_abs(partial_trace(rho, {"b"}).matrix() - Matrix::Identity(2, 2) / 2.0), 1e-15);
}

TEST(PartialTrace, AgreesWithLoopOracleOnThreeFactors)
{
    const std::vector<std::size_t> dims{2, 3, 2};
    const HilbertSpace space({{"x", 2}, {"y", 3}, {"z", 2}});
    const std::vector<std::pair<std::set<std::string>, std::vector<bool>>> cases{
        {{"x"}, {true, false, false}},     {{"y"}, {false, true, false}},   {{"z"}, {false, false, true}},
        {{"x", "z"}, {true, false, true}}, {{"x", "y"}, {true, true, false}}, {{"y", "z"}, {false, true, true}}};
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(seed);
        const auto rho = random_density(rng, space);
        for (const auto& [keep, mask] : cases) {
            const auto got = partial_trace(rho, keep);
            EXPECT_LT(max_abs(got.matrix() - oracle::partial_trace(rho.matrix(), dims, mask)), 1e-14);
        }
    }
}

TEST(PartialTrace, PreservesTraceAndPositivity)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const auto rho = random_density(rng, HilbertSpace({{"a", 3}, {"b", 3}}));
        const auto r = partial_trace(rho, {"b"});
        EXPECT_NEAR(r.matrix().trace().real(), 1.0, 1e-12);
        EXPECT_GE(min_eigenvalue(r.matrix()), -1e-12);
    }
}

TEST(PartialTrace, ErrorPaths)
{
    const auto rho = DensityMatrix::maximally_mixed(gates::qubits("a", "b"));
    auto code_of = [&](const std::set<std::string>& keep) {
        try {
            (void)partial_trace(rho, keep);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    EXPECT_EQ(code_of({}), ErrorCode::UnknownSubsystem);
    EXPECT_EQ(code_of({"q"}), ErrorCode::UnknownSubsystem);
    EXPECT_EQ(code_of({"a", "b"}), ErrorCode::NothingToTrace);
}

TEST(CorrelationOperator, ProductIsZero)
{
    Rng rng(5);
    const auto rho = tensor(random_density(rng, gates::qubit("S")), random_density(rng, HilbertSpace::single("E", 3)));
    EXPECT_LT(max_abs(correlation_operator(rho, {"S"}, {"E"}).matrix), 1e-15);
}

TEST(CorrelationOperator, BellMatchesDirectComputation)
{
    const auto rho = DensityMatrix::from_pure(gates::bell("S", "E"));
    const Matrix chi = correlation_operator(rho, {"S"}, {"E"}).matrix;
    // ρ_Bell − 1/4 computed entry by entry
    Matrix expected = Matrix::Zero(4, 4);
    expected(0, 0) = 0.25;
    expected(1, 1) = -0.25;
    expected(2, 2) = -0.25;
    expected(3, 3) = 0.25;
    expected(0, 3) = 0.5;
    expected(3, 0) = 0.5;
    EXPECT_LT(max_abs(chi - expected), 1e-15);
}

TEST(CorrelationOperator, PartialTracesVanish)
{
    const std::vector<std::size_t> dims{2, 3};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const auto rho = random_density(rng, HilbertSpace({{"S", 2}, {"E", 3}}));
        const Matrix chi = correlation_operator(rho, {"S"}, {"E"}).matrix;
        EXPECT_LT(max_abs(oracle::partial_trace(chi, dims, {true, false})), 1e-12);
        EXPECT_LT(max_abs(oracle::partial_trace(chi, dims, {false, true})), 1e-12);
    }
}

TEST(CorrelationOperator, ReordersToSThenE)
{
    Rng rng(2);
    const auto rho = random_density(rng, HilbertSpace({{"E", 3}, {"S", 2}}));
    const auto chi = correlation_operator(rho, {"S"}, {"E"});
    EXPECT_EQ(chi.space.labels(), (std::vector<std::string>{"S", "E"}));
    const Matrix swapped = permute_factors(rho.matrix(), rho.space(), {"S", "E"});
    const Matrix rs = oracle::partial_trace(swapped, {2, 3}, {true, false});
    const Matrix re = oracle::partial_trace(swapped, {2, 3}, {false, true});
    EXPECT_LT(max_abs(chi.matrix - (swapped - oracle::kron(rs, re))), 1e-14);
}

TEST(CorrelationOperator, RejectsBadSplit)
{
    const auto rho = DensityMatrix::maximally_mixed(gates::qubits("S", "E"));
    try {
        (void)correlation_operator(rho, {"S"}, {"S"});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BadPartition);
    }
}

TEST(TraceDistance, KnownValues)
{
    const auto up = DensityMatrix::from_pure(gates::up("q"));
    const auto down = DensityMatrix::from_pure(gates::down("q"));
    const auto plus = DensityMatrix::from_pure(gates::plus("q"));
    const auto mixed = DensityMatrix::maximally_mixed(gates::qubit("q"));
    EXPECT_NEAR(trace_distance(plus, plus), 0.0, 1e-15);
    EXPECT_NEAR(trace_distance(up, down), 1.0, 1e-15);
    EXPECT_NEAR(trace_distance(plus, mixed), oracle::trace_distance2(plus.matrix(), mixed.matrix()), 1e-15);
    EXPECT_NEAR(trace_distance(plus, mixed), 0.5, 1e-15);
    EXPECT_THROW((void)trace_distance(up, DensityMatrix::from_pure(gates::up("r"))), Error);
}

TEST(TraceDistance, SymmetricAndBounded)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const HilbertSpace s = HilbertSpace::single("q", 2);
        const auto a = random_density(rng, s);
        const auto b = random_density(rng, s);
        const double d = trace_distance(a, b);
        EXPECT_NEAR(d, trace_distance(b, a), 1e-15);
        EXPECT_NEAR(d, oracle::trace_distance2(a.matrix(), b.matrix()), 1e-14);
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 1.0 + 1e-14);
    }
}

TEST(PureState, ValidatesNorm)
{
    Vector v(2);
    v << 1.0, 1.0;
    try {
        PureState(gates::qubit("q"), v);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidState);
    }
    EXPECT_NEAR(PureState::normalized(gates::qubit("q"), v).amplitudes().norm(), 1.0, 1e-15);
    EXPECT_THROW(PureState::normalized(gates::qubit("q"), Vector::Zero(2)), Error);
}

TEST(PureState, CanonicalGlobalPhase)
{
    Vector v(2);
    v << Complex(0.0, 0.6), Complex(0.8, 0.0);
    const PureState psi(gates::qubit("q"), v);
    EXPECT_NEAR(psi.amplitudes()(0).imag(), 0.0, 1e-15);
    EXPECT_GT(psi.amplitudes()(0).real(), 0.0);
    EXPECT_LT(max_abs(psi.projector() - v * v.adjoint()), 1e-15);
}

TEST(DensityMatrix, RejectsInvalidMatrices)
{
    const HilbertSpace q = gates::qubit("q");
    auto code_of = [&](const Matrix& m) {
        try {
            DensityMatrix(q, m);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    EXPECT_EQ(code_of(diag2(1.2, -0.2)), ErrorCode::InvalidState);
    EXPECT_EQ(code_of(diag2(0.5, 0.6)), ErrorCode::InvalidState);
    Matrix skew = diag2(0.5, 0.5);
    skew(0, 1) = 0.1;
    EXPECT_EQ(code_of(skew), ErrorCode::InvalidState);
    EXPECT_EQ(code_of(Matrix::Identity(3, 3) / 3.0), ErrorCode::SpaceMismatch);
    EXPECT_NO_THROW(DensityMatrix(q, diag2(0.7, 0.3)));
}
