#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "repfam/algebra/element.hpp"
#include "repfam/algebra/model.hpp"
#include "repfam/algebra/representation.hpp"
#include "repfam/algebra/toeplitz.hpp"
#include "test_support.hpp"

using namespace repfam;
using repfam::testing::random_element;
using repfam::testing::random_matrix;
using repfam::testing::random_toeplitz;

namespace {

AlgebraElement diag_fn(const ModelPtr& m, Complex (*a)(double), Complex (*b)(double)) {
    return AlgebraElement::from_function(m, [&](double t) { return ComplexMatrix::diagonal({a(t), b(t)}); });
}

AlgebraElement witness_f(const ModelPtr& m) {
    return diag_fn(m, [](double) { return Complex(1.0); }, [](double t) { return Complex(1.0 - t); });
}

ModelPtr matrix_three_points() {
    BlockStructure s(2);
    s.diagonal_at(1.0);
    return std::make_shared<AlgebraModel>("matrix-endpoint", BaseSpace::interval_grid({0.0, 0.5, 1.0}), std::move(s));
}

std::vector<ModelPtr> gallery_models() {
    BlockStructure sub(3);
    sub.subblocks_at(0.5, {{0, 1}, {1, 3}});
    BlockStructure disc(3);
    disc.subblocks_at(1.0, {{0, 2}, {2, 3}});
    return {gallery::matrix_endpoint(1.0 / 8, 3), gallery::scalar_interval(0.1), gallery::circle(0.125, 2),
            gallery::interval(0.25, sub), gallery::discrete(4, disc)};
}

}  // namespace

TEST(BaseSpace, IntervalGridHasEndpointsAndStep) {
    auto b = BaseSpace::interval(0.25);
    EXPECT_EQ(b.grid(), (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
    EXPECT_DOUBLE_EQ(b.grid_step(), 0.25);
    auto r = BaseSpace::interval(0.25, 3);
    EXPECT_EQ(r.size(), 8u);
    EXPECT_DOUBLE_EQ(r.grid()[6], 1.0 - 0.25 / 8);
    EXPECT_DOUBLE_EQ(r.grid_step(), 0.25);
}

TEST(BaseSpace, CirclePeriodicity) {
    auto c = BaseSpace::circle(0.25);
    EXPECT_EQ(c.size(), 4u);
    EXPECT_EQ(c.index_of(1.0), std::optional<std::size_t>(0));
    EXPECT_NEAR(c.distance(0.05, 0.95), 0.1, 1e-15);
    EXPECT_DOUBLE_EQ(c.grid_step(), 0.25);
}

TEST(BaseSpace, Validation) {
    EXPECT_THROW(BaseSpace::interval(0.0), InvalidArgument);
    EXPECT_THROW(BaseSpace::interval_grid({0.0, 0.5}), InvalidArgument);
    EXPECT_THROW(BaseSpace::discrete(0), InvalidArgument);
    BlockStructure s(2);
    s.diagonal_at(0.3);
    EXPECT_THROW(AlgebraModel("x", BaseSpace::interval(0.25), s), InvalidArgument);
    EXPECT_THROW(BlockStructure(3).subblocks_at(0.0, {{0, 1}, {2, 3}}), InvalidArgument);
}

TEST(AlgebraElement, ConstraintViolationRejected) {
    auto m = matrix_three_points();
    EXPECT_THROW(AlgebraElement::from_function(m, [](double) { return ComplexMatrix{{1.0, 1.0}, {0.0, 1.0}}; }),
                 InvalidArgument);
}

TEST(AlgebraElement, InterpolatesBetweenGridPoints) {
    auto m = gallery::scalar_interval(0.5);
    auto a = AlgebraElement::from_function(m, [](double t) { return ComplexMatrix{{t * t}}; });
    EXPECT_NEAR(std::abs(a.at(0.25)(0, 0) - 0.125), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(a.lipschitz_bound(), 1.5);
    EXPECT_THROW(a.at(1.5), IncompatibleModel);
}

TEST(AlgebraElement, DifferentModelsIncompatible) {
    auto a = AlgebraElement::identity(gallery::scalar_interval(0.5));
    auto b = AlgebraElement::identity(gallery::scalar_interval(0.5));
    EXPECT_THROW(a + b, IncompatibleModel);
}

TEST(ElemNorm, IdentityIsExactlyOne) {
    auto n = elem_norm(AlgebraElement::identity(gallery::matrix_endpoint(1.0 / 16)));
    EXPECT_DOUBLE_EQ(n.value, 1.0);
    EXPECT_DOUBLE_EQ(n.error, 0.0);
}

TEST(ElemNorm, WitnessHasNormOne) {
    auto n = elem_norm(witness_f(gallery::matrix_endpoint(1.0 / 64)));
    EXPECT_DOUBLE_EQ(n.value, 1.0);
}

TEST(ElemNorm, CalculusMaximumAtEndpoint) {
    // max of t and 2t(1−t) on [0,1] is 1, attained at t = 1.
    auto m = gallery::matrix_endpoint(1.0 / 64);
    auto a = diag_fn(m, [](double t) { return Complex(t); }, [](double t) { return Complex(2 * t * (1 - t)); });
    auto n = elem_norm(a);
    EXPECT_NEAR(n.value, 1.0, n.error + 1e-15);
    EXPECT_DOUBLE_EQ(n.argmax, 1.0);
    EXPECT_LE(n.error, 2.0 / 128 + 1e-12);
}

TEST(ElemNorm, CStarIdentityWithinErrorBars) {
    std::mt19937_64 rng(3);
    for (const auto& m : gallery_models()) {
        for (int trial = 0; trial < 10; ++trial) {
            auto a = random_element(rng, m);
            auto na = elem_norm(a);
            auto naa = elem_norm(a.adjoint() * a);
            EXPECT_NEAR(naa.value, na.value * na.value, 1e-10 * naa.value) << m->name;
        }
    }
}

TEST(Representation, StarMorphismOnRandomPairs) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    for (const auto& m : gallery_models()) {
        const auto prims = enum_prim(*m);
        for (int trial = 0; trial < 100; ++trial) {
            auto a = random_element(rng, m);
            auto b = random_element(rng, m);
            const Complex s(nd(rng), nd(rng));
            const auto& phi = prims[std::size_t(trial) % prims.size()].label;
            const auto pa = rep_apply(phi, a), pb = rep_apply(phi, b);
            EXPECT_LE((rep_apply(phi, a * b) - pa * pb).max_abs(), 1e-10);
            EXPECT_LE((rep_apply(phi, a.adjoint()) - pa.adjoint()).max_abs(), 1e-10);
            EXPECT_LE((rep_apply(phi, a + s * b) - (pa + pb * s)).max_abs(), 1e-10);
        }
    }
}

TEST(Representation, CompressedEvalOfWitness) {
    auto m = gallery::matrix_endpoint(1.0 / 64);
    auto f = witness_f(m);
    EXPECT_EQ(rep_apply(CompressedEval{1.0, 0}, f), (ComplexMatrix{{1.0}}));
    EXPECT_EQ(rep_apply(CompressedEval{1.0, 1}, f), (ComplexMatrix{{0.0}}));
    EXPECT_THROW(rep_apply(CompressedEval{0.5, 0}, f), IncompatibleModel);
    EXPECT_THROW(rep_apply(ToeplitzIdentity{}, f), IncompatibleModel);
}

TEST(Representation, CharacterOfShift) {
    const double theta = 0.7;
    auto m = rep_apply(ToeplitzCharacter{theta}, ToeplitzElement::shift(), 0);
    ASSERT_EQ(m.dim(), 1u);
    EXPECT_NEAR(std::abs(m(0, 0) - std::polar(1.0, theta)), 0.0, 1e-15);
}

TEST(Representation, ShiftSectionIsSubdiagonal) {
    ComplexMatrix expected{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
    EXPECT_EQ(rep_apply(ToeplitzIdentity{}, ToeplitzElement::shift(), 3), expected);
}

TEST(Representation, SectionSmallerThanCorrectionRejected) {
    auto x = ToeplitzElement::compact(ComplexMatrix::identity(4));
    EXPECT_THROW(rep_apply(ToeplitzIdentity{}, x, 3), TruncationTooSmall);
}

TEST(Toeplitz, StarMorphismOfCharactersAndSections) {
    // Characters are *-morphisms; sections of T(a)T(b) agree with the exact
    // product wherever the section does not see the cut.
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        auto a = random_toeplitz(rng, 2, 3), b = random_toeplitz(rng, 3, 2);
        const double theta = 0.1 * trial;
        ToeplitzCharacter chi{theta};
        EXPECT_LE((rep_apply(chi, a * b, 0) - rep_apply(chi, a, 0) * rep_apply(chi, b, 0)).max_abs(), 1e-10);
        EXPECT_LE((rep_apply(chi, a.adjoint(), 0) - rep_apply(chi, a, 0).adjoint()).max_abs(), 1e-10);
        EXPECT_EQ(rep_apply(ToeplitzIdentity{}, a.adjoint(), 12), rep_apply(ToeplitzIdentity{}, a, 12).adjoint());
    }
}

TEST(Toeplitz, ProductIsExact) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        auto a = random_toeplitz(rng, 2, 4), b = random_toeplitz(rng, 1, 3);
        auto ab = a * b;
        // Compare against a section much larger than any supports; the
        // bottom-right corner of the big product is polluted by the cut.
        const std::size_t big = 60, n = 30;
        auto prod = a.section(big) * b.section(big);
        auto sec = ab.section(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(std::abs(prod(i, j) - sec(i, j)), 0.0, 1e-12);
    }
}

TEST(Toeplitz, ShiftRelations) {
    // S*S = 1 and SS* − 1 = −E₀₀.
    auto s = ToeplitzElement::shift();
    auto sts = s.adjoint() * s;
    EXPECT_EQ(sts.section(10), ComplexMatrix::identity(10));
    auto sst = s * s.adjoint() - ToeplitzElement::scalar(1.0);
    EXPECT_EQ(sst.degree(), 0);
    EXPECT_EQ(sst.correction_support(), 1u);
    EXPECT_EQ(sst.correction()(0, 0), Complex(-1.0));
}

TEST(ToeplitzNorm, ShiftIsOne) {
    // The 1×1 section of S is zero; from N = 2 on it is a partial isometry.
    auto r = toeplitz_norm(ToeplitzElement::shift().with_sections({1, 2, 5, 64}));
    EXPECT_DOUBLE_EQ(r.by_section.front().second, 0.0);
    for (std::size_t i = 1; i < r.by_section.size(); ++i) EXPECT_NEAR(r.by_section[i].second, 1.0, 1e-14);
    EXPECT_NEAR(r.value, 1.0, 1e-14);
}

TEST(ToeplitzNorm, CosineSymbolApproachesTwo) {
    auto x = ToeplitzElement::from_symbol({{-1, 1.0}, {1, 1.0}});
    for (std::size_t n : {16u, 64u, 128u}) {
        const double oracle = 2.0 * std::cos(std::numbers::pi / double(n + 1));
        EXPECT_NEAR(toeplitz_norm(x.with_sections({n})).value, oracle, 1e-10);
    }
    EXPECT_LE(2.0 - toeplitz_norm(x.with_sections({64})).value, 0.01);
    EXPECT_LE(2.0 - toeplitz_norm(x.with_sections({128})).value, 0.005);
}

TEST(ToeplitzNorm, RankOneCorrection) {
    ComplexMatrix e00(1);
    e00(0, 0) = 1.0;
    auto r = toeplitz_norm(ToeplitzElement::compact(e00).with_sections({1, 2, 8, 33}));
    for (auto [n, v] : r.by_section) EXPECT_NEAR(v, 1.0, 1e-14) << n;
}

TEST(ToeplitzNorm, NondecreasingInSectionSize) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        auto x = random_toeplitz(rng, 3, 4).with_sections({4, 5, 8, 13, 21, 34});
        auto r = toeplitz_norm(x);
        for (std::size_t i = 1; i < r.by_section.size(); ++i)
            EXPECT_GE(r.by_section[i].second, r.by_section[i - 1].second - 1e-12);
        EXPECT_DOUBLE_EQ(r.value, r.by_section.back().second);
    }
}

TEST(EnumPrim, MatrixModelThreePoints) {
    auto prims = enum_prim(*matrix_three_points());
    ASSERT_EQ(prims.size(), 4u);
    EXPECT_EQ(prims[0].label, Representation(EvalPoint{0.0}));
    EXPECT_EQ(prims[1].label, Representation(EvalPoint{0.5}));
    EXPECT_EQ(prims[2].label, Representation(CompressedEval{1.0, 0}));
    EXPECT_EQ(prims[3].label, Representation(CompressedEval{1.0, 1}));
    EXPECT_EQ(prims[3].label.label(), "ev(1)[1]");
}

TEST(EnumPrim, ScalarIntervalOnePerGridPoint) {
    auto m = gallery::scalar_interval(0.1);
    EXPECT_EQ(enum_prim(*m).size(), m->base.size());
}

TEST(EnumPrim, ToeplitzClosureOfPi) {
    ToeplitzModel tm{8};
    auto prims = enum_prim(tm);
    ASSERT_EQ(prims.size(), 9u);
    EXPECT_TRUE(prims[0].label.is<ToeplitzIdentity>());
    ASSERT_EQ(prims[0].closure_hint.size(), 8u);
    for (std::size_t j = 1; j < prims.size(); ++j) {
        EXPECT_TRUE(prims[j].label.is<ToeplitzCharacter>());
        EXPECT_EQ(prims[0].closure_hint[j - 1], prims[j].label);
    }
}

TEST(EnumPrim, LabelsAreDistinct) {
    for (const auto& m : gallery_models()) {
        auto prims = enum_prim(*m);
        for (std::size_t i = 0; i < prims.size(); ++i)
            for (std::size_t j = i + 1; j < prims.size(); ++j) EXPECT_NE(prims[i].label.label(), prims[j].label.label());
    }
}

TEST(Support, EvalAtConstrainedPointSplitsIntoBlocks) {
    AnyModel m = matrix_three_points();
    auto s = support(EvalPoint{1.0}, m);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s[1], Representation(CompressedEval{1.0, 1}));
    EXPECT_EQ(support(EvalPoint{0.5}, m).size(), 1u);
    AnyModel tm = std::make_shared<const ToeplitzModel>(ToeplitzModel{8});
    EXPECT_EQ(support(ToeplitzIdentity{}, tm).size(), 9u);
    EXPECT_THROW(support(EvalPoint{0.5}, tm), IncompatibleModel);
}

TEST(NaProfile, WitnessProfile) {
    auto m = gallery::matrix_endpoint(1.0 / 16, 4);
    for (const auto& [p, n] : n_a_profile(witness_f(m))) {
        if (const auto* ce = std::get_if<CompressedEval>(&p.label.kind())) {
            EXPECT_DOUBLE_EQ(n, ce->block == 0 ? 1.0 : 0.0);
        } else {
            EXPECT_DOUBLE_EQ(n, 1.0) << p.label.label();
        }
    }
}

TEST(NaProfile, IdentityIsOne) {
    for (const auto& [p, n] : n_a_profile(AlgebraElement::identity(gallery::circle(0.1, 3)))) EXPECT_DOUBLE_EQ(n, 1.0);
}

TEST(NaProfile, CoordinateFunctionEqualsGrid) {
    auto m = gallery::scalar_interval(1.0 / 32);
    auto a = AlgebraElement::from_function(m, [](double t) { return ComplexMatrix{{t}}; });
    for (const auto& [p, n] : n_a_profile(a)) EXPECT_DOUBLE_EQ(n, p.label.as<EvalPoint>().t);
}

TEST(NaProfile, LowerSemicontinuityProxy) {
    std::mt19937_64 rng(23);
    for (const auto& m : {gallery::scalar_interval(0.05), gallery::matrix_endpoint(0.1, 0)}) {
        for (int trial = 0; trial < 20; ++trial) {
            auto a = random_element(rng, m);
            const auto& g = m->base.grid();
            const double slack = a.lipschitz_bound() * m->base.grid_step();
            std::vector<double> n(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) n[i] = op_norm(a.value(i));
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double s = n[i] - slack - 1e-12;
                for (std::size_t j = 0; j < g.size(); ++j) {
                    if (std::abs(g[i] - g[j]) <= m->base.grid_step() + 1e-15) {
                        EXPECT_GT(n[j], s);
                    }
                }
            }
        }
    }
}

TEST(PrimDistance, Metric) {
    AnyModel m = matrix_three_points();
    EXPECT_DOUBLE_EQ(prim_distance(m, EvalPoint{0.0}, EvalPoint{0.5}), 0.5);
    EXPECT_TRUE(std::isinf(prim_distance(m, CompressedEval{1.0, 0}, CompressedEval{1.0, 1})));
    EXPECT_DOUBLE_EQ(prim_distance(m, EvalPoint{0.5}, CompressedEval{1.0, 1}), 0.5);
    EXPECT_DOUBLE_EQ(prim_resolution(m), 0.5);
}
