#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

#include "repfam/families.hpp"
#include "test_support.hpp"

using namespace repfam;
using repfam::testing::random_element;
using repfam::testing::random_matrix;
using repfam::testing::random_normal_element;
using repfam::testing::random_toeplitz;

namespace {

AlgebraElement witness_f(const ModelPtr& m) {
    return AlgebraElement::from_function(m, [](double t) { return ComplexMatrix::diagonal({1.0, 1.0 - t}); });
}

AlgebraElement coordinate(const ModelPtr& m) {
    return AlgebraElement::from_function(m, [](double t) { return ComplexMatrix{{t}}; });
}

// ev_t for t < 1 together with the endpoint block that carries f(1) = 1.
RepFamily counterexample(const ModelPtr& m) { return RepFamily::ev_grid(m, true, {0}); }

ModelPtr matrix_three_points() {
    BlockStructure s(2);
    s.diagonal_at(1.0);
    return std::make_shared<AlgebraModel>("matrix-endpoint", BaseSpace::interval_grid({0.0, 0.5, 1.0}), std::move(s));
}

ToeplitzModelPtr toeplitz(std::size_t samples = 64) { return std::make_shared<const ToeplitzModel>(ToeplitzModel{samples}); }

std::vector<Probe<AlgebraElement>> user(const RepFamily& f, std::vector<std::pair<std::string, AlgebraElement>> els) {
    return probe_gallery<AlgebraElement>(f, els);
}

// Smooth random element a(t) = A + t·B (+ projection at constrained points).
AlgebraElement smooth_random(std::mt19937_64& rng, const ModelPtr& m) {
    const auto a = random_matrix(rng, m->fiber_dim()), b = random_matrix(rng, m->fiber_dim());
    return AlgebraElement::from_function(m, [&](double t) {
        auto v = a + b * Complex(std::sin(2 * std::numbers::pi * t));
        if (const auto* c = m->blocks.constraint_at(t)) v = BlockStructure::project(*c, v);
        return v;
    });
}

}  // namespace

TEST(RepFamily, RejectsEmptyAndForeignMembers) {
    auto m = gallery::scalar_interval(0.25);
    EXPECT_THROW(RepFamily("x", m, {}), InvalidArgument);
    EXPECT_THROW(RepFamily("x", m, {ToeplitzIdentity{}}), IncompatibleModel);
    EXPECT_THROW(RepFamily("x", m, {EvalPoint{0.3}}), IncompatibleModel);
    EXPECT_THROW(RepFamily("x", m, {CompressedEval{1.0, 0}}), IncompatibleModel);
    EXPECT_THROW(RepFamily("x", toeplitz(), {EvalPoint{0.0}}), IncompatibleModel);
    EXPECT_THROW(RepFamily::ev_grid(m, false, {0}), InvalidArgument);
}

TEST(RepFamily, ElementOfAnotherModelIsIncompatible) {
    auto f = RepFamily::ev_grid(gallery::scalar_interval(0.25));
    EXPECT_THROW(norm_via_family(f, coordinate(gallery::scalar_interval(0.25))), IncompatibleModel);
    EXPECT_THROW(norm_via_family(f, ToeplitzElement::shift()), IncompatibleModel);
}

TEST(CheckFull, ToeplitzPiIsFull) {
    auto r = check_full(RepFamily::toeplitz_pi(toeplitz(8)));
    EXPECT_TRUE(r.full);
    EXPECT_FALSE(r.witness);
    for (long by : r.covered_by) EXPECT_EQ(by, 0);
}

TEST(CheckFull, CounterexampleFamilyMissesOneBlock) {
    auto r = check_full(counterexample(gallery::matrix_endpoint(1.0 / 64)));
    EXPECT_FALSE(r.full);
    EXPECT_EQ(r.witness, "ev(1)[1]");
}

TEST(CheckFull, AllPrimsIsFull) {
    for (AnyModel m : {AnyModel(gallery::matrix_endpoint(0.25)), AnyModel(gallery::circle(0.1, 2)), AnyModel(toeplitz(16))})
        EXPECT_TRUE(check_full(RepFamily::all_prims(m)).full);
}

TEST(CheckFull, EvalAtConstrainedPointCoversBothBlocks) {
    EXPECT_TRUE(check_full(RepFamily::ev_grid(gallery::matrix_endpoint(0.25))).full);
}

TEST(CheckExhausting, CounterexampleAttainsWitnessNorm) {
    auto m = gallery::matrix_endpoint(1.0 / 64);
    auto f = counterexample(m);
    std::vector<Probe<AlgebraElement>> probes{{"f", witness_f(m), ProbeKind::User}};
    EXPECT_TRUE(check_exhausting(f, probes).exhausting);
}

TEST(CheckExhausting, CounterexampleFailsOnSecondBlock) {
    // g(t) = diag(0, t): ‖g‖ = 1 only at the dropped block ev₁¹.
    auto m = gallery::matrix_endpoint(1.0 / 64);
    auto f = counterexample(m);
    auto g = AlgebraElement::from_function(m, [](double t) { return ComplexMatrix::diagonal({0.0, t}); });
    auto r = check_exhausting(f, std::vector<Probe<AlgebraElement>>{{"g", g, ProbeKind::User}});
    EXPECT_FALSE(r.exhausting);
    EXPECT_EQ(r.witness, "g");
    EXPECT_GT(r.witness_gap, 0.0);

    auto full = check_exhausting(f, user(f, {}));
    EXPECT_FALSE(full.exhausting);
    EXPECT_EQ(full.witness, "bump@ev(1)[1]");
}

TEST(CheckExhausting, FullFamilyAttainsRandomProbes) {
    std::mt19937_64 rng(1);
    for (auto m : {gallery::matrix_endpoint(0.125, 2), gallery::circle(0.1, 3)}) {
        auto f = RepFamily::all_prims(m);
        std::vector<std::pair<std::string, AlgebraElement>> els;
        for (int i = 0; i < 10; ++i) els.emplace_back("r" + std::to_string(i), random_element(rng, m));
        EXPECT_TRUE(check_exhausting(f, user(f, els)).exhausting);
    }
}

TEST(CheckExhausting, ToeplitzPiOnRandomProbes) {
    std::mt19937_64 rng(2);
    auto f = RepFamily::toeplitz_pi(toeplitz());
    std::vector<std::pair<std::string, ToeplitzElement>> els;
    for (int i = 0; i < 50; ++i) els.emplace_back("x" + std::to_string(i), random_toeplitz(rng, 2, 3));
    EXPECT_TRUE(check_exhausting(f, probe_gallery(f, els)).exhausting);
}

TEST(CheckFaithful, CounterexampleIsFaithful) {
    auto m = gallery::matrix_endpoint(1.0 / 64);
    auto f = counterexample(m);
    auto r = check_faithful(f, user(f, {{"f", witness_f(m)}}));
    EXPECT_TRUE(r.faithful);
    EXPECT_LE(r.density_gap, 1e-6);
    EXPECT_DOUBLE_EQ(r.resolution, 1.0 / 64);
}

TEST(CheckFaithful, GridWithoutEndpointIsDenseAtResolution) {
    for (double h : {0.25, 1.0 / 16, 1.0 / 64}) {
        auto m = gallery::scalar_interval(h);
        auto f = RepFamily::ev_grid(m, true);
        auto r = check_faithful(f, user(f, {{"a", coordinate(m)}}));
        EXPECT_TRUE(r.faithful);
        EXPECT_NEAR(r.density_gap, h, 1e-15);
    }
}

TEST(CheckFaithful, SinglePointAnnihilatesCoordinate) {
    auto m = gallery::scalar_interval(0.25);
    RepFamily f("ev0", m, {EvalPoint{0.0}});
    auto r = check_faithful(f, user(f, {{"a", coordinate(m)}}));
    EXPECT_FALSE(r.faithful);
    EXPECT_EQ(r.witness, "a");
    EXPECT_DOUBLE_EQ(r.density_gap, 1.0);
}

TEST(CheckFaithful, CharactersAreNotFaithfulOnToeplitz) {
    auto f = RepFamily::toeplitz_characters(toeplitz(16));
    auto r = check_faithful(f, probe_gallery<ToeplitzElement>(f, {}));
    EXPECT_FALSE(r.faithful);
    EXPECT_EQ(r.witness, "E00");
}

TEST(NormViaFamily, Examples) {
    auto m = gallery::matrix_endpoint(1.0 / 64);
    EXPECT_DOUBLE_EQ(norm_via_family(RepFamily::all_prims(m), witness_f(m)), 1.0);
    EXPECT_DOUBLE_EQ(norm_via_family(RepFamily("ev1-1", m, {CompressedEval{1.0, 1}}), witness_f(m)), 0.0);
    auto s = gallery::scalar_interval(1.0 / 32);
    EXPECT_NEAR(norm_via_family(RepFamily::ev_grid(s, true), coordinate(s)), 1.0 - 1.0 / 32, 1e-15);
}

TEST(Invertibility, FullFamilyDetectsWitness) {
    auto m = gallery::matrix_endpoint(1.0 / 64);
    auto r = invertible_via_exhausting(RepFamily::all_prims(m), witness_f(m));
    EXPECT_FALSE(r.invertible);
    EXPECT_EQ(r.min_sigma, 0.0);
}

TEST(Invertibility, CounterexampleFailureMode) {
    auto m = gallery::matrix_endpoint(1.0 / 64);
    auto f = counterexample(m);
    auto a = witness_f(m);
    // Naively every member image is invertible...
    EXPECT_TRUE(members_invertible(f, a, FamilyOptions{}.resolution).invertible);
    // ...yet f is not.
    EXPECT_EQ(direct_invertibility(a).verdict, Verdict::NotInvertible);
    // The certified routes do not fall for it.
    try {
        EXPECT_FALSE(invertible_via_exhausting(f, a).invertible);
    } catch (const NotCertified&) {
    }
    for (double bound : {1.0, 10.0, 1e3, 1e6}) EXPECT_FALSE(invertible_via_faithful(f, a, bound).invertible) << bound;
}

TEST(Invertibility, IdentityIsInvertible) {
    for (auto m : {gallery::matrix_endpoint(0.125), gallery::scalar_interval(0.1)}) {
        auto one = AlgebraElement::identity(m);
        EXPECT_TRUE(invertible_via_exhausting(RepFamily::all_prims(m), one).invertible);
        EXPECT_TRUE(invertible_via_faithful(RepFamily::ev_grid(m), Complex(2.0) * one, 1.0).invertible);
    }
}

TEST(Invertibility, BoundedInverse) {
    auto m = gallery::matrix_endpoint(1.0 / 16);
    auto a = AlgebraElement::from_function(m, [](double t) { return ComplexMatrix::diagonal({1.0, 1.0 + t}); });
    auto r = invertible_via_faithful(counterexample(m), a, 1.0);
    EXPECT_TRUE(r.invertible);
    EXPECT_NEAR(r.max_inverse_norm, 1.0, 1e-14);
}

TEST(Invertibility, NotCertifiedWithoutFaithfulness) {
    auto m = gallery::scalar_interval(0.25);
    RepFamily f("ev0", m, {EvalPoint{0.0}});
    EXPECT_THROW(invertible_via_faithful(f, coordinate(m).shifted(1.0), 10.0), NotCertified);
    // a(t) = 2 − t: b = 4 − (2 − t)² peaks at t = 1, where ev₀ sees 0.
    auto a = AlgebraElement::from_function(m, [](double t) { return ComplexMatrix{{2.0 - t}}; });
    EXPECT_THROW(invertible_via_exhausting(f, a), NotCertified);
}

TEST(Invertibility, ToeplitzRoutedToFredholm) {
    auto f = RepFamily::toeplitz_pi(toeplitz());
    EXPECT_THROW(invertible_via_exhausting(f, ToeplitzElement::shift()), UnsupportedModel);
    EXPECT_THROW(invertible_via_faithful(f, ToeplitzElement::shift(), 1.0), UnsupportedModel);
}

TEST(Invertibility, ExhaustingAgreesWithDirectOnRandomElements) {
    std::mt19937_64 rng(4);
    BlockStructure disc(3);
    disc.subblocks_at(2.0, {{0, 1}, {1, 3}});
    std::vector<ModelPtr> models{gallery::discrete(5, std::move(disc)), gallery::scalar_interval(1.0 / 64),
                                 gallery::circle(1.0 / 64, 2)};
    int decided = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto& m = models[std::size_t(trial) % models.size()];
        auto a = m->base.continuous() ? smooth_random(rng, m) : random_element(rng, m);
        const auto direct = direct_invertibility(a);
        if (direct.verdict == Verdict::Undetermined) continue;
        ++decided;
        EXPECT_EQ(invertible_via_exhausting(RepFamily::all_prims(m), a).invertible,
                  direct.verdict == Verdict::Invertible);
    }
    EXPECT_GE(decided, 50);
}

TEST(Invertibility, ConverseOfFaithfulness) {
    // A family that is not faithful admits c = λ − a non-invertible while
    // every member image is invertible with a uniform bound.
    auto m = gallery::scalar_interval(0.25);
    RepFamily f("ev0", m, {EvalPoint{0.0}});
    auto a = coordinate(m);
    auto c = AlgebraElement::scalar(m, 1.0) - a;
    auto members = members_invertible(f, c, FamilyOptions{}.resolution);
    EXPECT_TRUE(members.invertible);
    EXPECT_LE(members.max_inverse_norm, 1.0);
    EXPECT_EQ(direct_invertibility(c).verdict, Verdict::NotInvertible);

    // The same construction on a half-interval family: λ = 1 lies outside
    // the closure of the member spectra.
    auto half = RepFamily("left-half", m, {EvalPoint{0.0}, EvalPoint{0.25}, EvalPoint{0.5}});
    EXPECT_FALSE(check_faithful(half, user(half, {{"a", a}})).faithful);
    auto u = spectrum_union(half, a);
    EXPECT_GT(u.spectrum.distance_to(1.0), 0.25);
    EXPECT_TRUE(members_invertible(half, c, 1e-10).invertible);
}

TEST(SpectrumUnion, FullFamilyOnThreePointGrid) {
    auto m = matrix_three_points();
    auto u = spectrum_union(RepFamily::all_prims(m), witness_f(m));
    EXPECT_EQ(u.spectrum.points(), (std::vector<Complex>{0.0, 0.5, 1.0}));
    EXPECT_EQ(u.contract, SpectralContract::Equal);
    EXPECT_FALSE(u.spectrum.truncated());
}

TEST(SpectrumUnion, ZeroElement) {
    auto m = gallery::circle(0.25, 2);
    auto u = spectrum_union(RepFamily::all_prims(m), AlgebraElement::scalar(m, 0.0));
    EXPECT_EQ(u.spectrum.points(), (std::vector<Complex>{0.0}));
}

TEST(SpectrumUnion, ToeplitzCosineSections) {
    auto f = RepFamily::toeplitz_pi(toeplitz());
    auto x = ToeplitzElement::from_symbol({{-1, 1.0}, {1, 1.0}}).with_sections({32, 128});
    auto u = spectrum_union(f, x);
    EXPECT_TRUE(u.spectrum.truncated());
    EXPECT_EQ(u.contract, SpectralContract::Equal);
    ASSERT_EQ(u.spectrum.size(), 128u);
    std::vector<Complex> oracle;
    for (int k = 1; k <= 128; ++k) oracle.emplace_back(2.0 * std::cos(k * std::numbers::pi / 129));
    EXPECT_LE(hausdorff(u.spectrum, SpectrumSet(oracle, 0.0)), 1e-9);
}

TEST(SpectrumUnion, NonNormalRejected) {
    auto m = gallery::discrete(1, 2);
    auto a = AlgebraElement(m, {ComplexMatrix{{0.0, 1.0}, {0.0, 0.0}}});
    EXPECT_THROW(spectrum_union(RepFamily::all_prims(m), a), NotNormal);
    EXPECT_THROW(spectrum_union(RepFamily::toeplitz_pi(toeplitz()), ToeplitzElement::shift()), NotNormal);
}

TEST(SpectrumUnion, DiscreteModelsMatchFiberEigenvalues) {
    std::mt19937_64 rng(6);
    BlockStructure s(4);
    s.subblocks_at(1.0, {{0, 2}, {2, 4}});
    s.diagonal_at(3.0);
    auto m = gallery::discrete(6, std::move(s));
    for (int trial = 0; trial < 30; ++trial) {
        auto a = random_normal_element(rng, m);
        auto u = spectrum_union(RepFamily::all_prims(m), a, FamilyOptions{.resolution = 1e-9, .attain_tol = 1e-10});
        std::vector<Complex> direct;
        for (const auto& v : a.values())
            for (auto z : repfam::testing::charpoly_roots(v)) direct.push_back(z);
        EXPECT_LE(hausdorff(u.spectrum, SpectrumSet(direct, 1e-9)), 1e-8);
        EXPECT_EQ(u.contract, SpectralContract::Equal);
    }
}

TEST(SpectrumUnion, ClosureUnionOnDenseGrid) {
    double prev = 1.0;
    for (double h : {1.0 / 16, 1.0 / 64, 1.0 / 256}) {
        auto m = gallery::scalar_interval(h);
        auto u = spectrum_union(RepFamily::ev_grid(m, true), coordinate(m));
        EXPECT_EQ(u.contract, SpectralContract::Closure);
        std::vector<double> exact;
        for (int k = 0; k <= int(std::lround(4 / h)); ++k) exact.push_back(k * h / 4);
        const double d = hausdorff(u.spectrum, SpectrumSet::from_real(exact, 0.0));
        EXPECT_LE(d, h);
        EXPECT_LT(d, prev);
        prev = d;
    }
}

TEST(Fredholm, Examples) {
    auto q = RepFamily::toeplitz_characters(toeplitz());
    auto s = fredholm_via_family(q, ToeplitzElement::shift());
    EXPECT_TRUE(s.fredholm);
    EXPECT_TRUE(s.decided);
    EXPECT_NEAR(s.inverse_bound, 1.0, 1e-14);

    auto z = fredholm_via_family(q, ToeplitzElement::from_symbol({{0, -1.0}, {1, 1.0}}));
    EXPECT_FALSE(z.fredholm);
    EXPECT_TRUE(z.decided);

    ComplexMatrix k{{0.3, 1.0}, {2.0, -0.5}};
    EXPECT_TRUE(fredholm_via_family(q, ToeplitzElement::scalar(1.0) + ToeplitzElement::compact(k)).fredholm);
}

TEST(Fredholm, UnsupportedInputs) {
    auto m = gallery::scalar_interval(0.25);
    EXPECT_THROW(fredholm_via_family(RepFamily::ev_grid(m), coordinate(m)), UnsupportedModel);
    EXPECT_THROW(fredholm_via_family(RepFamily::toeplitz_pi(toeplitz()), ToeplitzElement::shift()), UnsupportedModel);
}

TEST(FamilyReport, ImplicationChainOnGeneratedFamilies) {
    std::vector<RepFamily> families;
    auto mat = gallery::matrix_endpoint(1.0 / 16, 4);
    auto circ = gallery::circle(1.0 / 16, 2);
    auto tm = toeplitz(16);
    families.push_back(RepFamily::all_prims(mat));
    families.push_back(RepFamily::ev_grid(mat));
    families.push_back(RepFamily::ev_grid(mat, true));
    families.push_back(counterexample(mat));
    families.push_back(RepFamily::ev_grid(mat, true, {1}));
    families.push_back(RepFamily::ev_grid(mat, true, {0, 1}));
    families.push_back(RepFamily("ev1", mat, {EvalPoint{1.0}}));
    families.push_back(RepFamily("ev0", mat, {EvalPoint{0.0}}));
    families.push_back(RepFamily::all_prims(circ));
    for (std::size_t stride : {2u, 3u, 5u}) {
        std::vector<Representation> m;
        for (std::size_t i = 0; i < circ->base.size(); i += stride) m.emplace_back(EvalPoint{circ->base.grid()[i]});
        families.emplace_back("circle-stride-" + std::to_string(stride), circ, m);
    }
    {
        std::vector<Representation> m;
        for (double t : circ->base.grid())
            if (t != 0.5) m.emplace_back(EvalPoint{t});
        families.emplace_back("circle-minus-half", circ, m);
    }
    families.push_back(RepFamily::toeplitz_pi(tm));
    families.push_back(RepFamily::toeplitz_characters(tm));
    families.push_back(RepFamily::all_prims(tm));
    families.emplace_back("chi0", tm, std::vector<Representation>{ToeplitzCharacter{0.0}});
    {
        std::vector<Representation> m;
        for (std::size_t j = 0; j < 16; j += 2) m.emplace_back(ToeplitzCharacter{tm->theta(j)});
        families.emplace_back("chi-even", tm, m);
    }
    families.emplace_back("pi-chi0", tm, std::vector<Representation>{ToeplitzIdentity{}, ToeplitzCharacter{0.0}});
    families.push_back(RepFamily::all_prims(gallery::scalar_interval(0.125)));
    families.push_back(RepFamily::ev_grid(gallery::scalar_interval(0.125), true));
    ASSERT_GE(families.size(), 20u);

    int full = 0, exhausting = 0, faithful = 0;
    for (const auto& f : families) {
        const auto r = family_report(f);
        EXPECT_TRUE(!r.full.full || r.exhausting.exhausting) << f.label();
        EXPECT_TRUE(!r.exhausting.exhausting || r.faithful.faithful) << f.label();
        full += int(r.full.full);
        exhausting += int(r.exhausting.exhausting);
        faithful += int(r.faithful.faithful);
    }
    // The fixture set exercises every level of the hierarchy.
    EXPECT_GT(full, 0);
    EXPECT_GT(faithful, exhausting);
    EXPECT_LT(faithful, int(families.size()));
}

TEST(FamilyReport, CounterexampleClassification) {
    auto m = gallery::matrix_endpoint(1.0 / 64);
    auto r = family_report<AlgebraElement>(counterexample(m), {{"f", witness_f(m)}});
    EXPECT_TRUE(r.faithful.faithful);
    EXPECT_FALSE(r.exhausting.exhausting);
    EXPECT_FALSE(r.full.full);
    EXPECT_EQ(r.full.witness, "ev(1)[1]");
    EXPECT_EQ(r.probes_used, 1 + enum_prim(*m).size() + 2);
}

TEST(Parallel, ResultsIndependentOfThreadCount) {
    auto m = gallery::circle(1.0 / 128, 3);
    std::mt19937_64 rng(8);
    auto a = random_element(rng, m);
    auto f = RepFamily::all_prims(m);
    ::setenv("REPFAM_THREADS", "1", 1);
    const auto serial = member_norms(f, a);
    const auto r1 = family_report<AlgebraElement>(f, {{"a", a}});
    ::setenv("REPFAM_THREADS", "4", 1);
    const auto threaded = member_norms(f, a);
    const auto r4 = family_report<AlgebraElement>(f, {{"a", a}});
    ::unsetenv("REPFAM_THREADS");
    EXPECT_EQ(serial, threaded);
    ASSERT_EQ(r1.exhausting.attainment.size(), r4.exhausting.attainment.size());
    for (std::size_t i = 0; i < r1.exhausting.attainment.size(); ++i) {
        EXPECT_EQ(r1.exhausting.attainment[i].family_max, r4.exhausting.attainment[i].family_max);
        EXPECT_EQ(r1.exhausting.attainment[i].argmax, r4.exhausting.attainment[i].argmax);
    }
}

TEST(Parallel, LowestIndexExceptionWins) {
    ::setenv("REPFAM_THREADS", "3", 1);
    try {
        parallel_map(20, [](std::size_t i) -> int {
            if (i % 7 == 3) throw InvalidArgument("task " + std::to_string(i));
            return int(i);
        });
        FAIL();
    } catch (const InvalidArgument& e) {
        EXPECT_STREQ(e.what(), "task 3");
    }
    ::unsetenv("REPFAM_THREADS");
}
