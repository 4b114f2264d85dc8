#include "loewner/optimize.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_util.hpp"

using namespace loewner;
using loewner::testutil::koebe_control;
using loewner::testutil::rotating_control;

namespace {

constexpr double kPi = std::numbers::pi;

OptimizeProblem small_problem(int N, int K, double T, int restarts) {
    OptimizeProblem p;
    p.target_index = N;
    p.pieces = K;
    p.horizon = T;
    p.restarts = restarts;
    p.seed = 41;
    return p;
}

}  // namespace

TEST(Optimize, SinglePieceMatchesClosedForm) {
    // one piece, one angle: a_2 = -2 conj(kappa) (1 - e^{-T}), maximized by
    // kappa = -1
    OptimizeResult res = optimize(small_problem(2, 1, 5.0, 4));
    double expected = 2.0 * (1.0 - std::exp(-5.0));
    EXPECT_NEAR(res.best_value, expected, 1e-6);
    const auto& piece = std::get<ControlValue1>(res.best_control.pieces[0]);
    ASSERT_EQ(piece.atoms.size(), 1u);
    EXPECT_NEAR(piece.atoms[0].kappa_arg, kPi, 1e-3);
    ASSERT_TRUE(res.pmp_gap_at_best.has_value());
    ASSERT_TRUE(res.schiffer_at_best.has_value());
    EXPECT_LT(*res.pmp_gap_at_best, 1e-4);
}

TEST(Optimize, SinglePieceValueMonotoneInHorizon) {
    double v_prev = 0.0;
    for (double T : {2.0, 5.0, 8.0}) {
        OptimizeResult res = optimize(small_problem(2, 1, T, 3));
        EXPECT_GT(res.best_value, v_prev);
        v_prev = res.best_value;
    }
    EXPECT_LT(v_prev, 2.0);
}

TEST(Optimize, HistoryNondecreasingAndConsistent) {
    OptimizeProblem p = small_problem(2, 4, 8.0, 4);
    OptimizeResult res = optimize(p);
    ASSERT_EQ(res.history.size(), 4u);
    double best_trace = -1e300;
    for (const auto& trace : res.history) {
        ASSERT_FALSE(trace.history.empty());
        for (std::size_t i = 1; i < trace.history.size(); ++i)
            EXPECT_GE(trace.history[i], trace.history[i - 1] - 1e-12);
        EXPECT_NEAR(trace.value, trace.history.back(), 1e-12);
        best_trace = std::max(best_trace, trace.value);
    }
    // unconstrained: the recomputed value reproduces the winning trace
    EXPECT_NEAR(res.best_value, best_trace, 1e-9);
    EXPECT_GE(res.best_value, 2.0 * (1.0 - std::exp(-8.0)) - 1e-3);
}

TEST(Optimize, ReportedValueSurvivesRecomputation) {
    OptimizeProblem p = small_problem(2, 3, 6.0, 3);
    OptimizeResult res = optimize(p);
    Jet1 fresh = limit_map(res.best_control, 8, p.step).jet;
    EXPECT_NEAR(fresh.coeff(2).real(), res.best_value, 1e-9);
    EXPECT_EQ(res.constraint_violation, 0.0);
}

TEST(Optimize, PinnedCoefficientIsRespected) {
    OptimizeProblem p = small_problem(3, 6, 8.0, 3);
    p.conditions = {{2, cx{1.0, 0.0}}};
    OptimizeResult res = optimize(p);
    EXPECT_LE(res.constraint_violation, 5e-4);
    Jet1 fresh = limit_map(res.best_control, 8, p.step).jet;
    EXPECT_NEAR(std::abs(fresh.coeff(2) - cx{1.0, 0.0}),
                res.constraint_violation, 1e-10);
    EXPECT_LT(res.best_value, 3.0);
    for (const auto& trace : res.history)
        for (std::size_t i = 1; i < trace.history.size(); ++i)
            EXPECT_GE(trace.history[i], trace.history[i - 1] - 1e-12);
}

TEST(Optimize, DeterministicAcrossRuns) {
    OptimizeProblem p = small_problem(2, 3, 5.0, 3);
    OptimizeResult a = optimize(p);
    OptimizeResult b = optimize(p);
    EXPECT_EQ(a.best_value, b.best_value);
    ASSERT_EQ(a.best_control.pieces.size(), b.best_control.pieces.size());
    for (std::size_t j = 0; j < a.best_control.pieces.size(); ++j) {
        const auto& pa = std::get<ControlValue1>(a.best_control.pieces[j]);
        const auto& pb = std::get<ControlValue1>(b.best_control.pieces[j]);
        EXPECT_EQ(pa.atoms[0].kappa_arg, pb.atoms[0].kappa_arg);
    }
}

TEST(Optimize, GlobalAngleShiftPreservesTargetModulus) {
    DrivingControl c = random_control(1, 4.0, 3, 2024);
    DrivingControl shifted = c;
    double delta = 0.83;
    for (auto& piece : shifted.pieces)
        for (auto& atom : std::get<ControlValue1>(piece).atoms)
            atom.kappa_arg += delta;
    Jet1 f = limit_map(c, 3).jet;
    Jet1 g = limit_map(shifted, 3).jet;
    EXPECT_NEAR(std::abs(f.coeff(2)), std::abs(g.coeff(2)), 1e-8);
    EXPECT_NEAR(std::abs(f.coeff(3)), std::abs(g.coeff(3)), 1e-8);
}

TEST(Optimize, RejectsMalformedProblems) {
    OptimizeProblem p = small_problem(2, 4, 5.0, 2);
    p.dimension = 3;
    EXPECT_THROW(optimize(p), ValidationError);

    p = small_problem(1, 4, 5.0, 2);
    EXPECT_THROW(optimize(p), ValidationError);

    p = small_problem(3, 0, 5.0, 2);
    EXPECT_THROW(optimize(p), ValidationError);

    p = small_problem(3, 4, 5.0, 2);
    p.conditions = {{3, cx{1.0}}};  // not strictly below the target
    EXPECT_THROW(optimize(p), ValidationError);

    p = small_problem(2, 4, 5.0, 2);
    p.dimension = 2;
    p.conditions = {{2, cx{1.0}}};
    EXPECT_THROW(optimize(p), ValidationError);
}

TEST(Reachable, SecondCoefficientStaysInTheDisk) {
    ReachableSample s = sample_reachable({2}, 300, 6.0, 4, 777);
    ASSERT_EQ(s.points.size(), 300u);
    for (const auto& pt : s.points) {
        ASSERT_EQ(pt.values.size(), 1u);
        EXPECT_LE(std::abs(pt.values[0]), 2.0 + 1e-6) << "sample " << pt.id;
    }
}

TEST(Reachable, PointsRegenerateFromTheirSeeds) {
    ReachableSample s = sample_reachable({2, 3}, 64, 6.0, 4, 12345);
    for (int id : {0, 17, 63}) {
        DrivingControl c = random_control(
            1, 6.0, 4, split_seed(12345, static_cast<std::uint64_t>(id)));
        Jet1 f = limit_map(c, 3).jet;
        const auto& pt = s.points[static_cast<std::size_t>(id)];
        EXPECT_LT(std::abs(f.coeff(2) - pt.values[0]), 1e-10);
        EXPECT_LT(std::abs(f.coeff(3) - pt.values[1]), 1e-10);
    }

    ReachableSample again = sample_reachable({2, 3}, 64, 6.0, 4, 12345);
    for (std::size_t i = 0; i < s.points.size(); ++i)
        EXPECT_EQ(s.points[i].values[0], again.points[i].values[0]);
}

TEST(Reachable, TwoVariableSamplesKeepNormalization) {
    ReachableSample s = sample_reachable2({{{2, 0}}}, 20, 4.0, 2, 9);
    ASSERT_EQ(s.points.size(), 20u);
    for (const auto& pt : s.points)
        EXPECT_TRUE(std::isfinite(std::abs(pt.values[0])));
    for (int id : {0, 7, 19}) {
        DrivingControl c = random_control(
            2, 4.0, 2, split_seed(9, static_cast<std::uint64_t>(id)));
        LimitMap2 f = limit_map2(c, 2);
        EXPECT_LT(std::abs(f.jet.x1.coeff(0, 0)), 1e-8);
        EXPECT_LT(std::abs(f.jet.x1.coeff(1, 0) - cx{1.0}), 1e-8);
        EXPECT_LT(std::abs(f.jet.x1.coeff(0, 1)), 1e-8);
        EXPECT_LT(std::abs(f.jet.x2.coeff(0, 1) - cx{1.0}), 1e-8);
        const auto& pt = s.points[static_cast<std::size_t>(id)];
        EXPECT_LT(std::abs(f.jet.x1.coeff(2, 0) - pt.values[0]), 1e-10);
    }
}

TEST(Reachable, RejectsMalformedRequests) {
    EXPECT_THROW(sample_reachable({}, 10, 5.0, 2, 1), ValidationError);
    EXPECT_THROW(sample_reachable({1}, 10, 5.0, 2, 1), ValidationError);
    EXPECT_THROW(sample_reachable({2}, 0, 5.0, 2, 1), ValidationError);
    EXPECT_THROW(random_control(1, 0.0, 2, 1), ValidationError);
    EXPECT_THROW(random_control(3, 5.0, 2, 1), ValidationError);
}

TEST(Projection, OversizedFieldRescalesOrThrows) {
    ControlValueN v;
    v.terms.push_back({2, 0, {cx{3.0, 0.0}, cx{0.0}}});
    ControlValueN ok = project_to_admissible(v);
    EXPECT_LE(quadratic_mass(ok), 0.9);

    ControlValueN huge;
    huge.terms.push_back({2, 0, {cx{1e40, 0.0}, cx{0.0}}});
    EXPECT_THROW(project_to_admissible(huge), ValidationError);
}

TEST(Teichmueller, GateRejectsNonExtremalBase) {
    DrivingControl rot = rotating_control(1.0, 8.0, 32);
    EXPECT_THROW(teichmueller_experiment(3, rot, 3, 1), ValidationError);
}

TEST(Teichmueller, ZeroPerturbationsGiveEmptyReport) {
    TeichmuellerReport rep = teichmueller_experiment(3, koebe_control(20.0), 0, 1);
    EXPECT_EQ(rep.requested, 0);
    EXPECT_EQ(rep.feasible, 0);
    EXPECT_TRUE(rep.samples.empty());
    EXPECT_FALSE(rep.inconclusive);
    EXPECT_NEAR(rep.reference_value.real(), 3.0, 1e-6);
    ASSERT_EQ(rep.reference_lower.size(), 1u);
    EXPECT_NEAR(rep.reference_lower[0].real(), 2.0, 1e-6);
}

TEST(Teichmueller, RestoredPerturbationsStayBelowTheBound) {
    TeichmuellerReport rep =
        teichmueller_experiment(3, koebe_control(20.0), 10, 5);
    EXPECT_EQ(rep.requested, 10);
    ASSERT_EQ(rep.samples.size(), 10u);
    EXPECT_GE(rep.feasible, 6);
    EXPECT_EQ(rep.violations, 0);
    EXPECT_LE(rep.max_excess, 1e-6);
    EXPECT_FALSE(rep.inconclusive);
    for (const auto& s : rep.samples) {
        EXPECT_TRUE(std::isfinite(s.value));
        if (s.feasible) {
            EXPECT_LE(s.feasibility, 1e-4);
        }
    }
}
