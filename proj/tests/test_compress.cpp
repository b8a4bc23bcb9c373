#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flowlab/compress.hpp"
#include "flowlab/errors.hpp"
#include "flowlab/scenarios.hpp"

#include <cmath>
#include <limits>

using namespace flowlab;

namespace
{
    VectorField twoSpeeds(double a, double c)
    {
        const JumpSet H = JumpSet::hyperplane(makePoint({1.0}), 0.0);
        SmoothMap left{[a](const Point&) { return makePoint({a}); }, {}};
        SmoothMap right{[c](const Point&) { return makePoint({c}); }, {}};
        return VectorField::piecewise("two-speeds", Domain::cube(1, -1.0, 1.0), H, left, right, std::max(a, c));
    }

    std::vector<double> okValues(const JacobianEstimate& jac)
    {
        std::vector<double> out;
        for (const auto& e : jac.entries)
            if (e.status == NodeStatus::Ok) out.push_back(e.J);
        return out;
    }
} // namespace

TEST_CASE("finite-difference Jacobian")
{
    const auto rotation = build("rotation2d");
    const FlowGrid grid = flowGrid(*rotation.field, Domain::cube(2, -0.5, 0.5), 1.0 / 32.0, 1.0, 1.0 / 64.0,
                                   std::nullopt, {.halo = 1});
    for (double J : okValues(jacobianFd(grid, 0.0))) CHECK(J == doctest::Approx(1.0).epsilon(1e-14));
    const auto values = okValues(jacobianFd(grid, 1.0));
    CHECK(values.size() == 1024);
    for (double J : values) CHECK(std::abs(J - 1.0) < 1e-6);
    CHECK(incompressibilityCheck(jacobianFd(grid, 1.0), 1.01).pass);

    const auto heaviside = build("heaviside1d");
    const FlowGrid hg = flowGrid(*heaviside.field, heaviside.domain, 1e-3, 1.0, 1.0 / 64.0, std::nullopt, {.halo = 1});
    const JacobianEstimate hj = jacobianFd(hg, 1.0);
    std::size_t mixed = 0;
    for (const auto& e : hj.entries)
    {
        const double x0 = hg.node(e.node)[0];
        if (e.status == NodeStatus::MixedStencil)
        {
            ++mixed;
            continue;
        }
        if (std::abs(x0 + 0.5) < 0.01) CHECK(e.J == doctest::Approx(0.5).epsilon(0.02));
        CHECK((std::abs(e.J - 1.0) < 0.02 || std::abs(e.J - 0.5) < 0.01));
    }
    CHECK(mixed <= 4);
    CHECK(incompressibilityCheck(hj, 2.0).pass);
    const IncompressibilityReport strict = incompressibilityCheck(hj, 1.5);
    CHECK_FALSE(strict.pass);
    CHECK(strict.worstRatio == doctest::Approx(0.5).epsilon(0.02));
    CHECK_THROWS_AS(incompressibilityCheck(hj, 0.5), InputError);
}

TEST_CASE("boundary nodes are flagged")
{
    const auto constant = build("constant");
    const FlowGrid grid = flowGrid(*constant.field, Domain::cube(2, -1.0, 1.0), 0.25, 1.0, 0.25);
    const JacobianEstimate jac = jacobianFd(grid, 1.0);
    std::size_t boundary = 0;
    for (const auto& e : jac.entries) boundary += e.status == NodeStatus::Boundary;
    CHECK(boundary == 28);
    CHECK(incompressibilityCheck(jac, 1.0).evaluated == 36);
}

TEST_CASE("Jacobian along the trajectory")
{
    const auto rotation = build("rotation2d");
    const JacobianEstimate rj = jacobianAlong(*rotation.field, integrate(*rotation.field, makePoint({0.3, 0.2}), 1.0, 0.05));
    for (const auto& e : rj.entries) CHECK(e.J == doctest::Approx(1.0).epsilon(1e-12));

    const auto heaviside = build("heaviside1d");
    const JacobianEstimate hj = jacobianAlong(*heaviside.field, integrate(*heaviside.field, makePoint({-0.5}), 1.0, 0.05));
    REQUIRE(hj.jumpFactors.size() == 1);
    CHECK(hj.jumpFactors[0] == doctest::Approx(0.5));
    CHECK(hj.entries.back().J == doctest::Approx(0.5));
    CHECK(hj.entries.front().J == 1.0);

    // b = x: J = e^t.
    const auto dilation = build("dilation1d");
    const JacobianEstimate dj = jacobianAlong(*dilation.field, integrate(*dilation.field, makePoint({0.1}), 1.0, 1.0 / 64.0));
    CHECK(dj.entries.back().J == doctest::Approx(std::exp(1.0)).epsilon(1e-4));
}

TEST_CASE("both Jacobians agree on the crossing field")
{
    const auto spec = build("crossing_jump2d", {{"b_minus", {1.0, 0.5}}, {"b_plus", {1.5, -0.5}}});
    const double h = 1.0 / 64.0;
    const FlowGrid grid = flowGrid(*spec.field, spec.domain, h, 1.0, 1.0 / 64.0, std::nullopt, {.halo = 1});
    const JacobianEstimate fd = jacobianFd(grid, 1.0);
    std::size_t crossed = 0;
    std::size_t agree = 0;
    for (const auto& e : fd.entries)
    {
        const Trajectory& traj = grid.trajectory(e.node);
        if (e.status != NodeStatus::Ok || traj.eventsUpTo(1.0) == 0) continue;
        ++crossed;
        const double along = jacobianAlong(*spec.field, traj, e.node).entries.back().J;
        CHECK(along == doctest::Approx(1.5));
        agree += std::abs(e.J / along - 1.0) <= 0.02;
    }
    REQUIRE(crossed > 100);
    CHECK(static_cast<double>(agree) >= 0.95 * crossed);
}

TEST_CASE("unequal speeds give the flux ratio")
{
    for (const auto& [a, c] : {std::pair{1.0, 2.0}, std::pair{2.0, 1.0}, std::pair{1.0, 1.25}})
    {
        const VectorField f = twoSpeeds(a, c);
        const FlowGrid grid = flowGrid(f, Domain::cube(1, -1.0, -0.5), 1e-3, 1.0, 1.0 / 128.0, std::nullopt, {.halo = 1});
        for (const auto& e : jacobianFd(grid, 1.0).entries)
        {
            if (e.status != NodeStatus::Ok || grid.trajectory(e.node).eventsUpTo(1.0) == 0) continue;
            CHECK(e.J == doctest::Approx(c / a).epsilon(0.01));
        }
    }
}

TEST_CASE("degenerate crossing")
{
    // Field pushing back onto H from the right: the trajectory from the left stalls.
    const VectorField f = twoSpeeds(1.0, -1.0);
    const JacobianEstimate j = jacobianAlong(f, integrate(f, makePoint({-0.5}), 1.0, 0.05));
    CHECK(j.entries.back().J == 0.0);
}

TEST_CASE("frozen sqrt branch is not nearly incompressible")
{
    // Frozen branch t0 = ∞: every x < 0 with 2√|x| ≤ t is mapped to 0.
    const double h = 1.0 / 128.0;
    JacobianEstimate jac;
    for (int i = 1; i < 128; ++i)
    {
        const double x = -1.0 + i * h;
        const auto X = [](double y) { return sqrtBranch(2.0, y, std::numeric_limits<double>::infinity()); };
        jac.entries.push_back({.node = static_cast<std::size_t>(i), .t = 2.0, .J = (X(x + h) - X(x - h)) / (2.0 * h)});
    }
    for (double C : {2.0, 100.0, 1e6}) CHECK_FALSE(incompressibilityCheck(jac, C).pass);
}

TEST_CASE("interval image measure")
{
    const FlowMap1d identity = [](double, double x) { return x; };
    CHECK(intervalImageMeasure(identity, {0.2, 0.7}, 1.0) == doctest::Approx(0.5).epsilon(1e-15));

    const FlowMap1d leaving = [](double t, double x) { return sqrtBranch(t, x, 2.0 * std::sqrt(std::abs(x))); };
    CHECK(intervalImageMeasure(leaving, {-1.0, -0.25}, 2.0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(leaving(2.0, -1.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(leaving(2.0, -0.25) == doctest::Approx(0.25).epsilon(1e-15));

    const FlowMap1d frozen = [](double t, double x) { return sqrtBranch(t, x, std::numeric_limits<double>::infinity()); };
    CHECK(intervalImageMeasure(frozen, {-1.0, 0.0}, 2.0) == 0.0);

    const auto dilation = build("dilation1d");
    const double whole = intervalImageMeasure(*dilation.field, {-0.5, 0.5}, 1.0, 1.0 / 64.0, 33);
    const double left = intervalImageMeasure(*dilation.field, {-0.5, 0.1}, 1.0, 1.0 / 64.0, 33);
    const double right = intervalImageMeasure(*dilation.field, {0.1, 0.5}, 1.0, 1.0 / 64.0, 33);
    CHECK(std::abs(whole - left - right) < 1e-9);
    CHECK(whole == doctest::Approx(std::exp(1.0)).epsilon(1e-6));

    CHECK_THROWS_AS(intervalImageMeasure(identity, {0.5, 0.5}, 1.0), InputError);
}

TEST_CASE("weak compressibility selects the leaving branch")
{
    const FlowMap1d frozen = [](double t, double x) { return sqrtBranch(t, x, std::numeric_limits<double>::infinity()); };
    const WeakCompressibilityReport r = weakCompressibility(frozen, {-1.0, 0.0}, 2.0, 4.0, 1.0 / 16.0);
    CHECK_FALSE(r.pass);
    CHECK(r.infimumRatio == 0.0);

    const FlowMap1d leaving = [](double t, double x) { return sqrtBranch(t, x, 2.0 * std::sqrt(std::abs(x))); };
    CHECK(weakCompressibility(leaving, {-1.0, 0.0}, 2.0, 4.0, 1.0 / 16.0).infimumRatio > 0.0);
}

TEST_CASE("trace sign")
{
    const auto heaviside = build("heaviside1d");
    const TraceSignReport h = traceSignCheck(*heaviside.field, *heaviside.field->jumpSet(), 3);
    CHECK(h.allSameSign);
    CHECK(h.minRatio == doctest::Approx(0.5));
    CHECK(h.samples[0].signMinus == 1);
    CHECK(h.samples[0].signPlus == 1);

    const auto tangent = build("tangent_jump2d");
    const TraceSignReport t = traceSignCheck(*tangent.field, *tangent.field->jumpSet(), 20);
    for (const auto& s : t.samples)
    {
        CHECK(s.signMinus == 0);
        CHECK(s.signPlus == 0);
    }
    CHECK(std::isnan(t.minRatio));

    const VectorField opposite = twoSpeeds(1.0, -1.0);
    const TraceSignReport o = traceSignCheck(opposite, *opposite.jumpSet(), 5);
    CHECK_FALSE(o.allSameSign);
    const FlowGrid grid = flowGrid(opposite, opposite.support(), 1.0 / 64.0, 1.0, 1.0 / 64.0, std::nullopt, {.halo = 1});
    CHECK_FALSE(incompressibilityCheck(jacobianFd(grid, 1.0), 2.0).pass);

    CHECK_THROWS_AS(traceSignCheck(*build("rotation2d").field, *heaviside.field->jumpSet(), 3), InputError);
}
