#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flowlab/compress.hpp"
#include "flowlab/errors.hpp"
#include "flowlab/functionals.hpp"
#include "flowlab/random.hpp"
#include "flowlab/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

using namespace flowlab;

TEST_CASE("every catalog entry builds with its defaults")
{
    std::set<std::string> names;
    for (const auto& entry : catalog())
    {
        const auto spec = build(entry.name);
        names.insert(spec.name);
        CHECK(spec.name == entry.name);
        CHECK((spec.field.has_value() || spec.explicitMap.has_value()));
        CHECK(spec.flags.mapOnly == !spec.field.has_value());
        if (spec.field) CHECK(spec.flags.hasJump == spec.field->hasJump());
    }
    CHECK(names.size() == 11);
    CHECK(names.contains("bianchini_swap"));
}

TEST_CASE("heaviside facts")
{
    const auto spec = build("heaviside1d");
    CHECK(spec.facts.C == 2.0);
    CHECK(spec.flags.hasJump);
    CHECK(spec.flags.nearlyIncompressible);
    REQUIRE(spec.facts.exactFlow);
    const auto& X = *spec.facts.exactFlow;
    CHECK(X(1.0, makePoint({-0.5}))[0] == doctest::Approx(0.25));
    CHECK(X(1.0, makePoint({0.5}))[0] == doctest::Approx(1.0));
    CHECK(X(0.2, makePoint({-0.5}))[0] == doctest::Approx(-0.3));
    CHECK((*spec.field)(makePoint({-0.1}))[0] == 1.0);
    CHECK((*spec.field)(makePoint({0.1}))[0] == 0.5);
}

TEST_CASE("declared flows match integration")
{
    for (const auto& entry : catalog())
    {
        const auto spec = build(entry.name);
        // sqrt1d has several solutions from x < 0; the branches are tested separately.
        if (!spec.field || !spec.facts.exactFlow || entry.name == "sqrt1d") continue;
        const int d = spec.field->dim();
        const double T = std::min(1.0, spec.facts.horizon);
        Rng rng(3);
        for (int i = 0; i < 20; ++i)
        {
            Point x(d);
            for (int a = 0; a < d; ++a) x[a] = rng.uniform(spec.domain.lower()[a], spec.domain.upper()[a]);
            // The radial formula holds inside the unit ball, away from the singular origin.
            if (entry.name == "radial_alpha" && (x.norm() < 0.1 || (*spec.facts.exactFlow)(T, x).norm() > 1.0)) continue;
            const Point numeric = integrate(*spec.field, x, T, 1.0 / 128.0).terminal();
            CHECK_MESSAGE((numeric - (*spec.facts.exactFlow)(T, x)).norm() < 1e-8, entry.name);
        }
    }
}

TEST_CASE("declared Q values match the grid")
{
    for (const char* name : {"constant", "dilation1d", "rotation2d"})
    {
        const auto spec = build(name);
        REQUIRE(spec.facts.exactQ);
        const int d = spec.field->dim();
        const double h = d == 1 ? 1.0 / 128.0 : 1.0 / 32.0;
        Point delta = Point::Zero(d);
        delta[d - 1] = h;
        const FlowGrid grid = flowGrid(*spec.field, spec.domain, h, 1.0, 1.0 / 64.0, delta);
        for (double t : {0.0, 0.5, 1.0})
            CHECK_MESSAGE(qDelta(grid, t) == doctest::Approx((*spec.facts.exactQ)(t, h)).epsilon(1e-6), name);
    }
}

TEST_CASE("nearly incompressible scenarios honour their constant")
{
    for (const auto& entry : catalog())
    {
        const auto spec = build(entry.name);
        if (!spec.field || !spec.flags.nearlyIncompressible) continue;
        REQUIRE(spec.facts.C);
        const int d = spec.field->dim();
        const double h = d == 1 ? 1.0 / 256.0 : 1.0 / 32.0;
        const double T = std::min(1.0, spec.facts.horizon);
        const FlowGrid grid = flowGrid(*spec.field, spec.domain, h, T, 1.0 / 64.0, std::nullopt, {.halo = 1});
        const auto report = incompressibilityCheck(jacobianFd(grid, T), *spec.facts.C);
        CHECK_MESSAGE(report.pass, entry.name);
        CHECK(report.evaluated > 0);
    }
}

TEST_CASE("parameter validation")
{
    CHECK_THROWS_AS(build("no_such_field"), CatalogError);
    CHECK_THROWS_AS(build("constant", {{"speed", 1.0}}), CatalogError);
    CHECK_THROWS_AS(build("bianchini_swap", {{"n", 2.5}}), CatalogError);
    CHECK_THROWS_AS(build("bianchini_swap", {{"n", 1}}), CatalogError);
    try
    {
        build("crossing_jump2d", {{"b_minus", {0.5, 0.0}}});
        FAIL("drift violation accepted");
    }
    catch (const CatalogError& e)
    {
        CHECK(std::string(e.what()).find("b_1 in [1, 2]") != std::string::npos);
    }
    try
    {
        build("crossing_jump2d", {{"b_plus", {2.0, 1.0}}});
        FAIL("norm violation accepted");
    }
    catch (const CatalogError& e)
    {
        CHECK(std::string(e.what()).find("|b| <= 2") != std::string::npos);
    }
    CHECK_THROWS_AS(build("tangent_jump2d", {{"b_plus", {2.0, 0.1}}}), CatalogError);
    CHECK(build("crossing_jump2d", {{"b_minus", {1.0, 0.5}}, {"b_plus", {1.5, -0.5}}}).facts.C == 1.5);
}

TEST_CASE("bianchini swap is a measure-preserving involution")
{
    const auto spec = build("bianchini_swap", {{"n", 16}});
    CHECK(spec.facts.delta == doctest::Approx(1.0 / 32.0));
    CHECK(spec.facts.boundForm == "log-lower");
    REQUIRE(spec.explicitMap);
    const auto& X = *spec.explicitMap;

    const int nodes = 64 * 16 * 2;
    const double h = 2.0 / nodes;
    std::vector<double> images;
    for (int i = 0; i < nodes; ++i)
    {
        const double x = -1.0 + (i + 0.5) * h;
        const double y = X(0.0, makePoint({x}))[0];
        CHECK(X(0.0, makePoint({y}))[0] == doctest::Approx(x).epsilon(1e-14));
        CHECK(std::abs(y) <= 1.0);
        images.push_back(y);
    }
    // A lattice of midpoints is mapped onto a lattice of midpoints.
    std::sort(images.begin(), images.end());
    for (int i = 0; i < nodes; ++i) CHECK(images[i] == doctest::Approx(-1.0 + (i + 0.5) * h).epsilon(1e-12));
    CHECK(images.back() - images.front() + h == doctest::Approx(2.0));
}

TEST_CASE("sqrt branches")
{
    const double inf = std::numeric_limits<double>::infinity();
    // Every branch solves x' = sqrt|x| before reaching 0.
    CHECK(sqrtBranch(1.0, -1.0, inf) == doctest::Approx(-0.25));
    CHECK(sqrtBranch(4.0, -1.0, inf) == 0.0);
    CHECK(sqrtBranch(4.0, -1.0, 2.0) == doctest::Approx(1.0));
    CHECK(sqrtBranch(4.0, -1.0, 3.0) == doctest::Approx(0.25));
    CHECK(sqrtFlow(2.0, 1.0) == doctest::Approx(4.0));
    CHECK(sqrtFlow(4.0, -1.0) == doctest::Approx(1.0));

    // Derivative of the leaving branch after t0 equals sqrt of the position.
    const double t = 3.0;
    const double e = 1e-6;
    const double slope = (sqrtBranch(t + e, -1.0, 2.0) - sqrtBranch(t - e, -1.0, 2.0)) / (2 * e);
    CHECK(slope == doctest::Approx(std::sqrt(sqrtBranch(t, -1.0, 2.0))).epsilon(1e-6));
}

TEST_CASE("listing")
{
    const std::string text = listScenarios();
    CHECK(text.find("heaviside1d") != std::string::npos);
    CHECK(text.find("bianchini_swap n:int") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(catalog().size()));
}
