#include "choicenet/quadrature.hpp"
#include "choicenet/spike.hpp"

#include <doctest.h>

#include <cmath>

using namespace choicenet;

namespace {

BatchFunction constant(double c)
{
    return as_batch([c](const Point&) { return c; });
}

QuadratureSettings mc(std::uint64_t samples, std::uint64_t seed = 0)
{
    return {QuadratureMethod::monte_carlo, samples, seed, 0.05};
}

QuadratureSettings grid(std::uint64_t per_axis)
{
    return {QuadratureMethod::grid, per_axis, 0, 0.05};
}

}  // namespace

TEST_CASE("identical functions")
{
    const auto f = as_batch([](const Point& x) { return x[0] * x[0]; });
    for (const auto& s : {mc(1000), grid(100)}) {
        const auto est = l1_distance(f, f, 2, s);
        CHECK(est.value == 0.0);
        CHECK(est.standard_error == 0.0);
        CHECK(est.upper_confidence == 0.0);
    }
}

TEST_CASE("constant difference")
{
    for (const auto& s : {mc(5000), grid(100)}) {
        const auto est = l1_distance(constant(1.0), constant(0.0), 2, s);
        CHECK(est.value == 1.0);
        CHECK(est.standard_error == 0.0);
        CHECK(est.method == s.method);
    }
    CHECK(l1_distance(constant(1.0), constant(0.0), 2, grid(100)).samples == 10000);
    CHECK(l1_distance(constant(1.0), constant(0.0), 2, grid(100)).upper_confidence == doctest::Approx(1.05));
}

TEST_CASE("spike mass by Monte Carlo")
{
    const Network spike = build_spike({Point::Constant(1, 0.5), 1.0, 4});
    const auto est = l1_distance(as_batch(spike), constant(0.0), 1, mc(1000000, 3));
    CHECK(std::abs(est.value - 0.25) <= 4 * est.standard_error);
    CHECK(est.upper_confidence == est.value + 4 * est.standard_error);
}

TEST_CASE("unbiasedness over independent seeds")
{
    const auto f = as_batch([](const Point& x) { return x[0] * x[0]; });
    double mean = 0.0;
    double pooled = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto est = l1_distance(f, constant(0.0), 2, mc(2000, seed));
        mean += est.value / 100.0;
        pooled += est.standard_error * est.standard_error;
    }
    CHECK(std::abs(mean - 1.0 / 3.0) <= 4 * std::sqrt(pooled) / 100.0);
}

TEST_CASE("grid and Monte Carlo agree on smooth integrands")
{
    const auto f = as_batch([](const Point& x) { return std::sin(3 * x[0]) * std::cos(2 * x[1]) * x[2]; });
    const auto g = constant(0.1);
    const auto a = l1_distance(f, g, 3, grid(100));
    const auto b = l1_distance(f, g, 3, mc(200000, 9));
    CHECK(std::abs(a.value - b.value) <= (a.upper_confidence - a.value) + 4 * b.standard_error);
}

TEST_CASE("triangle inequality")
{
    const auto a = as_batch([](const Point& x) { return x[0]; });
    const auto b = as_batch([](const Point& x) { return x[0] * x[1]; });
    const auto c = constant(0.3);
    const auto ac = l1_distance(a, c, 2, mc(50000, 1));
    const auto ab = l1_distance(a, b, 2, mc(50000, 2));
    const auto bc = l1_distance(b, c, 2, mc(50000, 3));
    const double noise = 4 * std::sqrt(ac.standard_error * ac.standard_error +
                                       ab.standard_error * ab.standard_error + bc.standard_error * bc.standard_error);
    CHECK(ac.value <= ab.value + bc.value + noise);
}

TEST_CASE("determinism given the seed")
{
    const auto f = as_batch([](const Point& x) { return std::exp(-x.squaredNorm()); });
    const auto a = l1_distance(f, constant(0.0), 3, mc(10000, 42));
    const auto b = l1_distance(f, constant(0.0), 3, mc(10000, 42));
    const auto c = l1_distance(f, constant(0.0), 3, mc(10000, 43));
    CHECK(a.value == b.value);
    CHECK(a.standard_error == b.standard_error);
    CHECK(a.value != c.value);
}

TEST_CASE("errors")
{
    const auto nan_at_half = as_batch([](const Point& x) { return x[0] > 0.5 ? std::nan("") : 0.0; });
    try {
        (void)l1_distance(nan_at_half, constant(0.0), 1, mc(1000));
        FAIL("expected QuadratureError");
    } catch (const QuadratureError& e) {
        CHECK(e.point().size() == 1);
        CHECK(e.point()[0] > 0.5);
    }
    CHECK_THROWS_AS(l1_distance(constant(0), constant(1), 4, grid(100)), UnsupportedMethod);
    CHECK_THROWS_AS(l1_distance(constant(0), constant(1), 1, mc(99)), ContractViolation);
    CHECK_THROWS_AS(l1_distance(constant(0), constant(1), 3, grid(100000)), ContractViolation);
    CHECK_THROWS_AS(quadrature_method_from_string("simpson"), ContractViolation);
}

TEST_CASE("pairwise summation and report form")
{
    std::vector<double> v(1000, 0.1);
    CHECK(pairwise_sum(v) == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
    const auto est = l1_distance(constant(0.5), constant(0.0), 1, mc(100));
    const auto doc = est.to_json();
    CHECK(doc["value"] == 0.5);
    CHECK(doc["stderr"] == 0.0);
    CHECK(doc["samples"] == 100);
    CHECK(doc["method"] == "monte_carlo");
    CHECK(doc.contains("upper_confidence"));
}
