#include "choicenet/label_field.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace choicenet;
using nlohmann::json;

namespace {

Point pt(std::initializer_list<double> v)
{
    Point p(static_cast<Eigen::Index>(v.size()));
    std::copy(v.begin(), v.end(), p.data());
    return p;
}

LabelField field(const char* name, json params = json::object(), int dim = 1)
{
    return LabelField(make_base_function(name, params, dim));
}

}  // namespace

TEST_CASE("value_at: constant field")
{
    CHECK(field("constant").value_at(pt({0.3})) == 0.5);
}

TEST_CASE("value_at: exceptions take precedence by exact equality")
{
    const LabelField f = field("identity").with_exceptions({{pt({0.3}), 0.9}});
    CHECK(f.value_at(pt({0.3})) == 0.9);
    CHECK(f.value_at(pt({0.30000001})) == 0.30000001);
}

TEST_CASE("value_at: base values outside [0,1] are reported with the point")
{
    const LabelField f = field("affine", {{"offset", 0.8}, {"slope", 1.0}});
    CHECK(f.value_at(pt({0.1})) == doctest::Approx(0.9));
    try {
        (void)f.value_at(pt({0.5}));
        FAIL("expected ContractViolation");
    } catch (const ContractViolation& e) {
        CHECK(std::string(e.what()).find("0.5") != std::string::npos);
    }
    CHECK_THROWS_AS(field("identity").value_at(pt({1.2})), ContractViolation);
}

TEST_CASE("mask sets X to zero and leaves the rest")
{
    const LabelField c = field("constant");
    const FiniteSet x(1, {pt({0.3})});
    const LabelField m = mask(c, x);
    CHECK(m.value_at(pt({0.3})) == 0.0);
    CHECK(m.value_at(pt({0.4})) == 0.5);
    CHECK(m.integrable() == c.integrable());
    CHECK(m.base().id() == c.base().id());
    CHECK(mask(c, FiniteSet(1)) == c);
    CHECK(mask(m, x) == m);
}

TEST_CASE("mask properties on random sets")
{
    std::mt19937_64 rng(31);
    for (const char* name : {"sin2pi", "radial_bump", "affine", "step"}) {
        for (int d = 1; d <= 3; ++d) {
            const LabelField f = field(name, json::object(), d);
            std::vector<Point> pts;
            for (int i = 0; i < 10; ++i)
                pts.push_back(oracle::random_point(rng, d));
            const FiniteSet x(d, pts);
            const LabelField m = mask(f, x);
            CHECK(equivalent(m, f));
            for (const auto& p : pts)
                CHECK(m.value_at(p) == 0.0);
            for (int i = 0; i < 100; ++i) {
                const Point j = oracle::random_point(rng, d);
                CHECK(m.value_at(j) == f.value_at(j));
            }
        }
    }
}

TEST_CASE("equivalence is base identity")
{
    const LabelField f = field("sin2pi", json::object(), 2);
    CHECK(equivalent(f, mask(f, FiniteSet(2, {pt({0.1, 0.2})}))));
    CHECK_FALSE(equivalent(field("constant", {{"value", 0.0}}), field("constant", {{"value", 0.5}})));
    ExceptionMap ten;
    for (int i = 0; i < 10; ++i)
        ten[pt({0.05 + 0.09 * i, 0.5})] = 0.25;
    CHECK(equivalent(f, f.with_exceptions(ten)));
    CHECK_FALSE(equivalent(field("sin2pi", json::object(), 1), field("sin2pi", json::object(), 2)));
}

TEST_CASE("registry: ids include completed parameters")
{
    CHECK(field("constant").base().id() == field("constant", {{"value", 0.5}}).base().id());
    CHECK(field("sin2pi", {{"frequency", 2}}).base().id() != field("sin2pi").base().id());
    for (const auto& name : registered_bases())
        CHECK_NOTHROW(make_base_function(name, json::object(), 2));
    CHECK_THROWS_AS(make_base_function("nope", json::object(), 1), ContractViolation);
    CHECK_THROWS_AS(make_base_function("constant", {{"value", 2.0}}, 1), ContractViolation);
    CHECK_THROWS_AS(make_base_function("constant", {{"bogus", 1}}, 1), ContractViolation);
    CHECK_FALSE(field("scrambled").integrable());
    CHECK(field("step").integrable());
}

TEST_CASE("registry values")
{
    CHECK(field("sin2pi").value_at(pt({0.5})) == 1.0);
    CHECK(field("sin2pi", json::object(), 2).value_at(pt({0.5, 0.5})) == 1.0);
    CHECK(field("radial_bump", json::object(), 2).value_at(pt({0.5, 0.5})) == 1.0);
    CHECK(field("step").value_at(pt({0.25})) == 0.0);
    CHECK(field("step").value_at(pt({0.75})) == 1.0);
    CHECK(field("affine", json::object(), 2).value_at(pt({1.0, 1.0})) == doctest::Approx(1.0));
    const LabelField s = field("scrambled");
    for (double v : {0.0, 0.1, 0.5, 0.999, 1.0}) {
        const double y = s.value_at(pt({v}));
        CHECK(y >= 0.0);
        CHECK(y <= 1.0);
    }
}

TEST_CASE("FiniteSet semantics")
{
    const FiniteSet x = FiniteSet::from_samples(1, {pt({0.2}), pt({0.4}), pt({0.2})});
    CHECK(x.size() == 2);
    CHECK(x.contains(pt({0.4})));
    CHECK(x.index_of(pt({0.4})) == 1);
    CHECK(x.index_of(pt({0.5})) == -1);
    CHECK_THROWS_AS(FiniteSet(1, {pt({1.5})}), ContractViolation);
    CHECK_THROWS_AS(FiniteSet(2, {pt({0.5})}), ContractViolation);
}

TEST_CASE("field description round trip")
{
    const json doc = json::parse(R"({"base": "radial_bump", "params": {"width": 0.2},
        "exceptions": [{"point": [0.25, 0.5], "value": 0.75}]})");
    const LabelField f = field_from_json(doc, 2);
    CHECK(f.value_at(pt({0.25, 0.5})) == 0.75);
    CHECK(f.integrable());
    CHECK(field_from_json(json::parse(field_to_json(f).dump()), 2) == f);
    CHECK_THROWS_AS(field_from_json(json::parse(R"({"base": "constant", "extra": 1})"), 1), ContractViolation);
    CHECK_THROWS_AS(
        field_from_json(json::parse(R"({"base": "constant", "exceptions": [{"point": [2], "value": 0}]})"), 1),
        ContractViolation);
    CHECK_THROWS_AS(
        field_from_json(json::parse(R"({"base": "constant", "exceptions": [{"point": [0.1], "value": 3}]})"), 1),
        ContractViolation);
}
