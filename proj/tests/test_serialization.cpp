#include "choicenet/serialization.hpp"
#include "choicenet/spike.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace choicenet;

TEST_CASE("round trip of the d=2 spike network")
{
    const Network net = build_spike({Point::Constant(2, 0.375), 0.7, 8});
    const Network back = deserialize(serialize(net));
    CHECK(back == net);
    CHECK(back.widths() == net.widths());
}

TEST_CASE("round trip is bit-exact on random weights")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Network net = oracle::random_network(rng, oracle::random_widths(rng, 3, 1 + trial % 5, 20));
        const Network back = deserialize(serialize(net));
        REQUIRE(back.depth() == net.depth());
        for (std::size_t l = 0; l < net.depth(); ++l) {
            CHECK((back.layers()[l].dense_weights().array() == net.layers()[l].dense_weights().array()).all());
            CHECK((back.layers()[l].bias().array() == net.layers()[l].bias().array()).all());
        }
    }
}

TEST_CASE("serialize is deterministic and follows the documented layout")
{
    const Network net = build_spike({Point::Constant(1, 0.5), 1.0, 4});
    const std::string a = serialize(net);
    CHECK(a == serialize(net));
    const auto doc = nlohmann::json::parse(a);
    CHECK(doc["input_dim"] == 1);
    CHECK(doc["activation"] == "relu");
    CHECK(doc["layers"].size() == 3);
    CHECK(doc["layers"][0]["weights"].size() == 3);
    CHECK(doc["layers"][0]["bias"].size() == 3);
    CHECK(a.find("\"input_dim\"") < a.find("\"activation\""));
    CHECK(a.find("\"activation\"") < a.find("\"layers\""));
}

TEST_CASE("truncated document is a parse error with a byte position")
{
    const std::string text = serialize(build_spike({Point::Constant(2, 0.5), 1.0, 4}));
    try {
        (void)deserialize(text.substr(0, text.size() / 2));
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.location().rfind("byte ", 0) == 0);
    }
}

TEST_CASE("structural errors name the offending field")
{
    auto location_of = [](const std::string& text) {
        try {
            (void)deserialize(text);
        } catch (const ParseError& e) {
            return e.location();
        }
        return std::string("no error");
    };
    CHECK(location_of(R"({"activation":"relu","layers":[]})") == "/input_dim");
    CHECK(location_of(R"({"input_dim":1,"activation":"tanh","layers":[{"weights":[[1]],"bias":[0]}]})") ==
          "/activation");
    CHECK(location_of(R"({"input_dim":1,"activation":"relu","layers":[{"weights":[[1,2]],"bias":[0]}]})") ==
          "/layers/0");
    CHECK(location_of(R"({"input_dim":2,"activation":"relu","layers":[{"weights":[[1,2],[3]],"bias":[0,0]}]})") ==
          "/layers/0/weights/1");
    CHECK(location_of(R"({"input_dim":1,"activation":"relu","layers":[{"weights":[["x"]],"bias":[0]}]})") ==
          "/layers/0/weights/0/0");
    CHECK(location_of(R"({"input_dim":1,"activation":"relu","layers":[{"weights":[[1]],"bias":[0,1]}]})") ==
          "/layers/0/bias");
}
