#ifndef CHOICENET_SERIALIZATION_HPP
#define CHOICENET_SERIALIZATION_HPP

#include "choicenet/relu_net.hpp"

#include <json.hpp>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace choicenet {

/// Malformed network document. `location` is a byte offset for syntax errors
/// and a JSON pointer for structural ones.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::string location)
        : std::runtime_error(what + " at " + location), location_(std::move(location))
    {
    }
    const std::string& location() const { return location_; }

private:
    std::string location_;
};

// Wire format:
//   {"input_dim": d, "activation": "relu",
//    "layers": [{"weights": [[row-major reals]], "bias": [reals]}, ...]}
// Numbers are written in the shortest form that parses back bit-exact.

nlohmann::ordered_json network_to_json(const Network& net);
Network network_from_json(const nlohmann::json& doc, const std::string& pointer = "");

std::string serialize(const Network& net);
Network deserialize(std::string_view text);

}  // namespace choicenet

#endif  // CHOICENET_SERIALIZATION_HPP
