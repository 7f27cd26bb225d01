#include "choicenet/serialization.hpp"

#include <cmath>
#include <vector>

namespace choicenet {

namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const std::string& pointer)
{
    if (!obj.is_object())
        throw ParseError("expected an object", pointer.empty() ? "/" : pointer);
    auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError(std::string("missing key \"") + key + "\"", pointer + "/" + key);
    return *it;
}

double read_number(const json& v, const std::string& pointer)
{
    if (!v.is_number())
        throw ParseError("expected a number", pointer);
    const double x = v.get<double>();
    if (!std::isfinite(x))
        throw ParseError("non-finite number", pointer);
    return x;
}

}  // namespace

nlohmann::ordered_json network_to_json(const Network& net)
{
    nlohmann::ordered_json doc;
    doc["input_dim"] = net.input_dim();
    doc["activation"] = "relu";
    auto layers = nlohmann::ordered_json::array();
    for (const auto& layer : net.layers()) {
        const auto dense = layer.dense_weights();
        auto rows = nlohmann::ordered_json::array();
        for (Eigen::Index r = 0; r < dense.rows(); ++r) {
            auto row = nlohmann::ordered_json::array();
            for (Eigen::Index c = 0; c < dense.cols(); ++c)
                row.push_back(dense(r, c));
            rows.push_back(std::move(row));
        }
        auto bias = nlohmann::ordered_json::array();
        for (Eigen::Index r = 0; r < layer.bias().size(); ++r)
            bias.push_back(layer.bias()[r]);
        nlohmann::ordered_json entry;
        entry["weights"] = std::move(rows);
        entry["bias"] = std::move(bias);
        layers.push_back(std::move(entry));
    }
    doc["layers"] = std::move(layers);
    return doc;
}

Network network_from_json(const json& doc, const std::string& pointer)
{
    const json& dim = require(doc, "input_dim", pointer);
    if (!dim.is_number_integer() || dim.get<long long>() < 1)
        throw ParseError("input_dim must be a positive integer", pointer + "/input_dim");
    const json& act = require(doc, "activation", pointer);
    if (!act.is_string() || act.get<std::string>() != "relu")
        throw ParseError("activation must be \"relu\"", pointer + "/activation");
    const json& layers = require(doc, "layers", pointer);
    if (!layers.is_array() || layers.empty())
        throw ParseError("layers must be a non-empty array", pointer + "/layers");

    std::vector<Network::Layer> parsed;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const std::string lp = pointer + "/layers/" + std::to_string(l);
        const json& weights = require(layers[l], "weights", lp);
        const json& bias = require(layers[l], "bias", lp);
        if (!weights.is_array() || weights.empty())
            throw ParseError("weights must be a non-empty array of rows", lp + "/weights");
        if (!bias.is_array() || bias.size() != weights.size())
            throw ParseError("bias length must equal the number of weight rows", lp + "/bias");
        const std::size_t cols = weights[0].is_array() ? weights[0].size() : 0;
        if (cols == 0)
            throw ParseError("weight rows must be non-empty arrays", lp + "/weights/0");
        const std::size_t expected = l == 0 ? dim.get<std::size_t>() : parsed.back().out_dim();
        if (cols != expected)
            throw ParseError("layer input width " + std::to_string(cols) + " does not match " +
                                 std::to_string(expected),
                             lp);

        std::vector<Eigen::Triplet<double>> entries;
        Eigen::VectorXd b(static_cast<Eigen::Index>(bias.size()));
        for (std::size_t r = 0; r < weights.size(); ++r) {
            const std::string rp = lp + "/weights/" + std::to_string(r);
            if (!weights[r].is_array() || weights[r].size() != cols)
                throw ParseError("ragged weight row", rp);
            for (std::size_t c = 0; c < cols; ++c) {
                const double w = read_number(weights[r][c], rp + "/" + std::to_string(c));
                if (w != 0.0)
                    entries.emplace_back(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c), w);
            }
            b[static_cast<Eigen::Index>(r)] = read_number(bias[r], lp + "/bias/" + std::to_string(r));
        }
        parsed.push_back(Network::Layer::from_triplets(static_cast<Eigen::Index>(weights.size()),
                                                       static_cast<Eigen::Index>(cols), entries, std::move(b)));
    }
    try {
        return Network(dim.get<Eigen::Index>(), std::move(parsed));
    } catch (const ContractViolation& e) {
        throw ParseError(e.what(), pointer.empty() ? "/" : pointer);
    }
}

std::string serialize(const Network& net) { return network_to_json(net).dump(); }

Network deserialize(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError("malformed JSON: " + std::string(e.what()), "byte " + std::to_string(e.byte));
    }
    return network_from_json(doc);
}

}  // namespace choicenet
