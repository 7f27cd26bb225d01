#include "choicenet/choice_oracle.hpp"

namespace choicenet {

OracleKind OracleKind::adversarial(ExceptionMap corruption)
{
    for (const auto& [point, value] : corruption)
        if (!in_unit_cube(point) || !(value >= 0.0 && value <= 1.0))
            throw ContractViolation("adversarial oracle: corruption entry " + format_point(point) +
                                    " outside [0,1]^d x [0,1]");
    return {Tag::adversarial, std::move(corruption)};
}

LabelField representative(const OracleKind& kind, const LabelField& field)
{
    switch (kind.tag) {
    case OracleKind::Tag::strip_exceptions:
        return field.without_exceptions();
    case OracleKind::Tag::adversarial:
        for (const auto& entry : kind.corruption)
            if (entry.first.size() != field.dim())
                throw ContractViolation("adversarial oracle: corruption dimension differs from field dimension");
        return field.with_exceptions(kind.corruption);
    }
    throw ContractViolation("unknown oracle kind");
}

OracleKind oracle_from_json(const nlohmann::json& config, int dim)
{
    if (!config.contains("oracle"))
        return OracleKind::strip();
    const auto& tag = config["oracle"];
    if (!tag.is_string())
        throw ContractViolation("/oracle: expected \"strip_exceptions\" or \"adversarial\"");
    const auto name = tag.get<std::string>();
    if (name == "strip_exceptions")
        return OracleKind::strip();
    if (name != "adversarial")
        throw ContractViolation("/oracle: unknown oracle \"" + name + "\"");
    if (!config.contains("corruption") || !config["corruption"].is_array())
        throw ContractViolation("/corruption: adversarial oracle needs a corruption list");
    ExceptionMap corruption;
    const auto& list = config["corruption"];
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string p = "/corruption/" + std::to_string(i);
        if (!list[i].is_object() || !list[i].contains("point") || !list[i].contains("value") ||
            !list[i]["value"].is_number())
            throw ContractViolation(p + ": expected {\"point\": [...], \"value\": v}");
        corruption[point_from_json(list[i]["point"], dim, p + "/point")] = list[i]["value"].get<double>();
    }
    return OracleKind::adversarial(std::move(corruption));
}

void oracle_to_json(const OracleKind& kind, nlohmann::ordered_json& config)
{
    if (kind.tag == OracleKind::Tag::strip_exceptions) {
        config["oracle"] = "strip_exceptions";
        return;
    }
    config["oracle"] = "adversarial";
    auto list = nlohmann::ordered_json::array();
    for (const auto& [point, value] : kind.corruption)
        list.push_back({{"point", point_to_json(point)}, {"value", value}});
    config["corruption"] = std::move(list);
}

}  // namespace choicenet
