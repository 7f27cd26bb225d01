#ifndef CHOICENET_CHOICE_ORACLE_HPP
#define CHOICENET_CHOICE_ORACLE_HPP

#include "choicenet/label_field.hpp"

#include <json.hpp>

namespace choicenet {

/// Stand-in for a choice function on equivalence classes of label fields.
///
/// strip_exceptions maps a field to the exception-free member of its class.
/// adversarial maps it to that member perturbed by a fixed corruption map, so
/// predictions go wrong exactly where X meets the corruption keys.
struct OracleKind {
    enum class Tag { strip_exceptions, adversarial };

    Tag tag = Tag::strip_exceptions;
    ExceptionMap corruption;

    static OracleKind strip() { return {}; }
    static OracleKind adversarial(ExceptionMap corruption);
};

/// The class representative. Depends only on equivalence class of `field`.
LabelField representative(const OracleKind& kind, const LabelField& field);

/// Config form: {"oracle": "strip_exceptions"} or
/// {"oracle": "adversarial", "corruption": [{"point": [...], "value": v}, ...]}.
OracleKind oracle_from_json(const nlohmann::json& config, int dim);
void oracle_to_json(const OracleKind& kind, nlohmann::ordered_json& config);

}  // namespace choicenet

#endif  // CHOICENET_CHOICE_ORACLE_HPP
