#include "choicenet/label_field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>

namespace choicenet {

using nlohmann::json;

namespace {

double number_param(json& params, const char* key, double fallback, std::string_view base)
{
    if (!params.contains(key))
        params[key] = fallback;
    if (!params[key].is_number())
        throw ContractViolation(std::string(base) + ": parameter \"" + key + "\" must be a number");
    return params[key].get<double>();
}

// Scalar parameters broadcast to every coordinate.
Eigen::VectorXd vector_param(json& params, const char* key, double fallback, int dim, std::string_view base)
{
    if (!params.contains(key))
        params[key] = fallback;
    const json& v = params[key];
    Eigen::VectorXd out(dim);
    if (v.is_number()) {
        out.setConstant(v.get<double>());
    } else if (v.is_array() && v.size() == static_cast<std::size_t>(dim) &&
               std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); })) {
        for (int i = 0; i < dim; ++i)
            out[i] = v[static_cast<std::size_t>(i)].get<double>();
    } else {
        throw ContractViolation(std::string(base) + ": parameter \"" + key + "\" must be a number or a list of " +
                                std::to_string(dim) + " numbers");
    }
    return out;
}

std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

BaseFunction::BaseFunction(std::string name, json params, int dim, bool integrable, Fn fn)
    : name_(std::move(name)), params_(std::move(params)), dim_(dim), integrable_(integrable), fn_(std::move(fn))
{
    id_ = name_ + params_.dump() + "/d=" + std::to_string(dim_);
}

std::vector<std::string> registered_bases()
{
    return {"constant", "identity", "affine", "sin2pi", "radial_bump", "step", "scrambled"};
}

std::shared_ptr<const BaseFunction> make_base_function(std::string_view name, const json& given, int dim)
{
    if (dim < 1)
        throw ContractViolation("base function: dimension must be positive");
    if (!given.is_null() && !given.is_object())
        throw ContractViolation(std::string(name) + ": params must be an object");
    json params = given.is_null() ? json::object() : given;
    static const std::map<std::string_view, std::vector<std::string_view>> known_params{
        {"constant", {"value"}},
        {"identity", {}},
        {"affine", {"offset", "slope"}},
        {"sin2pi", {"frequency"}},
        {"radial_bump", {"center", "width"}},
        {"step", {"axis", "threshold", "low", "high"}},
        {"scrambled", {}},
    };
    const auto entry = known_params.find(name);
    if (entry == known_params.end())
        throw ContractViolation("unknown base function \"" + std::string(name) + "\"");
    for (const auto& item : params.items())
        if (std::find(entry->second.begin(), entry->second.end(), item.key()) == entry->second.end())
            throw ContractViolation(std::string(name) + ": unknown parameter \"" + item.key() + "\"");
    auto unit = [&](double v, const char* what) {
        if (!(v >= 0.0 && v <= 1.0))
            throw ContractViolation(std::string(name) + ": " + what + " must lie in [0,1]");
        return v;
    };
    auto make = [&](BaseFunction::Fn fn, bool integrable = true) {
        return std::make_shared<const BaseFunction>(std::string(name), params, dim, integrable, std::move(fn));
    };

    if (name == "constant") {
        const double c = unit(number_param(params, "value", 0.5, name), "value");
        return make([c](const Point&) { return c; });
    }
    if (name == "identity")
        return make([](const Point& x) { return x[0]; });
    if (name == "affine") {
        const double offset = number_param(params, "offset", 0.0, name);
        const Eigen::VectorXd slope = vector_param(params, "slope", 1.0 / dim, dim, name);
        return make([offset, slope](const Point& x) { return offset + slope.dot(x); });
    }
    if (name == "sin2pi") {
        const double f = number_param(params, "frequency", 1.0, name);
        return make([f](const Point& x) {
            double v = 1.0;
            for (Eigen::Index l = 0; l < x.size(); ++l) {
                const double s = std::sin(std::numbers::pi * f * x[l]);
                v *= s * s;
            }
            return v;
        });
    }
    if (name == "radial_bump") {
        const Eigen::VectorXd center = vector_param(params, "center", 0.5, dim, name);
        const double width = number_param(params, "width", 0.15, name);
        if (!(width > 0.0))
            throw ContractViolation("radial_bump: width must be positive");
        return make([center, width](const Point& x) {
            return std::exp(-(x - center).squaredNorm() / (2.0 * width * width));
        });
    }
    if (name == "step") {
        const double axis = number_param(params, "axis", 0.0, name);
        const double threshold = number_param(params, "threshold", 0.5, name);
        const double low = unit(number_param(params, "low", 0.0, name), "low");
        const double high = unit(number_param(params, "high", 1.0, name), "high");
        if (axis < 0 || axis >= dim || axis != std::floor(axis))
            throw ContractViolation("step: axis must be an integer in [0, d)");
        const auto a = static_cast<Eigen::Index>(axis);
        return make([a, threshold, low, high](const Point& x) { return x[a] < threshold ? low : high; });
    }
    if (name == "scrambled") {
        return make(
            [](const Point& x) {
                std::uint64_t h = 0x9e3779b97f4a7c15ULL;
                for (Eigen::Index l = 0; l < x.size(); ++l)
                    h = mix64(h ^ std::bit_cast<std::uint64_t>(x[l]));
                return static_cast<double>(h >> 11) * 0x1.0p-53;
            },
            false);
    }
    throw ContractViolation("unknown base function \"" + std::string(name) + "\"");
}

LabelField::LabelField(std::shared_ptr<const BaseFunction> base, bool integrable, ExceptionMap exceptions)
    : base_(std::move(base)), integrable_(integrable), exceptions_(std::move(exceptions))
{
    if (!base_)
        throw ContractViolation("label field: missing base function");
    for (const auto& [point, value] : exceptions_) {
        if (point.size() != base_->dim() || !in_unit_cube(point))
            throw ContractViolation("label field: exception key " + format_point(point) + " outside [0,1]^" +
                                    std::to_string(base_->dim()));
        if (!(value >= 0.0 && value <= 1.0))
            throw ContractViolation("label field: exception value at " + format_point(point) + " outside [0,1]");
    }
}

LabelField::LabelField(std::shared_ptr<const BaseFunction> base)
    : LabelField(base, base ? base->integrable_by_default() : true)
{
}

double LabelField::value_at(const Point& i) const
{
    if (i.size() != dim() || !in_unit_cube(i))
        throw ContractViolation("value_at: index " + format_point(i) + " outside [0,1]^" + std::to_string(dim()));
    if (auto it = exceptions_.find(i); it != exceptions_.end())
        return it->second;
    const double v = (*base_)(i);
    if (!(v >= 0.0 && v <= 1.0))
        throw ContractViolation("value_at: base \"" + base_->name() + "\" returned " + std::to_string(v) + " at " +
                                format_point(i));
    return v;
}

LabelField LabelField::with_exceptions(ExceptionMap exceptions) const
{
    return LabelField(base_, integrable_, std::move(exceptions));
}

bool operator==(const LabelField& a, const LabelField& b)
{
    if (a.base_->id() != b.base_->id() || a.integrable_ != b.integrable_ ||
        a.exceptions_.size() != b.exceptions_.size())
        return false;
    return std::equal(a.exceptions_.begin(), a.exceptions_.end(), b.exceptions_.begin(),
                      [](const auto& x, const auto& y) { return same_point(x.first, y.first) && x.second == y.second; });
}

LabelField mask(const LabelField& field, const FiniteSet& x)
{
    if (!x.empty() && x.dim() != field.dim())
        throw ContractViolation("mask: set dimension differs from field dimension");
    ExceptionMap exceptions = field.exceptions();
    for (const auto& p : x.points())
        exceptions[p] = 0.0;
    return field.with_exceptions(std::move(exceptions));
}

bool equivalent(const LabelField& a, const LabelField& b) { return a.base().id() == b.base().id(); }

FiniteSet::FiniteSet(int dim) : dim_(dim)
{
    if (dim < 1)
        throw ContractViolation("finite set: dimension must be positive");
}

FiniteSet::FiniteSet(int dim, std::vector<Point> points) : FiniteSet(dim)
{
    for (auto& p : points) {
        if (p.size() != dim_ || !in_unit_cube(p))
            throw ContractViolation("finite set: point " + format_point(p) + " outside [0,1]^" + std::to_string(dim_));
        if (!index_.emplace(p, points_.size()).second)
            throw ContractViolation("finite set: duplicate point " + format_point(p));
        points_.push_back(std::move(p));
    }
}

FiniteSet FiniteSet::from_samples(int dim, const std::vector<Point>& samples)
{
    std::vector<Point> unique;
    std::map<Point, bool, PointLess> seen;
    for (const auto& p : samples)
        if (seen.emplace(p, true).second)
            unique.push_back(p);
    return FiniteSet(dim, std::move(unique));
}

bool FiniteSet::contains(const Point& p) const { return index_.contains(p); }

long FiniteSet::index_of(const Point& p) const
{
    auto it = index_.find(p);
    return it == index_.end() ? -1 : static_cast<long>(it->second);
}

Point point_from_json(const json& doc, int dim, const std::string& pointer)
{
    if (!doc.is_array() || doc.size() != static_cast<std::size_t>(dim))
        throw ContractViolation(pointer + ": expected a list of " + std::to_string(dim) + " coordinates");
    Point p(dim);
    for (int i = 0; i < dim; ++i) {
        const json& c = doc[static_cast<std::size_t>(i)];
        if (!c.is_number())
            throw ContractViolation(pointer + "/" + std::to_string(i) + ": expected a number");
        p[i] = c.get<double>();
    }
    if (!in_unit_cube(p))
        throw ContractViolation(pointer + ": point " + format_point(p) + " outside [0,1]^" + std::to_string(dim));
    return p;
}

nlohmann::ordered_json point_to_json(const Point& p)
{
    auto out = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < p.size(); ++i)
        out.push_back(p[i]);
    return out;
}

LabelField field_from_json(const json& doc, int dim, const std::string& pointer)
{
    if (!doc.is_object())
        throw ContractViolation(pointer + ": expected an object");
    for (const auto& item : doc.items())
        if (item.key() != "base" && item.key() != "params" && item.key() != "integrable" && item.key() != "exceptions")
            throw ContractViolation(pointer + "/" + item.key() + ": unknown key");
    if (!doc.contains("base") || !doc["base"].is_string())
        throw ContractViolation(pointer + "/base: expected a registry name (one of constant, identity, affine, "
                                          "sin2pi, radial_bump, step, scrambled)");
    const json params = doc.contains("params") ? doc["params"] : json::object();
    std::shared_ptr<const BaseFunction> base;
    try {
        base = make_base_function(doc["base"].get<std::string>(), params, dim);
    } catch (const ContractViolation& e) {
        throw ContractViolation(pointer + ": " + e.what());
    }
    bool integrable = base->integrable_by_default();
    if (doc.contains("integrable")) {
        if (!doc["integrable"].is_boolean())
            throw ContractViolation(pointer + "/integrable: expected true or false");
        integrable = doc["integrable"].get<bool>();
    }
    ExceptionMap exceptions;
    if (doc.contains("exceptions")) {
        const json& list = doc["exceptions"];
        if (!list.is_array())
            throw ContractViolation(pointer + "/exceptions: expected a list");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string ep = pointer + "/exceptions/" + std::to_string(i);
            if (!list[i].is_object() || !list[i].contains("point") || !list[i].contains("value") ||
                !list[i]["value"].is_number())
                throw ContractViolation(ep + ": expected {\"point\": [...], \"value\": v}");
            exceptions[point_from_json(list[i]["point"], dim, ep + "/point")] = list[i]["value"].get<double>();
        }
    }
    try {
        return LabelField(std::move(base), integrable, std::move(exceptions));
    } catch (const ContractViolation& e) {
        throw ContractViolation(pointer + ": " + e.what());
    }
}

nlohmann::ordered_json field_to_json(const LabelField& field)
{
    nlohmann::ordered_json doc;
    doc["base"] = field.base().name();
    doc["params"] = field.base().params();
    doc["integrable"] = field.integrable();
    auto exceptions = nlohmann::ordered_json::array();
    for (const auto& [point, value] : field.exceptions())
        exceptions.push_back({{"point", point_to_json(point)}, {"value", value}});
    doc["exceptions"] = std::move(exceptions);
    return doc;
}

}  // namespace choicenet
