#ifndef CHOICENET_LABEL_FIELD_HPP
#define CHOICENET_LABEL_FIELD_HPP

// Label families (y_i) indexed by [0,1]^d, represented intensionally: a named
// base function plus finitely many pointwise exceptions. Two fields are
// equivalent (differ at finitely many points) exactly when they share a base.

#include "choicenet/core.hpp"

#include <json.hpp>

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace choicenet {

/// A registry function [0,1]^d -> [0,1] with a stable identifier.
class BaseFunction {
public:
    using Fn = std::function<double(const Point&)>;

    BaseFunction(std::string name, nlohmann::json params, int dim, bool integrable, Fn fn);

    const std::string& name() const { return name_; }
    const nlohmann::json& params() const { return params_; }
    int dim() const { return dim_; }
    bool integrable_by_default() const { return integrable_; }
    /// name + canonical parameters + dimension.
    const std::string& id() const { return id_; }

    double operator()(const Point& x) const { return fn_(x); }

private:
    std::string name_;
    nlohmann::json params_;
    int dim_;
    bool integrable_;
    std::string id_;
    Fn fn_;
};

/// Builds a registry function. Unknown names or malformed parameters raise
/// ContractViolation. Missing parameters take their documented defaults and
/// the completed parameter object becomes part of the identifier.
///
///   constant      {"value": 0.5}
///   identity      x -> x_1
///   affine        {"offset": 0, "slope": 1/d (scalar or list)}
///   sin2pi        {"frequency": 1}       prod_l sin^2(pi f x_l)
///   radial_bump   {"center": 0.5, "width": 0.15}   exp(-|x-c|^2 / (2 w^2))
///   step          {"axis": 0, "threshold": 0.5, "low": 0, "high": 1}
///   scrambled     bit-hash of x in [0,1); registered as non-integrable
std::shared_ptr<const BaseFunction> make_base_function(std::string_view name, const nlohmann::json& params, int dim);
std::vector<std::string> registered_bases();

using ExceptionMap = std::map<Point, double, PointLess>;

class FiniteSet;

class LabelField {
public:
    LabelField(std::shared_ptr<const BaseFunction> base, bool integrable, ExceptionMap exceptions = {});
    /// Integrable flag taken from the registry default.
    explicit LabelField(std::shared_ptr<const BaseFunction> base);

    const BaseFunction& base() const { return *base_; }
    const std::shared_ptr<const BaseFunction>& base_ptr() const { return base_; }
    int dim() const { return base_->dim(); }
    bool integrable() const { return integrable_; }
    const ExceptionMap& exceptions() const { return exceptions_; }

    /// y_i: the exception value if `i` is an exception key, else base(i).
    double value_at(const Point& i) const;

    LabelField with_exceptions(ExceptionMap exceptions) const;
    LabelField without_exceptions() const { return with_exceptions({}); }

    friend bool operator==(const LabelField& a, const LabelField& b);

private:
    std::shared_ptr<const BaseFunction> base_;
    bool integrable_;
    ExceptionMap exceptions_;
};

/// y^X: zero on X, unchanged elsewhere.
LabelField mask(const LabelField& field, const FiniteSet& x);

/// True iff the fields differ at only finitely many points.
bool equivalent(const LabelField& a, const LabelField& b);

/// Pairwise-distinct points of [0,1]^d, kept in insertion order.
class FiniteSet {
public:
    explicit FiniteSet(int dim);
    /// Throws on duplicates, dimension mismatch, or points outside the cube.
    FiniteSet(int dim, std::vector<Point> points);
    /// Collapses exact duplicates, keeping first occurrences.
    static FiniteSet from_samples(int dim, const std::vector<Point>& samples);

    int dim() const { return dim_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    const std::vector<Point>& points() const { return points_; }
    bool contains(const Point& p) const;
    /// Position in points(), or -1.
    long index_of(const Point& p) const;

private:
    int dim_;
    std::vector<Point> points_;
    std::map<Point, std::size_t, PointLess> index_;
};

/// {"base": name, "params": {...}, "integrable": bool,
///  "exceptions": [{"point": [...], "value": v}, ...]}
LabelField field_from_json(const nlohmann::json& doc, int dim, const std::string& pointer = "/field");
nlohmann::ordered_json field_to_json(const LabelField& field);

Point point_from_json(const nlohmann::json& doc, int dim, const std::string& pointer);
nlohmann::ordered_json point_to_json(const Point& p);

}  // namespace choicenet

#endif  // CHOICENET_LABEL_FIELD_HPP
