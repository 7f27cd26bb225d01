#ifndef CHOICENET_CORE_HPP
#define CHOICENET_CORE_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace choicenet {

/// A point of [0,1]^d.
using Point = Eigen::VectorXd;

/// Column-major batch of points, one point per column (d x N).
using PointMatrix = Eigen::MatrixXd;

/// Raised when a caller breaks a documented precondition.
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Strict lexicographic order under exact floating equality.
struct PointLess {
    bool operator()(const Point& a, const Point& b) const
    {
        if (a.size() != b.size())
            return a.size() < b.size();
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            if (a[i] < b[i])
                return true;
            if (b[i] < a[i])
                return false;
        }
        return false;
    }
};

inline bool same_point(const Point& a, const Point& b)
{
    return a.size() == b.size() && (a.array() == b.array()).all();
}

inline bool in_unit_cube(const Point& p)
{
    return (p.array() >= 0.0).all() && (p.array() <= 1.0).all();
}

std::string format_point(const Point& p);

}  // namespace choicenet

#endif  // CHOICENET_CORE_HPP
