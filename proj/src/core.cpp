#include "choicenet/core.hpp"

#include <sstream>

namespace choicenet {

std::string format_point(const Point& p)
{
    std::ostringstream out;
    out.precision(17);
    out << '[';
    for (Eigen::Index i = 0; i < p.size(); ++i)
        out << (i ? ", " : "") << p[i];
    out << ']';
    return out.str();
}

}  // namespace choicenet
