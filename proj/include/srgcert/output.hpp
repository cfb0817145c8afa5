#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "srgcert/certify.hpp"

namespace srgcert {

struct SetpointMarker {
    double i_d0 = 0.0;
    double i_q0 = 0.0;
    std::string label;
    bool certified = false;
};

/// SVG 1.1, 800x800: bound circle, filled cells, axes and markers. The
/// plane is (i_d0, i_q0) with i_q0 pointing up.
void write_region_svg(std::ostream& os, const PhysicalRegion& region, const std::vector<SetpointMarker>& markers,
                      const std::string& title);

} // namespace srgcert
