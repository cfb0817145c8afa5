#include "srgcert/output.hpp"

#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace srgcert {

namespace {

constexpr double kSize = 800.0;
constexpr double kPad = 60.0;

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += ch;
        }
    }
    return out;
}

} // namespace

void write_region_svg(std::ostream& os, const PhysicalRegion& region, const std::vector<SetpointMarker>& markers,
                      const std::string& title) {
    const double extent = 1.1 * region.bound;
    const double scale = (kSize / 2.0 - kPad) / extent;
    const auto px = [&](double x) { return kSize / 2.0 + scale * x; };
    const auto py = [&](double y) { return kSize / 2.0 - scale * y; };

    fmt::print(os, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    fmt::print(os,
               "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{0}\" "
               "viewBox=\"0 0 {0} {0}\">\n",
               kSize);
    fmt::print(os, "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{0}\" fill=\"white\"/>\n", kSize);
    fmt::print(os, "<text x=\"{}\" y=\"30\" font-family=\"sans-serif\" font-size=\"18\" text-anchor=\"middle\">{}</text>\n",
               kSize / 2.0, escape(title));

    fmt::print(os, "<g id=\"cells\" fill=\"#8fbce6\" fill-opacity=\"0.8\" stroke=\"#2c6ea6\" stroke-width=\"0.5\">\n");
    for (const auto& cell : region.cells) {
        if (cell.size() < 3) continue;
        fmt::print(os, "<polygon points=\"");
        for (std::size_t i = 0; i < cell.size(); ++i)
            fmt::print(os, "{}{:.3f},{:.3f}", i ? " " : "", px(cell[i].x()), py(cell[i].y()));
        fmt::print(os, "\"/>\n");
    }
    fmt::print(os, "</g>\n");

    fmt::print(os, "<circle cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"{:.3f}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n",
               px(0.0), py(0.0), scale * region.bound);
    fmt::print(os, "<g stroke=\"#888\" stroke-width=\"0.75\">\n");
    fmt::print(os, "<line x1=\"{:.3f}\" y1=\"{:.3f}\" x2=\"{:.3f}\" y2=\"{:.3f}\"/>\n", px(-extent), py(0.0), px(extent),
               py(0.0));
    fmt::print(os, "<line x1=\"{:.3f}\" y1=\"{:.3f}\" x2=\"{:.3f}\" y2=\"{:.3f}\"/>\n", px(0.0), py(-extent), px(0.0),
               py(extent));
    fmt::print(os, "</g>\n");
    fmt::print(os, "<text x=\"{:.3f}\" y=\"{:.3f}\" font-family=\"sans-serif\" font-size=\"14\">i_d0</text>\n",
               px(extent) - 30.0, py(0.0) - 8.0);
    fmt::print(os, "<text x=\"{:.3f}\" y=\"{:.3f}\" font-family=\"sans-serif\" font-size=\"14\">i_q0</text>\n",
               px(0.0) + 8.0, py(extent) + 14.0);

    for (const auto& m : markers) {
        const double x = px(m.i_d0), y = py(m.i_q0);
        const char* colour = m.certified ? "black" : "#c0392b";
        fmt::print(os,
                   "<path d=\"M {:.3f} {:.3f} L {:.3f} {:.3f} M {:.3f} {:.3f} L {:.3f} {:.3f}\" stroke=\"{}\" "
                   "stroke-width=\"2\"/>\n",
                   x - 6.0, y - 6.0, x + 6.0, y + 6.0, x - 6.0, y + 6.0, x + 6.0, y - 6.0, colour);
        if (!m.label.empty())
            fmt::print(os, "<text x=\"{:.3f}\" y=\"{:.3f}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{}\">{}</text>\n",
                       x + 9.0, y - 9.0, colour, escape(m.label));
    }
    fmt::print(os, "</svg>\n");
}

} // namespace srgcert
