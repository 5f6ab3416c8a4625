#include "lognls/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <vector>

#include "lognls/errors.hpp"
#include "lognls/io.hpp"

namespace lognls::svg {
namespace {

// canvas geometry (pixels)
constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 780.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 460.0;

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

} // namespace

PlotSpec parse_plot_spec(const std::string& text) {
    PlotSpec spec;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    bool saw_x = false, saw_y = false;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') continue; // single implicit section
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw validation_error("plot spec line " + std::to_string(lineno) +
                                   ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "x") {
            spec.x = value;
            saw_x = true;
        } else if (key == "y") {
            spec.y = value;
            saw_y = true;
        } else if (key == "logx" || key == "logy") {
            bool flag;
            if (value == "true")
                flag = true;
            else if (value == "false")
                flag = false;
            else
                throw validation_error("plot spec line " + std::to_string(lineno) + ": " + key +
                                       " must be true or false");
            (key == "logx" ? spec.logx : spec.logy) = flag;
        } else if (key == "title") {
            spec.title = value;
        } else {
            throw validation_error("plot spec line " + std::to_string(lineno) +
                                   ": unknown key " + key +
                                   " (expected x, y, logx, logy, title)");
        }
    }
    if (!saw_x || !saw_y) throw validation_error("plot spec: both x and y columns are required");
    return spec;
}

std::string render_line_plot(const std::string& csv_text, const PlotSpec& spec) {
    std::stringstream ss(csv_text);
    std::string line;
    if (!std::getline(ss, line)) throw validation_error("plot: empty CSV");
    const std::vector<std::string> header = split_csv_row(line);

    auto column = [&](const std::string& name) -> std::size_t {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            std::string avail;
            for (std::size_t i = 0; i < header.size(); ++i)
                avail += (i ? ", " : "") + header[i];
            throw validation_error("plot: no column named '" + name +
                                   "'; available columns: " + avail);
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t cx = column(spec.x);
    const std::size_t cy = column(spec.y);

    std::vector<std::pair<double, double>> pts;
    while (std::getline(ss, line)) {
        if (trim(line).empty()) continue;
        const std::vector<std::string> row = split_csv_row(line);
        if (row.size() <= std::max(cx, cy)) continue;
        char* end = nullptr;
        const double x = std::strtod(row[cx].c_str(), &end);
        if (end == row[cx].c_str() || !std::isfinite(x)) continue;
        const double y = std::strtod(row[cy].c_str(), &end);
        if (end == row[cy].c_str() || !std::isfinite(y)) continue;
        if ((spec.logx && x <= 0.0) || (spec.logy && y <= 0.0)) continue;
        pts.emplace_back(spec.logx ? std::log10(x) : x, spec.logy ? std::log10(y) : y);
    }
    if (pts.size() < 2)
        throw validation_error("plot: fewer than two drawable points for " + spec.y + " vs " +
                               spec.x);

    double xmin = pts[0].first, xmax = xmin, ymin = pts[0].second, ymax = ymin;
    for (const auto& [x, y] : pts) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    if (xmax == xmin) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax == ymin) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * (kRight - kLeft); };
    auto sy = [&](double y) { return kBottom - (y - ymin) / (ymax - ymin) * (kBottom - kTop); };

    const std::string xlabel = (spec.logx ? "log10 " : "") + spec.x;
    const std::string ylabel = (spec.logy ? "log10 " : "") + spec.y;
    const std::string title =
        spec.title.empty() ? spec.y + " vs " + spec.x : spec.title;

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
          "viewBox=\"0 0 800 500\">\n";
    os << "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
    os << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"monospace\" "
          "font-size=\"16\">"
       << xml_escape(title) << "</text>\n";
    // frame
    os << "<rect x=\"" << px(kLeft) << "\" y=\"" << px(kTop) << "\" width=\""
       << px(kRight - kLeft) << "\" height=\"" << px(kBottom - kTop)
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    // axis extremes and midpoints
    auto xtick = [&](double v) {
        os << "<line x1=\"" << px(sx(v)) << "\" y1=\"" << px(kBottom) << "\" x2=\"" << px(sx(v))
           << "\" y2=\"" << px(kBottom + 5) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << px(sx(v)) << "\" y=\"" << px(kBottom + 20)
           << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">" << fmt6(v)
           << "</text>\n";
    };
    auto ytick = [&](double v) {
        os << "<line x1=\"" << px(kLeft - 5) << "\" y1=\"" << px(sy(v)) << "\" x2=\"" << px(kLeft)
           << "\" y2=\"" << px(sy(v)) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << px(kLeft - 8) << "\" y=\"" << px(sy(v) + 4)
           << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"12\">" << fmt6(v)
           << "</text>\n";
    };
    xtick(xmin);
    xtick(0.5 * (xmin + xmax));
    xtick(xmax);
    ytick(ymin);
    ytick(0.5 * (ymin + ymax));
    ytick(ymax);
    os << "<text x=\"" << px(0.5 * (kLeft + kRight)) << "\" y=\"" << px(kBottom + 38)
       << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\">"
       << xml_escape(xlabel) << "</text>\n";
    os << "<text x=\"16\" y=\"" << px(0.5 * (kTop + kBottom))
       << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\" "
          "transform=\"rotate(-90 16 "
       << px(0.5 * (kTop + kBottom)) << ")\">" << xml_escape(ylabel) << "</text>\n";
    os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) os << ' ';
        os << px(sx(pts[i].first)) << ',' << px(sy(pts[i].second));
    }
    os << "\"/>\n</svg>\n";
    return os.str();
}

std::string emit_plot(const std::string& csv_path, const PlotSpec& spec,
                      const std::string& out_path) {
    std::string out = out_path;
    if (out.empty()) {
        out = csv_path;
        const std::size_t dot = out.find_last_of('.');
        const std::size_t slash = out.find_last_of('/');
        if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
            out.erase(dot);
        out += ".svg";
    }
    const std::string svg = render_line_plot(io::read_file(csv_path), spec);
    io::write_file_atomic(out, svg);
    return out;
}

} // namespace lognls::svg
