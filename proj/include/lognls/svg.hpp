#pragma once

#include <string>

namespace lognls::svg {

/// Column-to-axis mapping for a line plot over a diagnostics CSV.
struct PlotSpec {
    std::string x;
    std::string y;
    bool logx = false;
    bool logy = false;
    std::string title; // defaults to "y vs x" when empty
};

/// Parse the tiny plot-spec grammar: optional [plot] header, key = value
/// lines (x, y, logx, logy, title), # and ; comments.
PlotSpec parse_plot_spec(const std::string& text);

/// Render a fixed-size (800x500) SVG line plot of spec.y against spec.x from
/// CSV text whose first row names the columns. Rows where either value fails
/// to parse, is non-finite, or is non-positive under a log axis are dropped.
/// Byte-stable: identical inputs give identical output. Throws
/// validation_error when a requested column is missing (the message lists
/// the available columns) or fewer than two points remain.
std::string render_line_plot(const std::string& csv_text, const PlotSpec& spec);

/// Read csv_path, render, and atomically write the SVG to out_path (empty:
/// csv_path with its extension replaced by ".svg"). Returns the path written.
std::string emit_plot(const std::string& csv_path, const PlotSpec& spec,
                      const std::string& out_path = "");

} // namespace lognls::svg
