#pragma once

#include <string>

#include "tstok/series.hpp"

namespace tstok {

// Renders a simple line chart (one polyline per channel, white background,
// fixed palette) and returns the PNG bytes. No axes or text.
std::string render_line_chart(const TimeSeries& series, unsigned width = 640, unsigned height = 320);

void write_line_chart(const std::string& path, const TimeSeries& series, unsigned width = 640,
                      unsigned height = 320);

} // namespace tstok
