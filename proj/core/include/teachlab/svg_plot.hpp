#pragma once

#include <string>
#include <vector>

namespace teachlab {

enum class PlotWindow { full, early, late };

PlotWindow plot_window_from_string(const std::string& s);

/// Deterministic SVG line chart of the train-loss traces in the given
/// metrics files: fixed 800x500 canvas, one polyline per run, legend from
/// file basenames. early = steps below 1000, late = last 100 train rows.
/// Output carries no timestamps and no absolute paths.
void plot_loss_curves(const std::vector<std::string>& metrics_files, PlotWindow window,
                      const std::string& out_svg);

}  // namespace teachlab
