#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gibbsic/sweep.hpp"

namespace gibbsic {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  ///< half-width of the shaded band; empty for none
};

/// Minimal static line chart: polylines with optional +-err bands, vertical marker
/// lines, axes with rounded ticks and a legend.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string xlabel, std::string ylabel);

  void add_series(PlotSeries s);
  void add_marker(double x, std::string label);

  std::string render(int width = 760, int height = 480) const;
  void save(const std::filesystem::path& path) const;

  std::size_t series_count() const { return series_.size(); }

 private:
  std::string title_, xlabel_, ylabel_;
  std::vector<PlotSeries> series_;
  std::vector<std::pair<double, std::string>> markers_;
};

const std::vector<std::string_view>& figure_names();

/// Builds the named figure from a sweep (mean +- 1 sd over seeds at each p).
/// Throws ValidationError for an unknown figure or a result with no rows.
SvgPlot make_figure(const SweepResult& result, std::string_view figure);
void emit_plot(const SweepResult& result, std::string_view figure, const std::filesystem::path& path);

}  // namespace gibbsic
