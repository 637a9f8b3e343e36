#include "gibbsic/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "gibbsic/error.hpp"

namespace gibbsic {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

std::string esc(std::string_view s) {
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

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::vector<double> nice_ticks(double lo, double hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (raw <= step) break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) ticks.push_back(t);
  return ticks;
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string xlabel, std::string ylabel)
    : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

void SvgPlot::add_series(PlotSeries s) {
  detail::require(s.x.size() == s.y.size(), "plot: x and y lengths differ");
  detail::require(s.err.empty() || s.err.size() == s.y.size(), "plot: error band length differs");
  series_.push_back(std::move(s));
}

void SvgPlot::add_marker(double x, std::string label) { markers_.emplace_back(x, std::move(label)); }

std::string SvgPlot::render(int width, int height) const {
  detail::require(!series_.empty(), "plot: nothing to draw");
  const double ml = 70, mr = 190, mt = 40, mb = 55;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : series_) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      const double e = s.err.empty() ? 0.0 : s.err[i];
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i] - e);
      ymax = std::max(ymax, s.y[i] + e);
    }
  }
  detail::require(std::isfinite(xmin) && std::isfinite(ymin), "plot: no finite points");
  if (xmax == xmin) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (ymax == ymin) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
       std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) + " " + std::to_string(height) +
       "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + num(ml + pw / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + esc(title_) +
       "</text>\n";

  // Grid and ticks.
  for (double t : nice_ticks(xmin, xmax)) {
    const double x = sx(t);
    o += "<line x1=\"" + num(x) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(x) + "\" y2=\"" + num(mt + ph) +
         "\" stroke=\"#e5e5e5\"/>\n";
    o += "<text x=\"" + num(x) + "\" y=\"" + num(mt + ph + 16) + "\" text-anchor=\"middle\">" + tick_label(t) +
         "</text>\n";
  }
  for (double t : nice_ticks(ymin, ymax)) {
    const double y = sy(t);
    o += "<line x1=\"" + num(ml) + "\" y1=\"" + num(y) + "\" x2=\"" + num(ml + pw) + "\" y2=\"" + num(y) +
         "\" stroke=\"#e5e5e5\"/>\n";
    o += "<text x=\"" + num(ml - 6) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" + tick_label(t) +
         "</text>\n";
  }
  o += "<rect x=\"" + num(ml) + "\" y=\"" + num(mt) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  o += "<text x=\"" + num(ml + pw / 2) + "\" y=\"" + num(height - 14.0) + "\" text-anchor=\"middle\">" +
       esc(xlabel_) + "</text>\n";
  o += "<text transform=\"translate(18," + num(mt + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
       esc(ylabel_) + "</text>\n";

  for (const auto& [mx, label] : markers_) {
    if (mx < xmin || mx > xmax) continue;
    const double x = sx(mx);
    o += "<line x1=\"" + num(x) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(x) + "\" y2=\"" + num(mt + ph) +
         "\" stroke=\"#444\" stroke-dasharray=\"5,4\"/>\n";
    o += "<text x=\"" + num(x + 4) + "\" y=\"" + num(mt + 14) + "\">" + esc(label) + "</text>\n";
  }

  for (std::size_t k = 0; k < series_.size(); ++k) {
    const auto& s = series_[k];
    const char* color = kPalette[k % std::size(kPalette)];
    if (!s.err.empty()) {
      std::string pts;
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (std::isfinite(s.y[i])) pts += num(sx(s.x[i])) + "," + num(sy(s.y[i] + s.err[i])) + " ";
      for (std::size_t i = s.x.size(); i-- > 0;)
        if (std::isfinite(s.y[i])) pts += num(sx(s.x[i])) + "," + num(sy(s.y[i] - s.err[i])) + " ";
      o += "<polygon points=\"" + pts + "\" fill=\"" + color + "\" fill-opacity=\"0.18\" stroke=\"none\"/>\n";
    }
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (std::isfinite(s.y[i])) pts += num(sx(s.x[i])) + "," + num(sy(s.y[i])) + " ";
    o += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (std::isfinite(s.y[i]))
        o += "<circle cx=\"" + num(sx(s.x[i])) + "\" cy=\"" + num(sy(s.y[i])) + "\" r=\"2.5\" fill=\"" + color +
             "\"/>\n";
    const double ly = mt + 12 + 20.0 * static_cast<double>(k);
    o += "<line x1=\"" + num(ml + pw + 14) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(ml + pw + 38) + "\" y2=\"" +
         num(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    o += "<text x=\"" + num(ml + pw + 44) + "\" y=\"" + num(ly + 4) + "\">" + esc(s.label) + "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

void SvgPlot::save(const std::filesystem::path& path) const {
  const std::string text = render();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

const std::vector<std::string_view>& figure_names() {
  static const std::vector<std::string_view> names = {"loss_curves", "criteria_comparison", "bic_decomposition",
                                                      "kl_vs_iskl", "rmt_covariance"};
  return names;
}

namespace {

struct Column {
  const char* name;
  const char* label;
};

void add_columns(SvgPlot& plot, const SweepResult& result, std::initializer_list<Column> cols) {
  const bool several = result.config.lambdas.size() > 1;
  for (const Curve& c : aggregate(result)) {
    if (c.ps.empty()) continue;
    std::vector<double> xs(c.ps.begin(), c.ps.end());
    for (const auto& col : cols) {
      std::string label = col.label;
      if (several) label += " (lambda=" + tick_label(c.lambda) + ")";
      plot.add_series({label, xs, c.mean_of(col.name), c.sd_of(col.name)});
    }
  }
}

}  // namespace

SvgPlot make_figure(const SweepResult& result, std::string_view figure) {
  const auto& names = figure_names();
  if (std::find(names.begin(), names.end(), figure) == names.end())
    throw ValidationError("unknown figure '" + std::string(figure) +
                          "' (expected loss_curves, criteria_comparison, bic_decomposition, kl_vs_iskl or "
                          "rmt_covariance)");
  if (result.rows.empty()) throw ValidationError("cannot plot '" + std::string(figure) + "': sweep has no rows");

  const int n = result.config.n;
  if (figure == "loss_curves") {
    SvgPlot plot("Training and test MSE", "p", "MSE");
    add_columns(plot, result, {{"train_mse", "train MSE"}, {"test_mse", "test MSE"}});
    plot.add_marker(n, "p = n = " + std::to_string(n));
    return plot;
  }
  if (figure == "criteria_comparison") {
    SvgPlot plot("Information criteria", "p", "criterion (per sample)");
    add_columns(plot, result,
                {{"aic", "AIC"},
                 {"bic", "BIC"},
                 {"aic_plus", "AIC+"},
                 {"bic_plus_exact", "BIC+ (exact)"},
                 {"bic_minus_exact", "BIC- (exact)"},
                 {"bic_plus_over", "BIC+ (asymptotic)"},
                 {"bic_minus_over", "BIC- (asymptotic)"},
                 {"wbic", "WBIC (baseline)"}});
    if (result.config.regime == Regime::Overparam) plot.add_marker(n, "p = n");
    return plot;
  }
  if (figure == "bic_decomposition") {
    SvgPlot plot("Terms of the asymptotic BIC+", "p", "value");
    add_columns(plot, result,
                {{"train_logloss", "training log-loss"}, {"l2_term", "l2 term"}, {"cov_term", "covariance term"}});
    plot.add_marker(n, "p = n");
    return plot;
  }
  if (figure == "kl_vs_iskl") {
    SvgPlot plot("KL term of BIC+ and generalization term of AIC+", "p", "per-sample value");
    add_columns(plot, result, {{"kl_post_prior", "D(P*||prior)/n"}, {"gen_err", "I_SKL/n"}});
    plot.add_marker(n, "p = n");
    return plot;
  }
  // rmt_covariance: finite covariance term (KL/n minus its l2 part) against the asymptotic one.
  SweepResult derived = result;
  for (auto& r : derived.rows) r.kl_post_prior -= r.l2_term;
  SvgPlot plot("Covariance term: finite n vs asymptotic", "p", "value");
  add_columns(plot, derived, {{"kl_post_prior", "finite-n covariance term"}, {"cov_term", "asymptotic"}});
  return plot;
}

void emit_plot(const SweepResult& result, std::string_view figure, const std::filesystem::path& path) {
  make_figure(result, figure).save(path);
}

}  // namespace gibbsic
