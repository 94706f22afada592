#include "stadium/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <variant>

#include "stadium/error.hpp"

namespace stadium {

std::string svg_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  std::string s(buf);
  if (s == "-0") s = "0";
  return s;
}

namespace {

std::string escape_xml(const std::string& text) {
  std::string out;
  for (char c : text) {
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

// Comments may not contain "--".
std::string sanitize_comment(std::string text) {
  for (std::size_t p = text.find("--"); p != std::string::npos; p = text.find("--", p)) text.replace(p, 2, "- ");
  return text;
}

void open_svg(std::ostringstream& os, int width, int height, const std::string& comment) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  if (!comment.empty()) os << "<!-- " << sanitize_comment(comment) << " -->\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
}

struct Frame {
  double scale;
  double cx;
  double cy;
  double x(double v) const { return cx + scale * v; }
  double y(double v) const { return cy - scale * v; }
};

std::string outline_path(const Geometry& geometry, const Frame& f) {
  std::ostringstream d;
  if (const auto* s = std::get_if<StadiumGeometry>(&geometry)) {
    const double a = s->a();
    const double r = s->r();
    const std::string rr = svg_number(f.scale * r);
    d << "M " << svg_number(f.x(a)) << ' ' << svg_number(f.y(r)) << " L " << svg_number(f.x(-a)) << ' '
      << svg_number(f.y(r)) << " A " << rr << ' ' << rr << " 0 0 0 " << svg_number(f.x(-a)) << ' '
      << svg_number(f.y(-r)) << " L " << svg_number(f.x(a)) << ' ' << svg_number(f.y(-r)) << " A " << rr << ' '
      << rr << " 0 0 0 " << svg_number(f.x(a)) << ' ' << svg_number(f.y(r)) << " Z";
  } else {
    const auto& rect = std::get<RectangleGeometry>(geometry);
    const double hx = 0.5 * rect.lx();
    const double hy = 0.5 * rect.ly();
    d << "M " << svg_number(f.x(-hx)) << ' ' << svg_number(f.y(hy)) << " L " << svg_number(f.x(hx)) << ' '
      << svg_number(f.y(hy)) << " L " << svg_number(f.x(hx)) << ' ' << svg_number(f.y(-hy)) << " L "
      << svg_number(f.x(-hx)) << ' ' << svg_number(f.y(-hy)) << " Z";
  }
  return d.str();
}

double nice_step(double span) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double nice = norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0;
  return nice * mag;
}

}  // namespace

std::string render_contours_svg(const Geometry& geometry, const ContourSet& contours, const FieldPlotStyle& style) {
  const BoundingBox box = bounding_box(geometry);
  const double inner_w = style.width - 2.0 * style.margin;
  const double inner_h = style.height - 2.0 * style.margin;
  const double scale = std::min(inner_w / (box.xmax - box.xmin), inner_h / (box.ymax - box.ymin));
  const Frame frame{scale, style.width / 2.0, style.height / 2.0};

  std::ostringstream os;
  open_svg(os, style.width, style.height, style.comment);
  if (!style.title.empty()) {
    os << "<text x=\"" << style.width / 2 << "\" y=\"" << style.margin / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << escape_xml(style.title)
       << "</text>\n";
  }
  os << "<path class=\"outline\" d=\"" << outline_path(geometry, frame)
     << "\" fill=\"none\" stroke=\"#222222\" stroke-width=\"1.5\"/>\n";
  for (const auto& level : contours.levels) {
    std::string attrs;
    if (level.level == 0.0) {
      attrs = "class=\"nodal\" fill=\"none\" stroke=\"#000000\" stroke-width=\"2\"";
    } else if (level.level > 0.0) {
      attrs = "class=\"positive\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1\"";
    } else {
      attrs = "class=\"negative\" fill=\"none\" stroke=\"#2e6fb7\" stroke-width=\"1\" stroke-dasharray=\"4 3\"";
    }
    for (const auto& line : level.polylines) {
      os << "<path " << attrs << " data-level=\"" << svg_number(level.level) << "\" d=\"";
      for (std::size_t p = 0; p < line.points.size(); ++p) {
        os << (p == 0 ? "M " : " L ") << svg_number(frame.x(line.points[p].x)) << ' '
           << svg_number(frame.y(line.points[p].y));
      }
      if (line.closed) os << " Z";
      os << "\"/>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

std::string render_field_svg(const ScalarField& field, std::span<const double> levels, const FieldPlotStyle& style) {
  return render_contours_svg(field.grid().geometry(), marching_squares(field, levels), style);
}

std::string render_correlation_svg(const CurveTable& table, SymmetryClass cls, std::span<const std::size_t> curves,
                                   const ChartStyle& style) {
  if (table.empty() || !table.has_class(cls) || curves.empty()) throw EmptyTableError("nothing to plot");
  const auto& a = table.a_values();
  double ymin = std::numeric_limits<double>::infinity();
  double ymax = -ymin;
  for (std::size_t c : curves) {
    for (const auto& v : table.curve(cls, c)) {
      if (!v) continue;
      ymin = std::min(ymin, *v);
      ymax = std::max(ymax, *v);
    }
  }
  if (!std::isfinite(ymin)) throw EmptyTableError("selected curves hold no values");
  double xmin = a.front();
  double xmax = a.back();
  if (!(xmax > xmin)) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (!(ymax > ymin)) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double left = style.margin + 30.0;  // room for tick labels
  const double right = style.width - style.margin;
  const double top = style.margin;
  const double bottom = style.height - style.margin - 10.0;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (right - left); };
  auto py = [&](double y) { return bottom - (y - ymin) / (ymax - ymin) * (bottom - top); };

  std::ostringstream os;
  open_svg(os, style.width, style.height, style.comment);
  if (!style.title.empty()) {
    os << "<text x=\"" << style.width / 2 << "\" y=\"" << style.margin / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << escape_xml(style.title)
       << "</text>\n";
  }
  os << "<path class=\"axes\" d=\"M " << svg_number(left) << ' ' << svg_number(top) << " L " << svg_number(left)
     << ' ' << svg_number(bottom) << " L " << svg_number(right) << ' ' << svg_number(bottom)
     << "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n";

  const double xstep = nice_step(xmax - xmin);
  for (double t = std::ceil(xmin / xstep - 1e-9) * xstep; t <= xmax + 1e-9 * xstep; t += xstep) {
    os << "<line class=\"tick\" x1=\"" << svg_number(px(t)) << "\" y1=\"" << svg_number(bottom) << "\" x2=\""
       << svg_number(px(t)) << "\" y2=\"" << svg_number(bottom + 5) << "\" stroke=\"#000000\"/>\n";
    os << "<text x=\"" << svg_number(px(t)) << "\" y=\"" << svg_number(bottom + 18)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << svg_number(t) << "</text>\n";
  }
  const double ystep = nice_step(ymax - ymin);
  for (double t = std::ceil(ymin / ystep - 1e-9) * ystep; t <= ymax + 1e-9 * ystep; t += ystep) {
    os << "<line class=\"tick\" x1=\"" << svg_number(left - 5) << "\" y1=\"" << svg_number(py(t)) << "\" x2=\""
       << svg_number(left) << "\" y2=\"" << svg_number(py(t)) << "\" stroke=\"#000000\"/>\n";
    os << "<text x=\"" << svg_number(left - 8) << "\" y=\"" << svg_number(py(t) + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << svg_number(t) << "</text>\n";
  }
  os << "<text x=\"" << svg_number(0.5 * (left + right)) << "\" y=\"" << svg_number(style.height - 8.0)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">a / r</text>\n";

  static constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                             "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  std::size_t colour = 0;
  for (std::size_t c : curves) {
    const auto values = table.curve(cls, c);
    const char* stroke = kPalette[colour++ % std::size(kPalette)];
    std::ostringstream d;
    std::vector<std::size_t> isolated;
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (!values[j]) continue;
      const bool prev = j > 0 && values[j - 1].has_value();
      const bool next = j + 1 < values.size() && values[j + 1].has_value();
      if (!prev && !next) isolated.push_back(j);
      d << (prev ? " L " : (d.tellp() > 0 ? " M " : "M ")) << svg_number(px(a[j])) << ' '
        << svg_number(py(*values[j]));
    }
    os << "<g class=\"curve\" data-curve=\"" << c + 1 << "\">\n";
    os << "<path d=\"" << d.str() << "\" fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\"/>\n";
    for (std::size_t j : isolated) {
      os << "<circle cx=\"" << svg_number(px(a[j])) << "\" cy=\"" << svg_number(py(*values[j]))
         << "\" r=\"3\" fill=\"" << stroke << "\"/>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace stadium
