#include "eigentraj/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "eigentraj/dataset.hpp"
#include "eigentraj/errors.hpp"
#include "eigentraj/persistence.hpp"

namespace eigentraj::plot {
namespace {

constexpr double kPanel = 240.0;
constexpr double kMargin = 20.0;

struct Box {
  double left, top, width, height;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

struct Range {
  double lo, hi;
  double span() const { return hi - lo; }
};

// Pads degenerate ranges so constant series still render as a centered line.
Range range_of(const std::vector<double>& v) {
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  Range r{*lo, *hi};
  if (r.span() < 1e-12) {
    r.lo -= 0.5;
    r.hi += 0.5;
  }
  return r;
}

void polyline(std::ostringstream& out, const Box& box, const std::vector<double>& xs, const std::vector<double>& ys,
              const Range& rx, const Range& ry, bool equal_aspect) {
  double sx = box.width / rx.span();
  double sy = box.height / ry.span();
  double ox = 0.0, oy = 0.0;
  if (equal_aspect) {
    const double s = std::min(sx, sy);
    ox = (box.width - s * rx.span()) / 2.0;
    oy = (box.height - s * ry.span()) / 2.0;
    sx = sy = s;
  }
  out << "  <rect x=\"" << num(box.left) << "\" y=\"" << num(box.top) << "\" width=\"" << num(box.width)
      << "\" height=\"" << num(box.height) << "\" fill=\"none\" stroke=\"#999\"/>\n";
  out << "  <polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double px = box.left + ox + (xs[i] - rx.lo) * sx;
    const double py = box.top + box.height - oy - (ys[i] - ry.lo) * sy;
    out << (i ? " " : "") << num(px) << ',' << num(py);
  }
  out << "\"/>\n";
  const double px = box.left + ox + (xs.front() - rx.lo) * sx;
  const double py = box.top + box.height - oy - (ys.front() - ry.lo) * sy;
  out << "  <circle cx=\"" << num(px) << "\" cy=\"" << num(py) << "\" r=\"3\" fill=\"#1f5fa8\"/>\n";
}

void label(std::ostringstream& out, const Box& box, const std::string& text) {
  out << "  <text x=\"" << num(box.left + 4.0) << "\" y=\"" << num(box.top + 14.0)
      << "\" font-family=\"monospace\" font-size=\"12\">" << text << "</text>\n";
}

}  // namespace

std::string basis_svg(const etspace::ETBasis& basis, std::size_t i) {
  if (i >= basis.rank()) throw Error(ErrorKind::argument, "basis vector index out of range");
  const Path path = dataset::unflatten(basis.vector(i), basis.layout());
  std::vector<double> xs, ys, ts;
  for (std::size_t t = 0; t < path.size(); ++t) {
    xs.push_back(path[t].x);
    ys.push_back(path[t].y);
    ts.push_back(static_cast<double>(t));
  }
  const Range rx = range_of(xs), ry = range_of(ys), rt = range_of(ts);
  // x and y traces share one value axis so their magnitudes compare visually
  std::vector<double> both = xs;
  both.insert(both.end(), ys.begin(), ys.end());
  const Range rv = range_of(both);

  const double width = kPanel + 2.0 * kMargin;
  const double height = 3.0 * kPanel / 2.0 + 4.0 * kMargin;
  const Box top{kMargin, kMargin, kPanel, kPanel * 0.75};
  const Box mid{kMargin, top.top + top.height + kMargin, kPanel, kPanel * 0.375};
  const Box bottom{kMargin, mid.top + mid.height + kMargin, kPanel, kPanel * 0.375};

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
      << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n";
  const std::string name = "u" + std::to_string(i + 1);
  polyline(out, top, xs, ys, rx, ry, true);
  label(out, top, name + " path, sigma " + num(i < basis.singular_values().size() ? basis.singular_values()[i] : 0.0));
  polyline(out, mid, ts, xs, rt, rv, false);
  label(out, mid, name + " x(t)");
  polyline(out, bottom, ts, ys, rt, rv, false);
  label(out, bottom, name + " y(t)");
  out << "</svg>\n";
  return out.str();
}

std::vector<std::filesystem::path> write_basis_plots(const etspace::ETBasis& basis, const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  for (std::size_t i = 0; i < basis.rank(); ++i) {
    const auto path =
        dir / ("basis_" + std::string(to_string(basis.segment())) + "_u" + std::to_string(i + 1) + ".svg");
    persistence::write_text(path, basis_svg(basis, i));
    written.push_back(path);
  }
  return written;
}

}  // namespace eigentraj::plot
