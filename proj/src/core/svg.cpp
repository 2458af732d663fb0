#include "core/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "core/error.hpp"

namespace fsforge {

namespace {

constexpr double kView = 1000.0;
constexpr double kMargin = 70.0;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string f2(double v) { return fmt("%.2f", v); }

cplx get_cplx(const Json& v) { return cplx(v[0].get<double>(), v[1].get<double>()); }

Polynomial poly_from_report(const Json& rep) {
  if (!rep.contains("problem") || !rep["problem"].contains("coefficients"))
    fail(ErrorCode::invalid_argument, "report carries no problem coefficients");
  std::vector<cplx> c;
  for (const auto& e : rep["problem"]["coefficients"]) c.push_back(get_cplx(e));
  return Polynomial(std::move(c));
}

struct Frame {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1, scale = 1;
  void fit() {
    const double dx = std::max(xmax - xmin, 1e-9);
    const double dy = std::max(ymax - ymin, 1e-9);
    scale = (kView - 2 * kMargin) / std::max(dx, dy);
  }
  void include(cplx z) {
    xmin = std::min(xmin, z.real());
    xmax = std::max(xmax, z.real());
    ymin = std::min(ymin, z.imag());
    ymax = std::max(ymax, z.imag());
  }
  void reset(cplx z) {
    xmin = xmax = z.real();
    ymin = ymax = z.imag();
  }
  double px(double x) const {
    return kView / 2 + scale * (x - (xmin + xmax) / 2);
  }
  double py(double y) const {
    return kView / 2 - scale * (y - (ymin + ymax) / 2);
  }
};

std::string svg_open() {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\">\n"
         "<rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"#ffffff\"/>\n";
}

/* Five-stop dark-blue-to-yellow ramp, t in [0,1]. */
std::string ramp_color(double t) {
  static const double stops[5][3] = {{0.267, 0.005, 0.329},
                                     {0.229, 0.322, 0.545},
                                     {0.128, 0.567, 0.551},
                                     {0.369, 0.789, 0.383},
                                     {0.993, 0.906, 0.144}};
  t = std::clamp(t, 0.0, 1.0);
  const double u = t * 4.0;
  const int k = std::min(3, static_cast<int>(u));
  const double w = u - k;
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                static_cast<int>(std::lround(255 * (stops[k][0] * (1 - w) + stops[k + 1][0] * w))),
                static_cast<int>(std::lround(255 * (stops[k][1] * (1 - w) + stops[k + 1][1] * w))),
                static_cast<int>(std::lround(255 * (stops[k][2] * (1 - w) + stops[k + 1][2] * w))));
  return buf;
}

void heat_panel(std::string& out, const std::vector<double>& vals, int ns, int nt,
                double x0, double y0, double size, bool log_scale,
                const std::string& title) {
  double vmin = std::numeric_limits<double>::infinity(), vmax = 0.0;
  for (double v : vals) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  if (!std::isfinite(vmin)) {
    vmin = 0;
    vmax = 1;
  }
  const double floor_log = 1e-16;
  const double lmin = std::log10(std::max(vmin, floor_log));
  const double lmax = std::log10(std::max(vmax, floor_log * 10));
  const int stride = std::max(1, (std::max(ns, nt) + 95) / 96);
  const int cns = (ns + stride - 1) / stride, cnt = (nt + stride - 1) / stride;
  const double cw = size / cns, ch = size / cnt;
  for (int ci = 0; ci < cns; ++ci)
    for (int cj = 0; cj < cnt; ++cj) {
      const int i = std::min(ns - 1, ci * stride);
      const int j = std::min(nt - 1, cj * stride);
      const double v = vals[static_cast<size_t>(i) * nt + j];
      double t;
      if (log_scale)
        t = lmax > lmin ? (std::log10(std::max(v, floor_log)) - lmin) / (lmax - lmin) : 0.0;
      else
        t = vmax > vmin ? (v - vmin) / (vmax - vmin) : 0.0;
      out += "<rect x=\"" + f2(x0 + ci * cw) + "\" y=\"" + f2(y0 + size - (cj + 1) * ch) +
             "\" width=\"" + f2(cw + 0.5) + "\" height=\"" + f2(ch + 0.5) + "\" fill=\"" +
             ramp_color(t) + "\"/>\n";
    }
  out += "<rect x=\"" + f2(x0) + "\" y=\"" + f2(y0) + "\" width=\"" + f2(size) +
         "\" height=\"" + f2(size) + "\" fill=\"none\" stroke=\"#333333\"/>\n";
  out += "<text x=\"" + f2(x0) + "\" y=\"" + f2(y0 - 28) +
         "\" font-family=\"monospace\" font-size=\"20\">" + title + "</text>\n";
  out += "<text x=\"" + f2(x0) + "\" y=\"" + f2(y0 - 8) +
         "\" font-family=\"monospace\" font-size=\"14\">min=" + fmt("%.3e", vmin) +
         " max=" + fmt("%.3e", vmax) + "</text>\n";
}

}  // namespace

std::string svg_flows(const Json& rep) {
  if (!rep.contains("critical_values") || !rep.contains("pairs"))
    fail(ErrorCode::invalid_argument, "not a flows report");
  const Polynomial F = poly_from_report(rep);

  std::vector<cplx> values;
  for (const auto& v : rep["critical_values"]) values.push_back(get_cplx(v));
  if (values.empty()) fail(ErrorCode::invalid_argument, "flows report has no critical values");

  /* F-images of the flowlines, one polyline per flowline. */
  std::vector<std::vector<cplx>> images;
  for (const auto& p : rep["pairs"])
    for (const auto& l : p["flowlines"]) {
      std::vector<cplx> img;
      for (const auto& s : l["samples"])
        img.push_back(F(cplx(s[1].get<double>(), s[2].get<double>())));
      if (!img.empty()) images.push_back(std::move(img));
    }

  Frame fr;
  fr.reset(values[0]);
  for (cplx v : values) fr.include(v);
  for (const auto& img : images)
    for (cplx w : img) fr.include(w);
  fr.fit();

  std::string out = svg_open();

  if (rep.contains("hull") && rep["hull"].size() >= 3) {
    out += "<polygon points=\"";
    for (const auto& idx : rep["hull"]) {
      const cplx v = values[idx.get<size_t>()];
      out += f2(fr.px(v.real())) + "," + f2(fr.py(v.imag())) + " ";
    }
    out += "\" fill=\"#eef3fa\" stroke=\"#8899bb\" stroke-width=\"1\"/>\n";
  }

  for (const auto& p : rep["pairs"]) {
    const cplx a = values[p["source"].get<size_t>()];
    const cplx b = values[p["target"].get<size_t>()];
    out += "<line x1=\"" + f2(fr.px(a.real())) + "\" y1=\"" + f2(fr.py(a.imag())) +
           "\" x2=\"" + f2(fr.px(b.real())) + "\" y2=\"" + f2(fr.py(b.imag())) +
           "\" stroke=\"#999999\" stroke-width=\"1\" stroke-dasharray=\"6,4\"/>\n";
  }

  for (const auto& img : images) {
    out += "<polyline points=\"";
    for (cplx w : img) out += f2(fr.px(w.real())) + "," + f2(fr.py(w.imag())) + " ";
    out += "\" fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"2\"/>\n";
  }

  for (size_t k = 0; k < values.size(); ++k) {
    const double cx = fr.px(values[k].real()), cy = fr.py(values[k].imag());
    out += "<circle cx=\"" + f2(cx) + "\" cy=\"" + f2(cy) +
           "\" r=\"7\" fill=\"#c43b3b\" stroke=\"#222222\"/>\n";
    out += "<text x=\"" + f2(cx + 12) + "\" y=\"" + f2(cy - 10) +
           "\" font-family=\"monospace\" font-size=\"22\">" + std::to_string(k) + "</text>\n";
  }

  out += "</svg>\n";
  return out;
}

std::string svg_floer(const Json& rep) {
  if (!rep.contains("grid") || !rep.contains("values") || !rep.contains("abs_residual"))
    fail(ErrorCode::invalid_argument, "not a strip-field report");
  const Polynomial F = poly_from_report(rep);
  const int ns = rep["grid"]["ns"].get<int>();
  const int nt = rep["grid"]["nt"].get<int>();
  const auto& vals = rep["values"];
  const auto& resid = rep["abs_residual"];
  if (static_cast<int>(vals.size()) != ns * nt || static_cast<int>(resid.size()) != ns * nt)
    fail(ErrorCode::invalid_argument, "field sizes do not match the grid");

  std::vector<double> absr(static_cast<size_t>(ns) * nt), absv(static_cast<size_t>(ns) * nt);
  for (size_t k = 0; k < absr.size(); ++k) {
    absr[k] = resid[k].get<double>();
    absv[k] = std::abs(F(get_cplx(vals[k])));
  }

  std::string out = svg_open();
  out += "<text x=\"50\" y=\"60\" font-family=\"monospace\" font-size=\"24\">strip field ";
  out += std::to_string(ns) + "x" + std::to_string(nt) + "</text>\n";
  heat_panel(out, absr, ns, nt, 50, 300, 420, true, "|residual| (log scale)");
  heat_panel(out, absv, ns, nt, 530, 300, 420, false, "|F(u)|");
  out += "</svg>\n";
  return out;
}

std::string render_svg(const Json& rep, const std::string& kind) {
  if (kind == "flows") return svg_flows(rep);
  if (kind == "floer") return svg_floer(rep);
  fail(ErrorCode::invalid_argument, "unknown svg kind: " + kind);
}

}  // namespace fsforge
