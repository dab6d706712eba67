#include "hypermcf/harness/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hypermcf/errors.hpp"

namespace hypermcf::harness {

namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

void atomic_write(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw Error("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, path);
}

namespace {

constexpr std::size_t kColumns = std::size(kTraceColumns);

std::array<double, kColumns> fields(const TraceRow& r) {
  return {r.t,           r.H_min,           r.H_max,          r.h_sq_max, r.ho_sq_max, r.pinch_margin_min,
          r.f_sigma_max, r.thm41_ratio_max, r.grad_ratio_max, r.diam,     r.x0_max,    r.x0_bound};
}

TraceRow from_fields(const std::vector<double>& f) {
  TraceRow r;
  r.t = f[0];
  r.H_min = f[1];
  r.H_max = f[2];
  r.h_sq_max = f[3];
  r.ho_sq_max = f[4];
  r.pinch_margin_min = f[5];
  r.f_sigma_max = f[6];
  r.thm41_ratio_max = f[7];
  r.grad_ratio_max = f[8];
  r.diam = f[9];
  r.x0_max = f[10];
  r.x0_bound = f[11];
  return r;
}

double parse_field(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw ConfigError("bad CSV number '" + s + "'");
  return v;
}

}  // namespace

std::string trace_csv(const FlowTrace& trace) {
  std::string out;
  for (std::size_t i = 0; i < kColumns; ++i) {
    if (i) out += ',';
    out += kTraceColumns[i];
  }
  out += '\n';
  for (const auto& row : trace.rows()) {
    const auto f = fields(row);
    for (std::size_t i = 0; i < kColumns; ++i) {
      if (i) out += ',';
      out += format_double(f[i]);
    }
    out += '\n';
  }
  return out;
}

std::vector<TraceRow> read_trace_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read trace '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  std::string expected;
  for (std::size_t i = 0; i < kColumns; ++i) expected += (i ? "," : "") + std::string(kTraceColumns[i]);
  if (line != expected) throw ConfigError("trace '" + path.string() + "' has an unexpected header");
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> f;
    std::stringstream ss(line);
    std::string cell;
    try {
      while (std::getline(ss, cell, ',')) f.push_back(parse_field(cell));
    } catch (const std::logic_error&) {
      throw ConfigError("trace '" + path.string() + "' has a malformed row");
    }
    if (f.size() != kColumns) throw ConfigError("trace '" + path.string() + "' has a short row");
    rows.push_back(from_fields(f));
  }
  return rows;
}

std::string svg_polyline_chart(const std::string& title, const std::string& x_label, const std::vector<double>& x,
                               const std::vector<double>& y) {
  constexpr double W = 640, H = 400, left = 80, right = 20, top = 40, bottom = 50;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
    xmin = std::min(xmin, x[i]);
    xmax = std::max(xmax, x[i]);
    ymin = std::min(ymin, y[i]);
    ymax = std::max(ymax, y[i]);
  }
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
     << title << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << W - left - right << "\" height=\""
     << H - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (xmin <= xmax) {
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) {
      ymax += 0.5 * std::max(1.0, std::abs(ymin));
      ymin -= 0.5 * std::max(1.0, std::abs(ymin));
    }
    auto px = [&](double v) { return left + (v - xmin) / (xmax - xmin) * (W - left - right); };
    auto py = [&](double v) { return H - bottom - (v - ymin) / (ymax - ymin) * (H - top - bottom); };
    os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
      if (!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", first ? "" : " ", px(x[i]), py(y[i]));
      os << buf;
      first = false;
    }
    os << "\"/>\n";
    auto label = [&](double v) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4g", v);
      return std::string(buf);
    };
    os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<text x=\"" << left << "\" y=\"" << H - bottom + 16 << "\">" << label(xmin) << "</text>\n";
    os << "<text x=\"" << W - right << "\" y=\"" << H - bottom + 16 << "\" text-anchor=\"end\">" << label(xmax)
       << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << H - bottom << "\" text-anchor=\"end\">" << label(ymin)
       << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << top + 10 << "\" text-anchor=\"end\">" << label(ymax)
       << "</text>\n";
    os << "</g>\n";
  }
  os << "<text x=\"" << (W + left - right) / 2 << "\" y=\"" << H - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

void write_trace_plots(const fs::path& dir, const std::vector<TraceRow>& rows) {
  std::vector<double> t;
  std::vector<std::vector<double>> cols(kColumns);
  for (const auto& r : rows) {
    const auto f = fields(r);
    for (std::size_t i = 0; i < kColumns; ++i) cols[i].push_back(f[i]);
  }
  for (std::size_t i = 1; i < kColumns; ++i) {
    atomic_write(dir / (std::string(kTraceColumns[i]) + ".svg"),
                 svg_polyline_chart(kTraceColumns[i], "t", cols[0], cols[i]));
  }
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace hypermcf::harness
