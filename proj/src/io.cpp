#include "stringlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace stringlab {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

PiecewiseAffineCurve read_curve(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open curve file: " + path);
  std::vector<double> ts;
  std::vector<Vec3> us;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    double t, x, y, z;
    if (row >> t >> x >> y >> z) {
      ts.push_back(t);
      us.push_back({x, y, z});
    }
  }
  return PiecewiseAffineCurve(std::move(ts), std::move(us));
}

void write_curve(const PiecewiseAffineCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write curve file: " + path);
  for (std::size_t i = 0; i < curve.t.size(); ++i)
    out << fmt17(curve.t[i]) << ' ' << fmt17(curve.u[i].x) << ' ' << fmt17(curve.u[i].y)
        << ' ' << fmt17(curve.u[i].z) << '\n';
}

void write_curve_samples(const SmoothCurve& curve, int n, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write samples file: " + path);
  SampledCurve s = curve.sample(n);
  for (std::size_t i = 0; i < s.t.size(); ++i)
    out << fmt17(s.t[i]) << ' ' << fmt17(s.u[i].x) << ' ' << fmt17(s.u[i].y) << ' '
        << fmt17(s.u[i].z) << ' ' << fmt17(s.du[i].x) << ' ' << fmt17(s.du[i].y) << ' '
        << fmt17(s.du[i].z) << '\n';
}

void write_profile_csv(const RadialEnvelope& env, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write profile csv: " + path);
  out << "r,f,fc,is_contact\n";
  for (std::size_t i = 0; i < env.r.size(); ++i) {
    bool contact = env.fc[i] < env.f[i] - 1e-9 * (1 + std::abs(env.f[i]));
    out << fmt17(env.r[i]) << ',' << fmt17(env.f[i]) << ',' << fmt17(env.fc[i]) << ','
        << (contact ? 1 : 0) << '\n';
  }
}

void write_records_csv(const std::vector<ConvergenceRecord>& records,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write records csv: " + path);
  out << "eps,energy,limit,det_fd,phi_c1,seconds,teeth,delta,eta,status\n";
  for (const auto& r : records) {
    out << fmt17(r.eps) << ',' << (r.infinite ? "inf" : fmt17(r.energy)) << ','
        << fmt17(r.limit) << ',' << fmt17(r.det_fd) << ',' << fmt17(r.phi_c1) << ','
        << fmt17(r.seconds) << ',' << r.teeth << ',' << fmt17(r.delta) << ','
        << fmt17(r.eta) << ',' << r.status << '\n';
  }
}

std::vector<ConvergenceRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open records csv: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("records csv empty: " + path);
  std::vector<ConvergenceRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() < 10) continue;
    ConvergenceRecord r;
    r.eps = std::stod(cells[0]);
    if (cells[1] == "inf") {
      r.infinite = true;
      r.energy = kInfiniteEnergy;
    } else {
      r.energy = std::stod(cells[1]);
    }
    r.limit = std::stod(cells[2]);
    r.det_fd = std::stod(cells[3]);
    r.phi_c1 = std::stod(cells[4]);
    r.seconds = std::stod(cells[5]);
    r.teeth = std::stoi(cells[6]);
    r.delta = std::stod(cells[7]);
    r.eta = std::stod(cells[8]);
    r.status = cells[9];
    records.push_back(std::move(r));
  }
  return records;
}

void write_field_dump(const TubeField& field, const BoxGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write field dump: " + path);
  out << "x1 x2 x3 u1 u2 u3 det\n";
  for (int i1 = 0; i1 < grid.n1; ++i1)
    for (int i2 = 0; i2 < grid.n2; ++i2)
      for (int i3 = 0; i3 < grid.n3; ++i3) {
        Vec3 x{grid.x1(i1), grid.x2(i2), grid.x3(i3)};
        Vec3 u = field.value(x);
        double d = field.det_rescaled(x);
        out << fmt17(x.x) << ' ' << fmt17(x.y) << ' ' << fmt17(x.z) << ' ' << fmt17(u.x)
            << ' ' << fmt17(u.y) << ' ' << fmt17(u.z) << ' ' << fmt17(d) << '\n';
      }
}

void write_loglog_svg(const std::vector<PlotSeries>& series, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write svg: " + path);
  const int width = 640, height = 480, margin = 60;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0) || !(s.y[i] > 0)) continue;
      xmin = std::min(xmin, std::log10(s.x[i]));
      xmax = std::max(xmax, std::log10(s.x[i]));
      ymin = std::min(ymin, std::log10(s.y[i]));
      ymax = std::max(ymax, std::log10(s.y[i]));
    }
  if (xmin > xmax || ymin > ymax) {
    xmin = ymin = 0;
    xmax = ymax = 1;
  }
  if (xmax - xmin < 1e-12) xmax = xmin + 1;
  if (ymax - ymin < 1e-12) ymax = ymin + 1;
  auto px = [&](double lx) {
    return margin + (lx - xmin) / (xmax - xmin) * (width - 2 * margin);
  };
  auto py = [&](double ly) {
    return height - margin - (ly - ymin) / (ymax - ymin) * (height - 2 * margin);
  };

  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
      << height << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<line x1='" << margin << "' y1='" << height - margin << "' x2='" << width - margin
      << "' y2='" << height - margin << "' stroke='black'/>\n";
  out << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin << "' y2='"
      << height - margin << "' stroke='black'/>\n";
  for (int t = int(std::ceil(xmin)); t <= int(std::floor(xmax)); ++t) {
    out << "<text x='" << px(t) << "' y='" << height - margin + 18
        << "' font-size='11' text-anchor='middle'>1e" << t << "</text>\n";
  }
  for (int t = int(std::ceil(ymin)); t <= int(std::floor(ymax)); ++t) {
    out << "<text x='" << margin - 6 << "' y='" << py(t) + 4
        << "' font-size='11' text-anchor='end'>1e" << t << "</text>\n";
  }
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  int ci = 0;
  for (const auto& s : series) {
    std::ostringstream pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0) || !(s.y[i] > 0)) continue;
      pts << px(std::log10(s.x[i])) << ',' << py(std::log10(s.y[i])) << ' ';
    }
    const char* color = colors[ci % 5];
    out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='"
        << pts.str() << "'/>\n";
    out << "<text x='" << width - margin + 4 << "' y='" << margin + 16 * ci
        << "' font-size='11' fill='" << color << "'>" << s.label << "</text>\n";
    ++ci;
  }
  out << "</svg>\n";
}

}  // namespace stringlab
