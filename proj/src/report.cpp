#include "bandspectra/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "bandspectra/error.hpp"
#include "bandspectra/simd/kernels.hpp"

namespace bandspectra {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

const SpectrumPanel* largest_panel(const ExperimentReport& report) {
  return report.spectra.empty() ? nullptr : &report.spectra.back();
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  writer(out);
  out.flush();
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace

void write_summary_csv(const ExperimentReport& report, std::ostream& os) {
  os << "experiment,p,n,b,k,l,sample_value,target_value,se,z,pass\n";
  for (const SummaryRow& r : report.rows) {
    os << r.experiment << ',' << r.p << ',' << r.n << ',' << r.b << ',' << r.k << ',' << r.l << ','
       << num(r.sample_value) << ',' << num(r.target_value) << ',' << num(r.se) << ',' << num(r.z) << ','
       << (r.pass ? (*r.pass ? "true" : "false") : "") << '\n';
  }
}

void write_histogram_tsv(const SpectrumPanel* panel, std::ostream& os) {
  os << "bin_left\tbin_right\tempirical_mass\treference_mass\n";
  if (!panel) return;
  const auto& e = panel->empirical;
  const auto& r = panel->reference;
  os << "-inf\t" << num(e.edges.front()) << '\t' << num(e.underflow) << '\t' << num(r.underflow) << '\n';
  for (std::size_t i = 0; i < e.bins(); ++i) {
    os << num(e.edges[i]) << '\t' << num(e.edges[i + 1]) << '\t' << num(e.mass[i]) << '\t' << num(r.mass[i]) << '\n';
  }
  os << num(e.edges.back()) << "\tinf\t" << num(e.overflow) << '\t' << num(r.overflow) << '\n';
}

void write_spectrum_svg(const SpectrumPanel* panel, std::ostream& os) {
  constexpr double width = 800.0;
  constexpr double height = 420.0;
  constexpr double left = 60.0;
  constexpr double right = 20.0;
  constexpr double top = 40.0;
  constexpr double bottom = 50.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  if (!panel) {
    os << "<text x=\"" << width / 2 << "\" y=\"" << height / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">no histogram for this experiment</text>\n";
    os << "</svg>\n";
    return;
  }
  const auto& e = panel->empirical;
  const auto& r = panel->reference;
  double peak = 0.0;
  for (std::size_t i = 0; i < e.bins(); ++i) peak = std::max({peak, e.mass[i], r.mass[i]});
  if (peak <= 0.0) peak = 1.0;
  const double bar_w = plot_w / static_cast<double>(e.bins());
  auto bar = [&](std::size_t i, double mass, double inset, const char* style) {
    const double h = plot_h * mass / peak;
    // Nonzero mass always shows at least one pixel.
    const double shown = mass > 0.0 ? std::max(h, 1.0) : 0.0;
    os << "<rect x=\"" << num(left + bar_w * static_cast<double>(i) + inset) << "\" y=\""
       << num(top + plot_h - shown) << "\" width=\"" << num(std::max(bar_w - 2.0 * inset, 0.5)) << "\" height=\""
       << num(shown) << "\" " << style << "/>\n";
  };
  for (std::size_t i = 0; i < e.bins(); ++i) bar(i, e.mass[i], 0.0, "fill=\"#4c72b0\" fill-opacity=\"0.6\"");
  for (std::size_t i = 0; i < r.bins(); ++i) {
    bar(i, r.mass[i], bar_w * 0.2, "fill=\"none\" stroke=\"#dd8452\" stroke-width=\"2\"");
  }
  os << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
     << top + plot_h << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
     << "\" stroke=\"black\"/>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<text x=\"" << left << "\" y=\"" << top + plot_h + 18 << "\">" << short_num(e.edges.front()) << "</text>\n";
  os << "<text x=\"" << left + plot_w << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"end\">"
     << short_num(e.edges.back()) << "</text>\n";
  os << "<text x=\"" << left - 6 << "\" y=\"" << top + 4 << "\" text-anchor=\"end\">" << short_num(peak) << "</text>\n";
  os << "<text x=\"" << left - 6 << "\" y=\"" << top + plot_h << "\" text-anchor=\"end\">0</text>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">p=" << panel->size.p
     << " n=" << panel->size.n << " b=" << panel->size.b << "</text>\n";
  os << "<rect x=\"" << left + 10 << "\" y=\"" << top + 6 << "\" width=\"12\" height=\"12\" fill=\"#4c72b0\" "
     << "fill-opacity=\"0.6\"/>\n";
  os << "<text x=\"" << left + 28 << "\" y=\"" << top + 16 << "\">" << panel->empirical_label << "</text>\n";
  os << "<rect x=\"" << left + 10 << "\" y=\"" << top + 24 << "\" width=\"12\" height=\"12\" fill=\"none\" "
     << "stroke=\"#dd8452\" stroke-width=\"2\"/>\n";
  os << "<text x=\"" << left + 28 << "\" y=\"" << top + 34 << "\">" << panel->reference_label << "</text>\n";
  os << "</g>\n</svg>\n";
}

void write_manifest(const ExperimentReport& report, std::ostream& os) {
  os << "bandspectra " << kVersion << "\n";
  os << "report_format " << kReportFormat << "\n";
  os << "experiment " << experiment_name(report.kind) << "\n";
  os << "seed " << report.config.seed << "\n";
  os << "workers " << report.config.workers << "\n";
  os << "simd " << simd::isa_name(simd::active_isa()) << "\n";
  os << "model " << report.config.model.describe() << "\n";
  os << "passed " << (report.passed() ? "true" : "false") << "\n";
  for (const auto& s : report.lln) os << "runtime_seconds p=" << s.size.p << ' ' << short_num(s.seconds) << "\n";
  for (const auto& s : report.clt) os << "runtime_seconds p=" << s.size.p << ' ' << short_num(s.seconds) << "\n";
  for (const auto& note : report.notes) os << "note " << note << "\n";
  os << "config\n" << report.config.to_json() << "\n";
}

void emit_reports(const ExperimentReport& report, const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw Error("cannot create directory '" + directory.string() + "': " + ec.message());
  write_file(directory / "summary.csv", [&](std::ostream& os) { write_summary_csv(report, os); });
  write_file(directory / "histograms.tsv", [&](std::ostream& os) { write_histogram_tsv(largest_panel(report), os); });
  for (const auto& panel : report.spectra) {
    write_file(directory / ("histograms_p" + std::to_string(panel.size.p) + ".tsv"),
               [&](std::ostream& os) { write_histogram_tsv(&panel, os); });
  }
  write_file(directory / "spectrum.svg", [&](std::ostream& os) { write_spectrum_svg(largest_panel(report), os); });
  write_file(directory / "manifest.txt", [&](std::ostream& os) { write_manifest(report, os); });
}

}  // namespace bandspectra
