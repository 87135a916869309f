#pragma once

// Report files: summary.csv, histograms.tsv (plus histograms_p<p>.tsv per
// size), spectrum.svg and manifest.txt.

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "bandspectra/experiments.hpp"

namespace bandspectra {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr int kReportFormat = 1;

void write_summary_csv(const ExperimentReport& report, std::ostream& os);
void write_histogram_tsv(const SpectrumPanel* panel, std::ostream& os);
/// Self-contained SVG overlaying both histograms of `panel`; a placeholder
/// drawing when `panel` is null.
void write_spectrum_svg(const SpectrumPanel* panel, std::ostream& os);
void write_manifest(const ExperimentReport& report, std::ostream& os);

/// Creates `directory` if needed and writes every file. I/O failures throw
/// Error naming the path.
void emit_reports(const ExperimentReport& report, const std::filesystem::path& directory);

}  // namespace bandspectra
