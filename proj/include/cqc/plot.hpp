#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cqc {

enum class PlotKind { kPhase, kAccuracyBars, kTrainingCurve };

/// "phase", "accuracy-bars" or "training-curve".
PlotKind parse_plot_kind(std::string_view name);

/// Header each plot kind expects.
///   phase:                 ratio,n1,n2,positives,samples,frequency
///   accuracy-bars,
///   training-curve:        dataset,step,accuracy,loss,n
std::string_view plot_schema(PlotKind kind);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Plain comma-separated text without quoting. Throws DataError when empty or
/// ragged.
CsvTable parse_csv(std::string_view text);

/// Self-contained SVG. Every plotted value is also written verbatim into the
/// element's data-* attributes. Throws DataError when the table does not
/// match the kind's schema or has no rows.
std::string render_svg(PlotKind kind, const CsvTable& table);

}  // namespace cqc
