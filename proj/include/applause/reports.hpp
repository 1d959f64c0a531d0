#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "applause/evaluate.hpp"
#include "applause/model.hpp"

namespace applause {

// Fixed 6-decimal rendering used by every CSV report.
std::string format_fixed(double value);
// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(std::string_view text);

// feature,beta_standardized,p_value,q_value,importance_weight; one row per
// model feature; p/q cells are empty for zero coefficients.
void write_coefficients_csv(std::ostream& out, const LassoModel& model,
                            const FitDiagnostics& diagnostics);
// family,precision,recall,accuracy,f1,tp,fp,fn,tn,majority_baseline; the
// seven families in registry order followed by "overall".
void write_ablation_csv(std::ostream& out, const std::map<Family, Metrics>& per_family,
                        const Metrics& overall);
// window_size,accuracy,examples; accuracy is empty for absent points.
void write_window_csv(std::ostream& out, const std::vector<WindowPoint>& curve);
// feature,weight for non-zero coefficients, descending weight (ties by name).
void write_importance_csv(std::ostream& out, const FitDiagnostics& diagnostics);

// Writes coefficients.csv, ablation.csv, window_curve.csv and importance.csv.
void emit_reports(const EvalReport& report, const LassoModel& model,
                  const FitDiagnostics& diagnostics,
                  const std::filesystem::path& out_dir);

// Opens `path` for writing, creating parent directories; throws kIo on failure.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace applause
