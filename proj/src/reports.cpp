#include "applause/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>

#include "applause/error.hpp"

namespace applause {

std::string format_fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  // Avoid "-0.000000" so reruns on either side of zero stay byte-identical.
  if (std::string_view(buf) == "-0.000000") return "0.000000";
  return buf;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

void write_coefficients_csv(std::ostream& out, const LassoModel& model,
                            const FitDiagnostics& diagnostics) {
  auto find = [](const std::vector<FeatureStat>& stats, const std::string& name)
      -> const FeatureStat* {
    for (const FeatureStat& s : stats) {
      if (s.feature == name) return &s;
    }
    return nullptr;
  };
  out << "feature,beta_standardized,p_value,q_value,importance_weight\n";
  for (std::size_t j = 0; j < model.feature_names.size(); ++j) {
    const std::string& name = model.feature_names[j];
    out << csv_field(name) << ','
        << format_fixed(model.std_coefficients[static_cast<Eigen::Index>(j)]) << ',';
    const FeatureStat* p = find(diagnostics.p_values, name);
    const FeatureStat* q = find(diagnostics.q_values, name);
    const FeatureStat* w = find(diagnostics.importance, name);
    out << (p ? format_fixed(p->value) : "") << ',' << (q ? format_fixed(q->value) : "")
        << ',' << format_fixed(w ? w->value : 0.0) << '\n';
  }
}

void write_ablation_csv(std::ostream& out, const std::map<Family, Metrics>& per_family,
                        const Metrics& overall) {
  out << "family,precision,recall,accuracy,f1,tp,fp,fn,tn,majority_baseline\n";
  auto row = [&](std::string_view name, const Metrics& m) {
    out << name << ',' << format_fixed(m.precision) << ',' << format_fixed(m.recall)
        << ',' << format_fixed(m.accuracy) << ',' << format_fixed(m.f1) << ','
        << m.confusion.tp << ',' << m.confusion.fp << ',' << m.confusion.fn << ','
        << m.confusion.tn << ',' << format_fixed(m.majority_baseline()) << '\n';
  };
  for (Family f : kAllFamilies) {
    if (const auto it = per_family.find(f); it != per_family.end()) {
      row(to_string(f), it->second);
    }
  }
  row("overall", overall);
}

void write_window_csv(std::ostream& out, const std::vector<WindowPoint>& curve) {
  out << "window_size,accuracy,examples\n";
  for (const WindowPoint& p : curve) {
    out << p.window_size << ',' << (p.accuracy ? format_fixed(*p.accuracy) : "") << ','
        << p.examples << '\n';
  }
}

void write_importance_csv(std::ostream& out, const FitDiagnostics& diagnostics) {
  std::vector<FeatureStat> rows = diagnostics.importance;
  std::stable_sort(rows.begin(), rows.end(), [](const FeatureStat& a, const FeatureStat& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.feature < b.feature;
  });
  // Largest-remainder rounding to micro-units: the printed 6-decimal weights
  // sum to exactly 1.
  constexpr std::int64_t kUnits = 1000000;
  std::vector<std::int64_t> units(rows.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double scaled = rows[i].value * static_cast<double>(kUnits);
    units[i] = static_cast<std::int64_t>(std::floor(scaled));
    assigned += units[i];
    remainders.emplace_back(scaled - static_cast<double>(units[i]), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; !rows.empty() && assigned < kUnits; ++k, ++assigned) {
    ++units[remainders[k % remainders.size()].second];
  }
  out << "feature,weight\n";
  char buf[32];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%lld.%06lld",
                  static_cast<long long>(units[i] / kUnits),
                  static_cast<long long>(units[i] % kUnits));
    out << csv_field(rows[i].feature) << ',' << buf << '\n';
  }
}

void emit_reports(const EvalReport& report, const LassoModel& model,
                  const FitDiagnostics& diagnostics,
                  const std::filesystem::path& out_dir) {
  {
    auto out = open_output(out_dir / "coefficients.csv");
    write_coefficients_csv(out, model, diagnostics);
  }
  {
    auto out = open_output(out_dir / "ablation.csv");
    write_ablation_csv(out, report.per_family, report.overall);
  }
  {
    auto out = open_output(out_dir / "window_curve.csv");
    write_window_csv(out, report.window_curve);
  }
  {
    auto out = open_output(out_dir / "importance.csv");
    write_importance_csv(out, diagnostics);
  }
}

}  // namespace applause
