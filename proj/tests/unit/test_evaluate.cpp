#include <fstream>
#include <numeric>
#include <sstream>

#include "doctest.h"

#include "applause/error.hpp"
#include "applause/evaluate.hpp"
#include "applause/features.hpp"
#include "applause/reports.hpp"
#include "applause/rng.hpp"
#include "synthetic.hpp"

using namespace applause;
using Eigen::VectorXd;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

struct Planted {
  LexiconBundle bundle;
  FeatureRegistry registry;
  FeatureMatrix features;
};

Planted planted(int talks, double rate, std::uint64_t seed) {
  Planted out{testing::fixture_bundle(), {}, {}};
  out.registry = FeatureRegistry::for_bundle(out.bundle);
  testing::SyntheticOptions o;
  o.talks = talks;
  o.signal = testing::Signal::kGratitude;
  o.signal_rate = rate;
  o.seed = seed;
  const auto examples = build_examples(testing::generate_chunks(o), 1, seed);
  out.features = extract_examples(examples, out.bundle, out.registry);
  return out;
}

}  // namespace

TEST_CASE("metric arithmetic") {
  const Metrics m = Metrics::from_confusion({2, 1, 1, 2});
  CHECK(m.precision == doctest::Approx(2.0 / 3));
  CHECK(m.recall == doctest::Approx(2.0 / 3));
  CHECK(m.accuracy == doctest::Approx(2.0 / 3));
  CHECK(m.f1 == doctest::Approx(2.0 / 3));

  // Always positive on balanced data.
  const Metrics all_pos = Metrics::from_confusion({5, 5, 0, 0});
  CHECK(all_pos.accuracy == 0.5);
  CHECK(all_pos.recall == 1.0);
  CHECK(all_pos.majority_baseline() == 0.5);

  // No positive predictions: precision and F1 are 0.
  const Metrics none = Metrics::from_confusion({0, 0, 5, 5});
  CHECK(none.precision == 0);
  CHECK(none.f1 == 0);
  CHECK(Metrics::from_confusion({}).accuracy == 0);

  CHECK(Metrics::from_confusion({3, 0, 3, 4}).majority_baseline() == doctest::Approx(0.6));

  VectorXd labels(4), probs(4);
  labels << 1, 1, 0, 0;
  probs << 0.5, 0.2, 0.7, 0.1;
  const Confusion c = tally(labels, probs);
  CHECK(c.tp == 1);
  CHECK(c.fn == 1);
  CHECK(c.fp == 1);
  CHECK(c.tn == 1);
}

TEST_CASE("metrics recompute from pooled confusion") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    Confusion c{static_cast<std::int64_t>(uniform_below(rng, 20)), static_cast<std::int64_t>(uniform_below(rng, 20)),
                static_cast<std::int64_t>(uniform_below(rng, 20)), static_cast<std::int64_t>(uniform_below(rng, 20))};
    const Metrics m = Metrics::from_confusion(c);
    for (double v : {m.precision, m.recall, m.accuracy, m.f1}) {
      CHECK(v >= 0);
      CHECK(v <= 1);
    }
    if (c.tp + c.fp > 0) CHECK(m.precision == doctest::Approx(double(c.tp) / (c.tp + c.fp)));
    if (m.precision + m.recall > 0) {
      CHECK(m.f1 == doctest::Approx(2 * m.precision * m.recall / (m.precision + m.recall)));
    }
  }
}

TEST_CASE("planted gratitude signal is learned") {
  const Planted p = planted(30, 1.0, 3);
  const Metrics m = kfold_cv_metrics(p.features.design);
  CHECK(m.confusion.total() == p.features.design.n());
  CHECK(m.accuracy > 0.95);
  CHECK(m.majority_baseline() == 0.5);

  EvalOptions nested;
  nested.nested = true;
  nested.cv.grid_size = 20;
  CHECK(kfold_cv_metrics(p.features.design, nested).accuracy > 0.95);

  EvalOptions fixed;
  fixed.lambda = 0.01;
  const Metrics a = kfold_cv_metrics(p.features.design, fixed);
  const Metrics b = kfold_cv_metrics(p.features.design, fixed);
  CHECK(a.confusion.tp == b.confusion.tp);
  CHECK(a.confusion.tn == b.confusion.tn);
}

TEST_CASE("family ablation") {
  const Planted p = planted(30, 1.0, 5);
  EvalOptions opts;
  opts.cv.grid_size = 30;
  const AblationResult r = family_ablation(p.features.design, p.registry, opts);
  CHECK(r.per_family.size() == kFamilyCount);
  CHECK(r.per_family.at(Family::kGratitude).accuracy > 0.95);
  CHECK(r.overall.accuracy > 0.95);
  for (const auto& [family, m] : r.per_family) {
    CHECK(m.confusion.total() == p.features.design.n());
  }

  // The generator never emits applause words, so that family is constant:
  // the null model predicts one class for every row.
  const Metrics& constant = r.per_family.at(Family::kApplauseSeeking);
  CHECK(constant.accuracy == doctest::Approx(0.5).epsilon(0.1));

  // Union of all family columns is the overall design.
  std::vector<std::size_t> all;
  for (Family f : kAllFamilies) {
    for (auto c : p.registry.columns_of(f)) all.push_back(c);
  }
  std::sort(all.begin(), all.end());
  const Metrics union_run = kfold_cv_metrics(p.features.design.select_columns(all), opts);
  CHECK(union_run.confusion.tp == r.overall.confusion.tp);
  CHECK(union_run.confusion.fp == r.overall.confusion.fp);
  CHECK(union_run.confusion.fn == r.overall.confusion.fn);
  CHECK(union_run.confusion.tn == r.overall.confusion.tn);
}

TEST_CASE("leave-one-out metrics do not depend on row order") {
  const Planted p = planted(6, 0.7, 9);
  const auto& d = p.features.design;
  EvalOptions opts;
  opts.folds = static_cast<int>(d.n());
  opts.lambda = 0.02;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d.n()));
  std::iota(order.begin(), order.end(), 0);
  std::reverse(order.begin(), order.end());
  const Metrics a = kfold_cv_metrics(d, opts);
  const Metrics b = kfold_cv_metrics(d.select_rows(order), opts);
  CHECK(a.confusion.tp == b.confusion.tp);
  CHECK(a.confusion.fp == b.confusion.fp);
  CHECK(a.confusion.fn == b.confusion.fn);
  CHECK(a.confusion.tn == b.confusion.tn);
}

TEST_CASE("window experiment") {
  const LexiconBundle bundle = testing::fixture_bundle();
  const FeatureRegistry registry = FeatureRegistry::for_bundle(bundle);
  testing::SyntheticOptions o;
  o.talks = 20;
  o.min_chunk = 4;
  o.max_chunk = 12;
  const auto chunks = testing::generate_chunks(o);
  EvalOptions opts;
  opts.cv.grid_size = 20;
  const auto curve = window_experiment(chunks, bundle, registry, 7, opts);
  REQUIRE(curve.size() == 7);
  for (int w = 1; w <= 7; ++w) CHECK(curve[static_cast<std::size_t>(w - 1)].window_size == w);
  // Chunks have at most 12 sentences, so w = 7 has no eligible chunk.
  CHECK_FALSE(curve[6].accuracy.has_value());
  CHECK(curve[6].examples == 0);

  const auto examples = build_examples(chunks, 1, opts.seed);
  CHECK(curve[0].examples == examples.size());
  const Metrics single =
      kfold_cv_metrics(extract_examples(examples, bundle, registry).design, opts);
  REQUIRE(curve[0].accuracy.has_value());
  CHECK(*curve[0].accuracy == single.accuracy);
  for (std::size_t i = 1; i < 6; ++i) CHECK(curve[i].examples <= curve[i - 1].examples);
}

TEST_CASE("report formatting") {
  CHECK(format_fixed(0.5) == "0.500000");
  CHECK(format_fixed(-0.0000001) == "0.000000");
  CHECK(format_fixed(-0.25) == "-0.250000");
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("importance CSV sums to one at six decimals") {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    FitDiagnostics diag;
    const auto k = 1 + uniform_below(rng, 30);
    std::vector<double> raw(k);
    for (auto& v : raw) v = uniform_unit(rng) + 1e-3;
    const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
    for (std::size_t j = 0; j < k; ++j) diag.importance.push_back({"f" + std::to_string(j), raw[j] / total});
    std::ostringstream out;
    write_importance_csv(out, diag);
    const auto rows = lines_of(out.str());
    REQUIRE(rows.size() == k + 1);
    CHECK(rows[0] == "feature,weight");
    long long micro = 0;
    double previous = 2;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const std::string cell = rows[r].substr(rows[r].find(',') + 1);
      const double v = std::stod(cell);
      CHECK(v <= previous + 1e-6);
      previous = v;
      micro += std::llround(v * 1e6);
    }
    CHECK(micro == 1000000);
  }
}

TEST_CASE("emit_reports writes four stable files") {
  const Planted p = planted(20, 1.0, 2);
  EvalOptions opts;
  opts.cv.grid_size = 20;
  TrainOptions train;
  train.cv.grid_size = 20;
  const auto trained = train_lasso_model(p.features.design, train);
  const auto diag = diagnostics(p.features.design, trained.model);
  EvalReport report;
  const auto ablation = family_ablation(p.features.design, p.registry, opts);
  report.per_family = ablation.per_family;
  report.overall = ablation.overall;
  for (int w = 1; w <= 6; ++w) report.window_curve.push_back({w, 0.9 - w * 0.01, 100});
  report.window_curve[5].accuracy.reset();

  const auto dir = std::filesystem::temp_directory_path() / "applause_reports_test";
  std::filesystem::remove_all(dir);
  emit_reports(report, trained.model, diag, dir / "a");
  emit_reports(report, trained.model, diag, dir / "b");
  for (const char* name : {"coefficients.csv", "ablation.csv", "window_curve.csv", "importance.csv"}) {
    CHECK(read_file(dir / "a" / name) == read_file(dir / "b" / name));
    CHECK_FALSE(read_file(dir / "a" / name).empty());
  }
  const auto window = lines_of(read_file(dir / "a" / "window_curve.csv"));
  REQUIRE(window.size() == 7);
  CHECK(window[0] == "window_size,accuracy,examples");
  CHECK(window[1] == "1,0.890000,100");
  CHECK(window[6] == "6,,100");
  const auto ablation_rows = lines_of(read_file(dir / "a" / "ablation.csv"));
  REQUIRE(ablation_rows.size() == 9);
  CHECK(ablation_rows[0] == "family,precision,recall,accuracy,f1,tp,fp,fn,tn,majority_baseline");
  CHECK(ablation_rows[8].rfind("overall,", 0) == 0);
  const auto coef = lines_of(read_file(dir / "a" / "coefficients.csv"));
  CHECK(coef[0] == "feature,beta_standardized,p_value,q_value,importance_weight");
  CHECK(coef.size() == p.registry.size() + 1);

  // Unwritable destination.
  const auto blocker = dir / "file";
  std::ofstream(blocker) << "x";
  try {
    emit_reports(report, trained.model, diag, blocker / "sub");
    FAIL("expected IO error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
  }
  std::filesystem::remove_all(dir);
}
