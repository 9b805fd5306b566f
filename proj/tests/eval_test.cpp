#include <gtest/gtest.h>

#include "arcroute/eval.hpp"

using namespace arcroute;

namespace {

UriSample numbered(std::size_t n) {
  std::vector<SampleEntry> entries;
  for (std::size_t i = 0; i < n; ++i) entries.push_back({OriginalUri("http://u" + std::to_string(i) + ".org"), {}, {}, {}});
  return UriSample("n", SourceKind::kDirectoryRandom, entries);
}

struct World {
  UriSample sample;
  std::vector<ArchiveEndpoint> endpoints;
  LookupTable table;
};

World synth_world(std::size_t size, std::uint64_t seed) {
  auto spec = default_synth_spec(size, seed);
  std::vector<ArchiveEndpoint> eps;
  for (auto& c : generate_synthetic(spec)) eps.push_back(ArchiveEndpoint::simulated(std::make_shared<const SimCorpus>(std::move(c))));
  std::vector<SampleEntry> entries;
  for (const auto& u : spec.universe) entries.push_back({u.uri, {}, u.language, {}});
  UriSample sample("synth", SourceKind::kDirectoryRandom, entries);
  auto table = collect_lookups(sample, eps, 4, 2);
  return {std::move(sample), std::move(eps), std::move(table)};
}

const EvaluationReport& find(const EvaluationSuite& s, PolicyKind p, std::size_t k, bool excluded = false) {
  for (const auto& r : s.reports)
    if (r.policy == p && r.k == k && r.excluded.empty() != excluded) return r;
  throw std::runtime_error("no report");
}

}  // namespace

TEST(TenFoldSplit, SizesAndCover) {
  auto a = ten_fold_split(numbered(100), 1);
  for (const auto& f : a.folds) EXPECT_EQ(f.size(), 10u);

  auto b = ten_fold_split(numbered(103), 1);
  std::vector<std::size_t> sizes;
  std::set<OriginalUri> all;
  for (const auto& f : b.folds) {
    sizes.push_back(f.size());
    all.insert(f.begin(), f.end());
  }
  EXPECT_EQ(sizes, (std::vector<std::size_t>{11, 11, 11, 10, 10, 10, 10, 10, 10, 10}));
  EXPECT_EQ(all.size(), 103u);
  EXPECT_EQ(ten_fold_split(numbered(103), 1).folds, b.folds);
  EXPECT_NE(ten_fold_split(numbered(103), 2).folds, b.folds);
}

TEST(TenFoldSplit, TooSmall) {
  try {
    ten_fold_split(numbered(9), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kSampleTooSmall);
  }
}

TEST(FoldProfiles, HeldOutLookupsNeverReachTraining) {
  auto w = synth_world(300, 4);
  auto folds = ten_fold_split(w.sample, 9);
  auto before = fold_profiles(w.table, folds, 3);
  // Rewrite every lookup of fold 3 to a miss; its own profiles must not move.
  auto altered = w.table;
  for (const auto& uri : folds.folds[3])
    for (auto& l : altered.by_uri.at(uri)) {
      l.timemap.reset();
      l.outcome = Outcome::kNotFound;
    }
  EXPECT_EQ(fold_profiles(altered, folds, 3), before);
  EXPECT_NE(fold_profiles(altered, folds, 4), fold_profiles(w.table, folds, 4));

  std::size_t sampled = 0;
  for (const auto& [_, c] : before[0].tld_coverage) sampled += c.sampled;
  EXPECT_EQ(sampled, w.sample.size() - folds.folds[3].size());
}

TEST(RunEvaluation, SupersetArchiveGivesCompleteTimeMaps) {
  SynthSpec spec;
  spec.rng_seed = 5;
  SynthArchive big{ArchiveId("BIG"), "big", {}, 1.0, {1996, 1}, {2013, 6}, 3.0, std::nullopt};
  SynthArchive small{ArchiveId("SMALL"), "small", {}, 0.3, {2000, 1}, {2013, 6}, 2.0, std::nullopt};
  SynthArchive other{ArchiveId("OTHER"), "other", {}, 0.2, {2000, 1}, {2013, 6}, 2.0, std::nullopt};
  spec.archives = {big, small, other};
  spec.collision_mode = true;  // shared uri_m values, so BIG's holdings cover the rest
  for (int i = 0; i < 200; ++i)
    spec.universe.push_back({OriginalUri("http://s" + std::to_string(i) + (i % 2 ? ".org" : ".uk")), i % 2 ? "org" : "uk", "en"});
  std::vector<ArchiveEndpoint> eps;
  auto corpora = generate_synthetic(spec);
  // Give BIG every uri_m the others hold.
  std::vector<SimRecord> merged;
  std::set<std::string> seen;
  for (const auto& c : corpora)
    for (const auto& r : c.records())
      if (seen.insert(r.uri_m).second) merged.push_back(r);
  eps.push_back(ArchiveEndpoint::simulated(std::make_shared<const SimCorpus>(ArchiveId("BIG"), merged)));
  eps.push_back(ArchiveEndpoint::simulated(std::make_shared<const SimCorpus>(corpora[1])));
  eps.push_back(ArchiveEndpoint::simulated(std::make_shared<const SimCorpus>(corpora[2])));
  std::vector<SampleEntry> entries;
  for (const auto& u : spec.universe) entries.push_back({u.uri, {}, {}, {}});
  UriSample sample("s", SourceKind::kDirectoryRandom, entries);
  auto table = collect_lookups(sample, eps);
  EvaluationOptions opt;
  opt.ks = {1};
  opt.seed = 3;
  auto suite = run_evaluation(sample, table, opt);
  const auto& r = find(suite, PolicyKind::kProfile, 1);
  EXPECT_EQ(r.overall.complete_fraction, 1.0);
  EXPECT_EQ(r.overall.mean_success, 1.0);
  EXPECT_EQ(r.histogram.back(), 1.0);
}

TEST(RunEvaluation, MonotoneInKAndDeterministic) {
  auto w = synth_world(600, 8);
  EvaluationOptions opt;
  opt.seed = 42;
  opt.jobs = 4;
  opt.exclude = {ArchiveId("IA")};
  auto a = run_evaluation(w.sample, w.table, opt);
  opt.jobs = 1;
  auto b = run_evaluation(w.sample, w.table, opt);
  std::set<ArchiveId> world{a.archives.begin(), a.archives.end()};
  EXPECT_EQ(format_report(a, world), format_report(b, world));
  EXPECT_EQ(format_summary(a), format_summary(b));

  for (bool excluded : {false, true}) {
    const auto& k3 = find(a, PolicyKind::kProfile, 3, excluded);
    const auto& k6 = find(a, PolicyKind::kProfile, 6, excluded);
    const auto& k9 = find(a, PolicyKind::kProfile, 9, excluded);
    ASSERT_EQ(k3.uris.size(), k6.uris.size());
    for (std::size_t i = 0; i < k3.uris.size(); ++i) {
      ASSERT_EQ(k3.uris[i].uri, k6.uris[i].uri);
      EXPECT_LE(k3.uris[i].success.value(), k6.uris[i].success.value());
      EXPECT_LE(k6.uris[i].success.value(), k9.uris[i].success.value());
      EXPECT_TRUE(std::equal(k3.uris[i].chosen.begin(), k3.uris[i].chosen.end(), k6.uris[i].chosen.begin()));
    }
    for (std::size_t f = 0; f < 10; ++f) EXPECT_LE(k3.folds[f].mean_success, k6.folds[f].mean_success);
    for (const auto& u : find(a, PolicyKind::kProfile, 3, true).uris)
      EXPECT_EQ(std::count(u.chosen.begin(), u.chosen.end(), ArchiveId("IA")), 0);
  }

  const auto& k3 = find(a, PolicyKind::kProfile, 3);
  EXPECT_GE(k3.overall.complete_fraction, find(a, PolicyKind::kRandom, 3).overall.complete_fraction);
  // Aggregate mean is the evaluated-weighted mean of fold means.
  double weighted = 0;
  for (const auto& f : k3.folds) weighted += f.mean_success * static_cast<double>(f.evaluated);
  EXPECT_NEAR(weighted / static_cast<double>(k3.overall.evaluated), k3.overall.mean_success, 1e-12);
  double hist = 0;
  for (double h : k3.histogram) hist += h;
  EXPECT_NEAR(hist, 1.0, 1e-12);
  EXPECT_EQ(k3.histogram.size(), 20u);
}

TEST(RunEvaluation, UnusableUrisLeaveTheMeans) {
  auto w = synth_world(200, 2);
  auto table = w.table;
  auto first = w.sample.entries()[0].uri;
  for (auto& l : table.by_uri.at(first)) {
    l.timemap.reset();
    l.outcome = Outcome::kTimeout;
  }
  EvaluationOptions opt;
  opt.ks = {3};
  opt.random_baseline = false;
  auto suite = run_evaluation(w.sample, table, opt);
  ASSERT_EQ(suite.reports.size(), 1u);
  EXPECT_EQ(suite.reports[0].overall.unusable, 1u);
  EXPECT_EQ(suite.reports[0].overall.evaluated, 199u);
  EXPECT_EQ(suite.lookup_failures, 12u);
}

TEST(RunEvaluation, RejectsBadOptions) {
  auto w = synth_world(100, 2);
  EvaluationOptions opt;
  opt.ks = {12};
  opt.exclude = {ArchiveId("IA")};
  EXPECT_THROW(run_evaluation(w.sample, w.table, opt), Error);
  opt.ks = {3};
  opt.exclude = {ArchiveId("NOPE")};
  EXPECT_THROW(run_evaluation(w.sample, w.table, opt), Error);
}
