// Command-line driver: sampling, synthetic corpora, profiling, routing and
// cross-validated evaluation.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "arcroute/arcroute.hpp"

namespace fs = std::filesystem;
using namespace arcroute;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitPartial = 3;

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-")
    std::cout << content;
  else
    write_file(out_path, content);
}

void warn_all(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<OriginalUri> read_universe(const std::vector<std::string>& paths) {
  std::vector<OriginalUri> all;
  for (const auto& p : paths) {
    auto u = parse_universe(read_file(p));
    warn_all(u.warnings);
    all.insert(all.end(), u.uris.begin(), u.uris.end());
  }
  return all;
}

// Endpoints come from --config or from a directory of corpus files.
struct Sources {
  std::vector<ArchiveEndpoint> endpoints;
  TldExtractor extract;
  std::size_t concurrency = 8;
  std::optional<std::uint64_t> seed;
  LogPatterns patterns;
};

Sources load_sources(const std::string& config_path, const std::string& corpora_dir,
                     const std::string& suffix_list) {
  Sources s;
  if (!config_path.empty()) {
    auto cfg = load_config(config_path);
    s.endpoints = cfg.endpoints;
    s.extract = cfg.tld_extractor();
    s.concurrency = cfg.concurrency;
    s.seed = cfg.seed;
    s.patterns = cfg.log_patterns;
  } else if (!corpora_dir.empty()) {
    s.endpoints = endpoints_from_corpus_dir(corpora_dir);
  }
  if (!suffix_list.empty()) s.extract = TldExtractor(SuffixList::load(suffix_list));
  return s;
}

std::set<ArchiveId> parse_ids(const std::string& csv) {
  std::set<ArchiveId> ids;
  for (const auto& s : split_commas(csv)) ids.insert(ArchiveId(s));
  return ids;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Web-archive profiling and Memento query routing"};
  app.require_subcommand(1);

  // --- sample -------------------------------------------------------------
  auto* sample = app.add_subcommand("sample", "Build a URI sample");
  sample->require_subcommand(1);
  std::string out;
  std::uint64_t seed = 0;
  std::size_t n = 0;

  auto* s_random = sample->add_subcommand("random", "Uniform sample of unique hosts");
  std::vector<std::string> inputs;
  s_random->add_option("--n", n, "Sample size")->required();
  s_random->add_option("--seed", seed, "RNG seed")->required();
  s_random->add_option("--out,-o", out, "Output file (default stdout)");
  s_random->add_option("universe", inputs, "Universe files")->required()->check(CLI::ExistingFile);

  auto* s_tld = sample->add_subcommand("tld", "Controlled-TLD sample");
  std::string tlds;
  double fraction = 0.02;
  std::size_t floor = 100;
  std::string suffix_list;
  s_tld->add_option("--tlds", tlds, "Comma-separated TLDs")->required();
  s_tld->add_option("--fraction", fraction, "Share of each TLD's hosts")->check(CLI::Range(1e-12, 1.0));
  s_tld->add_option("--floor", floor, "Minimum hosts per TLD")->check(CLI::PositiveNumber);
  s_tld->add_option("--seed", seed, "RNG seed")->required();
  s_tld->add_option("--suffix-list", suffix_list, "Multi-label suffix list")->check(CLI::ExistingFile);
  s_tld->add_option("--out,-o", out, "Output file (default stdout)");
  s_tld->add_option("universe", inputs, "Universe files")->required()->check(CLI::ExistingFile);

  auto* s_lang = sample->add_subcommand("language", "Controlled-language sample");
  std::size_t per_language = 100;
  s_lang->add_option("--per-language", per_language, "Hosts per language");
  s_lang->add_option("--seed", seed, "RNG seed")->required();
  s_lang->add_option("--out,-o", out, "Output file (default stdout)");
  s_lang->add_option("universe", inputs, "uri<TAB>lang files")->required()->check(CLI::ExistingFile);

  auto* s_full = sample->add_subcommand("fulltext", "Ingest fulltext-search result files");
  std::string counts_out;
  s_full->add_option("--out,-o", out, "Output file (default stdout)");
  s_full->add_option("--counts", counts_out, "Per-archive unique-host counts (TSV)");
  s_full->add_option("results", inputs, "Result files")->required()->check(CLI::ExistingFile);

  auto* s_logs = sample->add_subcommand("logs", "Sample hosts from access logs");
  std::string config_path, log_kind = "wayback";
  s_logs->add_option("--n", n, "Sample size")->required();
  s_logs->add_option("--seed", seed, "RNG seed")->required();
  s_logs->add_option("--config", config_path, "Config with log_patterns")->check(CLI::ExistingFile);
  s_logs->add_option("--kind", log_kind, "wayback or aggregator")->check(CLI::IsMember({"wayback", "aggregator"}));
  s_logs->add_option("--out,-o", out, "Output file (default stdout)");
  s_logs->add_option("logs", inputs, "Log files")->required()->check(CLI::ExistingFile);

  // --- synth --------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "Generate synthetic archive corpora");
  std::size_t universe_size = 2000, ft_hits = 150, ft_misses = 30;
  bool collision = false;
  synth->add_option("--seed", seed, "RNG seed")->required();
  synth->add_option("--universe-size", universe_size, "Number of universe hosts");
  synth->add_option("--fulltext-hits", ft_hits, "Fulltext hits per source archive held by it");
  synth->add_option("--fulltext-misses", ft_misses, "Fulltext hits per source archive not held by it");
  synth->add_flag("--collision", collision, "Share uri_m values across archives");
  synth->add_option("--out,-o", out, "Output directory")->required();

  // --- profile ------------------------------------------------------------
  auto* profile = app.add_subcommand("profile", "Look up a sample and build archive profiles");
  std::string corpora_dir, matrices = "coverage,tld,distribution,language,growth,cross";
  bool fulltext_input = false;
  std::size_t jobs = 1;
  profile->add_option("--config", config_path, "Config file")->check(CLI::ExistingFile);
  profile->add_option("--corpora", corpora_dir, "Directory of sim corpora (*.tsv)");
  profile->add_option("--suffix-list", suffix_list, "Multi-label suffix list")->check(CLI::ExistingFile);
  profile->add_flag("--fulltext", fulltext_input, "Inputs are fulltext result files");
  profile->add_option("--matrix", matrices, "Matrices to write");
  profile->add_option("--jobs", jobs, "URIs looked up in parallel")->check(CLI::PositiveNumber);
  profile->add_option("--out,-o", out, "Output directory")->required();
  profile->add_option("inputs", inputs, "Sample file(s)")->required()->check(CLI::ExistingFile);

  // --- route --------------------------------------------------------------
  auto* route = app.add_subcommand("route", "Rank archives for a URI");
  std::string profile_path, uri_arg, exclude, fallback;
  std::size_t k = 3;
  bool show_all = false;
  route->add_option("--profile", profile_path, "Profile JSON")->required()->check(CLI::ExistingFile);
  route->add_option("--k", k, "Archives to choose");
  route->add_option("--exclude", exclude, "Comma-separated archive ids");
  route->add_option("--fallback", fallback, "Comma-separated fallback order");
  route->add_option("--suffix-list", suffix_list, "Multi-label suffix list")->check(CLI::ExistingFile);
  route->add_flag("--all", show_all, "Print the whole ranking, not just the chosen archives");
  route->add_option("uri", uri_arg, "URI to route")->required();

  // --- evaluate -----------------------------------------------------------
  auto* evaluate = app.add_subcommand("evaluate", "Ten-fold cross-validated routing evaluation");
  std::string ks = "3,6,9", sample_path;
  std::optional<std::uint64_t> eval_seed;
  bool no_baseline = false;
  evaluate->add_option("--config", config_path, "Config file")->check(CLI::ExistingFile);
  evaluate->add_option("--corpora", corpora_dir, "Directory of sim corpora (*.tsv)");
  evaluate->add_option("--suffix-list", suffix_list, "Multi-label suffix list")->check(CLI::ExistingFile);
  evaluate->add_option("--k", ks, "Comma-separated k values");
  evaluate->add_option("--exclude", exclude, "Archives removed in the ablation run");
  evaluate->add_option("--seed", eval_seed, "RNG seed")->required();
  evaluate->add_option("--jobs", jobs, "Parallel workers")->check(CLI::PositiveNumber);
  evaluate->add_flag("--no-baseline", no_baseline, "Skip the random-k baseline");
  evaluate->add_option("--out,-o", out, "Output directory")->required();
  evaluate->add_option("sample", sample_path, "Sample file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    SampleSpec spec;
    spec.rng_seed = seed;

    if (*s_random) {
      emit(out, format_sample(sample_random(read_universe(inputs), n, spec)));
      return kExitOk;
    }
    if (*s_tld) {
      spec.tld_fraction = fraction;
      spec.tld_floor = floor;
      auto wanted = split_commas(tlds);
      TldExtractor extract = suffix_list.empty() ? TldExtractor{} : TldExtractor(SuffixList::load(suffix_list));
      auto res = sample_controlled_tld(read_universe(inputs), wanted, spec, extract);
      for (const auto& t : res.unknown_tlds) std::cerr << "warning: UnknownTld: " << t << " not in universe\n";
      for (const auto& [t, q] : res.quotas)
        std::cerr << "tld\t" << t << "\tavailable=" << q.available << "\tselected=" << q.selected << "\n";
      emit(out, format_sample(res.sample));
      return kExitOk;
    }
    if (*s_lang) {
      spec.per_language_count = per_language;
      std::vector<LabeledUri> all;
      for (const auto& p : inputs) {
        auto u = parse_language_universe(read_file(p));
        warn_all(u.warnings);
        all.insert(all.end(), u.uris.begin(), u.uris.end());
      }
      emit(out, format_sample(sample_controlled_language(all, spec)));
      return kExitOk;
    }
    if (*s_full) {
      std::vector<fs::path> paths(inputs.begin(), inputs.end());
      auto res = ingest_fulltext_results(paths);
      warn_all(res.warnings);
      std::string counts = "archive\tunique_hosts\n";
      for (const auto& [id, c] : res.unique_hosts_by_archive()) counts += id.str() + "\t" + std::to_string(c) + "\n";
      if (!counts_out.empty()) write_file(counts_out, counts);
      else std::cerr << counts;
      emit(out, format_sample(res.sample));
      return kExitOk;
    }
    if (*s_logs) {
      LogPatterns patterns = config_path.empty() ? LogPatterns{} : load_config(config_path).log_patterns;
      std::vector<AccessLogRecord> records;
      for (const auto& p : inputs) {
        auto parsed = parse_access_log(read_file(p), patterns, p);
        warn_all(parsed.warnings);
        records.insert(records.end(), parsed.records.begin(), parsed.records.end());
      }
      auto kind = log_kind == "aggregator" ? SourceKind::kAggregatorLog : SourceKind::kWaybackLog;
      emit(out, format_sample(sample_from_logs(records, n, spec, kind)));
      return kExitOk;
    }

    if (*synth) {
      auto sspec = default_synth_spec(universe_size, seed);
      sspec.collision_mode = collision;
      auto corpora = generate_synthetic(sspec);
      fs::path dir(out);
      for (const auto& c : corpora) write_file(dir / "corpora" / (c.archive().str() + ".tsv"), format_corpus(c));
      write_file(dir / "manifest.json", synth_manifest(sspec, corpora).dump(2) + "\n");
      std::string universe, langs;
      for (const auto& e : sspec.universe) {
        universe += e.uri.str() + "\n";
        langs += e.uri.str() + "\t" + e.language + "\n";
      }
      write_file(dir / "universe.txt", universe);
      write_file(dir / "universe_lang.tsv", langs);
      std::vector<ArchiveId> fulltext_sources;
      for (const char* id : {"AIT", "BL", "CAN", "CR", "CZ", "CAT", "PO", "TW", "UK"})
        fulltext_sources.emplace_back(id);
      write_file(dir / "fulltext.tsv",
                 synthesize_fulltext_results(sspec, corpora, fulltext_sources, ft_hits, ft_misses));
      nlohmann::json cfg = {{"seed", seed}, {"concurrency", 4}, {"archives", nlohmann::json::array()}};
      for (const auto& a : sspec.archives)
        cfg["archives"].push_back({{"id", a.id.str()}, {"name", a.name}, {"transport", "sim-corpus"},
                                   {"corpus", "corpora/" + a.id.str() + ".tsv"}});
      write_file(dir / "config.json", cfg.dump(2) + "\n");
      return kExitOk;
    }

    if (*profile) {
      auto src = load_sources(config_path, corpora_dir, suffix_list);
      if (src.endpoints.empty()) throw Error(Errc::kInvalidConfig, "need --config or --corpora");
      std::optional<UriSample> smp;
      std::map<ArchiveId, UriSample> by_source;
      if (fulltext_input) {
        std::vector<fs::path> paths(inputs.begin(), inputs.end());
        auto res = ingest_fulltext_results(paths);
        warn_all(res.warnings);
        smp.emplace(std::move(res.sample));
        by_source = std::move(res.by_source);
      } else {
        std::vector<SampleEntry> entries;
        std::set<OriginalUri> seen;
        for (const auto& p : inputs) {
          auto part = parse_sample(read_file(p), p);
          for (const auto& e : part.entries())
            if (seen.insert(e.uri).second) entries.push_back(e);
        }
        smp.emplace(fs::path(inputs.front()).stem().string(), SourceKind::kDirectoryRandom, std::move(entries));
      }
      if (smp->empty()) throw Error(Errc::kEmptyUniverse, "sample is empty");

      auto table = collect_lookups(*smp, src.endpoints, jobs, src.concurrency);
      auto results = table.flatten();
      auto labels = language_labels(*smp);
      auto profiles = build_profiles(results, labels, src.extract, table.archives);
      fs::path dir(out);
      write_file(dir / "profiles.json", format_profiles(profiles));

      auto want = split_commas(matrices);
      auto wants = [&](const std::string& m) { return std::find(want.begin(), want.end(), m) != want.end(); };
      if (wants("coverage")) {
        auto cov = compute_coverage(*smp, results, table.archives);
        warn_all(cov.warnings);
        write_file(dir / "coverage.tsv", format_coverage(cov));
      }
      if (wants("tld")) write_file(dir / "tld_coverage.tsv", format_tld_coverage(profiles));
      if (wants("distribution"))
        write_file(dir / "tld_distribution.tsv", format_tld_distribution(compute_tld_distribution(results, src.extract)));
      if (wants("language") && labels.size() == smp->size())
        write_file(dir / "language.tsv", format_language_distribution(compute_language_distribution(*smp, results)));
      if (wants("growth")) write_file(dir / "growth.tsv", format_growth(compute_growth(results)));
      if (wants("cross")) {
        if (!by_source.empty())
          write_file(dir / "cross_coverage.tsv",
                     format_cross_coverage(compute_cross_coverage(by_source, results, table.archives)));
        else if (profile->count("--matrix"))
          throw Error(Errc::kInvalidConfig, "--matrix cross needs --fulltext inputs");
      }
      if (auto failures = table.failures()) {
        std::cerr << "warning: " << failures << " lookups timed out or failed\n";
        return kExitPartial;
      }
      return kExitOk;
    }

    if (*route) {
      auto profiles = parse_profiles(read_file(profile_path));
      TldExtractor extract = suffix_list.empty() ? TldExtractor{} : TldExtractor(SuffixList::load(suffix_list));
      RoutingPolicy policy{k, parse_ids(exclude), {}};
      for (const auto& id : split_commas(fallback)) policy.fallback_order.emplace_back(id);
      OriginalUri uri = hostify_lenient(uri_arg);
      auto ranking = rank_archives(uri, profiles, policy, extract);
      if (ranking.fallback)
        std::cout << "# fallback: no profile signal for TLD '" << ranking.tld.value_or("") << "'\n";
      std::cout << format_ranking(ranking, !show_all);
      return kExitOk;
    }

    if (*evaluate) {
      auto src = load_sources(config_path, corpora_dir, suffix_list);
      if (src.endpoints.empty()) throw Error(Errc::kInvalidConfig, "need --config or --corpora");
      auto smp = parse_sample(read_file(sample_path), fs::path(sample_path).stem().string());
      EvaluationOptions opts;
      opts.ks.clear();
      for (const auto& s : split_commas(ks)) opts.ks.push_back(std::stoul(s));
      opts.exclude = parse_ids(exclude);
      opts.seed = *eval_seed;
      opts.random_baseline = !no_baseline;
      opts.jobs = jobs;
      opts.extract = src.extract;
      auto table = collect_lookups(smp, src.endpoints, jobs, src.concurrency);
      auto suite = run_evaluation(smp, table, opts);

      fs::path dir(out);
      write_file(dir / "report.json", format_report(suite, {}));
      if (!opts.exclude.empty()) {
        std::string suffix;
        for (const auto& id : opts.exclude) suffix += "_" + id.str();
        write_file(dir / ("report_excluding" + suffix + ".json"), format_report(suite, opts.exclude));
      }
      write_file(dir / "summary.tsv", format_summary(suite, PolicyKind::kProfile));
      if (opts.random_baseline) write_file(dir / "baseline_summary.tsv", format_summary(suite, PolicyKind::kRandom));
      write_file(dir / "histogram.tsv", format_histogram(suite));
      for (const auto& r : suite.reports)
        std::cerr << policy_kind_name(r.policy) << " k=" << r.k << " excluded=" << excluded_label(r.excluded)
                  << " mean_success=" << format_ratio(r.overall.mean_success)
                  << " complete_fraction=" << format_ratio(r.overall.complete_fraction) << "\n";
      if (suite.lookup_failures) {
        std::cerr << "warning: " << suite.lookup_failures << " lookups timed out or failed\n";
        return kExitPartial;
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
