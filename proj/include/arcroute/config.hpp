#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "arcroute/aggregator.hpp"
#include "arcroute/error.hpp"
#include "arcroute/io.hpp"
#include "arcroute/sampler.hpp"
#include "arcroute/simarchive.hpp"
#include "arcroute/uri.hpp"

namespace arcroute {

/// Run configuration. JSON schema:
///
///   {
///     "archives": [
///       {"id": "IA", "name": "Internet Archive",
///        "transport": "http" | "sim-corpus",
///        "template": "http://host/timemap/link/{uri}",   // required for http
///        "corpus": "corpora/IA.tsv",                     // required for sim-corpus
///        "timeout_ms": 10000,
///        "faults": {"timeout_rate": 0.0, "error_rate": 0.0}}
///     ],
///     "suffix_list": "suffixes.txt",      // optional; enables compound TLDs
///     "seed": 42,                          // optional default for --seed
///     "output_dir": "out",                 // optional
///     "concurrency": 8,                    // archives fetched in parallel per URI
///     "log_patterns": {"memento": "...", "timemap": "..."}   // optional regexes
///   }
///
/// Relative paths resolve against the config file's directory.
struct Config {
  std::vector<ArchiveEndpoint> endpoints;
  std::optional<std::filesystem::path> suffix_list;
  std::optional<std::uint64_t> seed;
  std::filesystem::path output_dir = "out";
  std::size_t concurrency = 8;
  LogPatterns log_patterns;

  TldExtractor tld_extractor() const {
    return suffix_list ? TldExtractor(SuffixList::load(suffix_list->string())) : TldExtractor{};
  }
};

inline Config config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  Config cfg;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  try {
    std::set<ArchiveId> ids;
    for (const auto& a : doc.at("archives")) {
      ArchiveEndpoint ep;
      ep.archive = ArchiveId(a.at("id").get<std::string>());
      if (!ids.insert(ep.archive).second) throw Error(Errc::kInvalidConfig, "duplicate archive id " + ep.archive.str());
      ep.display_name = a.value("name", ep.archive.str());
      ep.timeout = std::chrono::milliseconds(a.value("timeout_ms", 10000));
      const auto transport = a.value("transport", std::string("sim-corpus"));
      if (transport == "http") {
        ep.transport = Transport::kHttp;
        ep.timemap_uri_template = a.at("template").get<std::string>();
      } else if (transport == "sim-corpus") {
        ep.transport = Transport::kSimCorpus;
        auto path = resolve(a.at("corpus").get<std::string>());
        if (!std::filesystem::exists(path))
          throw Error(Errc::kIo, "corpus for " + ep.archive.str() + " not found: " + path.string());
        ep.corpus = std::make_shared<const SimCorpus>(load_corpus(path, ep.archive));
        ep.timemap_uri_template = a.value("template", "sim://" + ep.archive.str() + "/timemap/link/{uri}");
        if (a.contains("faults")) {
          ep.faults.timeout_rate = a["faults"].value("timeout_rate", 0.0);
          ep.faults.error_rate = a["faults"].value("error_rate", 0.0);
          ep.faults.seed = a["faults"].value("seed", std::uint64_t{0});
        }
      } else {
        throw Error(Errc::kInvalidConfig, "unknown transport '" + transport + "'");
      }
      ep.validate();
      cfg.endpoints.push_back(std::move(ep));
    }
    if (doc.contains("suffix_list") && !doc["suffix_list"].is_null()) {
      cfg.suffix_list = resolve(doc["suffix_list"].get<std::string>());
      if (!std::filesystem::exists(*cfg.suffix_list))
        throw Error(Errc::kIo, "suffix list not found: " + cfg.suffix_list->string());
    }
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("output_dir")) cfg.output_dir = resolve(doc["output_dir"].get<std::string>());
    cfg.concurrency = doc.value("concurrency", std::size_t{8});
    if (cfg.concurrency < 1) throw Error(Errc::kInvalidConfig, "concurrency must be >= 1");
    if (doc.contains("log_patterns")) {
      const auto& lp = doc["log_patterns"];
      cfg.log_patterns = LogPatterns::from_strings(
          lp.value("memento", std::string(R"(^/(?:[^/]+/)?\d{14}(?:[a-z]{2}_)?/(.+)$)")),
          lp.value("timemap", std::string(R"(^/(?:[^/]+/)?timemap/(?:link/)?(.+)$)")));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kInvalidConfig, e.what());
  }
  if (cfg.endpoints.empty()) throw Error(Errc::kInvalidConfig, "no archives configured");
  return cfg;
}

inline Config load_config(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::kInvalidConfig, path.string() + ": " + e.what());
  }
  return config_from_json(doc, path.parent_path());
}

/// Sim endpoints for every `*.tsv` corpus in `dir` (archive id = file stem),
/// ordered by id.
inline std::vector<ArchiveEndpoint> endpoints_from_corpus_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(Errc::kIo, "corpus directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".tsv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<ArchiveEndpoint> eps;
  for (const auto& f : files)
    eps.push_back(ArchiveEndpoint::simulated(std::make_shared<const SimCorpus>(load_corpus(f))));
  if (eps.empty()) throw Error(Errc::kIo, "no *.tsv corpora in " + dir.string());
  return eps;
}

}  // namespace arcroute
