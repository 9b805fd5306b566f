#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "arcroute/random.hpp"
#include "arcroute/uri.hpp"

using namespace arcroute;

namespace {

Errc error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return Errc::kIo;
}

}  // namespace

TEST(Hostify, DropsPathQueryPortAndCase) {
  EXPECT_EQ(hostify("http://example.org/a/b.html").str(), "http://example.org");
  EXPECT_EQ(hostify("HTTP://Example.ORG:8080/").str(), "http://example.org");
  EXPECT_EQ(hostify("https://user:pw@www.Example.org./x?y=1#f").str(), "http://www.example.org");
  EXPECT_EQ(hostify("ftp://files.example.net").str(), "http://files.example.net");
}

TEST(Hostify, Errors) {
  EXPECT_EQ(error_of([] { hostify("mailto:a@b.c"); }), Errc::kNoHost);
  EXPECT_EQ(error_of([] { hostify("urn:isbn:123"); }), Errc::kNoHost);
  EXPECT_EQ(error_of([] { hostify("http://[::1]/"); }), Errc::kNoTld);
  EXPECT_EQ(error_of([] { hostify("http://bad_host!.org/"); }), Errc::kNoHost);
}

TEST(Hostify, Lenient) {
  EXPECT_EQ(hostify_lenient("Example.org/x").str(), "http://example.org");
  EXPECT_EQ(hostify_lenient("example.org:8080/x").str(), "http://example.org");
  EXPECT_EQ(error_of([] { hostify_lenient("mailto:a@b.c"); }), Errc::kNoHost);
}

TEST(Hostify, IdempotentAndTldHasNoDot) {
  Rng rng(5);
  const char* schemes[] = {"http", "HTTPS", "ftp"};
  const char* tlds[] = {"org", "UK", "ca", "pt", "com"};
  for (int i = 0; i < 2000; ++i) {
    std::string uri = std::string(schemes[rng.below(3)]) + "://";
    auto labels = 1 + rng.below(4);
    for (std::uint64_t l = 0; l < labels; ++l) uri += (rng.bernoulli(0.5) ? "Www" : "h") + std::to_string(rng.below(50)) + ".";
    uri += tlds[rng.below(5)];
    if (rng.bernoulli(0.3)) uri += ":" + std::to_string(rng.below(65535));
    if (rng.bernoulli(0.5)) uri += "/p" + std::to_string(rng.below(9)) + "?q=" + std::to_string(rng.below(9));
    auto h = hostify(uri);
    EXPECT_EQ(hostify(h), h) << uri;
    EXPECT_EQ(extract_tld(host_of(h)).find('.'), std::string::npos) << uri;
  }
}

TEST(ExtractTld, DefaultRightmostLabel) {
  EXPECT_EQ(extract_tld(Hostname::parse("example.org")), "org");
  EXPECT_EQ(extract_tld(Hostname::parse("www.collectionscanada.gc.ca")), "ca");
  EXPECT_EQ(extract_tld(Hostname::parse("WWW.BL.UK.")), "uk");
}

TEST(ExtractTld, Errors) {
  EXPECT_EQ(error_of([] { extract_tld(Hostname::parse("localhost")); }), Errc::kNoTld);
  EXPECT_EQ(error_of([] { extract_tld(Hostname::parse("192.168.0.1")); }), Errc::kNoTld);
}

TEST(ExtractTld, CompoundSuffixes) {
  TldExtractor compound(SuffixList::defaults());
  EXPECT_EQ(compound(Hostname::parse("www.collectionscanada.gc.ca")), "gc.ca");
  EXPECT_EQ(compound(Hostname::parse("www.bl.co.uk")), "co.uk");
  EXPECT_EQ(compound(Hostname::parse("example.ca")), "ca");
  EXPECT_EQ(compound(Hostname::parse("gc.ca")), "gc.ca");
}

TEST(SuffixList, LoadsFileSkippingRulesAndComments) {
  auto path = std::filesystem::temp_directory_path() / "arcroute_suffixes.dat";
  {
    std::ofstream out(path);
    out << "// header\n# note\ngc.ca\n.CO.UK  # trailing\n*.ck\n!www.ck\n\n";
  }
  auto list = SuffixList::load(path.string());
  EXPECT_EQ(list.size(), 2u);
  EXPECT_EQ(list.skipped(), 2u);
  EXPECT_TRUE(list.contains("co.uk"));
  std::filesystem::remove(path);
  EXPECT_THROW(SuffixList::load("/nonexistent/suffixes"), Error);
}
