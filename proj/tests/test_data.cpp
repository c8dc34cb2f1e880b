#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "support.hpp"

using namespace ehmarl;
using namespace ehmarl::data;

namespace {

const std::string kDir = EHMARL_SCENARIOS;

std::filesystem::path temp_dir(const std::string& tag) {
  auto d = std::filesystem::temp_directory_path() / ("ehmarl_data_" + tag);
  std::filesystem::create_directories(d);
  return d;
}

std::string header() { return std::string(kSeriesHeader) + "\n"; }

}  // namespace

TEST(Series, FormatThenParseRoundTripsBitExactly) {
  ExogenousSeries s;
  s.push_back({0.1, 0.3, 0.1, 1500.25, 1.0 / 3.0, 900.0, 0.0});
  s.push_back({1.05, 0.3, 0.3, 1e-300, 0.0, 123456.789, 777.7});
  const auto back = parse_series(format_series(s), "memory");
  EXPECT_EQ(back, s);
  EXPECT_EQ(format_series(back), format_series(s));
}

TEST(Series, RejectsSellPriceAboveBuyPriceAndNamesTheRow) {
  const std::string text = header() + "0,0.5,0.3,0.3,1,1,1,0\n1,0.2,0.3,0.3,1,1,1,0\n";
  try {
    parse_series(text, "bad.csv");
    FAIL() << "expected LoadError";
  } catch (const LoadError& e) {
    EXPECT_NE(std::string(e.what()).find("t=1"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("p_o"), std::string::npos) << e.what();
  }
}

TEST(Series, RejectsMalformedFiles) {
  EXPECT_THROW(parse_series("", "empty.csv"), LoadError);
  EXPECT_THROW(parse_series("\n\n", "blank.csv"), LoadError);
  EXPECT_THROW(parse_series(header(), "rows.csv"), LoadError);
  EXPECT_THROW(parse_series("t,p_e\n0,1\n", "hdr.csv"), LoadError);
  EXPECT_THROW(parse_series(header() + "0,1,1,1,1,1,1\n", "cols.csv"), LoadError);
  EXPECT_THROW(parse_series(header() + "0,1,1,x,1,1,1,1\n", "num.csv"), LoadError);
  EXPECT_THROW(parse_series(header() + "1,1,1,1,1,1,1,1\n", "seq.csv"), LoadError);
  EXPECT_THROW(parse_series(header() + "0,1,1,1,-5,1,1,1\n", "neg.csv"), LoadError);
  EXPECT_THROW(load_series("/nonexistent/series.csv"), LoadError);
}

TEST(Profile, TariffBands) {
  ProfileSpec s;
  EXPECT_EQ(tariff(s, 3.0), s.offpeak);
  EXPECT_EQ(tariff(s, 8.0), s.peak);
  EXPECT_EQ(tariff(s, 10.99), s.peak);
  EXPECT_EQ(tariff(s, 11.0), s.shoulder);
  EXPECT_EQ(tariff(s, 21.5), s.shoulder);
  EXPECT_EQ(tariff(s, 22.0), s.offpeak);
}

TEST(Profile, PvIsZeroAtNightAndPeaksAtNoon) {
  ProfileSpec s;
  EXPECT_EQ(pv_clear_sky(s, 0.0), 0.0);
  EXPECT_EQ(pv_clear_sky(s, 6.0), 0.0);
  EXPECT_EQ(pv_clear_sky(s, 20.0), 0.0);
  EXPECT_NEAR(pv_clear_sky(s, 12.0), s.pv_peak, 1e-9);
  const auto series = generate_series(s);
  EXPECT_EQ(series.pv[0], 0.0);
  EXPECT_EQ(series.pv[23], 0.0);
}

TEST(Profile, ZeroAmplitudeGivesConstantDemand) {
  ProfileSpec s;
  s.elec.peaks.clear();
  s.heat.peaks = {{8.0, 0.0, 2.0}};
  const auto series = generate_series(s);
  for (std::size_t t = 0; t < series.horizon(); ++t) {
    EXPECT_EQ(series.demand_e[t], s.elec.base);
    EXPECT_EQ(series.demand_h[t], s.heat.base);
    EXPECT_EQ(series.demand_g[t], s.gas.base);
  }
}

TEST(Profile, DemandPeakWrapsAroundMidnight) {
  DemandShape d{100.0, {{23.0, 50.0, 1.0}}, 0.0, 0.0};
  EXPECT_NEAR(demand_mean(d, 0.0), demand_mean(d, 22.0), 1e-12);
  EXPECT_NEAR(demand_mean(d, 23.0), 150.0, 1e-12);
}

TEST(Profile, SameSeedSameSeriesDifferentSeedDiffers) {
  ProfileSpec s;
  s.elec.noise = 0.1;
  s.cloud_noise = 0.3;
  s.seed = 7;
  EXPECT_EQ(generate_series(s), generate_series(s));
  auto t = s;
  t.seed = 8;
  EXPECT_NE(generate_series(t), generate_series(s));
}

TEST(Profile, NoisyDemandStaysNonnegativeAndQuantized) {
  ProfileSpec s;
  s.elec.noise = 2.0;  // large enough to push raw draws negative
  s.elec.quantum = 50.0;
  s.seed = 3;
  const auto series = generate_series(s);
  for (double v : series.demand_e) {
    EXPECT_GE(v, 0.0);
    EXPECT_EQ(std::fmod(v, 50.0), 0.0);
  }
  for (std::size_t t = 0; t < series.horizon(); ++t) EXPECT_LE(series.p_o[t], series.p_e[t]);
}

TEST(Profile, TextKeysAndErrors) {
  const auto kv = KeyValueText::parse(
      "horizon = 6\nstart_hour = 20\npeak_bands = none\nelec_peaks = 21:100:1\nelec_base = 1.5 MWh\n", "p");
  const auto s = ProfileSpec::from_text(kv);
  EXPECT_EQ(s.horizon, 6u);
  EXPECT_TRUE(s.peak_bands.empty());
  EXPECT_EQ(s.elec.base, 1500.0);
  const auto series = generate_series(s);
  EXPECT_EQ(series.horizon(), 6u);
  EXPECT_EQ(hour_of(s, 5), 1.0);
  EXPECT_THROW(ProfileSpec::from_text(KeyValueText::parse("bogus = 1\n", "p")), LoadError);
  EXPECT_THROW(ProfileSpec::from_text(KeyValueText::parse("peak_bands = 8\n", "p")), LoadError);
  EXPECT_THROW(ProfileSpec::from_text(KeyValueText::parse("horizon = 0\n", "p")), ContractViolation);
}

TEST(Scenario, CommittedFixturesLoad) {
  for (const char* name : {"micro3", "day8", "bench24", "scale1", "scale2", "scale4", "overcharge"}) {
    const auto sc = load_scenario(kDir + "/" + name + ".scn");
    EXPECT_EQ(sc.name, name);
    EXPECT_NO_THROW(Park{sc});
  }
  const auto micro = load_scenario(kDir + "/micro3.scn");
  EXPECT_EQ(micro.horizon(), 3u);
  EXPECT_EQ(micro.hub.b_max, 2000.0);
  const auto s4 = load_scenario(kDir + "/scale4.scn");
  const auto s1 = load_scenario(kDir + "/scale1.scn");
  EXPECT_EQ(s4.hubs, 4u);
  EXPECT_EQ(s4.market.e_max, 20000.0);
  for (std::size_t t = 0; t < s1.horizon(); ++t) EXPECT_DOUBLE_EQ(s4.series.demand_e[t], 4 * s1.series.demand_e[t]);
}

TEST(Scenario, FileErrors) {
  const auto d = temp_dir("scn");
  auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream(d / name) << body;
    return (d / name).string();
  };
  write("s.csv", header() + "0,0.5,0.3,0.3,1,1,1,0\n1,0.5,0.3,0.3,1,1,1,0\n");
  EXPECT_EQ(load_scenario(write("ok.scn", "series = s.csv\nhorizon = 1\n")).horizon(), 1u);
  EXPECT_THROW(load_scenario(write("none.scn", "hubs = 1\n")), LoadError);
  EXPECT_THROW(load_scenario(write("both.scn", "series = s.csv\nprofile = p.txt\n")), LoadError);
  EXPECT_THROW(load_scenario(write("unk.scn", "series = s.csv\ncolour = red\n")), LoadError);
  EXPECT_THROW(load_scenario(write("hz.scn", "series = s.csv\nhorizon = 3\n")), LoadError);
  EXPECT_THROW(load_scenario(write("neg.scn", "series = s.csv\nb_max = -1\n")), LoadError);
  EXPECT_THROW(load_scenario(write("eta.scn", "series = s.csv\neta_ce = 1.5\n")), LoadError);
  EXPECT_THROW(load_scenario(write("dup.scn", "series = s.csv\nhubs = 1\nhubs = 2\n")), LoadError);
  EXPECT_THROW(load_scenario((d / "missing.scn").string()), LoadError);
}
