#include <gtest/gtest.h>

#include "ramp/config.hpp"

using ramp::Config;
using ramp::ConfigError;

TEST(Config, ParsesValuesAndComments) {
  const Config c = Config::from_string(
      "# header\n"
      "planner.alpha = 75   # trailing\n"
      "\n"
      "mppi.samples=256\n"
      "bench.dump = true\n"
      "lidar.vertical_angles_deg = -15, 0, 15\n");
  EXPECT_DOUBLE_EQ(c.get_double("planner.alpha", 0.0), 75.0);
  EXPECT_EQ(c.get_int("mppi.samples", 0), 256);
  EXPECT_TRUE(c.get_bool("bench.dump", false));
  EXPECT_EQ(c.get_doubles("lidar.vertical_angles_deg", {}), (std::vector<double>{-15.0, 0.0, 15.0}));
  EXPECT_DOUBLE_EQ(c.get_double("missing", 4.5), 4.5);
}

TEST(Config, ReportsUnusedKeys) {
  const Config c = Config::from_string("a = 1\nb = 2\n");
  c.get_double("a", 0.0);
  EXPECT_EQ(c.unused_keys(), std::vector<std::string>{"b"});
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(Config::from_string("no equals sign\n"), ConfigError);
  const Config c = Config::from_string("x = abc\n");
  EXPECT_THROW(c.get_double("x", 0.0), ConfigError);
  EXPECT_THROW(c.get_int("x", 0), ConfigError);
  EXPECT_THROW(Config::from_file("/nonexistent/ramp.cfg"), ConfigError);
}
