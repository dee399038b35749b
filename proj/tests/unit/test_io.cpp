#include <gtest/gtest.h>

#include "tasep/io.hpp"

using namespace tasep;

TEST(Io, ParseSpeedRoundTrip) {
  const auto f = io::parse_speed(R"({"rates":[2,1],"breakpoints":[0]})");
  EXPECT_EQ(f, SpeedFunction::two_phase(2.0, 1.0));
  EXPECT_EQ(io::parse_speed(io::speed_to_json(f)), f);
  EXPECT_EQ(io::parse_speed(R"({"rates":[1.5]})"), SpeedFunction::constant(1.5));
}

TEST(Io, ParseSpeedErrorsNameField) {
  try {
    io::parse_speed(R"({"breakpoints":[0]})");
    FAIL();
  } catch (const io::ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("rates"), std::string::npos);
  }
  EXPECT_THROW(io::parse_speed(R"({"rates":[1,"x"],"breakpoints":[0]})"), io::ParseError);
  EXPECT_THROW(io::parse_speed(R"({"rates":[1,2]})"), io::ParseError);
  EXPECT_THROW(io::parse_speed("[1,2]"), io::ParseError);
  EXPECT_THROW(io::parse_speed("{not json"), io::ParseError);
}

TEST(Io, InitialProfileForms) {
  const auto c = io::load_initial_profile("const:0.3");
  EXPECT_EQ(c.density(-4.0), 0.3);
  EXPECT_THROW(io::load_initial_profile("const:1.2"), io::ParseError);
  EXPECT_THROW(io::load_initial_profile("const:abc"), io::ParseError);
  const auto p = io::parse_initial_profile(R"({"densities":[1,0],"breakpoints":[0]})");
  EXPECT_EQ(p.density(-1.0), 1.0);
  EXPECT_EQ(p.density(1.0), 0.0);
  EXPECT_THROW(io::load_initial_profile("/nonexistent/rho.json"), io::ParseError);
}

TEST(Io, Grid) {
  const auto g = io::parse_grid("-2:2:0.1");
  EXPECT_EQ(g.size(), 41u);
  EXPECT_NEAR(g.at(40), 2.0, 1e-12);
  EXPECT_THROW(io::parse_grid("0:1"), io::ParseError);
  EXPECT_THROW(io::parse_grid("1:0:0.1"), io::ParseError);
  EXPECT_THROW(io::parse_grid("0:1:0"), io::ParseError);
}
