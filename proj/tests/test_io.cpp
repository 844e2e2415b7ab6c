#include "photorecon/io.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "gtest/gtest.h"

using namespace photorecon;

TEST(io, reals_round_trip) {
  for (double v : {0.1, 1.0 / 3.0, 2.0 / 31.0, 5e-324, 1.7976931348623157e308, -0.0, 123456789.123}) {
    const std::string text = format_real(v);
    EXPECT_EQ(std::strtod(text.c_str(), nullptr), v) << text;
  }
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(format_real(std::numeric_limits<double>::infinity()), "null");
}

TEST(io, json_emitter) {
  Json j;
  j["probs"] = std::vector<double>{0.5, 0.25};
  j["name"] = "x";
  j["nested"] = Json::object({{"k", 1}});
  EXPECT_EQ(dump_json(j),
            "{\n  \"probs\": [0.5, 0.25],\n  \"name\": \"x\",\n  \"nested\": {\n    \"k\": 1\n  }\n}\n");
  const auto back = Json::parse(dump_json(j));
  EXPECT_EQ(back["probs"][1].get<double>(), 0.25);
}

TEST(io, distribution_json_round_trip) {
  const std::vector<double> probs{1.0 / 3.0, 2.0 / 3.0};
  const Provenance prov{"abc", 7, "mt19937_64"};
  const auto text = dump_json(distribution_json(probs, prov, Json{{"nu", 10}}));
  EXPECT_EQ(parse_real_vector(text), probs);
  const auto j = Json::parse(text);
  EXPECT_EQ(j["nu"], 10);
  EXPECT_EQ(j["provenance"]["seed"], 7);
  EXPECT_EQ(j["provenance"]["generator"], "mt19937_64");
  EXPECT_EQ(j["provenance"]["library_version"], kVersion);
  EXPECT_TRUE(Json::parse(dump_json(distribution_json(probs, Provenance{"h", {}, ""})))["provenance"]
                  ["seed"]
                      .is_null());
}

TEST(io, csv) {
  EXPECT_EQ(distribution_csv({0.5, 0.5}), "n,probability\n0,0.5\n1,0.5\n");
}

TEST(io, parse_real_vector_forms) {
  EXPECT_EQ(parse_real_vector("0.5,0.5"), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(parse_real_vector("  1e-1 , +0.9 \n"), (std::vector<double>{0.1, 0.9}));
  EXPECT_EQ(parse_real_vector("[1]"), std::vector<double>{1.0});
  EXPECT_EQ(parse_real_vector(R"({"estimate": [0.5, 0.5], "chi": 1})"), (std::vector<double>{0.5, 0.5}));
  EXPECT_THROW(parse_real_vector(""), Error);
  EXPECT_THROW(parse_real_vector("{\"p\": [1]}"), Error);
  EXPECT_THROW(parse_real_vector("[\"a\"]"), Error);
}

TEST(io, count_distribution_validation) {
  EXPECT_NO_THROW(count_distribution_from_values({0.2, 0.3}));
  EXPECT_THROW(count_distribution_from_values({0.7, 0.4}), Error);
  EXPECT_THROW(count_distribution_from_values({-0.1, 0.4}), Error);
}

TEST(io, hash) {
  EXPECT_EQ(hex64(fnv1a64("")), "cbf29ce484222325");
  EXPECT_EQ(hex64(fnv1a64("a")), "af63dc4c8601ec8c");
}
