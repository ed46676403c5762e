#include <gtest/gtest.h>

#include "tdrd/config.hpp"

using namespace tdrd;

TEST(Config, MinimalConfigGetsDefaults) {
    const auto cfg = parse_config(R"({"matrix": {"m": 3, "a": 2, "b": 1, "c": 1}})");
    EXPECT_EQ(cfg.matrix.m, 3);
    EXPECT_EQ(cfg.certificate.p_m, 2);
    EXPECT_FALSE(cfg.certificate.thetas.has_value());
    EXPECT_EQ(cfg.reaction.kind, "lotka-chain");
    EXPECT_EQ(cfg.boundary.alpha, 0.0);
    EXPECT_EQ(cfg.n_x, 100);
    EXPECT_EQ(cfg.time.T, 1.0);
    EXPECT_EQ(cfg.seed, 1u);
}

TEST(Config, MatrixFieldsAreRequired) {
    EXPECT_THROW(parse_config(R"({"matrix": {"m": 3, "a": 2, "b": 1}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({})"), ConfigError);
    EXPECT_THROW(parse_config(R"([1, 2])"), ConfigError);
    EXPECT_THROW(parse_config("{not json"), ConfigError);
    EXPECT_THROW(parse_config(R"({"matrix": {"m": "three", "a": 2, "b": 1, "c": 1}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"matrix": {"m": 3, "a": 2, "b": 1, "c": 1}, "certificate": {"thetas": "guess"}})"),
                 ConfigError);
}

TEST(Config, RoundTripIsFixpoint) {
    const std::string text = R"json({
      "matrix": {"m": 2, "a": 3.1, "b": 0.1, "c": 0.30000000000000004},
      "region": [1, -1],
      "certificate": {"p_m": 3, "thetas": [1.0000000000000002]},
      "reaction": {"kind": "expression", "expressions": ["w1*(1-w1)", "w2"], "degree": 2, "S": [0.5, 1]},
      "boundary": {"alpha": 0.25, "B": [1e-17, 2], "form": "diffusion-weighted"},
      "grid": {"n_x": 40, "length": 2.5},
      "time": {"T": 0.3, "dt": 1e-4, "monitor_interval": 0.01, "snapshot_times": [0.1, 0.2]},
      "initial": {"base": [1, 2], "amplitude": [0.1, 0.2], "noise": [0, 0]},
      "audit": {"samples": 50, "radii": [1, 5]},
      "point": [1.5, -2],
      "output": {"csv": "out.csv", "snapshot_prefix": "snap"},
      "seed": 18446744073709551615,
      "allow_failed_certificate": true
    })json";
    const auto a = parse_config(text);
    const std::string once = serialize_config(a);
    const auto b = parse_config(once);
    EXPECT_EQ(serialize_config(b), once);
    EXPECT_EQ(b.matrix.c, 0.30000000000000004);
    EXPECT_EQ(b.certificate.thetas->at(0), 1.0000000000000002);
    EXPECT_EQ(b.boundary.B[0], 1e-17);
    EXPECT_EQ(b.seed, 18446744073709551615ull);
    EXPECT_EQ(b.reaction.expressions[0], "w1*(1-w1)");
}

TEST(Config, DefaultsRoundTrip) {
    const auto a = parse_config(R"({"matrix": {"m": 4, "a": 3, "b": 1, "c": 1}})");
    const std::string once = serialize_config(a);
    EXPECT_EQ(serialize_config(parse_config(once)), once);
    EXPECT_NE(once.find("\"search\""), std::string::npos);
}

TEST(Config, BuildersValidate) {
    auto cfg = parse_config(R"({"matrix": {"m": 2, "a": 3, "b": 1, "c": 1}})");
    EXPECT_NO_THROW(build_reaction(cfg));
    cfg.reaction.kind = "bogus";
    EXPECT_THROW(build_reaction(cfg), ConfigError);
    cfg.boundary.form = "weird";
    EXPECT_THROW(build_boundary(cfg), ConfigError);
    cfg.region = {1, 1, 1};
    EXPECT_THROW(build_region(cfg), ConfigError);
    cfg.initial.base = {1.0};
    EXPECT_THROW(build_initial_field(cfg, GridSpec::make(5, 1.0)), ConfigError);
}

TEST(Config, InitialFieldDependsOnlyOnSeed) {
    auto cfg = parse_config(R"({"matrix": {"m": 2, "a": 3, "b": 1, "c": 1}})");
    const auto grid = GridSpec::make(20, 1.0);
    const auto a = build_initial_field(cfg, grid), b = build_initial_field(cfg, grid);
    EXPECT_EQ(a, b);
    cfg.seed = 2;
    EXPECT_NE(build_initial_field(cfg, grid), a);
    for (const auto& c : a)
        for (double v : c) EXPECT_GE(v, 0.5);
}
