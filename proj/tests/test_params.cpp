#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "leadsim/params.hpp"

using namespace leadsim;
using nlohmann::json;

namespace {

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_SUITE("params") {

TEST_CASE("defaults validate and pin the speed relation") {
    ParamSet p;
    CHECK_NOTHROW(p.validate());
    CHECK(p.controller.speed_unit * (1.0 + p.controller.base_speed_factor) ==
          doctest::Approx(p.controller.max_speed));
}

TEST_CASE("validate rejects inconsistent controller settings") {
    SUBCASE("speed relation broken") {
        ControllerParams c;
        c.max_speed = 29.0;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
    SUBCASE("clip band inverted") {
        ControllerParams c;
        c.speed_clip_lo = 10.0;
        c.speed_clip_hi = 2.5;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
    SUBCASE("negative distance") {
        ControllerParams c;
        c.comfort_dist = -1.0;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
    SUBCASE("episode limits must be positive") {
        FollowParams f;
        f.episode_min_steps = 0;
        CHECK_THROWS_AS(f.validate(), std::invalid_argument);
    }
    SUBCASE("arena start box must fit") {
        ArenaSpec a;
        a.startbox_side = 300.0;
        CHECK_THROWS_AS(a.validate(), std::invalid_argument);
    }
    SUBCASE("timebase rate must be positive") {
        TimeBase t;
        t.rate = 0.0;
        CHECK_THROWS_AS(t.validate(), std::invalid_argument);
    }
}

TEST_CASE("JSON round trip is byte-stable") {
    ParamSet p;
    const std::string text = params_to_json(p);
    const ParamSet back = params_from_json(text);
    CHECK(params_to_json(back) == text);
    CHECK(params_hash(back) == params_hash(p));
}

TEST_CASE("round trip preserves non-default values") {
    ParamSet p;
    p.controller.interaction_zone = 48.0;
    p.follow.episode_threshold = 0.35;
    p.motion.accel = 55.0;
    p.arena.corner_inset = 12.0;
    p.timebase.rate = 50.0;
    const ParamSet back = params_from_json(params_to_json(p));
    CHECK(back.controller.interaction_zone == doctest::Approx(48.0));
    CHECK(back.follow.episode_threshold == doctest::Approx(0.35));
    CHECK(back.motion.accel == doctest::Approx(55.0));
    CHECK(back.arena.corner_inset == doctest::Approx(12.0));
    CHECK(back.timebase.rate == doctest::Approx(50.0));
    CHECK(params_hash(back) != params_hash(ParamSet{}));
}

TEST_CASE("unknown keys are rejected, missing keys keep defaults") {
    SUBCASE("unknown top-level section") {
        CHECK_THROWS(params_from_json(R"({"bogus": {}})"));
    }
    SUBCASE("unknown nested key") {
        CHECK_THROWS(params_from_json(R"({"controller": {"warp_speed": 9}})"));
    }
    SUBCASE("partial document keeps defaults elsewhere") {
        const ParamSet p = params_from_json(R"({"controller": {"interaction_zone": 40}})");
        CHECK(p.controller.interaction_zone == doctest::Approx(40.0));
        CHECK(p.controller.avoid_gain == doctest::Approx(ControllerParams{}.avoid_gain));
        CHECK(p.follow.follow_gain == doctest::Approx(FollowParams{}.follow_gain));
        CHECK(p.arena.side == doctest::Approx(ArenaSpec{}.side));
    }
    SUBCASE("empty document is all defaults") {
        const ParamSet p = params_from_json("{}");
        CHECK(params_hash(p) == params_hash(ParamSet{}));
    }
}

TEST_CASE("file save/load round trips") {
    const auto path = temp_file("leadsim_params_test.json");
    ParamSet p;
    p.controller.comfort_dwell_s = 2.5;
    save_params_file(p, path.string());
    const ParamSet back = load_params_file(path.string());
    CHECK(back.controller.comfort_dwell_s == doctest::Approx(2.5));
    CHECK(params_hash(back) == params_hash(p));
    std::filesystem::remove(path);
}

TEST_CASE("params_hash is stable and sensitive") {
    const std::string h = params_hash(ParamSet{});
    CHECK(h.rfind("fnv1a:", 0) == 0);
    CHECK(h == params_hash(ParamSet{}));
    ParamSet q;
    q.controller.avoid_gain = 7.5;
    CHECK(params_hash(q) != h);
}

}  // TEST_SUITE("params")

TEST_SUITE("reference-distribution") {

TEST_CASE("bin_index uses a closed first bin and half-open rest") {
    CHECK(ReferenceDistribution::bin_index(0.0) == 0);
    CHECK(ReferenceDistribution::bin_index(0.05) == 0);
    CHECK(ReferenceDistribution::bin_index(0.1) == 0);
    CHECK(ReferenceDistribution::bin_index(0.1 + 1e-9) == 1);
    CHECK(ReferenceDistribution::bin_index(0.2) == 1);
    CHECK(ReferenceDistribution::bin_index(0.55) == 5);
    CHECK(ReferenceDistribution::bin_index(0.9 + 1e-9) == 9);
    CHECK(ReferenceDistribution::bin_index(1.0) == 9);
    CHECK(ReferenceDistribution::bin_index(-0.5) == 0);  // clamped
    CHECK(ReferenceDistribution::bin_index(1.5) == 9);   // clamped
}

TEST_CASE("bin centers and edges line up") {
    for (int i = 0; i < ReferenceDistribution::kBins; ++i) {
        CHECK(ReferenceDistribution::bin_lo(i) == doctest::Approx(i / 10.0));
        CHECK(ReferenceDistribution::bin_hi(i) == doctest::Approx((i + 1) / 10.0));
        CHECK(ReferenceDistribution::bin_center(i) == doctest::Approx((i + 0.5) / 10.0));
    }
}

TEST_CASE("the shipped pretrial reference is a valid histogram") {
    const ReferenceDistribution ref = pretrial_reference_distribution();
    CHECK_NOTHROW(ref.validate());
    Scalar sum = 0;
    for (Scalar f : ref.frequencies) sum += f;
    CHECK(sum == doctest::Approx(1.0));
    // The top bin (near-maximal carefulness) carries the most mass.
    int argmax = 0;
    for (int i = 1; i < ReferenceDistribution::kBins; ++i)
        if (ref.frequencies[i] > ref.frequencies[argmax]) argmax = i;
    CHECK(argmax == 9);
}

TEST_CASE("tv_distance is a metric on histograms") {
    const ReferenceDistribution ref = pretrial_reference_distribution();
    CHECK(ref.tv_distance(ref) == doctest::Approx(0.0));

    ReferenceDistribution point{};
    point.frequencies[0] = 1.0;
    ReferenceDistribution other{};
    other.frequencies[9] = 1.0;
    CHECK(point.tv_distance(other) == doctest::Approx(1.0));
    CHECK(point.tv_distance(other) == doctest::Approx(other.tv_distance(point)));

    ReferenceDistribution half{};
    half.frequencies[0] = 0.5;
    half.frequencies[9] = 0.5;
    CHECK(point.tv_distance(half) == doctest::Approx(0.5));
}

TEST_CASE("validate rejects malformed histograms") {
    ReferenceDistribution bad{};
    bad.frequencies[0] = 0.9;  // sums to 0.9
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.frequencies[1] = 0.2;
    bad.frequencies[2] = -0.1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

}  // TEST_SUITE("reference-distribution")
