#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "leadsim/rng.hpp"
#include "leadsim/types.hpp"

using namespace leadsim;

TEST_SUITE("types") {

TEST_CASE("wrap_angle maps into [-pi, pi)") {
    CHECK(wrap_angle(0.0) == doctest::Approx(0.0));
    CHECK(wrap_angle(kPi) == doctest::Approx(-kPi));
    CHECK(wrap_angle(-kPi) == doctest::Approx(-kPi));
    CHECK(wrap_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
    CHECK(wrap_angle(-3 * kPi / 2) == doctest::Approx(kPi / 2));
    CHECK(wrap_angle(7 * kPi) == doctest::Approx(-kPi));
    for (Scalar a = -20.0; a <= 20.0; a += 0.37) {
        const Scalar w = wrap_angle(a);
        CHECK(w >= -kPi);
        CHECK(w < kPi);
        CHECK(std::sin(w) == doctest::Approx(std::sin(a)));
        CHECK(std::cos(w) == doctest::Approx(std::cos(a)));
    }
}

TEST_CASE("cross2 gives the signed z-component") {
    CHECK(cross2(Vec2(1, 0), Vec2(0, 1)) == doctest::Approx(1.0));
    CHECK(cross2(Vec2(0, 1), Vec2(1, 0)) == doctest::Approx(-1.0));
    CHECK(cross2(Vec2(2, 3), Vec2(4, 6)) == doctest::Approx(0.0));
}

TEST_CASE("heading_vec and rotate are consistent") {
    const Vec2 east = heading_vec(0.0);
    CHECK(east.x() == doctest::Approx(1.0));
    CHECK(east.y() == doctest::Approx(0.0));

    const Vec2 north = rotate(east, kPi / 2);
    CHECK(north.x() == doctest::Approx(0.0));
    CHECK(north.y() == doctest::Approx(1.0));

    const Vec2 v(3.0, -4.0);
    const Vec2 back = rotate(rotate(v, 1.1), -1.1);
    CHECK(back.x() == doctest::Approx(v.x()));
    CHECK(back.y() == doctest::Approx(v.y()));
}

TEST_CASE("Pose normalizes its heading on construction") {
    const Pose p(Vec2(1, 2), 5 * kPi / 2);
    CHECK(p.heading == doctest::Approx(kPi / 2));
    CHECK(p.direction().x() == doctest::Approx(0.0));
    CHECK(p.direction().y() == doctest::Approx(1.0));
}

TEST_CASE("clip_normalize maps the clip band onto [0, 1]") {
    CHECK(clip_normalize(2.5, 2.5, 10.0) == doctest::Approx(0.0));
    CHECK(clip_normalize(10.0, 2.5, 10.0) == doctest::Approx(1.0));
    CHECK(clip_normalize(5.0, 2.5, 10.0) == doctest::Approx(1.0 / 3.0));
    CHECK(clip_normalize(0.0, 2.5, 10.0) == doctest::Approx(0.0));    // below band clamps
    CHECK(clip_normalize(100.0, 2.5, 10.0) == doctest::Approx(1.0));  // above band clamps
    CHECK_THROWS_AS(clip_normalize(1.0, 5.0, 5.0), std::invalid_argument);
    CHECK_THROWS_AS(clip_normalize(1.0, 6.0, 5.0), std::invalid_argument);
}

TEST_CASE("clamp01 holds the unit interval") {
    CHECK(clamp01(-0.5) == 0.0);
    CHECK(clamp01(0.25) == 0.25);
    CHECK(clamp01(1.5) == 1.0);
}

}  // TEST_SUITE("types")

TEST_SUITE("rng") {

TEST_CASE("same seed gives the same stream") {
    Rng a(1234), b(1234);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds give different streams") {
    Rng a(1), b(2);
    int same = 0;
    for (int i = 0; i < 64; ++i)
        if (a.next_u64() == b.next_u64()) ++same;
    CHECK(same == 0);
}

TEST_CASE("uniform stays in [0, 1) and fills the range") {
    Rng rng(42);
    Scalar lo = 1.0, hi = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Scalar u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("bounded uniform respects its bounds") {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const Scalar u = rng.uniform(-3.0, 5.0);
        CHECK(u >= -3.0);
        CHECK(u < 5.0);
    }
}

TEST_CASE("normal has roughly zero mean and unit variance") {
    Rng rng(99);
    const int n = 20000;
    Scalar sum = 0, sum2 = 0;
    for (int i = 0; i < n; ++i) {
        const Scalar z = rng.normal();
        sum += z;
        sum2 += z * z;
    }
    const Scalar mean = sum / n;
    const Scalar var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.03);
    CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("exponential has the requested mean") {
    Rng rng(5);
    const int n = 40000;
    Scalar sum = 0;
    for (int i = 0; i < n; ++i) {
        const Scalar x = rng.exponential(35.0);
        CHECK(x >= 0.0);
        sum += x;
    }
    CHECK(sum / n == doctest::Approx(35.0).epsilon(0.03));
}

TEST_CASE("bernoulli at the extremes is deterministic") {
    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        CHECK_FALSE(rng.bernoulli(0.0));
        CHECK(rng.bernoulli(1.0));
    }
}

TEST_CASE("weighted_index tracks the weights") {
    Rng rng(2024);
    SUBCASE("zero-weight bins are never drawn") {
        const std::vector<Scalar> w{0.0, 1.0, 0.0, 2.0};
        for (int i = 0; i < 1000; ++i) {
            const int k = rng.weighted_index(w);
            CHECK((k == 1 || k == 3));
        }
    }
    SUBCASE("a dominant weight dominates the draws") {
        const std::vector<Scalar> w{0.01, 0.01, 0.98};
        int hits = 0;
        for (int i = 0; i < 1000; ++i)
            if (rng.weighted_index(w) == 2) ++hits;
        CHECK(hits > 900);
    }
    SUBCASE("unnormalized weights behave like normalized ones") {
        Rng a(77), b(77);
        const std::vector<Scalar> wa{1.0, 2.0, 3.0};
        const std::vector<Scalar> wb{10.0, 20.0, 30.0};
        for (int i = 0; i < 200; ++i) CHECK(a.weighted_index(wa) == b.weighted_index(wb));
    }
}

TEST_CASE("derive_seed is a pure function of (base, key)") {
    CHECK(Rng::derive_seed(42, 1) == Rng::derive_seed(42, 1));
    CHECK(Rng::derive_seed(42, 1) != Rng::derive_seed(42, 2));
    CHECK(Rng::derive_seed(42, 1) != Rng::derive_seed(43, 1));

    std::set<std::uint64_t> seen;
    for (std::uint64_t k = 0; k < 200; ++k) seen.insert(Rng::derive_seed(42, k));
    CHECK(seen.size() == 200);  // no collisions among small keys
}

TEST_CASE("child streams are reproducible and decorrelated from the parent") {
    Rng parent(42);
    Rng c1 = parent.child(7);
    Rng c2 = Rng(42).child(7);
    for (int i = 0; i < 50; ++i) CHECK(c1.next_u64() == c2.next_u64());

    Rng p(42), c(Rng(42).child(7).seed());
    int same = 0;
    for (int i = 0; i < 64; ++i)
        if (p.next_u64() == c.next_u64()) ++same;
    CHECK(same == 0);
}

TEST_CASE("seed() reports the construction seed") {
    CHECK(Rng(123456).seed() == 123456);
}

}  // TEST_SUITE("rng")
