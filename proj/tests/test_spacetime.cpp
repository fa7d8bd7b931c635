#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <vector>

#include "lqm/rng.hpp"
#include "lqm/spacetime.hpp"

using namespace lqm;

namespace {

std::vector<Event> region_events(const Region& r) {
    std::vector<Event> out;
    for (std::int64_t s : r.sites)
        for (std::int64_t t = r.t_min; t <= r.t_max; ++t) out.push_back({s, t});
    return out;
}

bool region_spacelike_oracle(const Region& a, const Region& b) {
    for (const Event& ea : region_events(a))
        for (const Event& eb : region_events(b))
            if (!spacelike(ea, eb)) return false;
    return true;
}

bool shadow_oracle(const Region& r, const Event& e) {
    for (const Event& f : region_events(r))
        if (e.t - f.t >= std::abs(e.x - f.x)) return true;
    return false;
}

Region random_region(Rng& rng) {
    std::vector<std::int64_t> sites;
    const int n = 1 + static_cast<int>(rng.next() % 3);
    for (int i = 0; i < n; ++i) sites.push_back(static_cast<std::int64_t>(rng.next() % 12));
    const std::int64_t t0 = static_cast<std::int64_t>(rng.next() % 6);
    return make_region(sites, t0, t0 + static_cast<std::int64_t>(rng.next() % 4));
}

} // namespace

TEST_CASE("make_region validates and normalizes") {
    CHECK_THROWS_AS(make_region({}, 0, 0), ArgumentError);
    CHECK_THROWS_AS(make_region({1}, 2, 1), ArgumentError);
    const Region r = make_region({3, 1, 3}, 0, 2);
    CHECK(r.sites == std::vector<std::int64_t>{1, 3});
}

TEST_CASE("spacelike: equal-time, timelike, lightlike boundary") {
    CHECK(spacelike({0, 0}, {5, 0}));
    CHECK_FALSE(spacelike({0, 0}, {1, 5}));
    CHECK_FALSE(spacelike({0, 0}, {3, 3})); // lightlike counts as causal
}

TEST_CASE("spacelike is symmetric and irreflexive") {
    Rng rng(3);
    for (int rep = 0; rep < 200; ++rep) {
        const Event a{static_cast<std::int64_t>(rng.next() % 20),
                      static_cast<std::int64_t>(rng.next() % 20)};
        const Event b{static_cast<std::int64_t>(rng.next() % 20),
                      static_cast<std::int64_t>(rng.next() % 20)};
        CHECK(spacelike(a, b) == spacelike(b, a));
        CHECK_FALSE(spacelike(a, a));
    }
}

TEST_CASE("region_spacelike: simple cases and the enumerated example") {
    CHECK(region_spacelike(make_region({0}, 0, 0), make_region({5}, 0, 0)));
    CHECK_FALSE(region_spacelike(make_region({0, 1}, 0, 0), make_region({1, 5}, 0, 0)));

    // sites {0} x [0,2] vs {3} x [0,0]: every pair is spacelike (the worst
    // pair is (0,2) vs (3,0): |dx| = 3 > |dt| = 2), so the oracle says true.
    const Region a = make_region({0}, 0, 2);
    const Region b = make_region({3}, 0, 0);
    CHECK(region_spacelike_oracle(a, b));
    CHECK(region_spacelike(a, b));
}

TEST_CASE("region_spacelike matches the exhaustive oracle and is symmetric") {
    Rng rng(5);
    for (int rep = 0; rep < 300; ++rep) {
        const Region a = random_region(rng);
        const Region b = random_region(rng);
        const bool fast = region_spacelike(a, b);
        CHECK(fast == region_spacelike_oracle(a, b));
        CHECK(fast == region_spacelike(b, a));
    }
}

TEST_CASE("future_shadow: membership and brute-force agreement") {
    const FutureShadow origin = future_shadow(make_region({0}, 0, 0));
    CHECK(origin.contains({0, 5}));
    CHECK_FALSE(origin.contains({6, 5}));
    CHECK(origin.contains({0, 0}));  // a region is in its own shadow
    CHECK(origin.contains({3, 3}));  // lightlike reach
    CHECK_FALSE(origin.contains({0, -1}));

    Rng rng(7);
    for (int rep = 0; rep < 300; ++rep) {
        const Region r = random_region(rng);
        const FutureShadow shadow = future_shadow(r);
        const Event e{static_cast<std::int64_t>(rng.next() % 16),
                      static_cast<std::int64_t>(rng.next() % 16)};
        CHECK(shadow.contains(e) == shadow_oracle(r, e));
    }
}

TEST_CASE("future_shadow is monotone under region growth") {
    Rng rng(9);
    for (int rep = 0; rep < 100; ++rep) {
        const Region small = random_region(rng);
        Region big = small;
        big.sites.push_back(static_cast<std::int64_t>(rng.next() % 12));
        big = make_region(big.sites, big.t_min, big.t_max);
        const FutureShadow ss = future_shadow(small);
        const FutureShadow sb = future_shadow(big);
        for (std::int64_t x = -2; x < 14; ++x)
            for (std::int64_t t = 0; t < 12; ++t)
                if (ss.contains({x, t})) CHECK(sb.contains({x, t}));
    }
}

TEST_CASE("earliest_contact: crossing time, immediate contact, absence") {
    std::vector<Event> alice;
    for (std::int64_t t = 0; t <= 1200; ++t) alice.push_back({0, t});
    const auto hit = earliest_contact(alice, make_region({1000}, 0, 0));
    REQUIRE(hit.has_value());
    CHECK(*hit == 1000);

    const auto now = earliest_contact(alice, make_region({0}, 0, 0));
    REQUIRE(now.has_value());
    CHECK(*now == 0);

    std::vector<Event> short_line;
    for (std::int64_t t = 0; t <= 10; ++t) short_line.push_back({0, t});
    CHECK_FALSE(earliest_contact(short_line, make_region({1000}, 0, 0)).has_value());

    std::vector<Event> broken{{0, 0}, {0, 0}};
    CHECK_THROWS_AS(earliest_contact(broken, make_region({3}, 0, 0)), ArgumentError);
    std::vector<Event> bent{{0, 0}, {1, 1}};
    CHECK_THROWS_AS(earliest_contact(bent, make_region({3}, 0, 0)), ArgumentError);
}

TEST_CASE("min_spacelike_gap measures the two-site margin") {
    CHECK(min_spacelike_gap(make_region({0}, 0, 0), make_region({5}, 0, 0)) == 5);
    CHECK(min_spacelike_gap(make_region({0}, 0, 1), make_region({5}, 0, 0)) == 4);
    CHECK(min_spacelike_gap(make_region({0}, 0, 0), make_region({0}, 0, 0)) <= 0);
}
