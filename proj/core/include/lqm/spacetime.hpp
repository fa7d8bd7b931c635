#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lqm/errors.hpp"

namespace lqm {

/// Lattice event on the 1+1D chain; light speed is one site per step.
struct Event {
    std::int64_t x = 0;
    std::int64_t t = 0;
};

/// Finite spacetime region: a site set crossed with a time window.
struct Region {
    std::vector<std::int64_t> sites; // sorted, unique, nonempty
    std::int64_t t_min = 0;
    std::int64_t t_max = 0;
};

/// Normalizes (sorts, dedups) and validates the region.
Region make_region(std::vector<std::int64_t> sites, std::int64_t t_min, std::int64_t t_max);

/// |dx| > |dt|. Lightlike separation counts as causal, not spacelike.
bool spacelike(const Event& a, const Event& b);

/// Every event of r1 spacelike to every event of r2.
bool region_spacelike(const Region& r1, const Region& r2);

/// min over event pairs of |dx| - |dt|; positive iff the regions are
/// spacelike, and >= 2 means "well spacelike" with a two-site margin.
std::int64_t min_spacelike_gap(const Region& r1, const Region& r2);

/// Future causal shadow of a region: events reachable at lattice light speed.
struct FutureShadow {
    Region source;
    /// true iff some event f of the source satisfies e.t - f.t >= |e.x - f.x|.
    bool contains(const Event& e) const;
};

FutureShadow future_shadow(Region r);

/// Smallest time on the worldline (strictly increasing in t, fixed x) lying
/// in the future shadow of r; nullopt if the worldline ends first.
std::optional<std::int64_t> earliest_contact(std::span<const Event> worldline, const Region& r);

} // namespace lqm
