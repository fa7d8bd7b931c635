#include "lqm/spacetime.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

#include "lqm/errors.hpp"

namespace lqm {

Region make_region(std::vector<std::int64_t> sites, std::int64_t t_min, std::int64_t t_max) {
    if (sites.empty()) throw ArgumentError("region must contain at least one site");
    if (t_min > t_max) throw ArgumentError("region time window requires t_min <= t_max");
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    return Region{std::move(sites), t_min, t_max};
}

bool spacelike(const Event& a, const Event& b) {
    return std::abs(a.x - b.x) > std::abs(a.t - b.t);
}

std::int64_t min_spacelike_gap(const Region& r1, const Region& r2) {
    // |dt| is maximized at the window corners; |dx| is minimized over the two
    // sorted site lists by a merge scan.
    const std::int64_t max_dt = std::max(r1.t_max - r2.t_min, r2.t_max - r1.t_min);
    std::int64_t min_dx = std::numeric_limits<std::int64_t>::max();
    size_t i = 0, j = 0;
    while (i < r1.sites.size() && j < r2.sites.size()) {
        min_dx = std::min(min_dx, std::abs(r1.sites[i] - r2.sites[j]));
        if (r1.sites[i] < r2.sites[j])
            ++i;
        else
            ++j;
    }
    return min_dx - std::max<std::int64_t>(max_dt, 0);
}

bool region_spacelike(const Region& r1, const Region& r2) {
    return min_spacelike_gap(r1, r2) > 0;
}

bool FutureShadow::contains(const Event& e) const {
    const std::int64_t reach = e.t - source.t_min;
    if (reach < 0) return false;
    for (std::int64_t s : source.sites)
        if (std::abs(e.x - s) <= reach) return true;
    return false;
}

FutureShadow future_shadow(Region r) { return FutureShadow{std::move(r)}; }

std::optional<std::int64_t> earliest_contact(std::span<const Event> worldline, const Region& r) {
    if (worldline.empty()) return std::nullopt;
    for (size_t i = 1; i < worldline.size(); ++i)
        if (worldline[i].t <= worldline[i - 1].t || worldline[i].x != worldline[0].x)
            throw ArgumentError("worldline must be strictly increasing in t at fixed x");
    const FutureShadow shadow = future_shadow(r);
    for (const Event& e : worldline)
        if (shadow.contains(e)) return e.t;
    return std::nullopt;
}

} // namespace lqm
