#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "gepase/core/be_queue.hpp"
#include "gepase/core/types.hpp"

namespace gepase {

/// Per-state search bookkeeping. g is non-increasing over a run; membership
/// only moves None -> Open -> BE -> Closed (a state may be re-inserted into
/// OPEN via its dummy edge while still in Open).
struct StateRecord {
    Cost g = kInfiniteCost;
    Cost h = 0;                          // cached at discovery, heuristic is static
    std::optional<EdgeKey> parent;       // edge that produced the best g
    std::uint32_t n_successors_generated = 0;
    Membership membership = Membership::None;
    std::uint32_t closures = 0;          // instrumentation: must never exceed 1
};

/// Dense table of StateRecords indexed by StateId.
class StateTable {
public:
    void reserve(std::size_t n) { records_.reserve(n); }

    bool discovered(StateId s) const {
        return s < records_.size() && records_[s].membership != Membership::None;
    }

    /// Fetch the record for `s`, creating it with the given cached heuristic
    /// value on first touch.
    template <typename HeuristicFn>
    StateRecord& ensure(StateId s, HeuristicFn&& h_of) {
        if (s >= records_.size()) records_.resize(std::size_t(s) + 1);
        StateRecord& rec = records_[s];
        if (!h_cached_valid(s)) {
            rec.h = h_of(s);
            mark_h_cached(s);
        }
        return rec;
    }

    StateRecord& operator[](StateId s) {
        assert(s < records_.size());
        return records_[s];
    }
    const StateRecord& operator[](StateId s) const {
        assert(s < records_.size());
        return records_[s];
    }

    std::size_t size() const { return records_.size(); }

    /// Count of states whose membership reached Closed more than once. The
    /// PA*SE family guarantees this stays zero; the acceptance suite checks it.
    std::uint64_t reclosures() const {
        std::uint64_t n = 0;
        for (const auto& r : records_)
            if (r.closures > 1) n += r.closures - 1;
        return n;
    }

private:
    bool h_cached_valid(StateId s) const {
        return s < h_cached_.size() && h_cached_[s];
    }
    void mark_h_cached(StateId s) {
        if (s >= h_cached_.size()) h_cached_.resize(std::size_t(s) + 1, 0);
        h_cached_[s] = 1;
    }

    std::vector<StateRecord> records_;
    std::vector<std::uint8_t> h_cached_;
};

/// Remove a fully expanded state from BE and mark it Closed. Precondition
/// (asserted): the state is in BE and all |A| of its successors have been
/// generated.
inline void be_promote_to_closed(StateId state, BeQueue& be, StateTable& records,
                                 std::uint32_t action_count) {
    StateRecord& rec = records[state];
    if (!be.contains(state) || rec.membership != Membership::BE)
        throw std::logic_error("be_promote_to_closed: state not in BE");
    if (rec.n_successors_generated != action_count)
        throw std::logic_error("be_promote_to_closed: state still has unevaluated successors");
    be.erase(state);
    rec.membership = Membership::Closed;
    ++rec.closures;
}

/// Ordered state/edge sequence from the search root to `goal`, recovered by
/// walking parent links. The path cost is the goal's g-value.
struct Path {
    std::vector<StateId> states; // root first, goal last
    std::vector<EdgeKey> edges;  // edges[i] leads states[i] -> states[i+1]
    Cost cost = 0;
};

inline Path backtrack(StateId goal, const StateTable& records) {
    assert(records[goal].g < kInfiniteCost && "backtrack: goal has no finite g");
    Path path;
    path.cost = records[goal].g;
    std::unordered_set<StateId> visited;
    StateId cur = goal;
    for (;;) {
        if (!visited.insert(cur).second)
            throw std::logic_error("backtrack: cycle in parent links");
        path.states.push_back(cur);
        const auto& parent = records[cur].parent;
        if (!parent) break;
        path.edges.push_back(*parent);
        cur = parent->state;
    }
    std::reverse(path.states.begin(), path.states.end());
    std::reverse(path.edges.begin(), path.edges.end());
    return path;
}

} // namespace gepase
