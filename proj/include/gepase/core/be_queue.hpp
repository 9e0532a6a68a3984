#pragma once

#include <cassert>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <utility>

#include "gepase/core/types.hpp"

namespace gepase {

/// Priority queue of states currently under expansion ("being expanded"),
/// keyed on f(s) = g(s) + w*h(s) with the same FIFO tie-break as OpenQueue.
/// Independence checks walk it in ascending f and stop early, which is what
/// makes the pruned check cheap on large graphs.
class BeQueue {
public:
    using OrderKey = std::pair<Cost, std::uint64_t>;
    using Map = std::map<OrderKey, StateId>;
    using const_iterator = Map::const_iterator;

    void insert(StateId state, Cost f) {
        assert(position_.find(state) == position_.end());
        OrderKey key{f, next_seq_++};
        ordered_.emplace(key, state);
        position_[state] = key;
    }

    bool erase(StateId state) {
        auto pos = position_.find(state);
        if (pos == position_.end()) return false;
        ordered_.erase(pos->second);
        position_.erase(pos);
        return true;
    }

    bool contains(StateId state) const { return position_.count(state) != 0; }

    Cost f_of(StateId state) const {
        auto pos = position_.find(state);
        assert(pos != position_.end());
        return pos->second.first;
    }

    bool empty() const { return ordered_.empty(); }
    std::size_t size() const { return ordered_.size(); }

    const_iterator begin() const { return ordered_.begin(); }
    const_iterator end() const { return ordered_.end(); }

private:
    Map ordered_;
    std::unordered_map<StateId, OrderKey> position_;
    std::uint64_t next_seq_ = 0;
};

} // namespace gepase
