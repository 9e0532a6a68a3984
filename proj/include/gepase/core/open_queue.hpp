#pragma once

#include <cassert>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <utility>

#include "gepase/core/types.hpp"

namespace gepase {

/// Priority queue of edges keyed on f = g + w*h with FIFO tie-breaking:
/// equal-f entries pop in insertion order, and updating an entry assigns a
/// fresh sequence number. Entries are addressable by EdgeKey so a dummy edge
/// can be repositioned when its source's g-value improves, and the whole
/// queue can be traversed front-to-back for independence checks.
///
/// Not internally synchronized; the executor's global lock guards every call.
class OpenQueue {
public:
    using OrderKey = std::pair<Cost, std::uint64_t>; // (f, insertion seq)
    using Map = std::map<OrderKey, EdgeKey>;
    using const_iterator = Map::const_iterator;

    void insert_or_update(const EdgeKey& edge, Cost f) {
        assert(f >= 0 && f < kInfiniteCost);
        auto pos = position_.find(edge);
        if (pos != position_.end()) ordered_.erase(pos->second);
        OrderKey key{f, next_seq_++};
        ordered_.emplace(key, edge);
        position_[edge] = key;
    }

    bool erase(const EdgeKey& edge) {
        auto pos = position_.find(edge);
        if (pos == position_.end()) return false;
        ordered_.erase(pos->second);
        position_.erase(pos);
        return true;
    }

    bool contains(const EdgeKey& edge) const { return position_.count(edge) != 0; }

    /// f-value of a present entry.
    Cost f_of(const EdgeKey& edge) const {
        auto pos = position_.find(edge);
        assert(pos != position_.end());
        return pos->second.first;
    }

    bool empty() const { return ordered_.empty(); }
    std::size_t size() const { return ordered_.size(); }

    const_iterator begin() const { return ordered_.begin(); }
    const_iterator end() const { return ordered_.end(); }

    /// Lowest (f, seq) entry.
    const_iterator front() const {
        assert(!ordered_.empty());
        return ordered_.begin();
    }

    /// Pop the front entry and return its edge.
    EdgeKey pop_front() {
        assert(!ordered_.empty());
        EdgeKey e = ordered_.begin()->second;
        position_.erase(e);
        ordered_.erase(ordered_.begin());
        return e;
    }

private:
    Map ordered_;
    std::unordered_map<EdgeKey, OrderKey, EdgeKeyHash> position_;
    std::uint64_t next_seq_ = 0;
};

/// open_insert_or_update as a free function, mirroring the queue op used by
/// the expansion bookkeeping.
inline void open_insert_or_update(OpenQueue& queue, const EdgeKey& edge, Cost f) {
    queue.insert_or_update(edge, f);
}

} // namespace gepase
