#pragma once

#include <cassert>

#include "gepase/core/be_queue.hpp"
#include "gepase/core/open_queue.hpp"
#include "gepase/core/state_table.hpp"
#include "gepase/core/types.hpp"

namespace gepase {

namespace detail {

/// g(e.s) - g(s') <= epsilon * h(s', e.s), the pairwise safety condition: the
/// in-flight or pending work rooted at s' cannot reduce g(e.s).
template <typename PairwiseH>
bool pairwise_independent(Cost g_edge_source, Cost g_other, StateId other,
                          StateId edge_source, PairwiseH&& pairwise_h, double epsilon) {
    const Cost diff = g_edge_source - g_other;
    if (diff <= 0) return true;
    const Cost h = pairwise_h(other, edge_source);
    return static_cast<double>(diff) <= epsilon * static_cast<double>(h);
}

} // namespace detail

/// Check a candidate edge against every strictly-lower-f entry of OPEN.
/// Walks the queue front-to-back and stops at the first entry with
/// f >= f(edge); `edge` must be present in the queue.
template <typename PairwiseH>
bool independence_against_open(const EdgeKey& edge, const OpenQueue& queue,
                               const StateTable& records, PairwiseH&& pairwise_h,
                               double epsilon) {
    assert(queue.contains(edge));
    const Cost f_edge = queue.f_of(edge);
    const Cost g_edge = records[edge.state].g;
    for (const auto& [key, other] : queue) {
        if (key.first >= f_edge) break;
        if (other.state == edge.state) continue; // shares g, cannot reduce it
        if (!detail::pairwise_independent(g_edge, records[other.state].g, other.state,
                                          edge.state, pairwise_h, epsilon))
            return false;
    }
    return true;
}

/// Check a candidate edge against the states under expansion whose priority
/// is strictly below f(edge). Forward-backward consistency of the pairwise
/// heuristic (with w <= epsilon) makes the skipped higher-f states safe.
template <typename PairwiseH>
bool independence_against_be(const EdgeKey& edge, Cost f_edge, const BeQueue& be,
                             const StateTable& records, PairwiseH&& pairwise_h,
                             double epsilon) {
    const Cost g_edge = records[edge.state].g;
    for (const auto& [key, state] : be) {
        if (key.first >= f_edge) break;
        if (state == edge.state) continue;
        if (!detail::pairwise_independent(g_edge, records[state].g, state, edge.state,
                                          pairwise_h, epsilon))
            return false;
    }
    return true;
}

} // namespace gepase
