#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gepase/core/be_queue.hpp"
#include "gepase/core/state_table.hpp"
#include "gepase/core/types.hpp"

namespace gepase {

struct Successor {
    StateId state = kInvalidState;
    Cost cost = 0;
};

/// Behavioral contract every planner searches over.
///
/// Requirements beyond the signatures:
///  - heuristic() is consistent (h(s) <= c(s,a) + h(s')) and zero at goals;
///  - pairwise_heuristic() is symmetric, forward-backward consistent
///    (h(s,s'') <= h(s,s') + h(s',s'')) and never exceeds the optimal cost
///    between its arguments;
///  - generate_successor() returns nullopt for infeasible actions, is
///    reentrant, and is the only method ever invoked without the global
///    search lock.
class Domain {
public:
    virtual ~Domain() = default;

    /// The action table A, with each action's evaluation-cost class. The
    /// dummy action is not part of the table.
    virtual const std::vector<ActionId>& actions() const = 0;

    virtual std::optional<Successor> generate_successor(const EdgeKey& edge) = 0;

    virtual Cost heuristic(StateId s) = 0;
    virtual Cost pairwise_heuristic(StateId a, StateId b) = 0;
    virtual bool is_goal(StateId s) = 0;

    /// Optional sizing hint for the dense state table (0 = unknown).
    virtual std::size_t state_space_hint() const { return 0; }
};

enum class SearchStatus { Solved, Exhausted, Timeout };

inline const char* to_string(SearchStatus s) {
    switch (s) {
        case SearchStatus::Solved: return "Solved";
        case SearchStatus::Exhausted: return "Exhausted";
        case SearchStatus::Timeout: return "Timeout";
    }
    return "?";
}

struct SearchStats {
    double wall_time_s = 0.0;
    std::uint64_t edge_evaluations = 0;  // generate_successor calls
    std::uint64_t state_expansions = 0;  // dummy-edge pops
    std::uint64_t reclosures = 0;        // second closures; must be zero
    std::uint64_t lock_violations = 0;   // lock held during an evaluation; must be zero
    unsigned threads_spawned = 0;
};

struct SearchResult {
    SearchStatus status = SearchStatus::Exhausted;
    std::optional<Path> path;
    std::optional<Cost> cost;
    SearchStats stats;
};

/// Optional observation points used by tests and instrumentation. Callbacks
/// noted as "locked" run while the caller holds the global search lock and
/// must not re-enter the planner.
struct PlannerHooks {
    /// Worker thread, lock not held, immediately before generate_successor.
    /// May run concurrently from several workers.
    std::function<void(const EdgeKey&)> before_evaluate;
    /// Locked; a candidate edge passed both independence checks and is about
    /// to be popped. BE does not yet contain the candidate's source.
    std::function<void(const EdgeKey&, Cost f_edge, const BeQueue&, const StateTable&)>
        on_independent_pop;
    /// Locked; state was promoted to Closed.
    std::function<void(StateId)> on_close;
    /// Locked; g(state) improved from old_g to new_g.
    std::function<void(StateId, Cost, Cost)> on_relax;
};

} // namespace gepase
