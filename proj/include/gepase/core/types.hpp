#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>

namespace gepase {

/// Dense handle assigned by the domain on first discovery. Two equal handles
/// always denote the identical domain state within one search.
using StateId = std::uint32_t;
inline constexpr StateId kInvalidState = std::numeric_limits<StateId>::max();

/// Costs are exact nonnegative integers (domains scale real-valued lengths to
/// an integer lattice). Infinity is a sentinel strictly greater than any
/// finite cost but far enough from the type's max that f = g + w*h never
/// overflows.
using Cost = std::int64_t;
inline constexpr Cost kInfiniteCost = std::numeric_limits<Cost>::max() / 4;

enum class ActionClass : std::uint8_t { Cheap, Expensive, Dummy };

/// Index into the domain's action table, plus its evaluation-cost class.
/// The distinguished dummy action stands for "all not-yet-enumerated outgoing
/// edges" of a state and never appears in the domain's table.
struct ActionId {
    std::int32_t index = -1;
    ActionClass cls = ActionClass::Dummy;

    bool is_dummy() const { return cls == ActionClass::Dummy; }
};

inline ActionId dummy_action() { return ActionId{-1, ActionClass::Dummy}; }

inline bool operator==(const ActionId& a, const ActionId& b) {
    return a.index == b.index && a.is_dummy() == b.is_dummy();
}
inline bool operator!=(const ActionId& a, const ActionId& b) { return !(a == b); }

/// An edge (s, a). With a dummy action it represents every outgoing edge of
/// `state` that has not been enumerated into OPEN yet.
struct EdgeKey {
    StateId state = kInvalidState;
    ActionId action = dummy_action();
};

inline bool operator==(const EdgeKey& a, const EdgeKey& b) {
    return a.state == b.state && a.action == b.action;
}
inline bool operator!=(const EdgeKey& a, const EdgeKey& b) { return !(a == b); }

struct EdgeKeyHash {
    std::size_t operator()(const EdgeKey& e) const {
        std::uint64_t packed = (std::uint64_t(e.state) << 32) ^
                               std::uint64_t(std::uint32_t(e.action.index + 1));
        return std::hash<std::uint64_t>{}(packed);
    }
};

enum class Membership : std::uint8_t { None, Open, BE, Closed };

struct PlannerConfig {
    double w = 1.0;           // heuristic inflation, >= 1
    double epsilon = 1.0;     // independence relaxation, >= 1 and >= w
    unsigned num_threads = 1; // N_t expansion workers (excludes the coordinator)
    double timeout_s = 60.0;  // wall-clock budget in seconds
    std::uint64_t tie_break_seed = 0; // reserved; FIFO tie-break ignores it

    void validate() const {
        if (w < 1.0) throw std::invalid_argument("PlannerConfig: w must be >= 1");
        if (epsilon < w)
            throw std::invalid_argument("PlannerConfig: epsilon must be >= w (cost bound requires it)");
        if (num_threads < 1) throw std::invalid_argument("PlannerConfig: num_threads must be >= 1");
        if (timeout_s <= 0.0) throw std::invalid_argument("PlannerConfig: timeout must be positive");
    }

    /// Queue priority of an edge or state: f = g + w*h, in exact integer cost
    /// units (w is integral in every benchmark configuration).
    Cost f_value(Cost g, Cost h) const {
        return g + static_cast<Cost>(w * static_cast<double>(h) + 0.5);
    }
};

} // namespace gepase
