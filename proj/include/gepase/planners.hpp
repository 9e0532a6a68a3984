#pragma once

#include <cassert>
#include <chrono>
#include <memory>
#include <mutex>
#include <optional>

#include "gepase/core/independence.hpp"
#include "gepase/core/open_queue.hpp"
#include "gepase/core/state_table.hpp"
#include "gepase/core/types.hpp"
#include "gepase/domain.hpp"
#include "gepase/executor.hpp"

namespace gepase {

/// How the engine interprets the domain's action classes. GePA*SE uses them
/// as declared; PA*SE behaves as if every action were cheap (pure state
/// expansion parallelism); ePA*SE as if every action were expensive (pure
/// edge parallelism).
enum class ClassOverride { None, AllCheap, AllExpensive };

namespace detail {

using SteadyClock = std::chrono::steady_clock;

/// Coordinator/worker search over edges. One coordinator thread runs the
/// planning loop; up to N_t workers expand edges. A single global lock guards
/// the queues and state table; generate_successor always runs unlocked.
class ParallelEdgeSearch {
public:
    ParallelEdgeSearch(Domain& domain, const PlannerConfig& cfg, ClassOverride ovr,
                       PlannerHooks* hooks)
        : domain_(domain), cfg_(cfg), override_(ovr), hooks_(hooks),
          actions_(domain.actions()) {}

    SearchResult run(StateId start) {
        cfg_.validate();
        const auto t0 = SteadyClock::now();
        deadline_ = t0 + std::chrono::duration_cast<SteadyClock::duration>(
                             std::chrono::duration<double>(cfg_.timeout_s));
        table_.reserve(domain_.state_space_hint());

        WorkerPool pool(cfg_.num_threads, sync_,
                        [this](const EdgeKey& e) { expand(e); });
        pool_ = &pool;

        SearchResult result;
        {
            std::unique_lock lk(sync_.mutex);
            auto& rec = table_.ensure(start, [&](StateId s) { return domain_.heuristic(s); });
            rec.g = 0;
            rec.membership = Membership::Open;
            open_.insert_or_update(EdgeKey{start, dummy_action()},
                                   cfg_.f_value(0, rec.h));
            result = coordinate(lk);
        }
        pool.shutdown();
        pool_ = nullptr;
        {
            // Workers are joined; collect any domain fault they hit.
            std::unique_lock lk(sync_.mutex);
            result.stats.threads_spawned = pool.spawned();
            if (auto err = pool.error()) std::rethrow_exception(err);
        }
        result.stats.wall_time_s =
            std::chrono::duration<double>(SteadyClock::now() - t0).count();
        result.stats.edge_evaluations = edge_evaluations_;
        result.stats.state_expansions = state_expansions_;
        result.stats.reclosures = table_.reclosures();
        result.stats.lock_violations = lock_violations_;
        return result;
    }

private:
    struct Candidate {
        EdgeKey edge;
        Cost f = 0;
    };

    /// Planning loop. Runs with the lock held except while waiting.
    SearchResult coordinate(std::unique_lock<OwnedMutex>& lk) {
        for (;;) {
            if (pool_->error()) return finish(SearchStatus::Timeout); // cause rethrown by run()
            if (SteadyClock::now() >= deadline_) return finish(SearchStatus::Timeout);
            if (open_.empty() && be_.empty()) return finish(SearchStatus::Exhausted);

            const auto seen = sync_.version();
            auto cand = select_independent();
            if (!cand) {
                if (!sync_.wait_for_change_until(lk, seen, deadline_))
                    return finish(SearchStatus::Timeout);
                continue;
            }
            if (domain_.is_goal(cand->edge.state)) {
                open_.erase(cand->edge);
                SearchResult r = finish(SearchStatus::Solved);
                r.path = backtrack(cand->edge.state, table_);
                r.cost = r.path->cost;
                return r;
            }
            // The pop is deferred until a worker can take the edge at once;
            // worker completions bump the change signal, so this cannot hang.
            if (!pool_->has_idle()) {
                if (!sync_.wait_for_change_until(lk, seen, deadline_))
                    return finish(SearchStatus::Timeout);
                continue;
            }
            if (hooks_ && hooks_->on_independent_pop)
                hooks_->on_independent_pop(cand->edge, cand->f, be_, table_);
            open_.erase(cand->edge);
            if (cand->edge.action.is_dummy()) {
                // Entering BE here (not in the worker) keeps the in-flight
                // expansion visible to every later independence check.
                be_.insert(cand->edge.state, cand->f);
                table_[cand->edge.state].membership = Membership::BE;
                ++state_expansions_;
                if (actions_.empty()) {
                    be_promote_to_closed(cand->edge.state, be_, table_, 0);
                    continue;
                }
            }
            sync_.notify_change();
            lk.unlock();
            try {
                pool_->assign(cand->edge);
            } catch (const std::runtime_error&) {
                // Pool refused: a worker fault or shutdown raced us. The
                // loop re-checks terminate/error with the lock held.
                lk.lock();
                continue;
            }
            lk.lock();
        }
    }

    SearchResult finish(SearchStatus status) {
        sync_.request_terminate();
        SearchResult r;
        r.status = status;
        return r;
    }

    /// Lowest-f OPEN edge passing both independence checks, or nullopt.
    std::optional<Candidate> select_independent() {
        for (auto it = open_.begin(); it != open_.end(); ++it) {
            const EdgeKey& edge = it->second;
            const Cost f_edge = it->first.first;
            if (!independence_against_open(edge, open_, table_, pairwise(), cfg_.epsilon))
                continue;
            if (!independence_against_be(edge, f_edge, be_, table_, pairwise(), cfg_.epsilon))
                continue;
            return Candidate{edge, f_edge};
        }
        return std::nullopt;
    }

    auto pairwise() {
        return [this](StateId a, StateId b) { return domain_.pairwise_heuristic(a, b); };
    }

    ActionClass effective_class(const ActionId& a) const {
        switch (override_) {
            case ClassOverride::AllCheap: return ActionClass::Cheap;
            case ClassOverride::AllExpensive: return ActionClass::Expensive;
            case ClassOverride::None: break;
        }
        return a.cls;
    }

    /// Worker-side expansion (Algorithm-2 shape). Called without the lock.
    void expand(const EdgeKey& edge) {
        if (edge.action.is_dummy()) {
            {
                std::unique_lock lk(sync_.mutex);
                // Source is already in BE with priority g + w*h; its g is
                // frozen, so the expensive edges inherit that priority.
                const auto& rec = table_[edge.state];
                const Cost f_src = cfg_.f_value(rec.g, rec.h);
                bool pushed = false;
                for (const auto& a : actions_) {
                    if (effective_class(a) != ActionClass::Expensive) continue;
                    assert(!open_.contains(EdgeKey{edge.state, dummy_action()}));
                    open_.insert_or_update(EdgeKey{edge.state, a}, f_src);
                    pushed = true;
                }
                if (pushed) sync_.notify_change();
            }
            for (const auto& a : actions_) {
                if (effective_class(a) != ActionClass::Cheap) continue;
                if (sync_.terminate.load(std::memory_order_acquire)) return;
                expand_edge(EdgeKey{edge.state, a});
            }
        } else {
            expand_edge(edge);
        }
    }

    /// Evaluate one real edge, then apply the relaxation bookkeeping.
    void expand_edge(const EdgeKey& edge) {
        if (sync_.mutex.held_by_caller()) ++lock_violations_;
        if (hooks_ && hooks_->before_evaluate) hooks_->before_evaluate(edge);
        auto succ = domain_.generate_successor(edge);

        std::unique_lock lk(sync_.mutex);
        ++edge_evaluations_;
        if (succ) {
            auto& rec = table_.ensure(succ->state,
                                      [&](StateId s) { return domain_.heuristic(s); });
            const Cost new_g = table_[edge.state].g + succ->cost;
            if (rec.membership != Membership::Closed && rec.membership != Membership::BE &&
                rec.g > new_g) {
                if (hooks_ && hooks_->on_relax) hooks_->on_relax(succ->state, rec.g, new_g);
                rec.g = new_g;
                rec.parent = edge;
                rec.membership = Membership::Open;
                open_.insert_or_update(EdgeKey{succ->state, dummy_action()},
                                       cfg_.f_value(new_g, rec.h));
            }
        }
        auto& src = table_[edge.state];
        ++src.n_successors_generated;
        assert(src.n_successors_generated <= actions_.size());
        if (src.n_successors_generated == actions_.size()) {
            be_promote_to_closed(edge.state, be_, table_,
                                 static_cast<std::uint32_t>(actions_.size()));
            if (hooks_ && hooks_->on_close) hooks_->on_close(edge.state);
        }
        sync_.notify_change();
    }

    Domain& domain_;
    PlannerConfig cfg_;
    ClassOverride override_;
    PlannerHooks* hooks_;
    std::vector<ActionId> actions_;

    SearchSync sync_;
    WorkerPool* pool_ = nullptr;
    OpenQueue open_;
    BeQueue be_;
    StateTable table_;
    SteadyClock::time_point deadline_;

    std::uint64_t edge_evaluations_ = 0;
    std::uint64_t state_expansions_ = 0;
    std::uint64_t lock_violations_ = 0;
};

} // namespace detail

/// w-GePA*SE: dummy-edge pops enter BE, expensive edges become individual
/// parallel work units, cheap edges are expanded inline by the same worker.
inline SearchResult plan_gepase(Domain& domain, StateId start, const PlannerConfig& cfg,
                                PlannerHooks* hooks = nullptr) {
    return detail::ParallelEdgeSearch(domain, cfg, ClassOverride::None, hooks).run(start);
}

/// w-ePA*SE: every real edge is delegated to a worker (all actions treated as
/// expensive).
inline SearchResult plan_epase(Domain& domain, StateId start, const PlannerConfig& cfg,
                               PlannerHooks* hooks = nullptr) {
    return detail::ParallelEdgeSearch(domain, cfg, ClassOverride::AllExpensive, hooks)
        .run(start);
}

/// w-PA*SE: state-expansion parallelism; a worker evaluates all outgoing
/// edges of a popped state sequentially (all actions treated as cheap, so
/// only dummy edges ever appear in OPEN).
inline SearchResult plan_pase(Domain& domain, StateId start, const PlannerConfig& cfg,
                              PlannerHooks* hooks = nullptr) {
    return detail::ParallelEdgeSearch(domain, cfg, ClassOverride::AllCheap, hooks).run(start);
}

/// Textbook weighted A*: single thread, no independence machinery. Shares the
/// queue types and tie-breaking so paired-run comparisons against PA*SE with
/// one worker are exact.
inline SearchResult plan_wastar(Domain& domain, StateId start, const PlannerConfig& cfg,
                                PlannerHooks* hooks = nullptr) {
    cfg.validate();
    const auto t0 = detail::SteadyClock::now();
    const auto deadline = t0 + std::chrono::duration_cast<detail::SteadyClock::duration>(
                                   std::chrono::duration<double>(cfg.timeout_s));
    const auto& actions = domain.actions();

    OpenQueue open;
    BeQueue be;
    StateTable table;
    table.reserve(domain.state_space_hint());
    SearchResult result;
    std::uint64_t evaluations = 0, expansions = 0;

    auto& start_rec = table.ensure(start, [&](StateId s) { return domain.heuristic(s); });
    start_rec.g = 0;
    start_rec.membership = Membership::Open;
    open.insert_or_update(EdgeKey{start, dummy_action()}, cfg.f_value(0, start_rec.h));

    for (;;) {
        if (detail::SteadyClock::now() >= deadline) {
            result.status = SearchStatus::Timeout;
            break;
        }
        if (open.empty()) {
            result.status = SearchStatus::Exhausted;
            break;
        }
        const EdgeKey popped = open.pop_front();
        const StateId s = popped.state;
        if (domain.is_goal(s)) {
            result.status = SearchStatus::Solved;
            result.path = backtrack(s, table);
            result.cost = result.path->cost;
            break;
        }
        be.insert(s, cfg.f_value(table[s].g, table[s].h));
        table[s].membership = Membership::BE;
        ++expansions;
        for (const auto& a : actions) {
            const EdgeKey edge{s, a};
            if (hooks && hooks->before_evaluate) hooks->before_evaluate(edge);
            auto succ = domain.generate_successor(edge);
            ++evaluations;
            if (succ) {
                auto& rec =
                    table.ensure(succ->state, [&](StateId v) { return domain.heuristic(v); });
                const Cost new_g = table[s].g + succ->cost;
                if (rec.membership != Membership::Closed &&
                    rec.membership != Membership::BE && rec.g > new_g) {
                    if (hooks && hooks->on_relax) hooks->on_relax(succ->state, rec.g, new_g);
                    rec.g = new_g;
                    rec.parent = edge;
                    rec.membership = Membership::Open;
                    open.insert_or_update(EdgeKey{succ->state, dummy_action()},
                                          cfg.f_value(new_g, rec.h));
                }
            }
            ++table[s].n_successors_generated;
        }
        be_promote_to_closed(s, be, table, static_cast<std::uint32_t>(actions.size()));
        if (hooks && hooks->on_close) hooks->on_close(s);
    }

    result.stats.wall_time_s =
        std::chrono::duration<double>(detail::SteadyClock::now() - t0).count();
    result.stats.edge_evaluations = evaluations;
    result.stats.state_expansions = expansions;
    result.stats.reclosures = table.reclosures();
    return result;
}

} // namespace gepase
