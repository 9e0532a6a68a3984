#pragma once

#include <atomic>
#include <cassert>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "gepase/core/types.hpp"

namespace gepase {

/// std::mutex that tracks its owning thread so evaluation code can assert the
/// global search lock is NOT held across domain calls.
class OwnedMutex {
public:
    void lock() {
        mutex_.lock();
        owner_.store(std::this_thread::get_id(), std::memory_order_relaxed);
    }
    void unlock() {
        owner_.store(std::thread::id{}, std::memory_order_relaxed);
        mutex_.unlock();
    }
    bool try_lock() {
        if (!mutex_.try_lock()) return false;
        owner_.store(std::this_thread::get_id(), std::memory_order_relaxed);
        return true;
    }
    bool held_by_caller() const {
        return owner_.load(std::memory_order_relaxed) == std::this_thread::get_id();
    }

private:
    std::mutex mutex_;
    std::atomic<std::thread::id> owner_{};
};

/// The system's entire concurrency contract: one global lock, one
/// broadcast-capable change signal covering OPEN/BE mutations, worker
/// completions and termination, and one terminate flag readable without the
/// lock.
///
/// The signal is versioned so a notify that lands before a waiter arrives is
/// never lost: callers snapshot version() under the lock, decide to wait,
/// then pass the snapshot to wait_for_change().
class SearchSync {
public:
    OwnedMutex mutex;
    std::atomic<bool> terminate{false};

    std::uint64_t version() const {
        assert(mutex.held_by_caller());
        return version_;
    }

    /// Requires the lock. Announces any OPEN/BE mutation, worker state
    /// change, or termination.
    void notify_change() {
        assert(mutex.held_by_caller());
        ++version_;
        cv_.notify_all();
    }

    /// Requires the lock.
    void request_terminate() {
        assert(mutex.held_by_caller());
        terminate.store(true, std::memory_order_release);
        notify_change();
    }

    /// Releases the lock while blocked, re-acquires before returning.
    /// Returns as soon as any change has been signalled since `seen` was
    /// snapshotted; spurious wakeups are absorbed internally.
    void wait_for_change(std::unique_lock<OwnedMutex>& lk, std::uint64_t seen) {
        cv_.wait(lk, [&] { return version_ != seen; });
    }

    /// Deadline-bounded variant. Returns false on timeout with no change.
    template <typename Clock, typename Duration>
    bool wait_for_change_until(std::unique_lock<OwnedMutex>& lk, std::uint64_t seen,
                               const std::chrono::time_point<Clock, Duration>& deadline) {
        return cv_.wait_until(lk, deadline, [&] { return version_ != seen; });
    }

private:
    std::uint64_t version_ = 0;
    std::condition_variable_any cv_;
};

/// N_t lazily spawned expansion workers sharing the global lock and change
/// signal. A worker owns at most one assignment at a time; completion (and
/// idling) is announced through the change signal so a blocked coordinator
/// always wakes.
class WorkerPool {
public:
    using ExpandFn = std::function<void(const EdgeKey&)>;

    WorkerPool(unsigned capacity, SearchSync& sync, ExpandFn expand)
        : sync_(sync), expand_(std::move(expand)), slots_(capacity) {}

    ~WorkerPool() { shutdown(); }

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    /// Requires the lock: true if an assignment would not block.
    bool has_idle() const {
        assert(sync_.mutex.held_by_caller());
        if (spawned_ < slots_.size()) return true;
        for (const auto& s : slots_)
            if (s.spawned && !s.busy) return true;
        return false;
    }

    /// Requires the lock.
    unsigned spawned() const {
        assert(sync_.mutex.held_by_caller());
        return static_cast<unsigned>(spawned_);
    }

    /// Call without the lock. Blocks until some worker is free, then hands it
    /// the edge. Exactly one worker will run the expand callback once.
    void assign(const EdgeKey& edge) {
        std::unique_lock lk(sync_.mutex);
        for (;;) {
            if (sync_.terminate.load(std::memory_order_acquire))
                throw std::runtime_error("WorkerPool::assign after shutdown");
            // Prefer an already-spawned idle worker; spawn a new one only
            // when every live worker is busy.
            std::size_t pick = slots_.size();
            for (std::size_t i = 0; i < slots_.size(); ++i) {
                if (slots_[i].spawned && !slots_[i].busy) { pick = i; break; }
            }
            if (pick == slots_.size() && spawned_ < slots_.size()) pick = spawned_;
            if (pick < slots_.size()) {
                Slot& s = slots_[pick];
                if (!s.spawned) {
                    s.spawned = true;
                    ++spawned_;
                    s.thread = std::thread([this, pick] { worker_main(pick); });
                }
                s.work = edge;
                s.busy = true;
                sync_.notify_change();
                return;
            }
            const auto seen = sync_.version();
            sync_.wait_for_change(lk, seen);
        }
    }

    /// Idempotent. Raises terminate, wakes everyone, joins all spawned
    /// workers. Each worker finishes at most its current assignment.
    void shutdown() {
        {
            std::unique_lock lk(sync_.mutex);
            sync_.request_terminate();
        }
        for (auto& s : slots_) {
            if (s.thread.joinable()) s.thread.join();
        }
    }

    /// Requires the lock. First exception thrown by a worker's callback, if
    /// any; raising it also set terminate.
    std::exception_ptr error() const {
        assert(sync_.mutex.held_by_caller());
        return error_;
    }

private:
    struct Slot {
        std::thread thread;
        std::optional<EdgeKey> work;
        bool busy = false;
        bool spawned = false;
    };

    void worker_main(std::size_t index) {
        Slot& slot = slots_[index];
        std::unique_lock lk(sync_.mutex);
        for (;;) {
            while (!sync_.terminate.load(std::memory_order_acquire) && !slot.work) {
                const auto seen = sync_.version();
                sync_.wait_for_change(lk, seen);
            }
            if (sync_.terminate.load(std::memory_order_acquire)) return;
            const EdgeKey edge = *slot.work;
            lk.unlock();
            std::exception_ptr err;
            try {
                expand_(edge);
            } catch (...) {
                err = std::current_exception();
            }
            lk.lock();
            slot.work.reset();
            slot.busy = false;
            if (err && !error_) {
                error_ = err;
                sync_.terminate.store(true, std::memory_order_release);
            }
            sync_.notify_change();
        }
    }

    SearchSync& sync_;
    ExpandFn expand_;
    std::vector<Slot> slots_;
    std::size_t spawned_ = 0;
    std::exception_ptr error_;
};

} // namespace gepase
