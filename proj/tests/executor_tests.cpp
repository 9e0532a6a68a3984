#include <atomic>
#include <chrono>
#include <thread>
#include <vector>

#include <catch_amalgamated.hpp>

#include "gepase/executor.hpp"

using namespace gepase;
using namespace std::chrono_literals;

namespace {

EdgeKey edge_of(StateId s) { return EdgeKey{s, ActionId{0, ActionClass::Expensive}}; }

} // namespace

TEST_CASE("owned mutex tracks its holder", "[executor]") {
    OwnedMutex mu;
    REQUIRE_FALSE(mu.held_by_caller());
    {
        std::unique_lock lk(mu);
        REQUIRE(mu.held_by_caller());
        std::thread other([&] { REQUIRE_FALSE(mu.held_by_caller()); });
        other.join();
    }
    REQUIRE_FALSE(mu.held_by_caller());
}

TEST_CASE("wait_for_change sees a signal raised before the wait", "[executor]") {
    SearchSync sync;
    std::uint64_t seen;
    {
        std::unique_lock lk(sync.mutex);
        seen = sync.version();
    }
    {
        std::unique_lock lk(sync.mutex);
        sync.notify_change();
    }
    std::unique_lock lk(sync.mutex);
    sync.wait_for_change(lk, seen); // must return immediately, not deadlock
    REQUIRE(sync.version() != seen);
}

TEST_CASE("terminate wakes a waiting coordinator", "[executor]") {
    SearchSync sync;
    std::atomic<bool> woke{false};
    std::thread waiter([&] {
        std::unique_lock lk(sync.mutex);
        const auto seen = sync.version();
        sync.wait_for_change(lk, seen);
        REQUIRE(sync.terminate.load());
        woke = true;
    });
    std::this_thread::sleep_for(20ms);
    {
        std::unique_lock lk(sync.mutex);
        sync.request_terminate();
    }
    waiter.join();
    REQUIRE(woke.load());
}

TEST_CASE("a mutation from another thread wakes the waiter", "[executor]") {
    SearchSync sync;
    std::atomic<bool> woke{false};
    std::thread waiter([&] {
        std::unique_lock lk(sync.mutex);
        const auto seen = sync.version();
        sync.wait_for_change(lk, seen);
        woke = true;
    });
    std::thread mutator([&] {
        std::this_thread::sleep_for(20ms);
        std::unique_lock lk(sync.mutex);
        sync.notify_change(); // stands in for an OPEN insert
    });
    waiter.join();
    mutator.join();
    REQUIRE(woke.load());
}

TEST_CASE("deadline-bounded wait times out without a change", "[executor]") {
    SearchSync sync;
    std::unique_lock lk(sync.mutex);
    const auto seen = sync.version();
    const bool changed = sync.wait_for_change_until(
        lk, seen, std::chrono::steady_clock::now() + 30ms);
    REQUIRE_FALSE(changed);
}

TEST_CASE("immediate assignment with an idle pool", "[executor]") {
    SearchSync sync;
    std::atomic<int> runs{0};
    WorkerPool pool(1, sync, [&](const EdgeKey&) { ++runs; });
    pool.assign(edge_of(1));
    // Completion is only observable through the change signal.
    std::unique_lock lk(sync.mutex);
    while (runs.load() == 0) {
        const auto seen = sync.version();
        sync.wait_for_change(lk, seen);
    }
    REQUIRE(runs.load() == 1);
}

TEST_CASE("assign blocks while the only worker is busy", "[executor]") {
    SearchSync sync;
    std::atomic<int> started{0}, finished{0};
    WorkerPool pool(1, sync, [&](const EdgeKey&) {
        ++started;
        std::this_thread::sleep_for(50ms);
        ++finished;
    });
    pool.assign(edge_of(1));
    const auto t0 = std::chrono::steady_clock::now();
    pool.assign(edge_of(2)); // must block until the first expansion completes
    const auto waited = std::chrono::steady_clock::now() - t0;
    REQUIRE(finished.load() >= 1);
    REQUIRE(waited >= 30ms);
    pool.shutdown();
    REQUIRE(started.load() == 2);
}

TEST_CASE("every assignment expands exactly once", "[executor][stress]") {
    SearchSync sync;
    std::mutex seen_mu;
    std::vector<int> seen(100, 0);
    WorkerPool pool(4, sync, [&](const EdgeKey& e) {
        std::this_thread::sleep_for(std::chrono::microseconds(e.state % 37));
        std::lock_guard g(seen_mu);
        ++seen[e.state];
    });
    for (StateId s = 0; s < 100; ++s) pool.assign(edge_of(s));
    pool.shutdown();
    for (int count : seen) REQUIRE(count == 1);
    {
        std::unique_lock lk(sync.mutex);
        REQUIRE(pool.spawned() <= 4);
        REQUIRE(pool.spawned() >= 1);
    }
}

TEST_CASE("shutdown is idempotent and safe with no workers", "[executor]") {
    SearchSync sync;
    {
        WorkerPool pool(4, sync, [](const EdgeKey&) {});
        pool.shutdown();
        pool.shutdown();
        std::unique_lock lk(sync.mutex);
        REQUIRE(pool.spawned() == 0);
    }
}

TEST_CASE("shutdown during in-flight expansions joins cleanly", "[executor][stress]") {
    SearchSync sync;
    std::atomic<int> running{0}, completed{0};
    WorkerPool pool(8, sync, [&](const EdgeKey&) {
        ++running;
        std::this_thread::sleep_for(10ms);
        ++completed;
        --running;
    });
    for (StateId s = 0; s < 8; ++s) pool.assign(edge_of(s));
    pool.shutdown();
    REQUIRE(running.load() == 0);
    REQUIRE(completed.load() <= 8);
}

TEST_CASE("assign after terminate is rejected", "[executor]") {
    SearchSync sync;
    WorkerPool pool(2, sync, [](const EdgeKey&) {});
    pool.shutdown();
    REQUIRE_THROWS_AS(pool.assign(edge_of(1)), std::runtime_error);
}

TEST_CASE("worker exceptions surface through error() and raise terminate", "[executor]") {
    SearchSync sync;
    WorkerPool pool(2, sync, [](const EdgeKey&) { throw std::domain_error("boom"); });
    pool.assign(edge_of(1));
    {
        std::unique_lock lk(sync.mutex);
        while (!pool.error()) {
            const auto seen = sync.version();
            sync.wait_for_change(lk, seen);
        }
        REQUIRE(sync.terminate.load());
        REQUIRE_THROWS_AS(std::rethrow_exception(pool.error()), std::domain_error);
    }
    pool.shutdown();
}
