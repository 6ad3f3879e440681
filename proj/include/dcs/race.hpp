#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <thread>

namespace dcs {

using Rng = std::mt19937_64;

struct RaceOptions {
    std::uint64_t work_unit = 1024;
    bool parallel = false;
};

// The two competitors of a sampling operation: a repeated randomized attempt and a full enumeration.
template <class T>
struct Contest {
    // One attempt; adds the work it did to `steps`.
    std::function<std::optional<T>(Rng&, std::uint64_t& steps)> attempt;
    // Advances the enumeration by a budget of work; true once it has finished.
    std::function<bool(std::uint64_t budget)> enumerate;
    // Uniform draw from the finished enumeration, nullopt when it is empty.
    std::function<std::optional<T>(Rng&)> pick;
};

template <class T>
struct RaceResult {
    std::optional<T> value;
    bool by_enumeration = false;
    std::uint64_t attempts = 0;
};

// Alternates work_unit slices between the attempts and the enumeration; the first to finish wins.
template <class T>
RaceResult<T> run_race(Contest<T>& contest, Rng& rng, const RaceOptions& opt) {
    RaceResult<T> out;
    if (opt.parallel) {
        std::atomic<bool> enum_done{false}, stop{false};
        std::thread worker([&] {
            while (!stop.load(std::memory_order_relaxed))
                if (contest.enumerate(opt.work_unit)) {
                    enum_done = true;
                    return;
                }
        });
        Rng local(rng());
        while (!enum_done.load()) {
            std::uint64_t steps = 0;
            ++out.attempts;
            if (auto v = contest.attempt(local, steps)) {
                out.value = std::move(v);
                break;
            }
        }
        stop = true;
        worker.join();
        if (!out.value) {
            out.by_enumeration = true;
            out.value = contest.pick(rng);
        }
        return out;
    }
    for (;;) {
        std::uint64_t steps = 0;
        while (steps < opt.work_unit) {
            ++out.attempts;
            std::uint64_t before = steps;
            if (auto v = contest.attempt(rng, steps)) {
                out.value = std::move(v);
                return out;
            }
            if (steps == before) ++steps;
        }
        if (contest.enumerate(opt.work_unit)) {
            out.by_enumeration = true;
            out.value = contest.pick(rng);
            return out;
        }
    }
}

}  // namespace dcs
