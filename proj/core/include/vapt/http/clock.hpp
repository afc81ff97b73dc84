#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <vector>

namespace vapt::http {

/// Time source used for politeness delays; swapped for ManualClock in tests.
class Clock {
public:
    using duration = std::chrono::steady_clock::duration;
    using time_point = std::chrono::steady_clock::time_point;

    virtual ~Clock() = default;
    [[nodiscard]] virtual time_point now() const = 0;
    virtual void sleep_until(time_point deadline) = 0;
};

class SteadyClock final : public Clock {
public:
    [[nodiscard]] time_point now() const override { return std::chrono::steady_clock::now(); }
    void sleep_until(time_point deadline) override;
};

/// Virtual time: sleeping jumps the clock forward instead of blocking.
class ManualClock final : public Clock {
public:
    [[nodiscard]] time_point now() const override;
    void sleep_until(time_point deadline) override;
    void advance(duration d);

private:
    mutable std::mutex mutex_;
    time_point current_{};
};

std::shared_ptr<Clock> steady_clock();

} // namespace vapt::http
