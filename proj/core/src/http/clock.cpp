#include "vapt/http/clock.hpp"

#include <thread>

namespace vapt::http {

void SteadyClock::sleep_until(time_point deadline) { std::this_thread::sleep_until(deadline); }

Clock::time_point ManualClock::now() const
{
    std::lock_guard lock(mutex_);
    return current_;
}

void ManualClock::sleep_until(time_point deadline)
{
    std::lock_guard lock(mutex_);
    if (deadline > current_)
        current_ = deadline;
}

void ManualClock::advance(duration d)
{
    std::lock_guard lock(mutex_);
    current_ += d;
}

std::shared_ptr<Clock> steady_clock()
{
    static auto clock = std::make_shared<SteadyClock>();
    return clock;
}

} // namespace vapt::http
