#include "ksel/backoff.hpp"

#include <cmath>

namespace ksel {

EboboSchedule::EboboSchedule(double delta) : delta_(delta) {
    if (!(delta > 0.0 && delta < kEboboDeltaMax)) {
        throw std::invalid_argument("EboboSchedule: delta must lie in (0, 1/e)");
    }
}

void EboboSchedule::next_window() {
    window_real_ *= (1.0 - delta_);
    if (window_real_ < 1.0) {
        ++phase_;
        window_real_ = std::ldexp(1.0, phase_);  // 2^phase, exact
    }
    length_ = static_cast<std::uint64_t>(std::ceil(window_real_));
}

LlibSchedule::LlibSchedule(double r) : r_(r) {
    if (!(r > 1.0)) {
        throw std::invalid_argument("LlibSchedule: r must be > 1");
    }
    enter_phase(1);
}

void LlibSchedule::enter_phase(int phase) {
    phase_ = phase;
    rep_ = 0;
    length_ = static_cast<std::uint64_t>(std::ceil(std::pow(r_, phase)));
    // log2 log2 of the nominal window; at most one repetition while the
    // window is still <= 2.
    const double log2_window = phase * std::log2(r_);
    if (log2_window <= 1.0) {
        reps_in_phase_ = 1;
    } else {
        reps_in_phase_ = std::max(1, static_cast<int>(std::ceil(std::log2(log2_window))));
    }
}

void LlibSchedule::next_window() {
    if (++rep_ >= reps_in_phase_) {
        enter_phase(phase_ + 1);
    }
}

namespace {

template <typename Schedule>
std::vector<std::uint64_t> collect_schedule(Schedule schedule, int max_phases) {
    if (max_phases < 1) {
        throw std::invalid_argument("schedule: max_phases must be >= 1");
    }
    std::vector<std::uint64_t> lengths;
    while (schedule.phase() <= max_phases) {
        lengths.push_back(schedule.window_length());
        schedule.next_window();
    }
    return lengths;
}

}  // namespace

std::vector<std::uint64_t> ebobo_window_schedule(double delta, int max_phases) {
    return collect_schedule(EboboSchedule(delta), max_phases);
}

std::vector<std::uint64_t> llib_schedule(double r, int max_phases) {
    return collect_schedule(LlibSchedule(r), max_phases);
}

}  // namespace ksel
