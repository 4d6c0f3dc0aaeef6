#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ksel/channel.hpp"
#include "ksel/protocol.hpp"
#include "ksel/rng.hpp"

namespace ksel {

/// Exp Back-on/Back-off window sequence: an outer loop doubles the nominal
/// window (w = 2^i), an inner loop shrinks it by (1 - delta) while w >= 1.
/// The realized window length is ceil(w); w itself is never rounded between
/// iterations, so the geometric structure of the sequence is preserved.
class EboboSchedule {
public:
    explicit EboboSchedule(double delta);

    std::uint64_t window_length() const { return length_; }
    int phase() const { return phase_; }
    void next_window();

private:
    double delta_;
    int phase_ = 1;
    double window_real_ = 2.0;
    std::uint64_t length_ = 2;
};

/// Loglog-iterated Back-off window sequence with growth factor r: phase p
/// contributes max(1, ceil(log2 log2 r^p)) windows of length ceil(r^p).
class LlibSchedule {
public:
    explicit LlibSchedule(double r);

    std::uint64_t window_length() const { return length_; }
    int phase() const { return phase_; }
    int repetitions_in_phase() const { return reps_in_phase_; }
    void next_window();

private:
    void enter_phase(int phase);

    double r_;
    int phase_ = 1;
    int rep_ = 0;
    int reps_in_phase_ = 1;
    std::uint64_t length_ = 2;
};

/// Window lengths of the first max_phases outer iterations, in slot order.
std::vector<std::uint64_t> ebobo_window_schedule(double delta, int max_phases);
std::vector<std::uint64_t> llib_schedule(double r, int max_phases);

/// Per-node state shared by the window protocols: in every window the node
/// picks one uniformly random slot and transmits only there, staying silent
/// for the rest of the window even after a collision. The slot is drawn
/// lazily by the first decide() of the window.
template <typename Schedule>
class WindowNode {
public:
    explicit WindowNode(Schedule schedule) : schedule_(std::move(schedule)) {}

    ProtocolDecision decide(std::uint64_t /*slot_index*/, Rng& rng) {
        if (terminal_) {
            throw std::logic_error("WindowNode::decide: node already delivered");
        }
        if (!chosen_drawn_) {
            chosen_slot_ = uniform_below(rng, schedule_.window_length());
            chosen_drawn_ = true;
        }
        return {offset_in_window_ == chosen_slot_};
    }

    void advance(std::uint64_t /*slot_index*/, const Observation& obs) {
        if (terminal_) {
            throw std::logic_error("WindowNode::advance: node already delivered");
        }
        if (obs.kind == Observation::Kind::OwnDelivery) {
            terminal_ = true;
            return;
        }
        if (++offset_in_window_ == schedule_.window_length()) {
            offset_in_window_ = 0;
            chosen_drawn_ = false;
            schedule_.next_window();
        }
    }

    bool terminal() const { return terminal_; }
    std::uint64_t window_length() const { return schedule_.window_length(); }
    std::uint64_t offset_in_window() const { return offset_in_window_; }
    bool chosen_slot_drawn() const { return chosen_drawn_; }
    std::uint64_t chosen_slot() const { return chosen_slot_; }

private:
    Schedule schedule_;
    std::uint64_t offset_in_window_ = 0;
    std::uint64_t chosen_slot_ = 0;
    bool chosen_drawn_ = false;
    bool terminal_ = false;
};

using EboboNode = WindowNode<EboboSchedule>;
using LlibNode = WindowNode<LlibSchedule>;

static_assert(SlotProtocol<EboboNode>);
static_assert(SlotProtocol<LlibNode>);

}  // namespace ksel
