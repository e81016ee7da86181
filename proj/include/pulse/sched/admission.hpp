#pragma once

#include <mutex>
#include <string_view>

namespace pulse::sched {

enum class Admission { Accept, Queue, Shed };

std::string_view to_string(Admission a);

/// Accept while load < capacity, Queue while load < capacity + queue_band,
/// Shed beyond.
Admission admit_inbound(int current_load, int capacity, int queue_band);

/// Single admission authority for one capacity pool. Accepted calls hold a
/// line until release(); queued calls are counted but hold nothing.
class AdmissionController {
public:
    AdmissionController(int capacity, int queue_band);

    Admission request();
    /// Ends an accepted call. Throws StateError when nothing is active.
    void release();
    /// Moves a queued call to active if a line is free; returns whether it did.
    bool promote();

    int active() const;
    int queued() const;

private:
    mutable std::mutex mu_;
    int capacity_;
    int band_;
    int active_ = 0;
    int queued_ = 0;
};

}  // namespace pulse::sched
