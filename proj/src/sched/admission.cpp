#include "pulse/sched/admission.hpp"

#include "pulse/error.hpp"

namespace pulse::sched {

std::string_view to_string(Admission a) {
    switch (a) {
        case Admission::Accept: return "Accept";
        case Admission::Queue: return "Queue";
        case Admission::Shed: return "Shed";
    }
    return "?";
}

Admission admit_inbound(int current_load, int capacity, int queue_band) {
    if (current_load < capacity) return Admission::Accept;
    if (current_load < capacity + queue_band) return Admission::Queue;
    return Admission::Shed;
}

AdmissionController::AdmissionController(int capacity, int queue_band) : capacity_(capacity), band_(queue_band) {
    if (capacity < 0 || queue_band < 0) throw ValidationError("capacity and queue band must be non-negative");
}

Admission AdmissionController::request() {
    std::lock_guard lock(mu_);
    const auto a = admit_inbound(active_ + queued_, capacity_, band_);
    if (a == Admission::Accept) ++active_;
    if (a == Admission::Queue) ++queued_;
    return a;
}

void AdmissionController::release() {
    std::lock_guard lock(mu_);
    if (active_ == 0) throw StateError("no active call to release");
    --active_;
}

bool AdmissionController::promote() {
    std::lock_guard lock(mu_);
    if (queued_ == 0 || active_ >= capacity_) return false;
    --queued_;
    ++active_;
    return true;
}

int AdmissionController::active() const {
    std::lock_guard lock(mu_);
    return active_;
}

int AdmissionController::queued() const {
    std::lock_guard lock(mu_);
    return queued_;
}

}  // namespace pulse::sched
