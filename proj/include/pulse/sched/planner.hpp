#pragma once

#include "pulse/survey/domain.hpp"
#include "pulse/time.hpp"

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace pulse::sched {

struct InboundForecast {
    /// Expected inbound arrivals per period.
    std::vector<double> expected;
    double spike_multiplier = 1.0;
};

/// Throws ValidationError on negative arrivals or a multiplier below 1.
void validate(const InboundForecast& f);

struct PeriodAllocation {
    int inbound_reserve = 0;
    int outbound_budget = 0;
};

struct WorkloadMix {
    std::vector<PeriodAllocation> periods;
    /// Outbound calls that do not fit in the summed budget.
    int shortfall = 0;
};

/// reserve_t = min(capacity, ceil(expected_t * spike_multiplier)),
/// budget_t = capacity - reserve_t. Periods beyond the forecast get no reserve.
WorkloadMix mix_workloads(const InboundForecast& forecast, int backlog, int capacity, int horizon);

/// Fixed reserve in every period, e.g. capacity / 2 for a static split.
WorkloadMix static_split(int reserve, int backlog, int capacity, int horizon);

struct PlanningWindow {
    Timestamp start;  ///< UTC start of period 0
    std::chrono::minutes period_length{60};
    int horizon = 24;  ///< number of periods
};

struct CallSlot {
    std::string patient_id;
    Timestamp start;
    int period = 0;
};

struct CallPlan {
    /// Ordered by period, then patient id.
    std::vector<CallSlot> slots;
    std::vector<int> capacity_profile;
    std::vector<int> inbound_reserve;
    /// Patients with no eligible period left; they roll to the next horizon.
    std::vector<std::string> unplaced;
};

/// Minute of day of `t` on the patient's local clock.
int local_minute_of_day(Timestamp t, const std::string& timezone);
/// Local wall-clock rendering, e.g. 2025-03-04T09:00:00-05:00.
std::string format_local(Timestamp t, const std::string& timezone);

/// Periods whose start lies inside the patient's window, in period order.
std::vector<int> eligible_periods(const survey::PatientProfile& patient, const PlanningWindow& window);

/// Places at most one outbound call per patient into the per-period budgets of
/// `mix`. Periods are tried lowest forecast first (ties by index), patients with
/// fewer eligible periods first; augmenting paths then move earlier placements
/// when that lets another patient in, so the number placed is maximal.
CallPlan place_calls(const std::vector<survey::PatientProfile>& patients, const PlanningWindow& window,
                     int capacity, const WorkloadMix& mix, const std::vector<double>& forecast_order);

/// mix_workloads followed by place_calls. Throws ValidationError when
/// capacity <= 0, horizon < 1 or a patient profile is invalid.
CallPlan plan_outbound(const std::vector<survey::PatientProfile>& patients, const PlanningWindow& window,
                       int capacity, const InboundForecast& forecast);

/// Throws Error naming the first window or capacity violation.
void check_plan(const CallPlan& plan, const std::vector<survey::PatientProfile>& patients,
                const PlanningWindow& window);

/// patient_id,utc_start,local_start,period
std::string plan_csv(const CallPlan& plan, const std::vector<survey::PatientProfile>& patients);

}  // namespace pulse::sched
