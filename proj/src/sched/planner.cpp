#include "pulse/sched/planner.hpp"

#include "pulse/error.hpp"

#include <absl/time/time.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace pulse::sched {

namespace {

absl::TimeZone zone(const std::string& name) {
    absl::TimeZone tz;
    if (!absl::LoadTimeZone(name, &tz)) throw ValidationError("unknown timezone '" + name + "'");
    return tz;
}

Timestamp period_start(const PlanningWindow& w, int period) {
    return w.start + std::chrono::duration_cast<std::chrono::seconds>(w.period_length * period);
}

double forecast_at(const std::vector<double>& f, int period) {
    return period < static_cast<int>(f.size()) ? f[static_cast<size_t>(period)] : 0.0;
}

class Matcher {
public:
    Matcher(std::vector<std::vector<int>> options, std::vector<int> budget)
        : options_(std::move(options)), budget_(std::move(budget)), assigned_(options_.size(), -1),
          occupants_(budget_.size()) {}

    bool place_free(size_t i) {
        for (int p : options_[i]) {
            if (load(p) < budget_[static_cast<size_t>(p)]) {
                assign(i, p);
                return true;
            }
        }
        return false;
    }

    bool augment(size_t i) {
        std::vector<char> visited(budget_.size(), 0);
        return augment(i, visited);
    }

    int period_of(size_t i) const { return assigned_[i]; }

private:
    int load(int p) const { return static_cast<int>(occupants_[static_cast<size_t>(p)].size()); }

    void assign(size_t i, int p) {
        if (assigned_[i] >= 0) {
            auto& occ = occupants_[static_cast<size_t>(assigned_[i])];
            occ.erase(std::find(occ.begin(), occ.end(), i));
        }
        assigned_[i] = p;
        occupants_[static_cast<size_t>(p)].push_back(i);
    }

    bool augment(size_t i, std::vector<char>& visited) {
        for (int p : options_[i]) {
            if (!visited[static_cast<size_t>(p)] && load(p) < budget_[static_cast<size_t>(p)]) {
                visited[static_cast<size_t>(p)] = 1;
                assign(i, p);
                return true;
            }
        }
        for (int p : options_[i]) {
            if (visited[static_cast<size_t>(p)] || budget_[static_cast<size_t>(p)] == 0) continue;
            visited[static_cast<size_t>(p)] = 1;
            const auto occ = occupants_[static_cast<size_t>(p)];
            for (size_t j : occ) {
                if (augment(j, visited)) {
                    assign(i, p);
                    return true;
                }
            }
        }
        return false;
    }

    std::vector<std::vector<int>> options_;
    std::vector<int> budget_;
    std::vector<int> assigned_;
    std::vector<std::vector<size_t>> occupants_;
};

}  // namespace

void validate(const InboundForecast& f) {
    if (!(f.spike_multiplier >= 1.0)) throw ValidationError("spike multiplier must be at least 1");
    for (double e : f.expected) {
        if (!(e >= 0.0)) throw ValidationError("expected arrivals must be non-negative");
    }
}

WorkloadMix mix_workloads(const InboundForecast& forecast, int backlog, int capacity, int horizon) {
    validate(forecast);
    if (capacity <= 0) throw ValidationError("capacity must be positive");
    if (horizon < 0 || backlog < 0) throw ValidationError("horizon and backlog must be non-negative");
    WorkloadMix mix;
    int budget = 0;
    for (int t = 0; t < horizon; ++t) {
        const double demand = forecast_at(forecast.expected, t) * forecast.spike_multiplier;
        const double capped = std::min(static_cast<double>(capacity), std::ceil(demand));
        PeriodAllocation a;
        a.inbound_reserve = static_cast<int>(capped);
        a.outbound_budget = capacity - a.inbound_reserve;
        budget += a.outbound_budget;
        mix.periods.push_back(a);
    }
    mix.shortfall = std::max(0, backlog - budget);
    return mix;
}

WorkloadMix static_split(int reserve, int backlog, int capacity, int horizon) {
    if (capacity <= 0) throw ValidationError("capacity must be positive");
    if (reserve < 0 || reserve > capacity) throw ValidationError("reserve must lie in [0, capacity]");
    WorkloadMix mix;
    mix.periods.assign(static_cast<size_t>(std::max(horizon, 0)), {reserve, capacity - reserve});
    mix.shortfall = std::max(0, backlog - (capacity - reserve) * std::max(horizon, 0));
    return mix;
}

int local_minute_of_day(Timestamp t, const std::string& timezone) {
    const auto civil = absl::ToCivilMinute(absl::FromChrono(t), zone(timezone));
    return civil.hour() * 60 + civil.minute();
}

std::string format_local(Timestamp t, const std::string& timezone) {
    return absl::FormatTime("%Y-%m-%dT%H:%M:%S%Ez", absl::FromChrono(t), zone(timezone));
}

std::vector<int> eligible_periods(const survey::PatientProfile& patient, const PlanningWindow& window) {
    const auto tz = zone(patient.timezone);
    std::vector<int> out;
    for (int p = 0; p < window.horizon; ++p) {
        const auto civil = absl::ToCivilMinute(absl::FromChrono(period_start(window, p)), tz);
        if (patient.allowed_call_window.contains(civil.hour() * 60 + civil.minute())) out.push_back(p);
    }
    return out;
}

CallPlan place_calls(const std::vector<survey::PatientProfile>& patients, const PlanningWindow& window,
                     int capacity, const WorkloadMix& mix, const std::vector<double>& forecast_order) {
    if (capacity <= 0) throw ValidationError("capacity must be positive");
    if (window.horizon < 1) throw ValidationError("horizon must be at least one period");
    if (window.period_length.count() <= 0) throw ValidationError("period length must be positive");
    if (static_cast<int>(mix.periods.size()) != window.horizon) {
        throw ValidationError("workload mix does not cover the horizon");
    }
    std::set<std::string> ids;
    for (const auto& p : patients) {
        survey::validate(p);
        if (!ids.insert(p.id).second) throw ValidationError("duplicate patient id '" + p.id + "'");
    }

    std::vector<int> budget;
    for (const auto& a : mix.periods) {
        if (a.inbound_reserve < 0 || a.outbound_budget < 0 || a.inbound_reserve + a.outbound_budget > capacity) {
            throw ValidationError("workload allocation exceeds capacity");
        }
        budget.push_back(a.outbound_budget);
    }

    std::vector<std::vector<int>> options;
    for (const auto& p : patients) {
        auto periods = eligible_periods(p, window);
        std::stable_sort(periods.begin(), periods.end(), [&](int a, int b) {
            return forecast_at(forecast_order, a) < forecast_at(forecast_order, b);
        });
        options.push_back(std::move(periods));
    }

    std::vector<size_t> order(patients.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (options[a].size() != options[b].size()) return options[a].size() < options[b].size();
        return patients[a].id < patients[b].id;
    });

    Matcher m(options, budget);
    std::vector<size_t> missed;
    for (size_t i : order) {
        if (!m.place_free(i)) missed.push_back(i);
    }
    for (size_t i : missed) m.augment(i);

    CallPlan plan;
    plan.capacity_profile.assign(static_cast<size_t>(window.horizon), capacity);
    for (const auto& a : mix.periods) plan.inbound_reserve.push_back(a.inbound_reserve);
    for (size_t i = 0; i < patients.size(); ++i) {
        const int p = m.period_of(i);
        if (p < 0) {
            plan.unplaced.push_back(patients[i].id);
        } else {
            plan.slots.push_back({patients[i].id, period_start(window, p), p});
        }
    }
    std::sort(plan.slots.begin(), plan.slots.end(), [](const CallSlot& a, const CallSlot& b) {
        return std::tie(a.period, a.patient_id) < std::tie(b.period, b.patient_id);
    });
    return plan;
}

CallPlan plan_outbound(const std::vector<survey::PatientProfile>& patients, const PlanningWindow& window,
                       int capacity, const InboundForecast& forecast) {
    const auto mix = mix_workloads(forecast, static_cast<int>(patients.size()), capacity, window.horizon);
    return place_calls(patients, window, capacity, mix, forecast.expected);
}

void check_plan(const CallPlan& plan, const std::vector<survey::PatientProfile>& patients,
                const PlanningWindow& window) {
    std::map<std::string, const survey::PatientProfile*> by_id;
    for (const auto& p : patients) by_id[p.id] = &p;
    std::map<int, int> per_period;
    std::set<std::string> seen;
    for (const auto& s : plan.slots) {
        const auto it = by_id.find(s.patient_id);
        if (it == by_id.end()) throw Error("slot for unknown patient " + s.patient_id);
        if (!seen.insert(s.patient_id).second) throw Error("patient " + s.patient_id + " scheduled twice");
        if (s.period < 0 || s.period >= window.horizon || s.start != period_start(window, s.period)) {
            throw Error("slot for " + s.patient_id + " is off the period grid");
        }
        const int minute = local_minute_of_day(s.start, it->second->timezone);
        if (!it->second->allowed_call_window.contains(minute)) {
            throw Error("slot for " + s.patient_id + " at " + format_utc(s.start) + " is outside the call window");
        }
        ++per_period[s.period];
    }
    for (int p = 0; p < window.horizon; ++p) {
        const size_t i = static_cast<size_t>(p);
        const int cap = i < plan.capacity_profile.size() ? plan.capacity_profile[i] : 0;
        const int reserve = i < plan.inbound_reserve.size() ? plan.inbound_reserve[i] : 0;
        if (per_period[p] + reserve > cap) {
            throw Error("period " + std::to_string(p) + " exceeds capacity");
        }
    }
}

std::string plan_csv(const CallPlan& plan, const std::vector<survey::PatientProfile>& patients) {
    std::map<std::string, std::string> tz;
    for (const auto& p : patients) tz[p.id] = p.timezone;
    std::ostringstream out;
    out << "patient_id,utc_start,local_start,period\n";
    for (const auto& s : plan.slots) {
        const auto it = tz.find(s.patient_id);
        out << s.patient_id << ',' << format_utc(s.start) << ','
            << (it == tz.end() ? std::string() : format_local(s.start, it->second)) << ',' << s.period << '\n';
    }
    return out.str();
}

}  // namespace pulse::sched
