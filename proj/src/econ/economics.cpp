#include "pulse/econ/economics.hpp"

#include "pulse/error.hpp"

#include <cmath>
#include <sstream>

namespace pulse::econ {

double round_currency(double amount) { return std::round(amount * 100.0) / 100.0; }

double cost_efficiency(double C_h, double C_a) {
    if (!(C_h > 0.0)) throw ValidationError("cost efficiency needs C_h > 0");
    return (C_h - C_a) / C_h * 100.0;
}

std::string_view to_string(IcerLabel l) {
    switch (l) {
        case IcerLabel::Dominant: return "Dominant";
        case IcerLabel::Dominated: return "Dominated";
        case IcerLabel::MoreCostlyMoreEffective: return "MoreCostlyMoreEffective";
        case IcerLabel::LessCostlyLessEffective: return "LessCostlyLessEffective";
    }
    return "?";
}

IcerResult icer(const CareCosts& c) {
    if (c.QALY_a < 0.0 || c.QALY_h < 0.0) throw ValidationError("QALYs must be non-negative");
    const double dq = c.QALY_a - c.QALY_h;
    if (dq == 0.0) throw ValidationError("ICER undefined: equal QALYs");
    const double dc = c.C_a - c.C_h;

    IcerResult out;
    out.value = round_currency(dc / dq);
    if (dq > 0.0) {
        out.label = dc <= 0.0 ? IcerLabel::Dominant : IcerLabel::MoreCostlyMoreEffective;
    } else {
        out.label = dc >= 0.0 ? IcerLabel::Dominated : IcerLabel::LessCostlyLessEffective;
    }
    return out;
}

MonitoringCosts monitoring_costs(const CohortEconConfig& cfg) {
    if (cfg.N_p <= 0) throw ValidationError("cost reduction undefined for an empty cohort (N_p = 0)");
    if (cfg.C_m < 0.0 || cfg.F < 0.0 || cfg.V_a < 0.0) {
        throw ValidationError("monitoring costs must be non-negative");
    }
    MonitoringCosts out;
    const double n = static_cast<double>(cfg.N_p);
    const double human = n * cfg.C_m;
    const double ai = cfg.F + n * cfg.V_a;
    if (!(human > 0.0)) throw ValidationError("cost reduction undefined: human monitoring cost is zero");
    out.C_human = round_currency(human);
    out.C_AI = round_currency(ai);
    out.R = (human - ai) / human * 100.0;
    if (cfg.V_a >= cfg.C_m) {
        std::ostringstream msg;
        msg << "AI variable cost " << cfg.V_a << " is not below monitoring cost " << cfg.C_m;
        out.warnings.push_back(msg.str());
    }
    return out;
}

double npv(const std::vector<CashFlow>& flows, double r) {
    if (!(r > -1.0)) throw ValidationError("discount rate must exceed -1");
    double sum = 0.0;
    double factor = 1.0;
    for (const auto& f : flows) {
        sum += (f.benefit - f.cost) / factor;
        factor *= 1.0 + r;
    }
    return round_currency(sum);
}

}  // namespace pulse::econ
