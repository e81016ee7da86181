#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pulse::econ {

/// Rounds a currency amount to cents, half away from zero.
double round_currency(double amount);

/// Percentage cost reduction of AI care relative to human care:
///   E = (C_h - C_a) / C_h * 100
/// Negative when AI care costs more. Throws ValidationError when C_h <= 0.
double cost_efficiency(double C_h, double C_a);

struct CareCosts {
    double C_h = 0.0;  ///< human care, per patient per month
    double C_a = 0.0;  ///< AI care, per patient per month
    double QALY_h = 0.0;
    double QALY_a = 0.0;
};

/// Cost-effectiveness plane quadrant of AI care against human care.
enum class IcerLabel {
    Dominant,                 ///< no more costly and more effective
    Dominated,                ///< no less costly and less effective
    MoreCostlyMoreEffective,  ///< the ratio is a price per QALY gained
    LessCostlyLessEffective,  ///< the ratio is a saving per QALY lost
};

std::string_view to_string(IcerLabel l);

struct IcerResult {
    double value = 0.0;  ///< currency per QALY, rounded to cents
    IcerLabel label = IcerLabel::Dominant;
};

/// ICER = (C_a - C_h) / (QALY_a - QALY_h). Throws ValidationError when the
/// QALYs are equal (the ratio is undefined) or negative.
IcerResult icer(const CareCosts& costs);

struct CashFlow {
    double benefit = 0.0;
    double cost = 0.0;
};

struct CohortEconConfig {
    std::int64_t N_p = 0;  ///< patients
    double C_m = 0.0;      ///< traditional monitoring, per patient per month
    double F = 0.0;        ///< fixed AI deployment cost
    double V_a = 0.0;      ///< AI variable cost, per patient per month
    double r = 0.0;        ///< discount rate per period
    std::vector<CashFlow> flows;
};

struct MonitoringCosts {
    double C_human = 0.0;  ///< N_p * C_m
    double C_AI = 0.0;     ///< F + N_p * V_a
    double R = 0.0;        ///< percentage reduction, (C_human - C_AI) / C_human * 100
    /// Non-fatal findings, e.g. V_a not well below C_m.
    std::vector<std::string> warnings;
};

/// Throws ValidationError when N_p <= 0 (R undefined) or an input is negative.
MonitoringCosts monitoring_costs(const CohortEconConfig& cfg);

/// NPV = sum over t = 0..T of (B_t - C_t) / (1 + r)^t, rounded to cents.
/// Throws ValidationError when r <= -1.
double npv(const std::vector<CashFlow>& flows, double r);

}  // namespace pulse::econ
