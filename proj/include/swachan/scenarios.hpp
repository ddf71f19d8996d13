#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "swachan/ltv.hpp"

namespace swa {

enum class CaseKind { MovingRx, MovingTx, Static, CoMoving };

const char* to_string(CaseKind kind);
CaseKind case_kind_from_string(const std::string& name);

/// Parameters of the canonical straight-line cases. Positive v moves the
/// transceivers apart (or both in +x for CoMoving).
struct CaseSpec {
  CaseKind kind = CaseKind::Static;
  double d0 = 0.0;                  // m, separation at n = 0
  double v = 0.0;                   // m/s
  Waveguide wg;
  double transceiver_height = 0.0;  // m, both transceivers
  double fs = 0.0;                  // Hz
  std::int64_t duration_samples = 0;  // 0 = enough for a 1 m sweep of d(n)
  SynthParams synth;
  double a0 = 0.0;                  // m, absolute origin of the Tx
};

/// Distance between transceivers at sample n for the built scenario.
double case_distance(const CaseSpec& spec, std::int64_t n);

/// Throws UnsupportedRegimeError when v >= c. Speeds above 0.1 c are outside
/// the reciprocity approximation; regime_warning reports that.
DynamicScenario build_scenario(const CaseSpec& spec);

std::optional<std::string> regime_warning(const CaseSpec& spec);

/// LTI response of the co-moving case: lag-m value equals the lag-m tap of the
/// static channel at distance d0 + v * m * Ts. Requires kind == CoMoving.
std::vector<double> dynamic_lti_response(const CaseSpec& spec,
                                         std::optional<LagWindow> window = {});

}  // namespace swa
