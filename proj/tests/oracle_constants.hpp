#pragma once

// Frozen Monte Carlo oracles, computed once (before any estimator code
// existed) and reused by every test. Regenerate with:
//   true_ate_oracle({Overlap::large, Effect::hetero, 0.0, 2000,
//                    WMoments::sample}, 1000000, kHeteroOracleSeed)
namespace oracle {

inline constexpr unsigned long long kHeteroOracleSeed = 0x5EEDBA5Eull;
inline constexpr unsigned long long kHeteroOracleDraws = 1000000ull;

// hetero scenarios (tau = 0, sample-moment standardization); the effect shift
// does not involve the overlap arm, so large and small share the constant
inline constexpr double kHeteroTrueAte = 0.0023128086;
inline constexpr double kHeteroTrueAteSe = 0.0061839045;

// homo scenarios: the shift is identically tau
inline constexpr double kHomoTrueAte = 0.0;

}  // namespace oracle
