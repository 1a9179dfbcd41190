#pragma once

// Values re-derived outside the library by tests/oracles/derive.py.

#include <array>

namespace fixtures {

// A_k for profile [0.5, 0.875, 1], lengths [l_ref, 0], alpha 0.3, gamma_min 0.9
inline constexpr std::array<double, 2> kTwoSegmentAdvantages = {1.08625, 1.0375};

// gamma 0.9, Phi 0.5 -> 0.75
inline constexpr double kRawGain = 0.25;
inline constexpr double kTax = 0.05;
inline constexpr double kRecombined = 0.175;

// F at Phi 5/8 -> 7/8 for gamma 1.0 .. 0.6, exact fractions
inline constexpr std::array<double, 5> kTableGamma = {1.0, 0.9, 0.8, 0.7, 0.6};
inline constexpr std::array<double, 5> kTableExactF = {0.25, 13.0 / 80, 3.0 / 40, -1.0 / 80,
                                                       -0.1};
inline constexpr std::array<double, 5> kTablePrintedF = {0.250, 0.163, 0.075, -0.013, -0.100};
inline constexpr std::array<double, 5> kTableDiscounted = {0.875, 63.0 / 80, 0.7, 49.0 / 80,
                                                           21.0 / 40};

// population std, eps 1e-8
inline constexpr std::array<double, 2> kGrpoPair = {0.9999999800000003, -0.9999999800000003};
inline constexpr std::array<double, 4> kGrpoOneOfFour = {
    1.7320507675688783, -0.5773502558562927, -0.5773502558562927, -0.5773502558562927};

inline constexpr double kLengthSlope = -0.0001953125;  // Phi_next 1, gamma_min 0.9, l_ref 512

// sandbag paths on the default chain (token-cost lengths, l_ref 32)
inline constexpr double kMrtMono = 0.75;
inline constexpr double kMrtDip = 0.825;
inline constexpr double kShapeMono = 0.2625;
inline constexpr double kShapeDip = 0.2475;
inline constexpr double kShapeMonoEqual = 0.225;
inline constexpr double kShapeDipEqual = 0.2325;
inline constexpr std::array<std::size_t, 4> kMonoLengths = {16, 16, 16, 16};
inline constexpr std::array<std::size_t, 4> kDipLengths = {32, 32, 48, 16};

inline constexpr std::array<double, 2> kWeightsZeroTwo = {0.5000004999995, 1.4999995000005};

// uniform policy on the default chain
inline constexpr std::array<double, 9> kCompletionStage0 = {
    0.3392677307128906, 0.40840721130371094, 0.5082931518554688,
    0.6162815093994141, 0.7174415588378906,  0.8011569976806641,
    0.8612136840820312, 0.8964786529541016,  0.9107322692871094};
inline constexpr std::array<double, 9> kCompletionStage4 = {
    0.1923828125, 0.26904296875, 0.37890625, 0.50048828125, 0.625,
    0.7421875,    0.83984375,    0.904296875, 0.9326171875};

// 8 transitions (phi_start, gain), one pair per bin
inline constexpr std::array<std::array<double, 2>, 8> kDistributionFixture = {{
    {0.0, 0.25}, {0.125, 0.125}, {0.25, 0.25}, {0.375, 0.0},
    {0.5, 0.125}, {0.625, -0.125}, {0.75, 0.125}, {0.875, -0.25}}};
inline constexpr std::array<double, 4> kDistributionMeans = {0.1875, 0.125, 0.0, -0.0625};
inline constexpr std::array<double, 4> kDistributionPercent = {
    45.16129032258064, 35.08064516129031, 14.919354838709674, 4.838709677419354};

}  // namespace fixtures
