#pragma once

#include <numbers>

namespace foilwind {

inline constexpr double pi = std::numbers::pi;
inline constexpr double mu0 = 4.0e-7 * pi;          // H/m
inline constexpr double nu0 = 1.0 / mu0;            // 1/(H m)
inline constexpr double eps0 = 8.8541878128e-12;    // F/m

}  // namespace foilwind
