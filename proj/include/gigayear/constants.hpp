#pragma once

namespace gigayear {

// Boltzmann constant [J/K], 2019 SI exact value.
inline constexpr double k_boltzmann = 1.380649e-23;

// Julian year [s]; shared by the retention math and the CLI flag parsing.
inline constexpr double seconds_per_year = 3.1557e7;

inline constexpr double joules_per_ev = 1.602176634e-19;

// Reference temperature for the linear barrier-vs-temperature hook [K].
inline constexpr double reference_temperature = 300.0;

}  // namespace gigayear
