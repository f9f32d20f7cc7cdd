#include <catch_amalgamated.hpp>

#include "srpt/units.hpp"

using namespace srpt;
using Catch::Matchers::WithinRel;

TEST_CASE("flux quantum from exact SI constants", "[units]") {
  // Phi0 = h/2e with the 2019 SI values.
  CHECK_THAT(flux_quantum, WithinRel(2.067833848e-15, 1e-9));
  CHECK_THAT(hbar, WithinRel(1.054571817e-34, 1e-9));
}

TEST_CASE("Josephson energy of 0.75 nH", "[units]") {
  const double E = units::josephson_energy(0.75 * units::nH);
  // (Phi0/2pi)^2 / L, evaluated by hand from Phi0.
  const double phi_reduced = 2.067833848e-15 / (2.0 * 3.14159265358979323846);
  CHECK_THAT(E, WithinRel(phi_reduced * phi_reduced / 0.75e-9, 1e-9));
  CHECK_THAT(units::GHz_from_energy(E), WithinRel(217.95, 1e-3));
  CHECK_THAT(units::josephson_inductance(E), WithinRel(0.75e-9, 1e-14));
}

TEST_CASE("frequency and temperature conversions round-trip", "[units]") {
  CHECK_THAT(units::GHz_from_energy(units::energy_from_GHz(12.5)), WithinRel(12.5, 1e-14));
  CHECK_THAT(units::GHz_from_angular(units::angular_from_GHz(3.0)), WithinRel(3.0, 1e-14));
  // kB T/h = 20.8366 GHz at 1 K.
  CHECK_THAT(units::GHz_from_kelvin(1.0), WithinRel(20.836619, 1e-6));
  CHECK_THAT(units::kelvin_from_GHz(units::GHz_from_kelvin(0.3)), WithinRel(0.3, 1e-14));
}

TEST_CASE("unit literals", "[units]") {
  using namespace srpt::literals;
  CHECK(0.45_nH == 0.45 * units::nH);
  CHECK(24_fF == 24.0 * units::fF);
}
