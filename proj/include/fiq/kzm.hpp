#pragma once

#include <stdexcept>

namespace fiq {

// Universality constants for the Kibble-Zurek predictions. Defaults are the
// standard 3D XY values with dynamical exponent z = 1 in two dimensions.
struct KzmConstants {
  double nu = 0.6717;
  double beta = 0.3486;
  double z = 1.0;
  double d = 2.0;
};

struct KzmPrediction {
  double op_growth = 0.0;      // order parameter ~ t_a^{(1 - beta/nu)/(z + 1/nu)}
  double defect_decay = 0.0;   // defect density  ~ t_a^{-d nu/(1 + z nu)}
  double length_growth = 0.0;  // correlation len ~ t_a^{nu/(1 + z nu)}
};

inline KzmPrediction kzm_exponents(const KzmConstants& c = {}) {
  if (c.nu <= 0 || c.z <= 0 || c.d <= 0 || c.beta < 0)
    throw std::invalid_argument("kzm_exponents: constants must be positive");
  KzmPrediction p;
  p.op_growth = (1.0 - c.beta / c.nu) / (c.z + 1.0 / c.nu);
  p.defect_decay = -c.d * c.nu / (1.0 + c.z * c.nu);
  p.length_growth = c.nu / (1.0 + c.z * c.nu);
  return p;
}

}  // namespace fiq
