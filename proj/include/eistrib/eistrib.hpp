#pragma once

// Umbrella header: equivalent-circuit impedance analysis and film-thickness
// calibration for lubricated contacts.

#include "eistrib/calibration.hpp"
#include "eistrib/circuit.hpp"
#include "eistrib/contact.hpp"
#include "eistrib/csv.hpp"
#include "eistrib/ehd.hpp"
#include "eistrib/errors.hpp"
#include "eistrib/fit.hpp"
#include "eistrib/numeric.hpp"
#include "eistrib/spectrum.hpp"
#include "eistrib/svg.hpp"
