#pragma once

#include "tightfocus/constants.hpp"
#include "tightfocus/numerics/errors.hpp"
#include "tightfocus/numerics/quadrature.hpp"
#include "tightfocus/numerics/special_functions.hpp"
#include "tightfocus/lens_field.hpp"
#include "tightfocus/mode_propagator.hpp"
#include "tightfocus/green_focus.hpp"
#include "tightfocus/scattering.hpp"
#include "tightfocus/extinction.hpp"
#include "tightfocus/spectra.hpp"
#include "tightfocus/spectra_io.hpp"
