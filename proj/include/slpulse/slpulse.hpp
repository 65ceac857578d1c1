#pragma once

#include "slpulse/analytic.hpp"
#include "slpulse/config.hpp"
#include "slpulse/config_io.hpp"
#include "slpulse/diagnostics.hpp"
#include "slpulse/dispersion.hpp"
#include "slpulse/field_state.hpp"
#include "slpulse/hierarchy.hpp"
#include "slpulse/output.hpp"
#include "slpulse/params.hpp"
