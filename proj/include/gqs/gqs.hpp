// gqs.hpp
// Umbrella header for the generalized quantum search library.

#pragma once

#include "gqs/core.hpp"
#include "gqs/spectrum.hpp"
#include "gqs/search.hpp"
#include "gqs/analysis.hpp"
#include "gqs/phase_inversion.hpp"
#include "gqs/amplification.hpp"
#include "gqs/scenarios.hpp"
#include "gqs/report.hpp"
