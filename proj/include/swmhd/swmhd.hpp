#pragma once

// Umbrella header.

#include "swmhd/analysis.hpp"
#include "swmhd/conservation.hpp"
#include "swmhd/convergence.hpp"
#include "swmhd/core.hpp"
#include "swmhd/error.hpp"
#include "swmhd/mass_scheme.hpp"
#include "swmhd/pointwise.hpp"
#include "swmhd/run.hpp"
#include "swmhd/scenario.hpp"
#include "swmhd/simulate.hpp"
#include "swmhd/spline.hpp"
#include "swmhd/threelayer_scheme.hpp"
#include "swmhd/topography.hpp"
#include "swmhd/tridiagonal.hpp"
