#pragma once

// Dynamic fracture of a beam on a breakable cohesive foundation:
// constitutive model, finite-difference discretization, explicit dynamics,
// crack metrics, refinement sweeps, and file I/O.

#include "cohbeam/bending.hpp"
#include "cohbeam/config.hpp"
#include "cohbeam/dynamics.hpp"
#include "cohbeam/energy.hpp"
#include "cohbeam/grid.hpp"
#include "cohbeam/io.hpp"
#include "cohbeam/metrics.hpp"
#include "cohbeam/model.hpp"
#include "cohbeam/static_solver.hpp"
#include "cohbeam/sweep.hpp"
