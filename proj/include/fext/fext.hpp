#pragma once

// Umbrella header: worst-case-optimal Fourier multipliers for extrapolation
// in frequency, the fixed-point solver for the Hermitian parameter, and the
// multiresolution constructions built on top of them.

#include "fext/config.hpp"
#include "fext/domain.hpp"
#include "fext/experiment.hpp"
#include "fext/extrapolation.hpp"
#include "fext/family.hpp"
#include "fext/gram.hpp"
#include "fext/grid.hpp"
#include "fext/hermitian.hpp"
#include "fext/io.hpp"
#include "fext/multiplier.hpp"
#include "fext/multiresolution.hpp"
#include "fext/projection.hpp"
#include "fext/quadrature.hpp"
#include "fext/solver.hpp"
