// Umbrella header: the whole library.
#pragma once

#include "gimprint/analysis.hpp"
#include "gimprint/config.hpp"
#include "gimprint/core.hpp"
#include "gimprint/fft.hpp"
#include "gimprint/fields.hpp"
#include "gimprint/grid.hpp"
#include "gimprint/invariants.hpp"
#include "gimprint/parallel.hpp"
#include "gimprint/propagator.hpp"
#include "gimprint/quadrature.hpp"
#include "gimprint/rk4.hpp"
#include "gimprint/runner.hpp"
#include "gimprint/small_matrix.hpp"
#include "gimprint/snapshot.hpp"
#include "gimprint/spinor_field.hpp"
#include "gimprint/summation.hpp"
#include "gimprint/tripod.hpp"
#include "gimprint/two_level.hpp"
