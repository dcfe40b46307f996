#pragma once

#include "gpe/error.hpp"
#include "gpe/grid.hpp"
#include "gpe/fft.hpp"
#include "gpe/spectral.hpp"
#include "gpe/kernel.hpp"
#include "gpe/functionals.hpp"
#include "gpe/fibering.hpp"
#include "gpe/thresholds.hpp"
#include "gpe/solver.hpp"
#include "gpe/dynamics.hpp"
#include "gpe/io.hpp"
#include "gpe/cli.hpp"
