#pragma once

// Umbrella header: dynamic simulation of swing + network equations by
// direct integration, waveform relaxation, and windowed relaxation.

#include "wrsim/bench.hpp"
#include "wrsim/dae_core.hpp"
#include "wrsim/errors.hpp"
#include "wrsim/grid_model.hpp"
#include "wrsim/io.hpp"
#include "wrsim/metrics.hpp"
#include "wrsim/newton.hpp"
#include "wrsim/powerflow.hpp"
#include "wrsim/scenario.hpp"
#include "wrsim/sim_di.hpp"
#include "wrsim/sim_wr.hpp"
#include "wrsim/sim_wrw.hpp"
#include "wrsim/trajectory.hpp"
