#pragma once

#include "core.hpp"
#include "quadrature.hpp"
#include "pulse.hpp"
#include "wavepacket.hpp"
#include "kernel.hpp"
#include "amplitudes.hpp"
#include "amplitude_grid.hpp"
#include "observables.hpp"
#include "spectral.hpp"
#include "io.hpp"
