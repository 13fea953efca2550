#pragma once

// Umbrella header: heralded-biphoton pump-probe signals and their amplified
// classical-probe surrogates, with the term-level bookkeeping that proves the
// two coincide.

#include "qls/config.hpp"
#include "qls/correlators.hpp"
#include "qls/errors.hpp"
#include "qls/grid.hpp"
#include "qls/io.hpp"
#include "qls/matter_response.hpp"
#include "qls/phase_matching.hpp"
#include "qls/pulses.hpp"
#include "qls/signal_engine.hpp"
#include "qls/term_expansion.hpp"
#include "qls/units.hpp"
