#pragma once

#include "clocksync/clock_model.hpp"
#include "clocksync/crlb.hpp"
#include "clocksync/denoise.hpp"
#include "clocksync/errors.hpp"
#include "clocksync/estimator.hpp"
#include "clocksync/exchange_sim.hpp"
#include "clocksync/harness.hpp"
#include "clocksync/io.hpp"
#include "clocksync/matrix_forms.hpp"
#include "clocksync/seed.hpp"
