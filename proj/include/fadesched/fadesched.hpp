// Umbrella header.
#pragma once

#include "fadesched/asymptotics.hpp"
#include "fadesched/error_exponent.hpp"
#include "fadesched/fading_channel.hpp"
#include "fadesched/link_optimizer.hpp"
#include "fadesched/rng.hpp"
#include "fadesched/scheduler.hpp"
#include "fadesched/sim_harness.hpp"
#include "fadesched/validation.hpp"
