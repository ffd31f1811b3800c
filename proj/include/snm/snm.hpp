// snm.hpp - umbrella header.

#pragma once

#include "snm/analytics.hpp"
#include "snm/bitword.hpp"
#include "snm/channel.hpp"
#include "snm/codebook.hpp"
#include "snm/config.hpp"
#include "snm/detector.hpp"
#include "snm/rng.hpp"
#include "snm/sim.hpp"
