#pragma once

#include "hyperdist/errors.hpp"
#include "hyperdist/random.hpp"
#include "hyperdist/core.hpp"
#include "hyperdist/metrics.hpp"
#include "hyperdist/sensitivity.hpp"
#include "hyperdist/streaming.hpp"
#include "hyperdist/trajectories.hpp"
#include "hyperdist/parallel.hpp"
#include "hyperdist/analysis.hpp"
