#pragma once

#include "cellless/channel.hpp"
#include "cellless/connectivity.hpp"
#include "cellless/experiments.hpp"
#include "cellless/parallel.hpp"
#include "cellless/realization.hpp"
#include "cellless/rng.hpp"
#include "cellless/routing.hpp"
#include "cellless/scenario.hpp"
#include "cellless/selection.hpp"
