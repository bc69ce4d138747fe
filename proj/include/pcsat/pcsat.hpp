#pragma once

// Umbrella header: the whole library in one include.

#include "pcsat/date.hpp"
#include "pcsat/domain.hpp"
#include "pcsat/errors.hpp"
#include "pcsat/experiment.hpp"
#include "pcsat/io.hpp"
#include "pcsat/loss.hpp"
#include "pcsat/mapping.hpp"
#include "pcsat/optimizer.hpp"
#include "pcsat/parallel.hpp"
#include "pcsat/rng.hpp"
#include "pcsat/strategy.hpp"
#include "pcsat/synthdata.hpp"
