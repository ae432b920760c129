#pragma once

#include "herdsim/agents.hpp"
#include "herdsim/errors.hpp"
#include "herdsim/fft.hpp"
#include "herdsim/ingest.hpp"
#include "herdsim/io.hpp"
#include "herdsim/noise.hpp"
#include "herdsim/params.hpp"
#include "herdsim/rng.hpp"
#include "herdsim/run.hpp"
#include "herdsim/sde.hpp"
#include "herdsim/series.hpp"
#include "herdsim/special.hpp"
#include "herdsim/stats.hpp"
