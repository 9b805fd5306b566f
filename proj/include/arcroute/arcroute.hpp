#pragma once

#include "arcroute/aggregator.hpp"
#include "arcroute/config.hpp"
#include "arcroute/datetime.hpp"
#include "arcroute/error.hpp"
#include "arcroute/eval.hpp"
#include "arcroute/lookup.hpp"
#include "arcroute/memento.hpp"
#include "arcroute/profiler.hpp"
#include "arcroute/router.hpp"
#include "arcroute/sampler.hpp"
#include "arcroute/simarchive.hpp"
#include "arcroute/uri.hpp"
