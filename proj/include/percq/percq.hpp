#pragma once

#include "percq/engine.hpp"
#include "percq/errors.hpp"
#include "percq/percolation.hpp"
#include "percq/protocol.hpp"
#include "percq/qstate.hpp"
#include "percq/rng.hpp"
#include "percq/serialize.hpp"
#include "percq/sweep.hpp"
#include "percq/topology.hpp"
