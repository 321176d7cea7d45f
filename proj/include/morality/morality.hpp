#pragma once

#include "common.hpp"
#include "graph.hpp"
#include "io.hpp"
#include "generators.hpp"
#include "screens.hpp"
#include "eliminator.hpp"
#include "decider.hpp"
#include "sat_reduction.hpp"
