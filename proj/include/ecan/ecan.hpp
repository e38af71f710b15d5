#pragma once

#include "ecan/config.hpp"
#include "ecan/geometry.hpp"
#include "ecan/solver.hpp"
#include "ecan/tunneler.hpp"
#include "ecan/navigator.hpp"
#include "ecan/agent.hpp"
#include "ecan/world.hpp"
#include "ecan/planner.hpp"
