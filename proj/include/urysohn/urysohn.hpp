#ifndef URYSOHN_URYSOHN_HPP
#define URYSOHN_URYSOHN_HPP

#include "urysohn/bounds.hpp"
#include "urysohn/control.hpp"
#include "urysohn/ensemble.hpp"
#include "urysohn/grid.hpp"
#include "urysohn/levels.hpp"
#include "urysohn/oracle.hpp"
#include "urysohn/partition.hpp"
#include "urysohn/pipeline.hpp"
#include "urysohn/registry.hpp"
#include "urysohn/solver.hpp"
#include "urysohn/sphere_net.hpp"
#include "urysohn/system.hpp"
#include "urysohn/types.hpp"

#endif // URYSOHN_URYSOHN_HPP
