#pragma once

#include "quillen/quadrature.hpp"
#include "quillen/special_functions.hpp"
#include "quillen/potential.hpp"
#include "quillen/convergence.hpp"
#include "quillen/radial_geometry.hpp"
#include "quillen/metrics.hpp"
#include "quillen/cohomology.hpp"
#include "quillen/torsion.hpp"
#include "quillen/experiments.hpp"
#include "quillen/json_io.hpp"
