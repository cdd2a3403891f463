#pragma once

#include "ccx/envelope.hpp"
#include "ccx/grid.hpp"
#include "ccx/grid_io.hpp"
#include "ccx/medial.hpp"
#include "ccx/minisphere.hpp"
#include "ccx/oracle.hpp"
#include "ccx/parallel.hpp"
#include "ccx/singularity.hpp"
#include "ccx/transforms.hpp"
