#pragma once

#include "afmhd/boundary.hpp"
#include "afmhd/ct.hpp"
#include "afmhd/driver.hpp"
#include "afmhd/dump.hpp"
#include "afmhd/field.hpp"
#include "afmhd/flux_assembly.hpp"
#include "afmhd/grid.hpp"
#include "afmhd/integrator.hpp"
#include "afmhd/physics.hpp"
#include "afmhd/positivity.hpp"
#include "afmhd/problems.hpp"
#include "afmhd/riemann.hpp"
#include "afmhd/weno.hpp"
