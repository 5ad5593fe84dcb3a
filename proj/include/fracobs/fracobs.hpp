#pragma once

#include "fracobs/errors.hpp"
#include "fracobs/frac_core.hpp"
#include "fracobs/matching.hpp"
#include "fracobs/pattern.hpp"
#include "fracobs/placement.hpp"
#include "fracobs/random.hpp"
#include "fracobs/struct_graph.hpp"
#include "fracobs/sweep.hpp"
#include "fracobs/system_file.hpp"
