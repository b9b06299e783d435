#pragma once

#include "ssa/centering.hpp"
#include "ssa/convex.hpp"
#include "ssa/errors.hpp"
#include "ssa/evaluation.hpp"
#include "ssa/gabor.hpp"
#include "ssa/greedy.hpp"
#include "ssa/image_io.hpp"
#include "ssa/matrix_io.hpp"
#include "ssa/model.hpp"
#include "ssa/random.hpp"
#include "ssa/synth.hpp"
