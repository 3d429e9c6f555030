#pragma once

#include "cjs/errors.hpp"
#include "cjs/rng.hpp"
#include "cjs/multivector.hpp"
#include "cjs/grad_field.hpp"
#include "cjs/sampling.hpp"
#include "cjs/sensing_operator.hpp"
#include "cjs/diagnostics.hpp"
#include "cjs/measurement.hpp"
#include "cjs/image_io.hpp"
#include "cjs/phantoms.hpp"
#include "cjs/solver_bpdn.hpp"
#include "cjs/solver_omp.hpp"
#include "cjs/experiment.hpp"
