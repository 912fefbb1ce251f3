#pragma once

#include "milpacq/benchmark.hpp"
#include "milpacq/eval.hpp"
#include "milpacq/io.hpp"
#include "milpacq/linalg.hpp"
#include "milpacq/loss.hpp"
#include "milpacq/model.hpp"
#include "milpacq/search.hpp"
#include "milpacq/solver.hpp"
#include "milpacq/synthdata.hpp"
