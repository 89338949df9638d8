#pragma once

#include "ckc/baselines.hpp"
#include "ckc/bench.hpp"
#include "ckc/constraints.hpp"
#include "ckc/core.hpp"
#include "ckc/datagen.hpp"
#include "ckc/error.hpp"
#include "ckc/eval.hpp"
#include "ckc/io.hpp"
#include "ckc/pair_index.hpp"
#include "ckc/rds.hpp"
#include "ckc/rng.hpp"
#include "ckc/solution.hpp"
#include "ckc/solver.hpp"
