#pragma once

#include "catalog.hpp"
#include "common.hpp"
#include "conditions.hpp"
#include "kkt.hpp"
#include "krylov.hpp"
#include "linalg_sym.hpp"
#include "problem.hpp"
#include "qsdp_io.hpp"
#include "solver.hpp"
