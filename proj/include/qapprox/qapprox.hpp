#pragma once
// Umbrella header.
#include "bloch.hpp"
#include "caratheodory.hpp"
#include "convex_solver.hpp"
#include "errors.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"
#include "pauli_analytic.hpp"
#include "problem_io.hpp"
#include "report.hpp"
#include "sweep.hpp"
