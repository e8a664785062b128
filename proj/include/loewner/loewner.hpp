#pragma once

#include <loewner/core.hpp>
#include <loewner/driving.hpp>
#include <loewner/explicit_family.hpp>
#include <loewner/forward_solver.hpp>
#include <loewner/inverse_solver.hpp>
#include <loewner/spiral_lab.hpp>
#include <loewner/analysis.hpp>
#include <loewner/io.hpp>
