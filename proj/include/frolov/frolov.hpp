#pragma once

#include "frolov/analysis.hpp"
#include "frolov/corpus.hpp"
#include "frolov/cubature.hpp"
#include "frolov/generator.hpp"
#include "frolov/harness.hpp"
#include "frolov/lattice.hpp"
#include "frolov/linalg.hpp"
#include "frolov/quadrature.hpp"
#include "frolov/rng.hpp"
#include "frolov/smoothness.hpp"
#include "frolov/summation.hpp"
#include "frolov/transform.hpp"
