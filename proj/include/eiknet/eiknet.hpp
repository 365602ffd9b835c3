#pragma once

#include "eiknet/config.hpp"
#include "eiknet/critical.hpp"
#include "eiknet/geometry.hpp"
#include "eiknet/hamiltonian.hpp"
#include "eiknet/hopflax.hpp"
#include "eiknet/io.hpp"
#include "eiknet/level_graph.hpp"
#include "eiknet/network.hpp"
#include "eiknet/quadrature.hpp"
#include "eiknet/rng.hpp"
