#pragma once

// Umbrella header for the quantum channel discrimination toolkit.

#include "qcd/chandiv.hpp"
#include "qcd/channel.hpp"
#include "qcd/complex_matrix.hpp"
#include "qcd/divergence.hpp"
#include "qcd/eig.hpp"
#include "qcd/errors.hpp"
#include "qcd/exponents.hpp"
#include "qcd/io.hpp"
#include "qcd/optimize.hpp"
#include "qcd/property_suites.hpp"
#include "qcd/protosim.hpp"
#include "qcd/rng.hpp"
#include "qcd/states.hpp"
